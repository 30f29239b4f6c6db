#include <cmath>
#include <random>

#include "doctest.h"
#include "instances.hpp"
#include "spheremix/fit.hpp"
#include "spheremix/io.hpp"
#include "spheremix/synth.hpp"

using namespace spheremix;

TEST_CASE("doubles survive a write/parse round trip at full precision") {
    for (double v : {1.0 / 3.0, 0.1, -2.5e-17, 1e300, 0.0, 29971.0, -0.125}) {
        CHECK(parse_double(format_double(v)) == v);
    }
    CHECK(format_double(0.5) == "0.5");
    CHECK_THROWS_AS(parse_double("12,5"), InputError);
    CHECK_THROWS_AS(parse_double(""), InputError);
}

TEST_CASE("matrix csv round trips byte for byte") {
    testutil::TempDir tmp("io_matrix");
    std::mt19937_64 gen(31);
    Eigen::MatrixXd m = testutil::random_unit_rows(7, 3, gen);
    std::vector<int> ids = {0, 2, 3, 5, 8, 9, 11};
    const auto path = tmp.path() / "m.csv";
    write_matrix_csv(path, "feature_id", ids, m);

    auto [rids, rm] = read_matrix_csv(path, "feature_id");
    CHECK(rids == ids);
    CHECK(rm == m);

    const auto again = tmp.path() / "m2.csv";
    write_matrix_csv(again, "feature_id", rids, rm);
    CHECK(read_text_file(path) == read_text_file(again));

    CHECK_THROWS_AS(read_matrix_csv(path, "cluster_id"), InputError);
    CHECK_THROWS_AS(read_matrix_csv(tmp.path() / "missing.csv", "feature_id"), InputError);
}

TEST_CASE("labels, pairs, and priors round trip exactly") {
    testutil::TempDir tmp("io_small");
    auto inst = testutil::make_random_instance(15, 4, 3, 2, 32, 2);

    Eigen::VectorXi z(4);
    z << 3, 1, 0, 2;
    write_labels_csv(tmp.path() / "z.csv", "feature_id", {0, 1, 2, 3}, z);
    auto [ids, rz] = read_labels_csv(tmp.path() / "z.csv", "feature_id");
    CHECK(ids == std::vector<int>{0, 1, 2, 3});
    CHECK(rz == z);

    write_pairs_csv(tmp.path() / "pairs.csv", inst.pairs);
    RelationalPairSet rp = read_pairs_csv(tmp.path() / "pairs.csv", 15);
    REQUIRE(rp.sim.size() == inst.pairs.sim.size());
    REQUIRE(rp.rel.size() == inst.pairs.rel.size());
    write_pairs_csv(tmp.path() / "pairs2.csv", rp);
    CHECK(read_text_file(tmp.path() / "pairs.csv") == read_text_file(tmp.path() / "pairs2.csv"));

    write_priors_csv(tmp.path() / "priors.csv", inst.priors);
    PriorMatrix pr = read_priors_csv(tmp.path() / "priors.csv", 15, 4);
    CHECK(pr.dense() == inst.priors.dense());

    CHECK_THROWS_AS(read_pairs_csv(tmp.path() / "pairs.csv", 3), InputError);
}

TEST_CASE("malformed csv is reported as an input error") {
    testutil::TempDir tmp("io_bad");
    write_text_file(tmp.path() / "bad.csv", "feature_id,dim_0\n0,1.0,extra\n");
    CHECK_THROWS_AS(read_matrix_csv(tmp.path() / "bad.csv", "feature_id"), InputError);
    write_text_file(tmp.path() / "bad2.csv", "feature_id,dim_0\nzero,1.0\n");
    CHECK_THROWS_AS(read_matrix_csv(tmp.path() / "bad2.csv", "feature_id"), InputError);
    write_text_file(tmp.path() / "bad3.csv", "channel,i,j,label\nX,0,1,1\n");
    CHECK_THROWS_AS(read_pairs_csv(tmp.path() / "bad3.csv", 5), InputError);
}

TEST_CASE("universe and model directories round trip") {
    testutil::TempDir tmp("io_dirs");
    auto inst = testutil::make_random_instance(20, 4, 3, 3, 33);

    write_universe(tmp.path() / "sources", inst.u);
    FeatureUniverse ru = read_universe(tmp.path() / "sources");
    REQUIRE(ru.sources.size() == inst.u.sources.size());
    CHECK(ru.n == inst.u.n);
    for (size_t l = 0; l < ru.sources.size(); ++l) {
        CHECK(ru.sources[l].feature_ids == inst.u.sources[l].feature_ids);
        CHECK(ru.sources[l].embeddings == inst.u.sources[l].embeddings);
    }

    inst.s.z = Eigen::VectorXi::Zero(20);
    write_model(tmp.path() / "model", inst.s, CompositeWeights{1.0, 0.5, 2.0});
    ModelState rs = read_model(tmp.path() / "model");
    CHECK(rs.V == inst.s.V);
    CHECK(rs.mu == inst.s.mu);
    CHECK(rs.R == inst.s.R);
    CHECK(rs.kappa == inst.s.kappa);
    CHECK(rs.beta1 == inst.s.beta1);
    CHECK(rs.beta3 == inst.s.beta3);
    CHECK(rs.z == inst.s.z);
    REQUIRE(rs.W.size() == inst.s.W.size());
    CHECK(rs.W[2] == inst.s.W[2]);
}

TEST_CASE("scenario directories round trip through their json config") {
    testutil::TempDir tmp("io_scn");
    ScenarioConfig sc;
    sc.n = 60;
    sc.K = 5;
    sc.r = 3;
    sc.L = 2;
    sc.source_dim = 10;
    sc.seed = 34;
    Scenario scn = generate_scenario(sc);
    write_scenario(tmp.path() / "scn", scn);
    Scenario rs = read_scenario(tmp.path() / "scn");
    CHECK(rs.truth.V == scn.truth.V);
    CHECK(rs.truth.z == scn.truth.z);
    CHECK(rs.truth.anchor_clusters == scn.truth.anchor_clusters);
    CHECK(rs.truth.eval_features == scn.truth.eval_features);
    CHECK(rs.priors.dense() == scn.priors.dense());
    CHECK(rs.eval_pairs.rel.size() == scn.eval_pairs.rel.size());
    CHECK(rs.config.seed == sc.seed);
    CHECK(rs.truth.kappa == scn.truth.kappa);
}

TEST_CASE("config json parsing is strict and canonical") {
    ScenarioConfig sc = scenario_config_from_json("{\"n\": 100, \"K\": 7, \"seed\": 5}");
    CHECK(sc.n == 100);
    CHECK(sc.K == 7);
    CHECK(sc.r == 6);  // defaults preserved
    const std::string canon = scenario_config_to_json(sc);
    CHECK(scenario_config_to_json(scenario_config_from_json(canon)) == canon);

    CHECK_THROWS_AS(scenario_config_from_json("{\"bogus\": 1}"), InputError);
    CHECK_THROWS_AS(scenario_config_from_json("{\"n\": -4}"), InputError);
    CHECK_THROWS_AS(scenario_config_from_json("not json"), InputError);

    FitConfig fc = fit_config_from_json("{\"r\": 4, \"w_sim\": 0.5, \"max_outer\": 9}");
    CHECK(fc.r == 4);
    CHECK(fc.weights.sim == 0.5);
    CHECK(fc.max_outer == 9);
    const std::string fcanon = fit_config_to_json(fc);
    CHECK(fit_config_to_json(fit_config_from_json(fcanon)) == fcanon);
    CHECK_THROWS_AS(fit_config_from_json("{\"weights\": []}"), InputError);
}

TEST_CASE("config digests are stable and collision-averse") {
    const std::string a = scenario_config_to_json(ScenarioConfig{});
    CHECK(config_digest(a) == config_digest(a));
    CHECK(config_digest(a).size() == 16);
    ScenarioConfig changed;
    changed.n = 999;
    CHECK(config_digest(scenario_config_to_json(changed)) != config_digest(a));
}

TEST_CASE("trace csv lists init rows then outer rows with loss columns") {
    FitTrace trace;
    trace.step1_objective = {2.0, 1.5, 1.25};
    OuterRecord rec;
    rec.outer = 1;
    rec.composite = 1.0;
    rec.lr = 0.4;
    rec.vmf = 0.3;
    rec.sim = 0.2;
    rec.rel = 0.1;
    rec.em_iterations = 4;
    rec.step3_steps = 9;
    rec.wall_ms = 12.5;
    trace.outer.push_back(rec);
    trace.converged = true;

    testutil::TempDir tmp("io_trace");
    write_trace_csv(tmp.path() / "trace.csv", trace);
    const std::string text = read_text_file(tmp.path() / "trace.csv");
    CHECK(text.find("stage,index,composite") == 0);
    CHECK(text.find("init,0,2") != std::string::npos);
    CHECK(text.find("outer,1,1,0.4,0.3,0.2,0.1,4,9,") != std::string::npos);
}
