#include <algorithm>
#include <cmath>
#include <set>
#include <utility>

#include "doctest.h"
#include "spheremix/directional.hpp"
#include "spheremix/synth.hpp"

using namespace spheremix;

namespace {

long pair_key(int n, const LabeledPair& p) { return static_cast<long>(p.i) * n + p.j; }

ScenarioConfig small_config(std::uint64_t seed) {
    ScenarioConfig sc;
    sc.n = 120;
    sc.K = 8;
    sc.r = 4;
    sc.L = 3;
    sc.source_dim = 20;
    sc.kappa = 120.0;
    sc.seed = seed;
    return sc;
}

}  // namespace

TEST_CASE("source windows reproduce the fixed four-source design") {
    auto w4 = source_windows(1000, 4);
    REQUIRE(w4.size() == 4);
    CHECK(w4[0] == std::pair<int, int>(0, 1000));
    CHECK(w4[1] == std::pair<int, int>(0, 500));
    CHECK(w4[2] == std::pair<int, int>(300, 800));
    CHECK(w4[3] == std::pair<int, int>(500, 1000));
    auto w2 = source_windows(1000, 2);
    REQUIRE(w2.size() == 2);
    CHECK(w2[1] == std::pair<int, int>(0, 500));
}

TEST_CASE("pair presets split the total with the fixed positive offset") {
    ScenarioConfig sc;
    sc.apply_pair_preset(0.06);
    CHECK(sc.sim_pos_pct == doctest::Approx(0.025));
    CHECK(sc.sim_neg_pct == doctest::Approx(0.035));
    CHECK(sc.rel_pos_pct == doctest::Approx(0.025));
    CHECK(sc.rel_neg_pct == doctest::Approx(0.035));
    sc.apply_pair_preset(0.04);
    CHECK(sc.sim_pos_pct == doctest::Approx(0.015));
    CHECK_THROWS_AS(sc.apply_pair_preset(0.01), std::invalid_argument);
}

TEST_CASE("scenario config validation rejects out-of-range settings") {
    ScenarioConfig sc;
    sc.L = 5;
    CHECK_THROWS_AS(sc.validate(), std::invalid_argument);
    sc = ScenarioConfig{};
    sc.source_dim = sc.r - 1;
    CHECK_THROWS_AS(sc.validate(), std::invalid_argument);
    sc = ScenarioConfig{};
    sc.r_diag = {1.0, 2.0};  // wrong length
    CHECK_THROWS_AS(sc.validate(), std::invalid_argument);
    sc = ScenarioConfig{};
    sc.anchor_fraction = 0.0;
    CHECK_THROWS_AS(sc.validate(), std::invalid_argument);
}

TEST_CASE("default-scale scenario has the advertised pair and cluster counts") {
    ScenarioConfig sc;
    sc.seed = 3;
    Scenario scn = generate_scenario(sc);

    const long total = 1000L * 999 / 2;
    const long expect = std::llround(0.025 * total) + std::llround(0.035 * total);
    CHECK(static_cast<long>(scn.pairs.sim.size()) == expect);
    CHECK(scn.pairs.rel.size() == scn.pairs.sim.size());
    CHECK(std::llabs(expect - 29970) <= 2);
    CHECK(static_cast<long>(scn.eval_pairs.sim.size()) == std::llround(0.02 * total));

    std::vector<int> sizes(sc.K, 0);
    for (int i = 0; i < sc.n; ++i) ++sizes[scn.truth.z[i]];
    int violations = 0;
    for (int s : sizes) violations += (s < 5 || s > 40);
    CHECK(violations == 0);

    // latent rows concentrate around their cluster mean at the planted kappa
    double cos_sum = 0.0;
    for (int i = 0; i < sc.n; ++i)
        cos_sum += scn.truth.V.row(i).dot(scn.truth.mu.row(scn.truth.z[i]));
    CHECK(std::abs(cos_sum / sc.n - mean_resultant_ratio(sc.r, sc.kappa)) < 0.01);
}

TEST_CASE("observed and held-out pairs are disjoint with the planted labels") {
    ScenarioConfig sc = small_config(9);
    Scenario scn = generate_scenario(sc);

    const long total = static_cast<long>(sc.n) * (sc.n - 1) / 2;
    CHECK(static_cast<long>(scn.pairs.sim.size()) ==
          std::llround(sc.sim_pos_pct * total) + std::llround(sc.sim_neg_pct * total));

    std::set<long> observed;
    long positives = 0;
    for (const auto& p : scn.pairs.sim) {
        observed.insert(pair_key(sc.n, p));
        positives += p.label;
    }
    CHECK(positives == std::llround(sc.sim_pos_pct * total));
    CHECK(observed.size() == scn.pairs.sim.size());
    for (const auto& p : scn.eval_pairs.sim) CHECK(observed.count(pair_key(sc.n, p)) == 0);
    int eval_pos = 0, eval_neg = 0;
    for (const auto& p : scn.eval_pairs.sim) (p.label == 1 ? eval_pos : eval_neg)++;
    CHECK(eval_pos > 0);
    CHECK(eval_neg > 0);
}

TEST_CASE("retained negatives are the hard ones by first-source cosine") {
    ScenarioConfig sc = small_config(14);
    sc.eval_pair_pct = 0.06;  // enough eval negatives for a stable mean
    Scenario scn = generate_scenario(sc);

    const auto& first = scn.universe.sources[0].embeddings;
    Eigen::MatrixXd unit = normalize_rows(first);
    auto cosine = [&](const LabeledPair& p) { return unit.row(p.i).dot(unit.row(p.j)); };

    double chosen = 0.0;
    long m = 0;
    for (const auto& p : scn.pairs.rel)
        if (p.label == 0) {
            chosen += cosine(p);
            ++m;
        }
    chosen /= m;

    // population mean over every pair the generator could have labeled negative
    double all = 0.0;
    long count = 0;
    std::set<long> negatives;
    for (const auto& p : scn.pairs.rel)
        if (p.label == 0) negatives.insert(pair_key(sc.n, p));
    for (const auto& p : scn.eval_pairs.rel)
        if (p.label == 0) {
            all += cosine(p);
            ++count;
        }
    CHECK(m > 100);
    CHECK(count > 100);
    CHECK(chosen > all / count + 0.05);
}

TEST_CASE("anchored clusters pin their features and the rest share support") {
    ScenarioConfig sc = small_config(5);
    sc.anchor_fraction = 0.5;
    Scenario scn = generate_scenario(sc);

    const auto& anchors = scn.truth.anchor_clusters;
    CHECK(static_cast<int>(anchors.size()) == std::llround(0.5 * sc.K));
    CHECK(std::is_sorted(anchors.begin(), anchors.end()));
    std::set<int> anchor_set(anchors.begin(), anchors.end());

    std::set<int> eval_set(scn.truth.eval_features.begin(), scn.truth.eval_features.end());
    for (int i = 0; i < sc.n; ++i) {
        const bool anchored = anchor_set.count(scn.truth.z[i]) > 0;
        CHECK(eval_set.count(i) == (anchored ? 0u : 1u));
        double total = 0.0;
        for (int pos = scn.priors.support_begin(i); pos < scn.priors.support_end(i); ++pos) {
            total += scn.priors.prob_at(pos);
            const bool in_anchor = anchor_set.count(scn.priors.cluster_at(pos)) > 0;
            CHECK(in_anchor == anchored);
        }
        CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
        if (anchored) {
            CHECK(scn.priors.support_size(i) == 1);
            CHECK(scn.priors.cluster_at(scn.priors.support_begin(i)) == scn.truth.z[i]);
        } else {
            CHECK(scn.priors.support_size(i) == sc.K - static_cast<int>(anchors.size()));
        }
    }
}

TEST_CASE("full anchoring makes every prior one-hot and the eval set empty") {
    ScenarioConfig sc = small_config(6);
    sc.anchor_fraction = 1.0;
    Scenario scn = generate_scenario(sc);
    CHECK(scn.truth.eval_features.empty());
    for (int i = 0; i < sc.n; ++i) {
        CHECK(scn.priors.support_size(i) == 1);
        CHECK(scn.priors.cluster_at(scn.priors.support_begin(i)) == scn.truth.z[i]);
    }
}

TEST_CASE("spectral priors stay on the non-anchored clusters and normalize") {
    ScenarioConfig sc = small_config(7);
    sc.anchor_fraction = 0.5;
    sc.spectral_priors = true;
    Scenario scn = generate_scenario(sc);

    std::set<int> anchor_set(scn.truth.anchor_clusters.begin(),
                             scn.truth.anchor_clusters.end());
    for (int i : scn.truth.eval_features) {
        double total = 0.0;
        for (int pos = scn.priors.support_begin(i); pos < scn.priors.support_end(i); ++pos) {
            CHECK(anchor_set.count(scn.priors.cluster_at(pos)) == 0);
            CHECK(scn.priors.prob_at(pos) > 0.0);
            total += scn.priors.prob_at(pos);
        }
        CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("spectral priors without candidate edges fall back to uniform") {
    ScenarioConfig sc = small_config(8);
    sc.anchor_fraction = 0.5;
    Scenario scn = generate_scenario(sc);
    PriorMatrix spectral =
        build_anchor_priors(sc, scn.truth.z, scn.truth.anchor_clusters, nullptr, 77);
    CHECK(spectral.dense() == scn.priors.dense());
}

TEST_CASE("scenario generation is reproducible and noise modes differ") {
    ScenarioConfig sc = small_config(10);
    Scenario a = generate_scenario(sc);
    Scenario b = generate_scenario(sc);
    CHECK(a.truth.V == b.truth.V);
    CHECK(a.truth.z == b.truth.z);
    CHECK(a.universe.sources[1].embeddings == b.universe.sources[1].embeddings);
    REQUIRE(a.pairs.sim.size() == b.pairs.sim.size());
    for (size_t t = 0; t < a.pairs.sim.size(); ++t) {
        CHECK(a.pairs.sim[t].i == b.pairs.sim[t].i);
        CHECK(a.pairs.sim[t].label == b.pairs.sim[t].label);
    }

    CHECK_NOTHROW(a.universe.validate(true));  // vmf noise keeps rows unit

    sc.noise = NoiseModel::gaussian;
    Scenario g = generate_scenario(sc);
    CHECK_THROWS_AS(g.universe.validate(true), std::invalid_argument);
    CHECK_NOTHROW(g.universe.validate(false));

    sc.seed = 11;
    Scenario c = generate_scenario(sc);
    CHECK(c.truth.V != g.truth.V);
}

TEST_CASE("anisotropic relatedness diagonal lands in the planted truth") {
    ScenarioConfig sc = small_config(12);
    sc.r_diag = {8.0, 5.0, 2.0, 0.5};
    Scenario scn = generate_scenario(sc);
    CHECK(scn.truth.R(0, 0) == 8.0);
    CHECK(scn.truth.R(3, 3) == 0.5);
    CHECK(scn.truth.R(0, 1) == 0.0);
}
