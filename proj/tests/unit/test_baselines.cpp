#include <cmath>
#include <random>
#include <set>

#include "doctest.h"
#include "instances.hpp"
#include "spheremix/baselines.hpp"
#include "spheremix/directional.hpp"
#include "spheremix/linalg.hpp"
#include "spheremix/metrics.hpp"
#include "spheremix/rng.hpp"
#include "spheremix/synth.hpp"

using namespace spheremix;

TEST_CASE("imputation is the identity when nothing is missing") {
    auto inst = testutil::make_random_instance(40, 4, 3, 1, 50);
    ImputedUniverse imp = impute_missing(inst.u, 3);
    CHECK(imp.universe.sources[0].embeddings == inst.u.sources[0].embeddings);
    CHECK(imp.imputed_ids[0].empty());
}

TEST_CASE("imputed rows point roughly toward the held-out embeddings") {
    ScenarioConfig sc;
    sc.n = 200;
    sc.K = 10;
    sc.r = 4;
    sc.L = 2;
    sc.source_dim = 30;
    sc.seed = 51;
    Scenario scn = generate_scenario(sc);
    ImputedUniverse imp = impute_missing(scn.universe, sc.r);

    // source 1 covers [0, n/2); rows above that are imputed; compare them to
    // embeddings regenerated at the true model directions
    const auto& src = imp.universe.sources[1];
    REQUIRE(src.size() == sc.n);
    double mean_cos = 0.0;
    int m = 0;
    for (int id : imp.imputed_ids[1]) {
        Eigen::VectorXd dir = scn.truth.W[1] * scn.truth.V.row(id).transpose();
        dir.normalize();
        mean_cos += src.embeddings.row(id).normalized().dot(dir);
        ++m;
    }
    REQUIRE(m == sc.n / 2);
    mean_cos /= m;
    MESSAGE("imputed-row mean cosine to held-out truth: ", mean_cos);
    CHECK(mean_cos > 0.0);
}

TEST_CASE("imputation requires the reference to cover the universe") {
    auto inst = testutil::make_random_instance(40, 4, 3, 2, 52);
    CHECK_THROWS_AS(impute_missing(inst.u, 3, 1), std::invalid_argument);
}

TEST_CASE("concatenated svd embedding recovers an orthonormal single source") {
    std::mt19937_64 gen(8);
    Eigen::MatrixXd base = testutil::random_unit_rows(30, 3, gen);
    FeatureUniverse u;
    u.n = 30;
    SourceSet s;
    s.source_id = 0;
    for (int i = 0; i < 30; ++i) s.feature_ids.push_back(i);
    s.embeddings = base;
    u.sources.push_back(s);

    Eigen::MatrixXd emb = svd_concat_embed(u, 3);
    CHECK(emb.rows() == 30);
    CHECK(emb.cols() == 3);
    CHECK(rel_acc(emb, base) == doctest::Approx(1.0).epsilon(1e-8));
    for (int i = 0; i < 30; ++i) CHECK(std::abs(emb.row(i).norm() - 1.0) < 1e-12);
}

TEST_CASE("concatenated svd matches a dense svd oracle on a toy scenario") {
    ScenarioConfig sc;
    sc.n = 80;
    sc.K = 6;
    sc.r = 4;
    sc.L = 2;
    sc.source_dim = 16;
    sc.seed = 53;
    Scenario scn = generate_scenario(sc);
    ImputedUniverse imp = impute_missing(scn.universe, sc.r);
    Eigen::MatrixXd concat(sc.n, 32);
    concat << imp.universe.sources[0].embeddings, imp.universe.sources[1].embeddings;

    // principal angles between the rank-r left subspace and a dense oracle
    Eigen::BDCSVD<Eigen::MatrixXd> dense(concat, Eigen::ComputeThinU);
    TruncatedSvd tsvd = truncated_svd(concat, sc.r);
    Eigen::VectorXd cosines =
        Eigen::BDCSVD<Eigen::MatrixXd>(dense.matrixU().leftCols(sc.r).transpose() * tsvd.U)
            .singularValues();
    CHECK(cosines.minCoeff() > 1.0 - 1e-8);

    // the embedding is exactly the row-normalized truncated score matrix
    Eigen::MatrixXd emb = svd_concat_embed(scn.universe, sc.r);
    Eigen::MatrixXd expect = normalize_rows(tsvd.U * tsvd.S.asDiagonal());
    CHECK((emb - expect).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("euclidean kmeans separates two bundles and singles out points at K=n") {
    std::mt19937_64 gen(9);
    std::normal_distribution<double> nd;
    Eigen::MatrixXd pts(20, 2);
    for (int i = 0; i < 20; ++i) {
        pts(i, 0) = (i < 10 ? 10.0 : -10.0) + 0.1 * nd(gen);
        pts(i, 1) = 0.1 * nd(gen);
    }
    auto res = kmeans_euclidean(pts, 2, 7);
    for (int i = 1; i < 10; ++i) CHECK(res.labels[i] == res.labels[0]);
    for (int i = 11; i < 20; ++i) CHECK(res.labels[i] == res.labels[10]);
    CHECK(res.labels[0] != res.labels[10]);

    auto singles = kmeans_euclidean(pts, 20, 8);
    std::set<int> labels(singles.labels.data(), singles.labels.data() + 20);
    CHECK(labels.size() == 20);
    CHECK(singles.objective == doctest::Approx(0.0));
}

TEST_CASE("kmeans objective is near the best of many restarts") {
    std::mt19937_64 gen(10);
    std::normal_distribution<double> nd;
    Eigen::MatrixXd pts(40, 3);
    for (int i = 0; i < 40; ++i)
        for (int j = 0; j < 3; ++j) pts(i, j) = nd(gen) + (i % 4);
    auto res = kmeans_euclidean(pts, 4, 11);
    double best = std::numeric_limits<double>::infinity();
    for (std::uint64_t t = 0; t < 200; ++t)
        best = std::min(best, kmeans_euclidean(pts, 4, substream(123, t), 1).objective);
    CHECK(res.objective <= best * 1.05);
}

TEST_CASE("average-linkage clustering matches a hand-worked four-point case") {
    // two tight pairs on the circle; average cosine linkage must join the
    // pairs first, then keep them apart at K=2
    Eigen::MatrixXd pts(4, 2);
    const double t = 0.05;
    pts << std::cos(t), std::sin(t), std::cos(-t), std::sin(-t),
        -std::cos(t), std::sin(t), -std::cos(-t), std::sin(-t);
    Eigen::VectorXi lab = hclust_average_cosine(pts, 2);
    CHECK(lab[0] == lab[1]);
    CHECK(lab[2] == lab[3]);
    CHECK(lab[0] != lab[2]);
    CHECK(lab[0] == 0);  // labels ordered by smallest member index

    Eigen::VectorXi all = hclust_average_cosine(pts, 4);
    for (int i = 0; i < 4; ++i) CHECK(all[i] == i);
}

TEST_CASE("hierarchical and kmeans agree on well-separated spherical bundles") {
    std::mt19937_64 gen(11);
    Eigen::MatrixXd centers = testutil::random_unit_rows(2, 5, gen);
    centers.row(1) = -centers.row(0);
    Eigen::MatrixXd pts(30, 5);
    Eigen::VectorXi truth(30);
    for (int i = 0; i < 30; ++i) {
        truth[i] = i < 15 ? 0 : 1;
        pts.row(i) = sample_vmf(centers.row(truth[i]).transpose(), 100.0, 1, substream(60, i));
    }
    CHECK(adjusted_mutual_information(hclust_average_cosine(pts, 2), truth) == 1.0);
    CHECK(adjusted_mutual_information(kmeans_euclidean(pts, 2, 5).labels, truth) == 1.0);
}

TEST_CASE("cluster centers average members and keep one point per singleton") {
    Eigen::MatrixXd pts(3, 2);
    pts << 1, 0, 0, 1, -1, 0;
    Eigen::VectorXi labels(3);
    labels << 0, 0, 2;  // cluster 1 left empty
    ClusterCenters cc = cluster_centers(pts, labels, 3);
    REQUIRE(cc.centers.rows() == 2);
    CHECK(cc.cluster_ids == std::vector<int>{0, 2});
    CHECK(cc.centers.row(0).dot(Eigen::RowVector2d(1, 1).normalized()) ==
          doctest::Approx(1.0));
    CHECK(cc.centers.row(1) == pts.row(2));

    // antipodal members cancel: flagged, falls back to the first member
    Eigen::VectorXi pair(3);
    pair << 0, 0, 1;
    Eigen::MatrixXd anti(3, 2);
    anti << 1, 0, -1, 0, 0, 1;
    ClusterCenters deg = cluster_centers(anti, pair, 2);
    CHECK(deg.degenerate_ids == std::vector<int>{0});
    CHECK(deg.centers.row(0) == anti.row(0));
}

TEST_CASE("vmf bundle center lands near the true mean direction") {
    Eigen::VectorXd mu(6);
    mu << 1, 1, 0, 0, 0, 0;
    mu.normalize();
    Eigen::MatrixXd pts = sample_vmf(mu, 200.0, 50, 70);
    Eigen::VectorXi labels = Eigen::VectorXi::Zero(50);
    ClusterCenters cc = cluster_centers(pts, labels, 1);
    const double angle = std::acos(std::min(1.0, cc.centers.row(0).dot(mu.transpose())));
    CHECK(angle < 0.05);
}
