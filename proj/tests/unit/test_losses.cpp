#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"
#include "fd_checks.hpp"
#include "instances.hpp"
#include "naive_losses.hpp"
#include "spheremix/linalg.hpp"
#include "spheremix/losses.hpp"

using namespace spheremix;

namespace {
double logistic(double t) { return 1.0 / (1.0 + std::exp(-t)); }
}  // namespace

TEST_CASE("factor loss matches the naive loop") {
    auto inst = testutil::make_random_instance(25, 4, 3, 3, 10);
    CHECK(std::abs(loss_lr(inst.u, inst.s.V, inst.s.W) -
                   oracle::naive_loss_lr(inst.u, inst.s.V, inst.s.W)) < 1e-12);
}

TEST_CASE("vmf loss matches the naive loop on dense and sparse priors") {
    auto dense = testutil::make_random_instance(30, 5, 4, 2, 11, 0);
    CHECK(std::abs(loss_vmf(dense.s.V, dense.s.mu, dense.s.kappa, dense.priors) -
                   oracle::naive_loss_vmf(dense.s.V, dense.s.mu, dense.s.kappa,
                                          dense.dense_priors)) < 1e-10);
    auto sparse = testutil::make_random_instance(30, 5, 4, 2, 12, 2);
    CHECK(std::abs(loss_vmf(sparse.s.V, sparse.s.mu, sparse.s.kappa, sparse.priors) -
                   oracle::naive_loss_vmf(sparse.s.V, sparse.s.mu, sparse.s.kappa,
                                          sparse.dense_priors)) < 1e-10);
}

TEST_CASE("similarity loss on a hard-prior positive pair is a plain logistic term") {
    // both features pinned to the same cluster: P = sigma(b1 + b2 * 1)
    Eigen::MatrixXd mu(2, 3);
    mu << 1, 0, 0, 0, 1, 0;
    PriorMatrix priors(2, 2, {0, 1}, {0, 0}, {1.0, 1.0});
    std::vector<LabeledPair> pairs = {{0, 1, 1}};
    const double expect = -std::log(logistic(-0.125 + 5.0));
    CHECK(loss_sim(mu, -0.125, 5.0, priors, pairs) == doctest::Approx(expect).epsilon(1e-9));
    CHECK(expect == doctest::Approx(0.00760).epsilon(1e-2));
}

TEST_CASE("similarity loss matches the naive quadruple loop on a soft toy") {
    auto inst = testutil::make_random_instance(12, 3, 3, 2, 13, 0);
    CHECK(std::abs(loss_sim(inst.s.mu, inst.s.beta1, inst.s.beta2, inst.priors, inst.pairs.sim) -
                   oracle::naive_loss_sim(inst.s.mu, inst.s.beta1, inst.s.beta2,
                                          inst.dense_priors, inst.pairs.sim)) < 1e-10);
}

TEST_CASE("relatedness loss closed forms and naive loop") {
    Eigen::MatrixXd V(2, 3);
    V << 1, 0, 0, 1, 0, 0;
    Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(3, 3);
    CHECK(loss_rel(V, 0.0, zero, {{0, 1, 1}}) == doctest::Approx(std::log(2.0)).epsilon(1e-12));

    Eigen::MatrixXd five = 5.0 * Eigen::MatrixXd::Identity(3, 3);
    const double expect = -std::log(1.0 - logistic(-0.125 + 5.0));
    CHECK(loss_rel(V, -0.125, five, {{0, 1, 0}}) == doctest::Approx(expect).epsilon(1e-9));
    CHECK(expect == doctest::Approx(4.8826).epsilon(1e-3));

    auto inst = testutil::make_random_instance(20, 4, 4, 2, 14);
    CHECK(std::abs(loss_rel(inst.s.V, inst.s.beta3, inst.s.R, inst.pairs.rel) -
                   oracle::naive_loss_rel(inst.s.V, inst.s.beta3, inst.s.R, inst.pairs.rel)) <
          1e-12);
}

TEST_CASE("losses reject empty pair sets") {
    auto inst = testutil::make_random_instance(10, 3, 3, 1, 15);
    CHECK_THROWS_AS(loss_sim(inst.s.mu, 0.0, 1.0, inst.priors, {}), std::invalid_argument);
    CHECK_THROWS_AS(loss_rel(inst.s.V, 0.0, inst.s.R, {}), std::invalid_argument);
}

TEST_CASE("extreme logits keep the loss finite via probability clamping") {
    Eigen::MatrixXd V(2, 2);
    V << 1, 0, 1, 0;
    Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(2, 2);
    const double big = loss_rel(V, 1000.0, eye, {{0, 1, 0}});
    CHECK(std::isfinite(big));
    CHECK(big == doctest::Approx(-std::log(1e-12)));
}

TEST_CASE("gradient contributions accumulate and honor gscale") {
    auto inst = testutil::make_random_instance(15, 3, 3, 2, 16);
    Eigen::MatrixXd g1 = Eigen::MatrixXd::Zero(15, 3), g2 = g1;
    LossGrads a, b;
    a.V = &g1;
    b.V = &g2;
    loss_rel(inst.s.V, inst.s.beta3, inst.s.R, inst.pairs.rel, a, 1.0);
    loss_rel(inst.s.V, inst.s.beta3, inst.s.R, inst.pairs.rel, b, 2.5);
    loss_rel(inst.s.V, inst.s.beta3, inst.s.R, inst.pairs.rel, b, -1.5);
    CHECK((g2 - g1).norm() < 1e-14 * std::max(1.0, g1.norm()));
}

TEST_CASE("every gradient block survives a finite-difference probe") {
    for (std::uint64_t seed : {21, 22}) {
        auto inst = testutil::make_random_instance(20, 4, 3, 2, seed, 3);
        CHECK(testutil::fd_worst_gap(inst, seed * 17) < 1e-4);
    }
}

TEST_CASE("composite loss is invariant to rotation and cluster relabeling") {
    auto inst = testutil::make_random_instance(24, 5, 4, 2, 30, 0);
    CompositeWeights w{1.0, 1.0, 1.0};
    const double base = loss_composite(inst.u, inst.s, inst.priors, inst.pairs, w);

    Eigen::MatrixXd O = random_orthogonal(4, 123);
    std::vector<int> perm = {3, 0, 4, 1, 2};
    auto moved = testutil::transform_instance(inst, O, perm);
    const double after = loss_composite(moved.u, moved.s, moved.priors, moved.pairs, w);
    CHECK(std::abs(after - base) < 1e-10);
}

TEST_CASE("composite weights scale their terms and skip zero-weight blocks") {
    auto inst = testutil::make_random_instance(18, 3, 3, 2, 31);
    CompositeWeights w0{0.0, 0.0, 0.0};
    CHECK(loss_composite(inst.u, inst.s, inst.priors, inst.pairs, w0) ==
          doctest::Approx(loss_lr(inst.u, inst.s.V, inst.s.W)));
    CompositeWeights w{2.0, 0.5, 3.0};
    const double expect =
        loss_lr(inst.u, inst.s.V, inst.s.W) +
        2.0 * loss_vmf(inst.s.V, inst.s.mu, inst.s.kappa, inst.priors) +
        0.5 * loss_sim(inst.s.mu, inst.s.beta1, inst.s.beta2, inst.priors, inst.pairs.sim) +
        3.0 * loss_rel(inst.s.V, inst.s.beta3, inst.s.R, inst.pairs.rel);
    CHECK(loss_composite(inst.u, inst.s, inst.priors, inst.pairs, w) ==
          doctest::Approx(expect).epsilon(1e-12));
}
