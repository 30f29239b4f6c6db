#include <cmath>
#include <set>
#include <vector>

#include "doctest.h"
#include "spheremix/rng.hpp"

using namespace spheremix;

TEST_CASE("substreams are deterministic and distinct") {
    CHECK(substream(42, 7) == substream(42, 7));
    CHECK(substream(42, 7, 3) == substream(substream(42, 7), 3));
    std::set<std::uint64_t> seen;
    for (std::uint64_t i = 0; i < 1000; ++i) seen.insert(substream(42, i));
    for (std::uint64_t s = 0; s < 100; ++s) seen.insert(substream(1000 + s, 0));
    CHECK(seen.size() == 1100);
}

TEST_CASE("identical seeds replay identical draws") {
    Rng a(123), b(123);
    for (int i = 0; i < 200; ++i) {
        CHECK(a.uniform() == b.uniform());
        CHECK(a.normal() == b.normal());
        CHECK(a.gamma(2.7) == b.gamma(2.7));
    }
}

TEST_CASE("uniform_int is unbiased over a small range") {
    Rng g(5);
    std::vector<int> counts(7, 0);
    const int draws = 70000;
    for (int i = 0; i < draws; ++i) {
        auto v = g.uniform_int(3, 9);
        REQUIRE(v >= 3);
        REQUIRE(v <= 9);
        ++counts[v - 3];
    }
    for (int c : counts) CHECK(std::abs(c - draws / 7) < 500);
}

TEST_CASE("normal and gamma match their first two moments") {
    Rng g(99);
    const int m = 200000;
    double s1 = 0, s2 = 0;
    for (int i = 0; i < m; ++i) {
        double x = g.normal();
        s1 += x;
        s2 += x * x;
    }
    CHECK(std::abs(s1 / m) < 0.01);
    CHECK(std::abs(s2 / m - 1.0) < 0.02);

    const double alpha = 3.5;
    s1 = s2 = 0;
    for (int i = 0; i < m; ++i) {
        double x = g.gamma(alpha);
        s1 += x;
        s2 += x * x;
    }
    const double mean = s1 / m, var = s2 / m - mean * mean;
    CHECK(std::abs(mean - alpha) < 0.03);
    CHECK(std::abs(var - alpha) < 0.1);

    // alpha < 1 boost path
    s1 = 0;
    for (int i = 0; i < m; ++i) s1 += g.gamma(0.4);
    CHECK(std::abs(s1 / m - 0.4) < 0.02);
}

TEST_CASE("beta draws stay in (0,1) with the right mean") {
    Rng g(7);
    const int m = 100000;
    double s1 = 0;
    for (int i = 0; i < m; ++i) {
        double x = g.beta(2.0, 5.0);
        REQUIRE(x > 0.0);
        REQUIRE(x < 1.0);
        s1 += x;
    }
    CHECK(std::abs(s1 / m - 2.0 / 7.0) < 0.01);
}
