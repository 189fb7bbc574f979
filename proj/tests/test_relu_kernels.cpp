#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ntk/relu_kernels.hpp"
#include "oracle_utils.hpp"

using namespace ntk;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("closed form at hand-derived covariances") {
    SUBCASE("perfectly correlated: u = v") {
        auto e = relu_expectations({1.0, 1.0, 1.0});
        CHECK(e.t == doctest::Approx(0.5).epsilon(1e-15));
        CHECK(e.tdot == doctest::Approx(0.5).epsilon(1e-15));
    }
    SUBCASE("independent standard normals") {
        auto e = relu_expectations({1.0, 0.0, 1.0});
        CHECK(e.t == doctest::Approx(1.0 / (2.0 * kPi)).epsilon(1e-15));
        CHECK(e.tdot == doctest::Approx(0.25).epsilon(1e-15));
    }
    SUBCASE("perfectly anticorrelated: v = -u") {
        auto e = relu_expectations({1.0, -1.0, 1.0});
        CHECK(e.t == doctest::Approx(0.0).scale(1.0).epsilon(1e-15));
        CHECK(e.tdot == doctest::Approx(0.0).scale(1.0).epsilon(1e-15));
    }
    SUBCASE("scale moves t but not tdot") {
        auto e = relu_expectations({4.0, 0.0, 1.0});
        CHECK(e.t == doctest::Approx(1.0 / kPi).epsilon(1e-15));
        CHECK(e.tdot == doctest::Approx(0.25).epsilon(1e-15));
    }
}

TEST_CASE("zero-variance marginals use the independent-limit convention") {
    auto a = relu_expectations({0.0, 0.0, 4.0});
    CHECK(a.t == 0.0);
    CHECK(a.tdot == doctest::Approx(0.25).epsilon(1e-15));
    auto b = relu_expectations({0.0, 0.0, 0.0});
    CHECK(b.t == 0.0);
    CHECK(b.tdot == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("symmetry under swapping the marginals") {
    auto eng = oracle::make_engine(21);
    for (int trial = 0; trial < 20; ++trial) {
        auto c = oracle::random_cov2(eng);
        auto e1 = relu_expectations(c);
        auto e2 = relu_expectations({c.s22, c.s12, c.s11});
        CHECK(e1.t == doctest::Approx(e2.t).epsilon(1e-14));
        CHECK(e1.tdot == doctest::Approx(e2.tdot).epsilon(1e-14));
    }
}

TEST_CASE("positive-scale covariance homogeneity") {
    auto eng = oracle::make_engine(22);
    for (int trial = 0; trial < 20; ++trial) {
        auto c = oracle::random_cov2(eng);
        const double c1 = 0.25 + 3.0 * oracle::unit_uniform(eng);
        const double c2 = 0.25 + 3.0 * oracle::unit_uniform(eng);
        Cov2 scaled{c1 * c1 * c.s11, c1 * c2 * c.s12, c2 * c2 * c.s22};
        auto base = relu_expectations(c);
        auto e = relu_expectations(scaled);
        CHECK(e.t == doctest::Approx(c1 * c2 * base.t).epsilon(1e-12));
        CHECK(e.tdot == doctest::Approx(base.tdot).epsilon(1e-12));
    }
}

TEST_CASE("monotone in the correlation on the unit diagonal") {
    double prev_t = -1.0, prev_tdot = -1.0;
    for (int k = -10; k <= 10; ++k) {
        const double lam = 0.1 * k;
        auto e = relu_expectations({1.0, lam, 1.0});
        CHECK(e.t >= prev_t - 1e-15);
        CHECK(e.tdot >= prev_tdot - 1e-15);
        prev_t = e.t;
        prev_tdot = e.tdot;
    }
}

TEST_CASE("boundary values stay finite and continuous") {
    for (double lam : {1.0, -1.0, 1.0 - 1e-12, -1.0 + 1e-12}) {
        auto e = relu_expectations({1.0, lam, 1.0});
        CHECK(std::isfinite(e.t));
        CHECK(std::isfinite(e.tdot));
    }
    auto top = relu_expectations({1.0, 1.0, 1.0});
    auto near_top = relu_expectations({1.0, 1.0 - 1e-9, 1.0});
    CHECK(top.t == doctest::Approx(near_top.t).epsilon(1e-4));
    CHECK(top.tdot == doctest::Approx(near_top.tdot).epsilon(1e-4));
    // Rounding can push the off-diagonal a hair outside [-1, 1]; the clamp
    // absorbs it instead of feeding arccos out-of-domain input.
    auto clamped = relu_expectations({1.0, 1.0 + 4e-13, 1.0});
    CHECK(clamped.t == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("range invariants on random covariances") {
    auto eng = oracle::make_engine(23);
    for (int trial = 0; trial < 50; ++trial) {
        auto c = oracle::random_cov2(eng, trial % 2 ? 1.0 : 0.01);
        auto e = relu_expectations(c);
        CHECK(e.t >= 0.0);
        CHECK(e.t <= std::sqrt(c.s11 * c.s22) + 1e-12);
        CHECK(e.tdot >= 0.0);
        CHECK(e.tdot <= 1.0);
    }
}

TEST_CASE("monte carlo oracle near known expectations") {
    auto a = mc_relu_expectations({1.0, 1.0, 1.0}, 1000000, 77);
    CHECK(std::fabs(a.t - 0.5) <= 3.0 * a.t_stderr);
    auto b = mc_relu_expectations({1.0, 0.0, 1.0}, 1000000, 78);
    CHECK(std::fabs(b.tdot - 0.25) <= 3.0 * b.tdot_stderr);
}

TEST_CASE("monte carlo oracle is deterministic per seed") {
    auto a = mc_relu_expectations({2.0, 0.3, 1.0}, 10000, 99);
    auto b = mc_relu_expectations({2.0, 0.3, 1.0}, 10000, 99);
    CHECK(a.t == b.t);
    CHECK(a.tdot == b.tdot);
    auto c = mc_relu_expectations({2.0, 0.3, 1.0}, 10000, 100);
    CHECK(a.t != c.t);
}

TEST_CASE("monte carlo agrees with closed form on random covariances") {
    auto eng = oracle::make_engine(24);
    for (int trial = 0; trial < 5; ++trial) {
        auto c = oracle::random_cov2(eng);
        auto exact = relu_expectations(c);
        auto mc = mc_relu_expectations(c, 400000, 1000 + trial);
        CHECK(std::fabs(mc.t - exact.t) <= 4.0 * mc.t_stderr + 1e-12);
        CHECK(std::fabs(mc.tdot - exact.tdot) <= 4.0 * mc.tdot_stderr + 1e-12);
    }
}

TEST_CASE("monte carlo rejects a non-PSD covariance") {
    CHECK_THROWS_AS(mc_relu_expectations({1.0, 2.0, 1.0}, 1000, 1), std::invalid_argument);
}
