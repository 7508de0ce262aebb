#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "oracle.hpp"
#include "sle83/special.hpp"

using namespace sle83;

TEST_CASE("gamma_fn known values") {
    CHECK(gamma_fn(1.0) == Catch::Approx(1.0).epsilon(1e-12));
    CHECK(gamma_fn(0.5) == Catch::Approx(std::sqrt(M_PI)).epsilon(1e-12));
    CHECK(gamma_fn(5.0) == Catch::Approx(24.0).epsilon(1e-12));
    CHECK(gamma_fn(1.0 / 3.0) == Catch::Approx(oracle::kGamma_third).epsilon(1e-12));
    CHECK(gamma_fn(4.7) == Catch::Approx(oracle::kGamma_4_7).epsilon(1e-12));
    CHECK(gamma_fn(12.3) == Catch::Approx(oracle::kGamma_12_3).epsilon(1e-12));
    CHECK(gamma_fn(0.001) == Catch::Approx(oracle::kGamma_0_001).epsilon(1e-12));
    CHECK_THROWS_AS(gamma_fn(0.0), std::domain_error);
    CHECK_THROWS_AS(gamma_fn(-1.5), std::domain_error);
}

TEST_CASE("green_constant frozen value") {
    CHECK(green_constant() == Catch::Approx(oracle::kC0).epsilon(1e-13));
}

TEST_CASE("hyp2f1 matches the extended-precision oracle") {
    for (const auto& c : oracle::hyp2f1_cases()) {
        const double got = hyp2f1(static_cast<double>(c.a), static_cast<double>(c.b),
                                  static_cast<double>(c.c), static_cast<double>(c.x));
        INFO("a=" << (double)c.a << " b=" << (double)c.b << " c=" << (double)c.c
                  << " x=" << (double)c.x);
        CHECK(std::abs(got - c.value) <= 1e-12 * std::max(1.0, std::abs(c.value)));
    }
}

TEST_CASE("hyp2f1 agrees with the live long double oracle off the frozen grid") {
    const double cases[][4] = {{0.7, 1.9, 2.3, 0.4},  {1.0, 4.0 / 3.0, 5.0 / 3.0, 0.83},
                               {0.3, 0.6, 1.1, -0.3}, {2.0, 0.5, 3.7, 0.95},
                               {1.2, 0.4, 2.9, 0.65}};
    for (const auto& c : cases) {
        const double got = hyp2f1(c[0], c[1], c[2], c[3]);
        const double ref = static_cast<double>(oracle::hyp2f1_ld(c[0], c[1], c[2], c[3]));
        INFO("a=" << c[0] << " b=" << c[1] << " c=" << c[2] << " x=" << c[3]);
        CHECK(std::abs(got - ref) <= 1e-11 * std::max(1.0, std::abs(ref)));
    }
}

TEST_CASE("hyp2f1 endpoint and domain handling") {
    CHECK(hyp2f1(1.0, 4.0 / 3.0, 5.0 / 3.0, 0.0) == 1.0);
    // Gauss summation at x = 1 needs c - a - b > 0
    const double gauss = hyp2f1(1.0 / 3.0, 2.0 / 3.0, 5.0 / 3.0, 1.0);
    const double expect = gamma_fn(5.0 / 3.0) * gamma_fn(2.0 / 3.0) /
                          (gamma_fn(4.0 / 3.0) * gamma_fn(1.0));
    CHECK(gauss == Catch::Approx(expect).epsilon(1e-12));
    CHECK_THROWS_AS(hyp2f1(1.0, 4.0 / 3.0, 5.0 / 3.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(hyp2f1(1.0, 1.0, 2.0, 1.2), std::domain_error);
    CHECK_THROWS_AS(hyp2f1(1.0, 1.0, 2.0, -0.7), std::domain_error);
    CHECK_THROWS_AS(hyp2f1(1.0, 1.0, -2.0, 0.3), std::domain_error);
    CHECK_THROWS_AS(hyp2f1(1.0, 1.0, 2.0, 0.3, -1e-9), std::domain_error);
}

TEST_CASE("G endpoints and frozen interior values") {
    CHECK(hypergeometric_G(0.0) == 1.0);
    CHECK(hypergeometric_G(1.0) == 0.0);
    CHECK(hypergeometric_G(0.5) == Catch::Approx(oracle::kG_half).epsilon(1e-12));
    CHECK(hypergeometric_G(1.0 / 9.0) == Catch::Approx(oracle::kG_ninth).epsilon(1e-12));
    CHECK_THROWS_AS(hypergeometric_G(-0.01), std::domain_error);
    CHECK_THROWS_AS(hypergeometric_G(1.01), std::domain_error);
}

TEST_CASE("G tracks the long double oracle across (0,1)") {
    for (int i = 1; i < 100; ++i) {
        const double s = i / 100.0;
        const double ref = static_cast<double>(oracle::G_ld(s));
        CHECK(std::abs(hypergeometric_G(s) - ref) < 1e-12);
    }
}

TEST_CASE("G is stable near sigma = 0") {
    // 2F1(1,4/3;5/3;1-sigma) ~ const sigma^{-2/3}; the connection formula
    // keeps 1 - sigma*2F1 fully significant down to tiny sigma
    for (double s : {1e-3, 1e-6, 1e-9}) {
        const double ref = static_cast<double>(oracle::G_ld(static_cast<long double>(s)));
        CHECK(std::abs(hypergeometric_G(s) - ref) < 1e-12);
    }
}

TEST_CASE("g_ode_residual vanishes at finite difference accuracy") {
    CHECK(std::abs(g_ode_residual(0.5, 1e-5)) < 1e-8);
    CHECK(std::abs(g_ode_residual(0.01, 1e-6)) < 1e-6);
    CHECK(std::abs(g_ode_residual(0.99, 1e-6)) < 1e-6);
    CHECK_THROWS_AS(g_ode_residual(0.0, 1e-5), std::domain_error);
    CHECK_THROWS_AS(g_ode_residual(0.5, 0.6), std::domain_error);
}

TEST_CASE("g_ode_residual is O(h^2)") {
    const double r1 = std::abs(g_ode_residual(0.37, 1e-3));
    const double r2 = std::abs(g_ode_residual(0.37, 5e-4));
    CHECK(r1 / r2 > 3.0);
    CHECK(r1 / r2 < 5.0);
}

TEST_CASE("Kummer connection identity") {
    const double k = gamma_fn(2.0 / 3.0) * gamma_fn(5.0 / 3.0) / gamma_fn(4.0 / 3.0);
    for (double t : {0.1, 0.3, 0.5, 0.7, 0.9}) {
        const double lhs = hyp2f1(1.0 / 3.0, 2.0 / 3.0, 5.0 / 3.0, t);
        const double rhs =
            -std::pow(1.0 - t, 2.0 / 3.0) * hyp2f1(4.0 / 3.0, 1.0, 5.0 / 3.0, 1.0 - t) +
            k * std::pow(t, -2.0 / 3.0);
        CHECK(std::abs(lhs - rhs) < 1e-9);
    }
}
