#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "sle83/quadrature.hpp"

using namespace sle83;

TEST_CASE("gauss_legendre_01 integrates polynomials exactly") {
    const auto g = detail::gauss_legendre_01(12);
    double w_sum = 0.0, x3 = 0.0, x7 = 0.0;
    for (int i = 0; i < 12; ++i) {
        w_sum += g.weights[i];
        x3 += g.weights[i] * std::pow(g.nodes[i], 3);
        x7 += g.weights[i] * std::pow(g.nodes[i], 7);
    }
    CHECK(w_sum == Catch::Approx(1.0).margin(1e-14));
    CHECK(x3 == Catch::Approx(0.25).margin(1e-14));
    CHECK(x7 == Catch::Approx(0.125).margin(1e-14));
}

TEST_CASE("half_disk_tensor integrates known areas") {
    std::uint64_t evals = 0;
    const double area = detail::half_disk_tensor([](Complex) { return 1.0; }, 40, &evals);
    CHECK(area == Catch::Approx(M_PI / 2.0).margin(1e-10));
    CHECK(evals > 0);
    // int y dA over the upper half disk = 2/3
    const double ymom = detail::half_disk_tensor([](Complex z) { return z.imag(); }, 40, nullptr);
    CHECK(ymom == Catch::Approx(2.0 / 3.0).margin(1e-10));
}

TEST_CASE("first moment equals pi/10") {
    const auto r = integrate_first_moment(1e-6);
    CHECK(r.method == "deterministic");
    CHECK(std::abs(r.value - M_PI / 10.0) < 1e-3);
    CHECK(r.error_estimate <= 1e-6);
    CHECK_THROWS_AS(integrate_first_moment(-1.0), std::domain_error);
}

TEST_CASE("integrand diagnostics are clean") {
    const auto d = integrand_diagnostics(20000, 7);
    CHECK(d.n_probed > 20000 / 2);
    CHECK(d.n_nan == 0);
    CHECK(d.n_negative == 0);
    CHECK(d.n_above_one == 0);
    CHECK(d.max_value < 1.0);
    CHECK(d.near_diagonal_max < 1.0);
    REQUIRE(d.diagonal_gap.size() == 7);
    // the w -> z gap shrinks with the approach distance
    CHECK(d.diagonal_gap.back() < d.diagonal_gap.front() + 1e-6);
}

TEST_CASE("second moment MC behaves") {
    const auto imp = integrate_second_moment_mc(60000, 2, 0.3);
    CHECK(imp.method == "stratified-mc");
    CHECK(imp.n_evaluations == 60000);
    const auto uni = integrate_second_moment_mc(60000, 3, 0.0);
    // unbiasedness: importance and plain uniform agree within combined 3 SE
    CHECK(std::abs(imp.value - uni.value) <= imp.error_estimate + uni.error_estimate);
    // Jensen and boundedness against the known first moment
    const double ea = M_PI / 10.0;
    CHECK(imp.value >= ea * ea - imp.error_estimate);
    CHECK(imp.value <= ea * (M_PI / 2.0) + imp.error_estimate);
    CHECK_THROWS_AS(integrate_second_moment_mc(0, 1), std::domain_error);
    CHECK_THROWS_AS(integrate_second_moment_mc(100, 1, 1.5), std::domain_error);
}

TEST_CASE("second moment deterministic rule is stable") {
    const auto coarse = integrate_second_moment_det(10, 14);
    const auto finer = integrate_second_moment_det(14, 18);
    CHECK(std::abs(coarse.value - finer.value) < 0.02 * finer.value);
    // near pi/30, loosely at these orders
    CHECK(std::abs(finer.value - M_PI / 30.0) < 0.10 * (M_PI / 30.0));
}

TEST_CASE("subregion contribution is a monotone lower bound") {
    // both points confined to |.| < 0.1 must contribute less than the total
    std::uint64_t evals = 0;
    const double inner = detail::half_disk_tensor(
        [&](Complex z) {
            return detail::half_disk_tensor(
                [&](Complex w) {
                    if (std::abs(z) >= 0.1 || std::abs(w) >= 0.1) return 0.0;
                    return detail::area_integrand_capped(z, w);
                },
                12, nullptr);
        },
        12, &evals);
    const auto full = integrate_second_moment_det(10, 12);
    CHECK(inner >= 0.0);
    CHECK(inner < full.value);
}
