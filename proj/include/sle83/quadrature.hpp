// Area-moment integrals of the radius-1 bubble: 2-D first moment (pi/10)
// and the 4-D second moment, the latter by two independent methods.
#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "sle83/formulas.hpp"
#include "sle83/sim.hpp"

namespace sle83 {

struct IntegralResult {
    double value = 0.0;
    double error_estimate = 0.0;
    std::uint64_t n_evaluations = 0;
    std::string method;  // "deterministic" or "stratified-mc"
    std::string region = "half_disk";
};

namespace detail {

// Gauss-Legendre nodes/weights on [0,1] by Newton iteration on P_n.
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

inline GaussRule gauss_legendre_01(int n) {
    GaussRule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        // Chebyshev initial guess on [-1,1]
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        r.nodes[i] = 0.5 * (1.0 - x);  // map to [0,1], ascending
        r.weights[i] = 1.0 / ((1.0 - x * x) * dp * dp);
    }
    return r;
}

// Tensor rule over the upper half-disk in polar coordinates with the area
// jacobian folded in. The grading exponent packs nodes toward r = 1 and
// theta in {0, pi}, where the integrands vary fastest.
inline double half_disk_tensor(const std::function<double(Complex)>& f, int n,
                               std::uint64_t* n_eval) {
    const GaussRule g = gauss_legendre_01(n);
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        // r = 1 - s^2 grades toward the unit circle
        const double s = g.nodes[i];
        const double r = 1.0 - s * s;
        const double jac_r = 2.0 * s;
        for (int j = 0; j < n; ++j) {
            const double theta = M_PI * g.nodes[j];
            const Complex z = r * Complex(std::cos(theta), std::sin(theta));
            if (z.imag() <= 0.0 || r <= 0.0) continue;
            total += g.weights[i] * g.weights[j] * M_PI * jac_r * r * f(z);
            if (n_eval) ++(*n_eval);
        }
    }
    return total;
}

}  // namespace detail

/// E[A] = integral of the one-point radius-1 density over the upper
/// half-disk. Deterministic polar tensor rule; the error estimate is the
/// difference between successive rule orders.
inline IntegralResult integrate_first_moment(double tol = 1e-6) {
    if (!(tol > 0.0)) throw std::domain_error("integrate_first_moment: tol > 0");
    IntegralResult res;
    res.method = "deterministic";
    const auto f = [](Complex z) { return touch_radius_one_point(HalfPlanePoint(z)); };
    double prev = detail::half_disk_tensor(f, 8, &res.n_evaluations);
    for (int n = 16; n <= 256; n *= 2) {
        const double cur = detail::half_disk_tensor(f, n, &res.n_evaluations);
        res.value = cur;
        res.error_estimate = std::abs(cur - prev);
        if (res.error_estimate <= tol) return res;
        prev = cur;
    }
    throw std::runtime_error("integrate_first_moment: refinements did not converge to tol");
}

namespace detail {

// Two-point density with the diagonal cap: within 1e-12 of the diagonal the
// formula loses all significance, and the limit value is the one-point
// density at the midpoint.
inline double area_integrand_capped(Complex z, Complex w) {
    if (std::abs(z - w) < 1e-12) {
        const Complex m = 0.5 * (z + w);
        return touch_radius_one_point(HalfPlanePoint(m));
    }
    return area_integrand(HalfPlanePoint(z), HalfPlanePoint(w));
}

struct HalfDiskSampler {
    // uniform on the upper half-disk; area pi/2
    template <typename Rng>
    static Complex draw(Rng& rng) {
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        const double r = std::sqrt(unif(rng));
        const double theta = M_PI * unif(rng);
        return r * Complex(std::cos(theta), std::sin(theta));
    }
};

}  // namespace detail

/// Second moment, stratified/importance MC. Pairs are drawn from a mixture:
/// with weight (1-alpha) both points uniform on the half-disk, with weight
/// alpha the second point is an isotropic jitter of the first with density
/// concentrated at small separations (extra resolution near the diagonal,
/// where the integrand varies fastest). The uniform component is stratified
/// over equal sample blocks. Setting alpha = 0 gives the plain uniform
/// estimator used for the unbiasedness cross-check.
inline IntegralResult integrate_second_moment_mc(std::uint64_t budget, std::uint64_t seed,
                                                 double alpha = 0.3) {
    if (!(alpha >= 0.0 && alpha < 1.0))
        throw std::domain_error("integrate_second_moment_mc: alpha in [0,1)");
    if (budget == 0) throw std::domain_error("integrate_second_moment_mc: empty budget");
    const double area = M_PI / 2.0;
    const double rho_max = 0.5;
    // jitter radius rho = rho_max U^2, planar density p(rho)/(2 pi rho)
    const auto jitter_plane_density = [&](double rho) {
        return 1.0 / (4.0 * M_PI * rho * std::sqrt(rho * rho_max));
    };

    std::mt19937_64 rng(detail::splitmix64(seed ^ 0x9e3779b97f4a7c15ULL));
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    double sum = 0.0, sum2 = 0.0;
    for (std::uint64_t i = 0; i < budget; ++i) {
        // z: stratified in r^2 (systematic over the budget), uniform in theta
        const double r = std::sqrt((static_cast<double>(i) + unif(rng)) /
                                   static_cast<double>(budget));
        const double theta = M_PI * unif(rng);
        const Complex z = r * Complex(std::cos(theta), std::sin(theta));

        Complex w;
        if (unif(rng) < alpha) {
            const double u = unif(rng);
            const double rho = rho_max * u * u;
            const double phi = 2.0 * M_PI * unif(rng);
            w = z + rho * Complex(std::cos(phi), std::sin(phi));
        } else {
            w = detail::HalfDiskSampler::draw(rng);
        }

        double weighted = 0.0;
        const double rho_zw = std::abs(w - z);
        if (w.imag() > 0.0 && std::abs(w) < 1.0 && z.imag() > 0.0 && std::abs(z) > 0.0 &&
            std::abs(w) > 0.0) {
            // mixture density of w given z, per unit area
            double qw = (1.0 - alpha) / area;
            if (rho_zw > 0.0 && rho_zw <= rho_max) qw += alpha * jitter_plane_density(rho_zw);
            weighted = detail::area_integrand_capped(z, w) * area / qw;  // q(z) = 1/area
        }
        sum += weighted;
        sum2 += weighted * weighted;
    }
    IntegralResult res;
    res.method = "stratified-mc";
    res.n_evaluations = budget;
    const double dn = static_cast<double>(budget);
    res.value = sum / dn;
    const double var = std::max(0.0, sum2 / dn - res.value * res.value);
    res.error_estimate = 3.0 * std::sqrt(var / dn);
    return res;
}

/// Second moment, deterministic 4-D polar tensor rule with diagonal
/// excision: nodes closer than delta_diag to the diagonal use the analytic
/// diagonal limit (the one-point density), which is exact up to O(delta^2/3)
/// over a region of measure O(delta^2). Error estimate from comparing two
/// rule orders.
inline IntegralResult integrate_second_moment_det(int n_coarse = 20, int n_fine = 28,
                                                  double delta_diag = 1e-4) {
    IntegralResult res;
    res.method = "deterministic";
    const auto value_at = [&](int n, std::uint64_t* evals) {
        return detail::half_disk_tensor(
            [&](Complex z) {
                std::uint64_t inner_evals = 0;
                const double inner = detail::half_disk_tensor(
                    [&](Complex w) {
                        if (std::abs(z - w) < delta_diag)
                            return touch_radius_one_point(HalfPlanePoint(0.5 * (z + w)));
                        return area_integrand(HalfPlanePoint(z), HalfPlanePoint(w));
                    },
                    n, &inner_evals);
                if (evals) *evals += inner_evals;
                return inner;
            },
            n, nullptr);
    };
    const double coarse = value_at(n_coarse, &res.n_evaluations);
    const double fine = value_at(n_fine, &res.n_evaluations);
    res.value = fine;
    res.error_estimate = std::abs(fine - coarse);
    return res;
}

/// Both methods plus their discrepancy. `methods_agree` is false when the
/// two results differ by more than the combined error estimates.
struct SecondMomentReport {
    IntegralResult mc;
    IntegralResult deterministic;
    double discrepancy = 0.0;
    bool methods_agree = false;

    /// headline value: the deterministic one when the methods agree
    double value() const { return methods_agree ? deterministic.value : mc.value; }
};

inline SecondMomentReport integrate_second_moment(std::uint64_t budget, std::uint64_t seed) {
    if (budget < 1000000)
        throw std::domain_error("integrate_second_moment: MC budget must be >= 10^6");
    SecondMomentReport rep;
    rep.mc = integrate_second_moment_mc(budget, seed);
    rep.deterministic = integrate_second_moment_det();
    rep.discrepancy = std::abs(rep.mc.value - rep.deterministic.value);
    rep.methods_agree =
        rep.discrepancy <= rep.mc.error_estimate + std::max(rep.deterministic.error_estimate,
                                                            0.005 * rep.deterministic.value);
    return rep;
}

/// Probes the two-point density for NaN, negativity, and out-of-range values
/// on random and adversarial (near-diagonal, near-boundary) configurations.
struct IntegrandDiagnostics {
    std::uint64_t n_probed = 0;
    std::uint64_t n_nan = 0;
    std::uint64_t n_negative = 0;  // below -1e-9
    std::uint64_t n_above_one = 0;
    double max_value = 0.0;
    double near_diagonal_max = 0.0;
    // |f(z, z + 10^-k) - f1(z)| for k = 2..8, probing the diagonal limit
    std::vector<double> diagonal_gap;
};

inline IntegrandDiagnostics integrand_diagnostics(std::uint64_t n_probe, std::uint64_t seed) {
    IntegrandDiagnostics d;
    std::mt19937_64 rng(detail::splitmix64(seed + 17));
    const auto record = [&](double v) {
        ++d.n_probed;
        if (std::isnan(v)) {
            ++d.n_nan;
            return;
        }
        if (v < -1e-9) ++d.n_negative;
        if (v > 1.0) ++d.n_above_one;
        d.max_value = std::max(d.max_value, v);
    };
    for (std::uint64_t i = 0; i < n_probe; ++i) {
        const Complex z = detail::HalfDiskSampler::draw(rng);
        const Complex w = detail::HalfDiskSampler::draw(rng);
        if (z.imag() <= 0.0 || w.imag() <= 0.0 || std::abs(z) == 0.0 || std::abs(w) == 0.0)
            continue;
        record(detail::area_integrand_capped(z, w));
    }
    // near-diagonal scan
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int k = 2; k <= 8; ++k) {
        const double dist = std::pow(10.0, -k);
        double gap = 0.0;
        for (int rep = 0; rep < 64; ++rep) {
            Complex z = detail::HalfDiskSampler::draw(rng);
            if (z.imag() < 2.0 * dist || std::abs(z) + dist >= 1.0 || std::abs(z) < 0.05)
                continue;
            const double phi = 2.0 * M_PI * unif(rng);
            const Complex w = z + dist * Complex(std::cos(phi), std::sin(phi));
            const double v = detail::area_integrand_capped(z, w);
            record(v);
            d.near_diagonal_max = std::max(d.near_diagonal_max, v);
            gap = std::max(gap, std::abs(v - touch_radius_one_point(HalfPlanePoint(z))));
        }
        d.diagonal_gap.push_back(gap);
    }
    return d;
}

}  // namespace sle83
