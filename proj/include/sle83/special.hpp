// Gauss hypergeometric evaluation and the hypergeometric correlation
// factor G used by all closed-form passage probabilities.
#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace sle83 {

namespace detail {

// Gamma on the full real line minus the poles, in extended precision. Used
// by the x -> 1-x connection formula, whose prefactors need negative
// non-integer arguments and whose partial cancellation would otherwise eat
// several digits.
inline long double gamma_any(long double x) {
    if (x <= 0.0L && x == std::floor(x))
        throw std::domain_error("gamma: pole at non-positive integer " +
                                std::to_string(static_cast<double>(x)));
    return std::tgamma(x);
}

inline bool is_nonpositive_integer(double x) {
    return x <= 0.0 && x == std::floor(x);
}

}  // namespace detail

/// Gamma function for strictly positive arguments.
inline double gamma_fn(double x) {
    if (!(x > 0.0)) throw std::domain_error("gamma_fn: requires x > 0");
    return std::tgamma(x);
}

struct Hyp2F1Query {
    double a;
    double b;
    double c;
    double x;
};

namespace detail {

// Direct power series, sum_n (a)_n (b)_n / (c)_n x^n / n!. Converges
// usefully for |x| <= 1/2, which is the only regime we call it in.
// Extended precision so the final double value carries full significance
// even after the connection-formula cancellation.
inline long double hyp2f1_series(long double a, long double b, long double c, long double x,
                                 long double tol, int max_terms = 10000) {
    long double term = 1.0L;
    long double sum = 1.0L;
    for (int n = 0; n < max_terms; ++n) {
        const long double dn = static_cast<long double>(n);
        term *= (a + dn) * (b + dn) / ((c + dn) * (dn + 1.0L)) * x;
        sum += term;
        if (std::abs(term) <= tol * std::max(1.0L, std::abs(sum))) return sum;
    }
    throw std::runtime_error("hyp2f1: series did not converge within term cap");
}

}  // namespace detail

/// 2F1(a,b;c;x) for x in [-1/2, 1]. Direct series for |x| <= 1/2; for
/// x in (1/2, 1) the x -> 1-x connection formula (requires c-a-b not an
/// integer, which holds for every parameter triple in this project).
inline double hyp2f1(double a, double b, double c, double x, double tol = 1e-12) {
    if (detail::is_nonpositive_integer(c))
        throw std::domain_error("hyp2f1: c is zero or a negative integer");
    if (!(tol > 0.0)) throw std::domain_error("hyp2f1: tol must be positive");
    if (x > 1.0 || x < -0.5)
        throw std::domain_error("hyp2f1: argument outside supported range [-1/2, 1]");

    const long double la = a, lb = b, lc = c;
    const long double s = lc - la - lb;
    const long double eff_tol = std::min(static_cast<long double>(tol), 1e-17L);
    if (x == 1.0) {
        if (s <= 0.0L)
            throw std::domain_error("hyp2f1: divergent at x = 1 since c-a-b <= 0");
        // Gauss summation
        return static_cast<double>(detail::gamma_any(lc) * detail::gamma_any(s) /
                                   (detail::gamma_any(lc - la) * detail::gamma_any(lc - lb)));
    }
    if (std::abs(x) <= 0.5)
        return static_cast<double>(detail::hyp2f1_series(la, lb, lc, x, eff_tol));

    if (s == std::floor(s))
        throw std::runtime_error("hyp2f1: connection formula needs non-integer c-a-b");
    const long double y = 1.0L - static_cast<long double>(x);
    const long double gc = detail::gamma_any(lc);
    const long double k1 = gc * detail::gamma_any(s) /
                           (detail::gamma_any(lc - la) * detail::gamma_any(lc - lb));
    const long double k2 = gc * detail::gamma_any(-s) /
                           (detail::gamma_any(la) * detail::gamma_any(lb));
    return static_cast<double>(
        k1 * detail::hyp2f1_series(la, lb, la + lb - lc + 1.0L, y, eff_tol) +
        k2 * std::pow(y, s) * detail::hyp2f1_series(lc - la, lc - lb, s + 1.0L, y, eff_tol));
}

inline double hyp2f1(const Hyp2F1Query& q, double tol = 1e-12) {
    return hyp2f1(q.a, q.b, q.c, q.x, tol);
}

/// Correlation factor G(sigma) = 1 - sigma * 2F1(1, 4/3; 5/3; 1-sigma).
/// Endpoints are exact: G(0) = 1, G(1) = 0 (the hypergeometric factor
/// diverges like sigma^{-2/3} as sigma -> 0 but sigma * 2F1 -> 0, so the
/// limits are finite; for sigma < 1/2 the connection formula inside
/// hyp2f1 evaluates that combination without cancellation).
inline double hypergeometric_G(double sigma) {
    if (!(sigma >= 0.0 && sigma <= 1.0))
        throw std::domain_error("G: sigma must lie in [0, 1]");
    if (sigma == 0.0) return 1.0;
    if (sigma == 1.0) return 0.0;
    if (sigma <= 0.5) {
        // Expand around sigma = 0 directly instead of evaluating 2F1 at
        // 1 - sigma, which loses the low bits of small sigma. Applying the
        // x -> 1-x connection formula to 2F1(1, 4/3; 5/3; 1 - sigma) gives
        //   G(s) = 1 + s * F(1, 4/3; 5/3; s) - 2 c0 s^{1/3} F(2/3, 1/3; 1/3; s)
        // with both series evaluated at s itself.
        const long double s = static_cast<long double>(sigma);
        const long double f1 = detail::hyp2f1_series(1.0L, 4.0L / 3.0L, 5.0L / 3.0L, s, 1e-18L);
        const long double f2 = detail::hyp2f1_series(2.0L / 3.0L, 1.0L / 3.0L, 1.0L / 3.0L, s, 1e-18L);
        const long double c0 = detail::gamma_any(2.0L / 3.0L) * detail::gamma_any(5.0L / 3.0L) /
                               (2.0L * detail::gamma_any(4.0L / 3.0L));
        const long double g = 1.0L + s * f1 - 2.0L * c0 * std::cbrt(s) * f2;
        return static_cast<double>(g);
    }
    return 1.0 - sigma * hyp2f1(1.0, 4.0 / 3.0, 5.0 / 3.0, 1.0 - sigma);
}

/// Residual of the ODE satisfied by G on (0,1):
///   t - 1 + (t+1) G(t) - 3 t (1-t) G'(t),
/// with G' approximated by a central difference of step h. Identically zero
/// for the true G, so the returned value is O(h^2) finite-difference error.
inline double g_ode_residual(double t, double h) {
    if (!(t > 0.0 && t < 1.0)) throw std::domain_error("g_ode_residual: t in (0,1)");
    if (!(h > 0.0 && h < std::min(t, 1.0 - t)))
        throw std::domain_error("g_ode_residual: need 0 < h < min(t, 1-t)");
    const double gp = (hypergeometric_G(t + h) - hypergeometric_G(t - h)) / (2.0 * h);
    return t - 1.0 + (t + 1.0) * hypergeometric_G(t) - 3.0 * t * (1.0 - t) * gp;
}

/// c0 = Gamma(2/3) Gamma(5/3) / (2 Gamma(4/3)), the constant in the
/// Green-function limit of the separation probability.
inline double green_constant() {
    static const double c0 =
        gamma_fn(2.0 / 3.0) * gamma_fn(5.0 / 3.0) / (2.0 * gamma_fn(4.0 / 3.0));
    return c0;
}

}  // namespace sle83
