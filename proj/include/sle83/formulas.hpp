// Closed-form passage, containment, and area-moment formulas for chordal
// SLE_{8/3}. All functions are pure; points live in the open upper
// half-plane unless noted otherwise.
#pragma once

#include <complex>
#include <stdexcept>

#include "sle83/special.hpp"

namespace sle83 {

using Complex = std::complex<double>;

/// A point z = x + iy with y > 0.
struct HalfPlanePoint {
    double x;
    double y;

    HalfPlanePoint(double x_, double y_) : x(x_), y(y_) {
        if (!(y > 0.0)) throw std::domain_error("HalfPlanePoint: requires Im z > 0");
    }
    explicit HalfPlanePoint(Complex z) : HalfPlanePoint(z.real(), z.imag()) {}

    Complex c() const { return {x, y}; }
    double abs2() const { return x * x + y * y; }
    double abs() const { return std::sqrt(abs2()); }
};

// Values within `slack` of [0,1] are float noise and get clamped; anything
// further out indicates a transcription bug and is an error.
inline double checked_probability(double p, double slack = 1e-12) {
    if (p < -slack || p > 1.0 + slack)
        throw std::runtime_error("probability invariant violated: p = " + std::to_string(p));
    return std::min(1.0, std::max(0.0, p));
}

/// sigma(z,w) = |z-w|^2 / |z-conj(w)|^2 on arbitrary complex pairs.
/// For both points in H this lies in [0,1); the general form is needed
/// because it is also applied to Joukowsky images with negative
/// imaginary parts.
inline double sigma(Complex z, Complex w) {
    const double dr = z.real() - w.real();
    const double di = z.imag() - w.imag();
    const double si = z.imag() + w.imag();
    const double denom = dr * dr + si * si;
    if (denom == 0.0) throw std::domain_error("sigma: z and conj(w) coincide");
    return (dr * dr + di * di) / denom;
}

inline double sigma(const HalfPlanePoint& z, const HalfPlanePoint& w) {
    return sigma(z.c(), w.c());
}

/// Moebius self-map of H sending eps to infinity and fixing 0:
/// F_eps(z) = z / (eps - z).
inline Complex mobius_f_eps(Complex z, double eps) { return z / (eps - z); }

inline HalfPlanePoint mobius_f_eps(const HalfPlanePoint& z, double eps) {
    return HalfPlanePoint(mobius_f_eps(z.c(), eps));
}

inline Complex mobius_f_eps_inverse(Complex z, double eps) { return eps * z / (z + 1.0); }

/// Joukowsky map J(z) = z + 1/z. On the open upper half-disk the image has
/// negative imaginary part, so the result is a general complex value.
inline Complex joukowsky(Complex z) {
    if (z == Complex(0.0, 0.0)) throw std::domain_error("joukowsky: z = 0");
    return z + 1.0 / z;
}

/// Schramm's one-point formula: P{path passes left of z} = 1/2 + x/(2|z|),
/// equivalently cos^2(arg(z)/2).
inline double left_passage_one(const HalfPlanePoint& z) {
    return checked_probability(0.5 * (1.0 + z.x / z.abs()));
}

/// Two-point left-passage probability,
///   cos^2(arg z /2) cos^2(arg w /2) + (1/4) sin(arg z) sin(arg w) G(sigma).
inline double left_passage_two(const HalfPlanePoint& z, const HalfPlanePoint& w) {
    const double az = std::arg(z.c());
    const double aw = std::arg(w.c());
    const double cz = std::cos(0.5 * az);
    const double cw = std::cos(0.5 * aw);
    const double p = cz * cz * cw * cw +
                     0.25 * std::sin(az) * std::sin(aw) * hypergeometric_G(sigma(z, w));
    return checked_probability(p);
}

/// P{path separates a and b} = L(a) + L(b) - 2 L(a,b).
inline double separation_probability(const HalfPlanePoint& a, const HalfPlanePoint& b) {
    return checked_probability(left_passage_one(a) + left_passage_one(b) -
                               2.0 * left_passage_two(a, b));
}

/// Green-function limit: lim eps^{-2/3} P{path passes between z +- eps eta}
/// = c0 y^{-2/3} sin^2(arg z).
inline double green_limit(const HalfPlanePoint& z) {
    const double s = std::sin(std::arg(z.c()));
    return green_constant() * std::pow(z.y, -2.0 / 3.0) * s * s;
}

/// Leading eps^2 coefficient of P{z inside the eps-bubble}: (1/4) Im(1/z)^2.
inline double bubble_one_point_coeff(const HalfPlanePoint& z) {
    const double im_inv = z.y / z.abs2();  // |Im(1/z)|
    return 0.25 * im_inv * im_inv;
}

/// Leading eps^2 coefficient of P{z and w inside the eps-bubble}:
/// (1/4) Im(1/z) Im(1/w) G(sigma).
inline double bubble_two_point_coeff(const HalfPlanePoint& z, const HalfPlanePoint& w) {
    return 0.25 * (z.y / z.abs2()) * (w.y / w.abs2()) * hypergeometric_G(sigma(z, w));
}

/// Leading eps^2 coefficient of P{bubble inside D_R and contains z}:
/// Im(J(z/R))^2 / (4 R^2).
inline double bubble_in_disk_one_coeff(const HalfPlanePoint& z, double R) {
    if (!(z.abs() < R)) throw std::domain_error("bubble_in_disk_one_coeff: |z| >= R");
    const double im_j = joukowsky(z.c() / R).imag();
    return im_j * im_j / (4.0 * R * R);
}

/// Leading eps^2 coefficient of P{bubble inside D_R and contains z and w}:
/// Im(J(z/R)) Im(J(w/R)) G(sigma(J(z/R), J(w/R))) / (4 R^2).
inline double bubble_in_disk_two_coeff(const HalfPlanePoint& z, const HalfPlanePoint& w,
                                       double R) {
    if (!(z.abs() < R && w.abs() < R))
        throw std::domain_error("bubble_in_disk_two_coeff: point outside D_R");
    const Complex jz = joukowsky(z.c() / R);
    const Complex jw = joukowsky(w.c() / R);
    return jz.imag() * jw.imag() * hypergeometric_G(sigma(jz, jw)) / (4.0 * R * R);
}

/// Truncated expansion of the probability that an eps-bubble stays inside
/// the disk of radius R + delta: 1 - (5/8) eps^2/R^2 + (5/4) eps^2 delta/R^3.
/// Returns the expansion value; `trustworthy` (if given) is cleared when
/// eps/R > 0.1, where the truncation is no longer reliable.
inline double bubble_escape_expansion(double R, double delta, double eps,
                                      bool* trustworthy = nullptr) {
    if (!(R > 0.0 && delta >= 0.0 && eps > 0.0))
        throw std::domain_error("bubble_escape_expansion: need R > 0, delta >= 0, eps > 0");
    if (trustworthy) *trustworthy = (eps / R <= 0.1);
    const double e2 = eps * eps;
    return 1.0 - (5.0 / 8.0) * e2 / (R * R) + (5.0 / 4.0) * e2 * delta / (R * R * R);
}

/// p_w(z): probability that z is inside the SLE_{8/3} bubble with bulk
/// point w, Im(1/z)/Im(1/w) * G(sigma(z,w)).
inline double bulk_containment(const HalfPlanePoint& z, const HalfPlanePoint& w) {
    const double ratio = (z.y / z.abs2()) / (w.y / w.abs2());
    return checked_probability(ratio * hypergeometric_G(sigma(z, w)));
}

/// CDF of the bubble radius R_z: (1 - |z|^2/r^2)^2 for r >= |z|, else 0.
inline double radius_cdf(double r, const HalfPlanePoint& z) {
    if (!(r > 0.0)) throw std::domain_error("radius_cdf: r must be positive");
    const double m2 = z.abs2();
    if (r * r <= m2) return 0.0;
    const double t = 1.0 - m2 / (r * r);
    return t * t;
}

/// p_{w,R}(z): containment probability for the bubble with bulk point w
/// conditioned to stay inside D_R.
inline double bulk_containment_in_disk(const HalfPlanePoint& z, const HalfPlanePoint& w,
                                       double R) {
    if (!(z.abs() < R && w.abs() < R))
        throw std::domain_error("bulk_containment_in_disk: point outside D_R");
    const Complex jz = joukowsky(z.c() / R);
    const Complex jw = joukowsky(w.c() / R);
    return checked_probability(jz.imag() / jw.imag() * hypergeometric_G(sigma(jz, jw)));
}

/// One-point containment density of the bubble conditioned to have radius 1:
///   f1(z) = (4/5) y^2 (1 - |z|^2) / |z|^2.
///
/// Derivation (the R-derivative recipe applied to the one-point disk
/// coefficient): with m(R) = Im J(z/R) = y(|z|^2 - R^2)/(R |z|^2),
///   P~_R(z) = m(R)^2 / (4R^2) = y^2 (|z|^2 - R^2)^2 / (4 R^4 |z|^4),
///   dP~_R/dR = y^2 (R^2 - |z|^2) / (R^5 |z|^2),
/// and f1(z) = (4 R^3 / 5) dP~_R/dR at R = 1. Its integral over the upper
/// half-disk is pi/10, the known first area moment.
inline double touch_radius_one_point(const HalfPlanePoint& z) {
    const double m2 = z.abs2();
    if (!(m2 > 0.0 && m2 < 1.0))
        throw std::domain_error("touch_radius_one_point: need 0 < |z| < 1");
    return 0.8 * z.y * z.y * (1.0 - m2) / m2;
}

/// Two-point containment density f(z,w) of the bubble conditioned to have
/// radius 1. Defined on the punctured domain z != w; the diagonal limit
/// equals touch_radius_one_point and is supplied by the caller for
/// degenerate draws (see quadrature).
inline double area_integrand(const HalfPlanePoint& z, const HalfPlanePoint& w) {
    const double x = z.x, y = z.y, u = w.x, v = w.y;
    const double z2 = z.abs2();
    const double w2 = w.abs2();
    if (!(z2 > 0.0 && z2 < 1.0 && w2 > 0.0 && w2 < 1.0))
        throw std::domain_error("area_integrand: points must lie in the open upper half-disk");

    const double s = sigma(z, w);
    const double s0 = sigma(joukowsky(z.c()), joukowsky(w.c()));
    // Both hypergeometric terms diverge like s0^{-2/3} individually and the
    // combination loses significance as s0 -> 0 (points nearly coincident).
    // Below 1e-9 switch to the diagonal limit, which is the one-point
    // density: the replacement error is O(s0^{1/3}) ~ 1e-3 on a set of
    // squared-separation measure ~ s0, negligible under any integral.
    if (s0 < 1e-9) return touch_radius_one_point(HalfPlanePoint(0.5 * (z.c() + w.c())));
    const double dzw2 = (x - u) * (x - u) + (y - v) * (y - v);

    const double A =
        2.0 * s * (1.0 - z2) * (1.0 - w2) * (x * u - y * v - z2 * w2) *
            hyp2f1(1.0, 4.0 / 3.0, 5.0 / 3.0, 1.0 - s0) +
        s0 * dzw2 * (1.0 - z2 * w2) * hyp2f1(4.0 / 3.0, 2.0, 5.0 / 3.0, 1.0 - s0);

    const double denom = 1.0 - 2.0 * (x * u + y * v) + z2 * w2;  // |1 - z conj(w)|^2
    const double f = 2.0 * y * v / (5.0 * z2 * w2) * (z2 + w2 - 2.0 * z2 * w2 - A / denom);
    return checked_probability(f, 1e-9);
}

/// Probability that both z and w lie in the hull of two commuting SLE_{8/3}
/// paths: (2/5)(y v/|w|^2 + (y/|z|^2) v) G(sigma(z,w)); equivalently
/// -(2/5)(Im(1/z) w.y + y Im(1/w)) G, since Im(1/.) = -Im(.)/|.|^2.
inline double two_path_two_point(const HalfPlanePoint& z, const HalfPlanePoint& w) {
    const double p = 0.4 * (z.y * w.y / w.abs2() + z.y / z.abs2() * w.y) *
                     hypergeometric_G(sigma(z, w));
    return checked_probability(p);
}

/// One-point version: (4/5) y^2/|z|^2 = (4/5) sin^2(arg z).
inline double two_path_one_point(const HalfPlanePoint& z) {
    return checked_probability(0.8 * z.y * z.y / z.abs2());
}

/// Probability that z is in the two-path hull but w is not.
inline double two_path_in_not_in(const HalfPlanePoint& z, const HalfPlanePoint& w) {
    return checked_probability(two_path_one_point(z) - two_path_two_point(z, w));
}

}  // namespace sle83
