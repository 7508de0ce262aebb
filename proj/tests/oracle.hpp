// Test-only reference implementations, independent of the library path:
// an extended-precision (long double) hypergeometric series oracle plus
// values frozen from a high-precision bignum computation.
#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace oracle {

// Direct power series in long double; usable for |x| <= 1/2.
inline long double hyp2f1_series_ld(long double a, long double b, long double c,
                                    long double x, int terms = 400) {
    long double term = 1.0L, sum = 1.0L;
    for (int n = 0; n < terms; ++n) {
        term *= (a + n) * (b + n) / ((c + n) * (n + 1.0L)) * x;
        sum += term;
        if (std::fabs(term) < 1e-22L * std::fabs(sum)) break;
    }
    return sum;
}

// x -> 1-x connection formula in long double, valid for non-integer c-a-b.
// Uses the standard library's long double gamma, an implementation wholly
// separate from the library's Lanczos approximation.
inline long double hyp2f1_ld(long double a, long double b, long double c, long double x) {
    if (std::fabs(x) <= 0.5L) return hyp2f1_series_ld(a, b, c, x);
    if (!(x < 1.0L)) throw std::domain_error("oracle: x must be < 1");
    const long double s = c - a - b;
    const long double y = 1.0L - x;
    const long double k1 = std::tgamma(c) * std::tgamma(s) /
                           (std::tgamma(c - a) * std::tgamma(c - b));
    const long double k2 = std::tgamma(c) * std::tgamma(-s) /
                           (std::tgamma(a) * std::tgamma(b));
    return k1 * hyp2f1_series_ld(a, b, a + b - c + 1.0L, y) +
           k2 * std::pow(y, s) * hyp2f1_series_ld(c - a, c - b, s + 1.0L, y);
}

inline long double G_ld(long double sigma) {
    if (sigma == 0.0L) return 1.0L;
    if (sigma == 1.0L) return 0.0L;
    return 1.0L - sigma * hyp2f1_ld(1.0L, 4.0L / 3.0L, 5.0L / 3.0L, 1.0L - sigma);
}

// Frozen from a 30-digit bignum computation (independent of both the
// library and the long double oracle above).
inline constexpr double kC0 = 0.68446340597972572701;  // Gamma(2/3)Gamma(5/3)/(2 Gamma(4/3))
inline constexpr double kG_half = 0.13763014692340315502;
inline constexpr double kG_ninth = 0.41018541374109585468;
inline constexpr double kHyp_1_43_53_01 = 1.0877016003009665789;
inline constexpr double kHyp_13_23_53_05 = 1.0865179306859534139;
inline constexpr double kGamma_third = 2.6789385347077476337;
inline constexpr double kGamma_4_7 = 15.431411600047431712;
inline constexpr double kGamma_12_3 = 83385367.899969854713;
inline constexpr double kGamma_0_001 = 999.42377248459546611;
inline constexpr double kLeftTwo_half_pair = 0.261978293536717665;  // L(-1/2+i, 1/2+i)
inline constexpr double kLeftTwo_i_2i = 0.352546353435273964;       // L(i, 2i)

struct Hyp2F1Case {
    long double a, b, c, x;
    double value;
};

// 20 parameter/argument combinations, frozen from the bignum run.
inline const std::vector<Hyp2F1Case>& hyp2f1_cases() {
    static const std::vector<Hyp2F1Case> cases = {
        {1.0L, 4.0L / 3.0L, 5.0L / 3.0L, 0.0L, 1.0},
        {1.0L, 4.0L / 3.0L, 5.0L / 3.0L, 0.1L, 1.0877016003009665789},
        {1.0L, 4.0L / 3.0L, 5.0L / 3.0L, 0.25L, 1.2567141477729669221},
        {1.0L, 4.0L / 3.0L, 5.0L / 3.0L, 0.5L, 1.72473970615319369},
        {1.0L, 4.0L / 3.0L, 5.0L / 3.0L, 0.75L, 2.9220325686619953064},
        {1.0L, 4.0L / 3.0L, 5.0L / 3.0L, 0.9L, 5.7286485250373145479},
        {1.0L / 3.0L, 2.0L / 3.0L, 5.0L / 3.0L, 0.0L, 1.0},
        {1.0L / 3.0L, 2.0L / 3.0L, 5.0L / 3.0L, 0.1L, 1.0139225307699584858},
        {1.0L / 3.0L, 2.0L / 3.0L, 5.0L / 3.0L, 0.25L, 1.0373946721507370021},
        {1.0L / 3.0L, 2.0L / 3.0L, 5.0L / 3.0L, 0.5L, 1.0865179306859534139},
        {1.0L / 3.0L, 2.0L / 3.0L, 5.0L / 3.0L, 0.75L, 1.1596093933448478528},
        {1.0L / 3.0L, 2.0L / 3.0L, 5.0L / 3.0L, 0.9L, 1.2341999109340374642},
        {4.0L / 3.0L, 2.0L, 5.0L / 3.0L, 0.0L, 1.0},
        {4.0L / 3.0L, 2.0L, 5.0L / 3.0L, 0.1L, 1.1838784297522456433},
        {4.0L / 3.0L, 2.0L, 5.0L / 3.0L, 0.25L, 1.5870634154294260678},
        {4.0L / 3.0L, 2.0L, 5.0L / 3.0L, 0.5L, 3.0580730394865270233},
        {4.0L / 3.0L, 2.0L, 5.0L / 3.0L, 0.75L, 9.4847426602113223816},
        {4.0L / 3.0L, 2.0L, 5.0L / 3.0L, 0.9L, 42.94810732523632547},
        {0.5L, 1.5L, 2.25L, 0.3L, 1.1219263275973997135},
        {2.0L, 3.0L, 4.5L, 0.6L, 3.1175862052078355744},
    };
    return cases;
}

}  // namespace oracle
