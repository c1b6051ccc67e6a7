#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace qkdlab {

// A double constrained to [0, 1]. Construction validates; NaN is rejected.
struct Probability {
    double value{0.0};

    Probability() = default;
    Probability(double v) : value(v) {
        if (!(v >= 0.0 && v <= 1.0))
            throw std::domain_error("probability out of [0, 1]: " + std::to_string(v));
    }
    operator double() const noexcept { return value; }

    friend bool operator==(Probability, Probability) = default;
};

namespace detail {

// Power series for I0(x) - 1: sum_{k>=1} (x^2/4)^k / (k!)^2.
// Accurate for |x| <= 15 (terms decay fast enough; relative error < 1e-15).
inline double bessel_i0_series_minus_one(double ax) {
    const double q = ax * ax / 4.0;
    double term = q;
    double sum = q;
    for (int k = 2; k <= 300; ++k) {
        term *= q / (static_cast<double>(k) * static_cast<double>(k));
        sum += term;
        if (term <= sum * 1e-18)
            break;
    }
    return sum;
}

// Large-argument expansion: I0(x) ~ e^x / sqrt(2 pi x) * sum_k u_k with
// u_0 = 1, u_{k+1} = u_k (2k+1)^2 / (8 x (k+1)). The series is asymptotic:
// summation stops at the smallest term.
inline double bessel_i0_asymptotic(double ax) {
    double u = 1.0;
    double sum = 1.0;
    for (int k = 0; k < 60; ++k) {
        const double next =
            u * static_cast<double>(2 * k + 1) * static_cast<double>(2 * k + 1) /
            (8.0 * ax * static_cast<double>(k + 1));
        if (next >= u)
            break;  // smallest term reached; adding more would diverge
        u = next;
        sum += u;
        if (u <= sum * 1e-18)
            break;
    }
    return std::exp(ax) / std::sqrt(2.0 * std::numbers::pi * ax) * sum;
}

}  // namespace detail

// Modified Bessel function of the first kind, order zero.
// Power series for |x| <= 15, asymptotic expansion beyond; the seam is
// continuous to ~5e-15 relative. Guarded to |x| <= 700 so e^x cannot
// overflow. Relative error <= 1e-12 over the full admitted range.
inline double bessel_i0(double x) {
    if (!std::isfinite(x))
        throw std::domain_error("bessel_i0: non-finite argument");
    const double ax = std::abs(x);
    if (ax > 700.0)
        throw std::domain_error("bessel_i0: |x| > 700 overflows double range");
    if (ax <= 15.0)
        return 1.0 + detail::bessel_i0_series_minus_one(ax);
    return detail::bessel_i0_asymptotic(ax);
}

namespace detail {

// I0(x) - 1 without cancellation for small x (the series never forms the
// leading 1). For large x the direct subtraction is exact to working
// precision because I0 >> 1.
inline double bessel_i0_minus_one(double x) {
    if (!std::isfinite(x))
        throw std::domain_error("bessel_i0_minus_one: non-finite argument");
    const double ax = std::abs(x);
    if (ax > 700.0)
        throw std::domain_error("bessel_i0_minus_one: |x| > 700 overflows double range");
    if (ax <= 15.0)
        return bessel_i0_series_minus_one(ax);
    return bessel_i0_asymptotic(ax) - 1.0;
}

}  // namespace detail

// Binary Shannon entropy h(p) = -p log2 p - (1-p) log2 (1-p), with the
// endpoints h(0) = h(1) = 0 by continuous extension. Evaluated through
// m = min(p, 1-p) so the log1p path keeps full precision near both ends;
// h(p) == h(1-p) holds exactly whenever 1-p is exactly representable.
inline double binary_entropy(Probability p) {
    const double m = std::min(p.value, 1.0 - p.value);
    if (m <= 0.0)
        return 0.0;
    return -m * std::log2(m) - (1.0 - m) * std::log1p(-m) / std::numbers::ln2;
}

}  // namespace qkdlab
