// C-infinity cutoff machinery. Everything is built from the classic bump
// sigma(x) = exp(-1/x) (x > 0, extended by 0): the ramp
//     ramp(x) = sigma(x) / (sigma(x) + sigma(1-x))
// rises monotonically from 0 to 1 across [0,1] with all derivatives vanishing
// at both endpoints, so every cutoff below is exactly 0 / exactly 1 on its
// plateau sets and smooth in between:
//     chi     : 0 on [0,1/8],  1 on [1/4,inf)
//     chi_bar : 1 on [0,3/8],  0 on [3/4,inf)
//     chi0    : 1 on [0,1],    0 on [2,inf)
//     chi_c   : chi0(|y| / (2K sqrt(s)))
#pragma once

#include <cmath>

namespace ringblow {

// exp(-1/x) for x > 0, else 0.  For 0 < x <= 1/1024 the true value is below
// the double underflow threshold, so returning 0 there is bit-exact and keeps
// the derivative formulas free of 0 * inf.
inline double bump_sigma(double x) {
    if (x <= 0.0009765625) return 0.0;
    return std::exp(-1.0 / x);
}

inline double bump_sigma_d1(double x) {  // sigma'(x) = sigma(x)/x^2
    if (x <= 0.0009765625) return 0.0;
    double s = std::exp(-1.0 / x);
    return s / (x * x);
}

inline double bump_sigma_d2(double x) {  // sigma''(x) = sigma(x)(1-2x)/x^4
    if (x <= 0.0009765625) return 0.0;
    double s = std::exp(-1.0 / x);
    return s * (1.0 - 2.0 * x) / (x * x * x * x);
}

// Monotone C-infinity ramp: 0 for x <= 0, 1 for x >= 1.
inline double smooth01(double x) {
    if (x <= 0.0009765625) return 0.0;
    if (x >= 1.0 - 0.0009765625) return 1.0;
    double a = bump_sigma(x), b = bump_sigma(1.0 - x);
    return a / (a + b);
}

inline double smooth01_d1(double x) {
    if (x <= 0.0009765625 || x >= 1.0 - 0.0009765625) return 0.0;
    double a = bump_sigma(x), b = bump_sigma(1.0 - x);
    double ad = bump_sigma_d1(x), bd = -bump_sigma_d1(1.0 - x);
    double den = a + b;
    return (ad * b - a * bd) / (den * den);
}

inline double smooth01_d2(double x) {
    if (x <= 0.0009765625 || x >= 1.0 - 0.0009765625) return 0.0;
    double a = bump_sigma(x), b = bump_sigma(1.0 - x);
    double ad = bump_sigma_d1(x), bd = -bump_sigma_d1(1.0 - x);
    double add = bump_sigma_d2(x), bdd = bump_sigma_d2(1.0 - x);
    double den = a + b;
    return (add * b - a * bdd) / (den * den)
         - 2.0 * (ad * b - a * bd) * (ad + bd) / (den * den * den);
}

// chi: 0 on [0,1/8], 1 on [1/4,inf).
inline double chi(double xi) { return smooth01(8.0 * xi - 1.0); }

// chi_bar: 1 on [0,3/8], 0 on [3/4,inf).
inline double chi_bar(double xi) { return 1.0 - smooth01((8.0 * xi - 3.0) / 3.0); }

// chi0: 1 on [0,1], 0 on [2,inf).
inline double chi0(double xi) { return 1.0 - smooth01(xi - 1.0); }

// chi_c(y,s) = chi0(|y| / (2 K sqrt(s))): 1 for |y| <= 2K sqrt(s), 0 beyond 4K sqrt(s).
inline double chi_c(double y, double s, double K) {
    return chi0(std::fabs(y) / (2.0 * K * std::sqrt(s)));
}

}  // namespace ringblow
