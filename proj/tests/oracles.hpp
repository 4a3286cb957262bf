// Independent numerical oracles used only by the test suites. Everything here
// is deliberately implemented by a *different* method than the library code it
// checks: adaptive Simpson instead of Gauss quadrature, explicit coefficient
// sums instead of recurrences, closed-form kernels instead of time stepping.
#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

namespace oracles {

inline double simpson_rec(const std::function<double(double)>& f, double a, double b,
                          double fa, double fm, double fb, double whole, double eps,
                          int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    double delta = left + right - whole;
    if (depth <= 0 || std::fabs(delta) <= 15.0 * eps)
        return left + right + delta / 15.0;
    return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * eps, depth - 1)
         + simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * eps, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double eps = 1e-12) {
    double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_rec(f, a, b, fa, fm, fb, whole, eps, 40);
}

// int f dmu with dmu = e^{-y^2/4} dy / sqrt(4 pi), truncated far in the tail.
inline double gauss_measure_integral(const std::function<double(double)>& f,
                                     double L = 60.0, double eps = 1e-13) {
    auto g = [&](double y) { return f(y) * std::exp(-0.25 * y * y) / std::sqrt(4.0 * M_PI); };
    // split at 0 so the peak is a panel boundary
    return integrate(g, -L, 0.0, eps) + integrate(g, 0.0, L, eps);
}

inline double factorial(int n) {
    double v = 1.0;
    for (int k = 2; k <= n; ++k) v *= k;
    return v;
}

// h_m(y) = sum_n m! / (n! (m-2n)!) (-1)^n y^{m-2n}  (explicit coefficient sum)
inline double hermite_explicit(int m, double y) {
    double total = 0.0;
    for (int n = 0; 2 * n <= m; ++n) {
        double c = factorial(m) / (factorial(n) * factorial(m - 2 * n));
        total += ((n % 2 == 0) ? 1.0 : -1.0) * c * std::pow(y, m - 2 * n);
    }
    return total;
}

// Whole-line heat kernel solution for Gaussian data u0 = exp(-x^2/(4 tau0)) in
// d dimensions (radially symmetric): u(r,t) = (tau0/(tau0+t))^{d/2} exp(-r^2/(4(tau0+t))).
inline double heat_gaussian(double r, double t, double tau0, int d) {
    double tt = tau0 + t;
    return std::pow(tau0 / tt, 0.5 * d) * std::exp(-r * r / (4.0 * tt));
}

// Exact flat blow-up trajectory u(t) = ((p-1)(T-t))^{-1/(p-1)} for u' = u^p.
inline double flat_blowup(double t, double T, double p) {
    return std::pow((p - 1.0) * (T - t), -1.0 / (p - 1.0));
}

}  // namespace oracles
