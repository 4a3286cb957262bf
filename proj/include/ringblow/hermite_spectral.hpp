// Spectral layer for the Gaussian measure dmu = e^{-y^2/4} dy / sqrt(4 pi):
// the linearized operator around the blow-up profile,
//     L = d^2/dy^2 - (y/2) d/dy + 1,
// is self-adjoint in L^2(dmu) with polynomial eigenfunctions h_m
// (h_{m+1} = y h_m - 2 m h_{m-1}, h_0 = 1, h_1 = y; L h_m = (1 - m/2) h_m)
// and orthogonality  int h_m h_n dmu = 2^n n! delta_{nm}.
//
// Quadrature: classical Gauss-Hermite for weight e^{-x^2} (Newton iteration on
// the orthonormal recurrence, long-double tables) mapped by y = 2x, so that
// sum_i w_i f(y_i) = int f dmu exactly for polynomials of degree <= 2 n_q - 1.
//
// Mode bookkeeping for a sampled residual q(y): coefficients
// q_m = (int q h_m dmu) / (2^m m!) for m <= 2, remainder q_minus = q - sum q_m h_m,
// outer part q_e = (1 - chi_c) q, and the weighted norms used by the trap
// bounds: sup|q_e| and sup |q_minus| / (1 + |y|^3).
#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "ringblow/cutoffs.hpp"
#include "ringblow/interp.hpp"

namespace ringblow {

inline double hermite_h(int m, double y) {
    if (m < 0) throw std::invalid_argument("hermite_h: m must be >= 0");
    double prev = 1.0;  // h_0
    if (m == 0) return prev;
    double cur = y;     // h_1
    for (int k = 1; k < m; ++k) {
        double next = y * cur - 2.0 * k * prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

// int h_m^2 dmu = 2^m m!
inline double hermite_norm2(int m) {
    double v = 1.0;
    for (int k = 1; k <= m; ++k) v *= 2.0 * k;
    return v;
}

struct GaussMeasureQuad {
    std::vector<double> y;  // ascending nodes
    std::vector<double> w;  // positive weights, sum = 1
    int n_q = 0;

    // Gauss-Hermite nodes/weights for weight e^{-x^2} by Newton iteration on
    // the orthonormal three-term recurrence (long double), then y = 2x and
    // weight renormalization by 1/sqrt(pi) so the measure has unit mass.
    static GaussMeasureQuad build(int n = 64) {
        if (n < 2) throw std::invalid_argument("GaussMeasureQuad: need n >= 2");
        const long double pim4 = 0.7511255444649424828587030047762276930510L;  // pi^{-1/4}
        const long double sqrtpi = 1.7724538509055160272981674833411451828L;
        std::vector<long double> x(n), wt(n);
        const int half = (n + 1) / 2;
        long double z = 0.0L;
        for (int i = 0; i < half; ++i) {
            if (i == 0)
                z = std::sqrt(static_cast<long double>(2 * n + 1))
                  - 1.85575L * std::pow(static_cast<long double>(2 * n + 1), -0.16667L);
            else if (i == 1)
                z -= 1.14L * std::pow(static_cast<long double>(n), 0.426L) / z;
            else if (i == 2)
                z = 1.86L * z - 0.86L * x[0];
            else if (i == 3)
                z = 1.91L * z - 0.91L * x[1];
            else
                z = 2.0L * z - x[i - 2];
            long double pp = 0.0L;
            for (int iter = 0; iter < 200; ++iter) {
                long double p1 = pim4, p2 = 0.0L;
                for (int j = 0; j < n; ++j) {
                    long double p3 = p2;
                    p2 = p1;
                    p1 = z * std::sqrt(2.0L / (j + 1)) * p2
                       - std::sqrt(static_cast<long double>(j) / (j + 1)) * p3;
                }
                pp = std::sqrt(2.0L * n) * p2;
                long double z1 = z;
                z = z1 - p1 / pp;
                if (std::fabs(z - z1) <= 5e-19L) break;
            }
            if (2 * i == n - 1) z = 0.0L;  // center node of odd-n rules
            x[i] = z;
            x[n - 1 - i] = -z;
            wt[i] = 2.0L / (pp * pp);
            wt[n - 1 - i] = wt[i];
        }
        GaussMeasureQuad q;
        q.n_q = n;
        q.y.resize(n);
        q.w.resize(n);
        for (int i = 0; i < n; ++i) {  // x is descending; emit ascending y = 2x
            q.y[i] = static_cast<double>(2.0L * x[n - 1 - i]);
            q.w[i] = static_cast<double>(wt[n - 1 - i] / sqrtpi);
        }
        return q;
    }

    template <class F>
    double integrate(F&& f) const {
        long double acc = 0.0L;
        for (int i = 0; i < n_q; ++i) acc += static_cast<long double>(w[i]) * f(y[i]);
        return static_cast<double>(acc);
    }
};

// Projection coefficients of a callable against h_0, h_1, h_2.
template <class F>
inline void project_modes_fn(const GaussMeasureQuad& quad, F&& f,
                             double& q0, double& q1, double& q2) {
    long double a0 = 0.0L, a1 = 0.0L, a2 = 0.0L;
    for (int i = 0; i < quad.n_q; ++i) {
        const double yi = quad.y[i];
        const long double wf = static_cast<long double>(quad.w[i]) * f(yi);
        a0 += wf;
        a1 += wf * yi;
        a2 += wf * (yi * yi - 2.0);
    }
    q0 = static_cast<double>(a0);
    q1 = static_cast<double>(a1 / 2.0L);   // 2^1 1!
    q2 = static_cast<double>(a2 / 8.0L);   // 2^2 2!
}

struct ModeDecomposition {
    double q0 = 0.0, q1 = 0.0, q2 = 0.0;
    std::vector<double> y;        // sample nodes
    std::vector<double> q_minus;  // q - (q0 h0 + q1 h1 + q2 h2) at sample nodes
    std::vector<double> q_e;      // (1 - chi_c) q at sample nodes
    double qminus_wnorm = 0.0;    // sup |q_minus| / (1 + |y|^3)
    double qe_sup = 0.0;          // sup |q_e|
};

// Decompose a residual sampled on an ascending y-grid. Quadrature evaluations
// off the sample grid use cubic interpolation; outside the sampled span the
// residual is taken as 0 (the Gaussian weight is negligible there by design).
inline ModeDecomposition project_modes(const std::vector<double>& y,
                                       const std::vector<double>& q,
                                       const GaussMeasureQuad& quad,
                                       double s, double K) {
    if (y.size() != q.size() || y.size() < 4)
        throw std::invalid_argument("project_modes: need matching sample arrays, >= 4 nodes");
    auto eval = [&](double yy) -> double {
        if (yy < y.front() || yy > y.back()) return 0.0;
        return interp_cubic(y, q, yy);
    };
    ModeDecomposition d;
    project_modes_fn(quad, eval, d.q0, d.q1, d.q2);
    d.y = y;
    d.q_minus.resize(y.size());
    d.q_e.resize(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double yi = y[i];
        d.q_minus[i] = q[i] - (d.q0 + d.q1 * yi + d.q2 * (yi * yi - 2.0));
        d.q_e[i] = (1.0 - chi_c(yi, s, K)) * q[i];
        d.qminus_wnorm = std::max(d.qminus_wnorm,
                                  std::fabs(d.q_minus[i]) / (1.0 + std::fabs(yi * yi * yi)));
        d.qe_sup = std::max(d.qe_sup, std::fabs(d.q_e[i]));
    }
    return d;
}

// Underresolution probe: largest movement of any coefficient when the node
// count doubles. Values above ~1e-8 indicate the quadrature is not converged.
inline double quad_drift(const std::vector<double>& y,
                         const std::vector<double>& q,
                         const GaussMeasureQuad& quad) {
    GaussMeasureQuad fine = GaussMeasureQuad::build(2 * quad.n_q);
    auto eval = [&](double yy) -> double {
        if (yy < y.front() || yy > y.back()) return 0.0;
        return interp_cubic(y, q, yy);
    };
    double a0, a1, a2, b0, b1, b2;
    project_modes_fn(quad, eval, a0, a1, a2);
    project_modes_fn(fine, eval, b0, b1, b2);
    return std::max({std::fabs(a0 - b0), std::fabs(a1 - b1), std::fabs(a2 - b2)});
}

// (sup|q_e|, sup |q_minus|/(1+|y|^3)) of an existing decomposition.
inline std::pair<double, double> weighted_norms(const ModeDecomposition& d) {
    return {d.qe_sup, d.qminus_wnorm};
}

// Second-order finite-difference application of L = d_yy - (y/2) d_y + 1 on a
// uniform grid (central in the interior, one-sided second order at the ends).
inline std::vector<double> apply_L(const std::vector<double>& y,
                                   const std::vector<double>& q) {
    const std::size_t n = y.size();
    if (n < 5 || q.size() != n)
        throw std::invalid_argument("apply_L: need >= 5 nodes and matching arrays");
    const double h = y[1] - y[0];
    for (std::size_t i = 1; i + 1 < n; ++i)
        if (std::fabs((y[i + 1] - y[i]) - h) > 1e-9 * std::max(1.0, std::fabs(h)))
            throw std::invalid_argument("apply_L: grid must be uniform");
    std::vector<double> out(n);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        double d2 = (q[i + 1] - 2.0 * q[i] + q[i - 1]) / (h * h);
        double d1 = (q[i + 1] - q[i - 1]) / (2.0 * h);
        out[i] = d2 - 0.5 * y[i] * d1 + q[i];
    }
    // one-sided second-order stencils at the boundary nodes
    {
        double d1 = (-3.0 * q[0] + 4.0 * q[1] - q[2]) / (2.0 * h);
        double d2 = (2.0 * q[0] - 5.0 * q[1] + 4.0 * q[2] - q[3]) / (h * h);
        out[0] = d2 - 0.5 * y[0] * d1 + q[0];
        std::size_t m = n - 1;
        double e1 = (3.0 * q[m] - 4.0 * q[m - 1] + q[m - 2]) / (2.0 * h);
        double e2 = (2.0 * q[m] - 5.0 * q[m - 1] + 4.0 * q[m - 2] - q[m - 3]) / (h * h);
        out[m] = e2 - 0.5 * y[m] * e1 + q[m];
    }
    return out;
}

}  // namespace ringblow
