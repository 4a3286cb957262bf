// Closed-form model layer for the radial power-nonlinearity heat flow
//     u_t = u_rr + ((d-1)/r) u_r + |u|^{p-1} u,
// whose ring blow-up at r = 1 is governed, in the self-similar variables
// y = (r-1)/sqrt(T-t), s = -log(T-t), by the one-dimensional profile family
//     f(z)      = (p-1 + b z^2)^{-1/(p-1)},        z = y/sqrt(s),
//     phi(y,s)  = f(y/sqrt(s)) + kappa/(2 p s),
// with kappa = (p-1)^{-1/(p-1)}, b = (p-1)^2/(4p), a = kappa/(2p).
// f solves the stationary profile ODE  -(z/2) f' - f/(p-1) + f^p = 0, and the
// 1/s correction is tuned so the generator residual of phi is O(1/s^2) on the
// relevant modes (the cancellation a = 2 b kappa/(p-1)^2 is exact).
//
// Also here: the final-space profile ustar(r) = [ (b/2) r^2/|log r| ]^{-1/(p-1)}
// valid as r -> 0 (r = distance to the ring), and the intermediate-region
// profile U_K(tau) = kappa ((1-tau) + (p-1)K^2/(4p))^{-1/(p-1)}, the solution
// of dv/dtau = v^p matched to f(K) at tau = 0 (so U_K(0) = f(K) identically).
#pragma once

#include <cmath>
#include <stdexcept>

namespace ringblow {

struct ModelParams {
    double p = 3.0;   // nonlinearity exponent, > 1
    int d = 2;        // space dimension, >= 2
    double r_max = 1.0;  // target ring radius (fixed to 1 by scaling)

    void validate() const {
        if (!(p > 1.0)) throw std::invalid_argument("ModelParams: p must be > 1");
        if (d < 2) throw std::invalid_argument("ModelParams: d must be >= 2");
        if (!(r_max > 0.0)) throw std::invalid_argument("ModelParams: r_max must be > 0");
    }
};

struct ProfileConstants {
    double kappa;  // (p-1)^{-1/(p-1)}
    double b;      // (p-1)^2 / (4p)
    double a;      // kappa / (2p)

    explicit ProfileConstants(double p)
        : kappa(std::pow(p - 1.0, -1.0 / (p - 1.0))),
          b((p - 1.0) * (p - 1.0) / (4.0 * p)),
          a(kappa / (2.0 * p)) {}
};

inline double kappa_const(double p) { return std::pow(p - 1.0, -1.0 / (p - 1.0)); }

// sign(u) |u|^p, the odd extension of the power nonlinearity.
inline double signed_pow(double u, double p) {
    return std::copysign(std::pow(std::fabs(u), p), u);
}

// f(z) = (p-1 + b z^2)^{-1/(p-1)}
inline double profile_f(double z, const ModelParams& mp) {
    ProfileConstants c(mp.p);
    return std::pow(mp.p - 1.0 + c.b * z * z, -1.0 / (mp.p - 1.0));
}

// f'(z) = -(2 b z / (p-1)) (p-1 + b z^2)^{-1/(p-1) - 1}
inline double profile_f_dz(double z, const ModelParams& mp) {
    ProfileConstants c(mp.p);
    double base = mp.p - 1.0 + c.b * z * z;
    return -(2.0 * c.b * z / (mp.p - 1.0)) * std::pow(base, -1.0 / (mp.p - 1.0) - 1.0);
}

// f''(z) via direct differentiation of f'.
inline double profile_f_dzz(double z, const ModelParams& mp) {
    ProfileConstants c(mp.p);
    double base = mp.p - 1.0 + c.b * z * z;
    double e = -1.0 / (mp.p - 1.0);
    // f'' = -(2b/(p-1)) [ base^{e-1} + z (e-1) base^{e-2} 2 b z ]
    return -(2.0 * c.b / (mp.p - 1.0))
           * (std::pow(base, e - 1.0) + 2.0 * c.b * z * z * (e - 1.0) * std::pow(base, e - 2.0));
}

// phi(y,s) = f(y/sqrt(s)) + kappa/(2 p s)
inline double profile_phi(double y, double s, const ModelParams& mp) {
    if (!(s > 0.0)) throw std::invalid_argument("profile_phi: s must be > 0");
    ProfileConstants c(mp.p);
    return profile_f(y / std::sqrt(s), mp) + c.kappa / (2.0 * mp.p * s);
}

// V(y,s) = p phi^{p-1} - p/(p-1); 2 s V(0,s) -> 1 as s -> infinity.
inline double potential_V(double y, double s, const ModelParams& mp) {
    if (!(s > 0.0)) throw std::invalid_argument("potential_V: s must be > 0");
    double ph = profile_phi(y, s, mp);
    return mp.p * std::pow(std::fabs(ph), mp.p - 1.0) - mp.p / (mp.p - 1.0);
}

// Generator residual of phi:
//   R(y,s) = d_yy phi - (y/2) d_y phi - phi/(p-1) + phi^p - d_s phi.
// Reduced with the profile ODE of f (z = y/sqrt(s)):
//   R = f''(z)/s + (z/(2s)) f'(z) + a/s^2 - a/((p-1) s) + (phi^p - f^p),
// which avoids the O(1) cancellation of the raw definition.
inline double profile_residual_R(double y, double s, const ModelParams& mp) {
    if (!(s > 0.0)) throw std::invalid_argument("profile_residual_R: s must be > 0");
    ProfileConstants c(mp.p);
    double z = y / std::sqrt(s);
    double f = profile_f(z, mp);
    double ph = f + c.a / s;
    double fp = std::pow(f, mp.p);
    double php = signed_pow(ph, mp.p);
    return profile_f_dzz(z, mp) / s + 0.5 * z * profile_f_dz(z, mp) / s
         + c.a / (s * s) - c.a / ((mp.p - 1.0) * s) + (php - fp);
}

// Quadratic remainder of the nonlinearity around phi:
//   B(q) = |phi+q|^{p-1}(phi+q) - phi^p - p phi^{p-1} q.
inline double nonlinear_remainder_B(double q, double phi_val, const ModelParams& mp) {
    return signed_pow(phi_val + q, mp.p) - signed_pow(phi_val, mp.p)
         - mp.p * std::pow(std::fabs(phi_val), mp.p - 1.0) * q;
}

// Final-space profile near the ring: ustar(r) = [ (b/2) r^2 / |log r| ]^{-1/(p-1)},
// r = distance to the ring, 0 < r < 1.
inline double final_profile_ustar(double r, const ModelParams& mp) {
    if (!(r > 0.0) || !(r < 1.0))
        throw std::invalid_argument("final_profile_ustar: need 0 < r < 1");
    ProfileConstants c(mp.p);
    double arg = 0.5 * c.b * r * r / std::fabs(std::log(r));
    return std::pow(arg, -1.0 / (mp.p - 1.0));
}

// Intermediate profile U_K(tau) = kappa ((1-tau) + (p-1)K^2/(4p))^{-1/(p-1)};
// satisfies U_K(0) = f(K) exactly (since kappa^{p-1} = 1/(p-1)) and solves the
// flat blow-up ODE dU/dtau = U^p in the rescaled time of the intermediate region.
inline double intermediate_profile_UK(double tau, double K, const ModelParams& mp) {
    double base = (1.0 - tau) + (mp.p - 1.0) * K * K / (4.0 * mp.p);
    if (!(base > 0.0))
        throw std::invalid_argument("intermediate_profile_UK: nonpositive base");
    ProfileConstants c(mp.p);
    return c.kappa * std::pow(base, -1.0 / (mp.p - 1.0));
}

}  // namespace ringblow
