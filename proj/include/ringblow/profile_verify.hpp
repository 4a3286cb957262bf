// Post-run diagnostics on a blow-up simulation, all phrased around the three
// nested space-time regions of a ring blow-up at r = c with time T:
//
//   inner (self-similar):  ||x|-c| <= R sqrt((T-t)|log(T-t)|).  Here the
//       rescaled solution (T-t)^{1/(p-1)} u approaches the universal shape
//       f(z), z = (|x|-c)/sqrt((T-t)|log(T-t)|); we track the sup deviation
//       D(s) per snapshot and fit its decay D(s) ~ c s^{-alpha}.
//   intermediate (frozen ODE):  between eps0/8 and the shrinking parabolic-log
//       scale.  Once that scale has passed a point x (time t0(x)), u(x,t)
//       follows the flat blow-up ODE started from the matching value, i.e.
//       u(x,t)/ustar(x) tracks U_K(tau)/U_K(1), tau = (t-t0)/(T-t0).
//   outer/final:  beyond the parabolic-log scale the solution has frozen and
//       u(., t) approaches the final profile ustar(|x|-c).
//
// Also here: the global bound sup|W| <= kappa + 2 on the self-similar
// amplitude, and pointwise non-blow-up witnesses (scaled sup on a parabolic
// cylinder below a threshold certifies that its center is not a blow-up
// point).  All operations take T explicitly: for traps it is the prescribed
// blow-up time, for final-profile diagnostics the fitted estimate.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ringblow/core_model.hpp"
#include "ringblow/interp.hpp"
#include "ringblow/radial_grid.hpp"
#include "ringblow/radial_solver.hpp"
#include "ringblow/selfsim_frame.hpp"

namespace ringblow {

namespace detail {

// Least-squares line y ~ a + b x. Returns {a, b}.
inline std::pair<double, double> fit_line(const std::vector<double>& x,
                                          const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("fit_line: need >= 2 aligned points");
    const double n = static_cast<double>(x.size());
    double sx = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (!(sxx > 0.0)) throw std::invalid_argument("fit_line: degenerate abscissae");
    const double b = sxy / sxx;
    return {my - b * mx, b};
}

}  // namespace detail

// Snapshots taken while the self-similar length sqrt(T-t) is still at least
// `cells` near-ring cells wide -- the part of the run where the scheme
// resolves the collapsing structure. Diagnostics should be fed these.
inline std::vector<FieldSnapshot> resolved_snapshots(const std::vector<FieldSnapshot>& snaps,
                                                     double T, double h_min,
                                                     double cells = 4.0) {
    if (!(T > 0.0) || !(h_min > 0.0))
        throw std::invalid_argument("resolved_snapshots: need T > 0 and h_min > 0");
    const double cut = cells * h_min;  // keep sqrt(T - t) >= cut
    std::vector<FieldSnapshot> out;
    for (const auto& sn : snaps)
        if (sn.t < T && std::sqrt(T - sn.t) >= cut) out.push_back(sn);
    return out;
}

struct ProfileFitReport {
    std::vector<double> s_values;     // -log(T - t) per usable snapshot
    std::vector<double> deviation;    // D(s): sup over the inner window
    std::vector<double> ring_center;  // refined argmax per snapshot
    std::vector<double> w_sup;        // global sup of (T-t)^{1/(p-1)}|u|
    double alpha = std::numeric_limits<double>::quiet_NaN();      // D ~ fit_scale s^-alpha
    double fit_scale = std::numeric_limits<double>::quiet_NaN();
    double fit_s_lo = 0.0, fit_s_hi = 0.0;  // realized s-range of the fit
    bool fit_valid = false;
};

// D(s) = sup { |(T-t)^{1/(p-1)} u(x,t) - f(z)| : ||x|-c(t)| <= R ell(t) },
// ell = sqrt((T-t)|log(T-t)|), z the window coordinate, c(t) the refined
// per-snapshot ring center. The decay exponent is fitted over the trailing
// `fit_window` units of s on the snapshots with D > 0.
inline ProfileFitReport profile_deviation(const std::shared_ptr<const RadialGrid>& grid,
                                          const std::vector<FieldSnapshot>& snapshots,
                                          double T, const ModelParams& mp,
                                          double R = 2.0, double fit_window = 10.0) {
    if (!grid) throw std::invalid_argument("profile_deviation: null grid");
    if (!(R > 0.0) || !(fit_window > 0.0))
        throw std::invalid_argument("profile_deviation: need R > 0 and fit_window > 0");
    mp.validate();
    const double pm1 = mp.p - 1.0;
    const std::vector<double>& r = grid->r;

    ProfileFitReport rep;
    for (const auto& sn : snapshots) {
        if (!(sn.t < T)) continue;
        const double rem = T - sn.t;
        const double s = -std::log(rem);
        if (!(s > 1.0)) continue;  // need a positive log factor and rem < 1/e
        if (sn.u.size() != r.size())
            throw std::invalid_argument("profile_deviation: snapshot/grid size mismatch");

        std::size_t k = 0;
        for (std::size_t i = 1; i < sn.u.size(); ++i)
            if (std::fabs(sn.u[i]) > std::fabs(sn.u[k])) k = i;
        const double c = refine_argmax(r, sn.u, k);

        const double ell = std::sqrt(rem * s);
        const double amp = std::pow(rem, 1.0 / pm1);
        double dev = 0.0;
        std::size_t inside = 0;
        for (std::size_t i = 0; i < r.size(); ++i) {
            const double dx = r[i] - c;
            if (std::fabs(dx) > R * ell) continue;
            ++inside;
            const double d = std::fabs(amp * sn.u[i] - profile_f(dx / ell, mp));
            dev = std::max(dev, d);
        }
        if (inside < 3) continue;  // window below grid resolution: not usable

        double wsup = 0.0;
        for (double v : sn.u) wsup = std::max(wsup, std::fabs(v));
        rep.s_values.push_back(s);
        rep.deviation.push_back(dev);
        rep.ring_center.push_back(c);
        rep.w_sup.push_back(amp * wsup);
    }
    if (rep.s_values.size() < 5)
        throw std::runtime_error("profile_deviation: insufficient data (need at least 5 usable "
                                 "snapshots, got " + std::to_string(rep.s_values.size()) + ")");

    const double s_hi = rep.s_values.back();
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < rep.s_values.size(); ++i) {
        if (rep.s_values[i] < s_hi - fit_window) continue;
        if (!(rep.deviation[i] > 0.0)) continue;
        lx.push_back(std::log(rep.s_values[i]));
        ly.push_back(std::log(rep.deviation[i]));
    }
    if (lx.size() >= 5) {
        auto [a, b] = detail::fit_line(lx, ly);
        rep.alpha = -b;
        rep.fit_scale = std::exp(a);
        rep.fit_s_lo = std::exp(lx.front());
        rep.fit_s_hi = std::exp(lx.back());
        rep.fit_valid = true;
    }
    return rep;
}

struct RatioCurve {
    std::vector<double> offset;  // ||x| - c| at the sampled nodes (grid order)
    std::vector<double> ratio;   // u / ustar(offset)
    double max_dev = 0.0;        // max |ratio - 1|
    double window_lo = 0.0, window_hi = 0.0;
};

// Final-time profile against the ring asymptote: u(., t_last)/ustar(||x|-c|)
// over lo <= ||x|-c| <= hi. The default inner edge is the parabolic-log scale
// K sqrt((T-t_last)|log(T-t_last)|): closer in, the solution is still
// self-similar and the ratio is below 1 by construction, not by error.
inline RatioCurve ustar_check(const std::shared_ptr<const RadialGrid>& grid,
                              const std::vector<double>& u_last, double t_last,
                              double T, double r_blow, const ModelParams& mp,
                              double window_lo = 0.0,  // <= 0: parabolic-log default
                              double window_hi = 0.2, double K = 5.0) {
    if (!grid) throw std::invalid_argument("ustar_check: null grid");
    if (grid->r.size() != u_last.size())
        throw std::invalid_argument("ustar_check: profile/grid size mismatch");
    if (!(t_last < T)) throw std::invalid_argument("ustar_check: need t_last < T");
    if (!(window_hi > 0.0) || !(window_hi < 1.0))
        throw std::invalid_argument("ustar_check: need 0 < window_hi < 1 (asymptote domain)");
    mp.validate();

    const double rem = T - t_last;
    double lo = window_lo;
    if (!(lo > 0.0)) lo = K * std::sqrt(rem * std::fabs(std::log(rem)));
    if (!(lo < window_hi))
        throw std::runtime_error("ustar_check: empty sampling window (inner edge " +
                                 std::to_string(lo) + " >= outer edge " +
                                 std::to_string(window_hi) + ")");

    RatioCurve out;
    out.window_lo = lo;
    out.window_hi = window_hi;
    for (std::size_t i = 0; i < grid->r.size(); ++i) {
        const double rho = std::fabs(grid->r[i] - r_blow);
        if (rho < lo || rho > window_hi) continue;
        const double ratio = u_last[i] / final_profile_ustar(rho, mp);
        out.offset.push_back(rho);
        out.ratio.push_back(ratio);
        out.max_dev = std::max(out.max_dev, std::fabs(ratio - 1.0));
    }
    if (out.offset.empty())
        throw std::runtime_error("ustar_check: no grid nodes inside the sampling window");
    return out;
}

struct GlobalBoundReport {
    std::vector<double> s_values;
    std::vector<double> w_sup;      // sup |W(., s)| per frame
    double w_sup_max = 0.0;
    double s_at_max = 0.0;
    std::vector<double> flagged_s;  // frames with sup |W| > kappa + 2
    bool ok = true;
};

namespace detail {

inline void global_bound_push(GlobalBoundReport& rep, double s, double wsup, double kappa) {
    rep.s_values.push_back(s);
    rep.w_sup.push_back(wsup);
    if (wsup > rep.w_sup_max || rep.s_values.size() == 1) {
        rep.w_sup_max = wsup;
        rep.s_at_max = s;
    }
    if (wsup > kappa + 2.0) {
        rep.flagged_s.push_back(s);
        rep.ok = false;
    }
}

}  // namespace detail

// Running max of the self-similar amplitude sup|W(.,s)|, flagging any frame
// above kappa + 2 (the global bound an in-trap trajectory must respect).
inline GlobalBoundReport global_bound_check(const std::vector<SelfSimilarFrame>& frames) {
    GlobalBoundReport rep;
    for (const auto& fr : frames) {
        double wsup = 0.0;
        for (double v : fr.W) wsup = std::max(wsup, std::fabs(v));
        detail::global_bound_push(rep, fr.s, wsup, kappa_const(fr.params.p));
    }
    return rep;
}

// Same check taken directly on physical snapshots: sup|W| = (T-t)^{1/(p-1)} sup|u|.
inline GlobalBoundReport global_bound_check(const std::vector<FieldSnapshot>& snapshots,
                                            double T, const ModelParams& mp) {
    mp.validate();
    GlobalBoundReport rep;
    const double kappa = kappa_const(mp.p);
    for (const auto& sn : snapshots) {
        if (!(sn.t < T)) continue;
        const double amp = std::pow(T - sn.t, 1.0 / (mp.p - 1.0));
        double usup = 0.0;
        for (double v : sn.u) usup = std::max(usup, std::fabs(v));
        detail::global_bound_push(rep, -std::log(T - sn.t), amp * usup, kappa);
    }
    return rep;
}

struct RegionSup {
    double radius = 0.0;
    double sup_run = 0.0;    // max |u| over every snapshot, nodes r <= radius
    double sup_final = 0.0;  // same region, last snapshot only
    std::size_t nodes = 0;   // grid nodes inside the region
};

// Sup of |u| over the centered ball r <= radius, across a snapshot series and
// at its final entry.
inline RegionSup region_sup(const std::shared_ptr<const RadialGrid>& grid,
                            const std::vector<FieldSnapshot>& snapshots, double radius) {
    if (!grid) throw std::invalid_argument("region_sup: null grid");
    if (!(radius > 0.0)) throw std::invalid_argument("region_sup: need radius > 0");
    if (snapshots.empty()) throw std::invalid_argument("region_sup: empty snapshot series");
    RegionSup out;
    out.radius = radius;
    std::size_t n = 0;
    while (n < grid->r.size() && grid->r[n] <= radius) ++n;
    out.nodes = n;
    for (const auto& sn : snapshots) {
        if (sn.u.size() != grid->r.size())
            throw std::invalid_argument("region_sup: snapshot/grid size mismatch");
        double m = 0.0;
        for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::fabs(sn.u[i]));
        out.sup_run = std::max(out.sup_run, m);
        out.sup_final = m;  // last assignment wins
    }
    return out;
}

// Scaled-amplitude threshold below which a parabolic cylinder certifies its
// center as a regular (non-blow-up) point. Half the flat blow-up constant:
// an actual blow-up point has (T-t)^{1/(p-1)}|u| -> kappa, safely above.
inline double nonblowup_threshold(const ModelParams& mp) { return 0.5 * kappa_const(mp.p); }

struct PointWitnessReport {
    bool ok = false;          // scaled sup stayed below the threshold
    double max_scaled = 0.0;  // max of (T-t)^{1/(p-1)} |u| over the cylinder
    double threshold = 0.0;
    double ball_radius = 0.0;  // effective radius (possibly clamped)
    double t_lo = 0.0;         // start of the time window
    std::size_t samples = 0;
};

// Witness that x = a is not a blow-up point: (T-t)^{1/(p-1)}|u| stays below
// the threshold on B(a, R) x [T - R^2, t_last]. R is clamped so the time
// window starts inside the recorded data (set clamp_window = false to get an
// error instead). |u| is sampled at the nodes inside the ball and, so that
// balls smaller than the local spacing still see the field, at r = a itself.
inline PointWitnessReport nonblowup_threshold_check(
        const std::shared_ptr<const RadialGrid>& grid,
        const std::vector<FieldSnapshot>& snapshots, double T, double a, double R_ball,
        const ModelParams& mp, double eta_threshold = -1.0, bool clamp_window = true) {
    if (!grid) throw std::invalid_argument("nonblowup_threshold_check: null grid");
    if (snapshots.empty())
        throw std::invalid_argument("nonblowup_threshold_check: empty snapshot series");
    if (!(a >= 0.0) || !(R_ball > 0.0))
        throw std::invalid_argument("nonblowup_threshold_check: need a >= 0 and R > 0");
    mp.validate();

    const double t_first = snapshots.front().t;
    if (!(t_first < T))
        throw std::invalid_argument("nonblowup_threshold_check: first snapshot at or past T");
    double R = R_ball;
    if (clamp_window) {
        R = std::min(R, std::sqrt(T - t_first));
    } else if (T - R * R < t_first) {
        throw std::runtime_error(
            "nonblowup_threshold_check: time window starts before the recorded data");
    }

    PointWitnessReport rep;
    rep.threshold = eta_threshold > 0.0 ? eta_threshold : nonblowup_threshold(mp);
    rep.ball_radius = R;
    rep.t_lo = T - R * R;
    const double pm1 = mp.p - 1.0;
    for (const auto& sn : snapshots) {
        if (sn.t < rep.t_lo || !(sn.t < T)) continue;
        if (sn.u.size() != grid->r.size())
            throw std::invalid_argument("nonblowup_threshold_check: snapshot/grid size mismatch");
        const double amp = std::pow(T - sn.t, 1.0 / pm1);
        for (std::size_t i = 0; i < grid->r.size(); ++i) {
            if (std::fabs(grid->r[i] - a) > R) continue;
            rep.max_scaled = std::max(rep.max_scaled, amp * std::fabs(sn.u[i]));
            ++rep.samples;
        }
        if (a >= grid->r.front() && a <= grid->r.back()) {
            rep.max_scaled =
                std::max(rep.max_scaled, amp * std::fabs(interp_linear(grid->r, sn.u, a)));
            ++rep.samples;
        }
    }
    rep.ok = rep.samples > 0 && rep.max_scaled <= rep.threshold;
    return rep;
}

// Time at which the parabolic-log scale K sqrt((T-t)|log(T-t)|) has shrunk to
// rho: after it, the point at distance rho from the ring is outside the
// self-similar core and follows the frozen flat ODE. Bisection; the scale is
// decreasing in t for T - t < 1/e (always true here past the first samples).
inline double flatness_onset_time(double rho, double T, double K, double t_lo = 0.0) {
    if (!(rho > 0.0) || !(T > 0.0) || !(K > 0.0) || !(t_lo < T))
        throw std::invalid_argument("flatness_onset_time: bad arguments");
    auto ell = [&](double t) {
        const double rem = T - t;
        return K * std::sqrt(rem * std::fabs(std::log(rem)));
    };
    if (!(ell(t_lo) >= rho))
        throw std::invalid_argument(
            "flatness_onset_time: rho already outside the scale at the window start");
    double lo = t_lo, hi = T;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (!(mid > lo) || !(mid < hi)) break;
        (ell(mid) >= rho ? lo : hi) = mid;
    }
    return lo;
}

// Calibrated limits for the intermediate-region comparison (ample multiples of
// the maxima observed on the trusted baseline run; the asymptote carries
// 1/|log| corrections that are material at these radii).
inline constexpr double flatness_deviation_limit = 1.0;
inline constexpr double flatness_amplitude_limit = 2.0;

struct FlatnessReport {
    double max_dev = 0.0;      // max |u/ustar - U_K(tau)/U_K(1)|
    double max_ratio = 0.0;    // max |u|/ustar over the same points
    bool amplitude_ok = true;  // max_ratio <= flatness_amplitude_limit
    std::size_t samples = 0;
    double window_lo = 0.0, window_hi = 0.0;  // realized distance window
};

// Frozen-ODE tracking in the intermediate region: for nodes at distance
// rho in [eps0/8, ell(t_first)] from the ring and times past the onset t0(rho),
// compare u/ustar(rho) with U_K(tau)/U_K(1), tau = (t-t0)/(T-t0).
inline FlatnessReport intermediate_flatness_check(
        const std::shared_ptr<const RadialGrid>& grid,
        const std::vector<FieldSnapshot>& snapshots, double T, double r_blow,
        const ModelParams& mp, double K = 5.0, double eps0 = 0.5) {
    if (!grid) throw std::invalid_argument("intermediate_flatness_check: null grid");
    if (snapshots.empty())
        throw std::invalid_argument("intermediate_flatness_check: empty snapshot series");
    if (!(K > 0.0) || !(eps0 > 0.0))
        throw std::invalid_argument("intermediate_flatness_check: need K > 0 and eps0 > 0");
    mp.validate();

    const double t_first = snapshots.front().t;
    if (!(t_first < T))
        throw std::invalid_argument("intermediate_flatness_check: first snapshot at or past T");
    const double rem0 = T - t_first;
    const double lo = eps0 / 8.0;
    const double hi = K * std::sqrt(rem0 * std::fabs(std::log(rem0)));
    if (!(lo <= hi))
        throw std::runtime_error(
            "intermediate_flatness_check: empty window (parabolic-log scale " +
            std::to_string(hi) + " below the inner edge " + std::to_string(lo) + ")");

    struct Node {
        std::size_t idx;
        double rho;
        double t0;
        double ustar;
    };
    std::vector<Node> nodes;
    for (std::size_t i = 0; i < grid->r.size(); ++i) {
        const double rho = std::fabs(grid->r[i] - r_blow);
        if (rho < lo || rho > hi) continue;
        nodes.push_back({i, rho, flatness_onset_time(rho, T, K, t_first),
                         final_profile_ustar(rho, mp)});
    }
    if (nodes.empty())
        throw std::runtime_error("intermediate_flatness_check: no grid nodes in the window");

    FlatnessReport rep;
    rep.window_lo = lo;
    rep.window_hi = hi;
    const double u1 = intermediate_profile_UK(1.0, K, mp);
    for (const auto& sn : snapshots) {
        if (!(sn.t < T)) continue;
        if (sn.u.size() != grid->r.size())
            throw std::invalid_argument(
                "intermediate_flatness_check: snapshot/grid size mismatch");
        for (const auto& nd : nodes) {
            if (sn.t < nd.t0) continue;  // core has not passed this node yet
            const double tau = (sn.t - nd.t0) / (T - nd.t0);
            const double predicted = intermediate_profile_UK(tau, K, mp) / u1;
            const double actual = sn.u[nd.idx] / nd.ustar;
            rep.max_dev = std::max(rep.max_dev, std::fabs(actual - predicted));
            rep.max_ratio = std::max(rep.max_ratio, std::fabs(actual));
            ++rep.samples;
        }
    }
    rep.amplitude_ok = rep.max_ratio <= flatness_amplitude_limit;
    return rep;
}

}  // namespace ringblow
