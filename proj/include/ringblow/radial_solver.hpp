// Time integration of  u_t = u_rr + ((d-1)/r) u_r + |u|^{p-1} u  on [0, R_out].
//
// Scheme: Strang splitting per step,
//   half reaction -> full diffusion -> half reaction,
// where the reaction substep uses the exact flow of u' = |u|^{p-1} u,
//   |u| <- (|u|^{1-p} - (p-1) tau)^{-1/(p-1)},
// and the diffusion substep is TR-BDF2 (trapezoidal stage to gamma*dt with
// gamma = 2 - sqrt(2), then BDF2 closure; L-stable, second order), each stage a
// tridiagonal solve on the nonuniform grid. The radial term uses 3-point
// second-order stencils; at r = 0 symmetry turns the operator into d * u_rr
// with the even-extension stencil 2(u_1 - u_0)/h^2.
//
// Step size: dt = min(c_nl * sup|u|^{1-p}, dt_max). On a blow-up trajectory
// sup|u| ~ kappa (T-t)^{-1/(p-1)}, so this is a *fixed step in self-similar
// time*, ds ~ c_nl (p-1) kappa^{1-p}: the integrator takes O(1/ds) steps per
// unit of s regardless of how close to T it is, and for spatially constant
// data (diffusion idle) the trajectory is reproduced to machine precision.
//
// Blow-up bookkeeping: the (t, sup|u|, refined argmax) series feeds
// estimate_T, a least-squares fit of sup|u|^{-(p-1)} vs t over the last decade
// of growth (exactly linear on the self-similar asymptotics), evaluated in
// long double around the last sample to dodge cancellation at T - t ~ 1e-16.
#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "ringblow/core_model.hpp"
#include "ringblow/radial_grid.hpp"

namespace ringblow {

struct RadialField {
    std::shared_ptr<const RadialGrid> grid;
    std::vector<double> u;
    double t = 0.0;
    ModelParams params;

    double sup_abs() const {
        double m = 0.0;
        for (double v : u) m = std::max(m, std::fabs(v));
        return m;
    }
    std::size_t argmax_abs() const {
        std::size_t k = 0;
        for (std::size_t i = 1; i < u.size(); ++i)
            if (std::fabs(u[i]) > std::fabs(u[k])) k = i;
        return k;
    }
};

enum class OuterBC { dirichlet, neumann };

struct SolverOptions {
    double m_stop = 1e8;       // blow-up detection threshold on sup|u|
    double c_nl = 5e-3;        // nonlinear step control: dt = c_nl * sup|u|^{1-p}
    double dt_max = 1e-2;
    double t_max = 10.0;       // physical-time budget
    long max_steps = 4000000;
    OuterBC outer_bc = OuterBC::dirichlet;
    bool nonlinearity = true;  // false: pure (radial) heat flow, for oracles
    // Prescribed blow-up time (0 = none). When set, s = -log(T-t) bookkeeping
    // is exact, snapshots fire at the s-cadence, and the run stops once
    // sqrt(T-t) < guard_factor * (near-ring spacing) or s >= s_max.
    double T_prescribed = 0.0;
    double s_max = 0.0;
    double guard_factor = 4.0;
    bool snapshots = false;
    double snapshot_ds = 0.05;
};

struct SeriesPoint {
    double t = 0.0;
    double sup_u = 0.0;
    double r_argmax = 0.0;
};

struct FieldSnapshot {
    double t = 0.0;
    double s = 0.0;  // -log(T-t) when T is prescribed, else a sup-ratio proxy
    std::vector<double> u;
};

struct BlowupReport {
    double T_est = std::numeric_limits<double>::quiet_NaN();
    double r_blow = std::numeric_limits<double>::quiet_NaN();
    std::vector<SeriesPoint> series;
    std::string stop_reason;  // threshold-hit | max-steps | no-blowup |
                              // resolution-guard | s-horizon
    long step_count = 0;
    double min_value_seen = 0.0;  // positivity witness
    std::vector<FieldSnapshot> snapshots;
    std::vector<double> u_final;  // profile at the stopping step
    double t_final = 0.0;
};

struct IntegrationDivergedError : std::runtime_error {
    RadialField last_good;
    explicit IntegrationDivergedError(RadialField f)
        : std::runtime_error("integration diverged: non-finite values at t = "
                             + std::to_string(f.t)),
          last_good(std::move(f)) {}
};

struct FitUnreliableError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

// Thomas algorithm; the assembled systems are irreducibly diagonally dominant.
inline void solve_tridiag(std::vector<double>& dl, std::vector<double>& d,
                          std::vector<double>& du, std::vector<double>& x) {
    const std::size_t n = d.size();
    for (std::size_t i = 1; i < n; ++i) {
        double m = dl[i] / d[i - 1];
        d[i] -= m * du[i - 1];
        x[i] -= m * x[i - 1];
    }
    x[n - 1] /= d[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) x[i] = (x[i] - du[i] * x[i + 1]) / d[i];
}

// Row i of the spatial operator A u = u_rr + ((d-1)/r) u_r as (lower, diag, upper).
struct OpRow {
    double lo, di, up;
};

inline std::vector<OpRow> build_operator(const RadialGrid& g, int dim, OuterBC bc) {
    const std::size_t n = g.r.size();
    std::vector<OpRow> rows(n);
    {  // origin: symmetry => A u = dim * u_rr, even extension
        double h = g.r[1] - g.r[0];
        rows[0] = {0.0, -2.0 * dim / (h * h), 2.0 * dim / (h * h)};
    }
    for (std::size_t i = 1; i + 1 < n; ++i) {
        double hm = g.r[i] - g.r[i - 1];
        double hp = g.r[i + 1] - g.r[i];
        double lo2 = 2.0 / (hm * (hm + hp));
        double up2 = 2.0 / (hp * (hm + hp));
        double lo1 = -hp / (hm * (hm + hp));
        double up1 = hm / (hp * (hm + hp));
        double mi1 = (hp - hm) / (hm * hp);
        double drift = (dim - 1) / g.r[i];
        rows[i] = {lo2 + drift * lo1, -(lo2 + up2) + drift * mi1, up2 + drift * up1};
    }
    {  // outer boundary
        std::size_t m = n - 1;
        double h = g.r[m] - g.r[m - 1];
        if (bc == OuterBC::neumann)
            rows[m] = {2.0 / (h * h), -2.0 / (h * h), 0.0};  // even extension, u_r = 0
        else
            rows[m] = {0.0, 0.0, 0.0};  // Dirichlet: value pinned by the stages below
    }
    return rows;
}

// One implicit stage: solve (I - c*dt*A) out = rhs, Dirichlet rows pinned to 0.
inline void implicit_stage(const std::vector<OpRow>& rows, OuterBC bc, double cdt,
                           const std::vector<double>& rhs, std::vector<double>& out) {
    const std::size_t n = rows.size();
    std::vector<double> dl(n), d(n), du(n);
    out = rhs;
    for (std::size_t i = 0; i < n; ++i) {
        dl[i] = -cdt * rows[i].lo;
        d[i] = 1.0 - cdt * rows[i].di;
        du[i] = -cdt * rows[i].up;
    }
    if (bc == OuterBC::dirichlet) {
        dl[n - 1] = 0.0;
        d[n - 1] = 1.0;
        du[n - 1] = 0.0;
        out[n - 1] = 0.0;
    }
    solve_tridiag(dl, d, du, out);
}

inline void apply_operator(const std::vector<OpRow>& rows, const std::vector<double>& u,
                           std::vector<double>& out) {
    const std::size_t n = rows.size();
    out.resize(n);
    out[0] = rows[0].di * u[0] + rows[0].up * u[1];
    for (std::size_t i = 1; i + 1 < n; ++i)
        out[i] = rows[i].lo * u[i - 1] + rows[i].di * u[i] + rows[i].up * u[i + 1];
    out[n - 1] = rows[n - 1].lo * u[n - 2] + rows[n - 1].di * u[n - 1];
}

// Exact flow of u' = |u|^{p-1} u over time tau. Returns false on finite-time
// blow-up inside the substep.
inline bool reaction_exact(std::vector<double>& u, double p, double tau) {
    const double pm1 = p - 1.0;
    for (double& v : u) {
        if (v == 0.0) continue;
        double base = std::pow(std::fabs(v), -pm1) - pm1 * tau;
        if (!(base > 0.0)) return false;
        v = std::copysign(std::pow(base, -1.0 / pm1), v);
    }
    return true;
}

}  // namespace detail

// One Strang step of size dt (reaction dt/2, TR-BDF2 diffusion dt, reaction dt/2).
inline RadialField step(const RadialField& field, double dt, const SolverOptions& opt) {
    if (!(dt > 0.0)) throw std::invalid_argument("step: dt must be > 0");
    RadialField f = field;
    const double p = f.params.p;
    auto rows = detail::build_operator(*f.grid, f.params.d, opt.outer_bc);

    if (opt.nonlinearity && !detail::reaction_exact(f.u, p, 0.5 * dt))
        throw IntegrationDivergedError(field);

    // TR-BDF2, gamma = 2 - sqrt(2)
    const double gamma = 2.0 - std::sqrt(2.0);
    std::vector<double> Au, rhs(f.u.size()), mid, next;
    detail::apply_operator(rows, f.u, Au);
    for (std::size_t i = 0; i < f.u.size(); ++i)
        rhs[i] = f.u[i] + 0.5 * gamma * dt * Au[i];
    detail::implicit_stage(rows, opt.outer_bc, 0.5 * gamma * dt, rhs, mid);
    const double c1 = 1.0 / (gamma * (2.0 - gamma));
    const double c2 = (1.0 - gamma) * (1.0 - gamma) / (gamma * (2.0 - gamma));
    for (std::size_t i = 0; i < f.u.size(); ++i) rhs[i] = c1 * mid[i] - c2 * f.u[i];
    detail::implicit_stage(rows, opt.outer_bc, (1.0 - gamma) / (2.0 - gamma) * dt, rhs, next);
    f.u = std::move(next);

    if (opt.nonlinearity && !detail::reaction_exact(f.u, p, 0.5 * dt))
        throw IntegrationDivergedError(field);

    for (double v : f.u)
        if (!std::isfinite(v)) throw IntegrationDivergedError(field);
    f.t = field.t + dt;
    return f;
}

// Least-squares t-intercept of sup|u|^{-(p-1)} (long double, centered on the
// last sample). Requires >= 5 samples over the last decade of growth and a
// monotone growing tail.
inline double estimate_T(const std::vector<SeriesPoint>& series, const ModelParams& mp) {
    if (series.size() < 5) throw FitUnreliableError("estimate_T: need >= 5 samples");
    double sup_max = 0.0;
    for (const auto& sp : series) sup_max = std::max(sup_max, sp.sup_u);
    if (!(sup_max > 0.0)) throw FitUnreliableError("estimate_T: flat zero series");
    std::vector<const SeriesPoint*> win;
    for (const auto& sp : series)
        if (sp.sup_u >= 0.1 * sup_max) win.push_back(&sp);
    if (win.size() < 5) throw FitUnreliableError("estimate_T: fewer than 5 samples in the last decade");
    for (std::size_t i = 1; i < win.size(); ++i)
        if (win[i]->sup_u < win[i - 1]->sup_u * (1.0 - 1e-12))
            throw FitUnreliableError("estimate_T: non-monotone tail");
    const long double t_ref = win.back()->t;
    const long double pm1 = mp.p - 1.0;
    long double sx = 0, sy = 0, sxx = 0, sxy = 0, n = 0;
    for (const auto* sp : win) {
        long double x = static_cast<long double>(sp->t) - t_ref;
        long double y = std::pow(static_cast<long double>(sp->sup_u), -pm1);
        sx += x; sy += y; sxx += x * x; sxy += x * y; n += 1;
    }
    long double det = n * sxx - sx * sx;
    if (det == 0.0L) throw FitUnreliableError("estimate_T: degenerate fit");
    long double beta = (n * sxy - sx * sy) / det;
    long double alpha = (sy - beta * sx) / n;
    if (!(beta < 0.0L)) throw FitUnreliableError("estimate_T: sup norm not growing");
    long double T = t_ref - alpha / beta;
    if (!(T > win.back()->t))
        throw FitUnreliableError("estimate_T: intercept not beyond the data");
    return static_cast<double>(T);
}

inline BlowupReport run_until_blowup(const RadialField& u0, const SolverOptions& opt) {
    BlowupReport rep;
    RadialField f = u0;
    const double pm1 = f.params.p - 1.0;
    const double sup0 = f.sup_abs();
    long double t_acc = f.t;
    const double h_near = f.grid->min_spacing();
    double next_snapshot_s = -std::numeric_limits<double>::infinity();
    const double kappa = kappa_const(f.params.p);

    auto record = [&](const RadialField& g) {
        std::size_t k = g.argmax_abs();
        rep.series.push_back({g.t, g.sup_abs(), refine_argmax(g.grid->r, g.u, k)});
        double mn = g.u.empty() ? 0.0 : g.u[0];
        for (double v : g.u) mn = std::min(mn, v);
        rep.min_value_seen = std::min(rep.min_value_seen, mn);
    };
    auto s_of = [&](const RadialField& g) -> double {
        if (opt.T_prescribed > 0.0) {
            double rem = opt.T_prescribed - g.t;
            return rem > 0.0 ? -std::log(rem) : std::numeric_limits<double>::infinity();
        }
        double sup = g.sup_abs();  // sup-ratio proxy when T is unknown
        return sup > kappa ? pm1 * std::log(sup / kappa)
                           : -std::numeric_limits<double>::infinity();
    };
    auto snap = [&](const RadialField& g) {
        if (!opt.snapshots) return;
        double s = s_of(g);
        if (!std::isfinite(s)) return;
        if (s >= next_snapshot_s) {
            rep.snapshots.push_back({g.t, s, g.u});
            if (next_snapshot_s == -std::numeric_limits<double>::infinity())
                next_snapshot_s = s + opt.snapshot_ds;
            else
                while (next_snapshot_s <= s) next_snapshot_s += opt.snapshot_ds;
        }
    };

    record(f);
    snap(f);
    rep.stop_reason = "max-steps";
    while (rep.step_count < opt.max_steps) {
        double sup = f.sup_abs();
        if (sup >= opt.m_stop) {
            rep.stop_reason = "threshold-hit";
            break;
        }
        if (opt.T_prescribed > 0.0) {
            double rem = opt.T_prescribed - f.t;
            if (rem <= 0.0 || std::sqrt(rem) < opt.guard_factor * h_near) {
                rep.stop_reason = "resolution-guard";
                break;
            }
            if (opt.s_max > 0.0 && -std::log(rem) >= opt.s_max) {
                rep.stop_reason = "s-horizon";
                break;
            }
        }
        if (f.t >= opt.t_max) {
            rep.stop_reason = (sup <= 2.0 * sup0 + 1e-300) ? "no-blowup" : "max-steps";
            break;
        }
        double dt = opt.dt_max;
        if (opt.nonlinearity && sup > 0.0)
            dt = std::min(dt, opt.c_nl * std::pow(sup, -pm1));
        if (opt.T_prescribed > 0.0)  // never step past the prescribed time
            dt = std::min(dt, 0.5 * (opt.T_prescribed - f.t));
        f = step(f, dt, opt);
        t_acc += static_cast<long double>(dt);  // compensated t bookkeeping
        f.t = static_cast<double>(t_acc);
        record(f);
        snap(f);
        ++rep.step_count;
    }
    if (rep.stop_reason == "max-steps" && f.sup_abs() <= 2.0 * sup0 + 1e-300)
        rep.stop_reason = "no-blowup";

    std::size_t k = f.argmax_abs();
    rep.r_blow = refine_argmax(f.grid->r, f.u, k);
    rep.u_final = f.u;
    rep.t_final = f.t;
    if (rep.stop_reason == "threshold-hit" || rep.stop_reason == "resolution-guard" ||
        rep.stop_reason == "s-horizon") {
        try {
            rep.T_est = estimate_T(rep.series, f.params);
        } catch (const FitUnreliableError&) {
            rep.T_est = std::numeric_limits<double>::quiet_NaN();
        }
    }
    return rep;
}

}  // namespace ringblow
