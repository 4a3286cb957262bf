#pragma once
// Two-parameter shooting around the ring profile. The initial-data family
//
//   u0(r) = T^{-1/(p-1)} [ phi(y, s0) chi(r/eps0)
//                          + (A/s0^2)(d0 + d1 y) chi0(|y| / (K sqrt(s0))) ],
//   y = (r - 1)/sqrt(T),  s0 = -log T,
//
// maps (d0, d1) affinely onto the two expanding residual modes at s0. Shooting
// integrates a member to its prescribed blow-up time, samples the residual at
// a fixed s-cadence, and reports either survival inside the trap set or the
// first exit event together with the exit-map value (s*^2/A)(q0, q1)(s*).
// The inner perturbation cutoff chi0(|y|/(K sqrt(s0))) is supported exactly on
// the plateau of the outer-part cutoff, so the outer residual component of
// fresh data vanishes identically on the sample domain.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ringblow/cutoffs.hpp"
#include "ringblow/hermite_spectral.hpp"
#include "ringblow/radial_grid.hpp"
#include "ringblow/radial_solver.hpp"
#include "ringblow/selfsim_frame.hpp"
#include "ringblow/shrinking_set.hpp"

namespace ringblow {

struct InitialDataParams {
    double d0 = 0.0;
    double d1 = 0.0;
    double T = std::exp(-10.0);
    ModelParams model;
    ShrinkSetParams shrink;

    double s0() const { return -std::log(T); }

    void validate() const {
        model.validate();
        if (!(std::fabs(d0) <= 2.0 && std::fabs(d1) <= 2.0))
            throw std::invalid_argument("InitialDataParams: need (d0, d1) in [-2, 2]^2");
        if (!(T > 0.0 && T < 1.0))
            throw std::invalid_argument("InitialDataParams: need 0 < T < 1");
        double s = s0();
        if (!(s >= std::exp(1.0)))
            throw std::invalid_argument("InitialDataParams: need s0 = -log T >= e");
        // the sample domain |y| <= 6 K sqrt(s0) must stay inside the plateau
        // chi(r/eps0) = 1, i.e. clear of r = eps0/4, with a safety quarter
        if (!(6.0 * shrink.K * std::sqrt(s) * std::sqrt(T) <= 1.0 - shrink.eps0 / 4.0))
            throw std::invalid_argument(
                "InitialDataParams: sample domain reaches the inner cutoff ramp; "
                "decrease T or K");
    }
};

inline RadialField build_initial_data(const InitialDataParams& ip,
                                      const std::shared_ptr<const RadialGrid>& grid) {
    ip.validate();
    const double s0 = ip.s0();
    const double rootT = std::sqrt(ip.T);
    const double amp = std::pow(ip.T, -1.0 / (ip.model.p - 1.0));
    const double pert_scale = ip.shrink.A / (s0 * s0);
    const double pert_width = ip.shrink.K * std::sqrt(s0);

    RadialField f;
    f.grid = grid;
    f.params = ip.model;
    f.t = 0.0;
    f.u.resize(grid->r.size());
    for (std::size_t i = 0; i < grid->r.size(); ++i) {
        double r = grid->r[i];
        double y = (r - 1.0) / rootT;
        double core = profile_phi(y, s0, ip.model) * chi(r / ip.shrink.eps0);
        double pert = pert_scale * (ip.d0 + ip.d1 * y) * chi0(std::fabs(y) / pert_width);
        f.u[i] = amp * (core + pert);
    }
    // the regular plateau must be exactly zero; anything else means the
    // cutoff supports overlap (inconsistent eps0 / T)
    for (std::size_t i = 0; i < grid->r.size(); ++i) {
        if (grid->r[i] > ip.shrink.eps0 / 8.0) break;
        if (f.u[i] != 0.0)
            throw std::runtime_error("build_initial_data: data leaks into the regular plateau");
    }
    return f;
}

// Everything shoot() needs besides the data parameters.
struct ShootConfig {
    RadialGridSpec grid;
    double horizon = 25.0;  // trap-tracking window in s-units past s0
    double snapshot_ds = 0.05;
    int quad_nodes = 64;
    SolverOptions solver;  // T_prescribed / s_max / snapshots are set by shoot()
};

// Reduce one recorded snapshot to the scalars membership tracking needs.
inline ModeSeriesPoint analyze_snapshot(const FieldSnapshot& snap,
                                        const std::shared_ptr<const RadialGrid>& grid,
                                        const ModelParams& model, double T,
                                        const ShrinkSetParams& prm,
                                        const GaussMeasureQuad& quad) {
    RadialField f;
    f.grid = grid;
    f.u = snap.u;
    f.t = snap.t;
    f.params = model;
    CutoffParams cp;
    cp.eps0 = prm.eps0;
    cp.K = prm.K;
    ResidualSample rs = sample_residual(f, T, cp);
    ModeDecomposition dec = project_modes(rs.y, rs.q, quad, rs.s, prm.K);
    return make_series_point(dec, rs.s, f, prm);
}

struct ShootOutcome {
    InitialDataParams params;
    bool survived = false;
    bool no_blowup = false;
    bool diverged = false;
    double s_last = 0.0;  // last analyzed self-similar time
    std::optional<ExitEvent> exit;
    double phi0 = std::numeric_limits<double>::quiet_NaN();  // exit-map value
    double phi1 = std::numeric_limits<double>::quiet_NaN();
    double T_est = std::numeric_limits<double>::quiet_NaN();
    double r_blow = std::numeric_limits<double>::quiet_NaN();
    std::string stop_reason;
    std::vector<ModeSeriesPoint> series;
};

// Integrate prepared initial data to its prescribed blow-up time, tracking
// trap membership at the snapshot cadence.
inline ShootOutcome shoot_field(RadialField field, const InitialDataParams& ip,
                                const ShootConfig& cfg) {
    ip.validate();
    const double s0 = ip.s0();
    ShrinkSetParams prm = ip.shrink;
    prm.s0 = s0;

    SolverOptions opt = cfg.solver;
    opt.T_prescribed = ip.T;
    opt.s_max = s0 + cfg.horizon;
    opt.snapshots = true;
    opt.snapshot_ds = cfg.snapshot_ds;

    ShootOutcome out;
    out.params = ip;

    const double sup0 = field.sup_abs();
    GaussMeasureQuad quad = GaussMeasureQuad::build(cfg.quad_nodes);

    BlowupReport rep;
    std::vector<FieldSnapshot> snaps;
    try {
        rep = run_until_blowup(field, opt);
        snaps = rep.snapshots;
        out.stop_reason = rep.stop_reason;
        out.T_est = rep.T_est;
        out.r_blow = rep.r_blow;
    } catch (const IntegrationDivergedError& err) {
        out.diverged = true;
        out.stop_reason = "integration-diverged";
        FieldSnapshot last;
        last.t = err.last_good.t;
        last.s = -std::log(ip.T - err.last_good.t);
        last.u = err.last_good.u;
        snaps.push_back(last);
    }

    double sup_final = sup0;
    for (const auto& sp : rep.series) sup_final = std::max(sup_final, sp.sup_u);

    for (const auto& sn : snaps) {
        if (!(sn.t < ip.T)) continue;
        out.series.push_back(
            analyze_snapshot(sn, field.grid, ip.model, ip.T, prm, quad));
    }
    if (!out.series.empty()) out.s_last = out.series.back().s;

    // a detected trap exit outranks the bounded-amplitude heuristic: data
    // whose true blow-up time differs from the prescribed one can stay
    // uniformly bounded in the prescribed frame while clearly leaving the
    // trap through an expanding mode
    out.exit = detect_exit(out.series, prm);
    if (out.exit) {
        double se = out.exit->s_exit;
        out.phi0 = se * se / prm.A * out.exit->q0_exit;
        out.phi1 = se * se / prm.A * out.exit->q1_exit;
    } else if (!out.diverged &&
               (out.stop_reason == "s-horizon" || out.stop_reason == "resolution-guard")) {
        // survival demands the tracked frame actually reached the horizon (or
        // the resolvable-scale guard). An early threshold-hit without any
        // tracked exit means the field blew up off-center or off-time, through
        // structure the Gaussian-weighted projections barely see; that is an
        // undirected miss, not a survivor.
        out.survived = true;
    } else if (!out.diverged && sup_final <= 2.0 * sup0 + 1e-300) {
        out.no_blowup = true;
        out.stop_reason = "no-blowup";
    }
    return out;
}

inline ShootOutcome shoot(const InitialDataParams& ip, const ShootConfig& cfg) {
    std::shared_ptr<const RadialGrid> grid = std::make_shared<RadialGrid>(RadialGrid::graded(cfg.grid));
    return shoot_field(build_initial_data(ip, grid), ip, cfg);
}

// Affine parameter-to-mode map (q0, q1) = M (d0, d1) + c, measured from three
// probe evaluations of freshly built data.
struct ModeMap {
    double m00 = 0.0, m01 = 0.0, m10 = 0.0, m11 = 0.0;
    double c0 = 0.0, c1 = 0.0;

    double det() const { return m00 * m11 - m01 * m10; }

    std::array<double, 2> apply(double d0, double d1) const {
        return {m00 * d0 + m01 * d1 + c0, m10 * d0 + m11 * d1 + c1};
    }

    std::array<double, 2> invert(double p0, double p1) const {
        double dd = det();
        if (std::fabs(dd) < 1e-300) throw std::runtime_error("ModeMap: singular");
        double b0 = p0 - c0, b1 = p1 - c1;
        return {(m11 * b0 - m01 * b1) / dd, (m00 * b1 - m10 * b0) / dd};
    }
};

inline std::array<double, 2> initial_modes(const InitialDataParams& ip,
                                           const std::shared_ptr<const RadialGrid>& grid,
                                           const GaussMeasureQuad& quad) {
    RadialField f = build_initial_data(ip, grid);
    CutoffParams cp;
    cp.eps0 = ip.shrink.eps0;
    cp.K = ip.shrink.K;
    ResidualSample rs = sample_residual(f, ip.T, cp);
    ModeDecomposition dec = project_modes(rs.y, rs.q, quad, rs.s, ip.shrink.K);
    return {dec.q0, dec.q1};
}

inline ModeMap measure_mode_map(const InitialDataParams& base,
                                const std::shared_ptr<const RadialGrid>& grid,
                                const GaussMeasureQuad& quad) {
    auto probe = [&](double a0, double a1) {
        InitialDataParams ip = base;
        ip.d0 = a0;
        ip.d1 = a1;
        return initial_modes(ip, grid, quad);
    };
    auto origin = probe(0.0, 0.0);
    auto e0 = probe(1.0, 0.0);
    auto e1 = probe(0.0, 1.0);
    ModeMap m;
    m.c0 = origin[0];
    m.c1 = origin[1];
    m.m00 = e0[0] - m.c0;
    m.m10 = e0[1] - m.c1;
    m.m01 = e1[0] - m.c0;
    m.m11 = e1[1] - m.c1;
    return m;
}

// n evenly spaced points along the preimage of the mode-space square
// boundary [-b, b]^2 under the affine map, walked counterclockwise.
inline std::vector<std::array<double, 2>> boundary_loop(const ModeMap& map, double b,
                                                        int n) {
    if (n < 8) throw std::invalid_argument("boundary_loop: need n >= 8");
    std::vector<std::array<double, 2>> pts;
    pts.reserve(static_cast<std::size_t>(n));
    const double perimeter = 8.0 * b;
    for (int k = 0; k < n; ++k) {
        double arc = perimeter * k / n;
        double p0, p1;
        if (arc < 2.0 * b) {  // bottom edge, left to right
            p0 = -b + arc;
            p1 = -b;
        } else if (arc < 4.0 * b) {  // right edge, bottom to top
            p0 = b;
            p1 = -b + (arc - 2.0 * b);
        } else if (arc < 6.0 * b) {  // top edge, right to left
            p0 = b - (arc - 4.0 * b);
            p1 = b;
        } else {  // left edge, top to bottom
            p0 = -b;
            p1 = b - (arc - 6.0 * b);
        }
        pts.push_back(map.invert(p0, p1));
    }
    return pts;
}

// Winding number of a closed polygonal loop around the origin. Throws when a
// sample sits (numerically) on the origin — the loop must be resampled.
inline int winding_number(const std::vector<std::array<double, 2>>& loop) {
    if (loop.size() < 3) throw std::invalid_argument("winding_number: need >= 3 points");
    double total = 0.0;
    for (std::size_t i = 0; i < loop.size(); ++i) {
        const auto& a = loop[i];
        const auto& b = loop[(i + 1) % loop.size()];
        double na = std::hypot(a[0], a[1]), nb = std::hypot(b[0], b[1]);
        if (na < 1e-12 || nb < 1e-12)
            throw std::runtime_error("winding_number: loop passes through the origin; resample");
        double cross = a[0] * b[1] - a[1] * b[0];
        double dot = a[0] * b[0] + a[1] * b[1];
        total += std::atan2(cross, dot);
    }
    return static_cast<int>(std::lround(total / (2.0 * M_PI)));
}

// Full-simulation degree check: shoot every boundary sample of the measured
// trap-entry rectangle and wind the exit map around the origin.
inline int boundary_degree_check(const InitialDataParams& base, const ShootConfig& cfg,
                                 int n_samples) {
    if (n_samples < 8) throw std::invalid_argument("boundary_degree_check: need >= 8 samples");
    std::shared_ptr<const RadialGrid> grid = std::make_shared<RadialGrid>(RadialGrid::graded(cfg.grid));
    GaussMeasureQuad quad = GaussMeasureQuad::build(cfg.quad_nodes);
    ModeMap map = measure_mode_map(base, grid, quad);
    const double s0 = base.s0();
    const double b = base.shrink.A / (s0 * s0);
    std::vector<std::array<double, 2>> phis;
    for (const auto& d : boundary_loop(map, b, n_samples)) {
        InitialDataParams ip = base;
        ip.d0 = d[0];
        ip.d1 = d[1];
        ShootOutcome out = shoot(ip, cfg);
        if (!out.exit)
            throw std::runtime_error("boundary_degree_check: boundary point did not exit");
        phis.push_back({out.phi0, out.phi1});
    }
    return winding_number(phis);
}

// --- exit-sign-directed coordinate bisection -------------------------------

struct SearchProbe {
    double d0 = 0.0, d1 = 0.0;
    bool survived = false;
    double s_reached = 0.0;  // exit time, or the last tracked s for survivors
    int mode = -1;           // exiting expanding mode, -1 when undirected
    int omega = 0;
};

struct SearchResult {
    double d0 = 0.0, d1 = 0.0;  // best parameters found
    bool found_survivor = false;
    bool budget_exhausted = false;
    std::vector<SearchProbe> frontier;  // every probe, in evaluation order
};

// A probe callback receives (d0, d1) and reports survival or the directed
// exit. An exit with omega > 0 means the coordinate driving that mode was too
// large; the bracket on that coordinate contracts accordingly. The two
// coordinates are coupled through the blow-up time: moving one shifts the
// other's optimum by a few percent of the move, so every contraction reopens
// the other axis around its center by a fixed share of the center shift (a
// generous upper bound for the measured coupling — without this, a bracket
// tuned for the old value of the other coordinate goes stale and the search
// grinds against its edge). A bracket at floor width that still receives
// one-sided exits has lost its optimum the same way; it reopens in the
// indicated direction instead of pinning. Undirected exits shrink both axes
// toward the longest-surviving probe seen so far.
template <class Probe>
SearchResult bisection_core(Probe&& probe, std::array<double, 4> rect, int budget) {
    SearchResult res;
    double best_s = -std::numeric_limits<double>::infinity();
    constexpr double couple = 0.125;  // reopening share of the other axis' move
    auto floor_w = [](double c) { return 1e-13 * (1.0 + std::fabs(c)); };
    // contract [lo, hi] against a directed exit at its center c; reopen past c
    // when the bracket pins. Returns how far the center moved.
    auto contract = [&](double& lo, double& hi, double c, int omega, double other_w) {
        (omega > 0 ? hi : lo) = c;
        if (hi - lo < floor_w(c)) {
            double hw = std::max(1024.0 * floor_w(c), couple * other_w);
            (omega > 0 ? lo : hi) = (omega > 0 ? c - hw : c + hw);
        }
        return std::fabs(0.5 * (lo + hi) - c);
    };
    auto reopen = [](double& lo, double& hi, double hw) {
        double c = 0.5 * (lo + hi);
        lo = std::min(lo, c - hw);
        hi = std::max(hi, c + hw);
    };
    for (int k = 0; k < budget; ++k) {
        double c0 = 0.5 * (rect[0] + rect[1]);
        double c1 = 0.5 * (rect[2] + rect[3]);
        SearchProbe pr = probe(c0, c1);
        pr.d0 = c0;
        pr.d1 = c1;
        res.frontier.push_back(pr);
        if (pr.survived || pr.s_reached > best_s) {
            best_s = pr.s_reached;
            res.d0 = c0;
            res.d1 = c1;
        }
        if (pr.survived) {
            res.found_survivor = true;
            return res;
        }
        if (pr.mode == 0) {
            double shift = contract(rect[0], rect[1], c0, pr.omega, rect[3] - rect[2]);
            reopen(rect[2], rect[3], couple * shift);
        } else if (pr.mode == 1) {
            double shift = contract(rect[2], rect[3], c1, pr.omega, rect[1] - rect[0]);
            reopen(rect[0], rect[1], couple * shift);
        } else {
            // undirected: contract both axes toward the best probe so far
            rect[0] = 0.5 * (rect[0] + res.d0);
            rect[1] = 0.5 * (rect[1] + res.d0);
            rect[2] = 0.5 * (rect[2] + res.d1);
            rect[3] = 0.5 * (rect[3] + res.d1);
            reopen(rect[0], rect[1], couple * std::fabs(0.5 * (rect[2] + rect[3]) - c1));
            reopen(rect[2], rect[3], couple * std::fabs(0.5 * (rect[0] + rect[1]) - c0));
        }
    }
    res.budget_exhausted = true;
    return res;
}

// Search the measured trap-entry rectangle for a full-horizon survivor.
inline SearchResult bisection_search(const InitialDataParams& base, const ShootConfig& cfg,
                                     int budget) {
    std::shared_ptr<const RadialGrid> grid = std::make_shared<RadialGrid>(RadialGrid::graded(cfg.grid));
    GaussMeasureQuad quad = GaussMeasureQuad::build(cfg.quad_nodes);
    ModeMap map = measure_mode_map(base, grid, quad);
    const double s0 = base.s0();
    const double b = base.shrink.A / (s0 * s0);
    std::array<double, 4> rect;
    {
        auto p00 = map.invert(-b, -b), p01 = map.invert(-b, b);
        auto p10 = map.invert(b, -b), p11 = map.invert(b, b);
        rect[0] = std::max(-2.0, std::min({p00[0], p01[0], p10[0], p11[0]}));
        rect[1] = std::min(2.0, std::max({p00[0], p01[0], p10[0], p11[0]}));
        rect[2] = std::max(-2.0, std::min({p00[1], p01[1], p10[1], p11[1]}));
        rect[3] = std::min(2.0, std::max({p00[1], p01[1], p10[1], p11[1]}));
    }
    auto probe = [&](double d0, double d1) {
        InitialDataParams ip = base;
        ip.d0 = d0;
        ip.d1 = d1;
        ShootOutcome out = shoot_field(build_initial_data(ip, grid), ip, cfg);
        SearchProbe pr;
        pr.survived = out.survived;
        if (out.exit) {
            pr.s_reached = out.exit->s_exit;
            if (!out.exit->bootstrap_violation) {
                pr.mode = out.exit->mode;
                // exit directions live in mode space; the measured map's
                // diagonal orients them in parameter space
                double diag = (out.exit->mode == 0) ? map.m00 : map.m11;
                pr.omega = (diag < 0.0) ? -out.exit->omega : out.exit->omega;
            }
        } else {
            pr.s_reached = out.s_last;
        }
        return pr;
    };
    return bisection_core(probe, rect, budget);
}

// --- stability experiment ---------------------------------------------------

// Smooth compactly supported bump: exp(1 - 1/(1 - ((r-c)/sigma)^2)) inside
// |r - c| < sigma, zero outside, peak value 1 at the center.
inline double stability_bump(double r, double center, double sigma = 0.1) {
    double x = (r - center) / sigma;
    double x2 = x * x;
    if (x2 >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - x2));
}

// Count well-separated local maxima above rel_threshold * sup of a profile.
inline int count_rings(const std::vector<double>& r, const std::vector<double>& u,
                       double rel_threshold = 0.1) {
    if (r.size() != u.size() || r.size() < 3)
        throw std::invalid_argument("count_rings: need matching arrays, >= 3 nodes");
    double sup = 0.0;
    for (double v : u) sup = std::max(sup, std::fabs(v));
    if (sup == 0.0) return 0;
    int count = 0;
    for (std::size_t i = 1; i + 1 < u.size(); ++i) {
        double v = std::fabs(u[i]);
        if (v < rel_threshold * sup) continue;
        if (v > std::fabs(u[i - 1]) && v >= std::fabs(u[i + 1])) ++count;
    }
    // boundary maxima (e.g. a bump centered at the origin for radial data)
    if (std::fabs(u.front()) >= rel_threshold * sup &&
        std::fabs(u.front()) > std::fabs(u[1]))
        ++count;
    if (std::fabs(u.back()) >= rel_threshold * sup &&
        std::fabs(u.back()) > std::fabs(u[u.size() - 2]))
        ++count;
    return count;
}

struct StabilityRow {
    double delta = 0.0;
    int dir = 0;
    bool blew_up = false;
    double dT = 0.0;       // |T_est(delta) - T_est(0)|
    double dr_blow = 0.0;  // |r_blow(delta) - r_blow(0)|
    int ring_count = 0;
};

namespace detail {
inline double u64_to_unit(std::uint64_t x) {
    return static_cast<double>(x >> 11) * (1.0 / 9007199254740992.0);  // 2^-53
}
}  // namespace detail

// Perturb the base initial data by delta * sup|u0| * shape(r) for each bump
// shape and rerun free integration to the blow-up threshold; report how the
// estimated blow-up time and ring location move. Shapes 0..2 are bumps at
// r = 0.6, 1.0, 1.4 (regular zone, ring, exterior); further directions are
// seeded random combinations of the three.
inline std::vector<StabilityRow> stability_experiment(const InitialDataParams& base,
                                                      const ShootConfig& cfg,
                                                      const std::vector<double>& deltas,
                                                      int n_dirs,
                                                      std::uint64_t seed = 12345) {
    if (n_dirs < 1) throw std::invalid_argument("stability_experiment: need n_dirs >= 1");
    std::shared_ptr<const RadialGrid> grid = std::make_shared<RadialGrid>(RadialGrid::graded(cfg.grid));
    RadialField u0 = build_initial_data(base, grid);
    const double sup0 = u0.sup_abs();

    SolverOptions opt = cfg.solver;  // free run: detect blow-up, no frame bookkeeping
    opt.T_prescribed = 0.0;
    opt.s_max = 0.0;
    opt.snapshots = false;

    BlowupReport base_rep = run_until_blowup(u0, opt);
    if (base_rep.stop_reason != "threshold-hit")
        throw std::runtime_error("stability_experiment: base run did not blow up");
    if (count_rings(grid->r, base_rep.u_final) != 1)
        throw std::runtime_error("stability_experiment: base run is not a single ring");

    const double centers[3] = {0.6, 1.0, 1.4};
    std::vector<std::vector<double>> shapes;
    for (int k = 0; k < n_dirs; ++k) {
        std::vector<double> shape(grid->r.size(), 0.0);
        if (k < 3) {
            for (std::size_t i = 0; i < grid->r.size(); ++i)
                shape[i] = stability_bump(grid->r[i], centers[k]);
        } else {
            std::mt19937_64 rng(seed + static_cast<std::uint64_t>(k));
            double c[3];
            for (double& cj : c) cj = 2.0 * detail::u64_to_unit(rng()) - 1.0;
            double sup = 0.0;
            for (std::size_t i = 0; i < grid->r.size(); ++i) {
                for (int j = 0; j < 3; ++j)
                    shape[i] += c[j] * stability_bump(grid->r[i], centers[j]);
                sup = std::max(sup, std::fabs(shape[i]));
            }
            if (sup > 0.0)
                for (double& v : shape) v /= sup;
        }
        shapes.push_back(std::move(shape));
    }

    std::vector<StabilityRow> rows;
    for (double delta : deltas) {
        for (int k = 0; k < n_dirs; ++k) {
            RadialField f = u0;
            for (std::size_t i = 0; i < f.u.size(); ++i)
                f.u[i] += delta * sup0 * shapes[static_cast<std::size_t>(k)][i];
            StabilityRow row;
            row.delta = delta;
            row.dir = k;
            try {
                BlowupReport rep = run_until_blowup(f, opt);
                row.blew_up = rep.stop_reason == "threshold-hit";
                if (row.blew_up) {
                    row.dT = std::fabs(rep.T_est - base_rep.T_est);
                    row.dr_blow = std::fabs(rep.r_blow - base_rep.r_blow);
                    row.ring_count = count_rings(grid->r, rep.u_final);
                }
            } catch (const IntegrationDivergedError&) {
                row.blew_up = false;
            }
            rows.push_back(row);
        }
    }
    return rows;
}

}  // namespace ringblow
