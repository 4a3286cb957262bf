// Experiment drivers behind the command-line tool. Each driver runs one
// configured study into an output directory and returns a process exit
// status; every failure mode maps to a distinct status plus a machine
// readable error.json. Artifacts are CSV/JSON with a checksum manifest, and
// identical config + seed reproduce every file byte for byte. The shooting
// sweep appends each evaluated probe to probes.jsonl immediately, so that
// file doubles as the checkpoint for resumed sweeps.
#pragma once

#include <array>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "ringblow/config.hpp"
#include "ringblow/hermite_spectral.hpp"
#include "ringblow/io.hpp"
#include "ringblow/profile_verify.hpp"
#include "ringblow/radial_solver.hpp"
#include "ringblow/selfsim_frame.hpp"
#include "ringblow/shooting.hpp"
#include "ringblow/shrinking_set.hpp"

namespace ringblow {

enum ExitStatus : int {
    exit_ok = 0,
    exit_usage = 2,          // bad command line
    exit_config = 3,         // config parse or validation error
    exit_input_missing = 4,  // referenced input absent or unusable
    exit_run_failed = 5,     // the experiment ran but did not reach its goal
    exit_io = 6,             // artifact write failure
    exit_internal = 7,       // unexpected exception
};

struct InputMissingError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct InputInvalidError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct RunFailedError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Emit the machine-readable error record: one JSON line on stderr, plus
// error.json in the output directory when that is writable.
inline void write_error_record(const std::filesystem::path& out, int status,
                               const std::string& code, const std::string& message) {
    nlohmann::json rec{{"status", status}, {"code", code}, {"message", message}};
    std::fprintf(stderr, "%s\n", rec.dump().c_str());
    try {
        if (!out.empty()) write_file(out / "error.json", rec.dump(1) + "\n");
    } catch (...) {
        // the record already went to stderr
    }
}

template <class Fn>
inline int guarded(const std::filesystem::path& out, Fn&& fn) {
    try {
        fn();
        return exit_ok;
    } catch (const InputMissingError& e) {
        write_error_record(out, exit_input_missing, "input-not-found", e.what());
        return exit_input_missing;
    } catch (const InputInvalidError& e) {
        write_error_record(out, exit_input_missing, "input-invalid", e.what());
        return exit_input_missing;
    } catch (const ConfigError& e) {
        write_error_record(out, exit_config, "config-error", e.what());
        return exit_config;
    } catch (const IntegrationDivergedError& e) {
        write_error_record(out, exit_run_failed, "integration-diverged", e.what());
        return exit_run_failed;
    } catch (const RunFailedError& e) {
        write_error_record(out, exit_run_failed, "run-failed", e.what());
        return exit_run_failed;
    } catch (const IoError& e) {
        write_error_record(out, exit_io, "io-error", e.what());
        return exit_io;
    } catch (const std::exception& e) {
        write_error_record(out, exit_internal, "internal-error", e.what());
        return exit_internal;
    }
}

// Run n independent jobs on up to `jobs` threads. Results must be stored by
// job index inside fn, which keeps any later merge deterministic regardless
// of scheduling. The first exception wins and is rethrown after the joins.
template <class Fn>
inline void parallel_for_indexed(int n, int jobs, Fn&& fn) {
    jobs = std::max(1, std::min(jobs, n));
    if (jobs <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::mutex err_mtx;
    std::exception_ptr first_error;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(jobs));
    for (int w = 0; w < jobs; ++w)
        pool.emplace_back([&] {
            for (;;) {
                int i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lk(err_mtx);
                    if (!first_error) first_error = std::current_exception();
                    return;
                }
            }
        });
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

inline std::shared_ptr<const RadialGrid> build_grid(const RunConfig& cfg) {
    if (cfg.grid_kind == "uniform")
        return std::make_shared<RadialGrid>(
            RadialGrid::uniform(cfg.grid.r_out, cfg.uniform_nodes));
    return std::make_shared<RadialGrid>(RadialGrid::graded(cfg.grid));
}

// --- shared run analysis -----------------------------------------------------

// Smallest node spacing, for the resolution-margin snapshot filter.
inline double min_spacing(const RadialGrid& g) {
    double h = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < g.r.size(); ++i) h = std::min(h, g.r[i + 1] - g.r[i]);
    return h;
}

// Final-profile diagnostics of a completed ring run. Sub-analyses that lack
// data leave their fields at NaN/false instead of throwing; the report is an
// artifact, not an assertion.
inline ProfileReport build_profile_report(const std::shared_ptr<const RadialGrid>& grid,
                                          const BlowupReport& rep, const ModelParams& mp,
                                          const ShrinkSetParams& shrink) {
    ProfileReport pr;
    const double h_min = min_spacing(*grid);
    try {
        pr.single_ring = count_rings(grid->r, rep.u_final) == 1;
    } catch (const std::exception&) {
    }
    try {
        pr.regular_region_ok =
            region_sup(grid, rep.snapshots, shrink.regular_radius).sup_run <= shrink.eta0;
    } catch (const std::exception&) {
    }
    if (!std::isfinite(rep.T_est)) return pr;
    try {
        auto resolved = resolved_snapshots(rep.snapshots, rep.T_est, h_min, 4.0);
        auto gb = global_bound_check(resolved, rep.T_est, mp);
        pr.W_sup_max = gb.w_sup_max;
        auto curve = ustar_check(grid, resolved.back().u, resolved.back().t, rep.T_est,
                                 rep.r_blow, mp);
        double dev = 0.0;
        for (double q : curve.ratio) dev = std::max(dev, std::fabs(q - 1.0));
        pr.ustar_max_dev = dev;
    } catch (const std::exception&) {
    }
    try {
        // the decay-exponent fit needs the trusted resolution margin; the
        // last ~4 s-units of barely-resolved data are dominated by blow-up
        // time precision (see the profile diagnostics header)
        auto trusted = resolved_snapshots(rep.snapshots, rep.T_est, h_min, 64.0);
        auto fit = profile_deviation(grid, trusted, rep.T_est, mp);
        if (fit.fit_valid) pr.alpha = fit.alpha;
        if (!fit.deviation.empty()) pr.D_series_ref = fit.deviation.back();
    } catch (const std::exception&) {
    }
    return pr;
}

// Mode trajectory + membership trace of a snapshot run against the trap, in
// the frame anchored at blow-up time T.
inline void analyze_membership(const std::shared_ptr<const RadialGrid>& grid,
                               const std::vector<FieldSnapshot>& snapshots,
                               const ModelParams& mp, double T,
                               const ShrinkSetParams& prm, int quad_nodes,
                               std::vector<ModeSeriesPoint>& series,
                               std::vector<MembershipReport>& reports) {
    series.clear();
    reports.clear();
    if (!std::isfinite(T)) return;
    GaussMeasureQuad quad = GaussMeasureQuad::build(quad_nodes);
    for (const auto& sn : snapshots) {
        if (!(sn.t < T)) continue;
        ModeSeriesPoint pt = analyze_snapshot(sn, grid, mp, T, prm, quad);
        series.push_back(pt);
        reports.push_back(check_point(pt, prm));
    }
}

// --- simulate ------------------------------------------------------------------

// Persisted snapshot bundle: everything profile-check needs to re-analyze the
// run without re-integrating.
inline nlohmann::json snapshots_json(const RunConfig& cfg, const BlowupReport& rep) {
    nlohmann::json grid{{"kind", cfg.grid_kind},
                        {"r_out", cfg.grid.r_out},
                        {"h_min", cfg.grid.h_min},
                        {"h_coarse", cfg.grid.h_coarse},
                        {"grow", cfg.grid.grow},
                        {"ring", cfg.grid.ring},
                        {"uniform_nodes", cfg.uniform_nodes}};
    nlohmann::json shrink{{"A", cfg.shrink.A},
                          {"K", cfg.shrink.K},
                          {"eps0", cfg.shrink.eps0},
                          {"eta0", cfg.shrink.eta0},
                          {"regular_radius", cfg.shrink.regular_radius}};
    nlohmann::json snaps = nlohmann::json::array();
    for (const auto& sn : rep.snapshots)
        snaps.push_back({{"t", sn.t}, {"s", sn.s}, {"u", sn.u}});
    return nlohmann::json{{"model", {{"p", cfg.model.p}, {"d", cfg.model.d}}},
                          {"grid", grid},
                          {"shrink", shrink},
                          {"T_est", json_number(rep.T_est)},
                          {"r_blow", json_number(rep.r_blow)},
                          {"stop_reason", rep.stop_reason},
                          {"t_final", rep.t_final},
                          {"u_final", rep.u_final},
                          {"snapshots", snaps}};
}

inline int run_simulate(const RunConfig& cfg, const std::filesystem::path& out) {
    return guarded(out, [&] {
        std::vector<std::string> artifacts;
        write_file(out / "config_echo.ini", dump_config(cfg));
        artifacts.push_back("config_echo.ini");

        auto grid = build_grid(cfg);

        if (cfg.simulate.data == "flat") {
            RadialField f;
            f.grid = grid;
            f.u.assign(grid->r.size(), 1.0);
            f.t = 0.0;
            f.params = cfg.model;
            BlowupReport rep = run_until_blowup(f, cfg.solver);
            write_file(out / "series.csv", series_csv(rep, cfg.model));
            artifacts.push_back("series.csv");
            write_file(out / "summary.json", summary_json(rep).dump(1) + "\n");
            artifacts.push_back("summary.json");
            write_manifest(out, artifacts);
            if (rep.stop_reason != "threshold-hit")
                throw RunFailedError("flat run did not blow up: " + rep.stop_reason);
            return;
        }

        InitialDataParams ip = cfg.initial_data();
        RadialField u0 = build_initial_data(ip, grid);
        SolverOptions opt = cfg.solver;
        opt.snapshots = true;
        opt.snapshot_ds = cfg.simulate.snapshot_ds;
        if (cfg.simulate.prescribed) {
            opt.T_prescribed = ip.T;
            opt.s_max = ip.s0() + cfg.shoot.horizon;
        }
        BlowupReport rep = run_until_blowup(u0, opt);

        write_file(out / "series.csv", series_csv(rep, cfg.model));
        artifacts.push_back("series.csv");
        write_file(out / "summary.json", summary_json(rep).dump(1) + "\n");
        artifacts.push_back("summary.json");
        write_file(out / "snapshots.json", snapshots_json(cfg, rep).dump() + "\n");
        artifacts.push_back("snapshots.json");

        // the frame anchored at the prescribed time when tracking it, else at
        // the fitted blow-up time
        const double T_frame = cfg.simulate.prescribed ? ip.T : rep.T_est;

        if (std::isfinite(rep.T_est)) {
            auto resolved = resolved_snapshots(rep.snapshots, rep.T_est,
                                               min_spacing(*grid), 4.0);
            if (!resolved.empty()) {
                RadialField last;
                last.grid = grid;
                last.u = resolved.back().u;
                last.t = resolved.back().t;
                last.params = cfg.model;
                CutoffParams cp;
                cp.eps0 = cfg.shrink.eps0;
                cp.K = cfg.shrink.K;
                write_file(out / "frame_final.csv",
                           frame_csv(to_selfsimilar(last, rep.T_est), cp));
                artifacts.push_back("frame_final.csv");
            }
        }

        ShrinkSetParams prm = cfg.shrink;
        prm.s0 = ip.s0();
        std::vector<ModeSeriesPoint> mode_series;
        std::vector<MembershipReport> membership;
        analyze_membership(grid, rep.snapshots, cfg.model, T_frame, prm,
                           cfg.shoot.quad_nodes, mode_series, membership);
        write_file(out / "modes.csv", modes_csv(mode_series));
        artifacts.push_back("modes.csv");
        write_file(out / "membership.csv", membership_csv(membership));
        artifacts.push_back("membership.csv");

        ProfileReport pr = build_profile_report(grid, rep, cfg.model, cfg.shrink);
        write_file(out / "profile_report.json", profile_report_json(pr).dump(1) + "\n");
        artifacts.push_back("profile_report.json");

        write_manifest(out, artifacts);

        const bool ok = cfg.simulate.prescribed
                            ? (rep.stop_reason == "resolution-guard" ||
                               rep.stop_reason == "s-horizon" ||
                               rep.stop_reason == "threshold-hit")
                            : rep.stop_reason == "threshold-hit";
        if (!ok) throw RunFailedError("ring run stopped early: " + rep.stop_reason);
    });
}

// --- shoot ---------------------------------------------------------------------

// The trap-entry rectangle in (d0, d1): preimage of the mode-space square of
// half-width b under the measured affine map, clamped to the valid box.
inline std::array<double, 4> entry_rectangle(const ModeMap& map, double b) {
    auto p00 = map.invert(-b, -b), p01 = map.invert(-b, b);
    auto p10 = map.invert(b, -b), p11 = map.invert(b, b);
    std::array<double, 4> rect;
    rect[0] = std::max(-2.0, std::min({p00[0], p01[0], p10[0], p11[0]}));
    rect[1] = std::min(2.0, std::max({p00[0], p01[0], p10[0], p11[0]}));
    rect[2] = std::max(-2.0, std::min({p00[1], p01[1], p10[1], p11[1]}));
    rect[3] = std::min(2.0, std::max({p00[1], p01[1], p10[1], p11[1]}));
    return rect;
}

inline ProbeRecord reduce_outcome(double d0, double d1, const ShootOutcome& o) {
    ProbeRecord pr;
    pr.d0 = d0;
    pr.d1 = d1;
    pr.T_est = o.T_est;
    pr.r_blow = o.r_blow;
    if (o.diverged) {
        pr.result = "diverged";
        pr.s_exit = o.s_last;
    } else if (o.no_blowup) {
        pr.result = "no-blowup";
    } else if (o.exit) {
        pr.result = "exit";
        pr.s_exit = o.exit->s_exit;
        if (!o.exit->bootstrap_violation) {
            pr.mode = o.exit->mode;
            pr.omega = o.exit->omega;
        }
        pr.phi0 = o.phi0;
        pr.phi1 = o.phi1;
    } else {
        pr.result = "survived";
        pr.s_exit = o.s_last;
    }
    return pr;
}

inline int run_shoot(const RunConfig& cfg, const std::filesystem::path& out, int jobs) {
    return guarded(out, [&] {
        std::vector<std::string> artifacts;
        write_file(out / "config_echo.ini", dump_config(cfg));
        artifacts.push_back("config_echo.ini");

        auto grid = build_grid(cfg);
        GaussMeasureQuad quad = GaussMeasureQuad::build(cfg.shoot.quad_nodes);
        InitialDataParams base = cfg.initial_data();
        ShootConfig sc = cfg.shoot_config();

        // resume support: completed probes load from the log and are never
        // re-integrated, so a restarted sweep converges to the same bytes
        const std::filesystem::path log_path = out / "probes.jsonl";
        std::map<std::string, ProbeRecord> cache;
        std::vector<ProbeRecord> replay;
        if (std::filesystem::exists(log_path)) {
            std::ifstream in(log_path, std::ios::binary);
            replay = read_probe_log(in);
            for (const auto& pr : replay) cache[probe_key(pr.d0, pr.d1)] = pr;
        }
        // rewrite the recovered prefix so a torn final line from an
        // interrupted append never pollutes the resumed log
        if (!replay.empty()) {
            std::string clean;
            for (const auto& pr : replay) clean += probe_to_json(pr).dump() + "\n";
            write_file(log_path, clean);
        }
        std::ofstream log(log_path, std::ios::binary | std::ios::app);
        if (!log) throw IoError("cannot open for appending: " + log_path.string());
        auto append_record = [&](const ProbeRecord& pr) {
            log << probe_to_json(pr).dump() << '\n';
            log.flush();
            if (!log) throw IoError("append failed: " + log_path.string());
        };

        auto evaluate = [&](double d0, double d1) {
            InitialDataParams ip = base;
            ip.d0 = d0;
            ip.d1 = d1;
            return reduce_outcome(d0, d1, shoot_field(build_initial_data(ip, grid), ip, sc));
        };
        // sequential path: cache lookup, else evaluate + checkpoint
        auto lookup_or_run = [&](double d0, double d1) {
            auto it = cache.find(probe_key(d0, d1));
            if (it != cache.end()) return it->second;
            ProbeRecord pr = evaluate(d0, d1);
            cache.emplace(probe_key(d0, d1), pr);
            append_record(pr);
            return pr;
        };

        nlohmann::json summary;
        ModeMap map = measure_mode_map(base, grid, quad);
        const double s0 = base.s0();
        const double b = base.shrink.A / (s0 * s0);

        if (cfg.shoot.degree) {
            auto loop = boundary_loop(map, b, cfg.shoot.boundary_samples);
            const int n = static_cast<int>(loop.size());
            std::vector<ProbeRecord> recs(static_cast<std::size_t>(n));
            std::vector<char> fresh(static_cast<std::size_t>(n), 0);
            // chunked pool: evaluate a chunk in parallel, then drain to the
            // log in index order so the checkpoint bytes stay deterministic
            const int chunk = std::max(1, jobs);
            for (int lo = 0; lo < n; lo += chunk) {
                const int hi = std::min(n, lo + chunk);
                parallel_for_indexed(hi - lo, jobs, [&](int k) {
                    const int i = lo + k;
                    auto it = cache.find(probe_key(loop[static_cast<std::size_t>(i)][0],
                                                   loop[static_cast<std::size_t>(i)][1]));
                    if (it != cache.end()) {
                        recs[static_cast<std::size_t>(i)] = it->second;
                        return;
                    }
                    recs[static_cast<std::size_t>(i)] =
                        evaluate(loop[static_cast<std::size_t>(i)][0],
                                 loop[static_cast<std::size_t>(i)][1]);
                    fresh[static_cast<std::size_t>(i)] = 1;
                });
                for (int i = lo; i < hi; ++i)
                    if (fresh[static_cast<std::size_t>(i)]) {
                        const auto& pr = recs[static_cast<std::size_t>(i)];
                        cache.emplace(probe_key(pr.d0, pr.d1), pr);
                        append_record(pr);
                    }
            }

            bool all_exited = true;
            std::vector<std::array<double, 2>> phis;
            for (const auto& pr : recs) {
                if (pr.result != "exit") all_exited = false;
                phis.push_back({pr.phi0, pr.phi1});
            }
            summary["degree"] = {{"samples", n}, {"all_exited", all_exited}};
            if (all_exited) {
                try {
                    summary["degree"]["winding"] = winding_number(phis);
                } catch (const std::exception& e) {
                    summary["degree"]["winding"] = nullptr;
                    summary["degree"]["note"] = e.what();
                }
            } else {
                summary["degree"]["winding"] = nullptr;
            }
        }

        if (cfg.shoot.search) {
            auto probe = [&](double c0, double c1) {
                ProbeRecord pr = lookup_or_run(c0, c1);
                SearchProbe sp;
                sp.survived = pr.result == "survived";
                sp.s_reached = pr.s_exit;
                if (pr.result == "exit" && pr.mode >= 0) {
                    sp.mode = pr.mode;
                    sp.omega = pr.omega;
                }
                return sp;
            };
            SearchResult res = bisection_core(probe, entry_rectangle(map, b),
                                              cfg.shoot.budget);
            double s_best = 0.0;
            auto it = cache.find(probe_key(res.d0, res.d1));
            if (it != cache.end()) s_best = it->second.s_exit;
            summary["search"] = {{"found_survivor", res.found_survivor},
                                 {"budget_exhausted", res.budget_exhausted},
                                 {"d0", res.d0},
                                 {"d1", res.d1},
                                 {"s_reached", s_best},
                                 {"probes", res.frontier.size()}};
        }

        summary["probes_logged"] = cache.size();
        write_file(out / "shoot_summary.json", summary.dump(1) + "\n");
        artifacts.push_back("shoot_summary.json");
        log.close();
        artifacts.push_back("probes.jsonl");
        write_manifest(out, artifacts);
    });
}

// --- stability -------------------------------------------------------------------

inline int run_stability(const RunConfig& cfg, const std::filesystem::path& out) {
    return guarded(out, [&] {
        std::vector<std::string> artifacts;
        write_file(out / "config_echo.ini", dump_config(cfg));
        artifacts.push_back("config_echo.ini");

        std::vector<StabilityRow> rows;
        try {
            rows = stability_experiment(cfg.initial_data(), cfg.shoot_config(),
                                        cfg.stability.deltas, cfg.stability.n_dirs,
                                        cfg.seed);
        } catch (const IntegrationDivergedError&) {
            throw;
        } catch (const std::runtime_error& e) {
            throw RunFailedError(e.what());
        }
        write_file(out / "stability.csv", stability_csv(rows));
        artifacts.push_back("stability.csv");

        // per-direction verdicts: deltas are checked in the configured order
        // (largest first by default), distances should not increase
        nlohmann::json dirs = nlohmann::json::array();
        bool all_ok = true;
        for (int dir = 0; dir < cfg.stability.n_dirs; ++dir) {
            std::vector<double> dT, dr;
            bool blew = true, single = true;
            for (const auto& row : rows) {
                if (row.dir != dir) continue;
                dT.push_back(row.dT);
                dr.push_back(row.dr_blow);
                blew = blew && row.blew_up;
                single = single && row.ring_count == 1;
            }
            bool mono_T = true, mono_r = true;
            for (std::size_t i = 0; i + 1 < dT.size(); ++i) {
                mono_T = mono_T && dT[i + 1] <= dT[i];
                mono_r = mono_r && dr[i + 1] <= dr[i];
            }
            bool ok = blew && single && mono_T && mono_r;
            all_ok = all_ok && ok;
            dirs.push_back({{"dir", dir},
                            {"all_blew_up", blew},
                            {"single_ring", single},
                            {"dT_monotone", mono_T},
                            {"dr_monotone", mono_r},
                            {"dT", dT},
                            {"dr_blow", dr}});
        }
        nlohmann::json summary{{"deltas", cfg.stability.deltas},
                               {"directions", dirs},
                               {"ok", all_ok}};
        write_file(out / "stability_summary.json", summary.dump(1) + "\n");
        artifacts.push_back("stability_summary.json");
        write_manifest(out, artifacts);
        if (!all_ok) throw RunFailedError("stability: a perturbed run broke continuity");
    });
}

// --- modes (spectral self-tests) ----------------------------------------------

inline int run_modes(const RunConfig& cfg, const std::filesystem::path& out) {
    return guarded(out, [&] {
        std::vector<std::string> artifacts;
        write_file(out / "config_echo.ini", dump_config(cfg));
        artifacts.push_back("config_echo.ini");

        GaussMeasureQuad quad = GaussMeasureQuad::build(cfg.shoot.quad_nodes);

        // orthogonality table against the closed-form weighted norms
        double max_err = 0.0;
        std::ostringstream orth;
        orth << "m,n,value,target,abs_err\n";
        for (int m = 0; m <= 8; ++m)
            for (int n = 0; n <= 8; ++n) {
                double value =
                    quad.integrate([&](double y) { return hermite_h(m, y) * hermite_h(n, y); });
                double target = (m == n) ? hermite_norm2(m) : 0.0;
                double err = std::fabs(value - target);
                max_err = std::max(max_err, err);
                orth << m << ',' << n << ',' << fmt_g17(value) << ',' << fmt_g17(target)
                     << ',' << fmt_g17(err) << '\n';
            }
        write_file(out / "orthogonality.csv", orth.str());
        artifacts.push_back("orthogonality.csv");

        // eigenrelation defect on uniform grids at h and h/2; second-order
        // stencils make the defect quarter (for m <= 2 it is exact)
        auto eig_error = [](int m, double h) {
            int n = static_cast<int>(std::lround(16.0 / h)) + 1;
            std::vector<double> y(static_cast<std::size_t>(n)), q(y.size());
            for (int i = 0; i < n; ++i) {
                y[static_cast<std::size_t>(i)] = -8.0 + 16.0 * i / (n - 1);
                q[static_cast<std::size_t>(i)] = hermite_h(m, y[static_cast<std::size_t>(i)]);
            }
            auto Lq = apply_L(y, q);
            double lambda = 1.0 - 0.5 * m;
            double sup = 0.0;
            for (std::size_t i = 0; i < y.size(); ++i)
                sup = std::max(sup, std::fabs(Lq[i] - lambda * q[i]));
            return sup;
        };
        double ratio_min = std::numeric_limits<double>::infinity();
        double ratio_max = 0.0;
        std::ostringstream eig;
        eig << "m,err_h,err_h2,ratio\n";
        for (int m = 0; m <= 6; ++m) {
            double e1 = eig_error(m, 0.05);
            double e2 = eig_error(m, 0.025);
            double ratio = (m >= 3) ? e2 / e1 : 0.0;  // exact below cubic degree
            if (m >= 3) {
                ratio_min = std::min(ratio_min, ratio);
                ratio_max = std::max(ratio_max, ratio);
            }
            eig << m << ',' << fmt_g17(e1) << ',' << fmt_g17(e2) << ',' << fmt_g17(ratio)
                << '\n';
        }
        write_file(out / "eigen_convergence.csv", eig.str());
        artifacts.push_back("eigen_convergence.csv");

        const bool orth_ok = max_err <= 1e-8;
        const bool eig_ok = ratio_min > 0.2 && ratio_max < 0.3;
        nlohmann::json selftest{{"orthogonality_max_err", max_err},
                                {"orthogonality_ok", orth_ok},
                                {"eigen_ratio_min", ratio_min},
                                {"eigen_ratio_max", ratio_max},
                                {"eigen_ok", eig_ok}};
        write_file(out / "modes_selftest.json", selftest.dump(1) + "\n");
        artifacts.push_back("modes_selftest.json");
        write_manifest(out, artifacts);
        if (!(orth_ok && eig_ok)) throw RunFailedError("spectral self-test failed");
    });
}

// --- profile-check (re-analysis of a stored run) --------------------------------

inline int run_profile_check(const RunConfig& cfg, const std::filesystem::path& run_dir,
                             const std::filesystem::path& out) {
    (void)cfg;
    return guarded(out, [&] {
        if (!std::filesystem::is_directory(run_dir))
            throw InputMissingError("run directory not found: " + run_dir.string());
        const auto snap_path = run_dir / "snapshots.json";
        if (!std::filesystem::exists(snap_path))
            throw InputMissingError("missing snapshots.json in " + run_dir.string());

        nlohmann::json snap;
        try {
            snap = nlohmann::json::parse(read_file(snap_path));
        } catch (const nlohmann::json::exception& e) {
            throw InputInvalidError("unparseable snapshots.json: " + std::string(e.what()));
        }

        ModelParams mp;
        ShrinkSetParams shrink;
        BlowupReport rep;
        std::shared_ptr<const RadialGrid> grid;
        try {
            mp.p = snap.at("model").at("p").get<double>();
            mp.d = snap.at("model").at("d").get<int>();
            const auto& g = snap.at("grid");
            if (g.at("kind").get<std::string>() == "uniform") {
                grid = std::make_shared<RadialGrid>(RadialGrid::uniform(
                    g.at("r_out").get<double>(), g.at("uniform_nodes").get<int>()));
            } else {
                RadialGridSpec spec;
                spec.r_out = g.at("r_out").get<double>();
                spec.h_min = g.at("h_min").get<double>();
                spec.h_coarse = g.at("h_coarse").get<double>();
                spec.grow = g.at("grow").get<double>();
                spec.ring = g.at("ring").get<double>();
                grid = std::make_shared<RadialGrid>(RadialGrid::graded(spec));
            }
            const auto& sh = snap.at("shrink");
            shrink.A = sh.at("A").get<double>();
            shrink.K = sh.at("K").get<double>();
            shrink.eps0 = sh.at("eps0").get<double>();
            shrink.eta0 = sh.at("eta0").get<double>();
            shrink.regular_radius = sh.at("regular_radius").get<double>();
            rep.T_est = json_number_back(snap.at("T_est"));
            rep.r_blow = json_number_back(snap.at("r_blow"));
            rep.stop_reason = snap.at("stop_reason").get<std::string>();
            rep.t_final = snap.at("t_final").get<double>();
            rep.u_final = snap.at("u_final").get<std::vector<double>>();
            for (const auto& j : snap.at("snapshots")) {
                FieldSnapshot sn;
                sn.t = j.at("t").get<double>();
                sn.s = j.at("s").get<double>();
                sn.u = j.at("u").get<std::vector<double>>();
                if (sn.u.size() != grid->r.size())
                    throw InputInvalidError("snapshot node count mismatches the grid spec");
                rep.snapshots.push_back(std::move(sn));
            }
        } catch (const nlohmann::json::exception& e) {
            throw InputInvalidError("snapshots.json lacks required fields: " +
                                    std::string(e.what()));
        }
        if (rep.u_final.size() != grid->r.size())
            throw InputInvalidError("final profile node count mismatches the grid spec");

        ProfileReport pr = build_profile_report(grid, rep, mp, shrink);
        write_file(out / "profile_report.json", profile_report_json(pr).dump(1) + "\n");
        write_manifest(out, {"profile_report.json"});
    });
}

}  // namespace ringblow
