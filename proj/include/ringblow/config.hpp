// Strict INI-style configuration for the ring blow-up laboratory.
//
// Sections mirror the library layers: [model], [grid], [solver], [shrink],
// [shoot], [simulate], [stability], [run]. Every key is known and range
// checked at parse time; unknown sections or keys, duplicates, malformed
// numbers, and out-of-range values are all rejected with an error naming the
// offending key. An empty document yields the desk-scale defaults (p = 3,
// d = 2, T = e^-10, A = 10, K = 5, eps0 = 0.5, eta0 = 1, r_out = 4,
// m_stop = 1e8).
#pragma once

#include <cctype>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ringblow/core_model.hpp"
#include "ringblow/radial_grid.hpp"
#include "ringblow/radial_solver.hpp"
#include "ringblow/shooting.hpp"
#include "ringblow/shrinking_set.hpp"

namespace ringblow {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Parameters of the `simulate` experiment (one run plus its diagnostics).
struct SimulateParams {
    std::string data = "ring";  // ring | flat
    bool prescribed = false;    // ring data: track the prescribed frame
    double snapshot_ds = 0.05;
};

// Parameters of the `shoot` experiment (boundary sweep + rectangle search).
struct ShootParams {
    double horizon = 25.0;     // trap-tracking window past s0, in s-units
    int budget = 200;          // rectangle-search probe budget
    int boundary_samples = 16; // exit-map samples along the entry square
    double snapshot_ds = 0.05;
    int quad_nodes = 64;
    bool degree = true;  // run the boundary winding sweep
    bool search = true;  // run the survivor search
};

// Parameters of the `stability` experiment.
struct StabilityParams {
    std::vector<double> deltas = {1e-2, 1e-3, 1e-4};
    int n_dirs = 3;
};

struct RunConfig {
    ModelParams model;
    ShrinkSetParams shrink;
    RadialGridSpec grid;
    std::string grid_kind = "graded";  // graded | uniform
    int uniform_nodes = 201;
    SolverOptions solver;
    double d0 = 0.0;
    double d1 = 0.0;
    double T = std::exp(-10.0);
    SimulateParams simulate;
    ShootParams shoot;
    StabilityParams stability;
    std::string out_dir;  // empty: resolved by the CLI (flag, env, default)
    std::uint64_t seed = 12345;
    int jobs = 1;

    InitialDataParams initial_data() const {
        InitialDataParams ip;
        ip.d0 = d0;
        ip.d1 = d1;
        ip.T = T;
        ip.model = model;
        ip.shrink = shrink;
        return ip;
    }

    ShootConfig shoot_config() const {
        ShootConfig sc;
        sc.grid = grid;
        sc.horizon = shoot.horizon;
        sc.snapshot_ds = shoot.snapshot_ds;
        sc.quad_nodes = shoot.quad_nodes;
        sc.solver = solver;
        return sc;
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

inline double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing characters");
        if (!std::isfinite(x)) throw std::invalid_argument("not finite");
        return x;
    } catch (const std::exception&) {
        throw ConfigError("config: key '" + key + "': not a finite number: '" + v + "'");
    }
}

inline long long parse_int(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        long long x = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing characters");
        return x;
    } catch (const std::exception&) {
        throw ConfigError("config: key '" + key + "': not an integer: '" + v + "'");
    }
}

inline std::uint64_t parse_u64(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        unsigned long long x = std::stoull(v, &pos);
        if (pos != v.size() || v.find('-') != std::string::npos)
            throw std::invalid_argument("trailing characters");
        return x;
    } catch (const std::exception&) {
        throw ConfigError("config: key '" + key + "': not a nonnegative integer: '" + v + "'");
    }
}

inline bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "on" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "off" || v == "no") return false;
    throw ConfigError("config: key '" + key + "': not a boolean: '" + v + "'");
}

inline std::vector<double> parse_double_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty())
            throw ConfigError("config: key '" + key + "': empty list element");
        out.push_back(parse_double(key, item));
    }
    if (out.empty()) throw ConfigError("config: key '" + key + "': empty list");
    return out;
}

inline void require(bool ok, const std::string& key, const std::string& what) {
    if (!ok) throw ConfigError("config: key '" + key + "': " + what);
}

}  // namespace detail

// Parse and fully validate a configuration document. Throws ConfigError with
// the offending key in the message on any problem.
inline RunConfig parse_config(const std::string& text) {
    using detail::parse_bool;
    using detail::parse_double;
    using detail::parse_double_list;
    using detail::parse_int;
    using detail::parse_u64;
    using detail::require;

    RunConfig cfg;

    // setter table: "section.key" -> validated assignment
    std::map<std::string, std::function<void(const std::string&, const std::string&)>> keys;

    keys["model.p"] = [&](const std::string& k, const std::string& v) {
        cfg.model.p = parse_double(k, v);
        require(cfg.model.p > 1.0, k, "need p > 1");
    };
    keys["model.d"] = [&](const std::string& k, const std::string& v) {
        long long d = parse_int(k, v);
        require(d >= 2 && d <= 16, k, "need dimension in [2, 16]");
        cfg.model.d = static_cast<int>(d);
    };

    keys["grid.kind"] = [&](const std::string& k, const std::string& v) {
        require(v == "graded" || v == "uniform", k, "need 'graded' or 'uniform'");
        cfg.grid_kind = v;
    };
    keys["grid.r_out"] = [&](const std::string& k, const std::string& v) {
        cfg.grid.r_out = parse_double(k, v);
        require(cfg.grid.r_out > 1.0, k, "need r_out > 1");
    };
    keys["grid.h_min"] = [&](const std::string& k, const std::string& v) {
        cfg.grid.h_min = parse_double(k, v);
        require(cfg.grid.h_min > 0.0, k, "need h_min > 0");
    };
    keys["grid.h_coarse"] = [&](const std::string& k, const std::string& v) {
        cfg.grid.h_coarse = parse_double(k, v);
        require(cfg.grid.h_coarse > 0.0, k, "need h_coarse > 0");
    };
    keys["grid.grow"] = [&](const std::string& k, const std::string& v) {
        cfg.grid.grow = parse_double(k, v);
        require(cfg.grid.grow > 1.0 && cfg.grid.grow <= 2.0, k, "need grow in (1, 2]");
    };
    keys["grid.uniform_nodes"] = [&](const std::string& k, const std::string& v) {
        long long n = parse_int(k, v);
        require(n >= 11 && n <= 2000000, k, "need uniform_nodes in [11, 2e6]");
        cfg.uniform_nodes = static_cast<int>(n);
    };

    keys["solver.m_stop"] = [&](const std::string& k, const std::string& v) {
        cfg.solver.m_stop = parse_double(k, v);
        require(cfg.solver.m_stop > 1.0, k, "need m_stop > 1");
    };
    keys["solver.c_nl"] = [&](const std::string& k, const std::string& v) {
        cfg.solver.c_nl = parse_double(k, v);
        require(cfg.solver.c_nl > 0.0 && cfg.solver.c_nl <= 1.0, k, "need c_nl in (0, 1]");
    };
    keys["solver.dt_max"] = [&](const std::string& k, const std::string& v) {
        cfg.solver.dt_max = parse_double(k, v);
        require(cfg.solver.dt_max > 0.0, k, "need dt_max > 0");
    };
    keys["solver.t_max"] = [&](const std::string& k, const std::string& v) {
        cfg.solver.t_max = parse_double(k, v);
        require(cfg.solver.t_max > 0.0, k, "need t_max > 0");
    };
    keys["solver.max_steps"] = [&](const std::string& k, const std::string& v) {
        long long n = parse_int(k, v);
        require(n >= 1, k, "need max_steps >= 1");
        cfg.solver.max_steps = n;
    };
    keys["solver.guard_factor"] = [&](const std::string& k, const std::string& v) {
        cfg.solver.guard_factor = parse_double(k, v);
        require(cfg.solver.guard_factor >= 1.0, k, "need guard_factor >= 1");
    };
    keys["solver.outer_bc"] = [&](const std::string& k, const std::string& v) {
        if (v == "dirichlet")
            cfg.solver.outer_bc = OuterBC::dirichlet;
        else if (v == "neumann")
            cfg.solver.outer_bc = OuterBC::neumann;
        else
            throw ConfigError("config: key '" + k + "': need 'dirichlet' or 'neumann'");
    };

    keys["shrink.A"] = [&](const std::string& k, const std::string& v) {
        cfg.shrink.A = parse_double(k, v);
        require(cfg.shrink.A >= 1.0, k, "need A >= 1");
    };
    keys["shrink.K"] = [&](const std::string& k, const std::string& v) {
        cfg.shrink.K = parse_double(k, v);
        require(cfg.shrink.K >= 1.0, k, "need K >= 1");
    };
    keys["shrink.eps0"] = [&](const std::string& k, const std::string& v) {
        cfg.shrink.eps0 = parse_double(k, v);
        require(cfg.shrink.eps0 > 0.0 && cfg.shrink.eps0 < 1.0, k, "need eps0 in (0, 1)");
        cfg.shrink.regular_radius = 3.0 * cfg.shrink.eps0 / 32.0;
    };
    keys["shrink.eta0"] = [&](const std::string& k, const std::string& v) {
        cfg.shrink.eta0 = parse_double(k, v);
        require(cfg.shrink.eta0 > 0.0 && cfg.shrink.eta0 <= 1.0, k, "need eta0 in (0, 1]");
    };

    keys["shoot.d0"] = [&](const std::string& k, const std::string& v) {
        cfg.d0 = parse_double(k, v);
        require(std::fabs(cfg.d0) <= 2.0, k, "need |d0| <= 2");
    };
    keys["shoot.d1"] = [&](const std::string& k, const std::string& v) {
        cfg.d1 = parse_double(k, v);
        require(std::fabs(cfg.d1) <= 2.0, k, "need |d1| <= 2");
    };
    keys["shoot.T"] = [&](const std::string& k, const std::string& v) {
        cfg.T = parse_double(k, v);
        require(cfg.T > 0.0 && cfg.T < 1.0, k, "need T in (0, 1)");
    };
    keys["shoot.horizon"] = [&](const std::string& k, const std::string& v) {
        cfg.shoot.horizon = parse_double(k, v);
        require(cfg.shoot.horizon > 0.0, k, "need horizon > 0");
    };
    keys["shoot.budget"] = [&](const std::string& k, const std::string& v) {
        long long n = parse_int(k, v);
        require(n >= 1 && n <= 100000, k, "need budget in [1, 1e5]");
        cfg.shoot.budget = static_cast<int>(n);
    };
    keys["shoot.boundary_samples"] = [&](const std::string& k, const std::string& v) {
        long long n = parse_int(k, v);
        require(n >= 8 && n % 4 == 0 && n <= 4096, k,
                "need a multiple of 4 in [8, 4096]");
        cfg.shoot.boundary_samples = static_cast<int>(n);
    };
    keys["shoot.snapshot_ds"] = [&](const std::string& k, const std::string& v) {
        cfg.shoot.snapshot_ds = parse_double(k, v);
        require(cfg.shoot.snapshot_ds > 0.0, k, "need snapshot_ds > 0");
    };
    keys["shoot.quad_nodes"] = [&](const std::string& k, const std::string& v) {
        long long n = parse_int(k, v);
        require(n >= 16 && n <= 512, k, "need quad_nodes in [16, 512]");
        cfg.shoot.quad_nodes = static_cast<int>(n);
    };
    keys["shoot.degree"] = [&](const std::string& k, const std::string& v) {
        cfg.shoot.degree = parse_bool(k, v);
    };
    keys["shoot.search"] = [&](const std::string& k, const std::string& v) {
        cfg.shoot.search = parse_bool(k, v);
    };

    keys["simulate.data"] = [&](const std::string& k, const std::string& v) {
        require(v == "ring" || v == "flat", k, "need 'ring' or 'flat'");
        cfg.simulate.data = v;
    };
    keys["simulate.prescribed"] = [&](const std::string& k, const std::string& v) {
        cfg.simulate.prescribed = parse_bool(k, v);
    };
    keys["simulate.snapshot_ds"] = [&](const std::string& k, const std::string& v) {
        cfg.simulate.snapshot_ds = parse_double(k, v);
        require(cfg.simulate.snapshot_ds > 0.0, k, "need snapshot_ds > 0");
    };

    keys["stability.deltas"] = [&](const std::string& k, const std::string& v) {
        cfg.stability.deltas = parse_double_list(k, v);
        for (double x : cfg.stability.deltas)
            require(x > 0.0 && x < 1.0, k, "need every delta in (0, 1)");
    };
    keys["stability.n_dirs"] = [&](const std::string& k, const std::string& v) {
        long long n = parse_int(k, v);
        require(n >= 1 && n <= 64, k, "need n_dirs in [1, 64]");
        cfg.stability.n_dirs = static_cast<int>(n);
    };

    keys["run.out_dir"] = [&](const std::string&, const std::string& v) { cfg.out_dir = v; };
    keys["run.seed"] = [&](const std::string& k, const std::string& v) {
        cfg.seed = parse_u64(k, v);
    };
    keys["run.jobs"] = [&](const std::string& k, const std::string& v) {
        long long n = parse_int(k, v);
        require(n >= 1 && n <= 256, k, "need jobs in [1, 256]");
        cfg.jobs = static_cast<int>(n);
    };

    // line-based scan
    std::set<std::string> seen;
    std::string section;
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string line = detail::trim(raw);
        if (line.empty() || line[0] == '#' || line[0] == ';') continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("config: line " + std::to_string(lineno) +
                                  ": unterminated section header");
            section = detail::trim(line.substr(1, line.size() - 2));
            static const std::set<std::string> known_sections = {
                "model", "grid", "solver", "shrink", "shoot",
                "simulate", "stability", "run"};
            if (!known_sections.count(section))
                throw ConfigError("config: unknown section '[" + section + "]'");
            continue;
        }
        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: line " + std::to_string(lineno) +
                              ": expected 'key = value': '" + line + "'");
        std::string key = detail::trim(line.substr(0, eq));
        std::string value = detail::trim(line.substr(eq + 1));
        if (section.empty())
            throw ConfigError("config: key '" + key + "' appears before any section");
        if (key.empty())
            throw ConfigError("config: line " + std::to_string(lineno) + ": empty key");
        std::string full = section + "." + key;
        auto it = keys.find(full);
        if (it == keys.end()) throw ConfigError("config: unknown key '" + full + "'");
        if (!seen.insert(full).second)
            throw ConfigError("config: duplicate key '" + full + "'");
        it->second(full, value);
    }

    // cross-field consistency guards
    detail::require(cfg.grid.h_coarse >= cfg.grid.h_min, "grid.h_coarse",
                    "need h_coarse >= h_min");
    {
        double s0 = -std::log(cfg.T);
        detail::require(s0 >= std::exp(1.0), "shoot.T",
                        "need s0 = -log T >= e (T too close to 1)");
        // sample domain |y| <= 6 K sqrt(s0) must stay clear of the inner
        // cutoff ramp at eps0/4
        detail::require(6.0 * cfg.shrink.K * std::sqrt(s0) * std::sqrt(cfg.T) <=
                            1.0 - cfg.shrink.eps0 / 4.0,
                        "shoot.T",
                        "sample domain reaches the inner cutoff ramp; decrease T or K");
    }
    try {
        cfg.model.validate();
        cfg.shrink.validate();
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return cfg;
}

// Serialize the effective configuration as a parse_config-compatible document.
// parse_config(dump_config(cfg)) reproduces cfg exactly.
inline std::string dump_config(const RunConfig& cfg) {
    auto g17 = [](double v) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    std::ostringstream out;
    out << "[model]\n";
    out << "p = " << g17(cfg.model.p) << "\n";
    out << "d = " << cfg.model.d << "\n";
    out << "\n[grid]\n";
    out << "kind = " << cfg.grid_kind << "\n";
    out << "r_out = " << g17(cfg.grid.r_out) << "\n";
    out << "h_min = " << g17(cfg.grid.h_min) << "\n";
    out << "h_coarse = " << g17(cfg.grid.h_coarse) << "\n";
    out << "grow = " << g17(cfg.grid.grow) << "\n";
    out << "uniform_nodes = " << cfg.uniform_nodes << "\n";
    out << "\n[solver]\n";
    out << "m_stop = " << g17(cfg.solver.m_stop) << "\n";
    out << "c_nl = " << g17(cfg.solver.c_nl) << "\n";
    out << "dt_max = " << g17(cfg.solver.dt_max) << "\n";
    out << "t_max = " << g17(cfg.solver.t_max) << "\n";
    out << "max_steps = " << cfg.solver.max_steps << "\n";
    out << "guard_factor = " << g17(cfg.solver.guard_factor) << "\n";
    out << "outer_bc = "
        << (cfg.solver.outer_bc == OuterBC::neumann ? "neumann" : "dirichlet") << "\n";
    out << "\n[shrink]\n";
    out << "A = " << g17(cfg.shrink.A) << "\n";
    out << "K = " << g17(cfg.shrink.K) << "\n";
    out << "eps0 = " << g17(cfg.shrink.eps0) << "\n";
    out << "eta0 = " << g17(cfg.shrink.eta0) << "\n";
    out << "\n[shoot]\n";
    out << "d0 = " << g17(cfg.d0) << "\n";
    out << "d1 = " << g17(cfg.d1) << "\n";
    out << "T = " << g17(cfg.T) << "\n";
    out << "horizon = " << g17(cfg.shoot.horizon) << "\n";
    out << "budget = " << cfg.shoot.budget << "\n";
    out << "boundary_samples = " << cfg.shoot.boundary_samples << "\n";
    out << "snapshot_ds = " << g17(cfg.shoot.snapshot_ds) << "\n";
    out << "quad_nodes = " << cfg.shoot.quad_nodes << "\n";
    out << "degree = " << (cfg.shoot.degree ? "true" : "false") << "\n";
    out << "search = " << (cfg.shoot.search ? "true" : "false") << "\n";
    out << "\n[simulate]\n";
    out << "data = " << cfg.simulate.data << "\n";
    out << "prescribed = " << (cfg.simulate.prescribed ? "true" : "false") << "\n";
    out << "snapshot_ds = " << g17(cfg.simulate.snapshot_ds) << "\n";
    out << "\n[stability]\n";
    out << "deltas = ";
    for (std::size_t i = 0; i < cfg.stability.deltas.size(); ++i)
        out << (i ? ", " : "") << g17(cfg.stability.deltas[i]);
    out << "\n";
    out << "n_dirs = " << cfg.stability.n_dirs << "\n";
    out << "\n[run]\n";
    if (!cfg.out_dir.empty()) out << "out_dir = " << cfg.out_dir << "\n";
    out << "seed = " << cfg.seed << "\n";
    out << "jobs = " << cfg.jobs << "\n";
    return out.str();
}

}  // namespace ringblow
