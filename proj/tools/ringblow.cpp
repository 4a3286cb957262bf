// Command-line front end for the ring blow-up laboratory.
//
//   ringblow simulate       one run plus its diagnostics artifacts
//   ringblow shoot          boundary degree sweep + survivor search
//   ringblow stability      perturbation continuity study
//   ringblow modes          spectral self-tests
//   ringblow profile-check  re-analyze a stored run directory
//
// Global flags: --config PATH (strict INI), --out DIR, --seed N, --jobs N.
// The default output root is $RINGBLOW_OUT_ROOT (falling back to ./out), with
// one subdirectory per subcommand. Exit codes: 0 ok, 2 usage, 3 config error,
// 4 input not found/invalid, 5 run failed, 6 write failure, 7 internal.
#include <cstdlib>
#include <filesystem>
#include <string>

#include <CLI11.hpp>

#include "ringblow/config.hpp"
#include "ringblow/experiments.hpp"
#include "ringblow/io.hpp"

using namespace ringblow;

int main(int argc, char** argv) {
    CLI::App app{"ring blow-up numerical laboratory"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand name

    std::string config_path;
    std::string out_flag;
    std::uint64_t seed_flag = 0;
    int jobs_flag = 0;
    app.add_option("--config", config_path, "configuration file (strict INI)");
    app.add_option("--out", out_flag, "output directory");
    app.add_option("--seed", seed_flag, "perturbation-shape seed");
    app.add_option("--jobs", jobs_flag, "worker threads for sweeps")
        ->check(CLI::Range(1, 256));

    CLI::App* cmd_simulate =
        app.add_subcommand("simulate", "one run plus its diagnostics artifacts");
    CLI::App* cmd_shoot =
        app.add_subcommand("shoot", "boundary degree sweep + survivor search");
    CLI::App* cmd_stability =
        app.add_subcommand("stability", "perturbation continuity study");
    CLI::App* cmd_modes = app.add_subcommand("modes", "spectral self-tests");
    CLI::App* cmd_profile =
        app.add_subcommand("profile-check", "re-analyze a stored run directory");
    std::string run_dir;
    cmd_profile->add_option("run_dir", run_dir, "stored run directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : exit_usage;
    }

    RunConfig cfg;
    if (!config_path.empty()) {
        try {
            cfg = parse_config(read_file(config_path));
        } catch (const std::exception& e) {
            write_error_record({}, exit_config, "config-error", e.what());
            return exit_config;
        }
    }
    if (app.count("--seed") > 0) cfg.seed = seed_flag;
    if (jobs_flag > 0) cfg.jobs = jobs_flag;

    std::string cmd = cmd_simulate->parsed()    ? "simulate"
                      : cmd_shoot->parsed()     ? "shoot"
                      : cmd_stability->parsed() ? "stability"
                      : cmd_modes->parsed()     ? "modes"
                                                : "profile-check";

    std::filesystem::path out;
    if (!out_flag.empty()) {
        out = out_flag;
    } else if (!cfg.out_dir.empty()) {
        out = cfg.out_dir;
    } else {
        const char* root = std::getenv("RINGBLOW_OUT_ROOT");
        out = std::filesystem::path(root && *root ? root : "out") / cmd;
    }
    try {
        std::filesystem::create_directories(out);
    } catch (const std::exception& e) {
        write_error_record({}, exit_io, "io-error", e.what());
        return exit_io;
    }

    if (cmd == "simulate") return run_simulate(cfg, out);
    if (cmd == "shoot") return run_shoot(cfg, out, cfg.jobs);
    if (cmd == "stability") return run_stability(cfg, out);
    if (cmd == "modes") return run_modes(cfg, out);
    return run_profile_check(cfg, run_dir, out);
}
