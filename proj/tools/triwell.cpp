// Experiment driver for the tilted three-well model: spectra, Husimi and
// participation-ratio observables, classical trajectory histograms, and the
// figure-reproduction pipelines.
//
// Exit codes: 0 success, 2 config error, 3 compute error, 4 cache error.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <string>

#include "triwell/errors.hpp"
#include "triwell/pipeline.hpp"
#include "triwell/run_config.hpp"
#include "triwell/version.hpp"

namespace {

struct Flags {
    std::string config_file;
    std::string preset;
    // value + present marker for every overridable field
    double U = 0, J = 0, eps = 0, rel_tol = 0, sample_dt = 0;
    double t_max_single = 0, t_max_multi = 0;
    std::string eps_list, energies;
    int N = 0, window = 0, ic_count = 0, bins = 0, smoothing = 0, jobs = 0;
    std::uint64_t seed = 0;
    std::string out_dir, cache_dir;
};

void add_common_flags(CLI::App* cmd, Flags& f) {
    cmd->add_option("--config", f.config_file, "INI config file (key = value with sections)");
    cmd->add_option("--preset", f.preset, "figure preset: fig2 fig3 fig5 fig6 fig7 fig8 fig9");
    cmd->add_option("--U", f.U, "interaction coupling U");
    cmd->add_option("--J", f.J, "tunneling amplitude J");
    cmd->add_option("--eps", f.eps, "tilt amplitude (single value)");
    cmd->add_option("--eps-list", f.eps_list, "comma-separated tilt values");
    cmd->add_option("--N", f.N, "particle count");
    cmd->add_option("--window", f.window, "Husimi window size (0 = auto)");
    cmd->add_option("--energies", f.energies, "comma-separated per-particle energy targets");
    cmd->add_option("--t-max-single", f.t_max_single, "single-trajectory evolution time (1/J)");
    cmd->add_option("--t-max-multi", f.t_max_multi, "per-IC evolution time in multi mode (1/J)");
    cmd->add_option("--ic-count", f.ic_count, "initial conditions in multi mode");
    cmd->add_option("--rel-tol", f.rel_tol, "integrator relative tolerance");
    cmd->add_option("--sample-dt", f.sample_dt, "trajectory sampling interval (1/J)");
    cmd->add_option("--seed", f.seed, "RNG seed");
    cmd->add_option("--bins", f.bins, "histogram bins per axis");
    cmd->add_option("--smoothing", f.smoothing, "PR peak smoothing width (states)");
    cmd->add_option("--out-dir", f.out_dir, "run output directory");
    cmd->add_option("--cache-dir", f.cache_dir,
                    "spectrum cache directory (default $TRIWELL_CACHE_DIR)");
    cmd->add_option("--jobs", f.jobs, "parallel work items");
}

triwell::RunConfig resolve(const CLI::App* cmd, const Flags& f) {
    triwell::RunConfig cfg;
    if (!f.preset.empty()) triwell::apply_preset(cfg, f.preset);
    if (!f.config_file.empty()) cfg.load_file(f.config_file);

    const auto given = [&](const char* name) { return cmd->count(name) > 0; };
    if (given("--U")) cfg.U = f.U;
    if (given("--J")) cfg.J = f.J;
    if (given("--eps")) cfg.eps_list = {f.eps};
    if (given("--eps-list")) cfg.eps_list = triwell::parse_double_list(f.eps_list);
    if (given("--N")) cfg.N = f.N;
    if (given("--window")) cfg.window = f.window;
    if (given("--energies")) cfg.energy_list = triwell::parse_double_list(f.energies);
    if (given("--t-max-single")) cfg.t_max_single = f.t_max_single;
    if (given("--t-max-multi")) cfg.t_max_multi = f.t_max_multi;
    if (given("--ic-count")) cfg.ic_count = f.ic_count;
    if (given("--rel-tol")) cfg.rel_tol = f.rel_tol;
    if (given("--sample-dt")) cfg.sample_dt = f.sample_dt;
    if (given("--seed")) cfg.seed = f.seed;
    if (given("--bins")) cfg.bins = f.bins;
    if (given("--smoothing")) cfg.smoothing_width = f.smoothing;
    if (given("--out-dir")) cfg.out_dir = f.out_dir;
    if (given("--cache-dir")) cfg.cache_dir = f.cache_dir;
    if (given("--jobs")) cfg.jobs = f.jobs;
    cfg.validate();
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"tilted three-well quantum/classical correspondence toolkit"};
    app.set_version_flag("--version", triwell::kVersion);
    app.require_subcommand(1);

    struct Sub {
        const char* name;
        const char* help;
        triwell::RunResult (*run)(const triwell::RunConfig&);
    };
    const Sub subs[] = {
        {"spectrum", "diagonalize and export eigenvalues (cached)", triwell::cmd_spectrum},
        {"fig-husimi-sweep", "Husimi grids at each eps's critical energy",
         triwell::cmd_fig_husimi_sweep},
        {"fig-classical-sweep", "classical histograms at each eps's critical energy",
         triwell::cmd_fig_classical_sweep},
        {"fig-energy-scan", "paired quantum/classical panels across energies at fixed eps",
         triwell::cmd_fig_energy_scan},
        {"fig-shrimp", "fixed-energy eps sweep (quantum + multi-IC classical)",
         triwell::cmd_fig_shrimp},
        {"pr-sweep", "participation-ratio curves per eps with critical-energy markers",
         triwell::cmd_pr_sweep},
        {"critical-points", "stationary-point table per eps", triwell::cmd_critical_points},
    };

    Flags flags[std::size(subs)];
    CLI::App* cmds[std::size(subs)];
    for (std::size_t i = 0; i < std::size(subs); ++i) {
        cmds[i] = app.add_subcommand(subs[i].name, subs[i].help);
        add_common_flags(cmds[i], flags[i]);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);  // prints help/usage
        return code == 0 ? 0 : 2;      // flag misuse is a config error
    }

    for (std::size_t i = 0; i < std::size(subs); ++i) {
        if (!cmds[i]->parsed()) continue;
        try {
            const triwell::RunConfig cfg = resolve(cmds[i], flags[i]);
            const triwell::RunResult result = subs[i].run(cfg);
            std::cout << "run directory: " << result.run_dir.string() << '\n';
            if (result.has_failures()) {
                std::cout << "completed with recorded failures:\n"
                          << result.manifest["failures"].dump(2) << '\n';
            }
            return 0;
        } catch (const triwell::ConfigError& e) {
            std::cerr << "config error: " << e.what() << '\n';
            return 2;
        } catch (const triwell::CacheError& e) {
            std::cerr << "cache error (" << triwell::to_string(e.code) << "): " << e.what()
                      << '\n';
            return 4;
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << '\n';
            return 3;
        }
    }
    return 2;
}
