#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace triwell {

// Resolved experiment configuration.  Precedence: built-in defaults
// < preset < config file < command-line flags.  Validated before any
// compute; the run manifest echoes the fully resolved values.
struct RunConfig {
    // model
    double U = 0.7;
    double J = 1.0;
    std::vector<double> eps_list = {1.5};
    int N = 100;

    // husimi
    int window = 0;  // 0 = auto: min(200, D/10)

    // energy targets (energy-scan and shrimp pipelines)
    std::vector<double> energy_list;

    // trajectories
    double t_max_single = 1e4;  // single long-time evolution
    double t_max_multi = 1e3;   // per IC in superposition mode
    int ic_count = 32;
    double rel_tol = 1e-10;
    double sample_dt = 0.05;
    std::uint64_t seed = 20240801;
    // |eps - eps_chaotic| <= this -> one long trajectory instead of many ICs
    double single_mode_halfwidth = 1.0;
    double eps_chaotic = 1.5;
    // energy-scan: energies at or below this use superimposed ICs
    double multi_ic_below_energy = -0.5;
    // also write per-IC trajectory CSVs (t, N1/N, N2/N, N3/N, e)
    bool export_trajectories = false;

    // histograms
    int bins = 60;

    // participation ratio
    int smoothing_width = 50;

    // run
    std::filesystem::path out_dir = "runs/out";
    std::filesystem::path cache_dir;  // empty: $TRIWELL_CACHE_DIR or out_dir/cache
    int jobs = 2;

    // Applies one "section.key = value" setting; throws ConfigError on
    // unknown keys or malformed values.
    void apply(const std::string& dotted_key, const std::string& value);

    // Loads an INI-style file ([section], key = value, '#' comments).
    void load_file(const std::filesystem::path& path);

    void validate() const;  // throws ConfigError

    std::filesystem::path resolved_cache_dir() const;
};

// Fills figure-preset defaults ("fig2", "fig3", "fig5", "fig6", "fig7",
// "fig8", "fig9"); throws ConfigError for unknown names.
void apply_preset(RunConfig& cfg, const std::string& preset);

// Parses "a,b,c" into doubles; throws ConfigError on malformed input.
std::vector<double> parse_double_list(const std::string& text);

}  // namespace triwell
