#pragma once

#include <json.hpp>

#include <filesystem>
#include <string>

#include "triwell/run_config.hpp"
#include "triwell/spectrum.hpp"

namespace triwell {

// Outcome of one experiment pipeline.  The manifest (also written to
// <out_dir>/manifest.json) echoes the resolved config, code version, seeds,
// wall clock, cache hits/misses, per-artifact checksums, and any per-item
// failures that did not abort the run.
struct RunResult {
    std::filesystem::path run_dir;
    nlohmann::json manifest;

    bool has_failures() const {
        return manifest.contains("failures") && !manifest["failures"].empty();
    }
};

// Diagonalizes (U, J, eps, N) or loads the cached spectrum from
// cfg-resolved cache dir; `hit` reports which happened.
Spectrum load_or_diagonalize(const ModelParams& p, const std::filesystem::path& cache_dir,
                             bool* hit);

// Eigenvalue table for each eps in the list (one spectrum cache + CSV each).
RunResult cmd_spectrum(const RunConfig& cfg);

// Per-eps Husimi grid centered at that eps's unstable critical energy.
RunResult cmd_fig_husimi_sweep(const RunConfig& cfg);

// Per-eps classical occupation histogram at the unstable critical energy;
// single long trajectory near the chaotic eps, superimposed ICs otherwise.
RunResult cmd_fig_classical_sweep(const RunConfig& cfg);

// Fixed eps: paired quantum grids and classical histograms across the
// energy list, plus the Bhattacharyya overlap matrix and the PR curve.
RunResult cmd_fig_energy_scan(const RunConfig& cfg);

// Fixed energy (default 0.075): eps sweep of paired quantum/classical
// outputs, always multi-IC on the classical side.
RunResult cmd_fig_shrimp(const RunConfig& cfg);

// PR curve per eps with the classical critical-energy annotation and an
// IQR dispersion summary.
RunResult cmd_pr_sweep(const RunConfig& cfg);

// Stationary-point table (n1, n3, phi12, phi32, e, class) per eps.
RunResult cmd_critical_points(const RunConfig& cfg);

}  // namespace triwell
