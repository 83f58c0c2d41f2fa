#include "triwell/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

#include "triwell/checksum.hpp"
#include "triwell/classical.hpp"
#include "triwell/critical.hpp"
#include "triwell/errors.hpp"
#include "triwell/grid_io.hpp"
#include "triwell/husimi.hpp"
#include "triwell/version.hpp"

namespace triwell {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json config_to_json(const RunConfig& cfg) {
    json j;
    j["model"] = {{"U", cfg.U}, {"J", cfg.J}, {"eps_list", cfg.eps_list}, {"N", cfg.N}};
    j["husimi"] = {{"window", cfg.window}};
    j["energy"] = {{"targets", cfg.energy_list}};
    j["trajectory"] = {{"t_max_single", cfg.t_max_single},
                       {"t_max_multi", cfg.t_max_multi},
                       {"ic_count", cfg.ic_count},
                       {"rel_tol", cfg.rel_tol},
                       {"sample_dt", cfg.sample_dt},
                       {"seed", cfg.seed},
                       {"single_mode_halfwidth", cfg.single_mode_halfwidth},
                       {"eps_chaotic", cfg.eps_chaotic},
                       {"multi_ic_below_energy", cfg.multi_ic_below_energy},
                       {"export_csv", cfg.export_trajectories}};
    j["histogram"] = {{"bins", cfg.bins}};
    j["pr"] = {{"smoothing_width", cfg.smoothing_width}};
    j["run"] = {{"out_dir", cfg.out_dir.string()},
                {"cache_dir", cfg.resolved_cache_dir().string()},
                {"jobs", cfg.jobs}};
    return j;
}

std::string file_checksum_hex(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ComputeError("checksum: cannot read " + path.string());
    std::uint64_t sum = fnv1a64(nullptr, 0);
    char buf[1 << 16];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        sum = fnv1a64(buf, static_cast<std::size_t>(in.gcount()), sum);
    }
    char hex[17];
    std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(sum));
    return hex;
}

// Shared bookkeeping for one pipeline run; thread-safe where items run in
// a parallel pool.
class RunContext {
public:
    RunContext(const RunConfig& cfg, const std::string& command) : cfg_(cfg) {
        cfg_.validate();
        fs::create_directories(cfg_.out_dir);
        fs::create_directories(cfg_.resolved_cache_dir());
        manifest_["command"] = command;
        manifest_["version"] = kVersion;
        manifest_["config"] = config_to_json(cfg_);
        manifest_["artifacts"] = json::object();
        manifest_["failures"] = json::object();
        manifest_["cache"] = {{"hits", json::array()}, {"misses", json::array()}};
        manifest_["seeds"] = json::object();
        start_ = std::chrono::steady_clock::now();
    }

    const RunConfig& cfg() const { return cfg_; }
    const fs::path& dir() const { return cfg_.out_dir; }

    void record_artifact(const std::string& rel) {
        const std::string sum = file_checksum_hex(cfg_.out_dir / rel);
        std::lock_guard lock(mutex_);
        manifest_["artifacts"][rel] = sum;
    }

    void record_failure(const std::string& item, const std::string& what) {
        std::lock_guard lock(mutex_);
        manifest_["failures"][item] = what;
    }

    void record_seed(const std::string& item, std::uint64_t seed) {
        std::lock_guard lock(mutex_);
        manifest_["seeds"][item] = seed;
    }

    void record_cache(const std::string& file, bool hit) {
        std::lock_guard lock(mutex_);
        manifest_["cache"][hit ? "hits" : "misses"].push_back(file);
    }

    void note(const std::string& key, const json& value) {
        std::lock_guard lock(mutex_);
        manifest_[key] = value;
    }

    RunResult finish() {
        const auto elapsed = std::chrono::steady_clock::now() - start_;
        manifest_["wall_clock_s"] = std::chrono::duration<double>(elapsed).count();
        std::ofstream out(cfg_.out_dir / "manifest.json");
        out << manifest_.dump(2) << '\n';
        return RunResult{cfg_.out_dir, manifest_};
    }

private:
    RunConfig cfg_;
    json manifest_;
    std::mutex mutex_;
    std::chrono::steady_clock::time_point start_;
};

void parallel_for(int count, int jobs, const std::function<void(int)>& fn) {
    if (count <= 0) return;
    jobs = std::max(1, std::min(jobs, count));
    if (jobs == 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::mutex err_mutex;
    std::exception_ptr first_error;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(jobs));
    for (int w = 0; w < jobs; ++w) {
        pool.emplace_back([&] {
            while (true) {
                const int i = next.fetch_add(1);
                if (i >= count) break;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(err_mutex);
                    if (!first_error) first_error = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

std::string eps_tag(double eps) { return "eps" + format_double(eps); }
std::string energy_tag(double e) { return "e" + format_double(e); }

// Derived per-item RNG seed, stable across runs and item orderings.
std::uint64_t item_seed(std::uint64_t base, const std::string& label) {
    return fnv1a64(label.data(), label.size(), base ^ 0x9e3779b97f4a7c15ull);
}

int husimi_window_for(const RunConfig& cfg, int dimension) {
    return cfg.window > 0 ? cfg.window : default_husimi_window(dimension);
}

struct ClassicalEnsemble {
    OccupationHistogram histogram;
    double max_energy_drift = 0.0;
    double max_norm_drift = 0.0;
    int trajectories = 0;
};

void export_trajectories(RunContext& ctx, const std::vector<Trajectory>& trajs,
                         const std::string& stem) {
    for (std::size_t k = 0; k < trajs.size(); ++k) {
        const std::string rel = "traj_" + stem + "_ic" + std::to_string(k) + ".csv";
        write_trajectory_csv(trajs[k], ctx.dir() / rel);
        ctx.record_artifact(rel);
    }
}

ClassicalEnsemble run_classical(const RunConfig& cfg, double eps, double e_target,
                                bool single_mode, std::uint64_t seed,
                                RunContext* ctx = nullptr, const std::string& stem = {}) {
    const ClassicalParams cp(cfg.U, cfg.J, eps);
    const int count = single_mode ? 1 : cfg.ic_count;
    const double t_max = single_mode ? cfg.t_max_single : cfg.t_max_multi;

    const std::vector<ReducedPhasePoint> ics =
        sample_initial_conditions(cp, e_target, count, seed);

    IntegratorOptions opts;
    opts.t_max = t_max;
    opts.rel_tol = cfg.rel_tol;
    opts.sample_dt = cfg.sample_dt;

    std::vector<Trajectory> trajs(ics.size());
    for (std::size_t i = 0; i < ics.size(); ++i) {
        trajs[i] = integrate(to_cartesian(ics[i]), cp, opts);
    }
    if (cfg.export_trajectories && ctx != nullptr) {
        export_trajectories(*ctx, trajs, stem);
    }

    ClassicalEnsemble out{occupation_histogram(trajs, cfg.bins), 0.0, 0.0,
                          static_cast<int>(trajs.size())};
    for (const Trajectory& t : trajs) {
        out.max_energy_drift = std::max(out.max_energy_drift, t.energy_drift);
        out.max_norm_drift = std::max(out.max_norm_drift, t.norm_drift);
    }
    return out;
}

void export_husimi(RunContext& ctx, const HusimiGrid& grid, const std::string& stem) {
    write_husimi_csv(grid, ctx.dir() / (stem + ".csv"));
    write_pgm16(grid.values, ctx.dir() / (stem + ".pgm"));
    ctx.record_artifact(stem + ".csv");
    ctx.record_artifact(stem + ".pgm");
}

void export_histogram(RunContext& ctx, const OccupationHistogram& hist,
                      const std::string& stem) {
    write_histogram_csv(hist, ctx.dir() / (stem + ".csv"));
    write_pgm16(hist.mass, ctx.dir() / (stem + ".pgm"));
    ctx.record_artifact(stem + ".csv");
    ctx.record_artifact(stem + ".pgm");
}

void write_pairs_csv(RunContext& ctx, const std::string& rel,
                     const std::string& header,
                     const std::vector<std::pair<double, double>>& rows) {
    std::ofstream out(ctx.dir() / rel);
    out << header << '\n';
    for (const auto& [a, b] : rows) {
        out << format_double(a) << ',' << format_double(b) << '\n';
    }
    out.close();
    ctx.record_artifact(rel);
}

}  // namespace

Spectrum load_or_diagonalize(const ModelParams& p, const fs::path& cache_dir, bool* hit) {
    fs::create_directories(cache_dir);
    const fs::path file = cache_dir / cache_file_name(p);
    if (fs::exists(file)) {
        Spectrum s = cache_load(file, p);  // cache errors surface verbatim
        if (hit) *hit = true;
        return s;
    }
    Spectrum s = diagonalize(build_reduced(p), p);
    // temp + rename so a concurrent reader never sees a torn file
    const fs::path tmp = file.string() + ".tmp";
    cache_store(s, tmp);
    fs::rename(tmp, file);
    if (hit) *hit = false;
    return s;
}

RunResult cmd_spectrum(const RunConfig& cfg) {
    RunContext ctx(cfg, "spectrum");
    for (double eps : cfg.eps_list) {
        const ModelParams p{cfg.U, cfg.J, eps, cfg.N};
        bool hit = false;
        const Spectrum s = load_or_diagonalize(p, cfg.resolved_cache_dir(), &hit);
        ctx.record_cache(cache_file_name(p), hit);
        const std::string rel = "eigenvalues_" + eps_tag(eps) + ".csv";
        write_eigenvalues_csv(s, ctx.dir() / rel);
        ctx.record_artifact(rel);
    }
    return ctx.finish();
}

RunResult cmd_fig_husimi_sweep(const RunConfig& cfg) {
    RunContext ctx(cfg, "fig-husimi-sweep");
    const int n_items = static_cast<int>(cfg.eps_list.size());
    std::vector<std::pair<double, double>> critical_rows(cfg.eps_list.size(),
                                                         {0.0, std::nan("")});
    std::atomic<int> succeeded{0};

    parallel_for(n_items, cfg.jobs, [&](int i) {
        const double eps = cfg.eps_list[static_cast<std::size_t>(i)];
        critical_rows[static_cast<std::size_t>(i)].first = eps;
        try {
            const double e_c = unstable_critical_energy(ClassicalParams(cfg.U, cfg.J, eps));
            const ModelParams p{cfg.U, cfg.J, eps, cfg.N};
            bool hit = false;
            const Spectrum s = load_or_diagonalize(p, cfg.resolved_cache_dir(), &hit);
            ctx.record_cache(cache_file_name(p), hit);
            const HusimiGrid grid =
                husimi_at_energy(s, e_c, husimi_window_for(cfg, s.dimension()));
            export_husimi(ctx, grid, "husimi_" + eps_tag(eps));
            critical_rows[static_cast<std::size_t>(i)].second = e_c;
            ++succeeded;
        } catch (const ComputeError& err) {
            ctx.record_failure(eps_tag(eps), err.what());
        }
    });

    if (succeeded.load() == 0) {
        throw ComputeError("fig-husimi-sweep: every eps item failed");
    }
    std::vector<std::pair<double, double>> ok_rows;
    for (const auto& row : critical_rows) {
        if (!std::isnan(row.second)) ok_rows.push_back(row);
    }
    write_pairs_csv(ctx, "critical_energies.csv", "eps,e_c", ok_rows);
    return ctx.finish();
}

RunResult cmd_fig_classical_sweep(const RunConfig& cfg) {
    RunContext ctx(cfg, "fig-classical-sweep");
    const int n_items = static_cast<int>(cfg.eps_list.size());
    std::vector<std::pair<double, double>> critical_rows;
    std::mutex rows_mutex;
    std::atomic<int> succeeded{0};

    parallel_for(n_items, cfg.jobs, [&](int i) {
        const double eps = cfg.eps_list[static_cast<std::size_t>(i)];
        const std::string tag = eps_tag(eps);
        try {
            const double e_c = unstable_critical_energy(ClassicalParams(cfg.U, cfg.J, eps));
            const bool single = std::abs(eps - cfg.eps_chaotic) <= cfg.single_mode_halfwidth;
            const std::uint64_t seed = item_seed(cfg.seed, tag);
            ctx.record_seed(tag, seed);
            const ClassicalEnsemble ens = run_classical(cfg, eps, e_c, single, seed, &ctx, tag);
            export_histogram(ctx, ens.histogram, "classical_" + tag);
            {
                std::lock_guard lock(rows_mutex);
                critical_rows.emplace_back(eps, e_c);
            }
            ++succeeded;
        } catch (const ComputeError& err) {
            ctx.record_failure(tag, err.what());
        }
    });

    if (succeeded.load() == 0) {
        throw ComputeError("fig-classical-sweep: every eps item failed");
    }
    std::sort(critical_rows.begin(), critical_rows.end());
    write_pairs_csv(ctx, "critical_energies.csv", "eps,e_c", critical_rows);
    return ctx.finish();
}

RunResult cmd_fig_energy_scan(const RunConfig& cfg) {
    RunConfig scan_cfg = cfg;
    if (scan_cfg.energy_list.empty()) {
        scan_cfg.energy_list = {-0.9, -0.4, -0.03, 0.06, 0.075, 0.1, 0.3, 0.8};
    }
    RunContext ctx(scan_cfg, "fig-energy-scan");
    const double eps = scan_cfg.eps_list.front();
    const ModelParams p{scan_cfg.U, scan_cfg.J, eps, scan_cfg.N};

    bool hit = false;
    const Spectrum s = load_or_diagonalize(p, scan_cfg.resolved_cache_dir(), &hit);
    ctx.record_cache(cache_file_name(p), hit);

    // participation ratio alongside the paired panels
    const PrCurve pr = participation_ratio(s);
    write_pr_csv(pr, ctx.dir() / "pr_curve.csv");
    ctx.record_artifact("pr_curve.csv");
    const double peak = pr_peak_energy(pr, scan_cfg.smoothing_width);
    ctx.note("pr_peak_energy", peak);

    const int n_energy = static_cast<int>(scan_cfg.energy_list.size());
    std::vector<OccupationHistogram> quantum(static_cast<std::size_t>(n_energy));
    std::vector<OccupationHistogram> classical(static_cast<std::size_t>(n_energy));

    parallel_for(n_energy, scan_cfg.jobs, [&](int i) {
        const double e = scan_cfg.energy_list[static_cast<std::size_t>(i)];
        const std::string tag = energy_tag(e);
        const HusimiGrid grid = husimi_at_energy(s, e, husimi_window_for(scan_cfg, s.dimension()));
        export_husimi(ctx, grid, "husimi_" + tag);
        quantum[static_cast<std::size_t>(i)] = to_histogram(grid, scan_cfg.bins);

        const bool multi = e <= scan_cfg.multi_ic_below_energy;
        const std::uint64_t seed = item_seed(scan_cfg.seed, tag);
        ctx.record_seed(tag, seed);
        const ClassicalEnsemble ens = run_classical(scan_cfg, eps, e, !multi, seed, &ctx, tag);
        export_histogram(ctx, ens.histogram, "classical_" + tag);
        classical[static_cast<std::size_t>(i)] = ens.histogram;
    });

    // overlap matrix: rows = classical energy, columns = quantum energy
    {
        std::ofstream out(ctx.dir() / "overlap_matrix.csv");
        out << "classical_e\\quantum_e";
        for (double e : scan_cfg.energy_list) out << ',' << format_double(e);
        out << '\n';
        for (int i = 0; i < n_energy; ++i) {
            out << format_double(scan_cfg.energy_list[static_cast<std::size_t>(i)]);
            for (int j = 0; j < n_energy; ++j) {
                out << ','
                    << format_double(bhattacharyya(classical[static_cast<std::size_t>(i)],
                                                   quantum[static_cast<std::size_t>(j)]));
            }
            out << '\n';
        }
    }
    ctx.record_artifact("overlap_matrix.csv");
    return ctx.finish();
}

RunResult cmd_fig_shrimp(const RunConfig& cfg) {
    RunConfig shrimp_cfg = cfg;
    if (shrimp_cfg.energy_list.empty()) shrimp_cfg.energy_list = {0.075};
    RunContext ctx(shrimp_cfg, "fig-shrimp");
    const double e_fixed = shrimp_cfg.energy_list.front();
    const int n_items = static_cast<int>(shrimp_cfg.eps_list.size());

    parallel_for(n_items, shrimp_cfg.jobs, [&](int i) {
        const double eps = shrimp_cfg.eps_list[static_cast<std::size_t>(i)];
        const std::string tag = eps_tag(eps);
        const ModelParams p{shrimp_cfg.U, shrimp_cfg.J, eps, shrimp_cfg.N};
        bool hit = false;
        const Spectrum s = load_or_diagonalize(p, shrimp_cfg.resolved_cache_dir(), &hit);
        ctx.record_cache(cache_file_name(p), hit);
        const HusimiGrid grid =
            husimi_at_energy(s, e_fixed, husimi_window_for(shrimp_cfg, s.dimension()));
        export_husimi(ctx, grid, "husimi_" + tag);

        const std::uint64_t seed = item_seed(shrimp_cfg.seed, tag);
        ctx.record_seed(tag, seed);
        // superimposed trajectories on the classical side, all at e_fixed
        const ClassicalEnsemble ens = run_classical(shrimp_cfg, eps, e_fixed, false, seed, &ctx, tag);
        export_histogram(ctx, ens.histogram, "classical_" + tag);
    });
    return ctx.finish();
}

namespace {

double iqr_of(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    const auto q = [&](double f) {
        return values[static_cast<std::size_t>(f * (values.size() - 1))];
    };
    return q(0.75) - q(0.25);
}

// Scatter of PR values about their running mean, relative to the median PR
// level.  Raw spread alone is misleading: strongly localized spectra have
// tiny PR everywhere and hence a tiny absolute spread.
double relative_pr_dispersion(const PrCurve& pr, int width) {
    const int d = static_cast<int>(pr.scaled.size());
    std::vector<double> residuals(static_cast<std::size_t>(d));
    for (int m = 0; m < d; ++m) {
        int lo = std::max(0, m - width / 2);
        int hi = std::min(d, lo + width);
        lo = std::max(0, hi - width);
        double acc = 0.0;
        for (int k = lo; k < hi; ++k) acc += pr.scaled[static_cast<std::size_t>(k)];
        residuals[static_cast<std::size_t>(m)] =
            pr.scaled[static_cast<std::size_t>(m)] - acc / (hi - lo);
    }
    std::vector<double> sorted = pr.scaled;
    std::sort(sorted.begin(), sorted.end());
    const double median = sorted[sorted.size() / 2];
    return iqr_of(residuals) / std::max(median, 1e-300);
}

}  // namespace

RunResult cmd_pr_sweep(const RunConfig& cfg) {
    RunContext ctx(cfg, "pr-sweep");
    const int n_items = static_cast<int>(cfg.eps_list.size());
    std::vector<std::pair<double, double>> critical_rows(cfg.eps_list.size(),
                                                         {0.0, std::nan("")});
    std::vector<std::array<double, 3>> dispersion_rows(cfg.eps_list.size());

    parallel_for(n_items, cfg.jobs, [&](int i) {
        const double eps = cfg.eps_list[static_cast<std::size_t>(i)];
        const std::string tag = eps_tag(eps);
        const ModelParams p{cfg.U, cfg.J, eps, cfg.N};
        bool hit = false;
        const Spectrum s = load_or_diagonalize(p, cfg.resolved_cache_dir(), &hit);
        ctx.record_cache(cache_file_name(p), hit);
        const PrCurve pr = participation_ratio(s);
        write_pr_csv(pr, ctx.dir() / ("pr_" + tag + ".csv"));
        ctx.record_artifact("pr_" + tag + ".csv");

        dispersion_rows[static_cast<std::size_t>(i)] = {
            eps, iqr_of(pr.scaled), relative_pr_dispersion(pr, cfg.smoothing_width)};

        critical_rows[static_cast<std::size_t>(i)].first = eps;
        try {
            critical_rows[static_cast<std::size_t>(i)].second =
                unstable_critical_energy(ClassicalParams(cfg.U, cfg.J, eps));
        } catch (const ComputeError& err) {
            ctx.record_failure(tag, err.what());
        }
    });

    std::vector<std::pair<double, double>> ok_rows;
    for (const auto& row : critical_rows) {
        if (!std::isnan(row.second)) ok_rows.push_back(row);
    }
    write_pairs_csv(ctx, "pr_critical_energies.csv", "eps,e_c", ok_rows);

    {
        std::ofstream out(ctx.dir() / "pr_dispersion.csv");
        out << "eps,scaled_pr_iqr,relative_dispersion\n";
        for (const auto& row : dispersion_rows) {
            out << format_double(row[0]) << ',' << format_double(row[1]) << ','
                << format_double(row[2]) << '\n';
        }
    }
    ctx.record_artifact("pr_dispersion.csv");

    double best_eps = dispersion_rows.front()[0], best = dispersion_rows.front()[2];
    for (const auto& row : dispersion_rows) {
        if (row[2] < best) {
            best = row[2];
            best_eps = row[0];
        }
    }
    ctx.note("min_dispersion_eps", best_eps);
    return ctx.finish();
}

RunResult cmd_critical_points(const RunConfig& cfg) {
    RunContext ctx(cfg, "critical-points");
    for (double eps : cfg.eps_list) {
        const auto points = find_critical_points(ClassicalParams(cfg.U, cfg.J, eps));
        const std::string rel = "critical_" + eps_tag(eps) + ".csv";
        write_critical_csv(points, ctx.dir() / rel);
        ctx.record_artifact(rel);
    }
    return ctx.finish();
}

}  // namespace triwell
