#include "triwell/run_config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "triwell/errors.hpp"
#include "triwell/fock.hpp"

namespace triwell {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config: bad number for " + key + ": '" + value + "'");
    }
}

long parse_int(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const long v = std::stol(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config: bad integer for " + key + ": '" + value + "'");
    }
}

}  // namespace

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) throw ConfigError("config: empty element in list '" + text + "'");
        out.push_back(parse_double("list element", item));
    }
    if (out.empty()) throw ConfigError("config: empty list");
    return out;
}

void RunConfig::apply(const std::string& key, const std::string& value) {
    if (key == "model.U") U = parse_double(key, value);
    else if (key == "model.J") J = parse_double(key, value);
    else if (key == "model.eps") eps_list = {parse_double(key, value)};
    else if (key == "model.eps_list") eps_list = parse_double_list(value);
    else if (key == "model.N") N = static_cast<int>(parse_int(key, value));
    else if (key == "husimi.window") window = static_cast<int>(parse_int(key, value));
    else if (key == "energy.targets") energy_list = parse_double_list(value);
    else if (key == "trajectory.t_max_single") t_max_single = parse_double(key, value);
    else if (key == "trajectory.t_max_multi") t_max_multi = parse_double(key, value);
    else if (key == "trajectory.ic_count") ic_count = static_cast<int>(parse_int(key, value));
    else if (key == "trajectory.rel_tol") rel_tol = parse_double(key, value);
    else if (key == "trajectory.sample_dt") sample_dt = parse_double(key, value);
    else if (key == "trajectory.seed") seed = static_cast<std::uint64_t>(parse_int(key, value));
    else if (key == "trajectory.single_mode_halfwidth") single_mode_halfwidth = parse_double(key, value);
    else if (key == "trajectory.eps_chaotic") eps_chaotic = parse_double(key, value);
    else if (key == "trajectory.multi_ic_below_energy") multi_ic_below_energy = parse_double(key, value);
    else if (key == "trajectory.export_csv") export_trajectories = (value == "true" || value == "1");
    else if (key == "histogram.bins") bins = static_cast<int>(parse_int(key, value));
    else if (key == "pr.smoothing_width") smoothing_width = static_cast<int>(parse_int(key, value));
    else if (key == "run.out_dir") out_dir = value;
    else if (key == "run.cache_dir") cache_dir = value;
    else if (key == "run.jobs") jobs = static_cast<int>(parse_int(key, value));
    else throw ConfigError("config: unknown key '" + key + "'");
}

void RunConfig::load_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path.string());
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[' && line.back() == ']') {
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config: " + path.string() + ":" + std::to_string(lineno) +
                              ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (section.empty()) throw ConfigError("config: key outside a [section]: " + key);
        apply(section + "." + key, value);
    }
}

void RunConfig::validate() const {
    if (N < 1) throw ConfigError("config: N must be >= 1");
    if (fock_dimension(N) > 200000) {
        throw ConfigError("config: N too large for dense diagonalization (D > 2e5)");
    }
    if (eps_list.empty()) throw ConfigError("config: eps list must not be empty");
    if (!(J == J) || !(U == U)) throw ConfigError("config: U, J must be numbers");
    if (window < 0) throw ConfigError("config: husimi window must be >= 0");
    if (!(t_max_single > 0) || !(t_max_multi > 0)) {
        throw ConfigError("config: trajectory times must be > 0");
    }
    if (ic_count < 1) throw ConfigError("config: ic_count must be >= 1");
    if (!(rel_tol >= 1e-12 && rel_tol <= 1e-4)) {
        throw ConfigError("config: rel_tol must lie in [1e-12, 1e-4]");
    }
    if (!(sample_dt > 0)) throw ConfigError("config: sample_dt must be > 0");
    if (bins < 2) throw ConfigError("config: bins must be >= 2");
    if (smoothing_width < 1) throw ConfigError("config: smoothing_width must be >= 1");
    if (jobs < 1) throw ConfigError("config: jobs must be >= 1");
    if (out_dir.empty()) throw ConfigError("config: out_dir must be set");
}

std::filesystem::path RunConfig::resolved_cache_dir() const {
    if (!cache_dir.empty()) return cache_dir;
    if (const char* env = std::getenv("TRIWELL_CACHE_DIR"); env != nullptr && *env != '\0') {
        return std::filesystem::path(env);
    }
    return out_dir / "cache";
}

void apply_preset(RunConfig& cfg, const std::string& preset) {
    const std::vector<double> eps_sweep = {0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 5.0, 30.0};
    const std::vector<double> scan_energies = {-0.9, -0.4, -0.03, 0.06, 0.075, 0.1, 0.3, 0.8};

    if (preset == "fig2" || preset == "fig3") {
        cfg.eps_list = eps_sweep;
    } else if (preset == "fig5" || preset == "fig6" || preset == "fig56") {
        cfg.eps_list = {1.5};
        cfg.energy_list = scan_energies;
    } else if (preset == "fig7" || preset == "fig8" || preset == "fig78") {
        cfg.eps_list = {0.0, 0.4, 0.7, 1.0};
        cfg.energy_list = {0.075};
    } else if (preset == "fig9") {
        cfg.eps_list = eps_sweep;
    } else {
        throw ConfigError("unknown preset '" + preset + "'");
    }
}

}  // namespace triwell
