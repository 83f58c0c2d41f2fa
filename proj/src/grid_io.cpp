#include "triwell/grid_io.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace triwell {

namespace {

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, mode);
    if (!out) throw std::runtime_error("cannot open for write: " + path.string());
    return out;
}

}  // namespace

std::string format_double(double v) {
    // shortest representation that round-trips ("30" beats "3e+01")
    char best[32];
    std::snprintf(best, sizeof(best), "%.17g", v);
    std::size_t best_len = std::strlen(best);
    for (int prec = 1; prec <= 17; ++prec) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
        double back = 0.0;
        std::sscanf(buf, "%lf", &back);
        if (back == v && std::strlen(buf) < best_len) {
            std::memcpy(best, buf, sizeof(buf));
            best_len = std::strlen(best);
        }
    }
    return best;
}

void write_husimi_csv(const HusimiGrid& g, const std::filesystem::path& path) {
    std::ofstream out = open_out(path, std::ios::trunc);
    const int n = g.particles;
    for (int n1 = 0; n1 <= n; ++n1) {
        for (int n3 = 0; n3 <= n; ++n3) {
            if (n3 > 0) out << ',';
            if (g.valid_cell(n1, n3)) out << format_double(g.values(n1, n3));
        }
        out << '\n';
    }
}

void write_histogram_csv(const OccupationHistogram& h, const std::filesystem::path& path) {
    std::ofstream out = open_out(path, std::ios::trunc);
    for (Eigen::Index i = 0; i < h.mass.rows(); ++i) {
        for (Eigen::Index j = 0; j < h.mass.cols(); ++j) {
            if (j > 0) out << ',';
            out << format_double(h.mass(i, j));
        }
        out << '\n';
    }
}

void write_pgm16(const Eigen::MatrixXd& values, const std::filesystem::path& path) {
    const double vmax = values.maxCoeff();
    std::ofstream out = open_out(path, std::ios::trunc | std::ios::binary);
    out << "P5\n" << values.cols() << " " << values.rows() << "\n65535\n";
    for (Eigen::Index i = 0; i < values.rows(); ++i) {
        for (Eigen::Index j = 0; j < values.cols(); ++j) {
            const double v = (vmax > 0.0) ? values(i, j) / vmax : 0.0;
            const auto word =
                static_cast<std::uint16_t>(std::lround(std::clamp(v, 0.0, 1.0) * 65535.0));
            // PGM 16-bit samples are big-endian
            const unsigned char hi = static_cast<unsigned char>(word >> 8);
            const unsigned char lo = static_cast<unsigned char>(word & 0xff);
            out.put(static_cast<char>(hi));
            out.put(static_cast<char>(lo));
        }
    }
}

void write_pr_csv(const PrCurve& curve, const std::filesystem::path& path) {
    std::ofstream out = open_out(path, std::ios::trunc);
    for (std::size_t m = 0; m < curve.energies.size(); ++m) {
        out << format_double(curve.energies[m]) << ',' << format_double(curve.scaled[m])
            << '\n';
    }
}

void write_trajectory_csv(const Trajectory& t, const std::filesystem::path& path) {
    std::ofstream out = open_out(path, std::ios::trunc);
    for (std::size_t i = 0; i < t.size(); ++i) {
        out << format_double(t.times[i]) << ',' << format_double(t.occupations[i][0]) << ','
            << format_double(t.occupations[i][1]) << ',' << format_double(t.occupations[i][2])
            << ',' << format_double(t.energies[i]) << '\n';
    }
}

void write_critical_csv(const std::vector<CriticalPoint>& points,
                        const std::filesystem::path& path) {
    std::ofstream out = open_out(path, std::ios::trunc);
    out << "n1,n3,phi12,phi32,e,class\n";
    for (const CriticalPoint& cp : points) {
        out << format_double(cp.point.n1) << ',' << format_double(cp.point.n3) << ','
            << format_double(cp.point.phi12) << ',' << format_double(cp.point.phi32) << ','
            << format_double(cp.energy) << ',' << to_string(cp.classification) << '\n';
    }
}

void write_eigenvalues_csv(const Spectrum& s, const std::filesystem::path& path) {
    std::ofstream out = open_out(path, std::ios::trunc);
    out << "m,E,e\n";
    for (int m = 0; m < s.dimension(); ++m) {
        out << m << ',' << format_double(s.energies[m]) << ','
            << format_double(s.energies[m] / s.params.N) << '\n';
    }
}

}  // namespace triwell
