#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "triwell/classical.hpp"
#include "triwell/critical.hpp"
#include "triwell/histogram.hpp"
#include "triwell/husimi.hpp"
#include "triwell/spectrum.hpp"

namespace triwell {

// Shortest round-trippable decimal form of a double ("%.17g" fallback),
// identical across runs.
std::string format_double(double v);

// Husimi matrix CSV: row N1 = 0..N, column N3 = 0..N; cells with
// N1 + N3 > N are left blank.
void write_husimi_csv(const HusimiGrid& g, const std::filesystem::path& path);

// B x B histogram matrix CSV, row = n1 bin, column = n3 bin.
void write_histogram_csv(const OccupationHistogram& h, const std::filesystem::path& path);

// 16-bit binary PGM, linear scale, max-normalized per image.
// Row 0 = smallest N1 (or n1 bin) at the top.
void write_pgm16(const Eigen::MatrixXd& values, const std::filesystem::path& path);

// Two columns: e_m, scaled PR.
void write_pr_csv(const PrCurve& curve, const std::filesystem::path& path);

// Columns: t, N1/N, N2/N, N3/N, e.
void write_trajectory_csv(const Trajectory& t, const std::filesystem::path& path);

// Columns: n1, n3, phi12, phi32, e, class.
void write_critical_csv(const std::vector<CriticalPoint>& points,
                        const std::filesystem::path& path);

// Columns: m, E_m, e_m.
void write_eigenvalues_csv(const Spectrum& s, const std::filesystem::path& path);

}  // namespace triwell
