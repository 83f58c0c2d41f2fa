#pragma once

#include <Eigen/Dense>

#include <vector>

#include "triwell/histogram.hpp"
#include "triwell/spectrum.hpp"

namespace triwell {

// Fock-projected Husimi function averaged over a window of eigenstates:
// values(N1, N3) = mean over the window of |<N1, N-N1-N3, N3 | m>|^2.
// Entries with N1 + N3 > N are identically zero (outside the simplex).
struct HusimiGrid {
    int particles = 0;       // N
    Eigen::MatrixXd values;  // (N+1) x (N+1); row N1, column N3
    int center_index = 0;    // m
    int window = 0;          // requested window size
    int states_used = 0;     // actual count after edge clamping
    double center_energy = 0.0;  // E_m / N

    double total() const { return values.sum(); }
    bool valid_cell(int n1, int n3) const { return n1 + n3 <= particles; }
};

// Window convention: states [m - floor(W/2), m - floor(W/2) + W) clamped to
// [0, D) and renormalized by the actual count.
HusimiGrid husimi_window(const Spectrum& s, int center, int window);

// Centers the window at argmin_m |E_m/N - e_target| (ties to lower index).
HusimiGrid husimi_at_energy(const Spectrum& s, double e_target, int window);

// Auto window for reduced-N runs: min(200, max(1, D/10)).
int default_husimi_window(int dimension);

// Per-eigenstate participation ratio PR_m = 1 / sum_n C_n^4 in the Fock
// basis, plus the GOE-scaled value PR_m / (D/3).
struct PrCurve {
    std::vector<double> energies;  // e_m = E_m / N
    std::vector<double> pr;
    std::vector<double> scaled;
    int dimension = 0;
};

PrCurve participation_ratio(const Spectrum& s);

// Energy at the maximum of the centered moving-average-smoothed PR curve
// (window in eigenstate index space; ties resolved to the lowest index).
double pr_peak_energy(const PrCurve& curve, int smoothing_width);

// Rebin the (N1, N3) grid onto a B x B occupation histogram (mass-preserving).
OccupationHistogram to_histogram(const HusimiGrid& grid, int bins);

}  // namespace triwell
