#include "triwell/husimi.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "triwell/fock.hpp"

namespace triwell {

namespace {

// Accumulates |C|^2 of one eigenvector onto the (N1, N3) grid.
void accumulate_state(const FockBasis& basis, const Eigen::MatrixXd& vectors, int m,
                      double weight, Eigen::MatrixXd& grid) {
    const auto col = vectors.col(m);
    // Canonical ordering walks (n1 desc, n3 desc): idx maps to grid cells in
    // a fixed strided pattern.
    int idx = 0;
    const int n = basis.particles();
    for (int n1 = n; n1 >= 0; --n1) {
        for (int n3 = n - n1; n3 >= 0; --n3, ++idx) {
            const double c = col[idx];
            grid(n1, n3) += weight * c * c;
        }
    }
}

}  // namespace

int default_husimi_window(int dimension) {
    return std::min(200, std::max(1, dimension / 10));
}

HusimiGrid husimi_window(const Spectrum& s, int center, int window) {
    const int d = s.dimension();
    if (center < 0 || center >= d) {
        throw std::invalid_argument("husimi_window: center index " + std::to_string(center) +
                                    " out of [0, " + std::to_string(d) + ")");
    }
    if (window < 1) throw std::invalid_argument("husimi_window: window must be >= 1");

    int lo = center - window / 2;
    int hi = lo + window;  // half-open
    lo = std::max(lo, 0);
    hi = std::min(hi, d);
    const int used = hi - lo;

    const FockBasis basis(s.params.N);
    HusimiGrid g;
    g.particles = s.params.N;
    g.values = Eigen::MatrixXd::Zero(s.params.N + 1, s.params.N + 1);
    g.center_index = center;
    g.window = window;
    g.states_used = used;
    g.center_energy = s.energies[center] / s.params.N;

    const double weight = 1.0 / used;
    for (int m = lo; m < hi; ++m) {
        accumulate_state(basis, s.vectors, m, weight, g.values);
    }
    return g;
}

HusimiGrid husimi_at_energy(const Spectrum& s, double e_target, int window) {
    if (!std::isfinite(e_target)) {
        throw std::invalid_argument("husimi_at_energy: target energy must be finite");
    }
    const int d = s.dimension();
    int best = 0;
    double best_dist = std::abs(s.energies[0] / s.params.N - e_target);
    for (int m = 1; m < d; ++m) {
        const double dist = std::abs(s.energies[m] / s.params.N - e_target);
        if (dist < best_dist) {  // strict: ties break toward lower index
            best = m;
            best_dist = dist;
        }
    }
    return husimi_window(s, best, window);
}

PrCurve participation_ratio(const Spectrum& s) {
    const int d = s.dimension();
    PrCurve curve;
    curve.dimension = d;
    curve.energies.resize(static_cast<std::size_t>(d));
    curve.pr.resize(static_cast<std::size_t>(d));
    curve.scaled.resize(static_cast<std::size_t>(d));
    const double goe = d / 3.0;
    for (int m = 0; m < d; ++m) {
        double sum4 = 0.0;
        const auto col = s.vectors.col(m);
        for (int n = 0; n < d; ++n) {
            const double c2 = col[n] * col[n];
            sum4 += c2 * c2;
        }
        curve.energies[static_cast<std::size_t>(m)] = s.energies[m] / s.params.N;
        curve.pr[static_cast<std::size_t>(m)] = 1.0 / sum4;
        curve.scaled[static_cast<std::size_t>(m)] = curve.pr[static_cast<std::size_t>(m)] / goe;
    }
    return curve;
}

double pr_peak_energy(const PrCurve& curve, int smoothing_width) {
    if (curve.pr.empty()) throw std::invalid_argument("pr_peak_energy: empty curve");
    if (smoothing_width < 1) {
        throw std::invalid_argument("pr_peak_energy: smoothing_width must be >= 1");
    }
    const int d = static_cast<int>(curve.pr.size());
    int best = 0;
    double best_val = -1.0;
    for (int m = 0; m < d; ++m) {
        int lo = std::max(0, m - smoothing_width / 2);
        int hi = std::min(d, lo + smoothing_width);
        lo = std::max(0, hi - smoothing_width);
        double acc = 0.0;
        for (int k = lo; k < hi; ++k) acc += curve.pr[static_cast<std::size_t>(k)];
        const double smooth = acc / (hi - lo);
        if (smooth > best_val) {  // strict: first index wins ties
            best_val = smooth;
            best = m;
        }
    }
    return curve.energies[static_cast<std::size_t>(best)];
}

OccupationHistogram to_histogram(const HusimiGrid& grid, int bins) {
    if (bins < 1) throw std::invalid_argument("to_histogram: bins must be >= 1");
    OccupationHistogram h;
    h.bins = bins;
    h.mass = Eigen::MatrixXd::Zero(bins, bins);
    const int n = grid.particles;
    for (int n1 = 0; n1 <= n; ++n1) {
        for (int n3 = 0; n3 + n1 <= n; ++n3) {
            const double v = grid.values(n1, n3);
            if (v == 0.0) continue;
            h.mass(bin_of(static_cast<double>(n1) / n, bins),
                   bin_of(static_cast<double>(n3) / n, bins)) += v;
        }
    }
    return h;
}

}  // namespace triwell
