#pragma once

#include <Eigen/Dense>

namespace triwell {

// Normalized B x B mass grid over (N1/N, N3/N) in [0,1]^2.
// mass(i, j): i bins n1, j bins n3; bin k covers [k/B, (k+1)/B), with the
// right edge 1.0 folded into the last bin.
struct OccupationHistogram {
    int bins = 0;
    Eigen::MatrixXd mass;

    double total() const { return mass.sum(); }
};

inline int bin_of(double x, int bins) {
    int k = static_cast<int>(x * bins);
    if (k < 0) k = 0;
    if (k >= bins) k = bins - 1;
    return k;
}

// Sum_ij sqrt(a_ij * b_ij), in [0,1] for normalized inputs.
// Bin-geometry mismatch -> std::invalid_argument.
double bhattacharyya(const OccupationHistogram& a, const OccupationHistogram& b);

}  // namespace triwell
