#include "triwell/histogram.hpp"

#include <cmath>
#include <stdexcept>

namespace triwell {

double bhattacharyya(const OccupationHistogram& a, const OccupationHistogram& b) {
    if (a.bins != b.bins || a.mass.rows() != b.mass.rows() ||
        a.mass.cols() != b.mass.cols()) {
        throw std::invalid_argument("bhattacharyya: bin geometry mismatch");
    }
    double sum = 0.0;
    for (Eigen::Index i = 0; i < a.mass.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.mass.cols(); ++j) {
            sum += std::sqrt(a.mass(i, j) * b.mass(i, j));
        }
    }
    return sum;
}

}  // namespace triwell
