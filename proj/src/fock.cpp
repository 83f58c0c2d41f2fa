#include "triwell/fock.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace triwell {

long long fock_dimension(int particles) {
    if (particles < 0) {
        throw std::invalid_argument("fock_dimension: particle count must be >= 0");
    }
    const long long n = particles;
    return (n + 1) * (n + 2) / 2;
}

FockBasis::FockBasis(int particles) : particles_(particles) {
    const long long d = fock_dimension(particles);
    if (d > std::numeric_limits<int>::max()) {
        throw std::invalid_argument("FockBasis: dimension overflows int");
    }
    dimension_ = static_cast<int>(d);
}

FockState FockBasis::state_of(int idx) const {
    if (idx < 0 || idx >= dimension_) {
        throw std::invalid_argument("FockBasis::state_of: index " + std::to_string(idx) +
                                    " out of [0, " + std::to_string(dimension_) + ")");
    }
    // Block b = N - n1 starts at offset b(b+1)/2 and holds b+1 states.
    const int b = static_cast<int>((std::sqrt(8.0 * idx + 1.0) - 1.0) / 2.0);
    // sqrt rounding can land one block off; fix up exactly.
    int block = b;
    while (static_cast<long long>(block) * (block + 1) / 2 > idx) --block;
    while (static_cast<long long>(block + 1) * (block + 2) / 2 <= idx) ++block;

    const int offset = idx - block * (block + 1) / 2;
    FockState s;
    s.n1 = particles_ - block;
    s.n3 = block - offset;
    s.n2 = offset;
    return s;
}

int FockBasis::index_of(const FockState& s) const {
    if (s.n1 < 0 || s.n2 < 0 || s.n3 < 0 || s.total() != particles_) {
        throw std::invalid_argument("FockBasis::index_of: inconsistent occupations (" +
                                    std::to_string(s.n1) + "," + std::to_string(s.n2) + "," +
                                    std::to_string(s.n3) + ") for N=" +
                                    std::to_string(particles_));
    }
    const int block = particles_ - s.n1;
    return block * (block + 1) / 2 + (block - s.n3);
}

std::vector<FockState> FockBasis::enumerate() const {
    std::vector<FockState> out;
    out.reserve(static_cast<std::size_t>(dimension_));
    for (int n1 = particles_; n1 >= 0; --n1) {
        for (int n3 = particles_ - n1; n3 >= 0; --n3) {
            out.push_back(FockState{n1, particles_ - n1 - n3, n3});
        }
    }
    return out;
}

}  // namespace triwell
