#pragma once

#include <vector>

namespace triwell {

// Occupation triple |n1, n2, n3> with n1 + n2 + n3 = N.
struct FockState {
    int n1 = 0;
    int n2 = 0;
    int n3 = 0;

    int total() const { return n1 + n2 + n3; }
    bool operator==(const FockState&) const = default;
};

// D = (N+1)(N+2)/2, the number of ways to put N bosons in 3 wells.
long long fock_dimension(int particles);

// Canonical ordering: n1 runs from N down to 0, then n3 from N-n1 down to 0,
// with n2 = N - n1 - n3.  This is lexicographically decreasing in (n1, n3)
// and makes (N1, N3)-grid extraction a strided walk.
//
// Index and state are closed-form inverses of each other; no lookup tables.
class FockBasis {
public:
    explicit FockBasis(int particles);

    int particles() const { return particles_; }
    int dimension() const { return dimension_; }

    // idx in [0, D) -> state; throws std::invalid_argument out of range.
    FockState state_of(int idx) const;

    // state -> idx; throws std::invalid_argument on negative or
    // wrong-total occupations.
    int index_of(const FockState& s) const;

    std::vector<FockState> enumerate() const;

private:
    int particles_;
    int dimension_;
};

}  // namespace triwell
