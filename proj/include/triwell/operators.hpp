#pragma once

#include <Eigen/Dense>

#include <vector>

#include "triwell/fock.hpp"

namespace triwell {

// Parameters of the reduced tilted Hamiltonian
//   H = (U/N)(N1 - N2 + N3)^2 + eps (N3 - N1)
//       + (J/sqrt2)(a1+ a2 + h.c.) + (J/sqrt2)(a2+ a3 + h.c.)
// Units hbar = 1; J sets the time scale.
struct ModelParams {
    double U = 0.7;
    double J = 1.0;
    double eps = 0.0;
    int N = 1;

    void validate() const;  // throws std::invalid_argument
};

// Parameters of the generic open 3-well Hamiltonian
//   H = (U0/2) sum_i Ni(Ni-1) + sum_{i<j} Uij Ni Nj
//       - J1 (a1+ a2 + h.c.) - J3 (a2+ a3 + h.c.)
struct GenericParams {
    double U0 = 0.0;
    double U12 = 0.0;
    double U13 = 0.0;
    double U23 = 0.0;
    double J1 = 0.0;
    double J3 = 0.0;
    int N = 1;

    void validate() const;
};

// Real symmetric operator on one fixed-N Fock block, stored as upper-triangle
// triplets (i <= j).  Matrix-vector products expand the symmetry on the fly.
class SymmetricOperator {
public:
    struct Entry {
        int i;
        int j;  // i <= j
        double value;
    };

    SymmetricOperator() = default;
    explicit SymmetricOperator(int dimension) : dim_(dimension) {}

    int dimension() const { return dim_; }
    const std::vector<Entry>& entries() const { return entries_; }

    // Adds value at (i, j), normalizing to the upper triangle.
    void add(int i, int j, double value);

    // y = A x, symmetric expansion.
    void apply(const double* x, double* y) const;
    Eigen::VectorXd apply(const Eigen::VectorXd& x) const;

    Eigen::MatrixXd to_dense() const;
    double frobenius_norm() const;
    double trace() const;
    int max_row_nonzeros() const;

private:
    int dim_ = 0;
    std::vector<Entry> entries_;
};

SymmetricOperator build_reduced(const ModelParams& p);
SymmetricOperator build_generic(const GenericParams& g);

// Conserved charge of the eps = 0 model:
//   Q = J1^2 N3 + J3^2 N1 - J1 J3 (a1+ a3 + a3+ a1).
SymmetricOperator build_charge(double J1, double J3, int N);

// || AB - BA ||_F; dimension mismatch -> std::invalid_argument.
double commutator_frobenius(const SymmetricOperator& A, const SymmetricOperator& B);

}  // namespace triwell
