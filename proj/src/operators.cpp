#include "triwell/operators.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace triwell {

namespace {

void require_finite(double v, const char* name) {
    if (!std::isfinite(v)) {
        throw std::invalid_argument(std::string("parameter ") + name + " must be finite");
    }
}

}  // namespace

void ModelParams::validate() const {
    require_finite(U, "U");
    require_finite(J, "J");
    require_finite(eps, "eps");
    if (N < 1) throw std::invalid_argument("ModelParams: N must be >= 1");
}

void GenericParams::validate() const {
    require_finite(U0, "U0");
    require_finite(U12, "U12");
    require_finite(U13, "U13");
    require_finite(U23, "U23");
    require_finite(J1, "J1");
    require_finite(J3, "J3");
    if (N < 1) throw std::invalid_argument("GenericParams: N must be >= 1");
}

void SymmetricOperator::add(int i, int j, double value) {
    if (i < 0 || j < 0 || i >= dim_ || j >= dim_) {
        throw std::invalid_argument("SymmetricOperator::add: index out of range");
    }
    if (value == 0.0) return;
    if (i > j) std::swap(i, j);
    entries_.push_back(Entry{i, j, value});
}

void SymmetricOperator::apply(const double* x, double* y) const {
    for (int k = 0; k < dim_; ++k) y[k] = 0.0;
    for (const Entry& e : entries_) {
        y[e.i] += e.value * x[e.j];
        if (e.i != e.j) y[e.j] += e.value * x[e.i];
    }
}

Eigen::VectorXd SymmetricOperator::apply(const Eigen::VectorXd& x) const {
    if (x.size() != dim_) {
        throw std::invalid_argument("SymmetricOperator::apply: dimension mismatch");
    }
    Eigen::VectorXd y(dim_);
    apply(x.data(), y.data());
    return y;
}

Eigen::MatrixXd SymmetricOperator::to_dense() const {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim_, dim_);
    for (const Entry& e : entries_) {
        m(e.i, e.j) += e.value;
        if (e.i != e.j) m(e.j, e.i) += e.value;
    }
    return m;
}

double SymmetricOperator::frobenius_norm() const {
    double sum = 0.0;
    for (const Entry& e : entries_) {
        const double w = (e.i == e.j) ? 1.0 : 2.0;
        sum += w * e.value * e.value;
    }
    return std::sqrt(sum);
}

double SymmetricOperator::trace() const {
    double t = 0.0;
    for (const Entry& e : entries_) {
        if (e.i == e.j) t += e.value;
    }
    return t;
}

int SymmetricOperator::max_row_nonzeros() const {
    std::vector<int> count(static_cast<std::size_t>(dim_), 0);
    for (const Entry& e : entries_) {
        ++count[static_cast<std::size_t>(e.i)];
        if (e.i != e.j) ++count[static_cast<std::size_t>(e.j)];
    }
    int best = 0;
    for (int c : count) best = std::max(best, c);
    return best;
}

SymmetricOperator build_reduced(const ModelParams& p) {
    p.validate();
    const FockBasis basis(p.N);
    SymmetricOperator H(basis.dimension());
    const double hop = p.J / std::sqrt(2.0);

    for (int idx = 0; idx < basis.dimension(); ++idx) {
        const FockState s = basis.state_of(idx);
        const double imbalance = static_cast<double>(s.n1 - s.n2 + s.n3);
        H.add(idx, idx,
              (p.U / p.N) * imbalance * imbalance + p.eps * (s.n3 - s.n1));

        // a2+ a1: each unordered pair generated once, from the higher-n1 state.
        if (s.n1 > 0) {
            const int j = basis.index_of(FockState{s.n1 - 1, s.n2 + 1, s.n3});
            H.add(idx, j, hop * std::sqrt(static_cast<double>(s.n1) * (s.n2 + 1)));
        }
        // a3+ a2
        if (s.n2 > 0) {
            const int j = basis.index_of(FockState{s.n1, s.n2 - 1, s.n3 + 1});
            H.add(idx, j, hop * std::sqrt(static_cast<double>(s.n2) * (s.n3 + 1)));
        }
    }
    return H;
}

SymmetricOperator build_generic(const GenericParams& g) {
    g.validate();
    const FockBasis basis(g.N);
    SymmetricOperator H(basis.dimension());

    for (int idx = 0; idx < basis.dimension(); ++idx) {
        const FockState s = basis.state_of(idx);
        const double n1 = s.n1, n2 = s.n2, n3 = s.n3;
        const double diag = 0.5 * g.U0 * (n1 * (n1 - 1) + n2 * (n2 - 1) + n3 * (n3 - 1)) +
                            g.U12 * n1 * n2 + g.U13 * n1 * n3 + g.U23 * n2 * n3;
        H.add(idx, idx, diag);

        if (s.n1 > 0) {
            const int j = basis.index_of(FockState{s.n1 - 1, s.n2 + 1, s.n3});
            H.add(idx, j, -g.J1 * std::sqrt(static_cast<double>(s.n1) * (s.n2 + 1)));
        }
        if (s.n2 > 0) {
            const int j = basis.index_of(FockState{s.n1, s.n2 - 1, s.n3 + 1});
            H.add(idx, j, -g.J3 * std::sqrt(static_cast<double>(s.n2) * (s.n3 + 1)));
        }
    }
    return H;
}

SymmetricOperator build_charge(double J1, double J3, int N) {
    require_finite(J1, "J1");
    require_finite(J3, "J3");
    if (N < 1) throw std::invalid_argument("build_charge: N must be >= 1");
    const FockBasis basis(N);
    SymmetricOperator Q(basis.dimension());

    for (int idx = 0; idx < basis.dimension(); ++idx) {
        const FockState s = basis.state_of(idx);
        Q.add(idx, idx, J1 * J1 * s.n3 + J3 * J3 * s.n1);
        // a3+ a1: direct 1<->3 exchange
        if (s.n1 > 0) {
            const int j = basis.index_of(FockState{s.n1 - 1, s.n2, s.n3 + 1});
            Q.add(idx, j, -J1 * J3 * std::sqrt(static_cast<double>(s.n1) * (s.n3 + 1)));
        }
    }
    return Q;
}

double commutator_frobenius(const SymmetricOperator& A, const SymmetricOperator& B) {
    if (A.dimension() != B.dimension()) {
        throw std::invalid_argument("commutator_frobenius: dimension mismatch");
    }
    const Eigen::MatrixXd a = A.to_dense();
    const Eigen::MatrixXd b = B.to_dense();
    return (a * b - b * a).norm();
}

}  // namespace triwell
