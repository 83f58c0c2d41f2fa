#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <cmath>

#include "triwell/operators.hpp"

using namespace triwell;

namespace {

double entry(const SymmetricOperator& op, int i, int j) {
    return op.to_dense()(i, j);
}

// 1 <-> 3 relabeling permutation on the Fock basis
Eigen::MatrixXd parity_permutation(int n) {
    FockBasis basis(n);
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(basis.dimension(), basis.dimension());
    for (int k = 0; k < basis.dimension(); ++k) {
        const FockState s = basis.state_of(k);
        p(basis.index_of(FockState{s.n3, s.n2, s.n1}), k) = 1.0;
    }
    return p;
}

}  // namespace

TEST_CASE("reduced Hamiltonian N=1 matrix elements") {
    const ModelParams p{0.7, 1.0, 0.0, 1};
    const SymmetricOperator h = build_reduced(p);
    REQUIRE(h.dimension() == 3);
    const FockBasis basis(1);
    const int i100 = basis.index_of(FockState{1, 0, 0});
    const int i010 = basis.index_of(FockState{0, 1, 0});
    const int i001 = basis.index_of(FockState{0, 0, 1});

    const Eigen::MatrixXd m = h.to_dense();
    CHECK(m(i100, i100) == doctest::Approx(0.7).epsilon(1e-15));
    CHECK(m(i010, i010) == doctest::Approx(0.7).epsilon(1e-15));
    CHECK(m(i001, i001) == doctest::Approx(0.7).epsilon(1e-15));
    CHECK(m(i100, i010) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
    CHECK(m(i010, i001) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
    CHECK(m(i100, i001) == 0.0);
}

TEST_CASE("hopping element carries the bosonic enhancement") {
    // <1,1,0|H|2,0,0> = (J/sqrt2) sqrt(n1 (n2+1)) = (J/sqrt2) sqrt(2) = J
    const ModelParams p{0.0, 1.3, 0.0, 2};
    const SymmetricOperator h = build_reduced(p);
    const FockBasis basis(2);
    const double v = entry(h, basis.index_of(FockState{2, 0, 0}), basis.index_of(FockState{1, 1, 0}));
    CHECK(v == doctest::Approx(1.3).epsilon(1e-15));
}

TEST_CASE("structure: symmetry, sparsity, fixed-N block") {
    const ModelParams p{0.7, 1.0, 1.5, 12};
    const SymmetricOperator h = build_reduced(p);
    const Eigen::MatrixXd m = h.to_dense();
    CHECK((m - m.transpose()).norm() == 0.0);
    CHECK(h.max_row_nonzeros() <= 5);
    for (const auto& e : h.entries()) {
        CHECK(e.i >= 0);
        CHECK(e.j < h.dimension());
        CHECK(std::isfinite(e.value));
    }

    // generic Hamiltonian plus charge: diagonal + four hops + the 1<->3 hop
    GenericParams g;
    g.U0 = 0.5;
    g.U12 = g.U13 = g.U23 = 0.1;
    g.J1 = 0.8;
    g.J3 = 0.4;
    g.N = 12;
    const SymmetricOperator hg = build_generic(g);
    const SymmetricOperator q = build_charge(g.J1, g.J3, g.N);
    const Eigen::MatrixXd combined = hg.to_dense() + q.to_dense();
    int worst_row = 0;
    for (int i = 0; i < combined.rows(); ++i) {
        int nnz = 0;
        for (int j = 0; j < combined.cols(); ++j) {
            if (combined(i, j) != 0.0) ++nnz;
        }
        worst_row = std::max(worst_row, nnz);
    }
    CHECK(worst_row <= 7);
}

TEST_CASE("eps=0 Hamiltonian commutes with the 1<->3 parity exactly") {
    for (int n : {2, 6, 11}) {
        const SymmetricOperator h = build_reduced(ModelParams{0.7, 1.0, 0.0, n});
        const Eigen::MatrixXd m = h.to_dense();
        const Eigen::MatrixXd perm = parity_permutation(n);
        CHECK((perm * m * perm.transpose() - m).norm() == 0.0);
    }
}

TEST_CASE("generic Hamiltonian special cases") {
    SUBCASE("all couplings zero gives the zero matrix") {
        const SymmetricOperator h = build_generic(GenericParams{0, 0, 0, 0, 0, 0, 3});
        CHECK(h.to_dense().norm() == 0.0);
    }
    SUBCASE("N=1: no pairwise terms, hoppings -J1 and -J3") {
        GenericParams g;
        g.J1 = 0.8;
        g.J3 = 0.3;
        g.N = 1;
        const SymmetricOperator h = build_generic(g);
        const FockBasis basis(1);
        const Eigen::MatrixXd m = h.to_dense();
        CHECK(m.diagonal().norm() == 0.0);
        CHECK(entry(h, basis.index_of(FockState{1, 0, 0}), basis.index_of(FockState{0, 1, 0})) ==
              doctest::Approx(-0.8).epsilon(1e-15));
        CHECK(entry(h, basis.index_of(FockState{0, 1, 0}), basis.index_of(FockState{0, 0, 1})) ==
              doctest::Approx(-0.3).epsilon(1e-15));
    }
    SUBCASE("N=2, U0=1: on-site pair energy") {
        GenericParams g;
        g.U0 = 1.0;
        g.N = 2;
        const SymmetricOperator h = build_generic(g);
        const FockBasis basis(2);
        CHECK(entry(h, basis.index_of(FockState{2, 0, 0}), basis.index_of(FockState{2, 0, 0})) ==
              doctest::Approx(1.0).epsilon(1e-15));
        CHECK(entry(h, basis.index_of(FockState{1, 1, 0}), basis.index_of(FockState{1, 1, 0})) == 0.0);
    }
}

TEST_CASE("generic couplings reproducing the reduced diagonal") {
    // (U/N)(n1-n2+n3)^2 = U0/2 sum n(n-1) + sum Uij ni nj + U with
    // U0 = U13 = 2U/N and U12 = U23 = -2U/N; spectra then differ by the
    // constant U and a hopping sign gauge.
    const double U = 0.7, J = 1.0;
    for (int n : {2, 5, 9}) {
        const SymmetricOperator hr = build_reduced(ModelParams{U, J, 0.0, n});
        GenericParams g;
        g.U0 = g.U13 = 2.0 * U / n;
        g.U12 = g.U23 = -2.0 * U / n;
        g.J1 = g.J3 = J / std::sqrt(2.0);
        g.N = n;
        const SymmetricOperator hg = build_generic(g);

        const Eigen::VectorXd dr = hr.to_dense().diagonal();
        const Eigen::VectorXd dg = hg.to_dense().diagonal();
        CHECK((dg.array() + U - dr.array()).abs().maxCoeff() < 1e-12);

        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> er(hr.to_dense());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eg(hg.to_dense());
        CHECK((eg.eigenvalues().array() + U - er.eigenvalues().array()).abs().maxCoeff() <
              1e-10);
    }
}

TEST_CASE("charge operator N=1, J1=J3=1/sqrt2") {
    const double j = 1.0 / std::sqrt(2.0);
    const SymmetricOperator q = build_charge(j, j, 1);
    const FockBasis basis(1);
    const int i100 = basis.index_of(FockState{1, 0, 0});
    const int i010 = basis.index_of(FockState{0, 1, 0});
    const int i001 = basis.index_of(FockState{0, 0, 1});
    const Eigen::MatrixXd m = q.to_dense();
    CHECK(m(i100, i100) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(m(i010, i010) == 0.0);
    CHECK(m(i001, i001) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(m(i100, i001) == doctest::Approx(-0.5).epsilon(1e-15));
    CHECK(m(i100, i010) == 0.0);
}

TEST_CASE("charge with J1=0 is diagonal J3^2 N1") {
    const SymmetricOperator q = build_charge(0.0, 0.5, 4);
    const FockBasis basis(4);
    const Eigen::MatrixXd m = q.to_dense();
    CHECK((m - Eigen::MatrixXd(m.diagonal().asDiagonal())).norm() == 0.0);
    for (int k = 0; k < basis.dimension(); ++k) {
        CHECK(m(k, k) == doctest::Approx(0.25 * basis.state_of(k).n1).epsilon(1e-15));
    }
}

TEST_CASE("integrability: [H(0), Q] = 0, broken at eps=1.5") {
    const double j = 1.0 / std::sqrt(2.0);
    for (int n : {5, 10, 20}) {
        const SymmetricOperator h0 = build_reduced(ModelParams{0.7, 1.0, 0.0, n});
        const SymmetricOperator q = build_charge(j, j, n);
        CHECK(commutator_frobenius(h0, q) <=
              1e-10 * h0.frobenius_norm() * q.frobenius_norm());

        const SymmetricOperator h1 = build_reduced(ModelParams{0.7, 1.0, 1.5, n});
        CHECK(commutator_frobenius(h1, q) > 1e-3 * h1.frobenius_norm());
    }
}

TEST_CASE("commutator edge cases") {
    const SymmetricOperator h = build_reduced(ModelParams{0.7, 1.0, 0.3, 6});
    CHECK(commutator_frobenius(h, h) == 0.0);
    const SymmetricOperator other = build_reduced(ModelParams{0.7, 1.0, 0.3, 7});
    CHECK_THROWS_AS(commutator_frobenius(h, other), std::invalid_argument);
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(build_reduced(ModelParams{0.7, 1.0, 0.0, 0}), std::invalid_argument);
    ModelParams bad{0.7, 1.0, 0.0, 3};
    bad.J = std::nan("");
    CHECK_THROWS_AS(build_reduced(bad), std::invalid_argument);
    CHECK_THROWS_AS(build_charge(1.0, 1.0, 0), std::invalid_argument);
}
