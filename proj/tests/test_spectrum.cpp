#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>

#include "triwell/errors.hpp"
#include "triwell/pipeline.hpp"
#include "triwell/spectrum.hpp"

using namespace triwell;
namespace fs = std::filesystem;

namespace {

Spectrum solve(const ModelParams& p) { return diagonalize(build_reduced(p), p); }

double min_gap_to_neighbors(const Spectrum& s, int m) {
    double gap = 1e300;
    if (m > 0) gap = std::min(gap, s.energies[m] - s.energies[m - 1]);
    if (m + 1 < s.dimension()) gap = std::min(gap, s.energies[m + 1] - s.energies[m]);
    return gap;
}

}  // namespace

TEST_CASE("analytic N=1 spectrum") {
    const Spectrum s = solve(ModelParams{0.7, 1.0, 0.0, 1});
    REQUIRE(s.dimension() == 3);
    CHECK(s.energies[0] == doctest::Approx(-0.3).epsilon(1e-12));
    CHECK(s.energies[1] == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(s.energies[2] == doctest::Approx(1.7).epsilon(1e-12));
}

TEST_CASE("zero operator diagonalizes to zero") {
    SymmetricOperator z(4);
    const Spectrum s = diagonalize(z, ModelParams{0, 0, 0, 1});
    CHECK(s.energies.cwiseAbs().maxCoeff() == 0.0);
    // eigenvectors still orthonormal
    CHECK((s.vectors.transpose() * s.vectors - Eigen::MatrixXd::Identity(4, 4)).norm() < 1e-14);
}

TEST_CASE("trace identity at N=40") {
    const ModelParams p{0.7, 1.0, 1.5, 40};
    const SymmetricOperator h = build_reduced(p);
    const Spectrum s = diagonalize(h, p);
    const double tr = h.trace();
    CHECK(s.energies.sum() == doctest::Approx(tr).epsilon(1e-8));
}

TEST_CASE("residuals and orthonormality on random parameters") {
    std::mt19937_64 rng(314159);
    std::uniform_real_distribution<double> coupling(-2.0, 2.0);
    std::uniform_int_distribution<int> particles(2, 12);
    for (int rep = 0; rep < 25; ++rep) {
        const ModelParams p{coupling(rng), coupling(rng), coupling(rng), particles(rng)};
        const SymmetricOperator h = build_reduced(p);
        const Spectrum s = diagonalize(h, p);
        const double scale = h.frobenius_norm();
        const int d = s.dimension();
        REQUIRE(std::is_sorted(s.energies.data(), s.energies.data() + d));
        for (int m = 0; m < d; ++m) {
            const Eigen::VectorXd r = h.apply(s.vectors.col(m)) - s.energies[m] * s.vectors.col(m);
            CHECK(r.norm() < 1e-8 * std::max(1.0, scale));
            CHECK(std::abs(s.vectors.col(m).norm() - 1.0) < 1e-10);
        }
        const Eigen::MatrixXd gram = s.vectors.transpose() * s.vectors;
        CHECK((gram - Eigen::MatrixXd::Identity(d, d)).cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("parity of nondegenerate eps=0 eigenvectors") {
    const ModelParams p{0.7, 1.0, 0.0, 30};
    const Spectrum s = solve(p);
    const FockBasis basis(30);
    int tested = 0;
    for (int m = 0; m < s.dimension(); ++m) {
        if (min_gap_to_neighbors(s, m) <= 1e-8) continue;  // skip near-degenerate
        ++tested;
        for (int k = 0; k < s.dimension(); ++k) {
            const FockState st = basis.state_of(k);
            const int mirrored = basis.index_of(FockState{st.n3, st.n2, st.n1});
            const double a = s.vectors(k, m) * s.vectors(k, m);
            const double b = s.vectors(mirrored, m) * s.vectors(mirrored, m);
            CHECK(std::abs(a - b) < 1e-8);
        }
    }
    CHECK(tested > 100);
}

TEST_CASE("spectrum invariant under eps -> -eps") {
    const Spectrum a = solve(ModelParams{0.7, 1.0, 1.5, 25});
    const Spectrum b = solve(ModelParams{0.7, 1.0, -1.5, 25});
    const double scale = std::max(std::abs(a.energies[0]), std::abs(a.energies[a.dimension() - 1]));
    CHECK((a.energies - b.energies).cwiseAbs().maxCoeff() < 1e-9 * scale);
}

TEST_CASE("normalized energies") {
    const Spectrum s1 = solve(ModelParams{0.7, 1.0, 0.0, 1});
    const auto e1 = s1.normalized_energies();
    for (int m = 0; m < 3; ++m) CHECK(e1[static_cast<std::size_t>(m)] == s1.energies[m]);

    // chaotic parameters: per-particle range brackets the reference window
    const Spectrum s = load_or_diagonalize(ModelParams{0.7, 1.0, 1.5, 60}, "tw_test_cache", nullptr);
    const auto e = s.normalized_energies();
    CHECK(e.front() <= -0.9);
    CHECK(e.back() >= 0.8);
}

TEST_CASE("lanczos lowest pairs match the dense route") {
    const ModelParams p{0.7, 1.0, 1.5, 40};
    const SymmetricOperator h = build_reduced(p);
    const Spectrum dense = diagonalize(h, p);
    const int k = 8;
    const PartialSpectrum part = lanczos_lowest(h, p, k);
    REQUIRE(part.count() == k);
    const double scale = h.frobenius_norm();
    for (int i = 0; i < k; ++i) {
        CHECK(part.energies[i] == doctest::Approx(dense.energies[i]).epsilon(1e-10));
        // Ritz vector solves the eigenproblem and matches up to sign
        const Eigen::VectorXd residual =
            h.apply(part.vectors.col(i)) - part.energies[i] * part.vectors.col(i);
        CHECK(residual.norm() <= 1e-9 * scale);
        CHECK(std::abs(part.vectors.col(i).dot(dense.vectors.col(i))) ==
              doctest::Approx(1.0).epsilon(1e-8));
    }
}

TEST_CASE("lanczos handles a full-dimension request via deflation") {
    const ModelParams p{0.9, 0.7, 0.4, 2};
    const SymmetricOperator h = build_reduced(p);
    const Spectrum dense = diagonalize(h, p);
    const PartialSpectrum part = lanczos_lowest(h, p, h.dimension());
    for (int i = 0; i < h.dimension(); ++i) {
        CHECK(part.energies[i] == doctest::Approx(dense.energies[i]).epsilon(1e-10));
    }
    CHECK_THROWS_AS(lanczos_lowest(h, p, h.dimension() + 1), std::invalid_argument);
    CHECK_THROWS_AS(lanczos_lowest(h, p, 0), std::invalid_argument);
}

TEST_CASE("lanczos ground state agrees with the cached dense spectrum") {
    const ModelParams p{0.7, 1.0, 1.5, 60};
    const Spectrum dense = load_or_diagonalize(p, "tw_test_cache", nullptr);
    const PartialSpectrum part = lanczos_lowest(build_reduced(p), p, 1);
    CHECK(part.energies[0] == doctest::Approx(dense.energies[0]).epsilon(1e-10));

    // deterministic across runs
    const PartialSpectrum again = lanczos_lowest(build_reduced(p), p, 1);
    CHECK(part.energies[0] == again.energies[0]);
}

TEST_CASE("cache round trip is bit exact") {
    const ModelParams p{0.7, 1.0, 1.5, 8};
    const Spectrum s = solve(p);
    const fs::path file = "tw_test_cache_rt.tw3w";
    cache_store(s, file);
    const Spectrum loaded = cache_load(file, p);
    REQUIRE(loaded.dimension() == s.dimension());
    CHECK(std::memcmp(loaded.energies.data(), s.energies.data(),
                      sizeof(double) * static_cast<std::size_t>(s.dimension())) == 0);
    CHECK(std::memcmp(loaded.vectors.data(), s.vectors.data(),
                      sizeof(double) * static_cast<std::size_t>(s.dimension()) *
                          static_cast<std::size_t>(s.dimension())) == 0);
    CHECK(loaded.params.N == p.N);
    CHECK(loaded.params.eps == p.eps);
    fs::remove(file);
}

TEST_CASE("cache error taxonomy") {
    const ModelParams p{0.7, 1.0, 0.3, 6};
    const Spectrum s = solve(p);
    const fs::path file = "tw_test_cache_err.tw3w";
    cache_store(s, file);

    SUBCASE("parameter mismatch") {
        ModelParams other = p;
        other.N = 7;
        try {
            cache_load(file, other);
            FAIL("expected CacheError");
        } catch (const CacheError& e) {
            CHECK(e.code == CacheErrorCode::param_mismatch);
        }
    }
    SUBCASE("corrupted payload") {
        auto bytes = fs::file_size(file);
        std::fstream f(file, std::ios::in | std::ios::out | std::ios::binary);
        f.seekp(static_cast<std::streamoff>(bytes / 2));
        f.put('\x5a');
        f.close();
        try {
            cache_load(file);
            FAIL("expected CacheError");
        } catch (const CacheError& e) {
            CHECK(e.code == CacheErrorCode::checksum_mismatch);
        }
    }
    SUBCASE("truncated file") {
        fs::resize_file(file, fs::file_size(file) - 16);
        try {
            cache_load(file);
            FAIL("expected CacheError");
        } catch (const CacheError& e) {
            CHECK(e.code == CacheErrorCode::truncated);
        }
    }
    SUBCASE("bad magic") {
        std::fstream f(file, std::ios::in | std::ios::out | std::ios::binary);
        f.seekp(0);
        f.write("NOPE", 4);
        f.close();
        try {
            cache_load(file);
            FAIL("expected CacheError");
        } catch (const CacheError& e) {
            CHECK(e.code == CacheErrorCode::version_mismatch);
        }
    }
    SUBCASE("missing file") {
        try {
            cache_load("definitely_not_here.tw3w");
            FAIL("expected CacheError");
        } catch (const CacheError& e) {
            CHECK(e.code == CacheErrorCode::io);
        }
    }
    fs::remove(file);
}

TEST_CASE("cache file name is parameter specific") {
    const std::string a = cache_file_name(ModelParams{0.7, 1.0, 1.5, 100});
    const std::string b = cache_file_name(ModelParams{0.7, 1.0, 1.5, 60});
    const std::string c = cache_file_name(ModelParams{0.7, 1.0, 0.5, 100});
    CHECK(a != b);
    CHECK(a != c);
}
