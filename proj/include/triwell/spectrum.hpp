#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <vector>

#include "triwell/operators.hpp"

namespace triwell {

// Full eigendecomposition of one fixed-N Hamiltonian block.
// energies ascending; vectors(:, m) is the m-th eigenvector, orthonormal.
struct Spectrum {
    ModelParams params;
    Eigen::VectorXd energies;
    Eigen::MatrixXd vectors;

    int dimension() const { return static_cast<int>(energies.size()); }

    // Per-particle energies e_m = E_m / N, the scale the classical model
    // lives on (H_cl = <alpha|H|alpha>/N).
    std::vector<double> normalized_energies() const;
};

// Dense symmetric diagonalization (LAPACK dsyevd when available, Eigen
// otherwise).  Throws ComputeError on solver failure.
Spectrum diagonalize(const SymmetricOperator& H, const ModelParams& p);

// Lowest eigenpairs without forming the dense matrix.
// energies ascending (k of them); vectors is D x k.
struct PartialSpectrum {
    ModelParams params;
    Eigen::VectorXd energies;
    Eigen::MatrixXd vectors;

    int count() const { return static_cast<int>(energies.size()); }
};

struct LanczosOptions {
    int max_iterations = 600;
    double tolerance = 1e-10;  // residual bound relative to the operator scale
    std::uint64_t seed = 1905;  // start-vector seed (kept fixed for determinism)
};

// Lanczos with full reorthogonalization, extremal (lowest-k) variant of the
// matrix-free path.  Exact degenerate multiplets are resolved through
// deflation restarts, which the fixed start seed keeps reproducible.
// Throws ComputeError with the iteration state when the requested pairs
// have not converged within max_iterations.
PartialSpectrum lanczos_lowest(const SymmetricOperator& H, const ModelParams& p, int k,
                               const LanczosOptions& opts = {});

// Binary spectrum cache.
//
// Layout (little-endian):
//   64-byte header: magic "TW3W", format version u32, N u32, D u64,
//   U f64, J f64, eps f64, header checksum u64 (FNV-1a over bytes [0,44)),
//   zero padding to 64.
// Payload: D f64 eigenvalues, D*D f64 eigenvectors column-major,
// trailing u64 FNV-1a checksum over the payload bytes.
void cache_store(const Spectrum& s, const std::filesystem::path& path);
Spectrum cache_load(const std::filesystem::path& path);
// Additionally rejects a file whose (U, J, eps, N) differ from `expect`
// (CacheErrorCode::param_mismatch).
Spectrum cache_load(const std::filesystem::path& path, const ModelParams& expect);

// Canonical cache file name for a parameter set, e.g.
// "spec_N100_U0.7_J1_eps1.5.tw3w".
std::string cache_file_name(const ModelParams& p);

}  // namespace triwell
