#include "triwell/spectrum.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <random>
#include <stdexcept>
#include <string>

#include "triwell/checksum.hpp"
#include "triwell/errors.hpp"

#include <Eigen/Eigenvalues>

#ifdef TRIWELL_USE_LAPACKE
#include <lapacke.h>
#endif

namespace triwell {

namespace {

constexpr char kMagic[4] = {'T', 'W', '3', 'W'};
constexpr std::uint32_t kFormatVersion = 1;  // bumps with any ordering change
constexpr std::size_t kHeaderSize = 64;
constexpr std::size_t kHashedHeaderBytes = 44;  // magic..eps

void put_bytes(unsigned char* dst, const void* src, std::size_t n) {
    std::memcpy(dst, src, n);
}

}  // namespace

std::vector<double> Spectrum::normalized_energies() const {
    std::vector<double> e(static_cast<std::size_t>(energies.size()));
    for (Eigen::Index m = 0; m < energies.size(); ++m) {
        e[static_cast<std::size_t>(m)] = energies[m] / params.N;
    }
    return e;
}

Spectrum diagonalize(const SymmetricOperator& H, const ModelParams& p) {
    p.validate();
    const int d = H.dimension();
    if (d <= 0) throw std::invalid_argument("diagonalize: empty operator");

    Spectrum s;
    s.params = p;
    s.vectors = H.to_dense();
    s.energies.resize(d);

#ifdef TRIWELL_USE_LAPACKE
    const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', d,
                                           s.vectors.data(), d, s.energies.data());
    if (info != 0) {
        throw ComputeError("dsyevd failed to converge, info=" + std::to_string(info) +
                           " at D=" + std::to_string(d));
    }
#else
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(s.vectors);
    if (solver.info() != Eigen::Success) {
        throw ComputeError("SelfAdjointEigenSolver failed at D=" + std::to_string(d));
    }
    s.energies = solver.eigenvalues();
    s.vectors = solver.eigenvectors();
#endif
    return s;
}

PartialSpectrum lanczos_lowest(const SymmetricOperator& H, const ModelParams& p, int k,
                               const LanczosOptions& opts) {
    p.validate();
    const int d = H.dimension();
    if (d <= 0) throw std::invalid_argument("lanczos_lowest: empty operator");
    if (k < 1 || k > d) throw std::invalid_argument("lanczos_lowest: k out of [1, D]");

    const int max_iter = std::min(d, std::max(opts.max_iterations, 2 * k + 10));
    const double scale = std::max(H.frobenius_norm(), 1e-300);

    // Krylov basis, kept fully orthogonal; two Gram-Schmidt passes per step.
    Eigen::MatrixXd basis(d, max_iter);
    std::vector<double> alpha, beta;  // T diagonal / off-diagonal

    std::mt19937_64 rng(opts.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::VectorXd v(d);
    for (int i = 0; i < d; ++i) v[i] = gauss(rng);
    v.normalize();
    basis.col(0) = v;

    Eigen::VectorXd w(d);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> small;
    auto extract = [&](int m, double b) -> bool {
        Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
        for (int i = 0; i < m; ++i) {
            t(i, i) = alpha[static_cast<std::size_t>(i)];
            if (i + 1 < m) t(i, i + 1) = t(i + 1, i) = beta[static_cast<std::size_t>(i)];
        }
        small.compute(t);
        for (int i = 0; i < k; ++i) {
            if (b * std::abs(small.eigenvectors()(m - 1, i)) > opts.tolerance * scale) {
                return false;
            }
        }
        return true;
    };

    for (int m = 1; m <= max_iter; ++m) {
        w = H.apply(basis.col(m - 1));
        alpha.push_back(basis.col(m - 1).dot(w));
        w -= alpha.back() * basis.col(m - 1);
        if (m > 1) w -= beta.back() * basis.col(m - 2);
        for (int pass = 0; pass < 2; ++pass) {
            w -= basis.leftCols(m) * (basis.leftCols(m).transpose() * w);
        }

        double b = w.norm();
        const bool invariant = b < 1e-13 * scale;
        if (m >= k && (m % 10 == 0 || m == max_iter || invariant) && extract(m, b)) {
            PartialSpectrum out;
            out.params = p;
            out.energies = small.eigenvalues().head(k);
            out.vectors = basis.leftCols(m) * small.eigenvectors().leftCols(k);
            for (int i = 0; i < k; ++i) out.vectors.col(i).normalize();
            return out;
        }
        if (m == max_iter) break;

        if (invariant) {
            // Krylov space closed early: deflate with a fresh direction
            // (beta = 0 keeps the tridiagonal block structure exact)
            for (int i = 0; i < d; ++i) w[i] = gauss(rng);
            for (int pass = 0; pass < 2; ++pass) {
                w -= basis.leftCols(m) * (basis.leftCols(m).transpose() * w);
            }
            b = w.norm();
            if (b < 1e-12) break;  // basis spans the space
            beta.push_back(0.0);
        } else {
            beta.push_back(b);
        }
        basis.col(m) = w / b;
    }
    throw ComputeError("lanczos_lowest: not converged within " + std::to_string(max_iter) +
                       " iterations (k=" + std::to_string(k) + ", D=" + std::to_string(d) +
                       ", tol=" + std::to_string(opts.tolerance) + ")");
}

void cache_store(const Spectrum& s, const std::filesystem::path& path) {
    const std::uint32_t n = static_cast<std::uint32_t>(s.params.N);
    const std::uint64_t d = static_cast<std::uint64_t>(s.dimension());

    unsigned char header[kHeaderSize] = {0};
    put_bytes(header + 0, kMagic, 4);
    put_bytes(header + 4, &kFormatVersion, 4);
    put_bytes(header + 8, &n, 4);
    put_bytes(header + 12, &d, 8);
    put_bytes(header + 20, &s.params.U, 8);
    put_bytes(header + 28, &s.params.J, 8);
    put_bytes(header + 36, &s.params.eps, 8);
    const std::uint64_t header_sum = fnv1a64(header, kHashedHeaderBytes);
    put_bytes(header + 44, &header_sum, 8);

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw CacheError(CacheErrorCode::io, "cannot open for write: " + path.string());
    out.write(reinterpret_cast<const char*>(header), kHeaderSize);

    std::uint64_t payload_sum = fnv1a64(nullptr, 0);
    auto write_block = [&](const double* data, std::size_t count) {
        const auto* bytes = reinterpret_cast<const char*>(data);
        const std::size_t len = count * sizeof(double);
        out.write(bytes, static_cast<std::streamsize>(len));
        payload_sum = fnv1a64(bytes, len, payload_sum);
    };
    write_block(s.energies.data(), d);
    write_block(s.vectors.data(), d * d);  // Eigen is column-major
    out.write(reinterpret_cast<const char*>(&payload_sum), 8);
    if (!out) throw CacheError(CacheErrorCode::io, "write failed: " + path.string());
}

Spectrum cache_load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CacheError(CacheErrorCode::io, "cannot open for read: " + path.string());

    unsigned char header[kHeaderSize];
    in.read(reinterpret_cast<char*>(header), kHeaderSize);
    if (in.gcount() != static_cast<std::streamsize>(kHeaderSize)) {
        throw CacheError(CacheErrorCode::truncated, "short header: " + path.string());
    }
    if (std::memcmp(header, kMagic, 4) != 0) {
        throw CacheError(CacheErrorCode::version_mismatch, "bad magic: " + path.string());
    }
    std::uint32_t version = 0;
    std::memcpy(&version, header + 4, 4);
    if (version != kFormatVersion) {
        throw CacheError(CacheErrorCode::version_mismatch,
                         "format version " + std::to_string(version) + ", expected " +
                             std::to_string(kFormatVersion));
    }
    std::uint64_t stored_header_sum = 0;
    std::memcpy(&stored_header_sum, header + 44, 8);
    if (stored_header_sum != fnv1a64(header, kHashedHeaderBytes)) {
        throw CacheError(CacheErrorCode::checksum_mismatch, "header checksum: " + path.string());
    }

    Spectrum s;
    std::uint32_t n = 0;
    std::uint64_t d = 0;
    std::memcpy(&n, header + 8, 4);
    std::memcpy(&d, header + 12, 8);
    std::memcpy(&s.params.U, header + 20, 8);
    std::memcpy(&s.params.J, header + 28, 8);
    std::memcpy(&s.params.eps, header + 36, 8);
    s.params.N = static_cast<int>(n);
    if (d == 0 || d != static_cast<std::uint64_t>(fock_dimension(s.params.N))) {
        throw CacheError(CacheErrorCode::param_mismatch,
                         "stored D inconsistent with N: " + path.string());
    }

    const auto di = static_cast<Eigen::Index>(d);
    s.energies.resize(di);
    s.vectors.resize(di, di);
    std::uint64_t payload_sum = fnv1a64(nullptr, 0);
    auto read_block = [&](double* data, std::size_t count) {
        auto* bytes = reinterpret_cast<char*>(data);
        const std::size_t len = count * sizeof(double);
        in.read(bytes, static_cast<std::streamsize>(len));
        if (in.gcount() != static_cast<std::streamsize>(len)) {
            throw CacheError(CacheErrorCode::truncated, "short payload: " + path.string());
        }
        payload_sum = fnv1a64(bytes, len, payload_sum);
    };
    read_block(s.energies.data(), d);
    read_block(s.vectors.data(), d * d);

    std::uint64_t stored_payload_sum = 0;
    in.read(reinterpret_cast<char*>(&stored_payload_sum), 8);
    if (in.gcount() != 8) {
        throw CacheError(CacheErrorCode::truncated, "missing payload checksum: " + path.string());
    }
    if (stored_payload_sum != payload_sum) {
        throw CacheError(CacheErrorCode::checksum_mismatch, "payload checksum: " + path.string());
    }
    return s;
}

Spectrum cache_load(const std::filesystem::path& path, const ModelParams& expect) {
    Spectrum s = cache_load(path);
    if (s.params.N != expect.N || s.params.U != expect.U || s.params.J != expect.J ||
        s.params.eps != expect.eps) {
        throw CacheError(CacheErrorCode::param_mismatch,
                         "cached params differ from requested: " + path.string());
    }
    return s;
}

std::string cache_file_name(const ModelParams& p) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "spec_N%d_U%.17g_J%.17g_eps%.17g.tw3w", p.N, p.U, p.J,
                  p.eps);
    return std::string(buf);
}

}  // namespace triwell
