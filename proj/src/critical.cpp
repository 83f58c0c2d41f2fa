#include "triwell/critical.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "triwell/errors.hpp"

namespace triwell {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kGradTol = 1e-12;       // refinement target (< spec bound 1e-10)
constexpr double kDedupTol = 1e-6;
constexpr double kDomainFloor = 1e-12;   // interior guard on n1, n3
constexpr double kDomainCeil = 1e-9;     // interior guard on 1 - n1 - n3

struct Chart {
    double n1, n3, a, b;  // a = phi12, b = phi32
};

ReducedPhasePoint to_point(const Chart& x) {
    return ReducedPhasePoint{x.n1, x.n3, wrap_phase(x.a), wrap_phase(x.b)};
}

bool in_domain(const Chart& x) {
    return x.n1 >= kDomainFloor && x.n3 >= kDomainFloor &&
           x.n1 + x.n3 <= 1.0 - kDomainCeil;
}

}  // namespace

std::string to_string(CriticalClass c) {
    switch (c) {
        case CriticalClass::minimum: return "minimum";
        case CriticalClass::maximum: return "maximum";
        case CriticalClass::saddle_unstable: return "saddle-unstable";
        case CriticalClass::saddle_stable: return "saddle-stable";
        case CriticalClass::degenerate: return "degenerate";
    }
    return "unknown";
}

Eigen::Vector4d reduced_energy_gradient(const ReducedPhasePoint& p,
                                        const ClassicalParams& prm) {
    const double k = prm.J * std::sqrt(2.0);
    const double r1 = std::sqrt(p.n1), r3 = std::sqrt(p.n3);
    const double r2 = std::sqrt(1.0 - p.n1 - p.n3);
    const double c1 = std::cos(p.phi12), s1 = std::sin(p.phi12);
    const double c3 = std::cos(p.phi32), s3 = std::sin(p.phi32);
    const double bracket = r1 * c1 + r3 * c3;
    const double common = 4.0 * prm.U * (2.0 * (p.n1 + p.n3) - 1.0);

    Eigen::Vector4d g;
    g[0] = common - prm.eps + k * (-bracket / (2.0 * r2) + r2 * c1 / (2.0 * r1));
    g[1] = common + prm.eps + k * (-bracket / (2.0 * r2) + r2 * c3 / (2.0 * r3));
    g[2] = -k * r2 * r1 * s1;
    g[3] = -k * r2 * r3 * s3;
    return g;
}

Eigen::Matrix4d reduced_energy_hessian(const ReducedPhasePoint& p,
                                       const ClassicalParams& prm) {
    const double k = prm.J * std::sqrt(2.0);
    const double r1 = std::sqrt(p.n1), r3 = std::sqrt(p.n3);
    const double r2 = std::sqrt(1.0 - p.n1 - p.n3);
    const double c1 = std::cos(p.phi12), s1 = std::sin(p.phi12);
    const double c3 = std::cos(p.phi32), s3 = std::sin(p.phi32);
    const double bracket = r1 * c1 + r3 * c3;
    const double r2_3 = r2 * r2 * r2;

    Eigen::Matrix4d h;
    h(0, 0) = 8.0 * prm.U -
              k * (c1 / (2.0 * r1 * r2) + bracket / (4.0 * r2_3) +
                   r2 * c1 / (4.0 * r1 * r1 * r1));
    h(1, 1) = 8.0 * prm.U -
              k * (c3 / (2.0 * r3 * r2) + bracket / (4.0 * r2_3) +
                   r2 * c3 / (4.0 * r3 * r3 * r3));
    h(0, 1) = 8.0 * prm.U -
              k * (c1 / (4.0 * r1 * r2) + c3 / (4.0 * r3 * r2) + bracket / (4.0 * r2_3));
    h(0, 2) = k * s1 * (r1 / (2.0 * r2) - r2 / (2.0 * r1));
    h(0, 3) = k * r3 * s3 / (2.0 * r2);
    h(1, 2) = k * r1 * s1 / (2.0 * r2);
    h(1, 3) = k * s3 * (r3 / (2.0 * r2) - r2 / (2.0 * r3));
    h(2, 2) = -k * r2 * r1 * c1;
    h(3, 3) = -k * r2 * r3 * c3;
    h(2, 3) = 0.0;
    h(1, 0) = h(0, 1);
    h(2, 0) = h(0, 2);
    h(3, 0) = h(0, 3);
    h(2, 1) = h(1, 2);
    h(3, 1) = h(1, 3);
    h(3, 2) = h(2, 3);
    return h;
}

Eigen::Matrix<double, 6, 6> flow_jacobian(const CartesianPhasePoint& c,
                                          const ClassicalParams& prm) {
    const double x[6] = {c.q1, c.p1, c.q2, c.p2, c.q3, c.p3};
    const double sigma[6] = {1, 1, -1, -1, 1, 1};  // sign in S = R1 - R2 + R3
    const double tau[6] = {-1, -1, 0, 0, 1, 1};    // sign in eps (R3 - R1)/2
    const double s = x[0] * x[0] + x[1] * x[1] - x[2] * x[2] - x[3] * x[3] +
                     x[4] * x[4] + x[5] * x[5];
    const double j = prm.J / std::sqrt(2.0);

    // Hessian of the energy in the 6 Cartesian coordinates
    Eigen::Matrix<double, 6, 6> m;
    for (int i = 0; i < 6; ++i) {
        for (int l = 0; l < 6; ++l) {
            double v = 2.0 * prm.U * sigma[i] * sigma[l] * x[i] * x[l];
            if (i == l) v += prm.U * s * sigma[i] + prm.eps * tau[i];
            m(i, l) = v;
        }
    }
    // tunneling term Q1Q2 + P1P2 + Q2Q3 + P2P3
    m(0, 2) += j; m(2, 0) += j;
    m(1, 3) += j; m(3, 1) += j;
    m(2, 4) += j; m(4, 2) += j;
    m(3, 5) += j; m(5, 3) += j;

    // flow = J_symp * grad H  =>  Jacobian = J_symp * m
    Eigen::Matrix<double, 6, 6> jac;
    for (int w = 0; w < 3; ++w) {
        jac.row(2 * w) = m.row(2 * w + 1);       // dq_w/dt = +dH/dp_w
        jac.row(2 * w + 1) = -m.row(2 * w);      // dp_w/dt = -dH/dq_w
    }
    return jac;
}

Eigen::Matrix<double, 6, 6> corotating_flow_jacobian(const CartesianPhasePoint& c,
                                                     const ClassicalParams& prm) {
    Eigen::Matrix<double, 6, 6> jac = flow_jacobian(c, prm);
    const double mu = chemical_potential(c, prm);
    // subtract mu * (norm-rotation generator): dq/dt -= mu p, dp/dt += mu q
    for (int w = 0; w < 3; ++w) {
        jac(2 * w, 2 * w + 1) -= mu;
        jac(2 * w + 1, 2 * w) += mu;
    }
    return jac;
}

double reduced_linearization_abscissa(const ReducedPhasePoint& p,
                                      const ClassicalParams& prm) {
    const Eigen::Matrix4d h = reduced_energy_hessian(p, prm);
    // reorder chart (n1, n3, a, b) into canonical pairs z = (n1, a, n3, b)
    const int map[4] = {0, 2, 1, 3};
    Eigen::Matrix4d hz;
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) hz(i, j) = h(map[i], map[j]);
    }
    Eigen::Matrix4d symp = Eigen::Matrix4d::Zero();
    symp(0, 1) = -1;  // dn/dt = -de/dphi
    symp(1, 0) = 1;   // dphi/dt = +de/dn
    symp(2, 3) = -1;
    symp(3, 2) = 1;
    const Eigen::Matrix4d lin = symp * hz;
    Eigen::EigenSolver<Eigen::Matrix4d> es(lin, false);
    double abscissa = -1e300;
    for (int i = 0; i < 4; ++i) abscissa = std::max(abscissa, es.eigenvalues()[i].real());
    return abscissa;
}

namespace {

// Interior critical points have sin(phi12) = sin(phi32) = 0 (the phase
// gradients -k r2 r1 sin(phi12), -k r2 r3 sin(phi32) vanish only there), so
// each lives on one of four fixed-phase sheets.  2D Newton on a sheet is the
// complete search; the 4D refinement below is the safety net for the rest.
bool newton_refine_sheet(Chart& x, const ClassicalParams& prm) {
    for (int iter = 0; iter < 100; ++iter) {
        if (!in_domain(x)) return false;
        const ReducedPhasePoint p = to_point(x);
        const Eigen::Vector4d g4 = reduced_energy_gradient(p, prm);
        const Eigen::Vector2d g(g4[0], g4[1]);
        if (!g.allFinite()) return false;
        if (g.norm() <= kGradTol) return true;

        const Eigen::Matrix4d h4 = reduced_energy_hessian(p, prm);
        Eigen::Matrix2d h;
        h << h4(0, 0), h4(0, 1), h4(1, 0), h4(1, 1);
        Eigen::FullPivLU<Eigen::Matrix2d> lu(h);
        if (!lu.isInvertible()) return false;
        const Eigen::Vector2d step = lu.solve(-g);
        if (!step.allFinite()) return false;

        double lambda = 1.0;
        bool moved = false;
        for (int back = 0; back < 40; ++back, lambda *= 0.5) {
            Chart trial{x.n1 + lambda * step[0], x.n3 + lambda * step[1], x.a, x.b};
            if (!in_domain(trial)) continue;
            const Eigen::Vector4d gt4 = reduced_energy_gradient(to_point(trial), prm);
            const Eigen::Vector2d gt(gt4[0], gt4[1]);
            if (!gt.allFinite()) continue;
            if (gt.norm() <= (1.0 - 0.25 * lambda) * g.norm() || gt.norm() <= kGradTol) {
                x = trial;
                moved = true;
                break;
            }
        }
        if (!moved) return false;
    }
    return false;
}

// Damped Newton on the gradient; returns true on convergence.
bool newton_refine(Chart& x, const ClassicalParams& prm) {
    for (int iter = 0; iter < 100; ++iter) {
        if (!in_domain(x)) return false;
        const ReducedPhasePoint p = to_point(Chart{x.n1, x.n3, x.a, x.b});
        const Eigen::Vector4d g = reduced_energy_gradient(p, prm);
        const double gnorm = g.norm();
        if (!std::isfinite(gnorm)) return false;
        if (gnorm <= kGradTol) return true;

        const Eigen::Matrix4d h = reduced_energy_hessian(p, prm);
        Eigen::FullPivLU<Eigen::Matrix4d> lu(h);
        if (!lu.isInvertible()) return false;
        const Eigen::Vector4d step = lu.solve(-g);
        if (!step.allFinite()) return false;

        double lambda = 1.0;
        bool moved = false;
        for (int back = 0; back < 30; ++back, lambda *= 0.5) {
            Chart trial{x.n1 + lambda * step[0], x.n3 + lambda * step[1],
                        x.a + lambda * step[2], x.b + lambda * step[3]};
            if (!in_domain(trial)) continue;
            const Eigen::Vector4d gt =
                reduced_energy_gradient(to_point(trial), prm);
            if (!gt.allFinite()) continue;
            if (gt.norm() <= (1.0 - 0.25 * lambda) * gnorm || gt.norm() <= kGradTol) {
                x = trial;
                moved = true;
                break;
            }
        }
        if (!moved) return false;
    }
    return false;
}

CriticalPoint classify(const Chart& x, const ClassicalParams& prm) {
    CriticalPoint cp;
    cp.point = to_point(x);
    cp.energy = energy_reduced(cp.point, prm);

    const Eigen::Matrix4d h = reduced_energy_hessian(cp.point, prm);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(h);
    for (int i = 0; i < 4; ++i) cp.hessian_eigenvalues[static_cast<std::size_t>(i)] = es.eigenvalues()[i];

    cp.mu = chemical_potential(to_cartesian(cp.point), prm);
    // the reduced 4x4 linearization carries the same nonzero modes as the
    // co-rotating 6x6 Jacobian but none of its numerically noisy zero pairs
    cp.flow_jacobian_spectral_abscissa = reduced_linearization_abscissa(cp.point, prm);

    // singular below the eigensolver's resolution floor for this Hessian
    const double scale = std::max(std::abs(es.eigenvalues()[0]),
                                  std::abs(es.eigenvalues()[3]));
    const double degenerate_tol = 32.0 * std::numeric_limits<double>::epsilon() * scale;
    bool any_small = false;
    for (int i = 0; i < 4; ++i) {
        any_small = any_small || std::abs(es.eigenvalues()[i]) < degenerate_tol;
    }
    if (any_small) {
        cp.classification = CriticalClass::degenerate;
    } else if (es.eigenvalues()[0] > 0.0) {
        cp.classification = CriticalClass::minimum;
    } else if (es.eigenvalues()[3] < 0.0) {
        cp.classification = CriticalClass::maximum;
    } else {
        cp.classification = cp.flow_jacobian_spectral_abscissa > 1e-8
                                ? CriticalClass::saddle_unstable
                                : CriticalClass::saddle_stable;
    }
    return cp;
}

std::array<double, 6> dedup_features(const ReducedPhasePoint& p) {
    return {p.n1, p.n3, std::cos(p.phi12), std::sin(p.phi12),
            std::cos(p.phi32), std::sin(p.phi32)};
}

double feature_distance(const std::array<double, 6>& a, const std::array<double, 6>& b) {
    double sum = 0.0;
    for (int i = 0; i < 6; ++i) sum += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(sum);
}

}  // namespace

std::vector<CriticalPoint> find_critical_points(const ClassicalParams& prm,
                                                int grid_density) {
    if (grid_density < 4) {
        throw std::invalid_argument("find_critical_points: grid_density must be >= 4");
    }

    // Seed occupations: regular interior grid plus edge-hugging values, which
    // matter in the strong-tilt regime where stationary points sit at n ~ 1e-4.
    std::vector<double> n_seeds = {1e-4, 1e-3, 1e-2, 0.05};
    for (int i = 1; i <= grid_density; ++i) {
        n_seeds.push_back(static_cast<double>(i) / (grid_density + 1));
    }
    const double phase_seeds[2] = {0.0, kPi};

    std::mt19937_64 rng(0x73c4171ca1u);  // fixed: seeds must be reproducible
    std::uniform_real_distribution<double> jitter(-0.3, 0.3);

    std::vector<CriticalPoint> found;
    std::vector<std::array<double, 6>> features;

    auto accept = [&](const Chart& x) {
        const CriticalPoint cp = classify(x, prm);
        const auto f = dedup_features(cp.point);
        for (const auto& known : features) {
            if (feature_distance(f, known) < kDedupTol) return;
        }
        features.push_back(f);
        found.push_back(cp);
    };

    for (double n1 : n_seeds) {
        for (double n3 : n_seeds) {
            if (n1 + n3 > 1.0 - 5e-3) continue;
            for (double a : phase_seeds) {
                for (double b : phase_seeds) {
                    Chart sheet{n1, n3, a, b};
                    if (in_domain(sheet) && newton_refine_sheet(sheet, prm)) accept(sheet);
                    // randomly perturbed 4D companion of the {0, pi} seed
                    Chart free{n1, n3, a + jitter(rng), b + jitter(rng)};
                    if (in_domain(free) && newton_refine(free, prm)) accept(free);
                }
            }
        }
    }

    std::sort(found.begin(), found.end(), [](const CriticalPoint& a, const CriticalPoint& b) {
        if (a.energy != b.energy) return a.energy < b.energy;
        if (a.point.n1 != b.point.n1) return a.point.n1 < b.point.n1;
        return a.point.n3 < b.point.n3;
    });
    return found;
}

double unstable_critical_energy(const ClassicalParams& prm, int grid_density) {
    const std::vector<CriticalPoint> points = find_critical_points(prm, grid_density);
    const CriticalPoint* best = nullptr;
    auto better = [&](const CriticalPoint& cp) {
        return best == nullptr ||
               cp.flow_jacobian_spectral_abscissa > best->flow_jacobian_spectral_abscissa ||
               (cp.flow_jacobian_spectral_abscissa == best->flow_jacobian_spectral_abscissa &&
                cp.energy < best->energy);
    };
    for (const CriticalPoint& cp : points) {
        if (cp.classification == CriticalClass::saddle_unstable && better(cp)) best = &cp;
    }
    if (best == nullptr) {
        // past the Hamiltonian-Hopf point the saddle is elliptic but still
        // marks the critical energy of the shell topology
        for (const CriticalPoint& cp : points) {
            if (cp.classification == CriticalClass::saddle_stable && better(cp)) best = &cp;
        }
    }
    if (best == nullptr) {
        throw ComputeError("unstable_critical_energy: no energy-surface saddle found");
    }
    return best->energy;
}

}  // namespace triwell
