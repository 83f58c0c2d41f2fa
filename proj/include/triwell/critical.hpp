#pragma once

#include <Eigen/Dense>

#include <array>
#include <string>
#include <vector>

#include "triwell/classical.hpp"

namespace triwell {

enum class CriticalClass {
    minimum,
    maximum,
    saddle_unstable,  // energy saddle whose linearized flow has a growing mode
    saddle_stable,    // energy saddle, purely oscillatory linearization
    degenerate,       // singular Hessian, left unclassified
};

std::string to_string(CriticalClass c);

// Stationary configuration of the classical energy surface.
//
// A critical point of the reduced energy lifts to a relative equilibrium of
// the Cartesian flow (a global-phase rotation at the chemical-potential rate
// mu).  Stability is therefore judged in the co-rotating frame; the recorded
// spectral abscissa is max Re lambda of that 6x6 linearization.
struct CriticalPoint {
    ReducedPhasePoint point;
    double energy = 0.0;
    CriticalClass classification = CriticalClass::degenerate;
    std::array<double, 4> hessian_eigenvalues{};   // ascending
    double flow_jacobian_spectral_abscissa = 0.0;  // co-rotating frame
    double mu = 0.0;                               // phase-rotation rate
};

// Analytic gradient/Hessian of the reduced energy in (n1, n3, phi12, phi32);
// interior chart only (n1, n3 > 0, n1 + n3 < 1).
Eigen::Vector4d reduced_energy_gradient(const ReducedPhasePoint& p,
                                        const ClassicalParams& params);
Eigen::Matrix4d reduced_energy_hessian(const ReducedPhasePoint& p,
                                       const ClassicalParams& params);

// 6x6 Jacobian of the Hamiltonian vector field at a Cartesian point.
Eigen::Matrix<double, 6, 6> flow_jacobian(const CartesianPhasePoint& c,
                                          const ClassicalParams& params);

// Linearization around a relative equilibrium in the frame rotating at the
// point's chemical potential: J (hess H - mu I).
Eigen::Matrix<double, 6, 6> corotating_flow_jacobian(const CartesianPhasePoint& c,
                                                     const ClassicalParams& params);

// Spectral abscissa of the reduced linearization: (n1, phi12) and (n3, phi32)
// are canonical pairs of the reduced dynamics, so stability at a stationary
// point is read off J * hess(e).  Equals the nonzero-mode abscissa of the
// co-rotating 6x6 Jacobian, without its two trivial zero pairs.
double reduced_linearization_abscissa(const ReducedPhasePoint& p,
                                      const ClassicalParams& params);

// Newton search over a seed grid (phases seeded from {0, pi} plus random
// perturbations), deduplicated in (n1, n3, cos/sin of both phases) within
// 1e-6, refined to gradient norm <= 1e-10, classified, sorted by energy.
std::vector<CriticalPoint> find_critical_points(const ClassicalParams& params,
                                                int grid_density = 12);

// Energy of the unstable critical point: the saddle-unstable point with the
// largest spectral abscissa.  Past the Hamiltonian-Hopf point of the saddle
// branch (eps ~ 2.15 at U=0.7, J=1) the energy saddle is spectrally elliptic;
// it still organizes the shell topology and is returned as the critical
// energy.  Throws ComputeError when no saddle of either kind exists.
double unstable_critical_energy(const ClassicalParams& params, int grid_density = 12);

}  // namespace triwell
