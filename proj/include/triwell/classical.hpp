#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "triwell/histogram.hpp"
#include "triwell/operators.hpp"

namespace triwell {

// Mean-field limit has no particle number; only the couplings survive.
struct ClassicalParams {
    double U = 0.7;
    double J = 1.0;
    double eps = 0.0;

    ClassicalParams() = default;
    ClassicalParams(double U_, double J_, double eps_) : U(U_), J(J_), eps(eps_) {}
    explicit ClassicalParams(const ModelParams& p) : U(p.U), J(p.J), eps(p.eps) {}
};

// Wraps to (-pi, pi].
double wrap_phase(double phi);

// Classical state in occupation-fraction/relative-phase coordinates
// (N1/N, N3/N, phi12, phi32).  phi23 enters the energy only through
// cos(phi23) = cos(phi32).
struct ReducedPhasePoint {
    double n1 = 0.0;
    double n3 = 0.0;
    double phi12 = 0.0;
    double phi32 = 0.0;
};

// Conjugate coordinates Q_k = sqrt(2 n_k) cos(phi_k), P_k = sqrt(2 n_k) sin(phi_k).
// Total particle fraction sum_k (Q_k^2 + P_k^2)/2 = 1 on the physical shell.
struct CartesianPhasePoint {
    double q1 = 0.0, p1 = 0.0;
    double q2 = 0.0, p2 = 0.0;
    double q3 = 0.0, p3 = 0.0;

    double norm() const {
        return 0.5 * (q1 * q1 + p1 * p1 + q2 * q2 + p2 * p2 + q3 * q3 + p3 * p3);
    }
    std::array<double, 3> occupations() const {
        return {0.5 * (q1 * q1 + p1 * p1), 0.5 * (q2 * q2 + p2 * p2),
                0.5 * (q3 * q3 + p3 * p3)};
    }
};

// Per-particle energy in the reduced chart:
//   U (2(n1+n3) - 1)^2 + eps (n3 - n1)
//   + J sqrt2 sqrt(1-n1-n3) [sqrt(n1) cos(phi12) + sqrt(n3) cos(phi32)].
// Throws std::domain_error outside the simplex n1, n3 >= 0, n1 + n3 <= 1.
double energy_reduced(const ReducedPhasePoint& p, const ClassicalParams& params);

// Same energy in conjugate coordinates (valid anywhere, not only on the shell).
double energy_cartesian(const CartesianPhasePoint& c, const ClassicalParams& params);

// Gauge: global phase fixed by phi2 = 0, so phi1 = phi12 and phi3 = phi32.
CartesianPhasePoint to_cartesian(const ReducedPhasePoint& p);
ReducedPhasePoint to_reduced(const CartesianPhasePoint& c);

// Hamilton equations (dq_i, dp_i) = (+dH/dp_i, -dH/dq_i).
CartesianPhasePoint flow(const CartesianPhasePoint& c, const ClassicalParams& params);

// Classical counterpart of the quantum charge Q (conserved when eps = 0):
//   q = J1^2 n3 + J3^2 n1 - 2 J1 J3 sqrt(n1 n3) cos(phi12 - phi32).
double classical_charge(const CartesianPhasePoint& c, double J1, double J3);

// Max rate of change of the reduced observables (n1, n3, phi12, phi32) under
// the flow at the lifted point.  Vanishes at critical points of the reduced
// energy even though the Cartesian flow there is a global-phase rotation at
// the chemical-potential rate mu (a relative equilibrium, not a fixed point).
double reduced_flow_residual(const ReducedPhasePoint& p, const ClassicalParams& params);

// mu = <grad H, x> / <x, x>; the phase-rotation rate at relative equilibria.
double chemical_potential(const CartesianPhasePoint& c, const ClassicalParams& params);

struct Trajectory {
    std::vector<double> times;  // units of 1/J
    std::vector<CartesianPhasePoint> states;
    std::vector<std::array<double, 3>> occupations;  // N_i/N via (Q^2+P^2)/2
    std::vector<double> energies;

    // max_t |e(t) - e(0)| and max_t |norm(t) - norm(0)|, monitored at every
    // accepted step endpoint as well as at the output samples.
    double energy_drift = 0.0;
    double norm_drift = 0.0;

    std::size_t size() const { return times.size(); }
};

struct IntegratorOptions {
    double t_max = 1000.0;
    double rel_tol = 1e-10;   // admissible range [1e-12, 1e-4]
    double sample_dt = 0.05;  // uniform dense-output interval
};

// Adaptive Dormand-Prince 5(4) with PI step control and 4th-order dense
// output.  Throws ComputeError on step-size underflow (stiffness), carrying
// the last valid time in the message.
Trajectory integrate(const CartesianPhasePoint& c0, const ClassicalParams& params,
                     const IntegratorOptions& opts);

// Draws (n1, n3, phi12) uniformly over the simplex x (-pi, pi], solves the
// energy equation for cos(phi23) in closed form, keeps solvable draws, and
// polishes so |energy - e_target| <= 1e-10.  Deterministic for a given seed.
// Throws ComputeError when e_target is unattainable (rejection budget spent).
std::vector<ReducedPhasePoint> sample_initial_conditions(const ClassicalParams& params,
                                                         double e_target, int count,
                                                         std::uint64_t seed);

// Time-weighted normalized 2D histogram of (N1/N, N3/N) over all samples.
OccupationHistogram occupation_histogram(const std::vector<Trajectory>& trajectories,
                                         int bins);

}  // namespace triwell
