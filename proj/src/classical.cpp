#include "triwell/classical.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "triwell/errors.hpp"

namespace triwell {

namespace {

constexpr double kPi = 3.14159265358979323846;

using State = std::array<double, 6>;  // q1 p1 q2 p2 q3 p3

State to_state(const CartesianPhasePoint& c) {
    return {c.q1, c.p1, c.q2, c.p2, c.q3, c.p3};
}

CartesianPhasePoint from_state(const State& y) {
    return CartesianPhasePoint{y[0], y[1], y[2], y[3], y[4], y[5]};
}

void derivative(const State& y, const ClassicalParams& prm, State& dy) {
    const double q1 = y[0], p1 = y[1], q2 = y[2], p2 = y[3], q3 = y[4], p3 = y[5];
    const double s = q1 * q1 + p1 * p1 - q2 * q2 - p2 * p2 + q3 * q3 + p3 * p3;
    const double us = prm.U * s;
    const double j = prm.J / std::sqrt(2.0);
    dy[0] = us * p1 - prm.eps * p1 + j * p2;
    dy[1] = -us * q1 + prm.eps * q1 - j * q2;
    dy[2] = -us * p2 + j * (p1 + p3);
    dy[3] = us * q2 - j * (q1 + q3);
    dy[4] = us * p3 + prm.eps * p3 + j * p2;
    dy[5] = -us * q3 - prm.eps * q3 - j * q2;
}

double state_energy(const State& y, const ClassicalParams& prm) {
    return energy_cartesian(from_state(y), prm);
}

double state_norm(const State& y) {
    return 0.5 * (y[0] * y[0] + y[1] * y[1] + y[2] * y[2] + y[3] * y[3] + y[4] * y[4] +
                  y[5] * y[5]);
}

}  // namespace

double wrap_phase(double phi) {
    double w = std::remainder(phi, 2.0 * kPi);
    if (w <= -kPi) w += 2.0 * kPi;
    return w;
}

double energy_reduced(const ReducedPhasePoint& p, const ClassicalParams& params) {
    if (!(p.n1 >= 0.0) || !(p.n3 >= 0.0) || p.n1 + p.n3 > 1.0 + 1e-12) {
        throw std::domain_error("energy_reduced: (n1, n3) outside the simplex: n1=" +
                                std::to_string(p.n1) + " n3=" + std::to_string(p.n3));
    }
    const double r1 = std::sqrt(p.n1);
    const double r3 = std::sqrt(p.n3);
    const double r2 = std::sqrt(std::max(0.0, 1.0 - p.n1 - p.n3));
    const double imbalance = 2.0 * (p.n1 + p.n3) - 1.0;
    return params.U * imbalance * imbalance + params.eps * (p.n3 - p.n1) +
           params.J * std::sqrt(2.0) * r2 *
               (r1 * std::cos(p.phi12) + r3 * std::cos(p.phi32));
}

double energy_cartesian(const CartesianPhasePoint& c, const ClassicalParams& params) {
    const double s = c.q1 * c.q1 + c.p1 * c.p1 - c.q2 * c.q2 - c.p2 * c.p2 + c.q3 * c.q3 +
                     c.p3 * c.p3;
    return 0.25 * params.U * s * s +
           0.5 * params.eps * (c.q3 * c.q3 + c.p3 * c.p3 - c.q1 * c.q1 - c.p1 * c.p1) +
           params.J / std::sqrt(2.0) *
               (c.q1 * c.q2 + c.p1 * c.p2 + c.q2 * c.q3 + c.p2 * c.p3);
}

CartesianPhasePoint to_cartesian(const ReducedPhasePoint& p) {
    const double n2 = std::max(0.0, 1.0 - p.n1 - p.n3);
    CartesianPhasePoint c;
    c.q1 = std::sqrt(2.0 * std::max(0.0, p.n1)) * std::cos(p.phi12);
    c.p1 = std::sqrt(2.0 * std::max(0.0, p.n1)) * std::sin(p.phi12);
    c.q2 = std::sqrt(2.0 * n2);  // phi2 = 0 gauge
    c.p2 = 0.0;
    c.q3 = std::sqrt(2.0 * std::max(0.0, p.n3)) * std::cos(p.phi32);
    c.p3 = std::sqrt(2.0 * std::max(0.0, p.n3)) * std::sin(p.phi32);
    return c;
}

ReducedPhasePoint to_reduced(const CartesianPhasePoint& c) {
    ReducedPhasePoint p;
    p.n1 = 0.5 * (c.q1 * c.q1 + c.p1 * c.p1);
    p.n3 = 0.5 * (c.q3 * c.q3 + c.p3 * c.p3);
    const double phi1 = std::atan2(c.p1, c.q1);
    const double phi2 = std::atan2(c.p2, c.q2);
    const double phi3 = std::atan2(c.p3, c.q3);
    p.phi12 = wrap_phase(phi1 - phi2);
    p.phi32 = wrap_phase(phi3 - phi2);
    return p;
}

CartesianPhasePoint flow(const CartesianPhasePoint& c, const ClassicalParams& params) {
    State y = to_state(c), dy;
    derivative(y, params, dy);
    return from_state(dy);
}

double classical_charge(const CartesianPhasePoint& c, double J1, double J3) {
    const double n1 = 0.5 * (c.q1 * c.q1 + c.p1 * c.p1);
    const double n3 = 0.5 * (c.q3 * c.q3 + c.p3 * c.p3);
    // sqrt(n1 n3) cos(phi1 - phi3) = (Q1 Q3 + P1 P3)/2
    return J1 * J1 * n3 + J3 * J3 * n1 - J1 * J3 * (c.q1 * c.q3 + c.p1 * c.p3);
}

double chemical_potential(const CartesianPhasePoint& c, const ClassicalParams& params) {
    const CartesianPhasePoint f = flow(c, params);
    // flow = J grad H, so grad H = (-p1dot, q1dot, ...)
    const double num = -f.p1 * c.q1 + f.q1 * c.p1 - f.p2 * c.q2 + f.q2 * c.p2 -
                       f.p3 * c.q3 + f.q3 * c.p3;
    const double den = c.q1 * c.q1 + c.p1 * c.p1 + c.q2 * c.q2 + c.p2 * c.p2 +
                       c.q3 * c.q3 + c.p3 * c.p3;
    return num / den;
}

double reduced_flow_residual(const ReducedPhasePoint& p, const ClassicalParams& params) {
    const CartesianPhasePoint x = to_cartesian(p);
    const CartesianPhasePoint f = flow(x, params);
    const double dn1 = x.q1 * f.q1 + x.p1 * f.p1;
    const double dn3 = x.q3 * f.q3 + x.p3 * f.p3;
    auto phase_rate = [](double q, double pp, double fq, double fp) {
        const double r2 = q * q + pp * pp;
        return (q * fp - pp * fq) / r2;
    };
    const double w1 = phase_rate(x.q1, x.p1, f.q1, f.p1);
    const double w2 = phase_rate(x.q2, x.p2, f.q2, f.p2);
    const double w3 = phase_rate(x.q3, x.p3, f.q3, f.p3);
    return std::max({std::abs(dn1), std::abs(dn3), std::abs(w1 - w2), std::abs(w3 - w2)});
}

// ---------------------------------------------------------------------------
// Dormand-Prince 5(4), PI step control, 4th-order dense output (Hairer's
// DOPRI5 coefficients).

namespace {

struct Dopri5 {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                            a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                            a75 = -2187.0 / 6784, a76 = 11.0 / 84;
    // e_i = b5_i - b4_i (embedded error weights)
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
    // dense-output weights
    static constexpr double d1 = -12715105075.0 / 11282082432.0;
    static constexpr double d3 = 87487479700.0 / 32700410799.0;
    static constexpr double d4 = -10690763975.0 / 1880347072.0;
    static constexpr double d5 = 701980252875.0 / 199316789632.0;
    static constexpr double d6 = -1453857185.0 / 822651844.0;
    static constexpr double d7 = 69997945.0 / 29380423.0;
};

struct DenseSegment {
    double t0 = 0.0;
    double h = 0.0;
    State r1, r2, r3, r4, r5;

    State eval(double t) const {
        const double theta = (t - t0) / h;
        const double theta1 = 1.0 - theta;
        State out;
        for (int i = 0; i < 6; ++i) {
            out[i] = r1[i] +
                     theta * (r2[i] + theta1 * (r3[i] + theta * (r4[i] + theta1 * r5[i])));
        }
        return out;
    }
};

}  // namespace

Trajectory integrate(const CartesianPhasePoint& c0, const ClassicalParams& params,
                     const IntegratorOptions& opts) {
    if (!(opts.t_max > 0.0)) throw std::invalid_argument("integrate: t_max must be > 0");
    if (!(opts.rel_tol >= 1e-12 && opts.rel_tol <= 1e-4)) {
        throw std::invalid_argument("integrate: rel_tol must lie in [1e-12, 1e-4]");
    }
    if (!(opts.sample_dt > 0.0)) {
        throw std::invalid_argument("integrate: sample_dt must be > 0");
    }

    const double rtol = opts.rel_tol;
    // coordinates are bounded by sqrt(2) on the shell, so the relative term
    // dominates; the small absolute floor only guards near-zero components
    const double atol = 0.01 * rtol;
    constexpr double safe = 0.9, beta = 0.04, expo1 = 0.2 - beta * 0.75;
    constexpr double fac_min = 0.2, fac_max = 10.0;
    constexpr long max_steps = 200000000L;

    State y = to_state(c0);
    double t = 0.0;
    const double e0 = state_energy(y, params);
    const double norm0 = state_norm(y);

    Trajectory traj;
    const auto n_samples = static_cast<std::size_t>(opts.t_max / opts.sample_dt + 1e-9) + 1;
    traj.times.reserve(n_samples);
    traj.states.reserve(n_samples);

    auto record = [&](double ts, const State& ys) {
        const CartesianPhasePoint c = from_state(ys);
        traj.times.push_back(ts);
        traj.states.push_back(c);
        traj.occupations.push_back(c.occupations());
        const double e = energy_cartesian(c, params);
        traj.energies.push_back(e);
        traj.energy_drift = std::max(traj.energy_drift, std::abs(e - e0));
        traj.norm_drift = std::max(traj.norm_drift, std::abs(c.norm() - norm0));
    };
    record(0.0, y);
    std::size_t next_sample = 1;

    State k1, k2, k3, k4, k5, k6, k7, ytmp, ynew;
    derivative(y, params, k1);

    // initial step from the scale of y and f
    double h;
    {
        double dy_norm = 0.0, y_norm = 0.0;
        for (int i = 0; i < 6; ++i) {
            const double sc = atol + rtol * std::abs(y[i]);
            y_norm += (y[i] / sc) * (y[i] / sc);
            dy_norm += (k1[i] / sc) * (k1[i] / sc);
        }
        h = (dy_norm > 1e-10) ? 0.01 * std::sqrt(y_norm / dy_norm) : 1e-6;
        h = std::min(h, opts.t_max);
    }

    double fac_old = 1e-4;
    bool rejected = false;
    for (long step = 0; step < max_steps; ++step) {
        if (t >= opts.t_max * (1.0 - 1e-15)) break;
        if (h < 1e-14 * std::max(1.0, std::abs(t))) {
            throw ComputeError("integrate: step-size underflow (stiffness) at t=" +
                               std::to_string(t) + ", last valid state retained in output");
        }
        if (t + h > opts.t_max) h = opts.t_max - t;

        for (int i = 0; i < 6; ++i) ytmp[i] = y[i] + h * Dopri5::a21 * k1[i];
        derivative(ytmp, params, k2);
        for (int i = 0; i < 6; ++i)
            ytmp[i] = y[i] + h * (Dopri5::a31 * k1[i] + Dopri5::a32 * k2[i]);
        derivative(ytmp, params, k3);
        for (int i = 0; i < 6; ++i)
            ytmp[i] = y[i] + h * (Dopri5::a41 * k1[i] + Dopri5::a42 * k2[i] +
                                  Dopri5::a43 * k3[i]);
        derivative(ytmp, params, k4);
        for (int i = 0; i < 6; ++i)
            ytmp[i] = y[i] + h * (Dopri5::a51 * k1[i] + Dopri5::a52 * k2[i] +
                                  Dopri5::a53 * k3[i] + Dopri5::a54 * k4[i]);
        derivative(ytmp, params, k5);
        for (int i = 0; i < 6; ++i)
            ytmp[i] = y[i] + h * (Dopri5::a61 * k1[i] + Dopri5::a62 * k2[i] +
                                  Dopri5::a63 * k3[i] + Dopri5::a64 * k4[i] +
                                  Dopri5::a65 * k5[i]);
        derivative(ytmp, params, k6);
        for (int i = 0; i < 6; ++i)
            ynew[i] = y[i] + h * (Dopri5::a71 * k1[i] + Dopri5::a73 * k3[i] +
                                  Dopri5::a74 * k4[i] + Dopri5::a75 * k5[i] +
                                  Dopri5::a76 * k6[i]);
        derivative(ynew, params, k7);

        double err = 0.0;
        for (int i = 0; i < 6; ++i) {
            const double ei = h * (Dopri5::e1 * k1[i] + Dopri5::e3 * k3[i] +
                                   Dopri5::e4 * k4[i] + Dopri5::e5 * k5[i] +
                                   Dopri5::e6 * k6[i] + Dopri5::e7 * k7[i]);
            const double sc = atol + rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            err += (ei / sc) * (ei / sc);
        }
        err = std::sqrt(err / 6.0);

        const double fac11 = std::pow(std::max(err, 1e-16), expo1);
        if (err <= 1.0) {
            // accept
            double fac = fac11 / std::pow(fac_old, beta);
            fac = std::max(1.0 / fac_max, std::min(1.0 / fac_min, fac / safe));
            double h_new = h / fac;
            if (rejected) h_new = std::min(h_new, h);
            fac_old = std::max(err, 1e-4);

            DenseSegment seg;
            seg.t0 = t;
            seg.h = h;
            for (int i = 0; i < 6; ++i) {
                const double ydiff = ynew[i] - y[i];
                const double bspl = h * k1[i] - ydiff;
                seg.r1[i] = y[i];
                seg.r2[i] = ydiff;
                seg.r3[i] = bspl;
                seg.r4[i] = ydiff - h * k7[i] - bspl;
                seg.r5[i] = h * (Dopri5::d1 * k1[i] + Dopri5::d3 * k3[i] +
                                 Dopri5::d4 * k4[i] + Dopri5::d5 * k5[i] +
                                 Dopri5::d6 * k6[i] + Dopri5::d7 * k7[i]);
            }

            t += h;
            y = ynew;
            k1 = k7;  // FSAL

            // emit uniform samples covered by this step
            while (next_sample <= static_cast<std::size_t>(opts.t_max / opts.sample_dt + 1e-9)) {
                const double ts = static_cast<double>(next_sample) * opts.sample_dt;
                if (ts > t + 1e-14) break;
                record(std::min(ts, t), seg.eval(std::min(ts, t)));
                ++next_sample;
            }
            // monitor drift at the step endpoint as well
            const double e = state_energy(y, params);
            traj.energy_drift = std::max(traj.energy_drift, std::abs(e - e0));
            traj.norm_drift = std::max(traj.norm_drift, std::abs(state_norm(y) - norm0));

            rejected = false;
            h = h_new;
        } else {
            rejected = true;
            h = h / std::min(1.0 / fac_min, fac11 / safe);
        }
    }

    if (t < opts.t_max * (1.0 - 1e-12)) {
        throw ComputeError("integrate: step budget exhausted at t=" + std::to_string(t));
    }
    return traj;
}

// ---------------------------------------------------------------------------

std::vector<ReducedPhasePoint> sample_initial_conditions(const ClassicalParams& params,
                                                         double e_target, int count,
                                                         std::uint64_t seed) {
    if (count < 1) throw std::invalid_argument("sample_initial_conditions: count must be >= 1");
    if (!std::isfinite(e_target)) {
        throw std::invalid_argument("sample_initial_conditions: e_target must be finite");
    }

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> phase(-kPi, kPi);

    const double k = params.J * std::sqrt(2.0);
    std::vector<ReducedPhasePoint> out;
    out.reserve(static_cast<std::size_t>(count));

    const long max_attempts = 200000L * count;
    for (long attempt = 0; attempt < max_attempts && out.size() < static_cast<std::size_t>(count);
         ++attempt) {
        double u = unit(rng), v = unit(rng);
        if (u + v > 1.0) {  // fold the square onto the simplex
            u = 1.0 - u;
            v = 1.0 - v;
        }
        const double phi_free = phase(rng);
        const double sign = (unit(rng) < 0.5) ? -1.0 : 1.0;
        // alternate which relative phase is solved for; always solving the
        // well-3 phase would skew the accepted (n1, n3) marginals and break
        // the mirror statistics of the eps = 0 ensemble
        const bool solve_phi32 = unit(rng) < 0.5;

        const double n1 = u, n3 = v;
        const double r1 = std::sqrt(n1), r3 = std::sqrt(n3);
        const double r2 = std::sqrt(std::max(0.0, 1.0 - n1 - n3));
        const double imbalance = 2.0 * (n1 + n3) - 1.0;
        const double r_free = solve_phi32 ? r1 : r3;
        const double r_solved = solve_phi32 ? r3 : r1;
        const double base = params.U * imbalance * imbalance + params.eps * (n3 - n1) +
                            k * r2 * r_free * std::cos(phi_free);
        const double coeff = k * r2 * r_solved;
        if (std::abs(coeff) < 1e-14) continue;
        const double c = (e_target - base) / coeff;
        if (std::abs(c) > 1.0) continue;

        ReducedPhasePoint p;
        p.n1 = n1;
        p.n3 = n3;
        const double phi_solved = sign * std::acos(c);
        p.phi12 = solve_phi32 ? phi_free : phi_solved;
        p.phi32 = solve_phi32 ? phi_solved : phi_free;

        // one-dimensional polish of the solved phase against acos roundoff
        for (int it = 0; it < 4; ++it) {
            const double f = energy_reduced(p, params) - e_target;
            if (std::abs(f) <= 1e-13) break;
            double& phi = solve_phi32 ? p.phi32 : p.phi12;
            const double df = -coeff * std::sin(phi);
            if (std::abs(df) < 1e-14) break;
            phi = wrap_phase(phi - f / df);
        }
        if (std::abs(energy_reduced(p, params) - e_target) > 1e-10) continue;
        out.push_back(p);
    }

    if (out.size() < static_cast<std::size_t>(count)) {
        throw ComputeError("sample_initial_conditions: energy out of range: e=" +
                           std::to_string(e_target) + " accepted " +
                           std::to_string(out.size()) + "/" + std::to_string(count));
    }
    return out;
}

OccupationHistogram occupation_histogram(const std::vector<Trajectory>& trajectories,
                                         int bins) {
    if (trajectories.empty()) {
        throw std::invalid_argument("occupation_histogram: no trajectories");
    }
    if (bins < 1) throw std::invalid_argument("occupation_histogram: bins must be >= 1");

    OccupationHistogram h;
    h.bins = bins;
    h.mass = Eigen::MatrixXd::Zero(bins, bins);

    std::size_t total = 0;
    for (const Trajectory& tr : trajectories) total += tr.size();
    if (total == 0) throw std::invalid_argument("occupation_histogram: empty trajectories");

    const double w = 1.0 / static_cast<double>(total);
    for (const Trajectory& tr : trajectories) {
        for (const auto& occ : tr.occupations) {
            h.mass(bin_of(occ[0], bins), bin_of(occ[2], bins)) += w;
        }
    }
    return h;
}

}  // namespace triwell
