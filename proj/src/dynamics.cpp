#include "optmol/dynamics.hpp"

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace optmol {

namespace {

// Flat real layout used by the stepper:
// (gg, ee, ff, Re ef, Im ef, Re ge, Im ge, Re gf, Im gf)
using Flat = std::array<double, 9>;

Flat pack(const State3& s) {
    return {s.rho_gg, s.rho_ee, s.rho_ff,
            s.rho_ef.real(), s.rho_ef.imag(),
            s.rho_ge.real(), s.rho_ge.imag(),
            s.rho_gf.real(), s.rho_gf.imag()};
}

State3 unpack(const Flat& x) {
    State3 s;
    s.rho_gg = x[0];
    s.rho_ee = x[1];
    s.rho_ff = x[2];
    s.rho_ef = {x[3], x[4]};
    s.rho_ge = {x[5], x[6]};
    s.rho_gf = {x[7], x[8]};
    return s;
}

Flat rhs(const MasterEquation& eq, const Flat& x) {
    Flat dx{};
    const Eigen::Matrix3d& mp = eq.block.m_p;
    for (int i = 0; i < 3; ++i)
        dx[i] = mp(i, 0) * x[0] + mp(i, 1) * x[1] + mp(i, 2) * x[2] + eq.block.m_pc(i) * x[3];
    dx[3] = eq.block.m_cp(0) * x[0] + eq.block.m_cp(1) * x[1] + eq.block.m_cp(2) * x[2] +
            eq.block.m_c(0, 0) * x[3] + eq.block.m_c(0, 1) * x[4];
    dx[4] = eq.block.m_c(1, 0) * x[3] + eq.block.m_c(1, 1) * x[4];
    const std::complex<double> ge{x[5], x[6]};
    const std::complex<double> gf{x[7], x[8]};
    const std::complex<double> dge = eq.ge_self * ge + eq.ge_cross * gf;
    const std::complex<double> dgf = eq.gf_self * gf + eq.gf_cross * ge;
    dx[5] = dge.real();
    dx[6] = dge.imag();
    dx[7] = dgf.real();
    dx[8] = dgf.imag();
    return dx;
}

void rk4_step(const MasterEquation& eq, Flat& x, double dt) {
    const Flat k1 = rhs(eq, x);
    Flat probe;
    for (int i = 0; i < 9; ++i) probe[i] = x[i] + 0.5 * dt * k1[i];
    const Flat k2 = rhs(eq, probe);
    for (int i = 0; i < 9; ++i) probe[i] = x[i] + 0.5 * dt * k2[i];
    const Flat k3 = rhs(eq, probe);
    for (int i = 0; i < 9; ++i) probe[i] = x[i] + dt * k3[i];
    const Flat k4 = rhs(eq, probe);
    for (int i = 0; i < 9; ++i)
        x[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
}

bool finite(const Flat& x) {
    for (double v : x)
        if (!std::isfinite(v)) return false;
    return true;
}

double step_bound_from(const MasterEquation& eq) {
    const double damping = -eq.block.m_c(0, 0);     // gamma * (n_plus_A + n_plus_B + 2)
    const double fastest = eq.ge_self.imag();       // omega_a, the fastest oscillation
    return 0.1 / std::max(damping, fastest);
}

void require_step(const MasterEquation& eq, double dt) {
    if (!(dt > 0)) throw std::invalid_argument("integration step must be > 0");
    const double bound = step_bound_from(eq);
    if (dt > bound)
        throw std::invalid_argument("integration step " + std::to_string(dt) +
                                    " exceeds the stability bound " + std::to_string(bound));
}

}  // namespace

MasterEquation MasterEquation::build(const DerivedParams& d, double gamma) {
    MasterEquation eq;
    eq.block = build_block_generator(d, gamma);
    eq.ge_self = {-gamma * (2.0 * d.n_plus_A + d.n_plus_B + 1.0), d.omega_a};
    eq.gf_self = {-gamma * (2.0 * d.n_plus_B + d.n_plus_A + 1.0), d.omega_b};
    eq.ge_cross = -gamma * d.n_minus_B;
    eq.gf_cross = -gamma * d.n_minus_A;
    return eq;
}

State3 MasterEquation::derivative(const State3& s) const {
    return unpack(rhs(*this, pack(s)));
}

double stability_step_bound(const DerivedParams& d, double gamma) {
    return 0.1 / std::max(gamma * d.damping_sum(), d.omega_a);
}

Trajectory evolve(const State3& initial, const MasterEquation& eq, double t_final, double dt) {
    require_step(eq, dt);
    const long steps = std::lround(t_final / dt);
    Trajectory traj;
    traj.step = dt;
    traj.times.reserve(steps + 1);
    traj.states.reserve(steps + 1);
    Flat x = pack(initial);
    traj.times.push_back(0.0);
    traj.states.push_back(initial);
    for (long n = 1; n <= steps; ++n) {
        rk4_step(eq, x, dt);
        if (!finite(x))
            throw std::runtime_error("integration failure at t = " + std::to_string(n * dt));
        traj.times.push_back(n * dt);
        traj.states.push_back(unpack(x));
    }
    return traj;
}

State3 propagate(const State3& initial, const MasterEquation& eq, double t_final, double dt) {
    require_step(eq, dt);
    const long steps = std::lround(t_final / dt);
    Flat x = pack(initial);
    for (long n = 1; n <= steps; ++n) {
        rk4_step(eq, x, dt);
        if (!finite(x))
            throw std::runtime_error("integration failure at t = " + std::to_string(n * dt));
    }
    return unpack(x);
}

RelaxResult relax_to_steady(const State3& initial, const MasterEquation& eq, double tol,
                            double t_max, double dt) {
    if (!(tol >= 0)) throw std::invalid_argument("relax_to_steady: tol must be >= 0");
    require_step(eq, dt);
    const long steps = std::lround(t_max / dt);
    Flat x = pack(initial);
    const auto rate_of = [&] {
        double rate = 0.0;
        for (double v : rhs(eq, x)) rate = std::max(rate, std::abs(v));
        return rate;
    };
    for (long n = 0; n < steps; ++n) {
        if (rate_of() < tol) return {unpack(x), true, n * dt};
        rk4_step(eq, x, dt);
        if (!finite(x))
            throw std::runtime_error("integration failure at t = " + std::to_string((n + 1) * dt));
    }
    return {unpack(x), rate_of() < tol, steps * dt};
}

}  // namespace optmol
