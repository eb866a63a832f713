#pragma once

#include <complex>
#include <vector>

#include "optmol/liouvillian.hpp"
#include "optmol/params.hpp"
#include "optmol/state.hpp"

namespace optmol {

/// Right-hand side of the full six-variable master equation: the coupled
/// population/coherence block plus the two decoupled ground-excited
/// coherences.
struct MasterEquation {
    BlockGenerator block;
    std::complex<double> ge_self{0, 0};  ///< self term of d rho_ge / dt
    std::complex<double> gf_self{0, 0};  ///< self term of d rho_gf / dt
    double ge_cross = 0;                 ///< rho_ge <- rho_gf coupling
    double gf_cross = 0;                 ///< rho_gf <- rho_ge coupling

    static MasterEquation build(const DerivedParams& d, double gamma);

    State3 derivative(const State3& s) const;
};

/// Largest integration step the fixed-step integrator accepts:
/// 0.1 / max(gamma * (n_plus_A + n_plus_B + 2), omega_a).
double stability_step_bound(const DerivedParams& d, double gamma);

struct Trajectory {
    std::vector<double> times;
    std::vector<State3> states;
    double step = 0;
};

/// Classical fixed-step fourth-order Runge-Kutta run recording every step.
/// Throws std::invalid_argument if dt exceeds the stability bound and
/// std::runtime_error (with the time stamp) if the state turns non-finite.
Trajectory evolve(const State3& initial, const MasterEquation& eq, double t_final, double dt);

/// Same stepping without storing the trajectory; returns the final state.
State3 propagate(const State3& initial, const MasterEquation& eq, double t_final, double dt);

struct RelaxResult {
    State3 state;
    bool converged = false;
    double t_end = 0;
};

/// Integrates until the max-norm of the state derivative drops below tol or
/// t_max is reached (tol = 0 runs to t_max exactly).  Non-convergence is
/// reported through the flag, not an exception.
RelaxResult relax_to_steady(const State3& initial, const MasterEquation& eq, double tol,
                            double t_max, double dt = 0.01);

}  // namespace optmol
