#pragma once

#include <array>
#include <functional>

#include <Eigen/Dense>

#include "optmol/params.hpp"
#include "optmol/steady.hpp"

namespace optmol {

/// Spectral decomposition of the steady state.  |g> is always an eigenvector
/// with eigenvalue p1; the e-f block is diagonalized by the mixing angle
/// alpha in [0, pi] and the coherence phase phi in (-pi, pi].
struct SpectralDecomp {
    double p1 = 0, p2 = 0, p3 = 0;  ///< eigenvalues, p2 >= p3
    double alpha = 0;
    double phi = 0;
};

SpectralDecomp spectral_decomposition(const SteadyState& ss);

struct QfiOptions {
    double step = 1e-6;        ///< central-difference step for d/d lambda
    bool richardson = false;   ///< one extra refinement of the stencil
};

/// Diagnostics filled by the QFI evaluators.
struct QfiBreakdown {
    double classical = 0;       ///< sum of (dp_i)^2 / p_i
    double coherent = 0;        ///< contribution of the steady-state coherence
    bool degenerate = false;    ///< p2 + p3 below cutoff, coherent part dropped
    bool crossing_flagged = false;  ///< eigenvalue crossing inside the stencil
};

/// Quantum Fisher information for estimating the inter-cavity coupling,
/// from the closed-form spectral decomposition of the analytic steady state.
/// Requires lambda +/- step inside (0, omega).
double qfi_lambda(const SystemParams& p, const QfiOptions& opts = {},
                  QfiBreakdown* detail = nullptr);

/// Generic QFI of a one-parameter family of steady states, evaluated from a
/// numeric eigendecomposition with overlap matching and pivot gauge fixing.
/// Serves as the oracle for qfi_lambda.
double qfi_general(const std::function<SteadyState(double)>& state_at, double theta0,
                   double step, QfiBreakdown* detail = nullptr);

/// The three equivalent cyclic expressions of the circulating flux, in order
/// (g->e, f->g, e->f).  Exposed so checks can report their spread without
/// throwing.
std::array<double, 3> curl_flux_expressions(const TransferGenerator& a,
                                            const Eigen::Vector3d& pops);

/// Circulating probability flux among the three populated states.  Evaluates
/// the three cyclic expressions and throws std::runtime_error if they
/// disagree beyond 1e-12 (that would mean a generator bug).
double curl_flux(const TransferGenerator& a, const Eigen::Vector3d& pops);

/// Same flux from the closed-form rate expression; an independent route used
/// for cross-checking.
double curl_flux_closed_form(const DerivedParams& d, double gamma,
                             const Eigen::Vector3d& pops);

/// Transfer matrix split into a detailed-balance (symmetric) part and the
/// circulating part.  Reconstruction is exact to 1e-13 or it throws.
struct TransferDecomposition {
    Eigen::Matrix3d symmetric;
    double j_curl = 0;
};

TransferDecomposition decompose_transfer(const TransferGenerator& a,
                                         const Eigen::Vector3d& pops);

/// The two independent routes to the heat current from reservoir `which`:
/// the closed-form rate expression and Tr{D_i[rho] H}.
double heat_current_closed(Reservoir which, const SteadyState& ss, const DerivedParams& d,
                           double gamma);
double heat_current_trace(Reservoir which, const SteadyState& ss, const DerivedParams& d,
                          double gamma);

/// Heat current flowing from reservoir `which` into the system at the steady
/// state.  Evaluates both routes; throws std::runtime_error if they disagree
/// beyond 1e-12.  Returns the closed form.
double heat_current(Reservoir which, const SteadyState& ss, const DerivedParams& d,
                    double gamma);

/// Split of the heat current into the part maintaining nonequilibrium
/// populations and the part maintaining the steady-state coherence.
/// Both pieces are double-checked against their trace forms.
struct HeatSplit {
    double population = 0;
    double coherence = 0;
};

HeatSplit heat_current_split_closed(Reservoir which, const SteadyState& ss,
                                    const DerivedParams& d, double gamma);
HeatSplit heat_current_split_trace(Reservoir which, const SteadyState& ss,
                                   const DerivedParams& d, double gamma);
HeatSplit heat_current_split(Reservoir which, const SteadyState& ss,
                             const DerivedParams& d, double gamma);

/// Steady-state entropy production rate -(j_b/t_b + j_a/t_a).
double entropy_production_rate(double j_a, double j_b, double t_a, double t_b);

/// Everything the sweep reports for one parameter point.
struct ObservablesRecord {
    double coherence_abs = 0;
    double qfi = 0;
    double j_curl = 0;
    double j_a = 0, j_b = 0;
    double j_a_p = 0, j_b_p = 0;
    double j_a_c = 0, j_b_c = 0;
    double epr = 0;
};

/// Full record at one parameter point, with every internal consistency check
/// (current balance, split additivity, flux equivalence) enforced.
ObservablesRecord evaluate_observables(const SystemParams& p, const QfiOptions& opts = {});

}  // namespace optmol
