#pragma once

#include <complex>

#include <Eigen/Dense>

#include "optmol/liouvillian.hpp"
#include "optmol/params.hpp"

namespace optmol {

/// Effective generator for the populations alone, obtained by eliminating
/// the e-f coherence from the block form: m_p - m_pc m_c^{-1} m_cp.
/// Columns sum to zero (probability conservation).
struct TransferGenerator {
    Eigen::Matrix3d m;
};

/// Steady state of the single-excitation master equation.
struct SteadyState {
    Eigen::Vector3d populations;            ///< (rho_gg, rho_ee, rho_ff)
    std::complex<double> coherence{0, 0};   ///< rho_ef
    /// Sum of the three unnormalized population numerators in the closed
    /// form; NaN when produced by the numeric oracle.
    double normalization = 0;

    Eigen::Matrix3cd to_matrix() const;
    State3 to_state() const;
    double min_eigenvalue() const;
};

/// Closed-form transfer generator.  Cross-checked in tests against the
/// numeric block elimination from build_block_generator.
TransferGenerator transfer_generator(const DerivedParams& d, double gamma);

/// Same matrix computed by numeric elimination of the coherence block;
/// throws std::runtime_error if the coherence block were singular
/// (cannot happen for gamma > 0).
TransferGenerator transfer_generator_numeric(const BlockGenerator& g);

/// Closed-form steady state: populations plus the e-f coherence.
SteadyState steady_analytic(const DerivedParams& d, double gamma);

/// Unnormalized kernel of the transfer generator from 2x2 cofactors,
/// normalized to unit sum.  Requires rank 2 (second-smallest singular value
/// above 1e-10 * ||A||); throws std::runtime_error otherwise.
Eigen::Vector3d steady_from_cofactors(const TransferGenerator& a);

/// Coherence reconstructed from normalized steady-state populations.
std::complex<double> coherence_from_populations(const Eigen::Vector3d& pops,
                                                const DerivedParams& d, double gamma);

/// Normalized stationary matrix of a vectorized generator on a
/// dim-dimensional space: least-squares solve of L vec(rho) = 0 with the
/// unit-trace row appended, then Hermitized.  Throws std::runtime_error if
/// the kernel is not one-dimensional (rank != dim^2 - 1).
Eigen::MatrixXcd stationary_matrix(const Eigen::MatrixXcd& generator, int dim);

/// Brute-force steady state from the 9x9 generator; independent of the
/// closed forms above.  The decoupled rho_ge, rho_gf components of the
/// kernel must come out below 1e-12 or a std::runtime_error is thrown.
SteadyState steady_numeric_oracle(const Superoperator3& generator);

}  // namespace optmol
