#pragma once

#include <complex>
#include <utility>

#include <Eigen/Dense>

#include "optmol/params.hpp"
#include "optmol/state.hpp"

namespace optmol {

enum class Reservoir { a, b };

/// Block form of the single-excitation master equation in the real
/// five-vector representation x = (rho_gg, rho_ee, rho_ff, u, v) with
/// u = Re rho_ef, v = Im rho_ef.  The ground-excited coherences decouple
/// and are excluded here.
struct BlockGenerator {
    Eigen::Matrix3d m_p;       ///< population block
    Eigen::Vector3d m_pc;      ///< populations <- u coupling (v never feeds back)
    Eigen::RowVector3d m_cp;   ///< u <- populations coupling
    Eigen::Matrix2d m_c;       ///< (u, v) block: damping plus detuning rotation
    double detuning = 0;       ///< omega_a - omega_b

    /// Assembled 5x5 real generator; the first three rows sum to zero.
    Eigen::Matrix<double, 5, 5> assemble() const;
};

/// Linear map on 3x3 complex matrices, stored as a 9x9 matrix in the
/// column-stacked convention vec(rho)[i + 3j] = rho(i, j).
class Superoperator3 {
public:
    using Matrix9 = Eigen::Matrix<std::complex<double>, 9, 9>;

    Superoperator3() : m_(Matrix9::Zero()) {}
    explicit Superoperator3(Matrix9 m) : m_(std::move(m)) {}

    const Matrix9& matrix() const { return m_; }
    Matrix9& matrix() { return m_; }

    Eigen::Matrix3cd apply(const Eigen::Matrix3cd& rho) const;

    Superoperator3& operator+=(const Superoperator3& o) { m_ += o.m_; return *this; }
    friend Superoperator3 operator+(Superoperator3 l, const Superoperator3& r) { l += r; return l; }

    /// Max-norm of Tr(S[rho]) over the matrix-unit basis.
    double trace_defect() const;
    /// Max-norm of S[rho^+] - (S[rho])^+ over a Hermiticity-probing basis.
    double hermiticity_defect() const;

private:
    Matrix9 m_;
};

/// Matrix-vector product in the vectorized convention, reshaped back.
/// The generic overload checks dimensions and throws std::invalid_argument
/// on mismatch.
Eigen::Matrix3cd apply_superoperator(const Superoperator3& s, const Eigen::Matrix3cd& rho);
Eigen::MatrixXcd apply_superoperator(const Eigen::MatrixXcd& s, const Eigen::MatrixXcd& rho);

/// Block generator of the population/coherence sector (five coupled reals).
BlockGenerator build_block_generator(const DerivedParams& d, double gamma);

/// Dissipator of a single reservoir restricted to the 3-level subspace.
/// In this subspace the mode operators are A = |g><e| and B = |g><f|, and
/// all operator products are taken inside the subspace algebra.
Superoperator3 build_reservoir_dissipator(const DerivedParams& d, double gamma, Reservoir which);

/// Splits a reservoir dissipator into its population part (number-conserving
/// jump terms) and coherence part (cross-mode terms feeding rho_ef).
/// The two parts sum to build_reservoir_dissipator(which) exactly.
std::pair<Superoperator3, Superoperator3> split_dissipator(const DerivedParams& d, double gamma,
                                                           Reservoir which);

/// -i[H, .] with H = diag(0, omega_a, omega_b).
Superoperator3 build_hamiltonian_commutator(const DerivedParams& d);

/// Dissipator pieces grouped by process instead of by reservoir: quanta
/// absorbed and re-emitted by the same supermode, and the cross-mode piece
/// that survives only out of equilibrium.  Their sum equals
/// D_a + D_b on this subspace.
Superoperator3 build_same_mode_dissipator(const DerivedParams& d, double gamma);
Superoperator3 build_cross_mode_dissipator(const DerivedParams& d, double gamma);

/// Commutator plus both reservoir dissipators; the generator whose kernel is
/// the steady state.
Superoperator3 build_total_generator(const DerivedParams& d, double gamma);

/// Non-secular generator on the truncated two-supermode Fock space,
/// used to validate the single-excitation restriction.
struct FockGenerator {
    int n_max = 0;            ///< truncation per supermode
    int dim = 0;              ///< (n_max + 1)^2
    Eigen::MatrixXcd matrix;  ///< dim^2 x dim^2, column-stacked convention
    Eigen::MatrixXcd mode_a;  ///< truncated annihilation operator of supermode A
    Eigen::MatrixXcd mode_b;  ///< truncated annihilation operator of supermode B
};

/// Requires 1 <= n_max <= 6 (the generator is (n_max+1)^4 square).
FockGenerator build_fock_generator(const DerivedParams& d, double gamma, int n_max);

/// Same assembly as the Fock generator but with caller-supplied mode
/// operators; lets tests compare against the 3-level construction by feeding
/// subspace-restricted operators.
Eigen::MatrixXcd build_generator_from_modes(const DerivedParams& d, double gamma,
                                            const Eigen::MatrixXcd& mode_a,
                                            const Eigen::MatrixXcd& mode_b);

}  // namespace optmol
