#pragma once

#include <complex>

#include <Eigen/Dense>

namespace optmol {

/// Density matrix on the zero/single-excitation subspace spanned by
/// {|g> = |0,0>, |e> = |1,0>, |f> = |0,1>} (supermode Fock labels).
/// Hermiticity is implicit: rho_ef stands for both rho_ef and conj(rho_fe).
/// The ground-excited coherences rho_ge, rho_gf only matter for dynamics;
/// they decay on their own and vanish at the steady state.
struct State3 {
    double rho_gg = 1.0;
    double rho_ee = 0.0;
    double rho_ff = 0.0;
    std::complex<double> rho_ef{0.0, 0.0};
    std::complex<double> rho_ge{0.0, 0.0};
    std::complex<double> rho_gf{0.0, 0.0};

    double trace() const { return rho_gg + rho_ee + rho_ff; }

    /// Full 3x3 Hermitian matrix in basis order (g, e, f).
    Eigen::Matrix3cd to_matrix() const;
    static State3 from_matrix(const Eigen::Matrix3cd& rho);

    /// Smallest eigenvalue of to_matrix(); negative values flag a
    /// positivity violation.
    double min_eigenvalue() const;
};

}  // namespace optmol
