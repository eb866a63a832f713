#include "optmol/state.hpp"

#include <Eigen/Eigenvalues>

namespace optmol {

Eigen::Matrix3cd State3::to_matrix() const {
    Eigen::Matrix3cd m;
    m(0, 0) = rho_gg;
    m(1, 1) = rho_ee;
    m(2, 2) = rho_ff;
    m(0, 1) = rho_ge;
    m(1, 0) = std::conj(rho_ge);
    m(0, 2) = rho_gf;
    m(2, 0) = std::conj(rho_gf);
    m(1, 2) = rho_ef;
    m(2, 1) = std::conj(rho_ef);
    return m;
}

State3 State3::from_matrix(const Eigen::Matrix3cd& rho) {
    State3 s;
    s.rho_gg = rho(0, 0).real();
    s.rho_ee = rho(1, 1).real();
    s.rho_ff = rho(2, 2).real();
    s.rho_ef = rho(1, 2);
    s.rho_ge = rho(0, 1);
    s.rho_gf = rho(0, 2);
    return s;
}

double State3::min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3cd> solver(to_matrix(),
                                                           Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

}  // namespace optmol
