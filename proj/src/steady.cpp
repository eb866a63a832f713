#include "optmol/steady.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

namespace optmol {

namespace {

constexpr double kRankThreshold = 1e-10;

// Unnormalized population numerators of the closed-form steady state.
Eigen::Vector3d population_numerators(const DerivedParams& d) {
    const double r = d.r_factor;
    const double cross = d.n_minus_A * d.n_minus_B * r;
    Eigen::Vector3d num;
    num(0) = (d.n_plus_A + 1.0) * (d.n_plus_B + 1.0) - (d.n_plus_A + d.n_plus_B + 2.0) * cross;
    num(1) = d.n_plus_A * (d.n_plus_B + 1.0) - (d.n_plus_A + d.n_plus_B + 1.0) * cross -
             d.n_minus_B * d.n_minus_B * r;
    num(2) = d.n_plus_B * (d.n_plus_A + 1.0) - (d.n_plus_A + d.n_plus_B + 1.0) * cross -
             d.n_minus_A * d.n_minus_A * r;
    return num;
}

}  // namespace

Eigen::Matrix3cd SteadyState::to_matrix() const {
    Eigen::Matrix3cd m = Eigen::Matrix3cd::Zero();
    m(0, 0) = populations(0);
    m(1, 1) = populations(1);
    m(2, 2) = populations(2);
    m(1, 2) = coherence;
    m(2, 1) = std::conj(coherence);
    return m;
}

State3 SteadyState::to_state() const {
    State3 s;
    s.rho_gg = populations(0);
    s.rho_ee = populations(1);
    s.rho_ff = populations(2);
    s.rho_ef = coherence;
    return s;
}

double SteadyState::min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3cd> solver(to_matrix(),
                                                           Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

TransferGenerator transfer_generator(const DerivedParams& d, double gamma) {
    const double r = d.r_factor;
    const double nm_sum = d.n_minus_A + d.n_minus_B;
    TransferGenerator t;
    t.m << -(d.n_plus_A + d.n_plus_B) + nm_sum * nm_sum * r,
           (d.n_plus_A + 1.0) - nm_sum * d.n_minus_A * r,
           (d.n_plus_B + 1.0) - nm_sum * d.n_minus_B * r,
           d.n_plus_A - nm_sum * d.n_minus_B * r,
           -(d.n_plus_A + 1.0) + d.n_minus_A * d.n_minus_B * r,
           d.n_minus_B * d.n_minus_B * r,
           d.n_plus_B - nm_sum * d.n_minus_A * r,
           d.n_minus_A * d.n_minus_A * r,
           -(d.n_plus_B + 1.0) + d.n_minus_A * d.n_minus_B * r;
    t.m *= 2.0 * gamma;
    return t;
}

TransferGenerator transfer_generator_numeric(const BlockGenerator& g) {
    if (std::abs(g.m_c.determinant()) < 1e-300)
        throw std::runtime_error("transfer_generator_numeric: singular coherence block");
    Eigen::Matrix<double, 3, 2> pc = Eigen::Matrix<double, 3, 2>::Zero();
    pc.col(0) = g.m_pc;
    Eigen::Matrix<double, 2, 3> cp = Eigen::Matrix<double, 2, 3>::Zero();
    cp.row(0) = g.m_cp;
    TransferGenerator t;
    t.m = g.m_p - pc * g.m_c.inverse() * cp;
    return t;
}

SteadyState steady_analytic(const DerivedParams& d, double gamma) {
    const Eigen::Vector3d num = population_numerators(d);
    const double norm = num.sum();
    SteadyState ss;
    ss.populations = num / norm;
    ss.normalization = norm;
    const double numerator =
        d.n_minus_A * (d.n_plus_B + 1.0) + d.n_minus_B * (d.n_plus_A + 1.0);
    const std::complex<double> denom(d.damping_sum(), d.detuning() / gamma);
    ss.coherence = numerator / (norm * denom);
    return ss;
}

Eigen::Vector3d steady_from_cofactors(const TransferGenerator& a) {
    Eigen::JacobiSVD<Eigen::Matrix3d> svd(a.m);
    const auto& sv = svd.singularValues();
    if (sv(1) <= kRankThreshold * sv(0))
        throw std::runtime_error(
            "steady_from_cofactors: transfer generator rank below 2, steady state degenerate");
    const Eigen::Matrix3d& m = a.m;
    Eigen::Vector3d cof;
    cof(0) = m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1);
    cof(1) = m(2, 0) * m(1, 2) - m(1, 0) * m(2, 2);
    cof(2) = m(1, 0) * m(2, 1) - m(2, 0) * m(1, 1);
    return cof / cof.sum();
}

std::complex<double> coherence_from_populations(const Eigen::Vector3d& pops,
                                                const DerivedParams& d, double gamma) {
    const double numerator = (d.n_minus_A + d.n_minus_B) * pops(0) -
                             d.n_minus_A * pops(1) - d.n_minus_B * pops(2);
    return numerator / std::complex<double>(d.damping_sum(), d.detuning() / gamma);
}

Eigen::MatrixXcd stationary_matrix(const Eigen::MatrixXcd& generator, int dim) {
    const Eigen::Index n = Eigen::Index(dim) * dim;
    if (generator.rows() != n || generator.cols() != n)
        throw std::invalid_argument("stationary_matrix: generator size does not match dim");

    Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> rank_qr(generator);
    rank_qr.setThreshold(kRankThreshold);
    if (rank_qr.rank() != n - 1)
        throw std::runtime_error("stationary_matrix: kernel is not one-dimensional");

    Eigen::MatrixXcd augmented(n + 1, n);
    augmented.topRows(n) = generator;
    augmented.row(n).setZero();
    for (int i = 0; i < dim; ++i) augmented(n, Eigen::Index(i) * dim + i) = 1.0;
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(n + 1);
    rhs(n) = 1.0;

    const Eigen::VectorXcd x = augmented.colPivHouseholderQr().solve(rhs);
    Eigen::MatrixXcd rho = Eigen::Map<const Eigen::MatrixXcd>(x.data(), dim, dim);
    return 0.5 * (rho + rho.adjoint().eval());
}

SteadyState steady_numeric_oracle(const Superoperator3& generator) {
    const Eigen::MatrixXcd rho = stationary_matrix(generator.matrix(), 3);
    if (std::abs(rho(0, 1)) > 1e-12 || std::abs(rho(0, 2)) > 1e-12)
        throw std::runtime_error(
            "steady_numeric_oracle: ground-excited coherences did not vanish in the kernel");
    SteadyState ss;
    ss.populations = rho.diagonal().real();
    ss.coherence = rho(1, 2);
    ss.normalization = std::numeric_limits<double>::quiet_NaN();
    return ss;
}

}  // namespace optmol
