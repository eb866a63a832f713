#include "optmol/liouvillian.hpp"

#include <complex>
#include <stdexcept>

namespace optmol {

namespace {

using Eigen::Matrix3cd;
using Eigen::MatrixXcd;
using std::complex;

// Column-stacked Kronecker product; small dense matrices only.
MatrixXcd kron(const MatrixXcd& x, const MatrixXcd& y) {
    MatrixXcd out(x.rows() * y.rows(), x.cols() * y.cols());
    for (Eigen::Index i = 0; i < x.rows(); ++i)
        for (Eigen::Index j = 0; j < x.cols(); ++j)
            out.block(i * y.rows(), j * y.cols(), y.rows(), y.cols()) = x(i, j) * y;
    return out;
}

MatrixXcd identity_like(const MatrixXcd& op) {
    return MatrixXcd::Identity(op.rows(), op.cols());
}

// vec(X rho) = (I (x) X) vec(rho)
MatrixXcd left_mult(const MatrixXcd& x) { return kron(identity_like(x), x); }

// vec(rho Y) = (Y^T (x) I) vec(rho)
MatrixXcd right_mult(const MatrixXcd& y) { return kron(y.transpose(), identity_like(y)); }

// vec(X rho Y) = (Y^T (x) X) vec(rho)
MatrixXcd sandwich(const MatrixXcd& x, const MatrixXcd& y) { return kron(y.transpose(), x); }

// 2 X rho X^+ - rho X^+X - X^+X rho
MatrixXcd lindblad_term(const MatrixXcd& x) {
    const MatrixXcd xd = x.adjoint();
    const MatrixXcd xdx = xd * x;
    return 2.0 * sandwich(x, xd) - right_mult(xdx) - left_mult(xdx);
}

// Cross-mode dissipator: absorption and emission completed by different
// supermodes. Written with explicit Hermitian-conjugate partners so the same
// assembly serves both the subspace operators and the full Fock operators.
MatrixXcd cross_mode_terms(double eta_a, double eta_b, const MatrixXcd& a,
                           const MatrixXcd& b) {
    const MatrixXcd ad = a.adjoint();
    const MatrixXcd bd = b.adjoint();
    MatrixXcd out = (eta_a + eta_b) * (sandwich(ad, b) + sandwich(bd, a));
    out -= eta_a * (left_mult(b * ad) + right_mult(a * bd));
    out -= eta_b * (right_mult(b * ad) + left_mult(a * bd));
    out += (eta_a + eta_b) * (sandwich(b, ad) + sandwich(a, bd));
    out -= eta_a * (right_mult(ad * b) + left_mult(bd * a));
    out -= eta_b * (left_mult(ad * b) + right_mult(bd * a));
    return out;
}

// Subspace mode operators: A = |g><e|, B = |g><f|. All products downstream
// are taken inside this three-level algebra.
Matrix3cd subspace_op_a() {
    Matrix3cd m = Matrix3cd::Zero();
    m(0, 1) = 1.0;
    return m;
}

Matrix3cd subspace_op_b() {
    Matrix3cd m = Matrix3cd::Zero();
    m(0, 2) = 1.0;
    return m;
}

Superoperator3 to_super3(const MatrixXcd& m) {
    Superoperator3 s;
    s.matrix() = m;
    return s;
}

// Per-reservoir coefficients; the cross-mode part enters with opposite signs
// for the two reservoirs and cancels at equal temperatures.
struct ReservoirCoeffs {
    double n_A, n_B, sign;
};

ReservoirCoeffs coeffs_for(const DerivedParams& d, Reservoir which) {
    if (which == Reservoir::a) return {d.n_a_A, d.n_a_B, +1.0};
    return {d.n_b_A, d.n_b_B, -1.0};
}

}  // namespace

Eigen::Matrix<double, 5, 5> BlockGenerator::assemble() const {
    Eigen::Matrix<double, 5, 5> m = Eigen::Matrix<double, 5, 5>::Zero();
    m.topLeftCorner<3, 3>() = m_p;
    m.block<3, 1>(0, 3) = m_pc;
    m.block<1, 3>(3, 0) = m_cp;
    m.bottomRightCorner<2, 2>() = m_c;
    return m;
}

Eigen::Matrix3cd Superoperator3::apply(const Eigen::Matrix3cd& rho) const {
    const Eigen::Map<const Eigen::Matrix<complex<double>, 9, 1>> v(rho.data());
    Eigen::Matrix<complex<double>, 9, 1> out = m_ * v;
    return Eigen::Map<Eigen::Matrix3cd>(out.data());
}

double Superoperator3::trace_defect() const {
    double worst = 0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            Eigen::Matrix3cd basis = Eigen::Matrix3cd::Zero();
            basis(i, j) = 1.0;
            worst = std::max(worst, std::abs(apply(basis).trace()));
        }
    return worst;
}

double Superoperator3::hermiticity_defect() const {
    double worst = 0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            Eigen::Matrix3cd basis = Eigen::Matrix3cd::Zero();
            basis(i, j) = complex<double>(1.0, 0.5);
            const Eigen::Matrix3cd lhs = apply(basis.adjoint().eval());
            const Eigen::Matrix3cd rhs = apply(basis).adjoint();
            worst = std::max(worst, (lhs - rhs).cwiseAbs().maxCoeff());
        }
    return worst;
}

Eigen::Matrix3cd apply_superoperator(const Superoperator3& s, const Eigen::Matrix3cd& rho) {
    return s.apply(rho);
}

Eigen::MatrixXcd apply_superoperator(const Eigen::MatrixXcd& s, const Eigen::MatrixXcd& rho) {
    const Eigen::Index dim = rho.rows();
    if (rho.cols() != dim || s.rows() != dim * dim || s.cols() != dim * dim)
        throw std::invalid_argument("apply_superoperator: dimension mismatch");
    const Eigen::Map<const Eigen::VectorXcd> v(rho.data(), dim * dim);
    Eigen::VectorXcd out = s * v;
    return Eigen::Map<Eigen::MatrixXcd>(out.data(), dim, dim);
}

BlockGenerator build_block_generator(const DerivedParams& d, double gamma) {
    const double g = gamma;
    BlockGenerator b;
    b.m_p << -(d.n_plus_A + d.n_plus_B), d.n_plus_A + 1.0, d.n_plus_B + 1.0,
             d.n_plus_A, -(d.n_plus_A + 1.0), 0.0,
             d.n_plus_B, 0.0, -(d.n_plus_B + 1.0);
    b.m_p *= 2.0 * g;
    // The coherence feeds populations only through u = Re rho_ef, with twice
    // the weight of the reverse coupling (rho_ef + rho_fe = 2u).
    b.m_pc << d.n_minus_A + d.n_minus_B, -d.n_minus_B, -d.n_minus_A;
    b.m_pc *= 2.0 * g;
    b.m_cp << d.n_minus_A + d.n_minus_B, -d.n_minus_A, -d.n_minus_B;
    b.m_cp *= g;
    b.detuning = d.detuning();
    const double damping = g * d.damping_sum();
    b.m_c << -damping, b.detuning,
             -b.detuning, -damping;
    return b;
}

Superoperator3 build_reservoir_dissipator(const DerivedParams& d, double gamma,
                                          Reservoir which) {
    const auto [n_A, n_B, sign] = coeffs_for(d, which);
    const MatrixXcd a = subspace_op_a();
    const MatrixXcd b = subspace_op_b();
    const double half = 0.5 * gamma;
    MatrixXcd m = half * n_A * lindblad_term(a.adjoint());
    m += half * n_B * lindblad_term(b.adjoint());
    m += half * (n_A + 1.0) * lindblad_term(a);
    m += half * (n_B + 1.0) * lindblad_term(b);
    const MatrixXcd ad = a.adjoint();
    const MatrixXcd bd = b.adjoint();
    MatrixXcd cross = half * (n_A + n_B) * (sandwich(ad, b) + sandwich(bd, a));
    cross -= half * n_A * (left_mult(b * ad) + right_mult(a * bd));
    cross -= half * n_B * (right_mult(b * ad) + left_mult(a * bd));
    cross += half * (n_A + n_B + 2.0) * (sandwich(b, ad) + sandwich(a, bd));
    cross -= half * (n_A + 1.0) * (right_mult(ad * b) + left_mult(bd * a));
    cross -= half * (n_B + 1.0) * (left_mult(ad * b) + right_mult(bd * a));
    return to_super3(m + sign * cross);
}

std::pair<Superoperator3, Superoperator3> split_dissipator(const DerivedParams& d,
                                                           double gamma, Reservoir which) {
    const auto [n_A, n_B, sign] = coeffs_for(d, which);
    const MatrixXcd a = subspace_op_a();
    const MatrixXcd b = subspace_op_b();
    const MatrixXcd ad = a.adjoint();
    const MatrixXcd bd = b.adjoint();
    const double half = 0.5 * gamma;

    MatrixXcd pop = half * n_A * lindblad_term(ad);
    pop += half * n_B * lindblad_term(bd);
    pop += half * (n_A + 1.0) * lindblad_term(a);
    pop += half * (n_B + 1.0) * lindblad_term(b);

    const MatrixXcd pump_pair = sandwich(ad, b) + sandwich(bd, a);
    const MatrixXcd decay_pair = sandwich(b, ad) + sandwich(a, bd);
    const MatrixXcd coh = (n_A + n_B) * pump_pair +
                          (n_A + 1.0) * (decay_pair - right_mult(ad * b) - left_mult(bd * a)) +
                          (n_B + 1.0) * (decay_pair - right_mult(bd * a) - left_mult(ad * b));

    return {to_super3(pop), to_super3(sign * half * coh)};
}

Superoperator3 build_hamiltonian_commutator(const DerivedParams& d) {
    Matrix3cd h = Matrix3cd::Zero();
    h(1, 1) = d.omega_a;
    h(2, 2) = d.omega_b;
    const complex<double> i_unit(0.0, 1.0);
    return to_super3(-i_unit * (left_mult(h) - right_mult(h)));
}

Superoperator3 build_same_mode_dissipator(const DerivedParams& d, double gamma) {
    const MatrixXcd a = subspace_op_a();
    const MatrixXcd b = subspace_op_b();
    MatrixXcd m = gamma * d.n_plus_A * lindblad_term(a.adjoint());
    m += gamma * d.n_plus_B * lindblad_term(b.adjoint());
    m += gamma * (d.n_plus_A + 1.0) * lindblad_term(a);
    m += gamma * (d.n_plus_B + 1.0) * lindblad_term(b);
    return to_super3(m);
}

Superoperator3 build_cross_mode_dissipator(const DerivedParams& d, double gamma) {
    return to_super3(cross_mode_terms(gamma * d.n_minus_A, gamma * d.n_minus_B,
                                      subspace_op_a(), subspace_op_b()));
}

Superoperator3 build_total_generator(const DerivedParams& d, double gamma) {
    Superoperator3 gen = build_hamiltonian_commutator(d);
    gen += build_reservoir_dissipator(d, gamma, Reservoir::a);
    gen += build_reservoir_dissipator(d, gamma, Reservoir::b);
    return gen;
}

Eigen::MatrixXcd build_generator_from_modes(const DerivedParams& d, double gamma,
                                            const Eigen::MatrixXcd& mode_a,
                                            const Eigen::MatrixXcd& mode_b) {
    const MatrixXcd ada = mode_a.adjoint() * mode_a;
    const MatrixXcd bdb = mode_b.adjoint() * mode_b;
    const MatrixXcd h = d.omega_a * ada + d.omega_b * bdb;
    const complex<double> i_unit(0.0, 1.0);
    MatrixXcd gen = -i_unit * (left_mult(h) - right_mult(h));
    gen += gamma * d.n_plus_A * lindblad_term(mode_a.adjoint());
    gen += gamma * d.n_plus_B * lindblad_term(mode_b.adjoint());
    gen += gamma * (d.n_plus_A + 1.0) * lindblad_term(mode_a);
    gen += gamma * (d.n_plus_B + 1.0) * lindblad_term(mode_b);
    gen += cross_mode_terms(gamma * d.n_minus_A, gamma * d.n_minus_B, mode_a, mode_b);
    return gen;
}

FockGenerator build_fock_generator(const DerivedParams& d, double gamma, int n_max) {
    if (n_max < 1 || n_max > 6)
        throw std::invalid_argument("build_fock_generator: n_max must be in [1, 6]");
    const int levels = n_max + 1;
    MatrixXcd lower = MatrixXcd::Zero(levels, levels);
    for (int n = 1; n < levels; ++n) lower(n - 1, n) = std::sqrt(double(n));
    const MatrixXcd eye = MatrixXcd::Identity(levels, levels);

    FockGenerator f;
    f.n_max = n_max;
    f.dim = levels * levels;
    f.mode_a = kron(lower, eye);  // slow index: supermode A occupation
    f.mode_b = kron(eye, lower);
    f.matrix = build_generator_from_modes(d, gamma, f.mode_a, f.mode_b);
    return f;
}

}  // namespace optmol
