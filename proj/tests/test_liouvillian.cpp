#include <doctest.h>

#include <complex>
#include <functional>
#include <random>

#include <Eigen/Dense>

#include "optmol/liouvillian.hpp"
#include "optmol/steady.hpp"
#include "test_util.hpp"

using namespace optmol;
using Eigen::Matrix3cd;
using Eigen::MatrixXcd;
using complexd = std::complex<double>;

namespace {

Matrix3cd ket_bra(int i, int j) {
    Matrix3cd m = Matrix3cd::Zero();
    m(i, j) = 1.0;
    return m;
}

Matrix3cd random_hermitian(std::mt19937& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Matrix3cd m;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) m(i, j) = complexd(u(rng), u(rng));
    return 0.5 * (m + m.adjoint()).eval();
}

// Assembles a 9x9 superoperator from an apply-side rule; used to hand-build
// reference maps independently of the production kron path.
Superoperator3 from_rule(const std::function<Matrix3cd(const Matrix3cd&)>& rule) {
    Superoperator3 s;
    for (int col = 0; col < 9; ++col) {
        Matrix3cd basis = Matrix3cd::Zero();
        basis(col % 3, col / 3) = 1.0;
        const Matrix3cd out = rule(basis);
        for (int row = 0; row < 9; ++row) s.matrix()(row, col) = out(row % 3, row / 3);
    }
    return s;
}

double superop_diff(const Superoperator3& a, const Superoperator3& b) {
    return (a.matrix() - b.matrix()).cwiseAbs().maxCoeff();
}

// Compression of a two-mode generator onto the zero/single-excitation states:
// embed, apply, project back.
Superoperator3 compress_to_subspace(const MatrixXcd& gen, int dim, const int keep[3]) {
    Superoperator3 out;
    for (int col = 0; col < 9; ++col) {
        MatrixXcd embedded = MatrixXcd::Zero(dim, dim);
        embedded(keep[col % 3], keep[col / 3]) = 1.0;
        const MatrixXcd image = apply_superoperator(gen, embedded);
        for (int row = 0; row < 9; ++row)
            out.matrix()(row, col) = image(keep[row % 3], keep[row / 3]);
    }
    return out;
}

}  // namespace

TEST_SUITE("liouvillian") {

TEST_CASE("equilibrium decouples populations from the coherence") {
    const DerivedParams d = derive_params(testutil::make_params(0.2, 0.1, 0.3, 0.3));
    const BlockGenerator g = build_block_generator(d, 0.1);
    CHECK(g.m_pc.cwiseAbs().maxCoeff() == 0.0);
    CHECK(g.m_cp.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("ground-state gain from the maximally mixed state") {
    // hand substitution: (2 gamma / 3) [-(Na+Nb) + (Na+1) + (Nb+1)] = 4 gamma / 3
    const double gamma = 0.17;
    const DerivedParams d = derive_params(testutil::make_params(0.1, gamma, 0.2, 0.7));
    const BlockGenerator g = build_block_generator(d, gamma);
    Eigen::Matrix<double, 5, 1> x;
    x << 1.0 / 3, 1.0 / 3, 1.0 / 3, 0, 0;
    const Eigen::Matrix<double, 5, 1> dx = g.assemble() * x;
    CHECK(dx(0) == doctest::Approx(4.0 * gamma / 3.0).epsilon(1e-14));
}

TEST_CASE("assembled block generator preserves the trace") {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const DerivedParams d = derive_params(testutil::make_params(0.15, 0.08, 0.25, 0.9));
    const auto m = build_block_generator(d, 0.08).assemble();
    for (int trial = 0; trial < 50; ++trial) {
        Eigen::Matrix<double, 5, 1> x;
        for (int i = 0; i < 5; ++i) x(i) = u(rng);
        const auto dx = m * x;
        CHECK(std::abs(dx(0) + dx(1) + dx(2)) < 1e-14);
    }
}

TEST_CASE("reservoir dissipators annihilate the trace") {
    std::mt19937 rng(5);
    const DerivedParams d = derive_params(testutil::make_params(0.12, 0.09, 0.22, 0.61));
    const Superoperator3 da = build_reservoir_dissipator(d, 0.09, Reservoir::a);
    const Superoperator3 db = build_reservoir_dissipator(d, 0.09, Reservoir::b);
    for (int trial = 0; trial < 20; ++trial) {
        const Matrix3cd rho = random_hermitian(rng);
        CHECK(std::abs(da.apply(rho).trace()) < 1e-14);
        CHECK(std::abs(db.apply(rho).trace()) < 1e-14);
    }
}

TEST_CASE("label swap symmetry at equal temperatures") {
    // Exchanging the reservoirs maps B -> -B; at T_a = T_b the two dissipators
    // are related by conjugation with diag(1, 1, -1).
    const DerivedParams d = derive_params(testutil::make_params(0.23, 0.11, 0.4, 0.4));
    const Superoperator3 da = build_reservoir_dissipator(d, 0.11, Reservoir::a);
    const Superoperator3 db = build_reservoir_dissipator(d, 0.11, Reservoir::b);
    Matrix3cd flip = Matrix3cd::Identity();
    flip(2, 2) = -1.0;
    const Superoperator3 conjugated = from_rule([&](const Matrix3cd& rho) {
        return (flip * da.apply((flip * rho * flip).eval()) * flip).eval();
    });
    CHECK(superop_diff(db, conjugated) < 1e-14);
}

TEST_CASE("generator vanishes on the analytic steady state") {
    std::mt19937 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        const SystemParams p = testutil::random_params(rng);
        const DerivedParams d = derive_params(p);
        const Superoperator3 gen = build_total_generator(d, p.gamma);
        const SteadyState ss = steady_analytic(d, p.gamma);
        CHECK(gen.apply(ss.to_matrix()).cwiseAbs().maxCoeff() < 1e-13);
    }
}

TEST_CASE("population/coherence split reassembles each dissipator") {
    std::mt19937 rng(9);
    for (int trial = 0; trial < 20; ++trial) {
        const SystemParams p = testutil::random_params(rng);
        const DerivedParams d = derive_params(p);
        for (Reservoir which : {Reservoir::a, Reservoir::b}) {
            const Superoperator3 full = build_reservoir_dissipator(d, p.gamma, which);
            const auto [pop, coh] = split_dissipator(d, p.gamma, which);
            CHECK(superop_diff(pop + coh, full) < 1e-13);
        }
    }
}

TEST_CASE("coherence parts cancel at equilibrium") {
    const DerivedParams d = derive_params(testutil::make_params(0.31, 0.13, 0.5, 0.5));
    const auto [pa, ca] = split_dissipator(d, 0.13, Reservoir::a);
    const auto [pb, cb] = split_dissipator(d, 0.13, Reservoir::b);
    CHECK((ca + cb).matrix().cwiseAbs().maxCoeff() < 1e-15);
    CHECK(superop_diff(pa, pb) < 1e-15);  // equal occupations, identical jump rates
}

TEST_CASE("population part maps diagonal states to diagonal states") {
    const DerivedParams d = derive_params(testutil::make_params(0.2, 0.1, 0.2, 0.8));
    const auto [pop, coh] = split_dissipator(d, 0.1, Reservoir::a);
    Matrix3cd rho = Matrix3cd::Zero();
    rho(0, 0) = 0.5;
    rho(1, 1) = 0.3;
    rho(2, 2) = 0.2;
    const Matrix3cd out = pop.apply(rho);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if (i != j) CHECK(std::abs(out(i, j)) < 1e-16);
    (void)coh;
}

TEST_CASE("coherence-part coefficients match the stated jump combinations") {
    // Hand-built reference: the three cross-mode maps with reservoir-b weights
    // -(gamma/2)(Nb_A+Nb_B), -(gamma/2)(Nb_A+1), -(gamma/2)(Nb_B+1).
    const double gamma = 0.1;
    const DerivedParams d = derive_params(testutil::make_params(0.1, gamma, 0.2, 0.6));
    const Matrix3cd eg = ket_bra(1, 0), ge = ket_bra(0, 1);
    const Matrix3cd fg = ket_bra(2, 0), gf = ket_bra(0, 2);
    const Matrix3cd ef = ket_bra(1, 2), fe = ket_bra(2, 1);

    const auto pump = [&](const Matrix3cd& rho) {
        return (eg * rho * gf + fg * rho * ge).eval();
    };
    const auto decay_a = [&](const Matrix3cd& rho) {
        return (gf * rho * eg + ge * rho * fg - rho * ef - fe * rho).eval();
    };
    const auto decay_b = [&](const Matrix3cd& rho) {
        return (gf * rho * eg + ge * rho * fg - rho * fe - ef * rho).eval();
    };
    const Superoperator3 reference = from_rule([&](const Matrix3cd& rho) {
        return (-(gamma / 2) * (d.n_b_A + d.n_b_B) * pump(rho) -
                (gamma / 2) * (d.n_b_A + 1.0) * decay_a(rho) -
                (gamma / 2) * (d.n_b_B + 1.0) * decay_b(rho))
            .eval();
    });
    const auto [pop, coh] = split_dissipator(d, gamma, Reservoir::b);
    CHECK(superop_diff(coh, reference) < 1e-15);
    (void)pop;
}

TEST_CASE("additivity: reservoir split equals process split") {
    std::mt19937 rng(13);
    for (int trial = 0; trial < 20; ++trial) {
        const SystemParams p = testutil::random_params(rng);
        const DerivedParams d = derive_params(p);
        const Superoperator3 by_reservoir = build_reservoir_dissipator(d, p.gamma, Reservoir::a) +
                                            build_reservoir_dissipator(d, p.gamma, Reservoir::b);
        const Superoperator3 by_process =
            build_same_mode_dissipator(d, p.gamma) + build_cross_mode_dissipator(d, p.gamma);
        CHECK(superop_diff(by_reservoir, by_process) < 1e-13);
    }
}

TEST_CASE("total generator is trace-annihilating and Hermiticity-preserving") {
    std::mt19937 rng(17);
    for (int trial = 0; trial < 10; ++trial) {
        const SystemParams p = testutil::random_params(rng);
        const DerivedParams d = derive_params(p);
        const Superoperator3 gen = build_total_generator(d, p.gamma);
        CHECK(gen.trace_defect() < 1e-13);
        CHECK(gen.hermiticity_defect() < 1e-13);
    }
}

TEST_CASE("apply_superoperator basics") {
    std::mt19937 rng(19);
    const Matrix3cd rho = random_hermitian(rng);
    CHECK(Superoperator3().apply(rho).cwiseAbs().maxCoeff() == 0.0);

    Superoperator3 scaled;
    scaled.matrix() = 2.5 * Superoperator3::Matrix9::Identity();
    CHECK((scaled.apply(rho) - 2.5 * rho).cwiseAbs().maxCoeff() < 1e-15);

    const MatrixXcd wrong = MatrixXcd::Zero(4, 4);
    CHECK_THROWS_AS(apply_superoperator(wrong, MatrixXcd::Zero(3, 3)), std::invalid_argument);
}

TEST_CASE("reservoir-a dissipator on the e level matches the hand expansion") {
    const double gamma = 0.1;
    const DerivedParams d = derive_params(testutil::make_params(0.1, gamma, 0.2, 0.6));
    const Superoperator3 da = build_reservoir_dissipator(d, gamma, Reservoir::a);
    const Matrix3cd out = da.apply(ket_bra(1, 1));
    Matrix3cd expected = Matrix3cd::Zero();
    expected(0, 0) = gamma * (d.n_a_A + 1.0);
    expected(1, 1) = -gamma * (d.n_a_A + 1.0);
    expected(1, 2) = -(gamma / 2) * (d.n_a_A + 1.0);
    expected(2, 1) = -(gamma / 2) * (d.n_a_A + 1.0);
    CHECK((out - expected).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("fock generator guards its truncation range") {
    const DerivedParams d = derive_params(testutil::make_params(0.1, 0.1, 0.2, 0.6));
    CHECK_THROWS_AS(build_fock_generator(d, 0.1, 0), std::invalid_argument);
    CHECK_THROWS_AS(build_fock_generator(d, 0.1, 7), std::invalid_argument);
}

TEST_CASE("fock generator annihilates the trace") {
    std::mt19937 rng(23);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const DerivedParams d = derive_params(testutil::make_params(0.1, 0.1, 0.2, 0.6));
    const FockGenerator f = build_fock_generator(d, 0.1, 3);
    MatrixXcd rho(f.dim, f.dim);
    for (int i = 0; i < f.dim; ++i)
        for (int j = 0; j < f.dim; ++j) rho(i, j) = complexd(u(rng), u(rng));
    rho = 0.5 * (rho + rho.adjoint()).eval();
    CHECK(std::abs(apply_superoperator(f.matrix, rho).trace()) < 1e-12);
}

TEST_CASE("fock equilibrium steady state is thermal") {
    const SystemParams p = testutil::make_params(0.1, 0.1, 0.2, 0.2);
    const DerivedParams d = derive_params(p);
    const FockGenerator f = build_fock_generator(d, p.gamma, 3);
    const MatrixXcd rho = stationary_matrix(f.matrix, f.dim);
    const double occ_a = (f.mode_a.adjoint() * f.mode_a * rho).trace().real();
    const double occ_b = (f.mode_b.adjoint() * f.mode_b * rho).trace().real();
    CHECK(std::abs(occ_a - d.n_plus_A) < 1e-6);
    CHECK(std::abs(occ_b - d.n_plus_B) < 1e-6);
}

TEST_CASE("single-excitation projection of the two-mode assembly") {
    const SystemParams p = testutil::make_params(0.17, 0.13, 0.25, 0.77);
    const DerivedParams d = derive_params(p);
    const Superoperator3 three_level = build_total_generator(d, p.gamma);

    // keep = (|0,0>, |1,0>, |0,1>) in the two-mode basis with truncation 1
    const int keep[3] = {0, 2, 1};

    // The generic two-mode assembly, fed with the subspace-restricted mode
    // operators, must reproduce the three-level generator entrywise.
    MatrixXcd mode_a = MatrixXcd::Zero(4, 4);
    mode_a(keep[0], keep[1]) = 1.0;
    MatrixXcd mode_b = MatrixXcd::Zero(4, 4);
    mode_b(keep[0], keep[2]) = 1.0;
    const MatrixXcd restricted = build_generator_from_modes(d, p.gamma, mode_a, mode_b);
    CHECK(superop_diff(compress_to_subspace(restricted, 4, keep), three_level) < 1e-13);

    // The true bosonic truncation differs only through paths that pass
    // through the double-excitation state: the ground-state column, which
    // such paths cannot touch, still matches exactly.
    const FockGenerator bosonic = build_fock_generator(d, p.gamma, 1);
    const Superoperator3 compressed = compress_to_subspace(bosonic.matrix, 4, keep);
    CHECK((compressed.matrix().col(0) - three_level.matrix().col(0)).cwiseAbs().maxCoeff() <
          1e-13);
    CHECK(superop_diff(compressed, three_level) > 1e-3);
}

}  // TEST_SUITE
