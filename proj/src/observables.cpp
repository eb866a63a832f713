#include "optmol/observables.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace optmol {

namespace {

constexpr double kZeroEigenvalueCutoff = 1e-12;
constexpr double kDegenerateSumCutoff = 1e-14;
constexpr double kConsistencyTol = 1e-12;

double wrap_to_pi(double x) {
    const double pi = std::numbers::pi;
    while (x > pi) x -= 2.0 * pi;
    while (x < -pi) x += 2.0 * pi;
    return x;
}

struct SpectralDerivatives {
    double dp1, dp2, dp3, dalpha, dphi;
};

SpectralDerivatives central_differences(const SpectralDecomp& minus,
                                        const SpectralDecomp& plus, double step) {
    SpectralDerivatives der;
    const double inv = 1.0 / (2.0 * step);
    der.dp1 = (plus.p1 - minus.p1) * inv;
    der.dp2 = (plus.p2 - minus.p2) * inv;
    der.dp3 = (plus.p3 - minus.p3) * inv;
    der.dalpha = (plus.alpha - minus.alpha) * inv;
    // arg() is discontinuous at +-pi; differentiate on the continuous branch.
    der.dphi = wrap_to_pi(plus.phi - minus.phi) * inv;
    return der;
}

SpectralDerivatives stencil_at(const SystemParams& p, double step) {
    SystemParams lo = p;
    lo.lambda = p.lambda - step;
    SystemParams hi = p;
    hi.lambda = p.lambda + step;
    const SpectralDecomp minus = spectral_decomposition(steady_analytic(derive_params(lo), lo.gamma));
    const SpectralDecomp plus = spectral_decomposition(steady_analytic(derive_params(hi), hi.gamma));
    return central_differences(minus, plus, step);
}

// Trace heat current Tr{D[rho] H} for any dissipator on the subspace.
double trace_current(const Superoperator3& dissipator, const SteadyState& ss,
                     const DerivedParams& d) {
    const Eigen::Matrix3cd drho = dissipator.apply(ss.to_matrix());
    return (d.omega_a * drho(1, 1) + d.omega_b * drho(2, 2)).real();
}

struct ReservoirOccupations {
    double n_A, n_B, sign;
};

ReservoirOccupations occ_for(const DerivedParams& d, Reservoir which) {
    if (which == Reservoir::a) return {d.n_a_A, d.n_a_B, +1.0};
    return {d.n_b_A, d.n_b_B, -1.0};
}

}  // namespace

SpectralDecomp spectral_decomposition(const SteadyState& ss) {
    const double ee = ss.populations(1);
    const double ff = ss.populations(2);
    const double mod = std::abs(ss.coherence);
    const double mean = 0.5 * (ee + ff);
    const double radius = std::hypot(0.5 * (ee - ff), mod);
    SpectralDecomp out;
    out.p1 = ss.populations(0);
    out.p2 = mean + radius;
    out.p3 = mean - radius;
    // atan2 keeps alpha in [0, pi] and well defined when ee < ff.
    out.alpha = std::atan2(2.0 * mod, ee - ff);
    out.phi = mod < 1e-14 ? 0.0 : std::arg(ss.coherence);
    return out;
}

double qfi_lambda(const SystemParams& p, const QfiOptions& opts, QfiBreakdown* detail) {
    p.validate();
    if (!(opts.step > 0) || p.lambda - opts.step <= 0 || p.lambda + opts.step >= p.omega)
        throw std::invalid_argument("qfi_lambda: lambda +/- step must stay inside (0, omega)");

    const SpectralDecomp center =
        spectral_decomposition(steady_analytic(derive_params(p), p.gamma));
    SpectralDerivatives der = stencil_at(p, opts.step);
    if (opts.richardson) {
        const SpectralDerivatives fine = stencil_at(p, 0.5 * opts.step);
        der.dp1 = (4.0 * fine.dp1 - der.dp1) / 3.0;
        der.dp2 = (4.0 * fine.dp2 - der.dp2) / 3.0;
        der.dp3 = (4.0 * fine.dp3 - der.dp3) / 3.0;
        der.dalpha = (4.0 * fine.dalpha - der.dalpha) / 3.0;
        der.dphi = (4.0 * fine.dphi - der.dphi) / 3.0;
    }

    QfiBreakdown breakdown;
    const double ps[3] = {center.p1, center.p2, center.p3};
    const double dps[3] = {der.dp1, der.dp2, der.dp3};
    for (int i = 0; i < 3; ++i)
        if (ps[i] > kZeroEigenvalueCutoff) breakdown.classical += dps[i] * dps[i] / ps[i];

    const double pair_sum = center.p2 + center.p3;
    if (pair_sum < kDegenerateSumCutoff) {
        breakdown.degenerate = true;
    } else {
        const double gap = center.p2 - center.p3;
        const double sin_alpha = std::sin(center.alpha);
        breakdown.coherent = gap * gap / pair_sum *
                             (der.dalpha * der.dalpha +
                              der.dphi * der.dphi * sin_alpha * sin_alpha);
    }
    if (detail) *detail = breakdown;
    return breakdown.classical + breakdown.coherent;
}

double qfi_general(const std::function<SteadyState(double)>& state_at, double theta0,
                   double step, QfiBreakdown* detail) {
    if (!(step > 0)) throw std::invalid_argument("qfi_general: step must be > 0");

    using Solver = Eigen::SelfAdjointEigenSolver<Eigen::Matrix3cd>;
    const auto decompose = [&](double theta) {
        Solver solver(state_at(theta).to_matrix());
        Eigen::Vector3d vals = solver.eigenvalues();
        Eigen::Matrix3cd vecs = solver.eigenvectors();
        // descending eigenvalue order
        std::array<int, 3> order = {2, 1, 0};
        std::sort(order.begin(), order.end(),
                  [&](int a, int b) { return vals(a) > vals(b); });
        Eigen::Vector3d v;
        Eigen::Matrix3cd m;
        for (int k = 0; k < 3; ++k) {
            v(k) = vals(order[k]);
            m.col(k) = vecs.col(order[k]);
        }
        return std::pair{v, m};
    };

    auto [p0, v0] = decompose(theta0);
    // Gauge: make the largest-magnitude component of each center eigenvector
    // real positive, and impose the same pivot on the stencil points.
    std::array<int, 3> pivot;
    for (int k = 0; k < 3; ++k) {
        int idx = 0;
        v0.col(k).cwiseAbs().maxCoeff(&idx);
        pivot[k] = idx;
        v0.col(k) /= v0(idx, k) / std::abs(v0(idx, k));
    }

    QfiBreakdown breakdown;
    const auto side = [&](double theta, bool& crossed) {
        auto [p, v] = decompose(theta);
        Eigen::Vector3d pm;
        Eigen::Matrix3cd vm;
        std::array<bool, 3> used{};
        crossed = false;
        for (int k = 0; k < 3; ++k) {
            int best = -1;
            double best_ov = -1;
            for (int m = 0; m < 3; ++m) {
                if (used[m]) continue;
                const double ov = std::abs(v0.col(k).dot(v.col(m)));
                if (ov > best_ov) {
                    best_ov = ov;
                    best = m;
                }
            }
            used[best] = true;
            // A genuine crossing rotates the pair by ~45 degrees or more
            // relative to the center basis.
            if (best_ov < 0.8) crossed = true;
            pm(k) = p(best);
            vm.col(k) = v.col(best);
            const std::complex<double> piv = vm(pivot[k], k);
            if (std::abs(piv) > 0) vm.col(k) /= piv / std::abs(piv);
        }
        return std::pair{pm, vm};
    };

    double h = step;
    bool crossed_lo = false, crossed_hi = false;
    auto [pl, vl] = side(theta0 - h, crossed_lo);
    auto [ph, vh] = side(theta0 + h, crossed_hi);
    if (crossed_lo || crossed_hi) {
        h *= 0.5;
        auto retry_lo = side(theta0 - h, crossed_lo);
        auto retry_hi = side(theta0 + h, crossed_hi);
        pl = retry_lo.first;
        vl = retry_lo.second;
        ph = retry_hi.first;
        vh = retry_hi.second;
        breakdown.crossing_flagged = crossed_lo || crossed_hi;
    }

    const Eigen::Vector3d dp = (ph - pl) / (2.0 * h);
    const Eigen::Matrix3cd dv = (vh - vl) / (2.0 * h);

    double classical = 0, curvature = 0, projection = 0;
    for (int i = 0; i < 3; ++i) {
        if (p0(i) <= kZeroEigenvalueCutoff) continue;
        classical += dp(i) * dp(i) / p0(i);
        curvature += 4.0 * p0(i) * dv.col(i).squaredNorm();
        for (int j = 0; j < 3; ++j) {
            if (p0(j) <= kZeroEigenvalueCutoff) continue;
            const double overlap = std::norm(v0.col(i).dot(dv.col(j)));
            projection += 8.0 * p0(i) * p0(j) / (p0(i) + p0(j)) * overlap;
        }
    }
    breakdown.classical = classical;
    breakdown.coherent = curvature - projection;
    if (detail) *detail = breakdown;
    return classical + curvature - projection;
}

std::array<double, 3> curl_flux_expressions(const TransferGenerator& a,
                                            const Eigen::Vector3d& pops) {
    const Eigen::Matrix3d& m = a.m;
    return {m(0, 1) * pops(1) - m(1, 0) * pops(0),
            m(2, 0) * pops(0) - m(0, 2) * pops(2),
            m(1, 2) * pops(2) - m(2, 1) * pops(1)};
}

double curl_flux(const TransferGenerator& a, const Eigen::Vector3d& pops) {
    const auto expr = curl_flux_expressions(a, pops);
    const double spread = std::max({std::abs(expr[0] - expr[1]), std::abs(expr[0] - expr[2]),
                                    std::abs(expr[1] - expr[2])});
    if (spread > kConsistencyTol)
        throw std::runtime_error("curl_flux: cyclic expressions disagree (generator bug?)");
    return expr[0];
}

double curl_flux_closed_form(const DerivedParams& d, double gamma,
                             const Eigen::Vector3d& pops) {
    return 2.0 * gamma * d.r_factor *
           (d.n_minus_B * d.n_minus_B * pops(2) - d.n_minus_A * d.n_minus_A * pops(1));
}

TransferDecomposition decompose_transfer(const TransferGenerator& a,
                                         const Eigen::Vector3d& pops) {
    const Eigen::Matrix3d& m = a.m;
    Eigen::Matrix3d transfer = Eigen::Matrix3d::Zero();
    for (int row = 0; row < 3; ++row)
        for (int col = 0; col < 3; ++col)
            if (row != col) transfer(row, col) = m(col, row) * pops(row);

    TransferDecomposition out;
    out.j_curl = curl_flux(a, pops);
    out.symmetric = Eigen::Matrix3d::Zero();
    out.symmetric(0, 1) = out.symmetric(1, 0) = m(1, 0) * pops(0);
    out.symmetric(0, 2) = out.symmetric(2, 0) = m(0, 2) * pops(2);
    out.symmetric(1, 2) = out.symmetric(2, 1) = m(2, 1) * pops(1);

    Eigen::Matrix3d cyclic = Eigen::Matrix3d::Zero();
    cyclic(0, 2) = cyclic(1, 0) = cyclic(2, 1) = 1.0;
    const double defect =
        (transfer - out.symmetric - out.j_curl * cyclic).cwiseAbs().maxCoeff();
    if (defect > 1e-13)
        throw std::runtime_error("decompose_transfer: reconstruction defect above tolerance");
    return out;
}

double heat_current_closed(Reservoir which, const SteadyState& ss, const DerivedParams& d,
                           double gamma) {
    const auto [n_A, n_B, sign] = occ_for(d, which);
    const double re = ss.coherence.real();
    const double mode_a =
        n_A * ss.populations(0) - (n_A + 1.0) * ss.populations(1) - sign * (n_B + 1.0) * re;
    const double mode_b =
        n_B * ss.populations(0) - (n_B + 1.0) * ss.populations(2) - sign * (n_A + 1.0) * re;
    return gamma * (d.omega_a * mode_a + d.omega_b * mode_b);
}

double heat_current_trace(Reservoir which, const SteadyState& ss, const DerivedParams& d,
                          double gamma) {
    return trace_current(build_reservoir_dissipator(d, gamma, which), ss, d);
}

double heat_current(Reservoir which, const SteadyState& ss, const DerivedParams& d,
                    double gamma) {
    const double closed = heat_current_closed(which, ss, d, gamma);
    const double traced = heat_current_trace(which, ss, d, gamma);
    if (std::abs(closed - traced) > kConsistencyTol)
        throw std::runtime_error("heat_current: closed form and trace form disagree");
    return closed;
}

HeatSplit heat_current_split_closed(Reservoir which, const SteadyState& ss,
                                    const DerivedParams& d, double gamma) {
    const auto [n_A, n_B, sign] = occ_for(d, which);
    HeatSplit split;
    split.population = gamma * (d.omega_a * n_A + d.omega_b * n_B) * ss.populations(0) -
                       gamma * d.omega_a * (n_A + 1.0) * ss.populations(1) -
                       gamma * d.omega_b * (n_B + 1.0) * ss.populations(2);
    split.coherence = -sign * gamma *
                      (d.omega_a * (n_B + 1.0) + d.omega_b * (n_A + 1.0)) *
                      ss.coherence.real();
    return split;
}

HeatSplit heat_current_split_trace(Reservoir which, const SteadyState& ss,
                                   const DerivedParams& d, double gamma) {
    const auto [pop_part, coh_part] = split_dissipator(d, gamma, which);
    HeatSplit split;
    split.population = trace_current(pop_part, ss, d);
    split.coherence = trace_current(coh_part, ss, d);
    return split;
}

HeatSplit heat_current_split(Reservoir which, const SteadyState& ss,
                             const DerivedParams& d, double gamma) {
    const HeatSplit closed = heat_current_split_closed(which, ss, d, gamma);
    const HeatSplit traced = heat_current_split_trace(which, ss, d, gamma);
    if (std::abs(closed.population - traced.population) > kConsistencyTol ||
        std::abs(closed.coherence - traced.coherence) > kConsistencyTol)
        throw std::runtime_error("heat_current_split: closed form and trace form disagree");
    const double total = heat_current(which, ss, d, gamma);
    if (std::abs(closed.population + closed.coherence - total) > kConsistencyTol)
        throw std::runtime_error("heat_current_split: parts do not add up to the total");
    return closed;
}

double entropy_production_rate(double j_a, double j_b, double t_a, double t_b) {
    if (!(t_a > 0) || !(t_b > 0))
        throw std::invalid_argument("entropy_production_rate: temperatures must be > 0");
    return -(j_b / t_b + j_a / t_a);
}

ObservablesRecord evaluate_observables(const SystemParams& p, const QfiOptions& opts) {
    const DerivedParams d = derive_params(p);
    const SteadyState ss = steady_analytic(d, p.gamma);
    const TransferGenerator a = transfer_generator(d, p.gamma);

    ObservablesRecord rec;
    rec.coherence_abs = std::abs(ss.coherence);
    rec.j_curl = curl_flux(a, ss.populations);
    if (std::abs(rec.j_curl - curl_flux_closed_form(d, p.gamma, ss.populations)) >
        kConsistencyTol)
        throw std::runtime_error("evaluate_observables: curl flux closed form mismatch");

    rec.j_a = heat_current(Reservoir::a, ss, d, p.gamma);
    rec.j_b = heat_current(Reservoir::b, ss, d, p.gamma);
    if (std::abs(rec.j_a + rec.j_b) > kConsistencyTol)
        throw std::runtime_error("evaluate_observables: heat currents do not balance");

    const HeatSplit split_a = heat_current_split(Reservoir::a, ss, d, p.gamma);
    const HeatSplit split_b = heat_current_split(Reservoir::b, ss, d, p.gamma);
    rec.j_a_p = split_a.population;
    rec.j_a_c = split_a.coherence;
    rec.j_b_p = split_b.population;
    rec.j_b_c = split_b.coherence;

    rec.epr = entropy_production_rate(rec.j_a, rec.j_b, p.t_a, p.t_b);
    if (rec.epr < -kConsistencyTol)
        throw std::runtime_error("evaluate_observables: negative entropy production");

    rec.qfi = qfi_lambda(p, opts);
    return rec;
}

}  // namespace optmol
