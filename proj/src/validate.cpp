#include "optmol/validate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <vector>

#include "optmol/dynamics.hpp"
#include "optmol/observables.hpp"
#include "optmol/steady.hpp"
#include "optmol/format.hpp"

namespace optmol {

namespace {

std::vector<double> grid(double min, double max, int count) {
    std::vector<double> out;
    out.reserve(count);
    if (count == 1) {
        out.push_back(min);
        return out;
    }
    for (int i = 0; i < count; ++i)
        out.push_back(min + (max - min) * double(i) / double(count - 1));
    return out;
}

}  // namespace

bool ValidationReport::all_pass() const {
    return std::all_of(checks.begin(), checks.end(),
                       [](const CheckResult& c) { return c.pass; });
}

double ValidationReport::worst_residual() const {
    double worst = 0;
    for (const CheckResult& c : checks) worst = std::max(worst, c.residual);
    return worst;
}

ValidationReport run_validation(const ValidationOptions& opts) {
    opts.base.validate();
    ValidationReport report;
    const auto lambdas = grid(opts.lambda_min, opts.lambda_max, opts.grid_lambda);
    const auto delta_ts = grid(opts.delta_t_min, opts.delta_t_max, opts.grid_delta_t);
    report.grid_points = int(lambdas.size() * delta_ts.size());

    double oracle_resid = 0, transfer_resid = 0;
    double gibbs_resid = 0, gibbs_coh_resid = 0;
    double balance_resid = 0, trace_resid = 0;
    double flux_resid = 0;
    double second_law_resid = 0;
    double sign_resid = 0;  // worst violated margin, 0 when every sign is right
    double positivity_resid = 0;

    for (double lambda : lambdas) {
        for (double delta_t : delta_ts) {
            SystemParams p = opts.base;
            p.lambda = lambda;
            p.t_b = p.t_a + delta_t;
            const DerivedParams d = derive_params(p);
            const SteadyState ss = steady_analytic(d, p.gamma);

            // Three independent routes to the steady state.
            const SteadyState oracle = steady_numeric_oracle(build_total_generator(d, p.gamma));
            const TransferGenerator a = transfer_generator(d, p.gamma);
            const Eigen::Vector3d cof = steady_from_cofactors(a);
            oracle_resid = std::max({oracle_resid,
                                     (ss.populations - oracle.populations).cwiseAbs().maxCoeff(),
                                     std::abs(ss.coherence - oracle.coherence),
                                     (ss.populations - cof).cwiseAbs().maxCoeff()});

            const TransferGenerator an =
                transfer_generator_numeric(build_block_generator(d, p.gamma));
            const double scale = a.m.cwiseAbs().maxCoeff();
            transfer_resid =
                std::max(transfer_resid, (a.m - an.m).cwiseAbs().maxCoeff() / scale);

            positivity_resid = std::max(positivity_resid, -ss.min_eigenvalue());

            if (delta_t == 0.0) {
                const double ratio_e = ss.populations(1) / ss.populations(0);
                const double ratio_f = ss.populations(2) / ss.populations(0);
                const double gibbs_e = std::exp(-d.omega_a / p.t_a);
                const double gibbs_f = std::exp(-d.omega_b / p.t_a);
                gibbs_resid = std::max({gibbs_resid,
                                        std::abs(ratio_e - gibbs_e) / gibbs_e,
                                        std::abs(ratio_f - gibbs_f) / gibbs_f});
                gibbs_coh_resid = std::max(gibbs_coh_resid, std::abs(ss.coherence));
            }

            const double j_a_closed = heat_current_closed(Reservoir::a, ss, d, p.gamma);
            const double j_b_closed = heat_current_closed(Reservoir::b, ss, d, p.gamma);
            const HeatSplit sa = heat_current_split_closed(Reservoir::a, ss, d, p.gamma);
            const HeatSplit sb = heat_current_split_closed(Reservoir::b, ss, d, p.gamma);
            balance_resid = std::max({balance_resid, std::abs(j_a_closed + j_b_closed),
                                      std::abs(j_a_closed - sa.population - sa.coherence),
                                      std::abs(j_b_closed - sb.population - sb.coherence)});
            const HeatSplit sat = heat_current_split_trace(Reservoir::a, ss, d, p.gamma);
            const HeatSplit sbt = heat_current_split_trace(Reservoir::b, ss, d, p.gamma);
            trace_resid = std::max(
                {trace_resid,
                 std::abs(j_a_closed - heat_current_trace(Reservoir::a, ss, d, p.gamma)),
                 std::abs(j_b_closed - heat_current_trace(Reservoir::b, ss, d, p.gamma)),
                 std::abs(sa.population - sat.population), std::abs(sa.coherence - sat.coherence),
                 std::abs(sb.population - sbt.population), std::abs(sb.coherence - sbt.coherence)});

            TransferGenerator probed = a;
            probed.m(1, 2) += opts.corruption;  // negative-control hook
            const auto expr = curl_flux_expressions(probed, ss.populations);
            const double closed = curl_flux_closed_form(d, p.gamma, ss.populations);
            flux_resid = std::max({flux_resid, std::abs(expr[0] - expr[1]),
                                   std::abs(expr[0] - expr[2]), std::abs(expr[0] - closed)});

            const double epr =
                entropy_production_rate(j_a_closed, j_b_closed, p.t_a, p.t_b);
            second_law_resid = std::max(second_law_resid, -epr);

            if (delta_t >= 0.05) {
                const double worst_sign =
                    std::max({-j_b_closed, j_a_closed, -sb.population, sa.population,
                              -sa.coherence, sb.coherence, -epr});
                sign_resid = std::max(sign_resid, std::max(0.0, worst_sign));
            }
        }
    }

    // Spot checks of the fixed-point identity at random parameters.
    std::mt19937 rng(opts.seed);
    std::uniform_real_distribution<double> u_lambda(0.02, 0.6);
    std::uniform_real_distribution<double> u_gamma(0.02, 0.3);
    std::uniform_real_distribution<double> u_temp(0.1, 1.2);
    double fixed_point_resid = 0;
    for (int i = 0; i < opts.random_points; ++i) {
        SystemParams p = opts.base;
        p.lambda = u_lambda(rng);
        p.gamma = u_gamma(rng);
        p.t_a = u_temp(rng);
        p.t_b = u_temp(rng);
        const DerivedParams d = derive_params(p);
        const MasterEquation eq = MasterEquation::build(d, p.gamma);
        const State3 rate = eq.derivative(steady_analytic(d, p.gamma).to_state());
        fixed_point_resid = std::max(
            {fixed_point_resid, std::abs(rate.rho_gg), std::abs(rate.rho_ee),
             std::abs(rate.rho_ff), std::abs(rate.rho_ef), std::abs(rate.rho_ge),
             std::abs(rate.rho_gf)});
    }

    report.checks.push_back({"oracle_agreement", oracle_resid < 1e-10, oracle_resid});
    report.checks.push_back({"transfer_generator_agreement", transfer_resid < 1e-11,
                             transfer_resid});
    report.checks.push_back({"gibbs_limit", gibbs_resid < 1e-10, gibbs_resid});
    report.checks.push_back({"gibbs_coherence", gibbs_coh_resid < 1e-14, gibbs_coh_resid});
    report.checks.push_back({"fixed_point", fixed_point_resid < 1e-12, fixed_point_resid});
    report.checks.push_back({"heat_balance", balance_resid < 1e-12, balance_resid});
    report.checks.push_back({"heat_trace_consistency", trace_resid < 1e-12, trace_resid});
    report.checks.push_back({"flux_equivalence", flux_resid < 1e-12, flux_resid});
    report.checks.push_back({"second_law", second_law_resid < 1e-12, second_law_resid});
    report.checks.push_back({"sign_structure", sign_resid <= 0.0, sign_resid});
    report.checks.push_back({"positivity", positivity_resid < 1e-10, positivity_resid});

    if (opts.fock) {
        SystemParams p = opts.base;
        p.t_b = opts.fock_t_b;
        const DerivedParams d = derive_params(p);
        const FockGenerator fock = build_fock_generator(d, p.gamma, opts.n_max);
        const Eigen::MatrixXcd rho = stationary_matrix(fock.matrix, fock.dim);

        const double solve_resid =
            (fock.matrix * Eigen::Map<const Eigen::VectorXcd>(rho.data(), rho.size()))
                .cwiseAbs()
                .maxCoeff();
        const int levels = opts.n_max + 1;
        const int idx_g = 0, idx_e = levels, idx_f = 1;
        const double kept = rho(idx_g, idx_g).real() + rho(idx_e, idx_e).real() +
                            rho(idx_f, idx_f).real();
        const double leakage = 1.0 - kept;

        Eigen::Matrix3cd projected;
        const int keep[3] = {idx_g, idx_e, idx_f};
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) projected(i, j) = rho(keep[i], keep[j]);
        projected /= projected.trace().real();
        const Eigen::Matrix3cd reduced = steady_analytic(d, p.gamma).to_matrix();
        const double proj_diff = (projected - reduced).cwiseAbs().maxCoeff();

        report.checks.push_back({"fock_solve_residual", solve_resid < 1e-10, solve_resid});
        report.checks.push_back({"fock_leakage", leakage >= 0 && leakage < 0.5, leakage});
        report.checks.push_back(
            {"fock_projection", proj_diff <= 5.0 * leakage, proj_diff});
    }
    return report;
}

std::string report_to_json(const ValidationReport& report) {
    std::ostringstream os;
    os << "{\n";
    os << "  \"grid_points\": " << report.grid_points << ",\n";
    os << "  \"all_pass\": " << (report.all_pass() ? "true" : "false") << ",\n";
    os << "  \"worst_residual\": " << format_full(report.worst_residual()) << ",\n";
    os << "  \"checks\": [\n";
    for (std::size_t i = 0; i < report.checks.size(); ++i) {
        const CheckResult& c = report.checks[i];
        os << "    {\"name\": \"" << c.name << "\", \"pass\": " << (c.pass ? "true" : "false")
           << ", \"residual\": " << format_full(c.residual) << "}"
           << (i + 1 < report.checks.size() ? "," : "") << "\n";
    }
    os << "  ]\n}\n";
    return os.str();
}

}  // namespace optmol
