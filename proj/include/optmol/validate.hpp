#pragma once

#include <string>
#include <vector>

#include "optmol/params.hpp"

namespace optmol {

struct ValidationOptions {
    SystemParams base;          ///< omega, gamma, t_a used everywhere
    double lambda_min = 0.05, lambda_max = 0.5;
    double delta_t_min = 0.0, delta_t_max = 0.8;
    int grid_lambda = 20;
    int grid_delta_t = 20;
    int random_points = 100;    ///< fixed-point spot checks
    unsigned seed = 20240809;
    bool fock = false;          ///< run the truncated-Fock leakage check
    int n_max = 4;
    double fock_t_b = 1.0;
    /// Test hook: perturbation added to one transfer-generator entry before
    /// the flux-equivalence check, so a corrupted generator is detected.
    double corruption = 0.0;
};

struct CheckResult {
    std::string name;
    bool pass = false;
    double residual = 0;  ///< worst-case residual of the family
};

struct ValidationReport {
    std::vector<CheckResult> checks;
    int grid_points = 0;

    bool all_pass() const;
    double worst_residual() const;
};

/// Runs every invariant family over the grid: oracle agreement, Gibbs limit,
/// fixed point, heat balance and split additivity, trace-form consistency,
/// flux equivalence, sign structure, second law, and optionally the Fock
/// leakage check.
ValidationReport run_validation(const ValidationOptions& opts);

/// Flat JSON report with a checks array; numbers at 17 significant digits.
std::string report_to_json(const ValidationReport& report);

}  // namespace optmol
