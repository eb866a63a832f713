#pragma once

namespace optmol {

/// Physical inputs for the two-cavity system between two thermal reservoirs.
/// All quantities are expressed in units of the bare cavity frequency
/// (hbar = k_B = 1), so omega = 1 is the usual choice.
struct SystemParams {
    double omega = 1.0;   ///< bare cavity frequency (energy unit)
    double lambda = 0.1;  ///< inter-cavity coupling, 0 <= lambda < omega
    double gamma = 0.1;   ///< reservoir coupling rate
    double t_a = 0.2;     ///< temperature of reservoir a
    double t_b = 0.2;     ///< temperature of reservoir b

    /// Throws std::invalid_argument naming the violated bound.
    void validate() const;
};

/// Supermode frequencies and all reservoir occupation factors that enter the
/// rate expressions downstream. Produced by derive_params(); treat as
/// read-only.
struct DerivedParams {
    double omega_a = 0;  ///< symmetric supermode frequency, omega + lambda
    double omega_b = 0;  ///< antisymmetric supermode frequency, omega - lambda

    // Planck occupations N_alpha(omega_X) per reservoir (a, b) and supermode (A, B).
    double n_a_A = 0, n_a_B = 0;
    double n_b_A = 0, n_b_B = 0;

    // Half-sum and half-difference combinations (n_a +/- n_b)/2.
    double n_plus_A = 0, n_plus_B = 0;
    double n_minus_A = 0, n_minus_B = 0;

    /// Resonance weight of the cross-mode coupling:
    /// S / (S^2 + ((omega_a-omega_b)/gamma)^2) with S = n_plus_A + n_plus_B + 2.
    double r_factor = 0;

    /// Total damping factor S = n_plus_A + n_plus_B + 2 of the e-f coherence.
    double damping_sum() const { return n_plus_A + n_plus_B + 2.0; }

    /// Supermode splitting omega_a - omega_b (= 2 lambda).
    double detuning() const { return omega_a - omega_b; }
};

/// Mean boson number [exp(omega/T) - 1]^{-1} of a reservoir mode.
/// Throws std::domain_error for non-finite or non-positive inputs.
/// For omega/T > 700 falls back to exp(-omega/T) to avoid overflow.
double planck_occupation(double omega, double temperature);

/// Populates every derived quantity from validated system parameters.
DerivedParams derive_params(const SystemParams& p);

}  // namespace optmol
