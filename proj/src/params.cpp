#include "optmol/params.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace optmol {

void SystemParams::validate() const {
    auto bad = [](const std::string& what) { throw std::invalid_argument(what); };
    if (!std::isfinite(omega) || omega <= 0) bad("omega must be finite and > 0");
    if (!std::isfinite(gamma) || gamma <= 0) bad("gamma must be finite and > 0");
    if (!std::isfinite(t_a) || t_a <= 0) bad("t_a must be finite and > 0");
    if (!std::isfinite(t_b) || t_b <= 0) bad("t_b must be finite and > 0");
    if (!std::isfinite(lambda) || lambda < 0 || lambda >= omega)
        bad("lambda must satisfy 0 <= lambda < omega (keeps both supermode frequencies positive)");
}

double planck_occupation(double omega, double temperature) {
    if (!std::isfinite(omega) || omega <= 0)
        throw std::domain_error("planck_occupation: omega must be finite and > 0");
    if (!std::isfinite(temperature) || temperature <= 0)
        throw std::domain_error("planck_occupation: temperature must be finite and > 0");
    const double x = omega / temperature;
    if (x > 700.0) return std::exp(-x);  // exp(x) would overflow; occupation ~ e^{-x}
    return 1.0 / std::expm1(x);
}

DerivedParams derive_params(const SystemParams& p) {
    p.validate();
    DerivedParams d;
    d.omega_a = p.omega + p.lambda;
    d.omega_b = p.omega - p.lambda;
    d.n_a_A = planck_occupation(d.omega_a, p.t_a);
    d.n_a_B = planck_occupation(d.omega_b, p.t_a);
    d.n_b_A = planck_occupation(d.omega_a, p.t_b);
    d.n_b_B = planck_occupation(d.omega_b, p.t_b);
    d.n_plus_A = 0.5 * (d.n_a_A + d.n_b_A);
    d.n_plus_B = 0.5 * (d.n_a_B + d.n_b_B);
    d.n_minus_A = 0.5 * (d.n_a_A - d.n_b_A);
    d.n_minus_B = 0.5 * (d.n_a_B - d.n_b_B);
    const double s = d.damping_sum();
    const double detuning_over_gamma = d.detuning() / p.gamma;
    d.r_factor = s / (s * s + detuning_over_gamma * detuning_over_gamma);
    return d;
}

}  // namespace optmol
