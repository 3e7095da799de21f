#pragma once
// Polytrope majorant rho~(r) of rho_*, its one-dimensional alpha form, and the
// envelope rho~(r) <= C r^(2s-2) (E0 - U(r))^(n-1/2).

#include "antonov/response.hpp"

#include <vector>

namespace antonov {

/// Parameters of the majorant (E0 - E)^(n-1) / ((E0 - E) + c L^2).
struct PolytropeBoundConfig {
    double n = 1, c = 1, s = 0.5;
    std::vector<double> r_samples;  ///< radii in (0, R0); empty: geometric clustering at both ends

    PolytropeBoundConfig() = default;
    /// Throws std::invalid_argument unless n in (0, 7/2), c > 0 and s in (0, min(n, 1)).
    PolytropeBoundConfig(double n, double c, double s, std::vector<double> r_samples = {});
    void validate() const;
};

/// (4 pi / r^2) int int (E0-E)^(n-1) L / [((E0-E) + c L^2) sqrt(2(E-U) - L^2/r^2)] dL dE
/// over the velocity support at r. Zero (with a warning) outside (0, R0).
double rho_tilde_direct(const SteadyState& ss, const PolytropeBoundConfig& cfg, double r);

/// The same quantity from the alpha integral, alpha = 2 c r^2 (E-U)/(E0-E).
double rho_tilde_alpha(const SteadyState& ss, const PolytropeBoundConfig& cfg, double r);

/// int_0^inf artanh(sqrt(a/(a+1))) / (a^n sqrt(a (1+a))) da, the n < 1 bounding integral.
double alpha_bound_integral(double n);

struct EnvelopeCheck {
    double C_best = 0;     ///< max of rho~ / (r^(2s-2) (E0-U)^(n-1/2)) over the samples
    double C_refined = 0;  ///< the same with doubled sample density near 0 and R0
    bool pass = false;     ///< finite and |C_refined - C_best| <= 0.1 C_refined
    double integral = 0;   ///< int_0^R0 C_best r^(2s-2) (E0-U)^(n-1/2) r dr
    std::vector<double> radii, rho_tilde, envelope, ratio;  ///< on the base samples
};

EnvelopeCheck envelope_check(const SteadyState& ss, const PolytropeBoundConfig& cfg);

/// Default samples: R0 * 10^(-6 j/m) and R0 (1 - 10^(-6 j/m)), j = 1..m, plus interior points.
std::vector<double> envelope_samples(double R0, int m);

/// Least-squares fit omega - omega_* = a (E0 - E) + b L^2 near (E0, L = 0).
struct LocalFrequencyFit {
    double omega_star = 0, a = 0, b = 0;
    double rms = 0;  ///< residual, relative to omega_*
};

LocalFrequencyFit fit_local_model(const SteadyState& ss, const FrequencyMap& fm);

}  // namespace antonov
