#pragma once
// Isotropic equilibria f0 = phi(E): the distribution function, optional external
// potential, the self-consistent radial potential and its validation.

#include "antonov/numerics.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace antonov {

/// phi(E) described in the depth variable eps = E0 - E >= 0, so the cutoff E0 can be an
/// output of the equilibrium solve. phi vanishes for eps <= 0.
class DistributionFunction {
public:
    enum class Kind { polytrope, tabulated };

    /// amplitude * (E0 - E)_+^n with n in (0, 7/2).
    static DistributionFunction polytrope(double n, double amplitude, double E0 = 0);
    /// Density profile of Lane-Emden index m (Phi ~ depth^m); exponent n = m - 3/2 > -1.
    /// Only the density is meaningful for n <= 0; phi' is then not integrable.
    static DistributionFunction lane_emden(double index, double amplitude, double E0 = 0);
    /// Cubic Hermite table in depth: phi(eps_i) and d phi / d eps (= -phi'(E)).
    /// endpoint_exponent p declares phi ~ eps^p near the cutoff (1 for a regular edge).
    static DistributionFunction tabulated(std::vector<double> depth, std::vector<double> value,
                                          std::vector<double> slope, double endpoint_exponent = 1,
                                          double E0 = 0);
    /// phi == 0: the state is an external potential only.
    static DistributionFunction empty();

    Kind kind() const { return kind_; }
    double exponent() const { return n_; }
    double amplitude() const { return amplitude_; }
    double E0() const { return E0_; }
    bool is_empty() const { return amplitude_ == 0; }

    DistributionFunction with_cutoff(double E0) const;
    DistributionFunction scaled(double factor) const;

    /// phi as a function of depth.
    double of_depth(double eps) const;
    /// |phi'(E)| as a function of depth.
    double abs_slope_of_depth(double eps) const;
    /// |phi'| / eps^(p-1) with p the endpoint exponent: finite on the closed support.
    double regular_slope_of_depth(double eps) const;
    /// phi / eps^p.
    double regular_value_of_depth(double eps) const;

    double phi(double E) const { return of_depth(E0_ - E); }
    /// d phi / dE (negative on the support).
    double phi_prime(double E) const { return -abs_slope_of_depth(E0_ - E); }

    /// Mass density at potential depth y = E0 - u: int phi(v^2/2 + u) d^3v.
    double density_of_depth(double y) const;

    const std::vector<double>& table_depth() const { return depth_; }
    const std::vector<double>& table_slope() const { return slope_; }

private:
    Kind kind_ = Kind::polytrope;
    double n_ = 1;
    double amplitude_ = 0;
    double E0_ = 0;
    std::vector<double> depth_, value_, slope_;
};

/// Velocity-space constant of the polytrope: Phi(u) = amplitude * c_n (E0-u)^(n+3/2),
/// c_n = 2^(3/2) pi^(3/2) Gamma(n+1) / Gamma(n+5/2).
double polytrope_density_constant(double n);

/// Phi(u) = int phi(v^2/2 + u) d^3v. Throws "table underresolved" if a table does not cover [u, E0].
double phi_profile(const DistributionFunction& df, double u);

/// Radial external potential as three closures; rho = Laplacian(U) / (4 pi).
struct ExternalPotential {
    std::string name;
    std::function<double(double)> U, dU, rho;
    double d2U(double r) const;
};

namespace external {
ExternalPotential plummer(double mass, double scale);
ExternalPotential isochrone(double mass, double scale);
/// Point mass; U(0) = -infinity. Test oracle only.
ExternalPotential kepler(double mass);
/// omega0^2 r^2 / 2 - depth; does not vanish at infinity. Test oracle only.
ExternalPotential harmonic(double omega0, double depth);
}  // namespace external

struct ExternalCheck {
    bool ok = true;
    double max_slope_error = 0;      ///< relative, dU vs central difference of U
    double max_laplacian_error = 0;  ///< relative, rho vs Laplacian of U
    std::vector<std::string> issues;
};

/// Spot-checks consistency and the sign/monotonicity hypotheses at 16 radii spread
/// geometrically over [1e-2, 1e2] * length_scale.
ExternalCheck check_external(const ExternalPotential& ext, double length_scale);

struct StateSample {
    double U = 0, dU = 0, rho0 = 0;
};

struct SolveOptions {
    std::size_t radial_nodes = 2000;
    numerics::OdeOptions ode{};
};

/// The equilibrium: total potential U = U_self + U_ext tabulated on (0, R0] with the exterior
/// continued analytically. Immutable after construction.
class SteadyState {
public:
    /// A state with no matter: U = U_ext. Used for analytic orbit oracles.
    static SteadyState from_potential(ExternalPotential ext);

    double E0() const { return E0_; }
    double R0() const { return R0_; }
    double U0() const { return U0_; }
    double mass() const { return M_; }
    double central_depth() const { return E0_ - U0_; }
    const DistributionFunction& df() const { return df_; }
    const std::optional<ExternalPotential>& external() const { return ext_; }
    bool has_matter() const { return !df_.is_empty(); }

    const std::vector<double>& grid() const { return r_; }
    const std::vector<double>& grid_U() const { return U_; }
    const std::vector<double>& grid_dU() const { return dU_; }
    const std::vector<double>& grid_rho() const { return rho_; }

    double potential(double r) const;
    double force(double r) const;      ///< U'(r)
    double curvature(double r) const;  ///< U''(r)
    double density(double r) const;    ///< rho0(r)
    /// Ext density rho_ext(r) (0 without an external potential).
    double external_density(double r) const;

    /// U, U', U'' at once.
    void evaluate(double r, double& U, double& dU, double& d2U) const;

    /// The radius where U(r) = E, for U0 < E < sup U.
    double inverse_potential(double E) const;

    /// Same potential, different phi (frozen-potential experiments). Not self-consistent.
    SteadyState with_df(const DistributionFunction& df) const;

private:
    friend SteadyState solve_equilibrium(const DistributionFunction&, const ExternalPotential*,
                                         double, const SolveOptions&);
    DistributionFunction df_ = DistributionFunction::empty();
    std::optional<ExternalPotential> ext_;
    double E0_ = 0, R0_ = 0, U0_ = 0, M_ = 0;
    std::vector<double> r_, U_, dU_, d2U_, rho_;
};

/// Integrates y'' + (2/r) y' = -4 pi Phi(E0 - y) - 4 pi rho_ext from y(0) = y_central, y'(0) = 0
/// to the first zero R0 of y; then M = -R0^2 (y'(R0) + U_ext'(R0)), E0 = -M/R0 + U_ext(R0).
SteadyState solve_equilibrium(const DistributionFunction& df, const ExternalPotential* ext,
                              double y_central, const SolveOptions& opts = {});

/// Interpolated interior, analytic exterior. Throws on r < 0.
StateSample eval_state(const SteadyState& ss, double r);

struct ValidationReport {
    bool phi_prime_negative = true;
    bool r2U_nondecreasing = true;  ///< enclosed mass r^2 U'(r) never decreases
    bool exponent_in_range = true;
    double integral_by_energy = 0;   ///< (4pi)^2 int |phi'| int r^2 sqrt(2(E-U)) dr dE
    double integral_by_density = 0;  ///< 4pi int rho_|phi'| r^2 dr
    double relative_difference = 0;
    bool integrable = true;
    std::vector<std::string> violations;
};

ValidationReport validate_assumptions(const SteadyState& ss);

/// rho_|phi'|(r) = int |phi'(E(r,v))| d^3v.
double slope_density(const SteadyState& ss, double r);

}  // namespace antonov
