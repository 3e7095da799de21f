#pragma once
// Radial orbits in a spherical potential: circular orbits, turning points, periods,
// and the angle chart theta in [0, pi] <-> r in [r_plus, r_minus].

#include "antonov/steady_state.hpp"

#include <functional>
#include <utility>
#include <vector>

namespace antonov {

struct CircularOrbit {
    double r_star = 0;
    double E_min = 0;
};

/// r_star solves r^3 U'(r) = L^2; E_min = V_eff(r_star). Throws "no bound circular orbit".
CircularOrbit circular_orbit(const SteadyState& ss, double L);

/// Radius of the circular orbit of energy E: U(r) + r U'(r) / 2 = E.
double circular_radius(const SteadyState& ss, double E);

/// Inverse of L -> E_min(L). Throws "no bound orbits at this energy" outside (U(0), 0).
double l_max(const SteadyState& ss, double E);

/// sqrt(U'' + 3 U'/r): radial frequency of near-circular orbits at radius r.
double circular_frequency(const SteadyState& ss, double r);

/// (r_minus, r_plus). For L = 0 returns (0, U^-1(E)). Throws "below circular energy".
std::pair<double, double> turning_points(const SteadyState& ss, double E, double L);

struct Period {
    double T = 0;
    double omega_r = 0;
    double r_minus = 0, r_plus = 0;
};

/// T = 2 int dr / sqrt(2 (E - V_eff)); circular limit at E = E_min(L).
Period period(const SteadyState& ss, double E, double L);

/// int_0^T dt / r(t) over one radial period; infinite for L = 0.
double inverse_radius_time(const SteadyState& ss, double E, double L);

/// One bound orbit with its angle chart. Uses the parameter u in [0, pi/2] with
/// r = r_minus + (r_plus - r_minus) sin^2 u (L > 0) or r = r_plus sin u (L = 0);
/// g(u) = dt/du is kept as a Chebyshev series, theta(u) = pi (1 - t(u)/t(pi/2)).
class Orbit {
public:
    double E = 0, L = 0;
    double r_minus = 0, r_plus = 0;
    double T = 0, omega_r = 0;
    bool near_circular = false;  ///< harmonic approximation about r_star
    double r_star = 0;

    /// theta(r); theta(r_plus) = 0, theta(r_minus) = pi.
    double theta(double r) const;
    /// Inverse chart r(theta), theta in [0, pi].
    double radius(double theta) const;
    /// Time average (1/T) int F(r(t)) dt over one radial period.
    double average(const std::function<double(double)>& F) const;
    /// r at theta_j = pi j / m, j = 0..m.
    std::vector<double> theta_grid_radii(std::size_t m) const;
    /// Number of Chebyshev terms used for dt/du.
    std::size_t chart_terms() const { return g_.size(); }

private:
    friend Orbit angle_chart(const SteadyState&, double, double, std::size_t);
    double radius_of_u(double u) const;
    double u_of_radius(double r) const;
    double g_of_u(double u) const;        ///< dt/du
    double time_of_u(double u) const;     ///< int_0^u g
    std::vector<double> g_, t_;           ///< Chebyshev series of g and its integral on x = 4u/pi - 1
    double t_total_ = 0;
};

/// Builds the orbit and its chart; the Chebyshev size starts at `samples` and doubles
/// until the series tail is below 1e-11 relative (at most 4096 terms).
Orbit angle_chart(const SteadyState& ss, double E, double L, std::size_t samples = 64);

/// Cosine coefficients c_k = (2/pi) int_0^pi f(r(theta)) cos(k theta) d theta, k = 0..k_max,
/// so that f(r(theta)) = c_0/2 + sum c_k cos(k theta). Trapezoid rule on `theta_samples` intervals.
std::vector<double> orbit_fourier(const Orbit& orbit, const std::function<double(double)>& f,
                                  int k_max, std::size_t theta_samples = 256);

/// Same from samples f_j = f(r(pi j / m)), j = 0..m.
std::vector<double> cosine_coefficients(const std::vector<double>& samples, int k_max);

}  // namespace antonov
