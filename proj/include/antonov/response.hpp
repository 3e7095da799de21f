#pragma once
// Spectral analysis of the radial Antonov operator: frequency map and omega_*, essential
// bands, rho_* and the trace bound, the divergence diagnostic, and Birman-Schwinger
// Galerkin eigencurves in a potential-density basis.

#include "antonov/orbits.hpp"

#include <Eigen/Dense>

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace antonov {

/// Replaces omega_r(E, L) by a prescribed function (synthetic experiments).
using FrequencyModel = std::function<double(double E, double L)>;

struct MapOptions {
    std::size_t nE = 24, nL = 24;
    std::size_t chart_samples = 64;
    /// Energy range mapped to s in [0, 1]; defaults to (U0, E0).
    std::optional<std::pair<double, double>> energy_range;
    FrequencyModel model;  ///< empty: use the computed radial frequency
};

/// One (E, L) quadrature node. Integrals over the support read
/// int F d^3x d^3v = sum_nodes weight * int_0^{2 pi} F d theta.
struct MapNode {
    double s = 0, t = 0, E = 0, L = 0;
    double omega = 0;       ///< frequency used by the spectral formulas (model if set)
    double omega_orbit = 0; ///< radial frequency of the actual orbit
    double weight = 0;      ///< w_E w_L 8 pi^2 L / omega_orbit
    double abs_slope = 0;   ///< |phi'(E)|
    double mass = 0;        ///< weight * |phi'| (finite even where |phi'| is singular)
    Orbit orbit;
};

struct FrequencyMap {
    std::size_t nE = 0, nL = 0;
    double E_lo = 0, E_hi = 0;
    std::vector<MapNode> nodes;  ///< E-major: index = iE * nL + iL
    double omega_star = 0;
    double E_star = 0, L_star = 0, s_star = 0, t_star = 0;
    bool on_circular = false;
    std::vector<std::pair<double, double>> argmins;  ///< (E, L) within 1e-8 relative of omega_star
    double omega_min = 0, omega_max = 0;             ///< over nodes, edges and the polish
    FrequencyModel model;

    /// omega at (s, t) in the closed unit square.
    double omega_at_st(const SteadyState& ss, double s, double t) const;
    double omega_at(const SteadyState& ss, double E, double L) const;
};

FrequencyMap build_frequency_map(const SteadyState& ss, const MapOptions& opts = {});

struct Band {
    int k = 0;
    double lo = 0, hi = 0;
};

struct EssentialSpectrum {
    std::vector<Band> bands;                          ///< k^2 [omega_min^2, omega_max^2], k = 1..k_max
    std::vector<std::pair<double, double>> merged;    ///< union of the bands, sorted
    double gap_hi = 0;                                ///< omega_*^2; the gap is (0, gap_hi)
};

EssentialSpectrum essential_bands(const FrequencyMap& fm, int k_max);

struct RhoStarValue {
    double value = 0;
    double refined = 0;
    bool possibly_divergent = false;
};

/// rho_*(r) = int |phi'(E)| omega^2 / (omega^2 - omega_*^2) d^3v, two quadrature orders.
RhoStarValue rho_star(const SteadyState& ss, const FrequencyMap& fm, double r);

struct TraceBound {
    double value = 0;  ///< infinity when divergent
    bool finite = true;
    long predicted_max_modes = 0;  ///< ceil(value) - 1 clamped at 0; -1 means no bound
    double coarse = 0;             ///< value at the coarser quadrature
};

long predicted_max_modes(double trace_bound);

/// int (|phi'| / r) omega^2 / (omega^2 - omega_*^2) d^3x d^3v = 8 pi^2 int int |phi'| G L (int_0^T dt / r) dE dL,
/// on (E, L) panels graded toward the argmin (levels, order 4) and (2 levels, order 6).
/// A disagreement above 5% marks divergence.
TraceBound trace_bound(const SteadyState& ss, const FrequencyMap& fm, int levels = 12);

/// The same integral summed over the map nodes (converges slowly when the argmin is on the boundary).
double trace_bound_nodes(const FrequencyMap& fm);

/// The same integral as 4 pi int rho_*(r) r dr (independent radial route).
double trace_bound_radial(const SteadyState& ss, const FrequencyMap& fm, std::size_t order = 32);

struct DivergenceDiagnostic {
    std::vector<double> delta;
    std::vector<double> partial;  ///< I(delta_m), nondecreasing
    std::string verdict;          ///< "convergent", "divergent trend" or "inconclusive"
    double epsilon = 0;
};

/// I(delta) = integral over {r_+ - r_- > epsilon, omega - omega_* > delta} of |phi'| / (omega - omega_*),
/// on a mesh graded toward the argmin, for delta_m = delta_0 2^-m.
DivergenceDiagnostic divergence_diagnostic(const SteadyState& ss, const FrequencyMap& fm, double epsilon,
                                           int levels = 16, int grading = 24);

struct KphiTraces {
    double kernel = 0;  ///< 8 pi^2 int r int |phi'| v^2 dv dr
    double parts = 0;   ///< 8 pi^2 int r int phi dv dr
};

KphiTraces kphi_trace_check(const SteadyState& ss);

// ---------------------------------------------------------------------------
// Potential-density basis

enum class BasisFamily { legendre, bessel };

/// Radial densities rho_j on (0, R0) with potentials Lambda_j(r) = 4 pi int rho_j r'^2 / max(r, r') dr',
/// orthonormal in the Coulomb product D(rho, sigma) = 4 pi int rho Lambda_sigma r^2 dr.
/// The raw profiles are P_j(2r/R0 - 1) or j0((j+1) pi r / R0), times (1 - r/R0)^edge_exponent.
class PotentialDensityBasis {
public:
    PotentialDensityBasis(double R0, std::size_t J, BasisFamily family, double edge_exponent = 0);

    std::size_t size() const { return J_; }
    double R0() const { return R0_; }
    BasisFamily family() const { return family_; }
    double edge_exponent() const { return edge_; }

    /// Raw (not orthonormalized) profiles.
    void raw_density(double r, double* out) const;
    void raw_potential(double r, double* out) const;
    /// Orthonormalized profiles.
    void density(double r, double* out) const;
    void potential(double r, double* out) const;

    const Eigen::MatrixXd& raw_gram() const { return gram_; }
    /// Raw -> orthonormal coefficients: rho_i = sum_j raw_j T_ji.
    const Eigen::MatrixXd& transform() const { return T_; }
    /// Gram matrix of the orthonormalized basis, recomputed by quadrature.
    Eigen::MatrixXd orthonormal_gram() const;

private:
    void profiles(double r, double* out) const;  ///< without the edge factor
    Eigen::MatrixXd gram(std::size_t order, bool orthonormal) const;

    double R0_;
    std::size_t J_;
    BasisFamily family_;
    double edge_;
    std::vector<double> moment2_;  ///< int_0^R0 rho_j r^2 dr
    Eigen::MatrixXd gram_, T_;
};

/// Coulomb product D(rho, sigma) for radial profiles on (0, R), by the 1/max(r, r') reduction.
double coulomb_product(const std::function<double(double)>& rho, const std::function<double(double)>& sigma,
                       double R, std::size_t order = 64);
/// Self-energy (1/2) D(rho, rho).
double coulomb_self_energy(const std::function<double(double)>& rho, double R, std::size_t order = 64);

// ---------------------------------------------------------------------------
// Response matrix

struct ResponseOptions {
    int k_max = 8;
    std::size_t theta_samples = 128;
    double margin = 1e-9;  ///< relative to omega_*^2
};

/// Per-node Fourier coefficients of the basis potentials along each orbit; independent of lambda.
struct ResponseKernel {
    std::size_t J = 0, nodes = 0;
    int k_max = 0;
    double omega_star = 0, margin = 0;
    std::vector<double> omega, mass;
    std::vector<double> coef;  ///< [node][k-1][i]

    double c(std::size_t node, int k, std::size_t i) const
    {
        return coef[(node * static_cast<std::size_t>(k_max) + static_cast<std::size_t>(k - 1)) * J + i];
    }
};

ResponseKernel prepare_response(const FrequencyMap& fm, const PotentialDensityBasis& basis,
                                const ResponseOptions& opts = {});
ResponseKernel prepare_response_serial(const FrequencyMap& fm, const PotentialDensityBasis& basis,
                                       const ResponseOptions& opts = {});

/// B_ij(lambda) = 8 pi^3 sum_k int int (L / omega) |phi'| k^2 omega^2 / (k^2 omega^2 - lambda) c_ik c_jk dE dL.
/// Throws "inside essential spectrum" for lambda >= omega_*^2 (1 - margin).
Eigen::MatrixXd assemble_response(const ResponseKernel& kernel, double lambda);
/// Single-threaded reference with the same summation order.
Eigen::MatrixXd assemble_response_serial(const ResponseKernel& kernel, double lambda);

/// Per-k traces of B(lambda) (k = 1..k_max), for the Fourier tail estimate.
std::vector<double> response_trace_by_k(const ResponseKernel& kernel, double lambda);

/// Independent dense discretization of K(lambda) over (node, k) pairs, Gram matrix of the
/// per-node response densities in the Coulomb product. Returns eigenvalues, descending.
Eigen::VectorXd dense_response_eigenvalues(const FrequencyMap& fm, double lambda, int k_max,
                                           std::size_t theta_order = 48);

/// lambda_m = omega_*^2 (1 - 2^(-depth m / (P - 1))), m = 0..P-1.
std::vector<double> lambda_grid(double omega_star, std::size_t points, double depth = 20);

struct Eigencurves {
    std::vector<double> lambda;
    std::vector<std::vector<double>> nu;  ///< nu[m][i], descending in i
    std::vector<double> trace;            ///< Tr B(lambda_m)
};

Eigencurves eigencurves(const ResponseKernel& kernel, const std::vector<double>& lambdas, std::size_t top);

struct Mode {
    double lambda = 0;
    double frequency = 0;  ///< sqrt(lambda)
    int curve = 0;  ///< 1-based index of nu_i
    std::vector<double> coefficients;
    double residual = 0;  ///< |nu(lambda) - 1|
    bool at_resolution_limit = false;
};

std::vector<Mode> locate_modes(const ResponseKernel& kernel, const Eigencurves& curves);

/// d omega / dE at (E0, L = 0) by central difference; the sign is reported, not assumed.
double frequency_energy_slope(const SteadyState& ss, const FrequencyMap& fm);

}  // namespace antonov
