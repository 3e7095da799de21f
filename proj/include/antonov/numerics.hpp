#pragma once
// Shared numerical kernels: fixed-order quadrature with endpoint treatment,
// bracketed roots, the regular-centre radial ODE, and dense symmetric eigensolvers.

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace antonov {

/// Failure inside a numerical kernel; the message names the failing step.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace numerics {

/// Nodes and weights on (-1,1).
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
    std::size_t order() const { return nodes.size(); }
};

/// Gauss-Legendre rule of n nodes (Newton iteration on P_n).
QuadratureRule gauss_legendre(std::size_t n);

/// Gauss-Jacobi rule for the weight (1-x)^alpha (1+x)^beta, alpha,beta > -1 (Golub-Welsch).
QuadratureRule gauss_jacobi(std::size_t n, double alpha, double beta);

/// Process-wide cached rules; the returned references stay valid for the program lifetime.
const QuadratureRule& cached_legendre(std::size_t n);
const QuadratureRule& cached_jacobi(std::size_t n, double alpha, double beta);

inline constexpr std::size_t kDefaultOrder = 64;

/// Which ends of an interval carry an inverse-square-root singularity.
enum class Singular { none, left, right, both };

namespace detail {
[[noreturn]] void throw_not_finite(double x);
[[noreturn]] void throw_empty_interval(double a, double b);
}  // namespace detail

/// Integral of f over (a,b). Singular ends are removed by r = a + (b-a) sin^2(u)
/// (both), r = a + (b-a) s^2 (left) or r = b - (b-a) s^2 (right), then Gauss-Legendre.
template <class F>
double integrate_singular(const F& f, double a, double b, Singular sing,
                          std::size_t order = kDefaultOrder)
{
    if (!(a < b)) detail::throw_empty_interval(a, b);
    const QuadratureRule& q = cached_legendre(order);
    const double h = b - a;
    double sum = 0;
    for (std::size_t i = 0; i < q.order(); ++i) {
        const double x = q.nodes[i];
        double r = 0, jac = 0;
        switch (sing) {
        case Singular::none:
            r = a + 0.5 * h * (x + 1);
            jac = 0.5 * h;
            break;
        case Singular::both: {
            const double u = 0.25 * M_PI * (x + 1);
            const double su = std::sin(u), cu = std::cos(u);
            r = a + h * su * su;
            jac = 0.25 * M_PI * 2 * h * su * cu;
            break;
        }
        case Singular::left: {
            const double s = 0.5 * (x + 1);
            r = a + h * s * s;
            jac = 0.5 * 2 * h * s;
            break;
        }
        case Singular::right: {
            const double s = 0.5 * (x + 1);
            r = b - h * s * s;
            jac = 0.5 * 2 * h * s;
            break;
        }
        }
        const double v = f(r);
        if (!std::isfinite(v)) detail::throw_not_finite(r);
        sum += q.weights[i] * v * jac;
    }
    return sum;
}

/// Integral over (a,b) of (x-a)^left_exp (b-x)^right_exp f(x), by Gauss-Jacobi.
template <class F>
double integrate_algebraic(const F& f, double a, double b, double left_exp, double right_exp,
                           std::size_t order = kDefaultOrder)
{
    if (!(a < b)) detail::throw_empty_interval(a, b);
    const QuadratureRule& q = cached_jacobi(order, right_exp, left_exp);
    const double half = 0.5 * (b - a);
    double sum = 0;
    for (std::size_t i = 0; i < q.order(); ++i) {
        const double x = a + half * (q.nodes[i] + 1);
        const double v = f(x);
        if (!std::isfinite(v)) detail::throw_not_finite(x);
        sum += q.weights[i] * v;
    }
    return sum * std::pow(half, 1 + left_exp + right_exp);
}

/// Adaptive double-exponential quadrature (endpoint singularities, semi-infinite ranges
/// are mapped by the caller). Relative tolerance tol.
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double tol = 1e-12);

/// Quintic Hermite interpolation on [x0, x0+h] from values, first and second derivatives
/// at both ends. Writes value, first and second derivative at x.
inline void hermite5(double x0, double h, double y0, double d0, double s0, double y1, double d1,
                     double s1, double x, double& v, double& dv, double& d2v)
{
    const double t = (x - x0) / h, t2 = t * t, t3 = t2 * t, t4 = t3 * t, t5 = t4 * t;
    const double h0 = 1 - 10 * t3 + 15 * t4 - 6 * t5, h1 = t - 6 * t3 + 8 * t4 - 3 * t5,
                 h2 = 0.5 * (t2 - 3 * t3 + 3 * t4 - t5), h3 = 10 * t3 - 15 * t4 + 6 * t5,
                 h4 = -4 * t3 + 7 * t4 - 3 * t5, h5 = 0.5 * (t3 - 2 * t4 + t5);
    const double g0 = -30 * t2 + 60 * t3 - 30 * t4, g1 = 1 - 18 * t2 + 32 * t3 - 15 * t4,
                 g2 = 0.5 * (2 * t - 9 * t2 + 12 * t3 - 5 * t4), g3 = -g0,
                 g4 = -12 * t2 + 28 * t3 - 15 * t4, g5 = 0.5 * (3 * t2 - 8 * t3 + 5 * t4);
    const double k0 = -60 * t + 180 * t2 - 120 * t3, k1 = -36 * t + 96 * t2 - 60 * t3,
                 k2 = 0.5 * (2 - 18 * t + 36 * t2 - 20 * t3), k3 = -k0,
                 k4 = -24 * t + 84 * t2 - 60 * t3, k5 = 0.5 * (6 * t - 24 * t2 + 20 * t3);
    const double hd0 = h * d0, hd1 = h * d1, hs0 = h * h * s0, hs1 = h * h * s1;
    v = y0 * h0 + hd0 * h1 + hs0 * h2 + y1 * h3 + hd1 * h4 + hs1 * h5;
    dv = (y0 * g0 + hd0 * g1 + hs0 * g2 + y1 * g3 + hd1 * g4 + hs1 * g5) / h;
    d2v = (y0 * k0 + hd0 * k1 + hs0 * k2 + y1 * k3 + hd1 * k4 + hs1 * k5) / (h * h);
}

struct RootResult {
    double x = 0;
    double residual = 0;
    int iterations = 0;
};

/// Bracketed root of f on [lo,hi] (Brent: bisection with secant / inverse-quadratic steps).
/// Stops when |f(x)| <= ftol or the bracket is below tol*max(1,|x|) (or machine resolution).
RootResult find_root(const std::function<double(double)>& f, double lo, double hi, double tol,
                     double ftol = 0);

/// Golden-section minimisation on [lo,hi]; returns the abscissa.
double minimize_golden(const std::function<double(double)>& f, double lo, double hi,
                       double tol = 1e-10);

/// Right-hand side F(r, y) of y'' + (2/r) y' = F(r, y).
using RadialRhs = std::function<double(double r, double y)>;
/// Event function g(r, y, y'); the integration stops where g changes sign from > 0 to <= 0.
using RadialEvent = std::function<double(double r, double y, double yp)>;

struct OdeOptions {
    double rtol = 1e-12;
    double atol = 1e-14;
    double start_fraction = 1e-4;  ///< series start radius relative to the natural length
    double min_step = 1e-14;
};

/// Accepted steps of a regular-centre radial integration with C^2 dense output.
class RadialTrajectory {
public:
    std::vector<double> r, y, yp, ypp;
    std::optional<double> event;  ///< located event radius

    double r_end() const { return r.back(); }
    /// Value and derivative at radius x in [0, r_end] (quintic Hermite on the accepted steps).
    void evaluate(double x, double& value, double& deriv) const;
    double value(double x) const;
};

/// Integrates y'' + (2/r) y' = rhs(r,y) from y(0)=y0 with a series start y0 + rhs(0,y0) r^2/6.
/// Dormand-Prince 5(4) adaptive steps; the event is located by bisection on the dense output.
/// Integration stops at the event or at r_max.
RadialTrajectory integrate_radial_ode(const RadialRhs& rhs, double y0, double yp0, double r_max,
                                      const RadialEvent& stop, const OdeOptions& opts = {});

struct Eigenpairs {
    Eigen::VectorXd values;   ///< descending
    Eigen::MatrixXd vectors;  ///< columns match values; B-orthonormal for generalized problems
};

/// Solves A x = nu B x (or A x = nu x). Throws "degenerate Gram matrix" if B is not positive definite.
Eigenpairs sym_eig(const Eigen::MatrixXd& A, const Eigen::MatrixXd* B = nullptr);

}  // namespace numerics
}  // namespace antonov
