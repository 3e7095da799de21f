#include "antonov/orbits.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace antonov {

namespace {

double veff(const SteadyState& ss, double L, double r) { return ss.potential(r) + 0.5 * L * L / (r * r); }

double length_scale(const SteadyState& ss) { return ss.R0() > 0 ? ss.R0() : 1.0; }

// Brackets a sign change of f by geometric growth from x0 (grow > 1) or shrinkage (grow < 1).
template <class F>
std::pair<double, double> bracket_geometric(const F& f, double x0, double grow, bool want_positive,
                                            const char* err)
{
    double prev = x0, x = x0;
    for (int k = 0; k < 2100; ++k) {
        const double v = f(x);
        if (std::isfinite(v) && ((v > 0) == want_positive)) return {std::min(prev, x), std::max(prev, x)};
        prev = x;
        x *= grow;
        if (!(x > 0) || !std::isfinite(x)) break;
    }
    throw NumericalError(err);
}

// 2 (E - V(r)) and dr/du along the orbit parameter u, with Taylor expansions at the turning points.
struct Speed {
    const SteadyState& ss;
    double E, L, rm, rp, delta;
    double dVm = 0, d2Vm = 0, dVp = 0, d2Vp = 0;

    Speed(const SteadyState& s, double E_, double L_, double rm_, double rp_)
        : ss(s), E(E_), L(L_), rm(rm_), rp(rp_), delta(rp_ - rm_)
    {
        auto derivs = [&](double r, double& d1, double& d2) {
            double U, dU, d2U;
            ss.evaluate(r, U, dU, d2U);
            d1 = dU - L * L / (r * r * r);
            d2 = d2U + 3 * L * L / (r * r * r * r);
        };
        if (L > 0) derivs(rm, dVm, d2Vm);
        derivs(rp, dVp, d2Vp);
    }

    double w_direct(double r) const
    {
        const double w = 2 * (E - (L > 0 ? veff(ss, L, r) : ss.potential(r)));
        if (!(w > 0)) throw NumericalError("turning point inconsistent with the potential");
        return w;
    }

    // dt/du
    double g(double u) const
    {
        const double su = std::sin(u), cu = std::cos(u);
        if (L > 0) {
            const double dm = delta * su * su, dp = delta * cu * cu;
            double w;
            if (dm < 1e-6 * std::min(delta, rm))
                w = -2 * (dVm * dm + 0.5 * d2Vm * dm * dm);
            else if (dp < 1e-6 * std::min(delta, rp))
                w = 2 * (dVp * dp - 0.5 * d2Vp * dp * dp);
            else
                w = w_direct(rm + dm);
            return 2 * delta * su * cu / std::sqrt(w);
        }
        const double h = std::sin(0.5 * (0.5 * M_PI - u));
        const double dp = 2 * rp * h * h;
        const double w = dp < 1e-6 * rp ? 2 * (dVp * dp - 0.5 * d2Vp * dp * dp) : w_direct(rp * su);
        return rp * cu / std::sqrt(w);
    }
};

// Chebyshev series on [-1, 1]: f = sum c_k T_k.
double clenshaw(const std::vector<double>& c, double x)
{
    double b1 = 0, b2 = 0;
    for (std::size_t k = c.size(); k-- > 1;) {
        const double b0 = 2 * x * b1 - b2 + c[k];
        b2 = b1;
        b1 = b0;
    }
    return x * b1 - b2 + c[0];
}

double u_to_x(double u) { return 4 * u / M_PI - 1; }

}  // namespace

double circular_frequency(const SteadyState& ss, double r)
{
    double U, dU, d2U;
    ss.evaluate(r, U, dU, d2U);
    if (r == 0) return 2 * std::sqrt(d2U);
    return std::sqrt(d2U + 3 * dU / r);
}

CircularOrbit circular_orbit(const SteadyState& ss, double L)
{
    if (!(L > 0)) throw std::invalid_argument("circular_orbit needs L > 0");
    auto f = [&](double r) { return r * r * r * ss.force(r) - L * L; };
    const double s = length_scale(ss);
    auto [a, b] = bracket_geometric(f, s, 2.0, true, "no bound circular orbit");
    if (a == b) std::tie(a, b) = bracket_geometric(f, s, 0.5, false, "no bound circular orbit");
    CircularOrbit c;
    c.r_star = numerics::find_root(f, a, b, 1e-15).x;
    c.E_min = veff(ss, L, c.r_star);
    if (!(c.E_min < 0)) throw NumericalError("no bound circular orbit");
    return c;
}

double circular_radius(const SteadyState& ss, double E)
{
    if (!(E > ss.U0() && E < 0)) throw NumericalError("no bound orbits at this energy");
    auto h = [&](double r) {
        double U, dU, d2U;
        ss.evaluate(r, U, dU, d2U);
        return U + 0.5 * r * dU - E;
    };
    const double s = length_scale(ss);
    auto [a, b] = bracket_geometric(h, s, 2.0, true, "no bound orbits at this energy");
    if (a == b) std::tie(a, b) = bracket_geometric(h, s, 0.5, false, "no bound orbits at this energy");
    return numerics::find_root(h, a, b, 1e-15).x;
}

double l_max(const SteadyState& ss, double E)
{
    const double r = circular_radius(ss, E);
    return std::sqrt(r * r * r * ss.force(r));
}

namespace {

struct Turning {
    double rm, rp, r_star = 0, kappa = 0;
    bool near_circular = false;
};

Turning turning_detail(const SteadyState& ss, double E, double L)
{
    if (L < 0) throw std::invalid_argument("negative angular momentum");
    if (!(E < 0)) throw NumericalError("no bound orbits at this energy");
    if (L == 0) {
        if (!(E > ss.U0())) throw NumericalError("below circular energy");
        return {0.0, ss.inverse_potential(E)};
    }
    const CircularOrbit c = circular_orbit(ss, L);
    if (E < c.E_min) {
        if (E < c.E_min - 1e-14 * std::abs(c.E_min)) throw NumericalError("below circular energy");
        E = c.E_min;
    }
    Turning t;
    t.r_star = c.r_star;
    t.kappa = circular_frequency(ss, c.r_star);
    const double half_width = std::sqrt(2 * std::max(0.0, E - c.E_min)) / t.kappa;
    if (2 * half_width < 1e-6 * c.r_star) {
        t.near_circular = true;
        t.rm = c.r_star - half_width;
        t.rp = c.r_star + half_width;
        return t;
    }
    auto f = [&](double r) { return veff(ss, L, r) - E; };
    auto [a, b] = bracket_geometric(f, c.r_star, 0.5, true, "no bound orbits at this energy");
    t.rm = numerics::find_root(f, a, std::min(b, c.r_star), 1e-15).x;
    std::tie(a, b) = bracket_geometric(f, c.r_star, 2.0, true, "no bound orbits at this energy");
    t.rp = numerics::find_root(f, std::max(a, c.r_star), b, 1e-15).x;
    return t;
}

}  // namespace

std::pair<double, double> turning_points(const SteadyState& ss, double E, double L)
{
    const Turning t = turning_detail(ss, E, L);
    return {t.rm, t.rp};
}

Period period(const SteadyState& ss, double E, double L)
{
    const Turning t = turning_detail(ss, E, L);
    Period p;
    p.r_minus = t.rm;
    p.r_plus = t.rp;
    if (t.near_circular) {
        p.omega_r = t.kappa;
        p.T = 2 * M_PI / t.kappa;
        return p;
    }
    if (!(t.rp > 0)) throw NumericalError("degenerate rest orbit");
    const Speed sp(ss, E, L, t.rm, t.rp);
    double prev = 0;
    for (std::size_t order = 64; order <= 2048; order *= 2) {
        p.T = 2 * numerics::integrate_singular([&](double u) { return sp.g(u); }, 0, 0.5 * M_PI,
                                               numerics::Singular::none, order);
        if (order > 64 && std::abs(p.T - prev) <= 1e-13 * p.T) break;
        prev = p.T;
    }
    p.omega_r = 2 * M_PI / p.T;
    return p;
}

double inverse_radius_time(const SteadyState& ss, double E, double L)
{
    if (L == 0) return std::numeric_limits<double>::infinity();
    const Turning t = turning_detail(ss, E, L);
    if (t.near_circular) return 2 * M_PI / (t.kappa * t.r_star);
    const Speed sp(ss, E, L, t.rm, t.rp);
    const double delta = t.rp - t.rm;
    auto f = [&](double u) {
        const double su = std::sin(u);
        return sp.g(u) / (t.rm + delta * su * su);
    };
    // panels halving toward u = 0, where 1/r peaks with width sqrt(r_minus / delta)
    const double width = std::sqrt(t.rm / delta);
    double hi = 0.5 * M_PI, sum = 0;
    while (hi > 0.05 * width && hi > 1e-12) {
        sum += numerics::integrate_singular(f, 0.5 * hi, hi, numerics::Singular::none, 24);
        hi *= 0.5;
    }
    sum += numerics::integrate_singular(f, 0, hi, numerics::Singular::none, 24);
    return 2 * sum;
}

// ---------------------------------------------------------------------------
// Orbit

Orbit angle_chart(const SteadyState& ss, double E, double L, std::size_t samples)
{
    const Turning t = turning_detail(ss, E, L);
    Orbit o;
    o.E = E;
    o.L = L;
    o.r_minus = t.rm;
    o.r_plus = t.rp;
    o.r_star = t.r_star;
    if (t.near_circular) {
        o.near_circular = true;
        o.omega_r = t.kappa;
        o.T = 2 * M_PI / t.kappa;
        return o;
    }
    if (!(t.rp > 0)) throw NumericalError("degenerate rest orbit");
    const Speed sp(ss, E, L, t.rm, t.rp);

    std::size_t n = std::max<std::size_t>(samples, 8);
    std::vector<double> c;
    for (;;) {
        std::vector<double> g(n), table(4 * n);
        for (std::size_t m = 0; m < 4 * n; ++m) table[m] = std::cos(M_PI * m / (2.0 * n));
        for (std::size_t j = 0; j < n; ++j) {
            const double x = table[2 * j + 1];  // cos(pi (j + 1/2) / n)
            g[j] = sp.g(0.25 * M_PI * (x + 1));
        }
        c.assign(n, 0.0);
        for (std::size_t k = 0; k < n; ++k) {
            double s = 0;
            for (std::size_t j = 0; j < n; ++j) s += g[j] * table[(k * (2 * j + 1)) % (4 * n)];
            c[k] = (k == 0 ? 1.0 : 2.0) * s / n;
        }
        double cmax = 0, tail = 0;
        for (std::size_t k = 0; k < n; ++k) cmax = std::max(cmax, std::abs(c[k]));
        for (std::size_t k = n - 4; k < n; ++k) tail = std::max(tail, std::abs(c[k]));
        if (tail <= 1e-11 * cmax || n >= 4096) break;
        n *= 2;
    }
    // integral series, zero at x = -1, scaled by du/dx = pi/4
    std::vector<double> B(n + 1, 0.0);
    auto cc = [&](std::size_t k) { return k < n ? c[k] : 0.0; };
    B[1] = cc(0) - 0.5 * cc(2);
    for (std::size_t k = 2; k <= n; ++k) B[k] = (cc(k - 1) - cc(k + 1)) / (2.0 * k);
    double b0 = 0;
    for (std::size_t k = 1; k <= n; ++k) b0 -= (k % 2 ? -1.0 : 1.0) * B[k];
    B[0] = b0;
    for (double& b : B) b *= 0.25 * M_PI;
    o.g_ = std::move(c);
    o.t_ = std::move(B);
    o.t_total_ = clenshaw(o.t_, 1.0);
    o.T = 2 * o.t_total_;
    o.omega_r = 2 * M_PI / o.T;
    return o;
}

double Orbit::radius_of_u(double u) const
{
    const double su = std::sin(u);
    if (L > 0) return r_minus + (r_plus - r_minus) * su * su;
    return r_plus * su;
}

double Orbit::u_of_radius(double r) const
{
    r = std::clamp(r, r_minus, r_plus);
    if (L > 0) return std::asin(std::sqrt((r - r_minus) / (r_plus - r_minus)));
    return std::asin(r / r_plus);
}

double Orbit::g_of_u(double u) const { return clenshaw(g_, u_to_x(u)); }

double Orbit::time_of_u(double u) const { return clenshaw(t_, u_to_x(u)); }

double Orbit::theta(double r) const
{
    if (near_circular) {
        const double h = 0.5 * (r_plus - r_minus);
        return h > 0 ? std::acos(std::clamp((r - r_star) / h, -1.0, 1.0)) : 0.0;
    }
    return M_PI * (1 - time_of_u(u_of_radius(r)) / t_total_);
}

namespace {
double solve_u(const std::vector<double>& g, const std::vector<double>& t, double target, double guess)
{
    double a = 0, b = 0.5 * M_PI, u = std::clamp(guess, a, b);
    for (int it = 0; it < 100; ++it) {
        const double F = clenshaw(t, u_to_x(u)) - target;
        if (F > 0)
            b = u;
        else
            a = u;
        if (std::abs(F) <= 1e-16 * std::abs(target) || b - a < 1e-16) break;
        const double d = clenshaw(g, u_to_x(u));
        double next = u - F / d;
        if (!(next > a && next < b)) next = 0.5 * (a + b);
        if (std::abs(next - u) < 1e-17) break;
        u = next;
    }
    return u;
}
}  // namespace

double Orbit::radius(double th) const
{
    th = std::clamp(th, 0.0, M_PI);
    if (near_circular) return r_star + 0.5 * (r_plus - r_minus) * std::cos(th);
    if (th == 0) return r_plus;
    if (th == M_PI) return r_minus;
    const double target = t_total_ * (1 - th / M_PI);
    return radius_of_u(solve_u(g_, t_, target, 0.5 * M_PI * (1 - th / M_PI)));
}

std::vector<double> Orbit::theta_grid_radii(std::size_t m) const
{
    std::vector<double> r(m + 1);
    if (near_circular) {
        for (std::size_t j = 0; j <= m; ++j) r[j] = radius(M_PI * j / m);
        return r;
    }
    double u = 0.5 * M_PI;
    r[0] = r_plus;
    r[m] = r_minus;
    for (std::size_t j = 1; j < m; ++j) {
        const double target = t_total_ * (1 - double(j) / m);
        u = solve_u(g_, t_, target, u);
        r[j] = radius_of_u(u);
    }
    return r;
}

double Orbit::average(const std::function<double(double)>& F) const
{
    const auto& q = numerics::cached_legendre(24);
    if (near_circular) {
        double s = 0;
        for (std::size_t i = 0; i < q.order(); ++i) {
            const double th = 0.5 * M_PI * (q.nodes[i] + 1);
            s += q.weights[i] * F(radius(th));
        }
        return 0.5 * s;
    }
    // panels graded toward u = 0, where r_minus / (r_plus - r_minus) sets the scale
    std::vector<double> edges{0.0};
    double step = L > 0 ? std::sqrt(r_minus / (r_plus - r_minus)) : 0.125;
    step = std::clamp(step, 1e-8, 0.125);
    for (double e = step; e < 0.5 * M_PI; e *= 2) edges.push_back(e);
    edges.push_back(0.5 * M_PI);
    double s = 0;
    for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
        const double a = edges[p], h = edges[p + 1] - a;
        for (std::size_t i = 0; i < q.order(); ++i) {
            const double u = a + 0.5 * h * (q.nodes[i] + 1);
            s += 0.5 * h * q.weights[i] * F(radius_of_u(u)) * g_of_u(u);
        }
    }
    return s / t_total_;
}

std::vector<double> cosine_coefficients(const std::vector<double>& f, int k_max)
{
    if (f.size() < 2) throw std::invalid_argument("cosine_coefficients needs at least two samples");
    const std::size_t m = f.size() - 1;
    std::vector<double> c(static_cast<std::size_t>(k_max) + 1);
    for (int k = 0; k <= k_max; ++k) {
        double s = 0.5 * (f[0] + (k % 2 ? -f[m] : f[m]));
        for (std::size_t j = 1; j < m; ++j) s += f[j] * std::cos(M_PI * double(k * j % (2 * m)) / m);
        c[static_cast<std::size_t>(k)] = 2 * s / m;
    }
    return c;
}

std::vector<double> orbit_fourier(const Orbit& orbit, const std::function<double(double)>& f, int k_max,
                                  std::size_t theta_samples)
{
    const auto r = orbit.theta_grid_radii(theta_samples);
    std::vector<double> v(r.size());
    for (std::size_t j = 0; j < r.size(); ++j) v[j] = f(r[j]);
    return cosine_coefficients(v, k_max);
}

}  // namespace antonov
