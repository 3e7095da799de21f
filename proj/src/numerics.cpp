#include "antonov/numerics.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <array>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <tuple>

namespace antonov::numerics {

namespace detail {
void throw_not_finite(double x)
{
    std::ostringstream os;
    os << "integrand not finite at x=" << x;
    throw NumericalError(os.str());
}
void throw_empty_interval(double a, double b)
{
    std::ostringstream os;
    os << "empty interval [" << a << ", " << b << "]";
    throw NumericalError(os.str());
}
}  // namespace detail

QuadratureRule gauss_legendre(std::size_t n)
{
    if (n == 0) throw std::invalid_argument("gauss_legendre: zero nodes");
    QuadratureRule q;
    q.nodes.resize(n);
    q.weights.resize(n);
    const std::size_t m = (n + 1) / 2;
    for (std::size_t i = 0; i < m; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1, p1 = x;
            for (std::size_t k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) p0 = 1, p1 = x;
            dp = n * (x * p1 - p0) / (x * x - 1);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        // recompute the derivative at the converged node
        double p0 = 1, p1 = x;
        for (std::size_t k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = (n == 1) ? 1.0 : n * (x * p1 - p0) / (x * x - 1);
        const double w = 2 / ((1 - x * x) * dp * dp);
        q.nodes[i] = -x;
        q.nodes[n - 1 - i] = x;
        q.weights[i] = q.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) q.nodes[n / 2] = 0;
    return q;
}

QuadratureRule gauss_jacobi(std::size_t n, double alpha, double beta)
{
    if (n == 0) throw std::invalid_argument("gauss_jacobi: zero nodes");
    if (!(alpha > -1 && beta > -1)) throw std::invalid_argument("gauss_jacobi: exponents must exceed -1");
    const double ab = alpha + beta;
    Eigen::VectorXd diag(n), off(n > 1 ? n - 1 : 1);
    diag(0) = (beta - alpha) / (ab + 2);
    for (std::size_t k = 1; k < n; ++k) {
        const double s = 2.0 * k + ab;
        diag(k) = (beta * beta - alpha * alpha) / (s * (s + 2));
    }
    for (std::size_t k = 1; k < n; ++k) {
        const double s = 2.0 * k + ab;
        double b2;
        if (k == 1)
            b2 = 4 * (1 + alpha) * (1 + beta) / ((2 + ab) * (2 + ab) * (3 + ab));
        else
            b2 = 4 * k * (k + alpha) * (k + beta) * (k + ab) / (s * s * (s + 1) * (s - 1));
        off(k - 1) = std::sqrt(b2);
    }
    const double mu0 = std::exp((ab + 1) * std::log(2.0) + std::lgamma(alpha + 1) +
                                std::lgamma(beta + 1) - std::lgamma(ab + 2));
    QuadratureRule q;
    q.nodes.resize(n);
    q.weights.resize(n);
    if (n == 1) {
        q.nodes[0] = diag(0);
        q.weights[0] = mu0;
        return q;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, off, Eigen::ComputeEigenvectors);
    for (std::size_t i = 0; i < n; ++i) {
        q.nodes[i] = es.eigenvalues()(i);
        const double v0 = es.eigenvectors()(0, i);
        q.weights[i] = mu0 * v0 * v0;
    }
    return q;
}

namespace {
std::mutex g_rule_mutex;
std::map<std::tuple<std::size_t, double, double>, std::unique_ptr<QuadratureRule>> g_rules;
}  // namespace

const QuadratureRule& cached_jacobi(std::size_t n, double alpha, double beta)
{
    std::lock_guard<std::mutex> lock(g_rule_mutex);
    auto key = std::make_tuple(n, alpha, beta);
    auto it = g_rules.find(key);
    if (it != g_rules.end()) return *it->second;
    auto rule = std::make_unique<QuadratureRule>((alpha == 0 && beta == 0)
                                                     ? gauss_legendre(n)
                                                     : gauss_jacobi(n, alpha, beta));
    const QuadratureRule& ref = *rule;
    g_rules.emplace(key, std::move(rule));
    return ref;
}

const QuadratureRule& cached_legendre(std::size_t n)
{
    // hot path: one slot per small order avoids the lock after first use
    static std::array<std::once_flag, 513> flags;
    static std::array<const QuadratureRule*, 513> slots{};
    if (n < slots.size()) {
        std::call_once(flags[n], [n] { slots[n] = &cached_jacobi(n, 0, 0); });
        return *slots[n];
    }
    return cached_jacobi(n, 0, 0);
}

double integrate_adaptive(const std::function<double(double)>& f, double a, double b, double tol)
{
    if (!(a < b)) detail::throw_empty_interval(a, b);
    boost::math::quadrature::tanh_sinh<double> integrator(15);
    double err = 0, l1 = 0;
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    // on [-1, 1] with the endpoint complement zc, so nodes never round onto a or b
    auto g = [&](double z, double zc) {
        double x;
        if (z < -0.5)
            x = a - half * zc;
        else if (z > 0.5)
            x = b - half * zc;
        else
            x = mid + half * z;
        if (!(x > a && x < b)) return 0.0;
        return f(x);
    };
    const double v = half * integrator.integrate(g, tol, &err, &l1);
    if (!std::isfinite(v)) throw NumericalError("adaptive quadrature: non-finite result");
    return v;
}

RootResult find_root(const std::function<double(double)>& f, double lo, double hi, double tol,
                     double ftol)
{
    if (!(tol > 0)) throw std::invalid_argument("find_root: tol must be positive");
    double a = lo, b = hi, fa = f(a), fb = f(b);
    RootResult res;
    if (fa == 0) return {a, 0, 0};
    if (fb == 0) return {b, 0, 0};
    if ((fa > 0) == (fb > 0)) {
        std::ostringstream os;
        os << "not bracketed: f(" << lo << ")=" << fa << ", f(" << hi << ")=" << fb;
        throw NumericalError(os.str());
    }
    double c = a, fc = fa, d = b - a, e = d;
    const double eps = std::numeric_limits<double>::epsilon();
    for (int it = 1; it <= 300; ++it) {
        if ((fb > 0) == (fc > 0)) {
            c = a;
            fc = fa;
            d = e = b - a;
        }
        if (std::abs(fc) < std::abs(fb)) {
            a = b; b = c; c = a;
            fa = fb; fb = fc; fc = fa;
        }
        const double tol1 = 2 * eps * std::abs(b) + 0.5 * tol * std::max(1.0, std::abs(b));
        const double xm = 0.5 * (c - b);
        if (std::abs(xm) <= tol1 || std::abs(fb) <= ftol || fb == 0) {
            res = {b, fb, it};
            return res;
        }
        if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
            double p, q, r;
            const double s = fb / fa;
            if (a == c) {
                p = 2 * xm * s;
                q = 1 - s;
            } else {
                q = fa / fc;
                r = fb / fc;
                p = s * (2 * xm * q * (q - r) - (b - a) * (r - 1));
                q = (q - 1) * (r - 1) * (s - 1);
            }
            if (p > 0) q = -q;
            p = std::abs(p);
            if (2 * p < std::min(3 * xm * q - std::abs(tol1 * q), std::abs(e * q))) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += (std::abs(d) > tol1) ? d : (xm > 0 ? tol1 : -tol1);
        fb = f(b);
    }
    return {b, fb, 300};
}

double minimize_golden(const std::function<double(double)>& f, double lo, double hi, double tol)
{
    const double g = 0.5 * (std::sqrt(5.0) - 1);
    double a = lo, b = hi;
    double x1 = b - g * (b - a), x2 = a + g * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > tol * std::max(1.0, std::abs(a) + std::abs(b))) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2);
        }
    }
    // endpoints are candidates too (closed interval)
    double best = 0.5 * (a + b), fbest = f(best);
    for (double x : {lo, hi}) {
        const double fx = f(x);
        if (fx < fbest) best = x, fbest = fx;
    }
    return best;
}

// ---------------------------------------------------------------------------
// radial ODE

void RadialTrajectory::evaluate(double x, double& value, double& deriv) const
{
    if (x <= r.front()) {
        value = y.front();
        deriv = yp.front();
        return;
    }
    if (x >= r.back()) {
        value = y.back();
        deriv = yp.back();
        return;
    }
    const auto it = std::upper_bound(r.begin(), r.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - r.begin()) - 1;
    double d2;
    hermite5(r[i], r[i + 1] - r[i], y[i], yp[i], ypp[i], y[i + 1], yp[i + 1], ypp[i + 1], x, value,
             deriv, d2);
}

double RadialTrajectory::value(double x) const
{
    double v, d;
    evaluate(x, v, d);
    return v;
}

namespace {

struct State {
    double y, p;
};

// Dormand-Prince 5(4) tableau
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

}  // namespace

RadialTrajectory integrate_radial_ode(const RadialRhs& rhs, double y0, double yp0, double r_max,
                                      const RadialEvent& stop, const OdeOptions& opts)
{
    if (yp0 != 0)
        throw std::invalid_argument("integrate_radial_ode: a regular centre requires y'(0) = 0");
    if (!(r_max > 0)) throw std::invalid_argument("integrate_radial_ode: r_max must be positive");

    auto deriv = [&](double r, const State& s) {
        const double F = rhs(r, s.y);
        if (!std::isfinite(F)) throw NumericalError("stiff or singular RHS: non-finite value");
        return State{s.p, F - 2 * s.p / r};
    };

    const double F0 = rhs(0.0, y0);
    if (!std::isfinite(F0)) throw NumericalError("stiff or singular RHS: non-finite value at r=0");
    const double natural = (F0 != 0 && y0 != 0) ? std::sqrt(std::abs(y0 / F0)) : r_max;
    const double rs = std::min(opts.start_fraction * natural, 0.5 * r_max);

    RadialTrajectory tr;
    tr.r.push_back(0);
    tr.y.push_back(y0);
    tr.yp.push_back(0);
    tr.ypp.push_back(F0 / 3);

    State s{y0 + F0 * rs * rs / 6, F0 * rs / 3};
    double r = rs;
    auto push = [&](double rr, const State& st) {
        tr.r.push_back(rr);
        tr.y.push_back(st.y);
        tr.yp.push_back(st.p);
        tr.ypp.push_back(rhs(rr, st.y) - 2 * st.p / rr);
    };
    push(r, s);

    auto event_value = [&](std::size_t i) { return stop ? stop(tr.r[i], tr.y[i], tr.yp[i]) : 1.0; };
    double g_prev = event_value(tr.r.size() - 1);
    if (stop && g_prev <= 0) {
        tr.event = r;
        return tr;
    }

    double h = rs;
    State k1 = deriv(r, s);
    while (r < r_max) {
        if (r + h > r_max) h = r_max - r;
        if (h < opts.min_step * std::max(1.0, r)) throw NumericalError("stiff or singular RHS: step underflow");
        auto add = [&](const State& base, std::initializer_list<std::pair<double, const State*>> terms) {
            State out = base;
            for (auto& [c, k] : terms) {
                out.y += h * c * k->y;
                out.p += h * c * k->p;
            }
            return out;
        };
        const State k2 = deriv(r + c2 * h, add(s, {{a21, &k1}}));
        const State k3 = deriv(r + c3 * h, add(s, {{a31, &k1}, {a32, &k2}}));
        const State k4 = deriv(r + c4 * h, add(s, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
        const State k5 = deriv(r + c5 * h, add(s, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
        const State k6 =
            deriv(r + h, add(s, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
        const State sn = add(s, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
        const State k7 = deriv(r + h, sn);
        const double ey = h * (e1 * k1.y + e3 * k3.y + e4 * k4.y + e5 * k5.y + e6 * k6.y + e7 * k7.y);
        const double ep = h * (e1 * k1.p + e3 * k3.p + e4 * k4.p + e5 * k5.p + e6 * k6.p + e7 * k7.p);
        const double sy = opts.atol + opts.rtol * std::max(std::abs(s.y), std::abs(sn.y));
        const double sp = opts.atol + opts.rtol * std::max(std::abs(s.p), std::abs(sn.p));
        const double err = std::sqrt(0.5 * ((ey / sy) * (ey / sy) + (ep / sp) * (ep / sp)));
        if (err <= 1) {
            r += h;
            s = sn;
            k1 = k7;
            push(r, s);
            if (stop) {
                const double g = event_value(tr.r.size() - 1);
                if (g <= 0 && g_prev > 0) {
                    const std::size_t i = tr.r.size() - 2;
                    double lo = tr.r[i], hi = tr.r[i + 1];
                    for (int it = 0; it < 200 && hi - lo > 4 * std::numeric_limits<double>::epsilon() * hi; ++it) {
                        const double mid = 0.5 * (lo + hi);
                        double v, d;
                        tr.evaluate(mid, v, d);
                        if (stop(mid, v, d) > 0) lo = mid; else hi = mid;
                    }
                    double v, d;
                    tr.evaluate(hi, v, d);
                    tr.r.pop_back(); tr.y.pop_back(); tr.yp.pop_back(); tr.ypp.pop_back();
                    if (hi > tr.r.back()) push(hi, State{v, d});
                    tr.event = hi;
                    return tr;
                }
                g_prev = g;
            }
        }
        const double fac = err == 0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
        h *= fac;
    }
    return tr;
}

// ---------------------------------------------------------------------------

Eigenpairs sym_eig(const Eigen::MatrixXd& A, const Eigen::MatrixXd* B)
{
    if (A.rows() != A.cols()) throw std::invalid_argument("sym_eig: matrix not square");
    const double scale = std::max(A.norm(), std::numeric_limits<double>::min());
    if ((A - A.transpose()).norm() > 1e-10 * scale) throw NumericalError("sym_eig: matrix not symmetric");
    const Eigen::MatrixXd As = 0.5 * (A + A.transpose());
    Eigenpairs out;
    Eigen::MatrixXd vecs;
    Eigen::VectorXd vals;
    if (B == nullptr) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(As);
        vals = es.eigenvalues();
        vecs = es.eigenvectors();
    } else {
        if (B->rows() != A.rows() || B->cols() != A.cols()) throw std::invalid_argument("sym_eig: size mismatch");
        Eigen::LLT<Eigen::MatrixXd> llt(0.5 * (*B + B->transpose()));
        if (llt.info() != Eigen::Success) throw NumericalError("degenerate Gram matrix");
        const Eigen::MatrixXd Lm = llt.matrixL();
        for (Eigen::Index i = 0; i < Lm.rows(); ++i)
            if (!(Lm(i, i) > 0)) throw NumericalError("degenerate Gram matrix");
        const Eigen::MatrixXd Linv_A = llt.matrixL().solve(As);
        const Eigen::MatrixXd C = llt.matrixL().solve(Linv_A.transpose());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (C + C.transpose()));
        vals = es.eigenvalues();
        vecs = llt.matrixU().solve(es.eigenvectors());
    }
    const Eigen::Index n = vals.size();
    out.values.resize(n);
    out.vectors.resize(A.rows(), n);
    for (Eigen::Index i = 0; i < n; ++i) {
        out.values(i) = vals(n - 1 - i);
        out.vectors.col(i) = vecs.col(n - 1 - i);
    }
    return out;
}

}  // namespace antonov::numerics
