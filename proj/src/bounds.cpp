#include "antonov/bounds.hpp"

#include "antonov/log.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace antonov {

PolytropeBoundConfig::PolytropeBoundConfig(double n_, double c_, double s_, std::vector<double> r)
    : n(n_), c(c_), s(s_), r_samples(std::move(r))
{
    validate();
}

void PolytropeBoundConfig::validate() const
{
    if (!(n > 0 && n < 3.5)) throw std::invalid_argument("bounds: n must lie in (0, 7/2)");
    if (!(c > 0)) throw std::invalid_argument("bounds: c must be positive");
    if (!(s > 0 && s < std::min(n, 1.0))) throw std::invalid_argument("bounds: s must lie in (0, min(n, 1))");
}

namespace {

bool in_support(const SteadyState& ss, double r, const char* op)
{
    if (r > 0 && r < ss.R0() && ss.E0() > ss.potential(r)) return true;
    std::ostringstream os;
    os << op << ": r = " << r << " outside the support (0, " << ss.R0() << "), returning 0";
    log::warn(os.str());
    return false;
}

// artanh(sqrt(a/(a+1))) / sqrt(a (1+a)), finite at a = 0
double artanh_kernel(double a)
{
    if (a == 0) return 1;
    const double x = std::sqrt(a / (a + 1));
    const double at = x < 0.5 ? std::atanh(x) : std::log1p(x) + 0.5 * std::log1p(a);
    return at / std::sqrt(a * (1 + a));
}

}  // namespace

double rho_tilde_direct(const SteadyState& ss, const PolytropeBoundConfig& cfg, double r)
{
    cfg.validate();
    if (!in_support(ss, r, "rho_tilde_direct")) return 0;
    const double U = ss.potential(r), E0 = ss.E0(), n = cfg.n, c = cfg.c;
    // L = L_r sin(theta): L dL / sqrt(2(E-U) - L^2/r^2) = r L_r sin(theta) d theta
    auto inner = [&](double E) {
        const double d = E0 - E, Lr = r * std::sqrt(2 * (E - U));
        if (!(d > 0) || !(Lr > 0)) return 0.0;
        const double ang = numerics::integrate_adaptive(
            [&](double th) {
                const double sn = std::sin(th);
                return r * Lr * sn / (d + c * Lr * Lr * sn * sn);
            },
            0, 0.5 * M_PI, 1e-13);
        return std::pow(d, n - 1) * ang;
    };
    return 4 * M_PI / (r * r) * numerics::integrate_adaptive(inner, U, E0, 1e-11);
}

double rho_tilde_alpha(const SteadyState& ss, const PolytropeBoundConfig& cfg, double r)
{
    cfg.validate();
    if (!in_support(ss, r, "rho_tilde_alpha")) return 0;
    const double y = ss.E0() - ss.potential(r), n = cfg.n;
    const double beta = 2 * cfg.c * r * r;
    // alpha = beta tan^2(u)
    const double I = numerics::integrate_adaptive(
        [&](double u) {
            const double t = std::tan(u), cu = std::cos(u);
            if (!std::isfinite(t) || cu == 0) return 0.0;
            const double a = beta * t * t;
            const double da = 2 * beta * t / (cu * cu);
            const double q = beta / (beta + a);
            return std::pow(q, n) * std::sqrt(a / (beta + a)) * artanh_kernel(a) * da;
        },
        0, 0.5 * M_PI, 1e-12);
    return 4 * M_PI * std::sqrt(2.0) * std::pow(y, n - 0.5) / beta * I;
}

double alpha_bound_integral(double n)
{
    if (!(n > 0 && n < 1)) throw std::invalid_argument("alpha_bound_integral needs n in (0, 1)");
    // a = tan^2(u)
    return numerics::integrate_adaptive(
        [&](double u) {
            const double t = std::tan(u), cu = std::cos(u);
            const double a = t * t;
            if (!std::isfinite(t) || cu == 0 || !(a > 0)) return 0.0;
            return artanh_kernel(a) / std::pow(a, n) * 2 * t / (cu * cu);
        },
        0, 0.5 * M_PI, 1e-12);
}

std::vector<double> envelope_samples(double R0, int m)
{
    std::vector<double> x;
    for (int j = 1; j <= m; ++j) {
        const double e = std::pow(10.0, -6.0 * j / m);
        x.push_back(e);
        x.push_back(1 - e);
    }
    for (int j = 1; j < m; ++j) x.push_back(double(j) / m);
    std::sort(x.begin(), x.end());
    x.erase(std::unique(x.begin(), x.end()), x.end());
    std::vector<double> r;
    for (double v : x)
        if (v > 0 && v < 1) r.push_back(v * R0);
    return r;
}

EnvelopeCheck envelope_check(const SteadyState& ss, const PolytropeBoundConfig& cfg)
{
    cfg.validate();
    EnvelopeCheck ec;
    if (!ss.has_matter()) return ec;
    const double R0 = ss.R0(), E0 = ss.E0(), n = cfg.n, s = cfg.s;
    auto env = [&](double r) { return std::pow(r, 2 * s - 2) * std::pow(E0 - ss.potential(r), n - 0.5); };

    ec.radii = cfg.r_samples.empty() ? envelope_samples(R0, 16) : cfg.r_samples;
    std::vector<double> refined = envelope_samples(R0, 32);
    refined.insert(refined.end(), ec.radii.begin(), ec.radii.end());
    std::sort(refined.begin(), refined.end());
    refined.erase(std::unique(refined.begin(), refined.end()), refined.end());

    const std::size_t nb = ec.radii.size();
    ec.rho_tilde.assign(nb, 0.0);
    ec.envelope.assign(nb, 0.0);
    ec.ratio.assign(nb, 0.0);
    std::vector<double> ratio_ref(refined.size(), 0.0);
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(nb); ++i) {
        const std::size_t k = static_cast<std::size_t>(i);
        ec.rho_tilde[k] = rho_tilde_alpha(ss, cfg, ec.radii[k]);
        ec.envelope[k] = env(ec.radii[k]);
        ec.ratio[k] = ec.envelope[k] > 0 ? ec.rho_tilde[k] / ec.envelope[k] : 0.0;
    }
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(refined.size()); ++i) {
        const std::size_t k = static_cast<std::size_t>(i);
        const double e = env(refined[k]);
        ratio_ref[k] = e > 0 ? rho_tilde_alpha(ss, cfg, refined[k]) / e : 0.0;
    }
    ec.C_best = nb ? *std::max_element(ec.ratio.begin(), ec.ratio.end()) : 0.0;
    ec.C_refined = ratio_ref.empty() ? 0.0 : *std::max_element(ratio_ref.begin(), ratio_ref.end());
    ec.pass = std::isfinite(ec.C_best) && std::isfinite(ec.C_refined) && ec.C_refined > 0 &&
              std::abs(ec.C_refined - ec.C_best) <= 0.1 * ec.C_refined;
    // r^(2s-1) at 0, (E0 - U)^(n-1/2) ~ (R0 - r)^(n-1/2) at R0
    ec.integral = ec.C_best * numerics::integrate_algebraic(
                                  [&](double r) {
                                      const double y = std::max(E0 - ss.potential(r), 0.0) / (R0 - r);
                                      return std::pow(y, n - 0.5);
                                  },
                                  0, R0, 2 * s - 1, n - 0.5);
    return ec;
}

LocalFrequencyFit fit_local_model(const SteadyState& ss, const FrequencyMap& fm)
{
    LocalFrequencyFit fit;
    fit.omega_star = fm.omega_at_st(ss, 1.0, 0.0);
    const double width = fm.E_hi - fm.E_lo;
    std::vector<std::array<double, 3>> rows;
    for (double ds : {0.005, 0.01, 0.02, 0.04})
        for (double t : {0.0, 0.05, 0.1, 0.2}) {
            const double E = fm.E_hi - ds * width;
            const double L = t * l_max(ss, E);
            rows.push_back({ds * width, L * L, fm.omega_at(ss, E, L) - fit.omega_star});
        }
    Eigen::MatrixXd A(static_cast<Eigen::Index>(rows.size()), 2);
    Eigen::VectorXd y(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        A(static_cast<Eigen::Index>(i), 0) = rows[i][0];
        A(static_cast<Eigen::Index>(i), 1) = rows[i][1];
        y(static_cast<Eigen::Index>(i)) = rows[i][2];
    }
    const Eigen::Vector2d ab = A.colPivHouseholderQr().solve(y);
    fit.a = ab(0);
    fit.b = ab(1);
    fit.rms = std::sqrt((A * ab - y).squaredNorm() / static_cast<double>(rows.size())) / fit.omega_star;
    return fit;
}

}  // namespace antonov
