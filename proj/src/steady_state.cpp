#include "antonov/steady_state.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace antonov {

namespace {
constexpr double kFourPi = 4 * M_PI;
}  // namespace

// ---------------------------------------------------------------------------
// DistributionFunction

DistributionFunction DistributionFunction::polytrope(double n, double amplitude, double E0)
{
    if (!(n > 0 && n < 3.5)) throw std::invalid_argument("polytrope exponent must lie in (0, 7/2)");
    if (!(amplitude > 0)) throw std::invalid_argument("polytrope amplitude must be positive");
    DistributionFunction df;
    df.kind_ = Kind::polytrope;
    df.n_ = n;
    df.amplitude_ = amplitude;
    df.E0_ = E0;
    return df;
}

DistributionFunction DistributionFunction::lane_emden(double index, double amplitude, double E0)
{
    if (!(index > 0.5)) throw std::invalid_argument("Lane-Emden index must exceed 1/2");
    if (!(amplitude > 0)) throw std::invalid_argument("amplitude must be positive");
    DistributionFunction df;
    df.kind_ = Kind::polytrope;
    df.n_ = index - 1.5;
    df.amplitude_ = amplitude;
    df.E0_ = E0;
    return df;
}

DistributionFunction DistributionFunction::tabulated(std::vector<double> depth,
                                                     std::vector<double> value,
                                                     std::vector<double> slope,
                                                     double endpoint_exponent, double E0)
{
    if (depth.size() < 2 || depth.size() != value.size() || depth.size() != slope.size())
        throw std::invalid_argument("tabulated phi: inconsistent table sizes");
    if (depth.front() != 0) throw std::invalid_argument("tabulated phi: table must start at depth 0");
    for (std::size_t i = 1; i < depth.size(); ++i)
        if (!(depth[i] > depth[i - 1])) throw std::invalid_argument("tabulated phi: depths must increase");
    if (!(endpoint_exponent > 0)) throw std::invalid_argument("tabulated phi: endpoint exponent must be positive");
    DistributionFunction df;
    df.kind_ = Kind::tabulated;
    df.n_ = endpoint_exponent;
    df.amplitude_ = 1;
    df.E0_ = E0;
    df.depth_ = std::move(depth);
    df.value_ = std::move(value);
    df.slope_ = std::move(slope);
    return df;
}

DistributionFunction DistributionFunction::empty()
{
    DistributionFunction df;
    df.amplitude_ = 0;
    return df;
}

DistributionFunction DistributionFunction::with_cutoff(double E0) const
{
    DistributionFunction df = *this;
    df.E0_ = E0;
    return df;
}

DistributionFunction DistributionFunction::scaled(double factor) const
{
    DistributionFunction df = *this;
    if (kind_ == Kind::polytrope) {
        df.amplitude_ *= factor;
    } else {
        for (double& v : df.value_) v *= factor;
        for (double& s : df.slope_) s *= factor;
    }
    return df;
}

namespace {
// cubic Hermite on the depth table: value and derivative
void table_eval(const std::vector<double>& x, const std::vector<double>& f,
                const std::vector<double>& d, double t, double& v, double& dv)
{
    if (t > x.back() * (1 + 1e-12)) {
        std::ostringstream os;
        os << "table underresolved: depth " << t << " beyond table end " << x.back();
        throw NumericalError(os.str());
    }
    t = std::min(t, x.back());
    auto it = std::upper_bound(x.begin(), x.end(), t);
    std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(it - x.begin()), x.size() - 1) - 1;
    const double h = x[i + 1] - x[i], s = (t - x[i]) / h;
    const double s2 = s * s, s3 = s2 * s;
    v = (2 * s3 - 3 * s2 + 1) * f[i] + (s3 - 2 * s2 + s) * h * d[i] + (-2 * s3 + 3 * s2) * f[i + 1] +
        (s3 - s2) * h * d[i + 1];
    dv = ((6 * s2 - 6 * s) * f[i] + (-6 * s2 + 6 * s) * f[i + 1]) / h + (3 * s2 - 4 * s + 1) * d[i] +
         (3 * s2 - 2 * s) * d[i + 1];
}
}  // namespace

double DistributionFunction::of_depth(double eps) const
{
    if (eps <= 0 || amplitude_ == 0) return 0;
    if (kind_ == Kind::polytrope) return amplitude_ * std::pow(eps, n_);
    double v, dv;
    table_eval(depth_, value_, slope_, eps, v, dv);
    return v;
}

double DistributionFunction::abs_slope_of_depth(double eps) const
{
    if (eps <= 0 || amplitude_ == 0) return 0;
    if (kind_ == Kind::polytrope) return amplitude_ * n_ * std::pow(eps, n_ - 1);
    double v, dv;
    table_eval(depth_, value_, slope_, eps, v, dv);
    return dv;
}

double DistributionFunction::regular_slope_of_depth(double eps) const
{
    if (amplitude_ == 0) return 0;
    if (kind_ == Kind::polytrope) return eps < 0 ? 0 : amplitude_ * n_;
    if (eps <= 0) eps = 0;
    double v, dv;
    table_eval(depth_, value_, slope_, eps, v, dv);
    return n_ == 1 ? dv : dv / std::pow(std::max(eps, 1e-300), n_ - 1);
}

double DistributionFunction::regular_value_of_depth(double eps) const
{
    if (amplitude_ == 0 || eps < 0) return 0;
    if (kind_ == Kind::polytrope) return amplitude_;
    if (eps == 0) return n_ == 1 ? slope_.front() : 0;
    double v, dv;
    table_eval(depth_, value_, slope_, eps, v, dv);
    return v / std::pow(eps, n_);
}

double polytrope_density_constant(double n)
{
    return std::pow(2 * M_PI, 1.5) * std::exp(std::lgamma(n + 1) - std::lgamma(n + 2.5));
}

double DistributionFunction::density_of_depth(double y) const
{
    if (y <= 0 || amplitude_ == 0) return 0;
    if (kind_ == Kind::polytrope) return amplitude_ * polytrope_density_constant(n_) * std::pow(y, n_ + 1.5);
    if (y > depth_.back() * (1 + 1e-12)) {
        std::ostringstream os;
        os << "table underresolved: depth " << y << " beyond table end " << depth_.back();
        throw NumericalError(os.str());
    }
    // 4 pi int_0^y phi(eps) sqrt(2 (y - eps)) d eps
    return kFourPi * std::sqrt(2.0) *
           numerics::integrate_algebraic([this](double e) { return regular_value_of_depth(e); }, 0, y,
                                         n_, 0.5);
}

double phi_profile(const DistributionFunction& df, double u) { return df.density_of_depth(df.E0() - u); }

// ---------------------------------------------------------------------------
// External potentials

double ExternalPotential::d2U(double r) const
{
    if (r == 0) return kFourPi * rho(0) / 3;
    return kFourPi * rho(r) - 2 * dU(r) / r;
}

namespace external {

ExternalPotential plummer(double mass, double b)
{
    ExternalPotential e;
    e.name = "plummer";
    e.U = [=](double r) { return -mass / std::sqrt(r * r + b * b); };
    e.dU = [=](double r) { return mass * r / std::pow(r * r + b * b, 1.5); };
    e.rho = [=](double r) { return 3 * mass * b * b / (kFourPi * std::pow(r * r + b * b, 2.5)); };
    return e;
}

ExternalPotential isochrone(double mass, double b)
{
    ExternalPotential e;
    e.name = "isochrone";
    e.U = [=](double r) { return -mass / (b + std::sqrt(b * b + r * r)); };
    e.dU = [=](double r) {
        const double a = std::sqrt(b * b + r * r);
        return mass * r / (a * (b + a) * (b + a));
    };
    e.rho = [=](double r) {
        const double a = std::sqrt(b * b + r * r);
        return mass * (3 * (b + a) * a * a - r * r * (b + 3 * a)) / (kFourPi * std::pow(b + a, 3) * a * a * a);
    };
    return e;
}

ExternalPotential kepler(double mass)
{
    ExternalPotential e;
    e.name = "kepler";
    e.U = [=](double r) { return -mass / r; };
    e.dU = [=](double r) { return mass / (r * r); };
    e.rho = [](double) { return 0.0; };
    return e;
}

ExternalPotential harmonic(double omega0, double depth)
{
    ExternalPotential e;
    e.name = "harmonic";
    const double w2 = omega0 * omega0;
    e.U = [=](double r) { return 0.5 * w2 * r * r - depth; };
    e.dU = [=](double r) { return w2 * r; };
    e.rho = [=](double) { return 3 * w2 / kFourPi; };
    return e;
}

}  // namespace external

ExternalCheck check_external(const ExternalPotential& ext, double L)
{
    ExternalCheck out;
    auto issue = [&](const std::string& s) {
        out.ok = false;
        if (std::find(out.issues.begin(), out.issues.end(), s) == out.issues.end()) out.issues.push_back(s);
    };
    for (int i = 0; i < 16; ++i) {
        const double r = L * std::pow(10.0, -2 + 4.0 * i / 15);
        const double h = 1e-4 * r;
        const double U = ext.U(r), dU = ext.dU(r), rho = ext.rho(r);
        if (U > 0) issue("U_ext positive");
        if (dU < 0) issue("U_ext decreasing");
        if (rho < 0) issue("U_ext not subharmonic");
        const double fd = (ext.U(r + h) - ext.U(r - h)) / (2 * h);
        const double es = std::abs(fd - dU) / std::max(std::abs(dU), 1e-12 * std::abs(U) / r);
        const double lap = (ext.dU(r + h) - ext.dU(r - h)) / (2 * h) + 2 * dU / r;
        const double el = std::abs(lap - kFourPi * rho) / std::max(kFourPi * rho, 2 * std::abs(dU) / r);
        out.max_slope_error = std::max(out.max_slope_error, es);
        out.max_laplacian_error = std::max(out.max_laplacian_error, el);
    }
    if (out.max_slope_error > 1e-5) issue("dU_ext inconsistent with U_ext");
    if (out.max_laplacian_error > 1e-5) issue("rho_ext inconsistent with the Laplacian of U_ext");
    if (std::abs(ext.U(1e6 * L)) > 1e-3 * std::abs(ext.U(L))) issue("U_ext does not vanish at infinity");
    return out;
}

// ---------------------------------------------------------------------------
// SteadyState

SteadyState SteadyState::from_potential(ExternalPotential ext)
{
    SteadyState ss;
    ss.U0_ = ext.U(0);
    ss.ext_ = std::move(ext);
    return ss;
}

SteadyState SteadyState::with_df(const DistributionFunction& df) const
{
    SteadyState ss = *this;
    ss.df_ = df.with_cutoff(E0_);
    for (std::size_t i = 0; i < ss.r_.size(); ++i) ss.rho_[i] = ss.df_.density_of_depth(E0_ - ss.U_[i]);
    return ss;
}

double SteadyState::external_density(double r) const { return ext_ ? ext_->rho(r) : 0.0; }

void SteadyState::evaluate(double r, double& U, double& dU, double& d2U) const
{
    if (r < 0) throw std::invalid_argument("negative radius");
    if (r_.empty() || r > R0_) {
        U = ext_ ? ext_->U(r) : 0.0;
        dU = ext_ ? ext_->dU(r) : 0.0;
        d2U = ext_ ? ext_->d2U(r) : 0.0;
        if (M_ != 0) {
            U -= M_ / r;
            dU += M_ / (r * r);
            d2U -= 2 * M_ / (r * r * r);
        }
        return;
    }
    const std::size_t n = r_.size();
    // cosine grid: invert the node map, then correct by one
    std::size_t i = static_cast<std::size_t>(std::acos(std::clamp(1 - 2 * r / R0_, -1.0, 1.0)) / M_PI * (n - 1));
    i = std::min(i, n - 2);
    while (i > 0 && r_[i] > r) --i;
    while (i + 2 < n && r_[i + 1] < r) ++i;
    numerics::hermite5(r_[i], r_[i + 1] - r_[i], U_[i], dU_[i], d2U_[i], U_[i + 1], dU_[i + 1], d2U_[i + 1], r, U,
                       dU, d2U);
}

double SteadyState::potential(double r) const
{
    double U, d, d2;
    evaluate(r, U, d, d2);
    return U;
}

double SteadyState::force(double r) const
{
    double U, d, d2;
    evaluate(r, U, d, d2);
    return d;
}

double SteadyState::curvature(double r) const
{
    double U, d, d2;
    evaluate(r, U, d, d2);
    return d2;
}

double SteadyState::density(double r) const
{
    if (r < 0) throw std::invalid_argument("negative radius");
    if (r_.empty() || r >= R0_) return 0;
    return df_.density_of_depth(E0_ - potential(r));
}

double SteadyState::inverse_potential(double E) const
{
    auto f = [this, E](double r) { return potential(r) - E; };
    if (!r_.empty()) {
        if (E <= U0_) return 0;
        if (E <= E0_) {
            auto it = std::lower_bound(U_.begin(), U_.end(), E);
            const std::size_t i = static_cast<std::size_t>(it - U_.begin());
            if (i == 0) return 0;
            if (i >= U_.size()) return R0_;
            return numerics::find_root(f, r_[i - 1], r_[i], 1e-16).x;
        }
    }
    double lo = r_.empty() ? 0.0 : R0_;
    double hi = r_.empty() ? 1.0 : 2 * R0_;
    for (int k = 0; f(hi) < 0; ++k) {
        lo = hi;
        hi *= 2;
        if (k > 200) throw NumericalError("no bound orbits at this energy");
    }
    if (r_.empty()) {
        double flo = f(lo);
        if (!std::isfinite(flo)) {
            lo = hi;
            while (f(lo) >= 0) lo *= 0.5;
        } else if (flo > 0) {
            return 0;
        }
    }
    return numerics::find_root(f, lo, hi, 1e-16).x;
}

SteadyState solve_equilibrium(const DistributionFunction& df_in, const ExternalPotential* ext,
                              double y_central, const SolveOptions& opts)
{
    if (!(y_central > 0)) throw std::invalid_argument("central depth must be positive");
    if (df_in.is_empty()) throw std::invalid_argument("solve_equilibrium needs a non-empty phi");
    if (opts.radial_nodes < 8) throw std::invalid_argument("radial grid too coarse");
    const DistributionFunction& df = df_in;

    const double F0 = kFourPi * (df.density_of_depth(y_central) + (ext ? ext->rho(0) : 0.0));
    const double natural = std::sqrt(y_central / F0);
    if (ext) {
        const ExternalCheck chk = check_external(*ext, natural);
        if (!chk.ok) {
            std::string msg = "external potential violates its hypotheses:";
            for (auto& s : chk.issues) msg += " " + s + ";";
            throw std::invalid_argument(msg);
        }
    }

    auto rhs = [&](double r, double y) {
        double F = -kFourPi * df.density_of_depth(std::max(y, 0.0));
        if (ext) F -= kFourPi * ext->rho(r);
        return F;
    };
    const auto tr = numerics::integrate_radial_ode(rhs, y_central, 0.0, 1e4 * natural,
                                                   [](double, double y, double) { return y; }, opts.ode);
    if (!tr.event) throw NumericalError("unbounded support: depth never reaches zero");

    SteadyState ss;
    ss.R0_ = *tr.event;
    double yR, ypR;
    tr.evaluate(ss.R0_, yR, ypR);
    const double R0 = ss.R0_;
    ss.M_ = -R0 * R0 * ypR - (ext ? R0 * R0 * ext->dU(R0) : 0.0);
    ss.E0_ = -ss.M_ / R0 + (ext ? ext->U(R0) : 0.0);
    ss.U0_ = ss.E0_ - y_central;
    ss.df_ = df.with_cutoff(ss.E0_);
    if (ext) ss.ext_ = *ext;

    const std::size_t n = opts.radial_nodes;
    ss.r_.resize(n);
    ss.U_.resize(n);
    ss.dU_.resize(n);
    ss.d2U_.resize(n);
    ss.rho_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double r = (i + 1 == n) ? R0 : 0.5 * R0 * (1 - std::cos(M_PI * i / (n - 1)));
        double y, yp;
        tr.evaluate(r, y, yp);
        if (i + 1 == n) y = 0;
        ss.r_[i] = r;
        ss.U_[i] = ss.E0_ - y;
        ss.dU_[i] = -yp;
        ss.rho_[i] = df.density_of_depth(y);
        const double src = kFourPi * (ss.rho_[i] + (ext ? ext->rho(r) : 0.0));
        ss.d2U_[i] = (i == 0) ? src / 3 : src - 2 * ss.dU_[i] / r;
    }
    ss.dU_[0] = 0;
    return ss;
}

StateSample eval_state(const SteadyState& ss, double r)
{
    if (r < 0) throw std::invalid_argument("negative radius");
    StateSample s;
    double d2;
    ss.evaluate(r, s.U, s.dU, d2);
    s.rho0 = ss.density(r);
    return s;
}

double slope_density(const SteadyState& ss, double r)
{
    if (!ss.has_matter() || r >= ss.R0()) return 0;
    const double U = ss.potential(r), E0 = ss.E0();
    if (!(E0 > U)) return 0;
    const DistributionFunction& df = ss.df();
    const double p = df.exponent();
    if (!(p > 0)) return std::numeric_limits<double>::infinity();
    return kFourPi * std::sqrt(2.0) *
           numerics::integrate_algebraic([&](double E) { return df.regular_slope_of_depth(E0 - E); }, U, E0, 0.5,
                                         p - 1);
}

ValidationReport validate_assumptions(const SteadyState& ss)
{
    ValidationReport rep;
    if (!ss.has_matter()) {
        rep.violations.push_back("no matter: phi is empty");
        rep.integrable = false;
        return rep;
    }
    const DistributionFunction& df = ss.df();
    const double yc = ss.central_depth(), E0 = ss.E0(), U0 = ss.U0(), R0 = ss.R0();
    const double p = df.exponent();

    if (df.kind() == DistributionFunction::Kind::polytrope && !(p > 0 && p < 3.5)) {
        rep.exponent_in_range = false;
        rep.violations.push_back("exponent outside (0, 7/2)");
    }
    // (a) phi' < 0 on the open support
    {
        std::vector<double> probes;
        for (int i = 1; i < 400; ++i) probes.push_back(yc * i / 400.0);
        for (double d : df.table_depth())
            if (d > 0 && d < yc) probes.push_back(d);
        for (double eps : probes) {
            if (!(df.abs_slope_of_depth(eps) > 0)) {
                rep.phi_prime_negative = false;
                rep.violations.push_back("φ' not strictly negative");
                break;
            }
        }
    }
    // (b) r^2 U'(r) nondecreasing
    {
        const auto& r = ss.grid();
        const auto& dU = ss.grid_dU();
        double scale = 0;
        for (std::size_t i = 0; i < r.size(); ++i) scale = std::max(scale, std::abs(r[i] * r[i] * dU[i]));
        for (std::size_t i = 1; i < r.size(); ++i) {
            if (r[i] * r[i] * dU[i] < r[i - 1] * r[i - 1] * dU[i - 1] - 1e-12 * scale) {
                rep.r2U_nondecreasing = false;
                rep.violations.push_back("r^2 U'(r) decreasing");
                break;
            }
        }
    }
    // (c) integrability of phi' over the support, two orders of integration
    if (!(p > 0)) {
        rep.integrable = false;
        rep.integral_by_energy = rep.integral_by_density = std::numeric_limits<double>::infinity();
        rep.violations.push_back("phi' not integrable");
        return rep;
    }
    auto inner_volume = [&](double E) {
        const double rp = ss.inverse_potential(E);
        if (!(rp > 0)) return 0.0;
        return numerics::integrate_singular(
            [&](double r) { return r * r * std::sqrt(std::max(0.0, 2 * (E - ss.potential(r)))); }, 0, rp,
            numerics::Singular::right);
    };
    rep.integral_by_energy =
        kFourPi * kFourPi *
        numerics::integrate_algebraic([&](double E) { return df.regular_slope_of_depth(E0 - E) * inner_volume(E); },
                                      U0, E0, 0, p - 1);
    const double q = p + 0.5;
    rep.integral_by_density =
        kFourPi * numerics::integrate_algebraic(
                      [&](double r) { return slope_density(ss, r) * r * r / std::pow(R0 - r, q); }, 0, R0, 0, q);
    rep.relative_difference = std::abs(rep.integral_by_energy - rep.integral_by_density) /
                              std::max(std::abs(rep.integral_by_energy), std::abs(rep.integral_by_density));
    rep.integrable = std::isfinite(rep.integral_by_energy) && std::isfinite(rep.integral_by_density) &&
                     rep.relative_difference < 1e-3;
    if (!rep.integrable) rep.violations.push_back("phi' integrals disagree or diverge");
    return rep;
}

}  // namespace antonov
