#include "antonov/response.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace antonov {

EssentialSpectrum essential_bands(const FrequencyMap& fm, int k_max)
{
    EssentialSpectrum es;
    es.gap_hi = fm.omega_star * fm.omega_star;
    const double lo = fm.omega_min * fm.omega_min, hi = fm.omega_max * fm.omega_max;
    for (int k = 1; k <= k_max; ++k) es.bands.push_back({k, double(k) * k * lo, double(k) * k * hi});
    es.merged.emplace_back(0.0, 0.0);
    for (const auto& b : es.bands) {
        auto& last = es.merged.back();
        if (es.merged.size() > 1 && b.lo <= last.second)
            last.second = std::max(last.second, b.hi);
        else
            es.merged.emplace_back(b.lo, b.hi);
    }
    return es;
}

namespace {

double gain(double omega, double omega_star)
{
    const double w2 = omega * omega;
    return w2 / (w2 - omega_star * omega_star);
}

struct Rule {
    std::vector<double> x, w;
};

// Panels on [a, b] refined geometrically toward c; the end panels carry (x - a)^la and (b - x)^rb.
Rule graded_rule(double a, double b, double c, int levels, std::size_t order, double la, double rb)
{
    const double h = b - a;
    c = std::clamp(c, a, b);
    if (c - a < 1e-12 * h) c = a;
    if (b - c < 1e-12 * h) c = b;
    std::vector<double> bp{a, b, c};
    for (int j = 1; j <= levels; ++j) {
        const double d = h * std::exp2(-j);
        if (c - d > a + 0.5 * d) bp.push_back(c - d);
        if (c + d < b - 0.5 * d) bp.push_back(c + d);
    }
    std::sort(bp.begin(), bp.end());
    bp.erase(std::unique(bp.begin(), bp.end()), bp.end());
    Rule rule;
    for (std::size_t i = 0; i + 1 < bp.size(); ++i) {
        const double lo = bp[i], hi = bp[i + 1], half = 0.5 * (hi - lo);
        if (!(half > 0)) continue;
        const bool first = i == 0, last = i + 2 == bp.size();
        const double al = first ? la : 0, be = last ? rb : 0;
        const auto& q = (al == 0 && be == 0) ? numerics::cached_legendre(order) : numerics::cached_jacobi(order, be, al);
        for (std::size_t k = 0; k < q.order(); ++k) {
            const double x = lo + half * (q.nodes[k] + 1);
            // the rule integrates (1 - xi)^be (1 + xi)^al; restore (x - a)^la (b - x)^rb on other panels
            double w = half * q.weights[k] * std::pow(half, al + be);
            if (!first && la != 0) w *= std::pow(x - a, la);
            if (!last && rb != 0) w *= std::pow(b - x, rb);
            rule.x.push_back(x);
            rule.w.push_back(w);
        }
    }
    return rule;
}

double rho_star_at_order(const SteadyState& ss, const FrequencyMap& fm, double r, int levels, std::size_t order)
{
    const double U = ss.potential(r), E0 = ss.E0();
    const DistributionFunction& df = ss.df();
    const double p = df.exponent();
    // int |phi'| v^2 dv 4 pi int_0^{pi/2} sin(psi) G d psi, v^2 dv = sqrt(2 (E - U)) dE, L = r v sin(psi)
    const Rule re = graded_rule(U, E0, std::clamp(fm.E_star, U, E0), levels, order, 0.5, p - 1);
    double total = 0;
    for (std::size_t i = 0; i < re.x.size(); ++i) {
        const double E = re.x[i];
        const double Lr = r * std::sqrt(2 * (E - U));
        const double psi_c = Lr > fm.L_star ? std::asin(fm.L_star / Lr) : 0.5 * M_PI;
        const Rule rp = graded_rule(0, 0.5 * M_PI, psi_c, levels, order, 0, 0);
        double ang = 0;
        for (std::size_t k = 0; k < rp.x.size(); ++k)
            ang += rp.w[k] * std::sin(rp.x[k]) * gain(fm.omega_at(ss, E, Lr * std::sin(rp.x[k])), fm.omega_star);
        total += re.w[i] * df.regular_slope_of_depth(E0 - E) * std::sqrt(2.0) * ang;
    }
    return 4 * M_PI * total;
}

double trace_sum(const FrequencyMap& fm)
{
    double s = 0;
    for (const auto& nd : fm.nodes) {
        if (nd.mass == 0) continue;
        const double inv_r = nd.orbit.average([](double r) { return 1 / r; });
        s += nd.mass * gain(nd.omega, fm.omega_star) * 2 * M_PI * inv_r;
    }
    return s;
}

}  // namespace

RhoStarValue rho_star(const SteadyState& ss, const FrequencyMap& fm, double r)
{
    if (r < 0) throw std::invalid_argument("negative radius");
    RhoStarValue v;
    if (!ss.has_matter() || r >= ss.R0()) return v;
    v.value = rho_star_at_order(ss, fm, r, 12, 4);
    v.refined = rho_star_at_order(ss, fm, r, 24, 5);
    v.possibly_divergent = !std::isfinite(v.refined) || v.refined < 0 ||
                           std::abs(v.refined - v.value) > 1e-3 * std::abs(v.refined);
    return v;
}

long predicted_max_modes(double value)
{
    if (!std::isfinite(value)) return -1;
    return std::max(0L, static_cast<long>(std::ceil(value)) - 1);
}

double trace_bound_nodes(const FrequencyMap& fm)
{
    return trace_sum(fm);
}

namespace {

double trace_graded(const SteadyState& ss, const FrequencyMap& fm, int levels, std::size_t order)
{
    const DistributionFunction& df = ss.df();
    const double p = df.exponent(), width = fm.E_hi - fm.E_lo;
    const Rule rs = graded_rule(0, 1, fm.s_star, levels, order, 0, p - 1);
    const Rule rt = graded_rule(0, 1, fm.t_star, levels, order, 0, 0);
    std::vector<double> rows(rs.x.size(), 0.0);
    std::vector<std::string> errors(rs.x.size());
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(rs.x.size()); ++i) {
        const std::size_t si = static_cast<std::size_t>(i);
        const double E = fm.E_lo + rs.x[si] * width;
        try {
            const double Lm = l_max(ss, E);
            const double reg = df.regular_slope_of_depth(ss.E0() - E) * std::pow(width, p - 1);
            double row = 0;
            for (std::size_t j = 0; j < rt.x.size(); ++j) {
                const double L = rt.x[j] * Lm;
                const double w = fm.model ? fm.model(E, L) : period(ss, E, L).omega_r;
                row += rt.w[j] * gain(w, fm.omega_star) * L * inverse_radius_time(ss, E, L);
            }
            rows[si] = rs.w[si] * width * Lm * reg * 8 * M_PI * M_PI * row;
        } catch (const std::exception& e) {
            std::ostringstream os;
            os.precision(17);
            os << "trace bound at E=" << E << ": " << e.what();
            errors[si] = os.str();
        }
    }
    for (const auto& e : errors)
        if (!e.empty()) throw NumericalError(e);
    double total = 0;
    for (double r : rows) total += r;
    return total;
}

}  // namespace

TraceBound trace_bound(const SteadyState& ss, const FrequencyMap& fm, int levels)
{
    TraceBound tb;
    if (!ss.has_matter()) {
        tb.predicted_max_modes = 0;
        return tb;
    }
    tb.coarse = trace_graded(ss, fm, levels, 4);
    tb.value = trace_graded(ss, fm, 2 * levels, 6);
    const bool ok = std::isfinite(tb.coarse) && std::isfinite(tb.value) && tb.coarse >= 0 && tb.value >= 0;
    tb.finite = ok && std::abs(tb.value - tb.coarse) <= 0.05 * tb.value;
    if (!tb.finite) tb.value = std::numeric_limits<double>::infinity();
    tb.predicted_max_modes = predicted_max_modes(tb.value);
    return tb;
}

double trace_bound_radial(const SteadyState& ss, const FrequencyMap& fm, std::size_t order)
{
    if (!ss.has_matter()) return 0;
    return 4 * M_PI * numerics::integrate_singular([&](double r) { return rho_star(ss, fm, r).refined * r; }, 0,
                                                   ss.R0(), numerics::Singular::none, order);
}

DivergenceDiagnostic divergence_diagnostic(const SteadyState& ss, const FrequencyMap& fm, double epsilon, int levels,
                                           int grading)
{
    DivergenceDiagnostic dd;
    dd.epsilon = epsilon;
    if (!ss.has_matter()) {
        dd.verdict = "inconclusive";
        return dd;
    }
    auto breakpoints = [&](double c, double lo) {
        std::vector<double> b{lo, 1.0, std::clamp(c, lo, 1.0)};
        for (int j = 1; j <= grading; ++j) {
            const double h = std::exp2(-j);
            if (c - h > lo + 0.5 * h) b.push_back(c - h);
            if (c + h < 1 - 0.5 * h) b.push_back(c + h);
        }
        std::sort(b.begin(), b.end());
        b.erase(std::unique(b.begin(), b.end()), b.end());
        return b;
    };
    const auto& q = numerics::cached_legendre(4);
    auto expand = [&](const std::vector<double>& b, std::vector<double>& x, std::vector<double>& w) {
        for (std::size_t i = 0; i + 1 < b.size(); ++i) {
            const double h = b[i + 1] - b[i];
            if (!(h > 0)) continue;
            for (std::size_t k = 0; k < q.order(); ++k) {
                x.push_back(b[i] + 0.5 * h * (q.nodes[k] + 1));
                w.push_back(0.5 * h * q.weights[k]);
            }
        }
    };
    std::vector<double> xs, ws, xt, wt;
    expand(breakpoints(fm.s_star, 0.0), xs, ws);
    expand(breakpoints(fm.t_star, 0.0), xt, wt);

    const DistributionFunction& df = ss.df();
    const double width = fm.E_hi - fm.E_lo;
    const std::size_t ns = xs.size(), nt = xt.size();
    std::vector<double> gapv(ns * nt, 0.0), val(ns * nt, 0.0);
    std::vector<char> inside(ns * nt, 0);
    std::vector<std::string> errors(ns);
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(ns); ++i) {
        const std::size_t si = static_cast<std::size_t>(i);
        const double E = fm.E_lo + xs[si] * width;
        try {
            const double Lm = l_max(ss, E);
            const double slope = df.abs_slope_of_depth(ss.E0() - E);
            for (std::size_t j = 0; j < nt; ++j) {
                const std::size_t idx = si * nt + j;
                const double L = xt[j] * Lm;
                const Period per = period(ss, E, L);
                if (!(per.r_plus - per.r_minus > epsilon)) continue;
                const double w = fm.model ? fm.model(E, L) : per.omega_r;
                inside[idx] = 1;
                gapv[idx] = w - fm.omega_star;
                val[idx] = ws[si] * wt[j] * width * Lm * 8 * M_PI * M_PI * L / per.omega_r * 2 * M_PI * slope;
            }
        } catch (const std::exception& e) {
            std::ostringstream os;
            os.precision(17);
            os << "divergence diagnostic at E=" << E << ": " << e.what();
            errors[si] = os.str();
        }
    }
    for (const auto& e : errors)
        if (!e.empty()) throw NumericalError(e);
    const double delta0 = 0.25 * (fm.omega_max - fm.omega_star);
    for (int m = 0; m < levels; ++m) {
        const double d = delta0 * std::exp2(-m);
        double s = 0;
        for (std::size_t idx = 0; idx < gapv.size(); ++idx)
            if (inside[idx] && gapv[idx] > d) s += val[idx] / gapv[idx];
        dd.delta.push_back(d);
        dd.partial.push_back(s);
    }
    // growth of the increments over the last halvings
    std::vector<double> ratios;
    const auto& I = dd.partial;
    for (std::size_t m = 2; m < I.size(); ++m) {
        const double a = I[m - 1] - I[m - 2], b = I[m] - I[m - 1];
        if (a > 0) ratios.push_back(b / a);
    }
    const double total = I.empty() ? 0.0 : I.back();
    const double last_inc = I.size() > 1 ? I.back() - I[I.size() - 2] : 0.0;
    if (ratios.size() < 4) {
        dd.verdict = (total > 0 && last_inc <= 1e-12 * total) ? "convergent" : "inconclusive";
        return dd;
    }
    std::vector<double> tail(ratios.end() - 4, ratios.end());
    std::sort(tail.begin(), tail.end());
    const double med = 0.5 * (tail[1] + tail[2]);
    if (last_inc <= 1e-12 * total || med <= 0.7)
        dd.verdict = "convergent";
    else if (med >= 0.85)
        dd.verdict = "divergent trend";
    else
        dd.verdict = "inconclusive";
    return dd;
}

KphiTraces kphi_trace_check(const SteadyState& ss)
{
    KphiTraces kt;
    if (!ss.has_matter()) return kt;
    const DistributionFunction& df = ss.df();
    const double E0 = ss.E0(), R0 = ss.R0(), p = df.exponent(), q = p + 0.5;
    auto outer = [&](const std::function<double(double)>& inner) {
        return 8 * M_PI * M_PI *
               numerics::integrate_algebraic([&](double r) { return r * inner(r) / std::pow(R0 - r, q); }, 0, R0, 0,
                                             q);
    };
    // int |phi'| v^2 dv = int |phi'| sqrt(2 (E - U)) dE
    kt.kernel = outer([&](double r) {
        const double U = ss.potential(r);
        if (!(E0 > U)) return 0.0;
        return std::sqrt(2.0) * numerics::integrate_algebraic(
                                    [&](double E) { return df.regular_slope_of_depth(E0 - E); }, U, E0, 0.5, p - 1);
    });
    // int phi dv = int phi dE / sqrt(2 (E - U))
    kt.parts = outer([&](double r) {
        const double U = ss.potential(r);
        if (!(E0 > U)) return 0.0;
        return numerics::integrate_algebraic([&](double E) { return df.regular_value_of_depth(E0 - E); }, U, E0,
                                             -0.5, p) /
               std::sqrt(2.0);
    });
    return kt;
}

}  // namespace antonov
