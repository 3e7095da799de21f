#include "antonov/response.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace antonov {

namespace {
constexpr double kMinS = 1e-6;
constexpr double kCircularT = 1 - 1e-10;

double orbit_frequency(const SteadyState& ss, double E, double L, double Lm)
{
    if (L >= kCircularT * Lm) return circular_frequency(ss, circular_radius(ss, E));
    return period(ss, E, L).omega_r;
}
}  // namespace

double FrequencyMap::omega_at(const SteadyState& ss, double E, double L) const
{
    if (model) return model(E, L);
    return orbit_frequency(ss, E, L, l_max(ss, E));
}

double FrequencyMap::omega_at_st(const SteadyState& ss, double s, double t) const
{
    const double E = E_lo + s * (E_hi - E_lo);
    const double Lm = l_max(ss, E);
    if (model) return model(E, t * Lm);
    return orbit_frequency(ss, E, t * Lm, Lm);
}

FrequencyMap build_frequency_map(const SteadyState& ss, const MapOptions& opts)
{
    if (opts.nE < 1 || opts.nL < 1) throw std::invalid_argument("frequency map needs nE, nL >= 1");
    FrequencyMap fm;
    fm.nE = opts.nE;
    fm.nL = opts.nL;
    fm.model = opts.model;
    if (opts.energy_range) {
        fm.E_lo = opts.energy_range->first;
        fm.E_hi = opts.energy_range->second;
    } else {
        if (!ss.has_matter()) throw std::invalid_argument("frequency map needs an energy range without matter");
        fm.E_lo = ss.U0();
        fm.E_hi = ss.E0();
    }
    if (!(fm.E_lo < fm.E_hi)) throw std::invalid_argument("empty energy range");

    const DistributionFunction& df = ss.df();
    const bool weighted = ss.has_matter() && !opts.energy_range;
    const double p = weighted ? df.exponent() : 1.0;
    const double width = fm.E_hi - fm.E_lo;

    // s-rule absorbs (1 - s)^(p - 1) from |phi'| near the cutoff
    std::vector<double> s_nodes(opts.nE), s_weights(opts.nE);
    {
        const auto& q = weighted ? numerics::cached_jacobi(opts.nE, p - 1, 0) : numerics::cached_legendre(opts.nE);
        const double scale = weighted ? std::pow(2.0, -p) : 0.5;
        for (std::size_t i = 0; i < opts.nE; ++i) {
            s_nodes[i] = 0.5 * (q.nodes[i] + 1);
            s_weights[i] = q.weights[i] * scale;
        }
    }
    const auto& qt = numerics::cached_legendre(opts.nL);

    std::vector<double> Lmax(opts.nE);
    for (std::size_t i = 0; i < opts.nE; ++i) Lmax[i] = l_max(ss, fm.E_lo + s_nodes[i] * width);

    const std::size_t total = opts.nE * opts.nL;
    fm.nodes.resize(total);
    std::vector<std::string> errors(total);
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t idx = 0; idx < static_cast<std::ptrdiff_t>(total); ++idx) {
        const std::size_t iE = static_cast<std::size_t>(idx) / opts.nL, iL = static_cast<std::size_t>(idx) % opts.nL;
        MapNode& nd = fm.nodes[static_cast<std::size_t>(idx)];
        nd.s = s_nodes[iE];
        nd.t = 0.5 * (qt.nodes[iL] + 1);
        nd.E = fm.E_lo + nd.s * width;
        nd.L = nd.t * Lmax[iE];
        try {
            nd.orbit = angle_chart(ss, nd.E, nd.L, opts.chart_samples);
            nd.omega_orbit = nd.orbit.omega_r;
            nd.omega = fm.model ? fm.model(nd.E, nd.L) : nd.omega_orbit;
            const double wEL = s_weights[iE] * width * 0.5 * qt.weights[iL] * Lmax[iE];
            const double measure = 8 * M_PI * M_PI * nd.L / nd.omega_orbit;
            if (weighted) {
                const double depth = ss.E0() - nd.E;
                const double reg = df.regular_slope_of_depth(depth) * std::pow(width, p - 1);
                nd.mass = wEL * measure * reg;
                nd.abs_slope = df.abs_slope_of_depth(depth);
                nd.weight = wEL * measure * std::pow(1 - nd.s, 1 - p);
            } else {
                nd.weight = wEL * measure;
                nd.abs_slope = ss.has_matter() ? df.abs_slope_of_depth(ss.E0() - nd.E) : 0.0;
                nd.mass = nd.weight * nd.abs_slope;
            }
            if (!(nd.omega > 0)) throw NumericalError("non-positive frequency");
        } catch (const std::exception& e) {
            errors[static_cast<std::size_t>(idx)] = e.what();
        }
    }
    for (std::size_t idx = 0; idx < total; ++idx) {
        if (!errors[idx].empty()) {
            std::ostringstream os;
            os.precision(17);
            os << "period failure at node (E=" << fm.nodes[idx].E << ", L=" << fm.nodes[idx].L << "): " << errors[idx];
            throw NumericalError(os.str());
        }
    }

    // omega_*: nodes, edges of the closed square, then a local coordinate polish
    struct Cand {
        double s, t, w;
    };
    std::vector<Cand> cands;
    for (const auto& nd : fm.nodes) cands.push_back({nd.s, nd.t, nd.omega});
    std::vector<double> es{kMinS, 1.0}, et{0.0, 1.0};
    for (double s : s_nodes) es.push_back(s);
    for (std::size_t j = 0; j < opts.nL; ++j) et.push_back(0.5 * (qt.nodes[j] + 1));
    for (double t : {0.0, 1.0})
        for (double s : es) cands.push_back({s, t, fm.omega_at_st(ss, s, t)});
    for (double s : {kMinS, 1.0})
        for (std::size_t j = 2; j < et.size(); ++j) cands.push_back({s, et[j], fm.omega_at_st(ss, s, et[j])});

    const auto best = *std::min_element(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) { return a.w < b.w; });
    double s = best.s, t = best.t;
    const double ds = 2.0 / opts.nE, dt = 2.0 / opts.nL;
    for (int sweep = 0; sweep < 4; ++sweep) {
        const double tl = std::max(0.0, t - dt), th = std::min(1.0, t + dt);
        t = numerics::minimize_golden([&](double x) { return fm.omega_at_st(ss, s, x); }, tl, th, 1e-10);
        const double sl = std::max(kMinS, s - ds), sh = std::min(1.0, s + ds);
        s = numerics::minimize_golden([&](double x) { return fm.omega_at_st(ss, x, t); }, sl, sh, 1e-10);
    }
    const double polished = fm.omega_at_st(ss, s, t);
    if (polished < best.w) {
        fm.omega_star = polished;
        fm.s_star = s;
        fm.t_star = t;
    } else {
        fm.omega_star = best.w;
        fm.s_star = best.s;
        fm.t_star = best.t;
    }
    fm.E_star = fm.E_lo + fm.s_star * width;
    fm.L_star = fm.t_star * l_max(ss, fm.E_star);
    fm.on_circular = fm.t_star > 1 - 1e-6;
    fm.argmins.emplace_back(fm.E_star, fm.L_star);
    fm.omega_max = polished;
    for (const auto& c : cands) {
        fm.omega_max = std::max(fm.omega_max, c.w);
        if (c.w <= fm.omega_star * (1 + 1e-8) && (c.s != fm.s_star || c.t != fm.t_star)) {
            const double E = fm.E_lo + c.s * width;
            fm.argmins.emplace_back(E, c.t * l_max(ss, E));
            if (c.t >= 1) fm.on_circular = true;
        }
    }
    fm.omega_min = fm.omega_star;
    return fm;
}

double frequency_energy_slope(const SteadyState& ss, const FrequencyMap& fm)
{
    const double h = 1e-4;
    const double f0 = fm.omega_at_st(ss, 1.0, 0.0), f1 = fm.omega_at_st(ss, 1.0 - h, 0.0),
                 f2 = fm.omega_at_st(ss, 1.0 - 2 * h, 0.0);
    return (3 * f0 - 4 * f1 + f2) / (2 * h * (fm.E_hi - fm.E_lo));
}

}  // namespace antonov
