// Acceptance run: one PASS/FAIL line per criterion.

#include "antonov/pipeline.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include <sstream>
#include <string>

using namespace antonov;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double a, double b = 0, double c = 0)
{
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

const std::string fixtures = ANTONOV_FIXTURES;

const RunConfig& fixture(const std::string& name)
{
    static std::map<std::string, RunConfig> cache;
    auto it = cache.find(name);
    if (it == cache.end()) it = cache.emplace(name, load_config(fixtures + "/" + name + ".ini")).first;
    return it->second;
}

const SteadyState& fixture_state(const std::string& name)
{
    static std::map<std::string, SteadyState> cache;
    auto it = cache.find(name);
    if (it == cache.end()) it = cache.emplace(name, build_state(fixture(name))).first;
    return it->second;
}

const SpectralReport& fixture_report(const std::string& name)
{
    static std::map<std::string, SpectralReport> cache;
    auto it = cache.find(name);
    if (it == cache.end()) {
        const auto& ss = fixture_state(name);
        it = cache.emplace(name, compute_report(fixture(name), ss, build_map(ss, fixture(name)))).first;
    }
    return it->second;
}

Outcome kepler_oracle()
{
    const auto ss = SteadyState::from_potential(external::kepler(1.0));
    double worst = 0;
    for (double E : {-2.0, -1.0, -0.5, -0.25, -0.1}) {
        const double T0 = 2 * M_PI * std::pow(-2 * E, -1.5), Lm = l_max(ss, E);
        for (double t : {0.05, 0.3, 0.5, 0.75, 0.95}) worst = std::max(worst, std::abs(period(ss, E, t * Lm).T - T0) / T0);
    }
    return {worst < 1e-8, fmt("max rel error %.2e over 25 pairs", worst)};
}

Outcome isochrone_oracle()
{
    const auto ss = SteadyState::from_potential(external::isochrone(1.0, 1.0));
    double spread = 0, worst = 0;
    for (double E : {-0.45, -0.3, -0.1}) {
        const double T0 = 2 * M_PI * std::pow(-2 * E, -1.5), Lm = l_max(ss, E);
        double lo = 1e300, hi = -1e300;
        for (double t : {0.0, 0.2, 0.5, 0.8, 0.99}) {
            const double T = period(ss, E, t * Lm).T;
            lo = std::min(lo, T);
            hi = std::max(hi, T);
            worst = std::max(worst, std::abs(T - T0) / T0);
        }
        spread = std::max(spread, (hi - lo) / T0);
    }
    return {spread < 1e-6 && worst < 1e-6, fmt("L spread %.2e, max rel error %.2e", spread, worst)};
}

Outcome circular_limit()
{
    const auto& ss = fixture_state("polytrope_n1");
    const double Lm = l_max(ss, ss.E0() - 1e-9 * std::abs(ss.E0()));
    double worst = 0;
    for (int j = 1; j <= 10; ++j) {
        const double L = Lm * j / 11.0;
        const auto c = circular_orbit(ss, L);
        const double kappa = circular_frequency(ss, c.r_star);
        worst = std::max(worst, std::abs(period(ss, c.E_min + 1e-6, L).omega_r - kappa) / kappa);
    }
    return {worst < 1e-4, fmt("max rel error %.2e over 10 L", worst)};
}

Outcome lane_emden()
{
    const double c = polytrope_density_constant(-0.5);
    const double k = 1.0, A = k * k / (4 * M_PI * c), yc = 1.0;
    const auto ss = solve_equilibrium(DistributionFunction::lane_emden(1.0, A), nullptr, yc);
    double sup = 0;
    for (int i = 1; i < 2000; ++i) {
        const double r = ss.R0() * i / 2000.0;
        sup = std::max(sup, std::abs(ss.E0() - ss.potential(r) - yc * std::sin(k * r) / (k * r)));
    }
    const double m = 4 * M_PI * numerics::integrate_singular([&](double r) { return ss.density(r) * r * r; }, 0, ss.R0(),
                                                             numerics::Singular::right, 128);
    const double dm = std::abs(m - ss.mass()) / ss.mass();
    return {sup < 1e-6 && dm < 1e-6, fmt("sup error %.2e, mass rel error %.2e", sup, dm)};
}

Outcome coulomb_gram()
{
    const double e = coulomb_self_energy([](double) { return 1.0; }, 1.0);
    const double err = std::abs(e - 16 * M_PI * M_PI / 15) / (16 * M_PI * M_PI / 15);
    return {err < 1e-10, fmt("self-energy %.15g, rel error %.2e", e, err)};
}

Outcome kphi_traces()
{
    const auto& rep = fixture_report("polytrope_n1");
    const double rel = std::abs(rep.kphi_kernel - rep.kphi_parts) / std::abs(rep.kphi_parts);
    return {rel < 1e-5, fmt("kernel %.12g, parts %.12g, rel %.2e", rep.kphi_kernel, rep.kphi_parts, rel)};
}

Outcome slope_identity()
{
    const auto vr = validate_assumptions(fixture_state("polytrope_n1"));
    return {vr.relative_difference < 1e-6,
            fmt("by energy %.12g, by density %.12g, rel %.2e", vr.integral_by_energy, vr.integral_by_density,
                vr.relative_difference)};
}

Outcome tiny_instance()
{
    const auto& ss = fixture_state("polytrope_n1");
    MapOptions mo;
    mo.nE = mo.nL = 8;
    const auto fm = build_frequency_map(ss, mo);
    const PotentialDensityBasis basis(ss.R0(), 6, BasisFamily::bessel, ss.df().exponent() + 0.5);
    ResponseOptions ro;
    ro.k_max = 2;
    const auto kernel = prepare_response(fm, basis, ro);
    const double w2 = fm.omega_star * fm.omega_star;
    double worst = 0;
    for (double f : {0.0, 0.5, 0.9}) {
        const auto nu = numerics::sym_eig(assemble_response(kernel, f * w2)).values;
        const auto dense = dense_response_eigenvalues(fm, f * w2, 2);
        for (int i = 0; i < 3; ++i) worst = std::max(worst, std::abs(nu(i) - dense(i)) / std::abs(dense(i)));
    }
    return {worst < 0.02, fmt("max rel deviation %.2e", worst)};
}

Outcome antonov_bound()
{
    const auto& rep = fixture_report("polytrope_n1");
    const double nu10 = rep.nu.front().front();
    bool monotone = rep.lambda.size() == 32;
    for (std::size_t m = 1; m < rep.nu.size(); ++m)
        for (std::size_t i = 0; i < rep.nu[m].size(); ++i) monotone = monotone && rep.nu[m][i] >= rep.nu[m - 1][i];
    double trmax = 0;
    for (double t : rep.trace) trmax = std::max(trmax, t);
    const bool below = rep.trace_bound_finite && trmax <= 1.05 * rep.trace_bound;
    return {nu10 < 1 && monotone && below,
            fmt("nu_1(0) = %.6g, max Tr B = %.6g, trace bound = %.6g", nu10, trmax, rep.trace_bound) +
                (monotone ? ", monotone on 32 points" : ", NOT monotone")};
}

Outcome mode_count()
{
    bool ok = true;
    std::string detail;
    for (const char* name : {"polytrope_n1", "stable_isochrone"}) {
        const auto& rep = fixture_report(name);
        const long found = static_cast<long>(rep.modes.size());
        bool good = rep.trace_bound_finite && found <= rep.predicted_max_modes;
        if (rep.trace_bound_finite && rep.trace_bound < 1) good = good && found == 0;
        ok = ok && good;
        detail += std::string(detail.empty() ? "" : "; ") + name + ": " +
                  fmt("%.0f modes, trace bound %.6g, predicted max %.0f", double(found), rep.trace_bound,
                      double(rep.predicted_max_modes));
    }
    return {ok, detail};
}

Outcome majorant_identity()
{
    double worst = 0, drift = 0;
    bool pass = true;
    for (double n : {0.5, 1.0, 2.0}) {
        const auto ss = solve_equilibrium(DistributionFunction::polytrope(n, 1.0), nullptr, 1.0);
        const PolytropeBoundConfig cfg(n, 1.0, 0.5 * std::min(n, 1.0));
        for (int i = 1; i <= 10; ++i) {
            const double r = ss.R0() * (i - 0.5) / 10;
            const double a = rho_tilde_alpha(ss, cfg, r), d = rho_tilde_direct(ss, cfg, r);
            worst = std::max(worst, std::abs(a - d) / std::abs(a));
        }
        const auto ec = envelope_check(ss, cfg);
        pass = pass && ec.pass;
        drift = std::max(drift, std::abs(ec.C_refined - ec.C_best) / ec.C_refined);
    }
    return {pass && worst < 1e-5, fmt("max rel difference %.2e, max C_best drift %.2e", worst, drift)};
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome determinism()
{
    const fs::path base = fs::temp_directory_path() / "antonov_acceptance";
    fs::remove_all(base);
    const std::string cfg = fixtures + "/polytrope_n1.ini";
    for (int threads : {1, 8}) {
        const std::string cmd = std::string(ANTONOV_CLI) + " spectrum --config " + cfg + " --out " +
                                (base / std::to_string(threads)).string() + " --threads " + std::to_string(threads) +
                                " > /dev/null";
        if (std::system(cmd.c_str()) != 0) return {false, "spectrum run failed with " + std::to_string(threads) + " threads"};
    }
    int files = 0;
    for (const auto& e : fs::directory_iterator(base / "1")) {
        const auto other = base / "8" / e.path().filename();
        if (!fs::exists(other) || slurp(e.path()) != slurp(other))
            return {false, "artifact differs: " + e.path().filename().string()};
        ++files;
    }
    return {files > 0, std::to_string(files) + " artifacts byte-identical"};
}

}  // namespace

int main()
{
    struct Criterion {
        std::string name;
        std::function<Outcome()> run;
        double budget = 0;  ///< seconds; 0: none
    };
    const std::vector<Criterion> criteria{
        {"kepler period oracle", kepler_oracle, 1.0},
        {"isochrone period oracle", isochrone_oracle, 1.0},
        {"circular limit of the radial frequency", circular_limit},
        {"Lane-Emden index 1 closed form and mass", lane_emden},
        {"uniform ball Coulomb self-energy", coulomb_gram},
        {"K_phi trace by two quadratures", kphi_traces},
        {"integral of |phi'| two ways", slope_identity},
        {"Galerkin vs dense response on the tiny instance", tiny_instance, 30.0},
        {"nu_1(0) < 1, monotone eigencurves, trace below the bound", antonov_bound},
        {"located modes within the trace-bound count", mode_count},
        {"majorant direct vs alpha form and envelope", majorant_identity},
        {"spectrum artifacts independent of thread count", determinism},
    };
    int failed = 0, index = 0;
    for (const auto& [name, run, budget] : criteria) {
        ++index;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (budget > 0 && dt > budget) {
            o.pass = false;
            o.detail += fmt(", over the %.0f s budget", budget);
        }
        std::printf("%s %2d %s: %s [%.2f s]\n", o.pass ? "PASS" : "FAIL", index, name.c_str(), o.detail.c_str(), dt);
        std::fflush(stdout);
        failed += !o.pass;
    }
    return failed == 0 ? 0 : 1;
}
