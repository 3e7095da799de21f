#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "antonov/bounds.hpp"

#include <cmath>
#include <map>

using namespace antonov;

namespace {
const SteadyState& polytrope(double n)
{
    static std::map<double, SteadyState> cache;
    auto it = cache.find(n);
    if (it == cache.end())
        it = cache.emplace(n, solve_equilibrium(DistributionFunction::polytrope(n, 1.0), nullptr, 1.0)).first;
    return it->second;
}
}  // namespace

TEST_CASE("bound configuration ranges")
{
    CHECK_NOTHROW(PolytropeBoundConfig(1.0, 1.0, 0.5));
    CHECK_NOTHROW(PolytropeBoundConfig(0.5, 2.0, 0.25));
    CHECK_THROWS_AS(PolytropeBoundConfig(0.0, 1.0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(PolytropeBoundConfig(3.5, 1.0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(PolytropeBoundConfig(1.0, 0.0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(PolytropeBoundConfig(0.5, 1.0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(PolytropeBoundConfig(0.5, 1.0, 0.6), std::invalid_argument);
    CHECK_THROWS_AS(PolytropeBoundConfig(2.0, 1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(PolytropeBoundConfig(2.0, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("direct and alpha forms of rho tilde agree")
{
    for (double n : {0.5, 1.0, 2.0}) {
        const auto& ss = polytrope(n);
        const PolytropeBoundConfig cfg(n, 1.0, 0.5 * std::min(n, 1.0));
        for (int i = 1; i <= 10; ++i) {
            const double r = ss.R0() * (i - 0.5) / 10;
            const double a = rho_tilde_alpha(ss, cfg, r);
            CHECK(a > 0);
            CHECK(rho_tilde_direct(ss, cfg, r) == doctest::Approx(a).epsilon(1e-5));
        }
    }
}

TEST_CASE("rho tilde outside the support and near its edge")
{
    const auto& ss = polytrope(1.0);
    const PolytropeBoundConfig cfg(1.0, 1.0, 0.5);
    CHECK(rho_tilde_alpha(ss, cfg, ss.R0()) == 0.0);
    CHECK(rho_tilde_direct(ss, cfg, 1.5 * ss.R0()) == 0.0);
    CHECK(rho_tilde_alpha(ss, cfg, -0.1) == 0.0);
    for (double n : {1.0, 2.0}) {
        const auto& st = polytrope(n);
        const PolytropeBoundConfig c(n, 1.0, 0.5);
        double prev = rho_tilde_alpha(st, c, 0.9 * st.R0());
        for (double x : {0.99, 0.9999, 0.999999}) {
            const double v = rho_tilde_alpha(st, c, x * st.R0());
            CHECK(v < prev);
            prev = v;
        }
        CHECK(prev < 1e-2 * rho_tilde_alpha(st, c, 0.5 * st.R0()));
    }
}

TEST_CASE("rho tilde decreases with c")
{
    const auto& ss = polytrope(1.0);
    for (double x : {0.1, 0.5, 0.9}) {
        const double r = x * ss.R0();
        double prev = INFINITY;
        for (double c : {0.25, 1.0, 4.0}) {
            const double v = rho_tilde_direct(ss, PolytropeBoundConfig(1.0, c, 0.5), r);
            CHECK(v < prev);
            prev = v;
        }
    }
}

TEST_CASE("bounding integral for n below one")
{
    CHECK(alpha_bound_integral(0.5) == doctest::Approx(M_PI * M_PI / 2).epsilon(1e-10));
    for (double n : {0.25, 0.75}) {
        const double v = alpha_bound_integral(n);
        CHECK(std::isfinite(v));
        CHECK(v > 0);
    }
    CHECK_THROWS_AS(alpha_bound_integral(1.0), std::invalid_argument);

    const double n = 0.5;
    const auto& ss = polytrope(n);
    const PolytropeBoundConfig cfg(n, 1.0, 0.25);
    const double cap = 4 * M_PI * std::sqrt(2.0) * alpha_bound_integral(n);
    for (double x : {1e-4, 0.01, 0.3, 0.7, 0.99}) {
        const double r = x * ss.R0();
        const double y = ss.E0() - ss.potential(r);
        const double scaled = rho_tilde_alpha(ss, cfg, r) * std::pow(2 * cfg.c * r * r, 1 - n) / std::pow(y, n - 0.5);
        CHECK(scaled <= cap);
    }
}

TEST_CASE("envelope check passes and is integrable")
{
    for (auto [n, s] : {std::pair{1.0, 0.5}, std::pair{0.5, 0.25}, std::pair{2.0, 0.5}}) {
        const auto& ss = polytrope(n);
        const auto ec = envelope_check(ss, PolytropeBoundConfig(n, 1.0, s));
        CHECK(ec.pass);
        CHECK(std::isfinite(ec.C_best));
        CHECK(ec.C_best > 0);
        CHECK(std::abs(ec.C_refined - ec.C_best) <= 0.1 * ec.C_refined);
        CHECK(std::isfinite(ec.integral));
        CHECK(ec.integral > 0);
        REQUIRE(ec.radii.size() == ec.ratio.size());
        for (std::size_t i = 0; i < ec.radii.size(); ++i) {
            CHECK(ec.rho_tilde[i] >= 0);
            CHECK(ec.rho_tilde[i] <= ec.C_best * ec.envelope[i] * (1 + 1e-12));
        }
    }
}

TEST_CASE("envelope samples cluster at both ends")
{
    const auto r = envelope_samples(2.0, 16);
    CHECK(r.front() == doctest::Approx(2e-6));
    CHECK(2.0 - r.back() == doctest::Approx(2e-6));
    for (std::size_t i = 1; i < r.size(); ++i) CHECK(r[i] > r[i - 1]);
    CHECK(envelope_samples(2.0, 32).size() > r.size());
}

TEST_CASE("local frequency model gives a finite trace bound")
{
    const auto& ss = polytrope(1.0);
    MapOptions mo;
    mo.nE = mo.nL = 8;
    const auto fm = build_frequency_map(ss, mo);
    const auto fit = fit_local_model(ss, fm);
    CHECK(fit.a > 0);
    CHECK(fit.b > 0);
    CHECK(fit.omega_star == doctest::Approx(fm.omega_star).epsilon(1e-6));

    const double E0 = ss.E0();
    mo.model = [=](double E, double L) { return fit.omega_star + fit.a * (E0 - E) + fit.b * L * L; };
    mo.nE = mo.nL = 16;
    const auto coarse = build_frequency_map(ss, mo);
    const auto tb = trace_bound(ss, coarse);
    CHECK(tb.finite);
    CHECK(std::isfinite(tb.value));
    CHECK(divergence_diagnostic(ss, coarse, 1e-3 * ss.R0()).verdict == "convergent");
}
