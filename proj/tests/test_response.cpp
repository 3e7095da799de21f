#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "antonov/response.hpp"

#include <cmath>
#include <random>

using namespace antonov;

namespace {
const SteadyState& polytrope_state()
{
    static const SteadyState ss = solve_equilibrium(DistributionFunction::polytrope(1.0, 1.0), nullptr, 1.0);
    return ss;
}

MapOptions grid(std::size_t nE, std::size_t nL)
{
    MapOptions mo;
    mo.nE = nE;
    mo.nL = nL;
    return mo;
}

const FrequencyMap& polytrope_map8()
{
    static const FrequencyMap fm = build_frequency_map(polytrope_state(), grid(8, 8));
    return fm;
}

double tapered_edge(const SteadyState& ss) { return ss.df().exponent() + 0.5; }
}  // namespace

TEST_CASE("harmonic map is constant at twice the oscillator frequency")
{
    const double w0 = 1.5;
    const auto ss = SteadyState::from_potential(external::harmonic(w0, 10.0));
    auto mo = grid(6, 6);
    mo.energy_range = std::make_pair(-9.0, -5.0);
    const auto fm = build_frequency_map(ss, mo);
    CHECK(fm.omega_star == doctest::Approx(2 * w0).epsilon(1e-8));
    for (const auto& nd : fm.nodes) {
        CHECK(nd.omega == doctest::Approx(2 * w0).epsilon(1e-8));
        CHECK(nd.weight >= 0);
    }
    const auto es = essential_bands(fm, 3);
    REQUIRE(es.bands.size() == 3);
    for (const auto& b : es.bands) {
        CHECK(b.lo == doctest::Approx(4 * b.k * b.k * w0 * w0).epsilon(1e-7));
        CHECK(b.hi == doctest::Approx(b.lo).epsilon(1e-7));
    }
    CHECK(es.gap_hi == doctest::Approx(fm.omega_star * fm.omega_star));
}

TEST_CASE("kepler map minimum sits at the top of the energy range")
{
    const auto ss = SteadyState::from_potential(external::kepler(1.0));
    auto mo = grid(8, 8);
    mo.energy_range = std::make_pair(-0.5, -0.25);
    const auto fm = build_frequency_map(ss, mo);
    CHECK(fm.omega_star == doctest::Approx(std::pow(0.5, 1.5)).epsilon(1e-8));
    CHECK(fm.E_star == doctest::Approx(-0.25).epsilon(1e-6));
    for (const auto& nd : fm.nodes) {
        CHECK(nd.omega == doctest::Approx(std::pow(-2 * nd.E, 1.5)).epsilon(1e-8));
        CHECK(nd.omega >= fm.omega_star);
    }
}

TEST_CASE("omega_star is stable under map refinement")
{
    const auto& ss = polytrope_state();
    const auto a = build_frequency_map(ss, grid(12, 12));
    const auto b = build_frequency_map(ss, grid(24, 24));
    CHECK(std::abs(a.omega_star - b.omega_star) < 1e-5 * b.omega_star);
    for (const auto& nd : b.nodes) {
        CHECK(nd.omega > 0);
        CHECK(nd.omega >= b.omega_star);
        CHECK(nd.weight >= 0);
        CHECK(nd.mass >= 0);
    }
    CHECK(b.on_circular == (b.t_star > 1 - 1e-6));
}

TEST_CASE("band merging follows interval overlap")
{
    const auto& fm = polytrope_map8();
    const auto es = essential_bands(fm, 4);
    CHECK(es.merged.front().first == 0.0);
    CHECK(es.merged.front().second == 0.0);
    CHECK(es.gap_hi == doctest::Approx(fm.omega_star * fm.omega_star));
    for (std::size_t i = 1; i < es.merged.size(); ++i) CHECK(es.merged[i].first >= es.gap_hi * (1 - 1e-12));
    std::size_t expected = 1;
    for (int k = 1; k <= 4; ++k)
        if (k == 1 || !((k) * fm.omega_min <= (k - 1) * fm.omega_max)) ++expected;
    CHECK(es.merged.size() == expected);
}

TEST_CASE("coulomb product of the uniform ball")
{
    const auto one = [](double) { return 1.0; };
    CHECK(coulomb_self_energy(one, 1.0) == doctest::Approx(16 * M_PI * M_PI / 15).epsilon(1e-10));
    CHECK(coulomb_product(one, one, 1.0) == doctest::Approx(32 * M_PI * M_PI / 15).epsilon(1e-10));

    const PotentialDensityBasis b(1.0, 1, BasisFamily::legendre);
    CHECK(b.raw_gram()(0, 0) == doctest::Approx(32 * M_PI * M_PI / 15).epsilon(1e-10));
    double lam = 0;
    for (double r : {1.0, 1.5, 4.0}) {
        b.raw_potential(r, &lam);
        CHECK(lam == doctest::Approx(4 * M_PI / 3 / r).epsilon(1e-12));
    }
    b.raw_potential(0.5, &lam);
    CHECK(lam == doctest::Approx(2 * M_PI * (1 - 0.25 / 3)).epsilon(1e-12));
}

TEST_CASE("orthonormalized bases have identity gram")
{
    const double R0 = polytrope_state().R0();
    for (auto fam : {BasisFamily::legendre, BasisFamily::bessel})
        for (double e : {0.0, 1.5})
            for (std::size_t J : {std::size_t(1), std::size_t(6), fam == BasisFamily::bessel ? std::size_t(20) : std::size_t(12)}) {
                const PotentialDensityBasis b(R0, J, fam, e);
                const auto& G = b.raw_gram();
                CHECK((G - G.transpose()).cwiseAbs().maxCoeff() == 0.0);
                const auto I = b.orthonormal_gram();
                const double err =
                    (I - Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(J), static_cast<Eigen::Index>(J)))
                        .cwiseAbs()
                        .maxCoeff();
                CHECK(err < 1e-10);
            }
    CHECK_THROWS_AS(PotentialDensityBasis(1.0, 0, BasisFamily::bessel), std::invalid_argument);
    std::vector<double> rho(4);
    PotentialDensityBasis(1.0, 4, BasisFamily::bessel, 1.5).density(1.2, rho.data());
    for (double v : rho) CHECK(v == 0.0);
}

TEST_CASE("tapered basis raw gram matches the coulomb product")
{
    const PotentialDensityBasis b(0.7, 3, BasisFamily::bessel, 1.5);
    auto prof = [&](int j) {
        return [&, j](double r) {
            std::vector<double> v(3);
            b.raw_density(r, v.data());
            return v[static_cast<std::size_t>(j)];
        };
    };
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            CHECK(b.raw_gram()(i, j) == doctest::Approx(coulomb_product(prof(i), prof(j), 0.7, 128)).epsilon(1e-6));
}

namespace {
struct Tiny {
    PotentialDensityBasis basis;
    ResponseKernel kernel;
};

Tiny make_response(const FrequencyMap& fm, std::size_t J, int k_max)
{
    const auto& ss = polytrope_state();
    PotentialDensityBasis b(ss.R0(), J, BasisFamily::bessel, tapered_edge(ss));
    ResponseOptions ro;
    ro.k_max = k_max;
    auto K = prepare_response(fm, b, ro);
    return {std::move(b), std::move(K)};
}
}  // namespace

TEST_CASE("response matrix is symmetric, positive and increasing in lambda")
{
    const auto& fm = polytrope_map8();
    const auto t = make_response(fm, 8, 4);
    const double w2 = fm.omega_star * fm.omega_star;
    std::mt19937 rng(7);
    std::normal_distribution<double> nd;
    std::vector<Eigen::VectorXd> xs;
    for (int s = 0; s < 10; ++s) {
        Eigen::VectorXd x(8);
        for (int i = 0; i < 8; ++i) x(i) = nd(rng);
        xs.push_back(x);
    }
    std::vector<double> prev(xs.size(), -1.0);
    for (double lam : lambda_grid(fm.omega_star, 12)) {
        const auto B = assemble_response(t.kernel, lam);
        CHECK((B - B.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * B.cwiseAbs().maxCoeff());
        CHECK(numerics::sym_eig(B).values.minCoeff() >= -1e-10);
        for (std::size_t s = 0; s < xs.size(); ++s) {
            const double q = xs[s].dot(B * xs[s]);
            CHECK(q >= prev[s]);
            prev[s] = q;
        }
    }
    CHECK_THROWS_WITH(assemble_response(t.kernel, w2), "inside essential spectrum");
    CHECK_THROWS_WITH(assemble_response(t.kernel, 2 * w2), "inside essential spectrum");
}

TEST_CASE("lambda grid refines geometrically toward the gap edge")
{
    const auto g = lambda_grid(2.0, 32);
    REQUIRE(g.size() == 32);
    CHECK(g.front() == 0.0);
    for (std::size_t m = 1; m < g.size(); ++m) {
        CHECK(g[m] > g[m - 1]);
        CHECK(4.0 - g[m] == doctest::Approx(0.5 * (4.0 - g[m - 1]) * std::exp2(1 - 20.0 / 31)).epsilon(1e-9));
    }
    CHECK(g.back() < 4.0);
}

TEST_CASE("per-k traces add up to the trace")
{
    const auto& fm = polytrope_map8();
    const auto t = make_response(fm, 6, 3);
    const double lam = 0.7 * fm.omega_star * fm.omega_star;
    const auto parts = response_trace_by_k(t.kernel, lam);
    REQUIRE(parts.size() == 3);
    double s = 0;
    for (double p : parts) {
        CHECK(p >= 0);
        s += p;
    }
    CHECK(s == doctest::Approx(assemble_response(t.kernel, lam).trace()).epsilon(1e-12));
}

TEST_CASE("galerkin eigenvalues match the dense discretization on the tiny instance")
{
    const auto& fm = polytrope_map8();
    const auto t = make_response(fm, 6, 2);
    const double w2 = fm.omega_star * fm.omega_star;
    for (double f : {0.0, 0.5, 0.9}) {
        const auto nu = numerics::sym_eig(assemble_response(t.kernel, f * w2)).values;
        const auto dense = dense_response_eigenvalues(fm, f * w2, 2);
        for (int i = 0; i < 3; ++i) CHECK(nu(i) == doctest::Approx(dense(i)).epsilon(0.02));
    }
}

TEST_CASE("dense discretization converges in the angle order")
{
    const auto& fm = polytrope_map8();
    const auto a = dense_response_eigenvalues(fm, 0.0, 2, 48);
    const auto b = dense_response_eigenvalues(fm, 0.0, 2, 96);
    for (int i = 0; i < 3; ++i) CHECK(a(i) == doctest::Approx(b(i)).epsilon(1e-2));
    CHECK(a.minCoeff() >= -1e-10);
}

TEST_CASE("rayleigh-ritz monotonicity in the basis size")
{
    const auto& fm = polytrope_map8();
    const double lam = 0.5 * fm.omega_star * fm.omega_star;
    Eigen::VectorXd prev;
    for (std::size_t J : {4u, 8u, 12u}) {
        const auto nu = numerics::sym_eig(assemble_response(make_response(fm, J, 3).kernel, lam)).values;
        if (prev.size() > 0)
            for (Eigen::Index i = 0; i < prev.size(); ++i) CHECK(nu(i) >= prev(i) - 1e-10);
        prev = nu;
    }
}

TEST_CASE("parallel and serial assembly agree bit for bit")
{
    const auto& fm = polytrope_map8();
    const auto& ss = polytrope_state();
    const PotentialDensityBasis b(ss.R0(), 6, BasisFamily::bessel, tapered_edge(ss));
    ResponseOptions ro;
    ro.k_max = 3;
    const auto Kp = prepare_response(fm, b, ro);
    const auto Ks = prepare_response_serial(fm, b, ro);
    CHECK(Kp.coef == Ks.coef);
    CHECK(Kp.mass == Ks.mass);
    const double lam = 0.3 * fm.omega_star * fm.omega_star;
    const auto Bp = assemble_response(Kp, lam);
    const auto Bs = assemble_response_serial(Ks, lam);
    CHECK((Bp.array() == Bs.array()).all());
}

TEST_CASE("eigencurves and modes on the polytrope")
{
    const auto& fm = polytrope_map8();
    const auto t = make_response(fm, 10, 4);
    const double w2 = fm.omega_star * fm.omega_star;
    const auto curves = eigencurves(t.kernel, lambda_grid(fm.omega_star, 32), 4);
    REQUIRE(curves.nu.size() == 32);
    CHECK(curves.nu.front()[0] < 1);
    for (std::size_t m = 0; m < 32; ++m) {
        for (std::size_t i = 1; i < 4; ++i) CHECK(curves.nu[m][i] <= curves.nu[m][i - 1]);
        if (m > 0)
            for (std::size_t i = 0; i < 4; ++i) CHECK(curves.nu[m][i] >= curves.nu[m - 1][i]);
    }
    CHECK(curves.nu.back()[0] > 1);

    const auto modes = locate_modes(t.kernel, curves);
    REQUIRE(!modes.empty());
    for (const auto& md : modes) {
        CHECK(md.lambda > 0);
        CHECK(md.lambda < w2);
        CHECK(md.frequency == doctest::Approx(std::sqrt(md.lambda)));
        CHECK(md.coefficients.size() == 10);
        const auto nu = numerics::sym_eig(assemble_response(t.kernel, md.lambda)).values;
        CHECK(nu(md.curve - 1) == doctest::Approx(1.0).epsilon(1e-6));
        CHECK(md.residual < 1e-6);
    }
    const auto tb = trace_bound(polytrope_state(), fm);
    REQUIRE(tb.finite);
    CHECK(static_cast<long>(modes.size()) <= tb.predicted_max_modes);
}

TEST_CASE("trace of the response stays below the trace bound")
{
    const auto& ss = polytrope_state();
    const auto fm = build_frequency_map(ss, grid(16, 16));
    const auto tb = trace_bound(ss, fm);
    REQUIRE(tb.finite);
    const auto t = make_response(fm, 12, 6);
    for (double f : {0.0, 0.9, 0.999}) {
        const double tr = assemble_response(t.kernel, f * fm.omega_star * fm.omega_star).trace();
        CHECK(tr > 0);
        CHECK(tr <= 1.05 * tb.value);
    }
}

namespace {
FrequencyMap synthetic_map(const SteadyState& ss, std::size_t n, FrequencyModel model)
{
    auto mo = grid(n, n);
    mo.model = std::move(model);
    return build_frequency_map(ss, mo);
}

FrequencyModel corner_model(const SteadyState& ss, double a, double b)
{
    const double E0 = ss.E0();
    return [=](double E, double L) { return 2.0 + a * (E0 - E) + b * L * L; };
}
}  // namespace

TEST_CASE("rho_star with a constant frequency is a multiple of the slope density")
{
    const auto& ss = polytrope_state();
    auto fm = synthetic_map(ss, 4, [](double, double) { return 3.0; });
    CHECK(fm.omega_star == doctest::Approx(3.0));
    fm.omega_star = 2.0;
    const double C = 9.0 / 5.0;
    for (double x : {0.1, 0.4, 0.8, 0.97}) {
        const double r = x * ss.R0();
        const auto v = rho_star(ss, fm, r);
        CHECK(!v.possibly_divergent);
        CHECK(v.refined == doctest::Approx(C * slope_density(ss, r)).epsilon(1e-8));
    }
    CHECK(rho_star(ss, fm, ss.R0()).refined == 0.0);
    CHECK(rho_star(ss, fm, 2 * ss.R0()).value == 0.0);
    CHECK_THROWS_AS(rho_star(ss, fm, -1.0), std::invalid_argument);
}

TEST_CASE("rho_star matches a brute-force velocity-space quadrature")
{
    const auto& ss = polytrope_state();
    const auto model = corner_model(ss, 1.0, 1.0);
    const auto fm = synthetic_map(ss, 8, model);
    REQUIRE(fm.omega_star == doctest::Approx(2.0).epsilon(1e-12));
    const double ws = fm.omega_star, A = ss.df().amplitude();
    for (double x : {0.07, 0.3, 0.6, 0.9}) {
        const double r = x * ss.R0();
        const double U = ss.potential(r), vm = std::sqrt(2 * (ss.E0() - U));
        // d^3v = 2 pi v_t dv_t dv_r, |phi'| = A for n = 1
        const auto inner = [&](double vr) {
            const double vtm = std::sqrt(std::max(0.0, vm * vm - vr * vr));
            if (vtm == 0) return 0.0;
            return numerics::integrate_adaptive(
                [&](double vt) {
                    const double w = model(U + 0.5 * (vr * vr + vt * vt), r * vt);
                    const double den = w * w - ws * ws;
                    return den > 0 ? 2 * M_PI * vt * A * w * w / den : 0.0;
                },
                0, vtm, 1e-11);
        };
        const double brute = 2 * numerics::integrate_adaptive(inner, 0, vm, 1e-10);
        const auto v = rho_star(ss, fm, r);
        CHECK(!v.possibly_divergent);
        CHECK(v.refined == doctest::Approx(brute).epsilon(1e-4));
    }
}

TEST_CASE("predicted mode count from the trace bound")
{
    CHECK(predicted_max_modes(0.3) == 0);
    CHECK(predicted_max_modes(1.0) == 0);
    CHECK(predicted_max_modes(1.2) == 1);
    CHECK(predicted_max_modes(3.0) == 2);
    CHECK(predicted_max_modes(std::numeric_limits<double>::infinity()) == -1);
}

TEST_CASE("node and radial routes to the trace bound agree")
{
    const auto& ss = polytrope_state();
    auto fm = synthetic_map(ss, 16, corner_model(ss, 1.0, 1.0));
    fm.omega_star = 1.8;
    const double radial = trace_bound_radial(ss, fm);
    CHECK(trace_bound_nodes(fm) == doctest::Approx(radial).epsilon(1e-3));
    const auto tb = trace_bound(ss, fm);
    REQUIRE(tb.finite);
    CHECK(tb.value == doctest::Approx(radial).epsilon(1e-3));
}

TEST_CASE("trace bound is linear in the distribution at frozen potential")
{
    const auto& ss = polytrope_state();
    const auto half = ss.with_df(DistributionFunction::polytrope(1.0, 0.5 * ss.df().amplitude()));
    const auto half_map = build_frequency_map(half, grid(8, 8));
    CHECK(trace_bound_nodes(half_map) == doctest::Approx(0.5 * trace_bound_nodes(polytrope_map8())).epsilon(1e-10));
    const auto a = trace_bound(ss, polytrope_map8(), 8);
    const auto b = trace_bound(half, half_map, 8);
    REQUIRE(a.finite);
    CHECK(b.value == doctest::Approx(0.5 * a.value).epsilon(1e-10));
    CHECK(a.predicted_max_modes == predicted_max_modes(a.value));
}

TEST_CASE("graded trace bound is stable where the node sums creep up")
{
    const auto& ss = polytrope_state();
    const auto coarse = build_frequency_map(ss, grid(16, 16));
    const auto fine = build_frequency_map(ss, grid(24, 24));
    const double n16 = trace_bound_nodes(coarse), n24 = trace_bound_nodes(fine);
    CHECK(n24 > n16);
    const auto g = trace_bound(ss, coarse, 10);
    REQUIRE(g.finite);
    CHECK(g.value > n24);
    CHECK(g.coarse == doctest::Approx(g.value).epsilon(1e-3));
    CHECK(trace_bound(ss, fine, 10).value == doctest::Approx(g.value).epsilon(1e-8));
}

TEST_CASE("divergence diagnostic verdicts")
{
    const auto& ss = polytrope_state();
    const double eps = 1e-3 * ss.R0();

    const auto conv = divergence_diagnostic(ss, synthetic_map(ss, 8, corner_model(ss, 1.0, 1.0)), eps);
    CHECK(conv.verdict == "convergent");

    const double Ec = 0.5 * (ss.U0() + ss.E0());
    const double Lc = 0.5 * l_max(ss, Ec);
    const auto fm = synthetic_map(ss, 8, [=](double E, double L) {
        return 2.0 + 3 * (E - Ec) * (E - Ec) + 3 * (L - Lc) * (L - Lc);
    });
    REQUIRE(fm.t_star > 0.1);
    REQUIRE(fm.t_star < 0.9);
    const auto div = divergence_diagnostic(ss, fm, eps);
    CHECK(div.verdict == "divergent trend");

    for (const auto* d : {&conv, &div}) {
        REQUIRE(d->partial.size() == d->delta.size());
        for (std::size_t m = 1; m < d->partial.size(); ++m) {
            CHECK(d->partial[m] >= d->partial[m - 1]);
            CHECK(d->delta[m] < d->delta[m - 1]);
        }
    }
}

TEST_CASE("two routes to the trace of K_phi")
{
    const auto& ss = polytrope_state();
    const auto t = kphi_trace_check(ss);
    CHECK(t.kernel > 0);
    CHECK(t.parts > 0);
    CHECK(t.kernel == doctest::Approx(t.parts).epsilon(1e-5));
    const auto d = kphi_trace_check(ss.with_df(DistributionFunction::polytrope(1.0, 2 * ss.df().amplitude())));
    CHECK(d.kernel == doctest::Approx(2 * t.kernel).epsilon(1e-12));
    CHECK(d.parts == doctest::Approx(2 * t.parts).epsilon(1e-12));
}
