#include "antonov/pipeline.hpp"

#include "antonov/log.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

namespace antonov {

StageError::StageError(const std::string& module, const std::string& operation, const std::string& what)
    : NumericalError(module + "::" + operation + ": " + what), module_(module), operation_(operation)
{
}

namespace {

template <class F>
auto stage(const char* module, const char* operation, F&& f)
{
    log::info(std::string(module) + "::" + operation);
    try {
        return f();
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(module, operation, e.what());
    }
}

std::ofstream open(const std::string& dir, const std::string& name)
{
    std::filesystem::create_directories(dir);
    const auto path = std::filesystem::path(dir) / name;
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    return os;
}

double basis_edge(const RunConfig& cfg)
{
    return cfg.grids.basis_edge ? *cfg.grids.basis_edge : cfg.model.n + 0.5;
}

/// Geometric tail of the per-k traces beyond k_max, relative to the total, at lambda.
double k_tail_estimate(const ResponseKernel& kernel, double lambda)
{
    const int K = kernel.k_max;
    if (K < 2) return std::numeric_limits<double>::infinity();
    const auto t0 = response_trace_by_k(kernel, 0.0);
    const auto tl = response_trace_by_k(kernel, lambda);
    double total = 0;
    for (double t : tl) total += t;
    const double a = t0[static_cast<std::size_t>(K - 2)], b = t0[static_cast<std::size_t>(K - 1)];
    if (!(a > 0) || !(total > 0)) return 0;
    const double q = b / a;
    if (!(q < 1)) return std::numeric_limits<double>::infinity();
    const double kk = double(K + 1) * (K + 1) * kernel.omega_star * kernel.omega_star;
    return b * q / (1 - q) / (1 - lambda / kk) / total;
}

}  // namespace

SteadyState build_state(const RunConfig& cfg)
{
    return stage("steady_state", "solve_equilibrium", [&] {
        const auto& m = cfg.model;
        const auto df = DistributionFunction::polytrope(m.n, m.amplitude);
        std::optional<ExternalPotential> ext;
        if (m.external == "plummer") ext = external::plummer(m.external_mass, m.external_scale);
        if (m.external == "isochrone") ext = external::isochrone(m.external_mass, m.external_scale);
        SolveOptions so;
        so.radial_nodes = static_cast<std::size_t>(cfg.grids.radial_nodes);
        return solve_equilibrium(df, ext ? &*ext : nullptr, m.y_central, so);
    });
}

FrequencyMap build_map(const SteadyState& ss, const RunConfig& cfg)
{
    return stage("orbits", "build_frequency_map", [&] {
        MapOptions mo;
        mo.nE = static_cast<std::size_t>(cfg.grids.nE);
        mo.nL = static_cast<std::size_t>(cfg.grids.nL);
        mo.chart_samples = static_cast<std::size_t>(cfg.grids.chart_samples);
        return build_frequency_map(ss, mo);
    });
}

PotentialDensityBasis build_basis(const SteadyState& ss, const RunConfig& cfg)
{
    return stage("response", "basis", [&] {
        const auto fam = cfg.grids.basis == "legendre" ? BasisFamily::legendre : BasisFamily::bessel;
        return PotentialDensityBasis(ss.R0(), static_cast<std::size_t>(cfg.grids.J), fam, basis_edge(cfg));
    });
}

SpectralReport compute_report(const RunConfig& cfg, const SteadyState& ss, const FrequencyMap& fm)
{
    SpectralReport rep;
    rep.config_hash = cfg.hash();
    rep.omega_star = fm.omega_star;
    rep.E_star = fm.E_star;
    rep.L_star = fm.L_star;
    rep.on_circular = fm.on_circular;
    rep.bands = report_bands(stage("response", "essential_bands", [&] { return essential_bands(fm, cfg.grids.k_max); }));

    const auto basis = build_basis(ss, cfg);
    ResponseOptions ro;
    ro.k_max = cfg.grids.k_max;
    ro.theta_samples = static_cast<std::size_t>(cfg.grids.theta_samples);
    ro.margin = cfg.tolerances.margin;
    const auto kernel = stage("response", "prepare_response", [&] { return prepare_response(fm, basis, ro); });
    const auto lambdas = lambda_grid(fm.omega_star, static_cast<std::size_t>(cfg.grids.lambda_points), cfg.grids.lambda_depth);
    const auto curves = stage("response", "eigencurves", [&] {
        return eigencurves(kernel, lambdas, static_cast<std::size_t>(cfg.grids.eigen_top));
    });
    rep.lambda = curves.lambda;
    rep.nu = curves.nu;
    rep.trace = curves.trace;
    rep.modes = report_modes(stage("response", "locate_modes", [&] { return locate_modes(kernel, curves); }));
    rep.k_tail = k_tail_estimate(kernel, lambdas.back());

    const auto tb = stage("response", "trace_bound", [&] { return trace_bound(ss, fm, cfg.tolerances.trace_levels); });
    rep.trace_bound = tb.value;
    rep.trace_bound_coarse = tb.coarse;
    rep.trace_bound_finite = tb.finite;
    rep.predicted_max_modes = tb.predicted_max_modes;

    const auto dd = stage("response", "divergence_diagnostic", [&] {
        return divergence_diagnostic(ss, fm, cfg.tolerances.divergence_epsilon * ss.R0(), cfg.tolerances.divergence_levels);
    });
    rep.divergence_delta = dd.delta;
    rep.divergence_partial = dd.partial;
    rep.divergence_verdict = dd.verdict;
    const auto kt = stage("response", "kphi_trace_check", [&] { return kphi_trace_check(ss); });
    rep.kphi_kernel = kt.kernel;
    rep.kphi_parts = kt.parts;
    rep.domega_dE = stage("response", "frequency_energy_slope", [&] { return frequency_energy_slope(ss, fm); });
    return rep;
}

EnvelopeCheck compute_bounds(const RunConfig& cfg, const SteadyState& ss)
{
    return stage("bounds", "envelope_check", [&] {
        PolytropeBoundConfig pc(cfg.model.n, cfg.bounds.c, cfg.bounds.s, envelope_samples(ss.R0(), cfg.bounds.samples));
        return envelope_check(ss, pc);
    });
}

void write_state(const RunConfig& cfg, const SteadyState& ss, const std::string& dir)
{
    const auto& m = cfg.model;
    if (cfg.wants("csv")) {
        std::vector<std::vector<double>> rows;
        for (std::size_t i = 0; i < ss.grid().size(); ++i)
            rows.push_back({ss.grid()[i], ss.grid_U()[i], ss.grid_dU()[i], ss.grid_rho()[i]});
        auto os = open(dir, "steady_state.csv");
        write_csv(os, cfg.hash(), {"r", "U", "dU", "rho0"}, rows,
                  {"n=" + format_double(m.n) + " amplitude=" + format_double(m.amplitude),
                   "M=" + format_double(ss.mass()) + " R0=" + format_double(ss.R0()) + " E0=" + format_double(ss.E0()) +
                       " U0=" + format_double(ss.U0())});
    }
    if (cfg.wants("json")) {
        auto os = open(dir, "steady_state.json");
        os << "{\n  \"schema_version\": " << kSchemaVersion << ",\n  \"config_hash\": \"" << cfg.hash()
           << "\",\n  \"n\": " << format_double(m.n) << ",\n  \"amplitude\": " << format_double(m.amplitude)
           << ",\n  \"E0\": " << format_double(ss.E0()) << ",\n  \"R0\": " << format_double(ss.R0())
           << ",\n  \"U0\": " << format_double(ss.U0()) << ",\n  \"M\": " << format_double(ss.mass()) << "\n}\n";
    }
}

void write_periods(const RunConfig& cfg, const FrequencyMap& fm, const std::string& dir)
{
    if (!cfg.wants("csv")) return;
    std::vector<std::vector<double>> rows;
    for (const auto& nd : fm.nodes)
        rows.push_back({nd.E, nd.L, nd.orbit.r_minus, nd.orbit.r_plus, 2 * M_PI / nd.omega_orbit, nd.omega_orbit});
    auto os = open(dir, "frequency_map.csv");
    write_csv(os, cfg.hash(), {"E", "L", "r_minus", "r_plus", "T", "omega_r"}, rows,
              {"omega_star=" + format_double(fm.omega_star)});
}

void write_spectrum(const RunConfig& cfg, const SpectralReport& rep, const std::string& dir)
{
    if (cfg.wants("csv")) {
        std::vector<std::vector<double>> rows;
        for (const auto& b : rep.bands) rows.push_back({double(b.k), b.lo, b.hi});
        auto bs = open(dir, "bands.csv");
        write_csv(bs, cfg.hash(), {"k", "lo", "hi"}, rows);

        std::vector<std::string> cols{"lambda"};
        const std::size_t p = rep.nu.empty() ? 0 : rep.nu.front().size();
        for (std::size_t i = 1; i <= p; ++i) cols.push_back("nu_" + std::to_string(i));
        rows.clear();
        for (std::size_t m = 0; m < rep.lambda.size(); ++m) {
            std::vector<double> row{rep.lambda[m]};
            row.insert(row.end(), rep.nu[m].begin(), rep.nu[m].end());
            rows.push_back(row);
        }
        auto es = open(dir, "eigencurves.csv");
        write_csv(es, cfg.hash(), cols, rows);
    }
    if (cfg.wants("json")) {
        const auto full = nlohmann::json::parse(to_json(rep));
        nlohmann::json modes{{"schema_version", kSchemaVersion}, {"config_hash", rep.config_hash}, {"modes", full["modes"]}};
        auto ms = open(dir, "modes.json");
        ms << modes.dump(2) << "\n";
        nlohmann::json diag{{"schema_version", kSchemaVersion},
                            {"config_hash", rep.config_hash},
                            {"omega_star", full["omega_star"]},
                            {"argmin", full["argmin"]},
                            {"on_circular", full["on_circular"]},
                            {"trace_bound", full["trace_bound"]},
                            {"trace_bound_coarse", full["trace_bound_coarse"]},
                            {"trace_bound_finite", full["trace_bound_finite"]},
                            {"predicted_max_modes", full["predicted_max_modes"]},
                            {"kphi_traces", full["kphi_traces"]},
                            {"divergence_verdict", full["divergence"]["verdict"]},
                            {"divergence", full["divergence"]},
                            {"domega_dE", full["domega_dE"]},
                            {"k_tail", full["k_tail"]}};
        auto ds = open(dir, "diagnostics.json");
        ds << diag.dump(2) << "\n";
    }
}

void write_bounds(const RunConfig& cfg, const EnvelopeCheck& ec, const std::string& dir)
{
    if (!cfg.wants("csv")) return;
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < ec.radii.size(); ++i)
        rows.push_back({ec.radii[i], ec.rho_tilde[i], ec.envelope[i], ec.ratio[i]});
    auto os = open(dir, "bounds.csv");
    write_csv(os, cfg.hash(), {"r", "rho_tilde", "envelope", "ratio"}, rows,
              {"C_best=" + format_double(ec.C_best) + " C_refined=" + format_double(ec.C_refined) +
               " pass=" + (ec.pass ? "1" : "0") + " integral=" + format_double(ec.integral)});
}

void write_report(const RunConfig& cfg, const SpectralReport& rep, const std::string& dir)
{
    if (cfg.wants("json")) {
        auto os = open(dir, "report.json");
        os << to_json(rep);
    }
    if (cfg.wants("text")) {
        auto os = open(dir, "report.txt");
        os << to_text(rep);
    }
}

ValidationSummary validate_run(const RunConfig& cfg)
{
    ValidationSummary vs;
    auto add = [&](bool ok, const std::string& line) {
        vs.lines.push_back(std::string(ok ? "ok   " : "FAIL ") + line);
        vs.ok = vs.ok && ok;
    };
    add(true, "config hash " + cfg.hash());
    if (cfg.model.external != "none") {
        const auto ext = cfg.model.external == "plummer" ? external::plummer(cfg.model.external_mass, cfg.model.external_scale)
                                                         : external::isochrone(cfg.model.external_mass, cfg.model.external_scale);
        const auto ec = check_external(ext, cfg.model.external_scale);
        add(ec.ok, "external potential consistency: slope " + format_double(ec.max_slope_error) + ", laplacian " +
                       format_double(ec.max_laplacian_error));
        for (const auto& s : ec.issues) add(false, s);
    }
    const auto ss = build_state(cfg);
    const auto vr = validate_assumptions(ss);
    add(vr.phi_prime_negative, "phi' < 0 on the support");
    add(vr.r2U_nondecreasing, "enclosed mass nondecreasing");
    add(vr.exponent_in_range, "exponent in range");
    add(vr.integrable, "int |phi'| by energy " + format_double(vr.integral_by_energy) + " vs by density " +
                           format_double(vr.integral_by_density) + " (rel " + format_double(vr.relative_difference) + ")");
    for (const auto& s : vr.violations) add(false, s);
    return vs;
}

std::string run_stage(const std::string& command, const RunConfig& cfg, const std::string& dir)
{
    std::ostringstream out;
    const auto ss = build_state(cfg);
    write_state(cfg, ss, dir);
    out << "M = " << format_double(ss.mass()) << ", R0 = " << format_double(ss.R0()) << ", E0 = " << format_double(ss.E0())
        << "\n";
    if (command == "solve") return out.str();
    if (command == "bounds") {
        const auto ec = compute_bounds(cfg, ss);
        write_bounds(cfg, ec, dir);
        out << "C_best = " << format_double(ec.C_best) << ", C_refined = " << format_double(ec.C_refined)
            << (ec.pass ? " (stable)" : " (unstable)") << "\n";
        return out.str();
    }
    const auto fm = build_map(ss, cfg);
    write_periods(cfg, fm, dir);
    out << "omega_star = " << format_double(fm.omega_star) << "\n";
    if (command == "periods") return out.str();
    const auto rep = compute_report(cfg, ss, fm);
    write_spectrum(cfg, rep, dir);
    if (command == "spectrum") return out.str() + summary_line(rep) + "\n";
    if (command != "report") throw std::invalid_argument("unknown command " + command);
    const auto ec = compute_bounds(cfg, ss);
    write_bounds(cfg, ec, dir);
    write_report(cfg, rep, dir);
    return to_text(rep);
}

}  // namespace antonov
