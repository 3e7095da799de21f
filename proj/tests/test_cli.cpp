#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "antonov/pipeline.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

using namespace antonov;
namespace fs = std::filesystem;

namespace {

int config_error_line(const std::string& text)
{
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.line();
    }
    return -1;
}

std::string read(const fs::path& p)
{
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> data_lines(const fs::path& p)
{
    std::ifstream in(p);
    std::vector<std::string> out;
    std::string line;
    while (std::getline(in, line))
        if (!line.empty() && line[0] != '#') out.push_back(line);
    return out;
}

int run(const std::string& args)
{
    const int rc = std::system((std::string(ANTONOV_CLI) + " " + args).c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

fs::path scratch(const std::string& name)
{
    const auto p = fs::temp_directory_path() / ("antonov_cli_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

SpectralReport sample_report()
{
    SpectralReport rep;
    rep.config_hash = "0123456789abcdef";
    rep.omega_star = 2.4435488480000001;
    rep.E_star = -1.25;
    rep.L_star = 1e-7;
    rep.bands = {{1, 5.97, 9.1}, {2, 23.88, 36.4}};
    rep.trace_bound = 2.3;
    rep.trace_bound_coarse = 2.29;
    rep.predicted_max_modes = predicted_max_modes(2.3);
    rep.lambda = {0, 1.5, 5.9};
    rep.nu = {{0.5, 0.1}, {0.7, 0.2}, {1.3, 0.3}};
    rep.trace = {0.9, 1.1, 2.0};
    rep.modes = {{4.1, std::sqrt(4.1), 1e-12, 1, false, {0.1, -0.2, 0.3}}};
    rep.divergence_delta = {0.1, 0.05};
    rep.divergence_partial = {1.0, 1.1};
    rep.divergence_verdict = "convergent";
    rep.kphi_kernel = rep.kphi_parts = 3.25;
    rep.domega_dE = -8.2;
    rep.k_tail = 1e-3;
    return rep;
}

}  // namespace

TEST_CASE("config defaults and overrides")
{
    const auto d = parse_config("");
    CHECK(d.model.n == 1);
    CHECK(d.grids.basis == "bessel");
    CHECK(!d.grids.basis_edge);
    CHECK(d.wants("json"));
    const auto c = parse_config("# comment\n[model]\nn = 2 ; trailing\nexternal = plummer\n\n[grids]\nbasis_edge = 1.5\n"
                                "[outputs]\nformats = csv, text\n");
    CHECK(c.model.n == 2);
    CHECK(c.model.external == "plummer");
    REQUIRE(c.grids.basis_edge);
    CHECK(*c.grids.basis_edge == 1.5);
    CHECK(c.wants("csv"));
    CHECK(!c.wants("json"));
}

TEST_CASE("config errors carry line numbers")
{
    CHECK(config_error_line("[model]\nn = 1\nbogus = 3\n") == 3);
    CHECK(config_error_line("[model]\n\n[nonsense]\n") == 3);
    CHECK(config_error_line("n = 1\n") == 1);
    CHECK(config_error_line("[grids]\nJ = twelve\n") == 2);
    CHECK(config_error_line("[grids]\nJ = 12.5\n") == 2);
    CHECK(config_error_line("[model]\nn = 4\n") == 2);
    CHECK(config_error_line("[model]\nn = 0\n") == 2);
    CHECK(config_error_line("[model]\nn = 1\nn = 2\n") == 3);
    CHECK(config_error_line("[model]\nexternal = kepler\n") == 2);
    CHECK(config_error_line("[outputs]\nformats = csv, xml\n") == 2);
    CHECK(config_error_line("[model]\nn = 0.5\n[bounds]\ns = 0.5\n") == 4);
    CHECK(config_error_line("[model\n") == 1);
    CHECK(config_error_line("[tolerances]\ntrace_levels = 40\n") == 2);
    CHECK_THROWS_AS(load_config("/nonexistent/antonov.ini"), ConfigError);
}

TEST_CASE("config hash is canonical")
{
    const auto a = parse_config("[model]\nn = 1\n");
    const auto b = parse_config("# same thing\n[model]\nn = 1.0   \n[grids]\nJ = 20\n");
    const auto c = parse_config("[model]\nn = 1.5\n");
    CHECK(a.hash() == b.hash());
    CHECK(a.hash() != c.hash());
    CHECK(a.hash().size() == 16);
    CHECK(fnv1a64("") == 14695981039346656037ull);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
}

TEST_CASE("report json round trip")
{
    auto rep = sample_report();
    CHECK(report_from_json(to_json(rep)) == rep);
    rep.trace_bound = std::numeric_limits<double>::infinity();
    rep.trace_bound_finite = false;
    rep.predicted_max_modes = -1;
    rep.modes.clear();
    CHECK(report_from_json(to_json(rep)) == rep);
    CHECK(to_json(rep).find("\"schema_version\": 1") != std::string::npos);
}

TEST_CASE("report verdicts")
{
    auto rep = sample_report();
    CHECK(rep.predicted_max_modes == 2);
    const auto text = to_text(rep);
    CHECK(text.find("predicted_max_modes: 2") != std::string::npos);
    CHECK(text.find("1 oscillating mode detected") != std::string::npos);
    CHECK(summary_line(rep) == "modes found: 1, trace bound: 2.2999999999999998");
    rep.modes.clear();
    rep.trace_bound = 0.5;
    rep.predicted_max_modes = 0;
    CHECK(verdict_sentence(rep) == "no oscillating modes detected in (0, ω*²)");
    CHECK(summary_line(rep).rfind("modes found: 0, trace bound: <1", 0) == 0);
    CHECK(to_text(rep).find("no oscillating modes detected in (0, ω*²)") != std::string::npos);
}

TEST_CASE("csv carries header and full precision")
{
    std::ostringstream os;
    write_csv(os, "abc", {"x", "y"}, {{0.1, 1.0 / 3.0}});
    const auto s = os.str();
    CHECK(s.rfind("# schema_version=1 config_hash=abc\n", 0) == 0);
    CHECK(s.find("x,y\n0.10000000000000001,0.33333333333333331\n") != std::string::npos);
}

TEST_CASE("cli solve smoke test")
{
    const auto out = scratch("solve");
    CHECK(run("solve --config " ANTONOV_FIXTURES "/polytrope_n1.ini --out " + out.string() + " > /dev/null") == 0);
    const auto csv = read(out / "steady_state.csv");
    CHECK(csv.find("M=") != std::string::npos);
    CHECK(csv.find("R0=0.69") != std::string::npos);
    CHECK(csv.find("E0=") != std::string::npos);
    CHECK(csv.find("config_hash=" + load_config(ANTONOV_FIXTURES "/polytrope_n1.ini").hash()) != std::string::npos);
    CHECK(data_lines(out / "steady_state.csv").size() > 100);
    CHECK(read(out / "steady_state.json").find("\"schema_version\": 1") != std::string::npos);
}

TEST_CASE("cli exit codes")
{
    const auto dir = scratch("errors");
    {
        std::ofstream bad(dir / "bad.ini");
        bad << "[model]\nn = 1\nwhatever = 2\n";
    }
    CHECK(run("solve --config " + (dir / "bad.ini").string() + " 2> " + (dir / "err.txt").string()) == 2);
    CHECK(read(dir / "err.txt").find("line 3") != std::string::npos);
    {
        std::ofstream bad(dir / "deep.ini");
        bad << "[model]\ny_central = 1e9\n[grids]\nradial_nodes = 16\n";
    }
    const int rc = run("periods --config " + (dir / "deep.ini").string() + " --out " + (dir / "o").string() +
                       " > /dev/null 2> " + (dir / "err3.txt").string());
    CHECK(rc == 3);
    CHECK(read(dir / "err3.txt").find("numerical failure in orbits::build_frequency_map") != std::string::npos);
    CHECK(run("frobnicate > /dev/null 2>&1") != 0);
}

TEST_CASE("cli spectrum shape contract")
{
    const auto out = scratch("spectrum");
    CHECK(run("spectrum --config " ANTONOV_FIXTURES "/stable_isochrone.ini --lambda-points 32 --out " + out.string() +
              " > /dev/null") == 0);
    const auto rows = data_lines(out / "eigencurves.csv");
    REQUIRE(rows.size() == 33);
    CHECK(rows.front().rfind("lambda,nu_1,", 0) == 0);
    CHECK(data_lines(out / "bands.csv").size() == 7);
    const auto diag = read(out / "diagnostics.json");
    for (const char* key : {"omega_star", "argmin", "on_circular", "trace_bound", "predicted_max_modes", "kphi_traces",
                            "divergence_verdict", "schema_version", "config_hash"})
        CHECK(diag.find(std::string("\"") + key + "\"") != std::string::npos);
    CHECK(read(out / "modes.json").find("\"modes\"") != std::string::npos);
}

TEST_CASE("cli report on the stable fixture")
{
    const auto out = scratch("report");
    CHECK(run("report --config " ANTONOV_FIXTURES "/stable_isochrone.ini --out " + out.string() + " > /dev/null") == 0);
    const auto text = read(out / "report.txt");
    CHECK(text.find("modes found: 0, trace bound: <1") != std::string::npos);
    CHECK(text.find("no oscillating modes detected in (0, ω*²)") != std::string::npos);
    const auto rep = report_from_json(read(out / "report.json"));
    CHECK(rep.modes.empty());
    CHECK(rep.trace_bound < 1);
    CHECK(rep.predicted_max_modes == 0);
    CHECK(data_lines(out / "bounds.csv").size() > 16);
    CHECK(data_lines(out / "frequency_map.csv").size() == 257);
}
