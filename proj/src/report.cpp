#include "antonov/report.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <sstream>

namespace antonov {

using nlohmann::json;

namespace {

json number(double x)
{
    if (std::isfinite(x)) return x;
    if (std::isnan(x)) return "nan";
    return x > 0 ? "inf" : "-inf";
}

double number(const json& j)
{
    if (j.is_number()) return j.get<double>();
    const std::string s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    return std::numeric_limits<double>::quiet_NaN();
}

json numbers(const std::vector<double>& v)
{
    json a = json::array();
    for (double x : v) a.push_back(number(x));
    return a;
}

std::vector<double> numbers(const json& j)
{
    std::vector<double> v;
    for (const auto& x : j) v.push_back(number(x));
    return v;
}

}  // namespace

std::string format_double(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::vector<ReportBand> report_bands(const EssentialSpectrum& es)
{
    std::vector<ReportBand> out;
    for (const auto& b : es.bands) out.push_back({b.k, b.lo, b.hi});
    return out;
}

std::vector<ReportMode> report_modes(const std::vector<Mode>& modes)
{
    std::vector<ReportMode> out;
    for (const auto& m : modes)
        out.push_back({m.lambda, m.frequency, m.residual, m.curve, m.at_resolution_limit, m.coefficients});
    return out;
}

std::string to_json(const SpectralReport& rep)
{
    json j;
    j["schema_version"] = rep.schema_version;
    j["config_hash"] = rep.config_hash;
    j["omega_star"] = number(rep.omega_star);
    j["argmin"] = {{"E", number(rep.E_star)}, {"L", number(rep.L_star)}};
    j["on_circular"] = rep.on_circular;
    json bands = json::array();
    for (const auto& b : rep.bands) bands.push_back({{"k", b.k}, {"lo", number(b.lo)}, {"hi", number(b.hi)}});
    j["bands"] = bands;
    j["trace_bound"] = number(rep.trace_bound);
    j["trace_bound_coarse"] = number(rep.trace_bound_coarse);
    j["trace_bound_finite"] = rep.trace_bound_finite;
    j["predicted_max_modes"] = rep.predicted_max_modes;
    j["lambda"] = numbers(rep.lambda);
    json nu = json::array();
    for (const auto& row : rep.nu) nu.push_back(numbers(row));
    j["nu"] = nu;
    j["trace"] = numbers(rep.trace);
    json modes = json::array();
    for (const auto& m : rep.modes)
        modes.push_back({{"lambda", number(m.lambda)},
                         {"sqrt_lambda", number(m.frequency)},
                         {"residual", number(m.residual)},
                         {"curve", m.curve},
                         {"at_resolution_limit", m.at_resolution_limit},
                         {"coefficients", numbers(m.coefficients)}});
    j["modes"] = modes;
    j["divergence"] = {{"delta", numbers(rep.divergence_delta)},
                       {"partial", numbers(rep.divergence_partial)},
                       {"verdict", rep.divergence_verdict}};
    j["kphi_traces"] = {{"kernel", number(rep.kphi_kernel)}, {"parts", number(rep.kphi_parts)}};
    j["domega_dE"] = number(rep.domega_dE);
    j["k_tail"] = number(rep.k_tail);
    return j.dump(2) + "\n";
}

SpectralReport report_from_json(const std::string& text)
{
    const json j = json::parse(text);
    SpectralReport rep;
    rep.schema_version = j.at("schema_version").get<int>();
    if (rep.schema_version != kSchemaVersion)
        throw std::runtime_error("unsupported report schema_version " + std::to_string(rep.schema_version));
    rep.config_hash = j.at("config_hash").get<std::string>();
    rep.omega_star = number(j.at("omega_star"));
    rep.E_star = number(j.at("argmin").at("E"));
    rep.L_star = number(j.at("argmin").at("L"));
    rep.on_circular = j.at("on_circular").get<bool>();
    for (const auto& b : j.at("bands"))
        rep.bands.push_back({b.at("k").get<int>(), number(b.at("lo")), number(b.at("hi"))});
    rep.trace_bound = number(j.at("trace_bound"));
    rep.trace_bound_coarse = number(j.at("trace_bound_coarse"));
    rep.trace_bound_finite = j.at("trace_bound_finite").get<bool>();
    rep.predicted_max_modes = j.at("predicted_max_modes").get<long>();
    rep.lambda = numbers(j.at("lambda"));
    for (const auto& row : j.at("nu")) rep.nu.push_back(numbers(row));
    rep.trace = numbers(j.at("trace"));
    for (const auto& m : j.at("modes"))
        rep.modes.push_back({number(m.at("lambda")), number(m.at("sqrt_lambda")), number(m.at("residual")),
                             m.at("curve").get<int>(), m.at("at_resolution_limit").get<bool>(),
                             numbers(m.at("coefficients"))});
    const auto& d = j.at("divergence");
    rep.divergence_delta = numbers(d.at("delta"));
    rep.divergence_partial = numbers(d.at("partial"));
    rep.divergence_verdict = d.at("verdict").get<std::string>();
    rep.kphi_kernel = number(j.at("kphi_traces").at("kernel"));
    rep.kphi_parts = number(j.at("kphi_traces").at("parts"));
    rep.domega_dE = number(j.at("domega_dE"));
    rep.k_tail = number(j.at("k_tail"));
    return rep;
}

std::string verdict_sentence(const SpectralReport& rep)
{
    if (rep.modes.empty()) return "no oscillating modes detected in (0, ω*²)";
    std::ostringstream os;
    os << rep.modes.size() << " oscillating mode" << (rep.modes.size() == 1 ? "" : "s")
       << " detected in (0, ω*²) at sqrt(lambda) =";
    for (std::size_t i = 0; i < rep.modes.size(); ++i)
        os << (i ? ", " : " ") << format_double(rep.modes[i].frequency);
    return os.str();
}

std::string summary_line(const SpectralReport& rep)
{
    std::ostringstream os;
    os << "modes found: " << rep.modes.size() << ", trace bound: ";
    if (!rep.trace_bound_finite)
        os << "inf";
    else if (rep.trace_bound < 1)
        os << "<1 (" << format_double(rep.trace_bound) << ")";
    else
        os << format_double(rep.trace_bound);
    return os.str();
}

std::string to_text(const SpectralReport& rep)
{
    std::ostringstream os;
    os << "schema_version: " << rep.schema_version << "\n";
    os << "config_hash: " << rep.config_hash << "\n";
    os << "omega_star: " << format_double(rep.omega_star) << "  (gap (0, " << format_double(rep.omega_star * rep.omega_star)
       << "))\n";
    os << "argmin: E = " << format_double(rep.E_star) << ", L = " << format_double(rep.L_star)
       << (rep.on_circular ? " (circular)" : "") << "\n";
    if (rep.trace_bound_finite)
        os << "trace bound: " << format_double(rep.trace_bound) << "\n";
    else
        os << "trace bound: infinite (coarse value " << format_double(rep.trace_bound_coarse) << ")\n";
    if (rep.predicted_max_modes < 0)
        os << "predicted_max_modes: unbounded\n";
    else
        os << "predicted_max_modes: " << rep.predicted_max_modes << "\n";
    if (!rep.nu.empty() && !rep.nu.front().empty())
        os << "nu_1(0): " << format_double(rep.nu.front().front()) << "\n";
    os << "divergence test: " << rep.divergence_verdict << "\n";
    os << "kphi traces: " << format_double(rep.kphi_kernel) << " / " << format_double(rep.kphi_parts) << "\n";
    os << "d omega / dE at (E0, 0): " << format_double(rep.domega_dE) << "\n";
    os << "k tail estimate: " << format_double(rep.k_tail) << "\n";
    os << verdict_sentence(rep) << "\n";
    if (rep.trace_bound_finite) {
        if (rep.trace_bound < 1)
            os << "trace bound " << format_double(rep.trace_bound) << " < 1: no eigenvalue in the gap\n";
        else
            os << "trace bound " << format_double(rep.trace_bound) << ": at most " << rep.predicted_max_modes
               << " eigenvalues in the gap, " << rep.modes.size() << " located\n";
    }
    os << summary_line(rep) << "\n";
    return os.str();
}

std::string artifact_header(const std::string& config_hash)
{
    return "# schema_version=" + std::to_string(kSchemaVersion) + " config_hash=" + config_hash;
}

void write_csv(std::ostream& os, const std::string& config_hash, const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows, const std::vector<std::string>& extra_header)
{
    os << artifact_header(config_hash) << "\n";
    for (const auto& h : extra_header) os << "# " << h << "\n";
    for (std::size_t i = 0; i < columns.size(); ++i) os << (i ? "," : "") << columns[i];
    os << "\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_double(row[i]);
        os << "\n";
    }
}

}  // namespace antonov
