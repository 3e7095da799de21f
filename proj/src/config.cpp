#include "antonov/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace antonov {

ConfigError::ConfigError(int line, const std::string& msg)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg), line_(line)
{
}

std::uint64_t fnv1a64(const std::string& data)
{
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double to_double(const std::string& v, int line, const std::string& key)
{
    double x = 0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), x);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size() || !std::isfinite(x))
        throw ConfigError(line, key + ": expected a number, got '" + v + "'");
    return x;
}

int to_int(const std::string& v, int line, const std::string& key)
{
    int x = 0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), x);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size())
        throw ConfigError(line, key + ": expected an integer, got '" + v + "'");
    return x;
}

struct Parser {
    RunConfig cfg;
    std::map<std::string, int> seen;

    using Setter = std::function<void(const std::string&, int, const std::string&)>;
    std::map<std::string, Setter> setters;

    template <class T>
    void number(const std::string& key, T& field, T lo, T hi, bool open_lo = false)
    {
        setters[key] = [&field, lo, hi, open_lo](const std::string& v, int line, const std::string& k) {
            T x;
            if constexpr (std::is_same_v<T, int>)
                x = to_int(v, line, k);
            else
                x = to_double(v, line, k);
            if ((open_lo ? !(x > lo) : !(x >= lo)) || !(x <= hi)) {
                std::ostringstream os;
                os << k << " = " << v << " outside " << (open_lo ? "(" : "[") << lo << ", " << hi << "]";
                throw ConfigError(line, os.str());
            }
            field = x;
        };
    }

    void choice(const std::string& key, std::string& field, std::vector<std::string> allowed)
    {
        setters[key] = [&field, allowed](const std::string& v, int line, const std::string& k) {
            if (std::find(allowed.begin(), allowed.end(), v) == allowed.end())
                throw ConfigError(line, k + ": unknown value '" + v + "'");
            field = v;
        };
    }

    Parser()
    {
        auto& m = cfg.model;
        number("model.n", m.n, 0.0, 3.5, true);
        number("model.amplitude", m.amplitude, 0.0, 1e12, true);
        number("model.y_central", m.y_central, 0.0, 1e12, true);
        choice("model.external", m.external, {"none", "plummer", "isochrone"});
        number("model.external_mass", m.external_mass, 0.0, 1e12, true);
        number("model.external_scale", m.external_scale, 0.0, 1e12, true);
        auto& g = cfg.grids;
        number("grids.radial_nodes", g.radial_nodes, 16, 1000000);
        number("grids.nE", g.nE, 1, 512);
        number("grids.nL", g.nL, 1, 512);
        number("grids.chart_samples", g.chart_samples, 8, 4096);
        number("grids.theta_samples", g.theta_samples, 8, 8192);
        number("grids.k_max", g.k_max, 1, 64);
        number("grids.J", g.J, 1, 200);
        choice("grids.basis", g.basis, {"bessel", "legendre"});
        setters["grids.basis_edge"] = [&g](const std::string& v, int line, const std::string& k) {
            if (v == "auto") {
                g.basis_edge.reset();
                return;
            }
            const double x = to_double(v, line, k);
            if (!(x >= 0 && x <= 10)) throw ConfigError(line, k + " = " + v + " outside [0, 10]");
            g.basis_edge = x;
        };
        number("grids.lambda_points", g.lambda_points, 2, 100000);
        number("grids.lambda_depth", g.lambda_depth, 0.0, 50.0, true);
        number("grids.eigen_top", g.eigen_top, 1, 200);
        auto& t = cfg.tolerances;
        number("tolerances.margin", t.margin, 0.0, 0.5, true);
        number("tolerances.divergence_epsilon", t.divergence_epsilon, 0.0, 0.5, true);
        number("tolerances.divergence_levels", t.divergence_levels, 4, 60);
        number("tolerances.trace_levels", t.trace_levels, 4, 14);
        auto& b = cfg.bounds;
        number("bounds.c", b.c, 0.0, 1e12, true);
        number("bounds.s", b.s, 0.0, 1.0, true);
        number("bounds.samples", b.samples, 2, 4096);
        auto& o = cfg.outputs;
        setters["outputs.directory"] = [&o](const std::string& v, int line, const std::string& k) {
            if (v.empty()) throw ConfigError(line, k + " is empty");
            o.directory = v;
        };
        setters["outputs.formats"] = [&o](const std::string& v, int line, const std::string& k) {
            o.formats.clear();
            std::stringstream ss(v);
            std::string item;
            while (std::getline(ss, item, ',')) {
                item = trim(item);
                if (item != "csv" && item != "json" && item != "text")
                    throw ConfigError(line, k + ": unknown format '" + item + "'");
                o.formats.push_back(item);
            }
            if (o.formats.empty()) throw ConfigError(line, k + " is empty");
        };
    }

    void feed(const std::string& text)
    {
        std::istringstream in(text);
        std::string raw, section;
        int line = 0;
        while (std::getline(in, raw)) {
            ++line;
            std::string s = trim(raw);
            if (s.empty() || s[0] == '#' || s[0] == ';') continue;
            if (s.front() == '[') {
                if (s.back() != ']') throw ConfigError(line, "malformed section header '" + s + "'");
                section = trim(s.substr(1, s.size() - 2));
                static const std::vector<std::string> known{"model", "grids", "tolerances", "bounds", "outputs"};
                if (std::find(known.begin(), known.end(), section) == known.end())
                    throw ConfigError(line, "unknown section [" + section + "]");
                continue;
            }
            const auto eq = s.find('=');
            if (eq == std::string::npos) throw ConfigError(line, "expected key = value, got '" + s + "'");
            if (section.empty()) throw ConfigError(line, "key outside any section");
            const std::string key = section + "." + trim(s.substr(0, eq));
            std::string value = trim(s.substr(eq + 1));
            const auto hash = value.find_first_of("#;");
            if (hash != std::string::npos) value = trim(value.substr(0, hash));
            const auto it = setters.find(key);
            if (it == setters.end()) throw ConfigError(line, "unknown key '" + key + "'");
            if (seen.count(key)) throw ConfigError(line, "duplicate key '" + key + "'");
            it->second(value, line, key);
            seen[key] = line;
        }
        const auto& m = cfg.model;
        const double smax = std::min(m.n, 1.0);
        if (!(cfg.bounds.s < smax)) {
            const auto it = seen.find("bounds.s");
            throw ConfigError(it != seen.end() ? it->second : 0,
                              "bounds.s = " + fmt(cfg.bounds.s) + " must be below min(n, 1) = " + fmt(smax));
        }
    }
};

}  // namespace

std::string RunConfig::canonical() const
{
    std::ostringstream os;
    os << "model.n=" << fmt(model.n) << "\nmodel.amplitude=" << fmt(model.amplitude)
       << "\nmodel.y_central=" << fmt(model.y_central) << "\nmodel.external=" << model.external
       << "\nmodel.external_mass=" << fmt(model.external_mass) << "\nmodel.external_scale=" << fmt(model.external_scale)
       << "\ngrids.radial_nodes=" << grids.radial_nodes << "\ngrids.nE=" << grids.nE << "\ngrids.nL=" << grids.nL
       << "\ngrids.chart_samples=" << grids.chart_samples << "\ngrids.theta_samples=" << grids.theta_samples
       << "\ngrids.k_max=" << grids.k_max << "\ngrids.J=" << grids.J << "\ngrids.basis=" << grids.basis
       << "\ngrids.basis_edge=" << (grids.basis_edge ? fmt(*grids.basis_edge) : std::string("auto"))
       << "\ngrids.lambda_points=" << grids.lambda_points << "\ngrids.lambda_depth=" << fmt(grids.lambda_depth)
       << "\ngrids.eigen_top=" << grids.eigen_top << "\ntolerances.margin=" << fmt(tolerances.margin)
       << "\ntolerances.divergence_epsilon=" << fmt(tolerances.divergence_epsilon)
       << "\ntolerances.divergence_levels=" << tolerances.divergence_levels
       << "\ntolerances.trace_levels=" << tolerances.trace_levels << "\nbounds.c=" << fmt(bounds.c)
       << "\nbounds.s=" << fmt(bounds.s) << "\nbounds.samples=" << bounds.samples << "\noutputs.formats=";
    for (std::size_t i = 0; i < outputs.formats.size(); ++i) os << (i ? "," : "") << outputs.formats[i];
    os << "\n";
    return os.str();
}

std::string RunConfig::hash() const
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(canonical())));
    return buf;
}

bool RunConfig::wants(const std::string& format) const
{
    return std::find(outputs.formats.begin(), outputs.formats.end(), format) != outputs.formats.end();
}

RunConfig parse_config(const std::string& text)
{
    Parser p;
    p.feed(text);
    return p.cfg;
}

RunConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError(0, "cannot read config '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

}  // namespace antonov
