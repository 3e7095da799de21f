#pragma once
// Run configuration: sectioned key = value text, '#' or ';' comments.
//
//   [model]      n, amplitude, y_central, external (none | plummer | isochrone), external_mass, external_scale
//   [grids]      radial_nodes, nE, nL, chart_samples, theta_samples, k_max, J, basis (bessel | legendre),
//                basis_edge (auto | number), lambda_points, lambda_depth, eigen_top
//   [tolerances] margin, divergence_epsilon, divergence_levels, trace_levels
//   [bounds]     c, s, samples
//   [outputs]    directory, formats (comma list of csv, json, text)

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace antonov {

class ConfigError : public std::runtime_error {
public:
    ConfigError(int line, const std::string& msg);
    int line() const { return line_; }  ///< 0 when not tied to a line

private:
    int line_;
};

struct RunConfig {
    struct Model {
        double n = 1, amplitude = 1, y_central = 1;
        std::string external = "none";
        double external_mass = 1, external_scale = 1;
    } model;
    struct Grids {
        int radial_nodes = 2000;
        int nE = 24, nL = 24;
        int chart_samples = 64, theta_samples = 128;
        int k_max = 8, J = 20;
        std::string basis = "bessel";
        std::optional<double> basis_edge;  ///< empty: n + 1/2
        int lambda_points = 32;
        double lambda_depth = 20;
        int eigen_top = 6;
    } grids;
    struct Tolerances {
        double margin = 1e-9;
        double divergence_epsilon = 1e-3;  ///< relative to R0
        int divergence_levels = 16;
        int trace_levels = 12;             ///< trace-bound panel grading depth (checked against twice the depth)
    } tolerances;
    struct Bounds {
        double c = 1, s = 0.5;
        int samples = 16;
    } bounds;
    struct Outputs {
        std::string directory = "out";
        std::vector<std::string> formats{"csv", "json", "text"};
    } outputs;

    /// Canonical key = value listing of every field (defaults included), used for hashing.
    std::string canonical() const;
    /// FNV-1a 64 of canonical(), as 16 hex digits.
    std::string hash() const;
    bool wants(const std::string& format) const;
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

std::uint64_t fnv1a64(const std::string& data);

}  // namespace antonov
