#pragma once
// Spectral report: the quantities a spectrum run produces, with JSON, CSV and text output.

#include "antonov/response.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace antonov {

inline constexpr int kSchemaVersion = 1;

struct ReportMode {
    double lambda = 0, frequency = 0, residual = 0;
    int curve = 0;
    bool at_resolution_limit = false;
    std::vector<double> coefficients;
    bool operator==(const ReportMode&) const = default;
};

struct ReportBand {
    int k = 0;
    double lo = 0, hi = 0;
    bool operator==(const ReportBand&) const = default;
};

struct SpectralReport {
    int schema_version = kSchemaVersion;
    std::string config_hash;

    double omega_star = 0, E_star = 0, L_star = 0;
    bool on_circular = false;
    std::vector<ReportBand> bands;

    double trace_bound = 0;         ///< infinity when divergent
    double trace_bound_coarse = 0;
    bool trace_bound_finite = true;
    long predicted_max_modes = 0;   ///< -1: no bound

    std::vector<double> lambda;
    std::vector<std::vector<double>> nu;  ///< nu[m][i]
    std::vector<double> trace;
    std::vector<ReportMode> modes;

    std::vector<double> divergence_delta, divergence_partial;
    std::string divergence_verdict;
    double kphi_kernel = 0, kphi_parts = 0;
    double domega_dE = 0;
    double k_tail = 0;  ///< estimated relative trace of the k > k_max terms at the last lambda

    bool operator==(const SpectralReport&) const = default;
};

std::vector<ReportBand> report_bands(const EssentialSpectrum& es);
std::vector<ReportMode> report_modes(const std::vector<Mode>& modes);

std::string to_json(const SpectralReport& rep);
SpectralReport report_from_json(const std::string& text);

/// "no oscillating modes detected in (0, ω*²)" or the located count with frequencies.
std::string verdict_sentence(const SpectralReport& rep);
/// "modes found: N, trace bound: <1 (value)" or "modes found: N, trace bound: value".
std::string summary_line(const SpectralReport& rep);
std::string to_text(const SpectralReport& rep);

/// Comment line carrying the schema version and config hash, for CSV artifacts.
std::string artifact_header(const std::string& config_hash);
/// %.17g
std::string format_double(double x);

/// CSV writer: the artifact header, then a column line, then rows at 17 significant digits.
void write_csv(std::ostream& os, const std::string& config_hash, const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows, const std::vector<std::string>& extra_header = {});

}  // namespace antonov
