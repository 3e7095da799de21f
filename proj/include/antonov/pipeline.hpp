#pragma once
// Config-driven stages behind the command-line tool: solve, periods, spectrum, bounds, report.
// Each stage writes its artifacts into the output directory.

#include "antonov/bounds.hpp"
#include "antonov/config.hpp"
#include "antonov/report.hpp"

#include <string>

namespace antonov {

/// A numerical failure tagged with the stage and operation that raised it.
class StageError : public NumericalError {
public:
    StageError(const std::string& module, const std::string& operation, const std::string& what);
    const std::string& module() const { return module_; }
    const std::string& operation() const { return operation_; }

private:
    std::string module_, operation_;
};

SteadyState build_state(const RunConfig& cfg);
FrequencyMap build_map(const SteadyState& ss, const RunConfig& cfg);
PotentialDensityBasis build_basis(const SteadyState& ss, const RunConfig& cfg);

/// Everything a spectrum run produces.
SpectralReport compute_report(const RunConfig& cfg, const SteadyState& ss, const FrequencyMap& fm);
EnvelopeCheck compute_bounds(const RunConfig& cfg, const SteadyState& ss);

void write_state(const RunConfig& cfg, const SteadyState& ss, const std::string& dir);
void write_periods(const RunConfig& cfg, const FrequencyMap& fm, const std::string& dir);
void write_spectrum(const RunConfig& cfg, const SpectralReport& rep, const std::string& dir);
void write_bounds(const RunConfig& cfg, const EnvelopeCheck& ec, const std::string& dir);
void write_report(const RunConfig& cfg, const SpectralReport& rep, const std::string& dir);

struct ValidationSummary {
    bool ok = true;
    std::vector<std::string> lines;
};

ValidationSummary validate_run(const RunConfig& cfg);

/// Runs one subcommand (solve, periods, spectrum, bounds, report); returns the summary text.
std::string run_stage(const std::string& command, const RunConfig& cfg, const std::string& dir);

}  // namespace antonov
