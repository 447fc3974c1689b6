#pragma once

#include "lachesis/config.hpp"
#include "lachesis/simulator.hpp"

#include <string>
#include <vector>

namespace lachesis {

/// Mean and sample standard deviation of every numeric report column over
/// one config's runs.
struct ConfigSummary {
    std::string configId;
    std::uint64_t runs = 0;
    double meanTotalEvents = 0, stddevTotalEvents = 0;
    double meanFramesAdvanced = 0, stddevFramesAdvanced = 0;
    double meanFramesPerEvent = 0, stddevFramesPerEvent = 0;
    double meanFramesPerSecond = 0, stddevFramesPerSecond = 0;
    double meanEventsPerSecond = 0, stddevEventsPerSecond = 0;
};

/// Per-config summaries in first-appearance order of the rows.
std::vector<ConfigSummary> summarize(const std::vector<ExperimentRow>& rows);

/// CSV report: header, per-run rows grouped by config, then a mean and a
/// stddev row per config (run_index column holds "mean"/"stddev", seed
/// empty). Doubles use shortest round-trip formatting.
std::string reportCsv(const std::vector<ExperimentRow>& rows);

/// Parses the run rows of a CSV report (summary rows are recomputed on
/// re-serialization, so reportCsv(parseReportCsv(s)) == s).
std::vector<ExperimentRow> parseReportCsv(const std::string& text);

/// JSON report with a config echo per config id.
std::string reportJson(const std::vector<ExperimentRow>& rows,
                       const std::vector<SimConfig>& configs);

} // namespace lachesis
