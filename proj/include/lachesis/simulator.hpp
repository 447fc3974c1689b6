#pragma once

#include "lachesis/config.hpp"
#include "lachesis/dag_store.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace lachesis {

/// Consensus-progress measurements of one simulation run, taken from the
/// observer node's DAG (node 0) after the post-run drain.
struct MetricsReport {
    std::uint64_t totalEvents = 0;
    /// Highest frame reached minus 1 (leaves alone advance nothing).
    std::uint64_t framesAdvanced = 0;
    double framesPerEvent = 0.0;
    double framesPerSecond = 0.0;
    double eventsPerSecond = 0.0;

    bool operator==(const MetricsReport&) const = default;
};

struct SimulationResult {
    MetricsReport report;
    /// Final per-node DAGs; identical across nodes after the drain.
    std::vector<DagStore> stores;
};

/// Deterministic discrete-event run: every node emits its leaf at t = 0;
/// each arrival is inserted (or buffered until its parents arrive), then the
/// destination re-evaluates its emission policy and broadcasts any new event
/// to all peers under the configured latency model. Emission stops at
/// durationMs; in-flight messages still drain so all nodes converge.
SimulationResult runSimulation(const SimConfig& cfg);

struct ExperimentRow {
    std::string configId;
    std::uint64_t runIndex = 0;
    std::uint64_t seed = 0;
    MetricsReport report;

    bool operator==(const ExperimentRow&) const = default;
};

using RunHook =
    std::function<void(const std::string& configId, std::uint64_t runIndex,
                       const SimulationResult& result)>;

/// Runs each config `repetitions` times with run seeds baseSeed + runIndex,
/// so configs sharing a base seed are seed-paired: stakes, latencies and
/// jitter match per run index and only the strategy differs.
std::vector<ExperimentRow> runExperiment(const std::vector<SimConfig>& configs,
                                         std::uint32_t repetitions,
                                         const RunHook& hook = {});

} // namespace lachesis
