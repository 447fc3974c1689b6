#include "lachesis/cli.hpp"

#include "lachesis/config.hpp"
#include "lachesis/errors.hpp"
#include "lachesis/progress.hpp"
#include "lachesis/report.hpp"
#include "lachesis/simulator.hpp"
#include "lachesis/snapshot.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace lachesis {

namespace {

int exitCodeFor(ErrorCode code) {
    switch (code) {
    case ErrorCode::ConfigError:
    case ErrorCode::InvalidRange:
        return 2;
    case ErrorCode::ParseError:
    case ErrorCode::MissingPair:
    case ErrorCode::NegativeLatency:
        return 3;
    case ErrorCode::UnknownEvent:
        return 4;
    default:
        return 1;
    }
}

/// Config-file path plus per-field overrides shared by the simulating
/// subcommands. Override flags win over config-file values.
struct CommonOpts {
    std::string configPath;
    std::uint32_t nodes = 0;
    std::uint64_t seed = 0;
    std::int64_t durationMs = 0;
    std::string stakes;
    std::uint64_t stakeMin = 0;
    std::uint64_t stakeMax = 0;
    std::string timing;
    std::string selection;
    std::uint32_t maxParents = 0;
    std::string threshold;
    std::int64_t minIntervalMs = 0;
    std::string latency;
    double latencyMs = 0;
    double latencyMinMs = 0;
    double latencyMaxMs = 0;
    std::string latencyCsv;
    double jitterMs = -1;
    std::uint64_t citySeed = 0;
    std::string label;

    CLI::Option* oNodes = nullptr;
    CLI::Option* oSeed = nullptr;
    CLI::Option* oDuration = nullptr;
    CLI::Option* oStakes = nullptr;
    CLI::Option* oStakeMin = nullptr;
    CLI::Option* oStakeMax = nullptr;
    CLI::Option* oTiming = nullptr;
    CLI::Option* oSelection = nullptr;
    CLI::Option* oMaxParents = nullptr;
    CLI::Option* oThreshold = nullptr;
    CLI::Option* oMinInterval = nullptr;
    CLI::Option* oLatency = nullptr;
    CLI::Option* oLatencyMs = nullptr;
    CLI::Option* oLatencyMin = nullptr;
    CLI::Option* oLatencyMax = nullptr;
    CLI::Option* oLatencyCsv = nullptr;
    CLI::Option* oJitter = nullptr;
    CLI::Option* oCitySeed = nullptr;
    CLI::Option* oLabel = nullptr;

    void attach(CLI::App* cmd) {
        cmd->add_option("--config", configPath, "Config file (key = value lines)");
        oNodes = cmd->add_option("--nodes", nodes, "Node count");
        oSeed = cmd->add_option("--seed", seed, "Base seed");
        oDuration = cmd->add_option("--duration-ms", durationMs, "Simulated duration");
        oStakes = cmd->add_option("--stakes", stakes, "equal | loguniform");
        oStakeMin = cmd->add_option("--stake-min", stakeMin, "Log-uniform stake minimum");
        oStakeMax = cmd->add_option("--stake-max", stakeMax, "Log-uniform stake maximum");
        oTiming = cmd->add_option("--timing", timing, "Timing metric: qi | rk");
        oSelection = cmd->add_option("--selection", selection, "Selection metric: qi | rk");
        oMaxParents = cmd->add_option("--max-parents", maxParents, "Parent cap per event");
        oThreshold = cmd->add_option("--threshold", threshold, "Timing threshold, e.g. 1/3");
        oMinInterval =
            cmd->add_option("--min-interval-ms", minIntervalMs, "Emission rate limit");
        oLatency = cmd->add_option("--latency", latency, "constant | uniform | csv");
        oLatencyMs = cmd->add_option("--latency-ms", latencyMs, "Constant latency");
        oLatencyMin = cmd->add_option("--latency-min-ms", latencyMinMs, "Uniform latency lo");
        oLatencyMax = cmd->add_option("--latency-max-ms", latencyMaxMs, "Uniform latency hi");
        oLatencyCsv = cmd->add_option("--latency-csv", latencyCsv, "City latency dataset");
        oJitter = cmd->add_option("--jitter-ms", jitterMs, "Uniform per-message jitter");
        oCitySeed = cmd->add_option("--city-seed", citySeed, "City assignment seed");
        oLabel = cmd->add_option("--label", label, "Config id in reports");
    }

    SimConfig materialize() const {
        SimConfig cfg = configPath.empty() ? SimConfig{} : loadConfig(configPath);
        std::ostringstream overrides;
        if (*oNodes) {
            overrides << "nodes = " << nodes << "\n";
        }
        if (*oSeed) {
            overrides << "seed = " << seed << "\n";
        }
        if (*oDuration) {
            overrides << "duration_ms = " << durationMs << "\n";
        }
        if (*oStakes) {
            overrides << "stakes = " << stakes << "\n";
        }
        if (*oStakeMin) {
            overrides << "stake_min = " << stakeMin << "\n";
        }
        if (*oStakeMax) {
            overrides << "stake_max = " << stakeMax << "\n";
        }
        if (*oTiming) {
            overrides << "timing = " << timing << "\n";
        }
        if (*oSelection) {
            overrides << "selection = " << selection << "\n";
        }
        if (*oMaxParents) {
            overrides << "max_parents = " << maxParents << "\n";
        }
        if (*oThreshold) {
            overrides << "threshold = " << threshold << "\n";
        }
        if (*oMinInterval) {
            overrides << "min_interval_ms = " << minIntervalMs << "\n";
        }
        if (*oLatency) {
            overrides << "latency = " << latency << "\n";
        }
        if (*oLatencyMs) {
            overrides << "latency_ms = " << doubleText(latencyMs) << "\n";
        }
        if (*oLatencyMin) {
            overrides << "latency_min_ms = " << doubleText(latencyMinMs) << "\n";
        }
        if (*oLatencyMax) {
            overrides << "latency_max_ms = " << doubleText(latencyMaxMs) << "\n";
        }
        if (*oLatencyCsv) {
            overrides << "latency_csv = " << latencyCsv << "\n";
        }
        if (*oJitter) {
            overrides << "jitter_ms = " << doubleText(jitterMs) << "\n";
        }
        if (*oCitySeed) {
            overrides << "city_seed = " << citySeed << "\n";
        }
        if (*oLabel) {
            overrides << "label = " << label << "\n";
        }
        // Reusing the config parser keeps override validation identical to
        // file validation.
        const SimConfig patch =
            parseConfig(serializeConfig(cfg) + overrides.str(), "command line");
        return patch;
    }
};

void writeOutput(const std::string& text, const std::string& path, std::ostream& out) {
    if (path.empty()) {
        out << text;
        return;
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) {
        fail(ErrorCode::ConfigError, "cannot write output file " + path);
    }
    file << text;
}

std::string renderReport(const std::vector<ExperimentRow>& rows,
                         const std::vector<SimConfig>& configs, const std::string& format) {
    if (format == "json") {
        return reportJson(rows, configs);
    }
    return reportCsv(rows);
}

std::string readFile(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        fail(ErrorCode::ParseError, "cannot open snapshot " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void explainEvent(const DagStore& store, const EventId& id, std::ostream& out) {
    const Event& e = store.event(id);
    out << "event " << e.id.str() << "\n";
    out << "creator " << e.creator << "  seq " << e.seq << "\n";
    out << "selfParent " << (e.selfParent ? e.selfParent->str() : "-") << "\n";
    out << "otherParents";
    if (e.otherParents.empty()) {
        out << " -";
    }
    for (const EventId& p : e.otherParents) {
        out << " " << p.str();
    }
    out << "\n";
    out << "frame " << e.frame << "\n";
    out << "isRoot " << (e.isRoot ? "true" : "false") << "\n";

    out << "highestBefore";
    for (const HbEntry& hb : store.highestBefore(id)) {
        out << " " << hb.seq;
        if (hb.fork) {
            out << "!";
        }
    }
    out << "\n";

    const ProgressReport rep = rootProgress(store, id);
    out << "columns (frame-" << rep.frame << " roots in subgraph):\n";
    for (const RootKnowledgeColumn& col : rep.columns) {
        out << "  root " << col.root.str() << "  counted";
        for (bool b : col.counted) {
            out << " " << (b ? 1 : 0);
        }
        out << "  count " << col.countSum << "  stake " << col.stakeSum << "\n";
    }
    out << "rawSum " << rep.rawSum << "\n";
    const std::uint64_t n = store.nodeCount();
    out << "k = " << rationalText(rep.k) << " of " << n * n << " pairs ("
        << doubleText(rep.k.convert_to<double>()) << ")\n";
}

} // namespace

int runCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Event DAG consensus simulator"};
    app.require_subcommand(1);

    CommonOpts runOpts;
    std::string runOutput, runFormat = "csv";
    CLI::App* cmdRun = app.add_subcommand("run", "Run one simulation and report metrics");
    runOpts.attach(cmdRun);
    cmdRun->add_option("--output", runOutput, "Report file (default stdout)");
    cmdRun->add_option("--format", runFormat, "csv | json")
        ->check(CLI::IsMember({"csv", "json"}));

    CommonOpts sweepOpts;
    std::string sweepOutput, sweepFormat = "csv";
    std::string combosArg = "qi-qi,qi-rk,rk-qi,rk-rk";
    std::uint32_t reps = 20;
    CLI::App* cmdSweep =
        app.add_subcommand("sweep", "Seed-paired sweep over timing-selection combinations");
    sweepOpts.attach(cmdSweep);
    cmdSweep->add_option("--combos", combosArg, "Comma list from {qi,rk}x{qi,rk}");
    cmdSweep->add_option("--reps", reps, "Repetitions per combination");
    cmdSweep->add_option("--output", sweepOutput, "Report file (default stdout)");
    cmdSweep->add_option("--format", sweepFormat, "csv | json")
        ->check(CLI::IsMember({"csv", "json"}));

    CommonOpts dumpOpts;
    std::string dumpOutput;
    CLI::App* cmdDump =
        app.add_subcommand("dump-dag", "Run one simulation and dump the observer DAG");
    dumpOpts.attach(cmdDump);
    cmdDump->add_option("--output", dumpOutput, "Snapshot file (default stdout)");

    std::string snapshotPath, eventArg;
    CLI::App* cmdExplain =
        app.add_subcommand("explain-event", "Show the progress metrics of one event in a snapshot");
    cmdExplain->add_option("--snapshot", snapshotPath, "DAG snapshot file")->required();
    cmdExplain->add_option("--event", eventArg, "Event id creator:seq[:nonce]")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e, out, err);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (cmdRun->parsed()) {
            const SimConfig cfg = runOpts.materialize();
            const SimulationResult result = runSimulation(cfg);
            ExperimentRow row;
            row.configId = cfg.effectiveLabel();
            row.runIndex = 0;
            row.seed = cfg.seed;
            row.report = result.report;
            writeOutput(renderReport({row}, {cfg}, runFormat), runOutput, out);
        } else if (cmdSweep->parsed()) {
            const SimConfig base = sweepOpts.materialize();
            std::vector<SimConfig> configs;
            std::stringstream ss(combosArg);
            std::string combo;
            while (std::getline(ss, combo, ',')) {
                SimConfig cfg = base;
                const auto dash = combo.find('-');
                if (dash == std::string::npos) {
                    fail(ErrorCode::ConfigError, "bad combo '" + combo + "' (want timing-selection)");
                }
                const std::string timingName = combo.substr(0, dash);
                const std::string selectionName = combo.substr(dash + 1);
                cfg.strategy.timing = parseConfig("timing = " + timingName, "combos").strategy.timing;
                cfg.strategy.selection =
                    parseConfig("selection = " + selectionName, "combos").strategy.selection;
                cfg.label = combo;
                configs.push_back(cfg);
            }
            const std::vector<ExperimentRow> rows = runExperiment(configs, reps);
            writeOutput(renderReport(rows, configs, sweepFormat), sweepOutput, out);
        } else if (cmdDump->parsed()) {
            const SimConfig cfg = dumpOpts.materialize();
            const SimulationResult result = runSimulation(cfg);
            writeOutput(dumpDag(result.stores[0]), dumpOutput, out);
        } else if (cmdExplain->parsed()) {
            const DagStore store = loadDag(readFile(snapshotPath), snapshotPath);
            explainEvent(store, parseEventId(eventArg), out);
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return exitCodeFor(e.code());
    }
    return 0;
}

} // namespace lachesis
