#include "lachesis/simulator.hpp"

#include "lachesis/emission.hpp"
#include "lachesis/errors.hpp"

#include <cmath>
#include <queue>
#include <unordered_map>
#include <utility>

namespace lachesis {

namespace {

// Per-concern seed tags; consuming one stream never shifts another.
constexpr std::uint64_t kStakeTag = 1;
constexpr std::uint64_t kLatencyTag = 2;
constexpr std::uint64_t kCityTag = 3;
constexpr std::uint64_t kJitterTag = 4;

struct Arrival {
    double time = 0.0;
    std::uint64_t order = 0; ///< send counter; breaks time ties deterministically
    NodeId dst = 0;
    /// Rate-limit expiry for dst instead of a delivery; carries no draft.
    bool wake = false;
    EventDraft draft;
};

struct ArrivalAfter {
    bool operator()(const Arrival& a, const Arrival& b) const {
        if (a.time != b.time) {
            return a.time > b.time;
        }
        return a.order > b.order;
    }
};

EventDraft draftOf(const Event& e) {
    EventDraft d;
    d.creator = e.creator;
    d.seq = e.seq;
    d.nonce = e.id.nonce;
    d.selfParent = e.selfParent;
    d.otherParents = e.otherParents;
    d.creationTimeMs = e.creationTimeMs;
    d.qiAtCreation = e.qiAtCreation;
    return d;
}

LatencyModel buildLatency(const SimConfig& cfg, std::uint64_t runSeed) {
    switch (cfg.latency) {
    case LatencySource::Constant:
        return LatencyModel::constant(cfg.nodes, cfg.latencyMs);
    case LatencySource::UniformSynthetic:
        return LatencyModel::uniformSynthetic(cfg.nodes, cfg.latencyMinMs, cfg.latencyMaxMs,
                                              deriveSeed(runSeed, kLatencyTag));
    case LatencySource::CsvDataset: {
        const CityLatencies cities = loadLatencyCsv(cfg.latencyCsv);
        const std::uint64_t citySeed =
            cfg.citySeed != 0 ? cfg.citySeed : deriveSeed(runSeed, kCityTag);
        return LatencyModel::fromCities(cities, cfg.nodes, citySeed);
    }
    }
    fail(ErrorCode::ConfigError, "unknown latency source");
}

/// One node's receive side: inserts drafts whose parents are all present and
/// parks the rest until the missing parent shows up.
class Inbox {
public:
    explicit Inbox(DagStore& store) : store_(store) {}

    void deliver(const EventDraft& draft) {
        if (!tryInsert(draft)) {
            return;
        }
        // Drain everything that was waiting on the newly inserted chain.
        std::vector<EventId> ready{draft.id()};
        while (!ready.empty()) {
            const EventId id = ready.back();
            ready.pop_back();
            const auto it = waiting_.find(id);
            if (it == waiting_.end()) {
                continue;
            }
            std::vector<EventDraft> parked = std::move(it->second);
            waiting_.erase(it);
            for (const EventDraft& p : parked) {
                if (tryInsert(p)) {
                    ready.push_back(p.id());
                }
            }
        }
    }

    bool empty() const { return waiting_.empty(); }

private:
    bool tryInsert(const EventDraft& draft) {
        if (draft.selfParent && !store_.contains(*draft.selfParent)) {
            waiting_[*draft.selfParent].push_back(draft);
            return false;
        }
        for (const EventId& p : draft.otherParents) {
            if (!store_.contains(p)) {
                waiting_[p].push_back(draft);
                return false;
            }
        }
        store_.insert(draft);
        return true;
    }

    DagStore& store_;
    std::unordered_map<EventId, std::vector<EventDraft>, EventIdHash> waiting_;
};

} // namespace

SimulationResult runSimulation(const SimConfig& cfg) {
    if (cfg.nodes < 1) {
        fail(ErrorCode::ConfigError, "nodes must be >= 1");
    }
    if (cfg.durationMs <= 0) {
        fail(ErrorCode::ConfigError, "duration_ms must be > 0");
    }
    const ValidatorSet validators = sampleStakes(cfg.nodes, deriveSeed(cfg.seed, kStakeTag),
                                                 cfg.stakes, cfg.stakeMin, cfg.stakeMax);
    const LatencyModel latency = buildLatency(cfg, cfg.seed);
    Rng jitterRng(deriveSeed(cfg.seed, kJitterTag));

    SimulationResult result;
    result.stores.reserve(cfg.nodes);
    std::vector<Inbox> inboxes;
    inboxes.reserve(cfg.nodes);
    for (std::uint32_t v = 0; v < cfg.nodes; ++v) {
        result.stores.emplace_back(validators);
    }
    for (std::uint32_t v = 0; v < cfg.nodes; ++v) {
        inboxes.emplace_back(result.stores[v]);
    }

    std::priority_queue<Arrival, std::vector<Arrival>, ArrivalAfter> queue;
    std::uint64_t sendCounter = 0;
    const auto broadcast = [&](const Event& e, NodeId src, double sendTime) {
        const EventDraft draft = draftOf(e);
        for (NodeId dst = 0; dst < cfg.nodes; ++dst) {
            if (dst == src) {
                continue;
            }
            double delay = latency.delayMs(src, dst);
            if (cfg.jitterMs > 0) {
                delay += cfg.jitterMs * jitterRng.uniform01();
            }
            queue.push(Arrival{sendTime + delay, sendCounter++, dst, false, draft});
        }
    };

    std::vector<std::int64_t> lastEmit(cfg.nodes, 0);
    std::vector<char> wakePending(cfg.nodes, 0);
    for (NodeId v = 0; v < cfg.nodes; ++v) {
        const Event& leafEvent = buildEvent(result.stores[v], v, cfg.strategy, 0);
        broadcast(leafEvent, v, 0.0);
    }

    while (!queue.empty() && queue.top().time <= static_cast<double>(cfg.durationMs)) {
        const Arrival a = queue.top();
        queue.pop();
        if (a.wake) {
            wakePending[a.dst] = 0;
        } else {
            inboxes[a.dst].deliver(a.draft);
        }

        const std::int64_t nowMs = std::llround(a.time);
        const TimingDecision d =
            evaluateEmission(result.stores[a.dst], a.dst, cfg.strategy, nowMs, lastEmit[a.dst]);
        if (d.emit) {
            const Event& e =
                buildEvent(result.stores[a.dst], a.dst, cfg.strategy, nowMs, d.parents);
            lastEmit[a.dst] = nowMs;
            broadcast(e, a.dst, a.time);
        } else if (d.retryAtMs >= 0 && !wakePending[a.dst]) {
            // The rate limit was the only blocker; without a wake the decision
            // would never be revisited when no further deliveries are due.
            wakePending[a.dst] = 1;
            queue.push(
                Arrival{static_cast<double>(d.retryAtMs), sendCounter++, a.dst, true, {}});
        }
    }

    // Emission has stopped; drain in-flight messages so every node converges
    // on the same DAG.
    while (!queue.empty()) {
        const Arrival a = queue.top();
        queue.pop();
        if (!a.wake) {
            inboxes[a.dst].deliver(a.draft);
        }
    }
    for (const Inbox& inbox : inboxes) {
        if (!inbox.empty()) {
            fail(ErrorCode::MissingParent, "undelivered events after drain");
        }
    }

    const DagStore& observer = result.stores[0];
    MetricsReport& rep = result.report;
    rep.totalEvents = observer.eventCount();
    rep.framesAdvanced = observer.maxFrame() - 1;
    const double seconds = static_cast<double>(cfg.durationMs) / 1000.0;
    rep.framesPerEvent =
        static_cast<double>(rep.framesAdvanced) / static_cast<double>(rep.totalEvents);
    rep.framesPerSecond = static_cast<double>(rep.framesAdvanced) / seconds;
    rep.eventsPerSecond = static_cast<double>(rep.totalEvents) / seconds;
    return result;
}

std::vector<ExperimentRow> runExperiment(const std::vector<SimConfig>& configs,
                                         std::uint32_t repetitions, const RunHook& hook) {
    if (configs.empty() || repetitions == 0) {
        fail(ErrorCode::ConfigError, "experiment needs >= 1 config and >= 1 repetition");
    }
    std::vector<ExperimentRow> rows;
    rows.reserve(configs.size() * repetitions);
    for (const SimConfig& base : configs) {
        for (std::uint32_t run = 0; run < repetitions; ++run) {
            SimConfig cfg = base;
            cfg.seed = base.seed + run;
            const SimulationResult result = runSimulation(cfg);
            ExperimentRow row;
            row.configId = base.effectiveLabel();
            row.runIndex = run;
            row.seed = cfg.seed;
            row.report = result.report;
            rows.push_back(row);
            if (hook) {
                hook(row.configId, run, result);
            }
        }
    }
    return rows;
}

} // namespace lachesis
