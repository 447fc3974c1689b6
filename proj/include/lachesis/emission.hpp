#pragma once

#include "lachesis/dag_store.hpp"
#include "lachesis/progress.hpp"
#include "lachesis/rational.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace lachesis {

enum class Metric { QI, RK };

/// Event timing and parent selection policy of one node.
struct EmissionStrategy {
    Metric timing = Metric::RK;
    Metric selection = Metric::RK;
    std::uint32_t maxParents = 3;  ///< total, including the self-parent
    Rational threshold = Rational(1, 3);
    std::int64_t minIntervalMs = 0;

    bool usesQi() const { return timing == Metric::QI || selection == Metric::QI; }

    bool operator==(const EmissionStrategy&) const = default;
};

/// DAG progress of an event under one metric, as an ordered value. Root
/// knowledge restarts at each new frame, so RK progress orders by frame
/// first and by k within the frame; QI uses the h value alone.
struct ProgressScore {
    std::uint32_t frame = 0;
    Rational value = 0;

    friend bool operator==(const ProgressScore& a, const ProgressScore& b) {
        return a.frame == b.frame && a.value == b.value;
    }
    friend bool operator<(const ProgressScore& a, const ProgressScore& b) {
        if (a.frame != b.frame) {
            return a.frame < b.frame;
        }
        return a.value < b.value;
    }
    friend bool operator>(const ProgressScore& a, const ProgressScore& b) { return b < a; }
};

/// Progress score of a stored event: cached root knowledge for RK, the
/// quorum indexer value re-measured against the store's current medians for
/// QI (a stale head scores lower as the network moves past it).
ProgressScore headScore(const DagStore& store, EventId id, Metric metric);

struct TimingDecision {
    bool emit = false;
    /// Stake of nodes whose head is strictly ahead of v's (the timing metric t).
    Stake stakeAhead = 0;
    /// Stake of nodes at or above v's level; this is v's depth in the node
    /// ordering and what the threshold is tested against. Ties count so that
    /// the all-equal start state (every leaf has the same metric) can emit.
    Stake stakeAheadOrTied = 0;
    Rational requiredStake = 0; ///< threshold * W
    /// Parent list (self-parent first) when emit is true and v has a head.
    std::vector<EventId> parents;
    /// When the rate limit alone blocks an otherwise-ready emission: the
    /// earliest time the decision flips (lastEmit + minInterval). -1 when the
    /// decision does not hinge on waiting.
    std::int64_t retryAtMs = -1;
};

/// Other-node heads worth referencing, best first: heads outside v's head's
/// subgraph, ordered by the selection metric of the pairwise hypothetical
/// event, ties by creator id.
std::vector<EventId> rankCandidateParents(const DagStore& store, NodeId v,
                                          const EmissionStrategy& strategy);

/// Greedy parent choice: grow {self-parent} by whichever candidate most
/// increases the selection metric of the accumulated hypothetical event,
/// until maxParents or no strict gain. Empty for a node without a head.
std::vector<EventId> selectParents(const DagStore& store, NodeId v,
                                   const EmissionStrategy& strategy);

/// t = sum of stake of nodes whose head's timing metric strictly exceeds
/// v's head's. Throws NoSelfEvent when v has no head.
Stake timingMetric(const DagStore& store, NodeId v, const EmissionStrategy& strategy);

/// Full emission decision: ordering-level threshold, strict-progress gate
/// (the chosen parents must strictly improve the selection metric over
/// extending the self-chain with no references), then the rate limit, which
/// defers rather than drops (see retryAtMs). A node with no head emits its
/// leaf unconditionally.
TimingDecision evaluateEmission(const DagStore& store, NodeId v, const EmissionStrategy& strategy,
                                std::int64_t nowMs, std::int64_t lastEmitMs);

bool shouldEmit(const DagStore& store, NodeId v, const EmissionStrategy& strategy,
                std::int64_t nowMs, std::int64_t lastEmitMs);

/// Builds and inserts v's next event with parents from selectParents.
Event buildEvent(DagStore& store, NodeId v, const EmissionStrategy& strategy,
                 std::int64_t nowMs);
Event buildEvent(DagStore& store, NodeId v, const EmissionStrategy& strategy,
                 std::int64_t nowMs, std::span<const EventId> parents);

} // namespace lachesis
