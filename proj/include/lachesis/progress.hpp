#pragma once

#include "lachesis/dag_store.hpp"
#include "lachesis/event.hpp"
#include "lachesis/rational.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace lachesis {

/// One column of the root knowledge matrix: which nodes have a fork-free
/// event in the evaluated subgraph that contains the root.
struct RootKnowledgeColumn {
    EventId root;
    std::vector<bool> counted;
    std::uint32_t countSum = 0;
    Stake stakeSum = 0;
};

/// Root knowledge of a (possibly prospective) event: the exact scalar
/// k = rawSum / n^2 plus the per-root columns it was summed from.
struct ProgressReport {
    Rational k = 0;
    std::uint64_t rawSum = 0;
    std::uint32_t frame = 1;
    bool isRoot = false;
    std::vector<RootKnowledgeColumn> columns; ///< sorted by root id
};

RootKnowledgeColumn forklessCauseProgress(const DagStore& store, EventId e, EventId root);
RootKnowledgeColumn forklessCauseProgress(const DagStore& store, const HypotheticalEvent& e,
                                          EventId root);

ProgressReport rootProgress(const DagStore& store, EventId e);
ProgressReport rootProgress(const DagStore& store, const HypotheticalEvent& e);

/// The three quorum indexer sub-metrics, one value per node dimension.
struct QiComponents {
    std::vector<std::uint32_t> median;
    std::vector<std::uint32_t> currentSelf;
    std::vector<std::uint32_t> newSelf;
};

/// Candidate-independent part of a QI evaluation; lets a caller score many
/// candidate parent sets against one snapshot without recomputing medians.
struct QiContext {
    std::vector<std::uint32_t> median;
    std::vector<std::uint32_t> currentSelf;
};

QiContext qiContext(const DagStore& store, NodeId v);

/// Stake-weighted median per node dimension over every head's view.
std::vector<std::uint32_t> storeMedians(const DagStore& store);

/// h = sum over nodes i of (w_i / W) * g_i, where g_i maps the (median,
/// currentSelf, newSelf) triple for node i onto [0, 1] piecewise linearly:
/// g_i = min(1, (newSelf - currentSelf) / max(median, 1)), 0 when nothing
/// advances. Credit is proportional to how much of a median-sized span the
/// advancement covers.
Rational qiFromNewSelf(const DagStore& store, const QiContext& ctx,
                       std::span<const HbEntry> newSelf);

/// QI position of a stored event: how much of the current stake-weighted
/// median view its subgraph attains, via the same per-dimension piecewise
/// map evaluated from an empty starting view. A head's position decays as
/// the rest of the store moves past it, so the timing ordering ranks nodes
/// by attained progress the way k does under RK.
Rational qiOfEvent(const DagStore& store, EventId id);
Rational qiOfEvent(const DagStore& store, EventId id,
                   const std::vector<std::uint32_t>& medians);

QiComponents qiComponents(const DagStore& store, NodeId v, const HypotheticalEvent& candidate);
Rational qiMetric(const DagStore& store, NodeId v, const HypotheticalEvent& candidate);

} // namespace lachesis
