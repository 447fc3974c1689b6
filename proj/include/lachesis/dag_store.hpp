#pragma once

#include "lachesis/event.hpp"
#include "lachesis/validators.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

namespace lachesis {

/// Append-only local view of the event DAG for one node, with a per-event
/// HighestBefore index enabling constant-time subgraph queries in the
/// fork-free case.
///
/// Single writer; stored events and their index vectors are immutable after
/// insertion and safe to read concurrently.
class DagStore {
public:
    static constexpr std::uint32_t kNoEvent = UINT32_MAX;
    /// HbEntry.top value standing for a not-yet-inserted event under evaluation.
    static constexpr std::uint32_t kDraftSelf = UINT32_MAX - 1;

    /// A stored or prospective event reduced to what metric evaluation needs.
    /// For prospective events frame/isRoot are the values insertion would
    /// assign.
    struct Eval {
        NodeId creator = 0;
        std::uint32_t seq = 1;
        std::vector<std::uint32_t> parents; ///< store indices, self-parent first
        std::vector<HbEntry> hb;
        std::uint32_t frame = 1;
        bool isRoot = false;
        std::uint32_t storeIndex = kDraftSelf; ///< kDraftSelf when not inserted
    };

    explicit DagStore(ValidatorSet validators);

    const ValidatorSet& validators() const { return validators_; }
    std::uint32_t nodeCount() const { return validators_.size(); }

    /// Stores a creator-supplied event. The HighestBefore vector is merged
    /// from the parents' vectors, then frame and root status are assigned.
    /// Throws MissingParent / InvalidSeq / InvalidParents / DuplicateId.
    const Event& insert(const EventDraft& draft);

    bool contains(EventId id) const { return index_.count(id) != 0; }
    const Event& event(EventId id) const;
    std::size_t eventCount() const { return records_.size(); }
    /// Events in insertion order (a topological order of the DAG).
    const Event& eventAt(std::size_t i) const { return records_[i].event; }

    /// True iff b is in a's subgraph (a == b counts as observed).
    bool observes(EventId a, EventId b) const;

    /// True iff a quorum of stake belongs to nodes with a fork-free event in
    /// e's subgraph whose own subgraph contains root.
    bool forklessCause(EventId root, EventId e) const;

    std::span<const HbEntry> highestBefore(EventId id) const;

    /// Latest event of v in this store, if any.
    std::optional<EventId> head(NodeId v) const;
    std::vector<EventId> heads() const;

    const std::vector<EventId>& rootsOfFrame(std::uint32_t frame) const;
    std::uint32_t maxFrame() const { return maxFrame_; }

    /// True when two incomparable events of v have been stored.
    bool nodeForked(NodeId v) const { return nodeForked_.at(v); }

    /// Root knowledge scalar of a stored event, computed once at insertion.
    /// An event's subgraph is immutable, so the value never changes.
    const Rational& rootKnowledgeOf(EventId id) const;

    /// Evaluation view of a stored event.
    Eval evalOf(EventId id) const;
    /// Evaluation of a prospective event against the current store. Derives
    /// the HighestBefore vector, frame and root status exactly as insertion
    /// would, without mutating anything.
    Eval evaluate(const HypotheticalEvent& h) const;

    /// Column of the root knowledge matrix for (e, root): counted[i] iff node
    /// i has a fork-free event in e's subgraph that contains root. All-false
    /// when root's creator is forked inside e's subgraph.
    std::vector<bool> forklessCauseColumn(const Eval& e, EventId root) const;

    /// Total stake of the counted nodes of a column.
    Stake columnStake(const std::vector<bool>& counted) const;

    /// Raw root knowledge sum of an evaluation: count of (node, root) pairs
    /// over the roots of the evaluation's own frame inside its subgraph.
    std::uint64_t rootKnowledgeSum(const Eval& ev) const;

    /// Whether a stored event lies in the (possibly prospective) evaluated
    /// event's subgraph.
    bool subgraphContains(const Eval& e, EventId id) const {
        return subgraphContains(e, indexOf(id));
    }

    EventId idAt(std::uint32_t storeIndex) const { return records_.at(storeIndex).event.id; }

private:
    struct Record {
        Event event;
        std::vector<HbEntry> hb;
        std::uint32_t selfParent = kNoEvent;
        std::vector<std::uint32_t> parents; ///< self-parent first when present
        Rational rootKnowledge = 0;
    };

    const Record& record(EventId id) const;
    std::uint32_t indexOf(EventId id) const;

    static void mergeEntry(HbEntry& acc, const HbEntry& in);
    /// Store indices of node i's events inside the evaluated subgraph.
    std::vector<std::uint32_t> nodeEventsIn(const Eval& e, NodeId i) const;
    /// Exact fork test: two pairwise-incomparable events of i in e's subgraph.
    bool forkedWithin(const Eval& e, NodeId i) const;
    bool reachesByDfs(std::uint32_t from, std::uint32_t target) const;
    bool observesIdx(std::uint32_t a, std::uint32_t b) const;
    bool subgraphContains(const Eval& e, std::uint32_t target) const;
    void assignFrame(Eval& ev) const;

    Eval evaluateDraft(NodeId creator, std::uint32_t seq,
                       const std::optional<EventId>& selfParent,
                       const std::vector<EventId>& otherParents) const;

    ValidatorSet validators_;
    std::vector<Record> records_;
    std::unordered_map<EventId, std::uint32_t, EventIdHash> index_;
    std::vector<std::uint32_t> heads_;              ///< per node, kNoEvent when none
    std::vector<bool> nodeForked_;
    std::map<std::uint32_t, std::vector<EventId>> rootsByFrame_;
    std::uint32_t maxFrame_ = 0;
    /// (creator, seq) pairs seen, for global fork detection.
    std::unordered_map<std::uint64_t, std::uint32_t> chainSlots_;

    friend struct ProgressEngine;
};

} // namespace lachesis
