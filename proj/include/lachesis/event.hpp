#pragma once

#include "lachesis/rational.hpp"
#include "lachesis/validators.hpp"

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace lachesis {

/// Globally unique event identifier. (creator, seq) identifies an event on a
/// well-behaved node; nonce distinguishes equivocating events that reuse the
/// same chain position.
struct EventId {
    NodeId creator = 0;
    std::uint32_t seq = 0;
    std::uint32_t nonce = 0;

    auto operator<=>(const EventId&) const = default;

    std::string str() const {
        std::string s = std::to_string(creator) + ":" + std::to_string(seq);
        if (nonce != 0) {
            s += ":" + std::to_string(nonce);
        }
        return s;
    }
};

struct EventIdHash {
    std::size_t operator()(const EventId& id) const noexcept {
        std::uint64_t x = (std::uint64_t(id.creator) << 40) ^ (std::uint64_t(id.seq) << 8) ^ id.nonce;
        x ^= x >> 33;
        x *= 0xff51afd7ed558ccdULL;
        x ^= x >> 33;
        return static_cast<std::size_t>(x);
    }
};

/// Event as supplied by its creator, before the local store derives frame,
/// root status and the causality index.
struct EventDraft {
    NodeId creator = 0;
    std::uint32_t seq = 1;
    std::uint32_t nonce = 0;
    std::optional<EventId> selfParent;
    std::vector<EventId> otherParents;
    std::int64_t creationTimeMs = 0;
    /// Quorum indexer value the creator measured when emitting; travels with
    /// the event so receivers can run QI-based timing without recomputing a
    /// foreign node's view. Zero for leaves and for runs that never use QI.
    Rational qiAtCreation = 0;

    EventId id() const { return EventId{creator, seq, nonce}; }
};

/// Stored DAG vertex.
struct Event {
    EventId id;
    NodeId creator = 0;
    std::uint32_t seq = 1;
    std::optional<EventId> selfParent;
    std::vector<EventId> otherParents;
    std::uint32_t frame = 1;
    bool isRoot = false;
    std::int64_t creationTimeMs = 0;
    Rational qiAtCreation = 0;
};

/// Per-node entry of an event's causality index: the highest sequence number
/// of that node's events inside the subgraph, and whether the subgraph
/// contains two incomparable events of the node (a fork).
struct HbEntry {
    std::uint32_t seq = 0;       ///< 0 when no event of the node is observed
    std::uint32_t top = UINT32_MAX; ///< store index of the event attaining seq
    bool fork = false;
};

/// Prospective event used to evaluate a metric before anything is inserted.
struct HypotheticalEvent {
    NodeId creator = 0;
    EventId selfParent;
    std::vector<EventId> otherParents;
};

} // namespace lachesis
