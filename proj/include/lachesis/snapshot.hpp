#pragma once

#include "lachesis/dag_store.hpp"

#include <string>

namespace lachesis {

/// Line-oriented DAG snapshot, one event per line in insertion order (which
/// is topological):
///   id creator seq selfParent [otherParent...] frame isRoot
/// with `-` for a missing self-parent and ids as creator:seq[:nonce]. A
/// leading `# nodes n stakes s0 s1 ...` comment records the validator set.
std::string dumpDag(const DagStore& store);

/// Rebuilds a store from snapshot text. The stated frame and isRoot of every
/// line are checked against the recomputed values; a mismatch is a
/// ParseError. Without a validator header, creators determine the node count
/// and stakes are equal.
DagStore loadDag(const std::string& text, const std::string& name);

/// Parses creator:seq[:nonce].
EventId parseEventId(const std::string& text);

} // namespace lachesis
