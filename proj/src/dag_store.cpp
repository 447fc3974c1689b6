#include "lachesis/dag_store.hpp"

#include "lachesis/errors.hpp"

#include <algorithm>
#include <unordered_set>

namespace lachesis {

namespace {

std::uint64_t chainKey(NodeId creator, std::uint32_t seq) {
    return (std::uint64_t(creator) << 32) | seq;
}

} // namespace

DagStore::DagStore(ValidatorSet validators)
    : validators_(std::move(validators)),
      heads_(validators_.size(), kNoEvent),
      nodeForked_(validators_.size(), false) {}

const DagStore::Record& DagStore::record(EventId id) const {
    auto it = index_.find(id);
    if (it == index_.end()) {
        fail(ErrorCode::UnknownEvent, "unknown event " + id.str());
    }
    return records_[it->second];
}

std::uint32_t DagStore::indexOf(EventId id) const {
    auto it = index_.find(id);
    if (it == index_.end()) {
        fail(ErrorCode::UnknownEvent, "unknown event " + id.str());
    }
    return it->second;
}

const Event& DagStore::event(EventId id) const { return record(id).event; }

std::span<const HbEntry> DagStore::highestBefore(EventId id) const {
    return record(id).hb;
}

std::optional<EventId> DagStore::head(NodeId v) const {
    if (v >= heads_.size()) {
        fail(ErrorCode::InvalidRange, "node id out of range");
    }
    if (heads_[v] == kNoEvent) {
        return std::nullopt;
    }
    return records_[heads_[v]].event.id;
}

std::vector<EventId> DagStore::heads() const {
    std::vector<EventId> out;
    for (std::uint32_t idx : heads_) {
        if (idx != kNoEvent) {
            out.push_back(records_[idx].event.id);
        }
    }
    return out;
}

const std::vector<EventId>& DagStore::rootsOfFrame(std::uint32_t frame) const {
    static const std::vector<EventId> empty;
    auto it = rootsByFrame_.find(frame);
    return it == rootsByFrame_.end() ? empty : it->second;
}

const Rational& DagStore::rootKnowledgeOf(EventId id) const {
    return record(id).rootKnowledge;
}

void DagStore::mergeEntry(HbEntry& acc, const HbEntry& in) {
    // Pointwise max of sequence numbers; fork flags are monotone along the
    // subgraph order, so OR is exact for forks already visible inside one
    // parent. Forks first exposed by the merge itself are recomputed exactly
    // in evaluateDraft.
    if (in.seq > acc.seq) {
        acc.seq = in.seq;
        acc.top = in.top;
    }
    acc.fork = acc.fork || in.fork;
}

std::vector<std::uint32_t> DagStore::nodeEventsIn(const Eval& e, NodeId i) const {
    std::vector<bool> visited(records_.size(), false);
    std::vector<std::uint32_t> stack;
    if (e.storeIndex != kDraftSelf) {
        stack.push_back(e.storeIndex);
        visited[e.storeIndex] = true;
    } else {
        for (std::uint32_t p : e.parents) {
            if (!visited[p]) {
                visited[p] = true;
                stack.push_back(p);
            }
        }
    }
    std::vector<std::uint32_t> found;
    while (!stack.empty()) {
        const std::uint32_t cur = stack.back();
        stack.pop_back();
        if (records_[cur].event.creator == i) {
            found.push_back(cur);
        }
        for (std::uint32_t p : records_[cur].parents) {
            if (!visited[p]) {
                visited[p] = true;
                stack.push_back(p);
            }
        }
    }
    return found;
}

bool DagStore::forkedWithin(const Eval& e, NodeId i) const {
    const std::vector<std::uint32_t> own = nodeEventsIn(e, i);
    for (std::size_t a = 0; a < own.size(); ++a) {
        for (std::size_t b = a + 1; b < own.size(); ++b) {
            if (!observesIdx(own[a], own[b]) && !observesIdx(own[b], own[a])) {
                return true;
            }
        }
    }
    return false;
}

bool DagStore::reachesByDfs(std::uint32_t from, std::uint32_t target) const {
    if (from == target) {
        return true;
    }
    std::vector<bool> visited(records_.size(), false);
    std::vector<std::uint32_t> stack{from};
    visited[from] = true;
    while (!stack.empty()) {
        const std::uint32_t cur = stack.back();
        stack.pop_back();
        for (std::uint32_t p : records_[cur].parents) {
            if (p == target) {
                return true;
            }
            if (!visited[p]) {
                visited[p] = true;
                stack.push_back(p);
            }
        }
    }
    return false;
}

bool DagStore::observesIdx(std::uint32_t a, std::uint32_t b) const {
    if (a == b) {
        return true;
    }
    const Record& rb = records_[b];
    if (!nodeForked_[rb.event.creator]) {
        // Unforked creators have a single self-parent chain, so the observed
        // event at this seq can only be b itself.
        return records_[a].hb[rb.event.creator].seq >= rb.event.seq;
    }
    return reachesByDfs(a, b);
}

bool DagStore::observes(EventId a, EventId b) const {
    return observesIdx(indexOf(a), indexOf(b));
}

bool DagStore::subgraphContains(const Eval& e, std::uint32_t target) const {
    if (e.storeIndex != kDraftSelf) {
        return observesIdx(e.storeIndex, target);
    }
    return std::any_of(e.parents.begin(), e.parents.end(),
                       [&](std::uint32_t p) { return observesIdx(p, target); });
}

std::vector<bool> DagStore::forklessCauseColumn(const Eval& e, EventId root) const {
    const std::uint32_t rootIdx = indexOf(root);
    const NodeId rootCreator = records_[rootIdx].event.creator;
    std::vector<bool> counted(nodeCount(), false);
    // A forked root creator voids the whole column.
    if (e.hb[rootCreator].fork) {
        return counted;
    }
    for (NodeId i = 0; i < nodeCount(); ++i) {
        const HbEntry& en = e.hb[i];
        if (en.fork || en.seq == 0) {
            continue;
        }
        if (i == e.creator) {
            // e itself is its creator's maximal view; it observes the root
            // iff any of the creator's events in the subgraph does.
            counted[i] = subgraphContains(e, rootIdx);
        } else if (!nodeForked_[i]) {
            // Single self-parent chain: the highest event observes the root
            // iff any event of the node does.
            counted[i] = observesIdx(en.top, rootIdx);
        } else {
            for (std::uint32_t x : nodeEventsIn(e, i)) {
                if (observesIdx(x, rootIdx)) {
                    counted[i] = true;
                    break;
                }
            }
        }
    }
    return counted;
}

Stake DagStore::columnStake(const std::vector<bool>& counted) const {
    Stake s = 0;
    for (NodeId i = 0; i < nodeCount(); ++i) {
        if (counted[i]) {
            s += validators_.stakeOf(i);
        }
    }
    return s;
}

bool DagStore::forklessCause(EventId root, EventId e) const {
    const Eval ev = evalOf(e);
    return columnStake(forklessCauseColumn(ev, root)) >= validators_.quorum();
}

void DagStore::assignFrame(Eval& ev) const {
    std::uint32_t f = 0;
    for (std::uint32_t p : ev.parents) {
        f = std::max(f, records_[p].event.frame);
    }
    if (ev.parents.empty()) {
        // Genesis convention: a node's first event is a root at frame 1.
        ev.frame = 1;
        ev.isRoot = true;
        return;
    }
    // Root when quorum stake worth of frame-f root creators forkless-cause
    // the event; each such root needs a quorum of fork-free observers inside
    // the subgraph.
    Stake causingStake = 0;
    std::vector<bool> creatorCounted(nodeCount(), false);
    for (const EventId& r : rootsOfFrame(f)) {
        const NodeId rc = r.creator;
        if (creatorCounted[rc]) {
            continue;
        }
        if (!subgraphContains(ev, indexOf(r))) {
            continue;
        }
        if (columnStake(forklessCauseColumn(ev, r)) >= validators_.quorum()) {
            creatorCounted[rc] = true;
            causingStake += validators_.stakeOf(rc);
        }
    }
    if (causingStake >= validators_.quorum()) {
        ev.frame = f + 1;
        ev.isRoot = true;
    } else {
        ev.frame = std::max(f, 1u);
        // A node's first event inside a frame is its root of that frame.
        // Without this, a node pulled into a frame by reference could never
        // contribute a root there, and with one root short of quorum every
        // following frame election would starve.
        ev.isRoot = ev.frame > records_[ev.parents[0]].event.frame;
    }
}

std::uint64_t DagStore::rootKnowledgeSum(const Eval& ev) const {
    std::uint64_t s = 0;
    for (const EventId& r : rootsOfFrame(ev.frame)) {
        const std::uint32_t rIdx = indexOf(r);
        if (!subgraphContains(ev, rIdx)) {
            continue;
        }
        const std::vector<bool> col = forklessCauseColumn(ev, r);
        s += static_cast<std::uint64_t>(std::count(col.begin(), col.end(), true));
    }
    if (ev.storeIndex == kDraftSelf && ev.isRoot && !ev.hb[ev.creator].fork) {
        // The prospective event is itself a root of its frame; only its own
        // creator observes it.
        s += 1;
    }
    return s;
}

DagStore::Eval DagStore::evaluateDraft(NodeId creator, std::uint32_t seq,
                                       const std::optional<EventId>& selfParent,
                                       const std::vector<EventId>& otherParents) const {
    if (creator >= nodeCount()) {
        fail(ErrorCode::InvalidRange, "creator out of range");
    }
    Eval ev;
    ev.creator = creator;
    ev.seq = seq;
    ev.hb.resize(nodeCount());

    if (selfParent.has_value()) {
        auto it = index_.find(*selfParent);
        if (it == index_.end()) {
            fail(ErrorCode::MissingParent, "missing self-parent " + selfParent->str());
        }
        const Record& sp = records_[it->second];
        if (sp.event.creator != creator) {
            fail(ErrorCode::InvalidParents, "self-parent has a different creator");
        }
        if (seq != sp.event.seq + 1) {
            fail(ErrorCode::InvalidSeq, "seq must be self-parent seq + 1");
        }
        ev.parents.push_back(it->second);
    } else if (seq != 1) {
        fail(ErrorCode::InvalidSeq, "leaf event must have seq 1");
    }

    std::unordered_set<NodeId> otherCreators;
    for (const EventId& op : otherParents) {
        auto it = index_.find(op);
        if (it == index_.end()) {
            fail(ErrorCode::MissingParent, "missing parent " + op.str());
        }
        const NodeId oc = records_[it->second].event.creator;
        if (oc == creator) {
            fail(ErrorCode::InvalidParents, "other-parent created by the event's own node");
        }
        if (!otherCreators.insert(oc).second) {
            fail(ErrorCode::InvalidParents, "two other-parents share a creator");
        }
        ev.parents.push_back(it->second);
    }
    if (!selfParent.has_value() && !otherParents.empty()) {
        fail(ErrorCode::InvalidParents, "leaf event must not have parents");
    }

    for (std::uint32_t p : ev.parents) {
        const Record& pr = records_[p];
        for (NodeId i = 0; i < nodeCount(); ++i) {
            mergeEntry(ev.hb[i], pr.hb[i]);
        }
    }

    // Forks first exposed by combining parent views are invisible to the
    // pointwise merge; recompute exactly for creators known to equivocate.
    for (NodeId i = 0; i < nodeCount(); ++i) {
        if (nodeForked_[i] && !ev.hb[i].fork) {
            ev.hb[i].fork = forkedWithin(ev, i);
        }
    }

    // Own entry: the event sees itself. It observes its whole subgraph, so
    // it cannot form an incomparable pair with anything merged above.
    HbEntry& own = ev.hb[creator];
    if (seq >= own.seq) {
        own.seq = seq;
        own.top = kDraftSelf;
    }

    assignFrame(ev);
    return ev;
}

DagStore::Eval DagStore::evalOf(EventId id) const {
    const std::uint32_t idx = indexOf(id);
    const Record& r = records_[idx];
    Eval ev;
    ev.creator = r.event.creator;
    ev.seq = r.event.seq;
    ev.parents = r.parents;
    ev.hb = r.hb;
    ev.frame = r.event.frame;
    ev.isRoot = r.event.isRoot;
    ev.storeIndex = idx;
    return ev;
}

DagStore::Eval DagStore::evaluate(const HypotheticalEvent& h) const {
    const Record& sp = record(h.selfParent);
    return evaluateDraft(h.creator, sp.event.seq + 1, h.selfParent, h.otherParents);
}

const Event& DagStore::insert(const EventDraft& draft) {
    const EventId id = draft.id();
    if (index_.count(id)) {
        fail(ErrorCode::DuplicateId, "duplicate event " + id.str());
    }
    Eval ev = evaluateDraft(draft.creator, draft.seq, draft.selfParent, draft.otherParents);

    const std::uint32_t idx = static_cast<std::uint32_t>(records_.size());
    if (ev.hb[draft.creator].top == kDraftSelf) {
        ev.hb[draft.creator].top = idx;
    }
    ev.storeIndex = idx;

    Record rec;
    rec.event = Event{id,
                      draft.creator,
                      draft.seq,
                      draft.selfParent,
                      draft.otherParents,
                      ev.frame,
                      ev.isRoot,
                      draft.creationTimeMs,
                      draft.qiAtCreation};
    rec.hb = ev.hb;
    rec.selfParent = ev.parents.empty() || !draft.selfParent.has_value() ? kNoEvent : ev.parents[0];
    rec.parents = ev.parents;
    records_.push_back(std::move(rec));
    index_.emplace(id, idx);

    // Global fork bookkeeping: a second event in the same chain slot means
    // the creator equivocated.
    auto [slot, fresh] = chainSlots_.emplace(chainKey(draft.creator, draft.seq), idx);
    (void)slot;
    if (!fresh) {
        nodeForked_[draft.creator] = true;
    }

    const std::uint32_t curHead = heads_[draft.creator];
    if (curHead == kNoEvent || records_[curHead].event.seq < draft.seq) {
        heads_[draft.creator] = idx;
    }
    if (ev.isRoot) {
        rootsByFrame_[ev.frame].push_back(id);
    }
    maxFrame_ = std::max(maxFrame_, ev.frame);

    records_[idx].rootKnowledge =
        Rational(rootKnowledgeSum(ev),
                 std::uint64_t(nodeCount()) * std::uint64_t(nodeCount()));
    return records_[idx].event;
}

} // namespace lachesis
