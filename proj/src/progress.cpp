#include "lachesis/progress.hpp"

#include "lachesis/errors.hpp"

#include <algorithm>

namespace lachesis {

namespace {

RootKnowledgeColumn makeColumn(const DagStore& store, EventId root, std::vector<bool> counted) {
    RootKnowledgeColumn col;
    col.root = root;
    col.countSum = static_cast<std::uint32_t>(std::count(counted.begin(), counted.end(), true));
    col.stakeSum = store.columnStake(counted);
    col.counted = std::move(counted);
    return col;
}

/// Shared by the stored-event and hypothetical paths. draftId names the
/// prospective event when it would itself be a root of its frame.
ProgressReport reportFor(const DagStore& store, const DagStore::Eval& ev,
                         std::optional<EventId> draftId) {
    ProgressReport report;
    report.frame = ev.frame;
    report.isRoot = ev.isRoot;
    for (const EventId& r : store.rootsOfFrame(ev.frame)) {
        if (!store.subgraphContains(ev, r)) {
            continue;
        }
        report.columns.push_back(makeColumn(store, r, store.forklessCauseColumn(ev, r)));
    }
    if (draftId.has_value() && ev.isRoot) {
        // The prospective event is a root of its own frame and sits in its
        // own subgraph; only its creator can have observed it.
        std::vector<bool> counted(store.nodeCount(), false);
        counted[ev.creator] = !ev.hb[ev.creator].fork;
        report.columns.push_back(makeColumn(store, *draftId, std::move(counted)));
    }
    std::sort(report.columns.begin(), report.columns.end(),
              [](const RootKnowledgeColumn& a, const RootKnowledgeColumn& b) {
                  return a.root < b.root;
              });
    for (const RootKnowledgeColumn& c : report.columns) {
        report.rawSum += c.countSum;
    }
    const std::uint64_t n = store.nodeCount();
    report.k = Rational(report.rawSum, n * n);
    return report;
}

} // namespace

RootKnowledgeColumn forklessCauseProgress(const DagStore& store, EventId e, EventId root) {
    return makeColumn(store, root, store.forklessCauseColumn(store.evalOf(e), root));
}

RootKnowledgeColumn forklessCauseProgress(const DagStore& store, const HypotheticalEvent& e,
                                          EventId root) {
    return makeColumn(store, root, store.forklessCauseColumn(store.evaluate(e), root));
}

ProgressReport rootProgress(const DagStore& store, EventId e) {
    return reportFor(store, store.evalOf(e), std::nullopt);
}

ProgressReport rootProgress(const DagStore& store, const HypotheticalEvent& e) {
    const DagStore::Eval ev = store.evaluate(e);
    return reportFor(store, ev, EventId{e.creator, ev.seq, 0});
}

std::vector<std::uint32_t> storeMedians(const DagStore& store) {
    const std::uint32_t n = store.nodeCount();
    const Stake total = store.validators().totalStake();

    // Stake-weighted median over every node's latest view: the value at
    // which cumulative stake first reaches W/2, values sorted ascending.
    // A node with no event yet contributes an all-zero view.
    std::vector<std::uint32_t> medians(n, 0);
    std::vector<std::pair<std::uint32_t, Stake>> view(n);
    for (NodeId i = 0; i < n; ++i) {
        for (NodeId j = 0; j < n; ++j) {
            const auto hj = store.head(j);
            view[j] = {hj ? store.highestBefore(*hj)[i].seq : 0, store.validators().stakeOf(j)};
        }
        std::sort(view.begin(), view.end());
        Stake cumulative = 0;
        for (const auto& [value, stake] : view) {
            cumulative += stake;
            if (2 * cumulative >= total) {
                medians[i] = value;
                break;
            }
        }
    }
    return medians;
}

QiContext qiContext(const DagStore& store, NodeId v) {
    if (!store.head(v).has_value()) {
        fail(ErrorCode::NoSelfEvent, "node has no event yet; QI is undefined");
    }
    const std::uint32_t n = store.nodeCount();

    QiContext ctx;
    ctx.currentSelf.resize(n);
    const auto headHb = store.highestBefore(*store.head(v));
    for (NodeId i = 0; i < n; ++i) {
        ctx.currentSelf[i] = headHb[i].seq;
    }
    ctx.median = storeMedians(store);
    return ctx;
}

Rational qiFromNewSelf(const DagStore& store, const QiContext& ctx,
                       std::span<const HbEntry> newSelf) {
    const std::uint32_t n = store.nodeCount();
    Rational h = 0;
    for (NodeId i = 0; i < n; ++i) {
        const std::uint32_t cur = ctx.currentSelf[i];
        const std::uint32_t next = newSelf[i].seq;
        const std::uint32_t median = ctx.median[i];
        if (next <= cur) {
            continue; // g_i = 0
        }
        // Advancement relative to the median level: syncing a dimension the
        // network barely knows earns full credit, a one-step sync near the
        // frontier earns ~1/median. Normalizing by the remaining distance
        // instead would price those equally and funnel every reference to
        // the frontier, starving slow nodes out of all subgraphs.
        const std::uint32_t span = std::max(median, 1u);
        const Rational g = std::min(Rational(next - cur, span), Rational(1));
        h += Rational(store.validators().stakeOf(i)) * g;
    }
    h /= Rational(store.validators().totalStake());
    return h;
}

QiComponents qiComponents(const DagStore& store, NodeId v, const HypotheticalEvent& candidate) {
    if (candidate.creator != v) {
        fail(ErrorCode::InvalidParents, "candidate creator does not match node");
    }
    const auto headId = store.head(v);
    if (!headId.has_value()) {
        fail(ErrorCode::NoSelfEvent, "node has no event yet; QI is undefined");
    }
    if (candidate.selfParent != *headId) {
        fail(ErrorCode::InvalidParents, "candidate must extend the node's current head");
    }
    QiContext ctx = qiContext(store, v);
    const DagStore::Eval ev = store.evaluate(candidate);

    QiComponents out;
    out.median = std::move(ctx.median);
    out.currentSelf = std::move(ctx.currentSelf);
    out.newSelf.resize(store.nodeCount());
    for (NodeId i = 0; i < store.nodeCount(); ++i) {
        out.newSelf[i] = ev.hb[i].seq;
    }
    return out;
}

Rational qiMetric(const DagStore& store, NodeId v, const HypotheticalEvent& candidate) {
    if (candidate.creator != v) {
        fail(ErrorCode::InvalidParents, "candidate creator does not match node");
    }
    const auto headId = store.head(v);
    if (!headId.has_value()) {
        fail(ErrorCode::NoSelfEvent, "node has no event yet; QI is undefined");
    }
    if (candidate.selfParent != *headId) {
        fail(ErrorCode::InvalidParents, "candidate must extend the node's current head");
    }
    const QiContext ctx = qiContext(store, v);
    return qiFromNewSelf(store, ctx, store.evaluate(candidate).hb);
}

Rational qiOfEvent(const DagStore& store, EventId id) {
    return qiOfEvent(store, id, storeMedians(store));
}

Rational qiOfEvent(const DagStore& store, EventId id,
                   const std::vector<std::uint32_t>& medians) {
    QiContext ctx;
    ctx.median = medians;
    ctx.currentSelf.assign(store.nodeCount(), 0);
    return qiFromNewSelf(store, ctx, store.highestBefore(id));
}

} // namespace lachesis
