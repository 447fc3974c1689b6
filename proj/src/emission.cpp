#include "lachesis/emission.hpp"

#include "lachesis/errors.hpp"

#include <algorithm>
#include <cstddef>
#include <utility>

namespace lachesis {

namespace {

/// Scores hypothetical parent sets {head(v)} + others under one metric.
/// The QI context is computed once; RK evaluations go through the store.
class HypScorer {
public:
    HypScorer(const DagStore& store, NodeId v, Metric metric, EventId self)
        : store_(store), metric_(metric) {
        hyp_.creator = v;
        hyp_.selfParent = self;
        if (metric_ == Metric::QI) {
            ctx_ = qiContext(store_, v);
        }
    }

    ProgressScore score(const std::vector<EventId>& others) {
        hyp_.otherParents = others;
        DagStore::Eval ev = store_.evaluate(hyp_);
        if (metric_ == Metric::RK) {
            std::uint64_t n = store_.nodeCount();
            return {ev.frame, Rational(store_.rootKnowledgeSum(ev), n * n)};
        }
        return {0, qiFromNewSelf(store_, ctx_, ev.hb)};
    }

private:
    const DagStore& store_;
    Metric metric_;
    HypotheticalEvent hyp_;
    QiContext ctx_;
};

/// Other nodes' heads not already inside self's subgraph, creator ascending.
std::vector<EventId> candidateHeads(const DagStore& store, NodeId v, EventId self) {
    std::vector<EventId> out;
    for (NodeId j = 0; j < store.nodeCount(); ++j) {
        if (j == v) {
            continue;
        }
        std::optional<EventId> h = store.head(j);
        if (!h || store.observes(self, *h)) {
            continue;
        }
        out.push_back(*h);
    }
    return out;
}

struct OrderingLevels {
    Stake ahead = 0;
    Stake aheadOrTied = 0;
};

OrderingLevels orderingLevels(const DagStore& store, NodeId v, Metric metric, EventId self) {
    std::vector<std::uint32_t> medians;
    if (metric == Metric::QI) {
        medians = storeMedians(store);
    }
    auto scoreOf = [&](EventId id) -> ProgressScore {
        if (metric == Metric::RK) {
            return {store.event(id).frame, store.rootKnowledgeOf(id)};
        }
        return {0, qiOfEvent(store, id, medians)};
    };
    ProgressScore mine = scoreOf(self);
    OrderingLevels levels;
    for (NodeId j = 0; j < store.nodeCount(); ++j) {
        if (j == v) {
            continue;
        }
        std::optional<EventId> h = store.head(j);
        if (!h) {
            continue;
        }
        ProgressScore other = scoreOf(*h);
        if (mine < other) {
            levels.ahead += store.validators().stakeOf(j);
            levels.aheadOrTied += store.validators().stakeOf(j);
        } else if (other == mine) {
            levels.aheadOrTied += store.validators().stakeOf(j);
        }
    }
    return levels;
}

} // namespace

ProgressScore headScore(const DagStore& store, EventId id, Metric metric) {
    const Event& e = store.event(id);
    if (metric == Metric::RK) {
        return {e.frame, store.rootKnowledgeOf(id)};
    }
    return {0, qiOfEvent(store, id)};
}

std::vector<EventId> rankCandidateParents(const DagStore& store, NodeId v,
                                          const EmissionStrategy& strategy) {
    std::optional<EventId> self = store.head(v);
    if (!self) {
        return {};
    }
    std::vector<EventId> cands = candidateHeads(store, v, *self);
    if (cands.empty()) {
        return cands;
    }
    HypScorer scorer(store, v, strategy.selection, *self);
    std::vector<std::pair<ProgressScore, EventId>> scored;
    scored.reserve(cands.size());
    for (const EventId& c : cands) {
        scored.emplace_back(scorer.score({c}), c);
    }
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        if (!(a.first == b.first)) {
            return b.first < a.first;
        }
        return a.second.creator < b.second.creator;
    });
    std::vector<EventId> out;
    out.reserve(scored.size());
    for (auto& [s, id] : scored) {
        out.push_back(id);
    }
    return out;
}

namespace {

struct GreedyResult {
    std::vector<EventId> parents;
    /// Score of the self-extension draft with no references.
    ProgressScore baseline;
    /// Score with the accepted parents; exceeds baseline iff any accepted.
    ProgressScore chosen;
};

GreedyResult greedyParents(const DagStore& store, NodeId v, const EmissionStrategy& strategy,
                           EventId self) {
    GreedyResult res;
    res.parents.push_back(self);
    HypScorer scorer(store, v, strategy.selection, self);
    std::vector<EventId> accepted;
    res.baseline = scorer.score(accepted);
    res.chosen = res.baseline;
    if (strategy.maxParents <= 1) {
        return res;
    }
    std::vector<EventId> remaining = candidateHeads(store, v, self);
    while (1 + accepted.size() < strategy.maxParents && !remaining.empty()) {
        std::size_t bestIdx = remaining.size();
        ProgressScore bestScore = res.chosen;
        for (std::size_t i = 0; i < remaining.size(); ++i) {
            accepted.push_back(remaining[i]);
            ProgressScore s = scorer.score(accepted);
            accepted.pop_back();
            // Strict >: among equal gains the first candidate wins, and
            // `remaining` is creator ascending.
            if (bestScore < s) {
                bestScore = s;
                bestIdx = i;
            }
        }
        if (bestIdx == remaining.size()) {
            break;
        }
        accepted.push_back(remaining[bestIdx]);
        remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(bestIdx));
        res.chosen = bestScore;
    }
    res.parents.insert(res.parents.end(), accepted.begin(), accepted.end());
    return res;
}

} // namespace

std::vector<EventId> selectParents(const DagStore& store, NodeId v,
                                   const EmissionStrategy& strategy) {
    std::optional<EventId> self = store.head(v);
    if (!self) {
        return {};
    }
    return greedyParents(store, v, strategy, *self).parents;
}

Stake timingMetric(const DagStore& store, NodeId v, const EmissionStrategy& strategy) {
    std::optional<EventId> self = store.head(v);
    if (!self) {
        fail(ErrorCode::NoSelfEvent, "node " + std::to_string(v) + " has no events");
    }
    return orderingLevels(store, v, strategy.timing, *self).ahead;
}

TimingDecision evaluateEmission(const DagStore& store, NodeId v, const EmissionStrategy& strategy,
                                std::int64_t nowMs, std::int64_t lastEmitMs) {
    TimingDecision d;
    d.requiredStake = strategy.threshold * Rational(store.validators().totalStake());
    std::optional<EventId> self = store.head(v);
    if (!self) {
        d.emit = true;
        return d;
    }
    OrderingLevels levels = orderingLevels(store, v, strategy.timing, *self);
    d.stakeAhead = levels.ahead;
    d.stakeAheadOrTied = levels.aheadOrTied;
    if (Rational(d.stakeAheadOrTied) < d.requiredStake) {
        return d;
    }
    // Strict-progress gate. The baseline is the no-reference self-extension,
    // whose score equals the head's under RK; the stored QI value of the head
    // measures a past advancement and is not comparable across events.
    GreedyResult greedy = greedyParents(store, v, strategy, *self);
    if (greedy.parents.size() < 2 || !(greedy.baseline < greedy.chosen)) {
        return d;
    }
    // The rate limit defers a ready emission rather than dropping it; the
    // decision flips on its own once the interval elapses, so callers with
    // no later stimulus can re-evaluate at retryAtMs.
    if (nowMs - lastEmitMs < strategy.minIntervalMs) {
        d.retryAtMs = lastEmitMs + strategy.minIntervalMs;
        return d;
    }
    d.emit = true;
    d.parents = std::move(greedy.parents);
    return d;
}

bool shouldEmit(const DagStore& store, NodeId v, const EmissionStrategy& strategy,
                std::int64_t nowMs, std::int64_t lastEmitMs) {
    return evaluateEmission(store, v, strategy, nowMs, lastEmitMs).emit;
}

Event buildEvent(DagStore& store, NodeId v, const EmissionStrategy& strategy,
                 std::int64_t nowMs, std::span<const EventId> parents) {
    EventDraft draft;
    draft.creator = v;
    draft.creationTimeMs = nowMs;
    std::optional<EventId> self = store.head(v);
    if (!self) {
        if (!parents.empty()) {
            fail(ErrorCode::InvalidParents, "leaf event cannot have parents");
        }
        draft.seq = 1;
        return store.insert(draft);
    }
    if (!parents.empty() && parents.front() != *self) {
        fail(ErrorCode::InvalidParents, "first parent must be the creator's head");
    }
    draft.selfParent = *self;
    draft.seq = self->seq + 1;
    if (!parents.empty()) {
        draft.otherParents.assign(parents.begin() + 1, parents.end());
    }
    if (strategy.usesQi()) {
        HypotheticalEvent hyp{v, *self, draft.otherParents};
        draft.qiAtCreation = qiMetric(store, v, hyp);
    }
    return store.insert(draft);
}

Event buildEvent(DagStore& store, NodeId v, const EmissionStrategy& strategy,
                 std::int64_t nowMs) {
    std::vector<EventId> parents;
    if (store.head(v)) {
        parents = selectParents(store, v, strategy);
    }
    return buildEvent(store, v, strategy, nowMs, parents);
}

} // namespace lachesis
