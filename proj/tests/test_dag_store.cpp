#include "doctest.h"

#include "lachesis/dag_store.hpp"
#include "lachesis/errors.hpp"

#include "oracles.hpp"

#include <map>
#include <set>
#include <vector>

using namespace lachesis;

namespace {

EventDraft leaf(NodeId v, std::uint32_t nonce = 0) {
    EventDraft d;
    d.creator = v;
    d.seq = 1;
    d.nonce = nonce;
    return d;
}

EventDraft child(EventId self, std::vector<EventId> others = {}) {
    EventDraft d;
    d.creator = self.creator;
    d.seq = self.seq + 1;
    d.selfParent = self;
    d.otherParents = std::move(others);
    return d;
}

template <typename F>
ErrorCode codeOf(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an Error");
    return ErrorCode::UnknownEvent;
}

} // namespace

TEST_CASE("validator set quorum arithmetic") {
    ValidatorSet vs({1, 1, 1, 1});
    CHECK(vs.totalStake() == 4);
    CHECK(vs.quorum() == 3);
    CHECK(ValidatorSet::equal(3).quorum() == 3);
    CHECK(ValidatorSet({5, 3, 2}).quorum() == 7);

    for (Stake w = 1; w <= 200; ++w) {
        ValidatorSet one({w});
        CHECK(3 * one.quorum() > 2 * w);
        CHECK(one.quorum() <= w);
    }
    CHECK_THROWS_AS(ValidatorSet({}), Error);
    CHECK_THROWS_AS(ValidatorSet({1, 0}), Error);
}

TEST_CASE("leaf insertion: frame 1 root with unit index entry") {
    DagStore store(ValidatorSet::equal(3));
    const Event& a1 = store.insert(leaf(0));
    CHECK(a1.seq == 1);
    CHECK(a1.frame == 1);
    CHECK(a1.isRoot);
    auto hb = store.highestBefore(a1.id);
    CHECK(hb[0].seq == 1);
    CHECK(hb[1].seq == 0);
    CHECK(hb[2].seq == 0);
    CHECK_FALSE(hb[0].fork);
    CHECK(store.rootsOfFrame(1) == std::vector<EventId>{a1.id});
    CHECK(store.head(0) == a1.id);
    CHECK_FALSE(store.head(1).has_value());
}

TEST_CASE("self-chain insertion advances only the creator's entry") {
    DagStore store(ValidatorSet::equal(3));
    const EventId a1 = store.insert(leaf(0)).id;
    const Event& a2 = store.insert(child(a1));
    CHECK(a2.seq == 2);
    auto hb = store.highestBefore(a2.id);
    CHECK(hb[0].seq == 2);
    CHECK(hb[1].seq == 0);
    CHECK(hb[2].seq == 0);
    CHECK(a2.frame == 1);
    CHECK_FALSE(a2.isRoot);
    CHECK(store.head(0) == a2.id);
}

TEST_CASE("insertion rejects malformed drafts") {
    DagStore store(ValidatorSet::equal(3));
    const EventId a1 = store.insert(leaf(0)).id;
    const EventId b1 = store.insert(leaf(1)).id;

    SUBCASE("missing self-parent") {
        CHECK(codeOf([&] { store.insert(child(EventId{0, 5, 0})); }) ==
              ErrorCode::MissingParent);
    }
    SUBCASE("missing other-parent") {
        auto d = child(a1, {EventId{2, 1, 0}});
        CHECK(codeOf([&] { store.insert(d); }) == ErrorCode::MissingParent);
    }
    SUBCASE("seq mismatch with self-parent") {
        auto d = child(a1);
        d.seq = 3;
        CHECK(codeOf([&] { store.insert(d); }) == ErrorCode::InvalidSeq);
    }
    SUBCASE("leaf with seq != 1") {
        auto d = leaf(2);
        d.seq = 2;
        CHECK(codeOf([&] { store.insert(d); }) == ErrorCode::InvalidSeq);
    }
    SUBCASE("duplicate id") {
        CHECK(codeOf([&] { store.insert(leaf(0)); }) == ErrorCode::DuplicateId);
    }
    SUBCASE("self-parent by another creator") {
        EventDraft d;
        d.creator = 2;
        d.seq = 2;
        d.selfParent = a1;
        CHECK(codeOf([&] { store.insert(d); }) == ErrorCode::InvalidParents);
    }
    SUBCASE("other-parent by the event's own creator") {
        auto d = child(b1, {a1});
        d.otherParents = {b1};
        d.creator = 1;
        CHECK(codeOf([&] { store.insert(d); }) == ErrorCode::InvalidParents);
    }
    SUBCASE("two other-parents by one creator") {
        const EventId b2 = store.insert(child(b1)).id;
        auto d = child(a1, {b1, b2});
        CHECK(codeOf([&] { store.insert(d); }) == ErrorCode::InvalidParents);
    }
    SUBCASE("leaf with other-parents") {
        EventDraft d = leaf(2);
        d.otherParents = {a1};
        CHECK(codeOf([&] { store.insert(d); }) == ErrorCode::InvalidParents);
    }
    SUBCASE("creator out of range") {
        CHECK(codeOf([&] { store.insert(leaf(7)); }) == ErrorCode::InvalidRange);
    }
}

TEST_CASE("observes is reflexive and false across disconnected leaves") {
    DagStore store(ValidatorSet::equal(2));
    const EventId a1 = store.insert(leaf(0)).id;
    const EventId b1 = store.insert(leaf(1)).id;
    CHECK(store.observes(a1, a1));
    CHECK(store.observes(b1, b1));
    CHECK_FALSE(store.observes(a1, b1));
    CHECK_FALSE(store.observes(b1, a1));
    CHECK(codeOf([&] { store.observes(a1, EventId{1, 9, 0}); }) ==
          ErrorCode::UnknownEvent);
}

TEST_CASE("index entries match exhaustive ancestor walks on random DAGs") {
    for (std::uint64_t seed : {11u, 12u, 13u}) {
        DagStore store(ValidatorSet::equal(5));
        Rng rng(seed);
        oracle::growRandomDag(store, rng, 50);
        oracle::Oracle ref(store);
        for (std::size_t i = 0; i < store.eventCount(); ++i) {
            const Event& e = store.eventAt(i);
            const auto& sub = ref.subgraph(e.id);
            auto hb = store.highestBefore(e.id);
            for (NodeId node = 0; node < store.nodeCount(); ++node) {
                CHECK(hb[node].seq == ref.highestSeq(sub, node));
                CHECK_FALSE(hb[node].fork);
            }
        }
    }
}

TEST_CASE("observes agrees with DFS reachability on all pairs") {
    auto checkAllPairs = [](const DagStore& store) {
        oracle::Oracle ref(store);
        for (std::size_t i = 0; i < store.eventCount(); ++i) {
            for (std::size_t j = 0; j < store.eventCount(); ++j) {
                const EventId a = store.eventAt(i).id;
                const EventId b = store.eventAt(j).id;
                CHECK(store.observes(a, b) == ref.observes(a, b));
            }
        }
    };

    SUBCASE("fork-free") {
        DagStore store(ValidatorSet::equal(6));
        Rng rng(21);
        oracle::growRandomDag(store, rng, 120);
        checkAllPairs(store);
    }
    SUBCASE("with forks") {
        DagStore store(ValidatorSet::equal(6));
        Rng rng(22);
        oracle::growForkedDag(store, rng, 120);
        checkAllPairs(store);
    }
}

TEST_CASE("index fork flags match brute-force fork detection") {
    for (std::uint64_t seed : {31u, 32u, 33u, 34u}) {
        DagStore store(ValidatorSet::equal(5));
        Rng rng(seed);
        oracle::growForkedDag(store, rng, 90);
        oracle::Oracle ref(store);
        bool sawFork = false;
        for (std::size_t i = 0; i < store.eventCount(); ++i) {
            const Event& e = store.eventAt(i);
            const auto& sub = ref.subgraph(e.id);
            auto hb = store.highestBefore(e.id);
            for (NodeId node = 0; node < store.nodeCount(); ++node) {
                CHECK(hb[node].seq == ref.highestSeq(sub, node));
                const bool expect = ref.forkedIn(sub, node);
                sawFork = sawFork || expect;
                CHECK(hb[node].fork == expect);
            }
        }
        CHECK(sawFork);
    }
}

TEST_CASE("forkless-cause: quorum observation of a root") {
    DagStore store(ValidatorSet::equal(4));
    const EventId a1 = store.insert(leaf(0)).id;
    const EventId b1 = store.insert(leaf(1)).id;
    const EventId c1 = store.insert(leaf(2)).id;
    const EventId d1 = store.insert(leaf(3)).id;
    const EventId b2 = store.insert(child(b1, {a1})).id;
    const EventId c2 = store.insert(child(c1, {a1})).id;
    const EventId d2 = store.insert(child(d1, {a1})).id;
    const EventId a2 = store.insert(child(a1, {b2, c2, d2})).id;

    CHECK(store.forklessCause(a1, a2));
    oracle::Oracle ref(store);
    CHECK(ref.forklessCause(a1, a2));

    SUBCASE("single observer stays below quorum") {
        const EventId a3 = store.insert(child(a2)).id;
        CHECK_FALSE(store.forklessCause(a3, a3));
        DagStore lone(ValidatorSet::equal(4));
        const EventId x1 = lone.insert(leaf(0)).id;
        const EventId x2 = lone.insert(child(x1)).id;
        CHECK_FALSE(lone.forklessCause(x1, x2));
    }
}

TEST_CASE("forkless-cause excludes forked observers") {
    // B equivocates: two seq-1 leaves. One branch observes the root, the
    // other does not; e sees both branches, so B is excluded.
    DagStore store(ValidatorSet::equal(4));
    const EventId a1 = store.insert(leaf(0)).id;
    const EventId b1 = store.insert(leaf(1)).id;
    const EventId b1x = store.insert(leaf(1, 1)).id;
    const EventId c1 = store.insert(leaf(2)).id;
    const EventId d1 = store.insert(leaf(3)).id;
    const EventId b2 = store.insert(child(b1, {a1})).id;

    EventDraft forkChild;
    forkChild.creator = 1;
    forkChild.seq = 2;
    forkChild.nonce = 1;
    forkChild.selfParent = b1x;
    const EventId b2x = store.insert(forkChild).id;

    const EventId c2 = store.insert(child(c1, {b2})).id;
    const EventId d2 = store.insert(child(d1, {b2x})).id;
    const EventId a2 = store.insert(child(a1, {c2, d2})).id;

    CHECK(store.nodeForked(1));
    CHECK(store.highestBefore(a2)[1].fork);

    // Without exclusion A, B, C would reach quorum; with it only A and C count.
    CHECK_FALSE(store.forklessCause(a1, a2));
    oracle::Oracle ref(store);
    CHECK_FALSE(ref.forklessCause(a1, a2));
    CHECK(ref.forkedIn(ref.subgraph(a2), 1));

    // A root created by the forked node is voided outright.
    CHECK_FALSE(store.forklessCause(b1, a2));
    const auto col = store.forklessCauseColumn(store.evalOf(a2), b1);
    CHECK(std::count(col.begin(), col.end(), true) == 0);
}

TEST_CASE("frame assignment: quorum of frame-1 roots promotes to frame 2") {
    DagStore store(ValidatorSet::equal(4));
    const EventId a1 = store.insert(leaf(0)).id;
    const EventId b1 = store.insert(leaf(1)).id;
    const EventId c1 = store.insert(leaf(2)).id;
    const EventId d1 = store.insert(leaf(3)).id;
    const EventId a2 = store.insert(child(a1, {b1, c1, d1})).id;
    const EventId b2 = store.insert(child(b1, {a2})).id;
    const EventId c2 = store.insert(child(c1, {a2})).id;
    const EventId d2 = store.insert(child(d1, {a2})).id;

    CHECK(store.event(a2).frame == 1);
    CHECK_FALSE(store.event(a2).isRoot);
    CHECK(store.event(b2).frame == 1);

    const Event& a3 = store.insert(child(a2, {b2, c2, d2}));
    CHECK(a3.frame == 2);
    CHECK(a3.isRoot);
    CHECK(store.maxFrame() == 2);
    CHECK(store.rootsOfFrame(2) == std::vector<EventId>{a3.id});
}

TEST_CASE("frame assignment: quorum on only a minority of roots does not promote") {
    DagStore store(ValidatorSet::equal(4));
    const EventId a1 = store.insert(leaf(0)).id;
    const EventId b1 = store.insert(leaf(1)).id;
    const EventId c1 = store.insert(leaf(2)).id;
    const EventId d1 = store.insert(leaf(3)).id;
    const EventId a2 = store.insert(child(a1, {b1})).id;
    const EventId b2 = store.insert(child(b1, {a2})).id;
    const EventId c2 = store.insert(child(c1, {b2})).id;
    const EventId d2 = store.insert(child(d1, {c2})).id;
    const Event& d3 = store.insert(child(d2));

    // a1 and b1 are each observed by all four nodes inside sub(d3); c1 and d1
    // are not near quorum, so only 2 of 4 root creators forkless-cause d3.
    oracle::Oracle ref(store);
    const auto& sub = ref.subgraph(d3.id);
    CHECK(ref.stakeOf(ref.column(sub, a1)) >= 3);
    CHECK(ref.stakeOf(ref.column(sub, b1)) >= 3);
    CHECK(ref.stakeOf(ref.column(sub, c1)) < 3);
    CHECK(ref.stakeOf(ref.column(sub, d1)) < 3);
    CHECK(d3.frame == 1);
    CHECK_FALSE(d3.isRoot);
}

TEST_CASE("frames, roots and cached knowledge match the replay oracle") {
    auto crossCheck = [](DagStore& store) {
        oracle::Oracle ref(store);
        oracle::FrameOracle frames(ref);
        const std::uint64_t n2 =
            std::uint64_t(store.nodeCount()) * store.nodeCount();
        for (std::size_t i = 0; i < store.eventCount(); ++i) {
            const Event& e = store.eventAt(i);
            frames.add(e.id);
            CHECK(e.frame == frames.frame(e.id));
            CHECK(e.isRoot == frames.isRoot(e.id));
            CHECK(store.rootKnowledgeOf(e.id) == Rational(frames.rawSum(e.id), n2));
        }
        for (std::uint32_t f = 1; f <= store.maxFrame(); ++f) {
            CHECK(store.rootsOfFrame(f) == frames.roots(f));
        }
    };

    SUBCASE("fork-free") {
        for (std::uint64_t seed : {41u, 42u}) {
            DagStore store(ValidatorSet::equal(4));
            Rng rng(seed);
            oracle::growRandomDag(store, rng, 150);
            crossCheck(store);
        }
    }
    SUBCASE("weighted stakes") {
        DagStore store(ValidatorSet({5, 3, 2, 1}));
        Rng rng(43);
        oracle::growRandomDag(store, rng, 150);
        crossCheck(store);
    }
    SUBCASE("with forks") {
        for (std::uint64_t seed : {44u, 45u}) {
            DagStore store(ValidatorSet::equal(4));
            Rng rng(seed);
            oracle::growForkedDag(store, rng, 120);
            crossCheck(store);
        }
    }
}

TEST_CASE("frame monotonicity and per-chain root uniqueness") {
    DagStore store(ValidatorSet::equal(5));
    Rng rng(51);
    oracle::growRandomDag(store, rng, 250);

    std::map<std::pair<NodeId, std::uint32_t>, int> rootsPerChainFrame;
    for (std::size_t i = 0; i < store.eventCount(); ++i) {
        const Event& e = store.eventAt(i);
        if (e.selfParent) {
            CHECK(e.frame >= store.event(*e.selfParent).frame);
        }
        for (const EventId& p : e.otherParents) {
            CHECK(e.frame >= store.event(p).frame);
        }
        if (e.isRoot) {
            CHECK(++rootsPerChainFrame[{e.creator, e.frame}] == 1);
        }
    }
    CHECK(store.maxFrame() > 2);
}

TEST_CASE("forkless-cause is monotone under observation") {
    DagStore store(ValidatorSet::equal(4));
    Rng rng(61);
    oracle::growRandomDag(store, rng, 100);

    std::vector<EventId> roots;
    for (std::uint32_t f = 1; f <= store.maxFrame(); ++f) {
        const auto& rs = store.rootsOfFrame(f);
        roots.insert(roots.end(), rs.begin(), rs.end());
    }
    for (const EventId& r : roots) {
        for (std::size_t i = 0; i < store.eventCount(); ++i) {
            const EventId e = store.eventAt(i).id;
            if (!store.forklessCause(r, e)) {
                continue;
            }
            for (std::size_t j = 0; j < store.eventCount(); ++j) {
                const EventId e2 = store.eventAt(j).id;
                if (store.observes(e2, e)) {
                    CHECK(store.forklessCause(r, e2));
                }
            }
        }
    }
}
