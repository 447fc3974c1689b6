#include "lachesis/snapshot.hpp"

#include "lachesis/errors.hpp"

#include <charconv>
#include <sstream>
#include <vector>

namespace lachesis {

namespace {

template <typename T>
T parseInt(const std::string& text, const std::string& where) {
    T value{};
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        fail(ErrorCode::ParseError, where + ": bad integer '" + text + "'");
    }
    return value;
}

std::vector<std::string> tokens(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream in(line);
    std::string tok;
    while (in >> tok) {
        out.push_back(tok);
    }
    return out;
}

} // namespace

EventId parseEventId(const std::string& text) {
    const auto first = text.find(':');
    if (first == std::string::npos) {
        fail(ErrorCode::ParseError, "bad event id '" + text + "' (want creator:seq[:nonce])");
    }
    const auto second = text.find(':', first + 1);
    EventId id;
    id.creator = parseInt<NodeId>(text.substr(0, first), "event id");
    if (second == std::string::npos) {
        id.seq = parseInt<std::uint32_t>(text.substr(first + 1), "event id");
    } else {
        id.seq = parseInt<std::uint32_t>(text.substr(first + 1, second - first - 1), "event id");
        id.nonce = parseInt<std::uint32_t>(text.substr(second + 1), "event id");
    }
    return id;
}

std::string dumpDag(const DagStore& store) {
    std::ostringstream out;
    out << "# nodes " << store.nodeCount() << " stakes";
    for (Stake s : store.validators().stakes()) {
        out << " " << s;
    }
    out << "\n";
    for (std::size_t i = 0; i < store.eventCount(); ++i) {
        const Event& e = store.eventAt(i);
        out << e.id.str() << " " << e.creator << " " << e.seq << " "
            << (e.selfParent ? e.selfParent->str() : "-");
        for (const EventId& p : e.otherParents) {
            out << " " << p.str();
        }
        out << " " << e.frame << " " << (e.isRoot ? 1 : 0) << "\n";
    }
    return out.str();
}

DagStore loadDag(const std::string& text, const std::string& name) {
    std::istringstream in(text);
    std::string line;
    std::size_t lineNo = 0;

    // First pass for the validator header; creators size the set otherwise.
    std::vector<Stake> stakes;
    NodeId maxCreator = 0;
    bool sawEvent = false;
    while (std::getline(in, line)) {
        ++lineNo;
        const std::vector<std::string> toks = tokens(line);
        if (toks.empty()) {
            continue;
        }
        if (toks[0] == "#") {
            if (toks.size() >= 4 && toks[1] == "nodes" && toks[3] == "stakes" && stakes.empty()) {
                const auto n = parseInt<std::uint32_t>(toks[2], name);
                if (toks.size() != 4 + n) {
                    fail(ErrorCode::ParseError,
                         name + ":" + std::to_string(lineNo) + ": stake count mismatch");
                }
                for (std::uint32_t i = 0; i < n; ++i) {
                    stakes.push_back(parseInt<Stake>(toks[4 + i], name));
                }
            }
            continue;
        }
        if (toks.size() < 6) {
            fail(ErrorCode::ParseError,
                 name + ":" + std::to_string(lineNo) + ": expected id creator seq selfParent"
                                                        " [others...] frame isRoot");
        }
        maxCreator = std::max(maxCreator, parseEventId(toks[0]).creator);
        sawEvent = true;
    }
    if (!sawEvent) {
        fail(ErrorCode::ParseError, name + ": no events");
    }
    if (stakes.empty()) {
        stakes.assign(maxCreator + 1, 1);
    } else if (maxCreator >= stakes.size()) {
        fail(ErrorCode::ParseError, name + ": creator out of range of the validator header");
    }

    DagStore store((ValidatorSet(stakes)));
    in = std::istringstream(text);
    lineNo = 0;
    while (std::getline(in, line)) {
        ++lineNo;
        const std::vector<std::string> toks = tokens(line);
        if (toks.empty() || toks[0] == "#") {
            continue;
        }
        const std::string where = name + ":" + std::to_string(lineNo);
        const EventId id = parseEventId(toks[0]);
        EventDraft draft;
        draft.creator = parseInt<NodeId>(toks[1], where);
        draft.seq = parseInt<std::uint32_t>(toks[2], where);
        draft.nonce = id.nonce;
        if (draft.creator != id.creator || draft.seq != id.seq) {
            fail(ErrorCode::ParseError, where + ": id disagrees with creator/seq fields");
        }
        if (toks[3] != "-") {
            draft.selfParent = parseEventId(toks[3]);
        }
        for (std::size_t i = 4; i + 2 < toks.size(); ++i) {
            draft.otherParents.push_back(parseEventId(toks[i]));
        }
        const auto frame = parseInt<std::uint32_t>(toks[toks.size() - 2], where);
        const auto isRoot = parseInt<std::uint32_t>(toks[toks.size() - 1], where);
        if (isRoot > 1) {
            fail(ErrorCode::ParseError, where + ": isRoot must be 0 or 1");
        }

        const Event* inserted = nullptr;
        try {
            inserted = &store.insert(draft);
        } catch (const Error& e) {
            fail(ErrorCode::ParseError, where + ": " + e.what());
        }
        if (inserted->frame != frame || inserted->isRoot != (isRoot == 1)) {
            fail(ErrorCode::ParseError,
                 where + ": stated frame/root (" + std::to_string(frame) + "," +
                     std::to_string(isRoot) + ") disagree with recomputed (" +
                     std::to_string(inserted->frame) + "," +
                     std::to_string(inserted->isRoot ? 1 : 0) + ")");
        }
    }
    return store;
}

} // namespace lachesis
