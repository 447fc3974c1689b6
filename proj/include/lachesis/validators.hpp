#pragma once

#include "lachesis/errors.hpp"

#include <cstdint>
#include <numeric>
#include <vector>

namespace lachesis {

/// Dense node index in [0, n). Stable over a run.
using NodeId = std::uint32_t;

using Stake = std::uint64_t;

/// Node identities with stakes, total stake W and the BFT quorum threshold
/// Q = smallest integer strictly greater than 2W/3.
class ValidatorSet {
public:
    explicit ValidatorSet(std::vector<Stake> stakes) : stakes_(std::move(stakes)) {
        if (stakes_.empty()) {
            fail(ErrorCode::InvalidRange, "validator set must not be empty");
        }
        for (Stake s : stakes_) {
            if (s == 0) {
                fail(ErrorCode::InvalidRange, "all stakes must be >= 1");
            }
        }
        total_ = std::accumulate(stakes_.begin(), stakes_.end(), Stake{0});
        quorum_ = total_ * 2 / 3 + 1;
    }

    static ValidatorSet equal(std::uint32_t n) {
        return ValidatorSet(std::vector<Stake>(n, 1));
    }

    std::uint32_t size() const { return static_cast<std::uint32_t>(stakes_.size()); }
    Stake stakeOf(NodeId v) const { return stakes_.at(v); }
    Stake totalStake() const { return total_; }
    Stake quorum() const { return quorum_; }
    const std::vector<Stake>& stakes() const { return stakes_; }

    bool operator==(const ValidatorSet&) const = default;

private:
    std::vector<Stake> stakes_;
    Stake total_ = 0;
    Stake quorum_ = 0;
};

} // namespace lachesis
