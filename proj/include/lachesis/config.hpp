#pragma once

#include "lachesis/emission.hpp"
#include "lachesis/sim_support.hpp"

#include <cstdint>
#include <string>

namespace lachesis {

/// One simulation setup. All randomness derives from `seed` (and `citySeed`
/// when set); runs with equal configs are bit-identical.
struct SimConfig {
    std::uint32_t nodes = 10;
    std::uint64_t seed = 1;
    std::int64_t durationMs = 10000;

    StakeDistribution stakes = StakeDistribution::LogUniform;
    std::uint64_t stakeMin = 1;
    std::uint64_t stakeMax = 100;

    /// Simulation default rate limit is 100 ms; per-arrival evaluation with a
    /// zero interval lets each delivery trigger an emission and the event
    /// count grows geometrically per latency generation.
    EmissionStrategy strategy{.minIntervalMs = 100};

    LatencySource latency = LatencySource::Constant;
    double latencyMs = 100.0;
    double latencyMinMs = 20.0;
    double latencyMaxMs = 300.0;
    std::string latencyCsv;
    double jitterMs = 0.0;
    /// City assignment seed for csv datasets; 0 derives one from `seed` so
    /// that seed-paired runs share their topology.
    std::uint64_t citySeed = 0;

    /// Config identifier echoed in reports; defaults to timing-selection.
    std::string label;

    std::string effectiveLabel() const;

    bool operator==(const SimConfig&) const = default;
};

/// Parses a flat `key = value` document (# comments, blank lines allowed).
/// Unknown keys and malformed values raise ConfigError with a line number.
SimConfig parseConfig(const std::string& text, const std::string& name);

/// Reads and parses a config file; a missing file raises ConfigError naming
/// the path.
SimConfig loadConfig(const std::string& path);

/// Canonical config document; parseConfig(serializeConfig(c)) == c.
std::string serializeConfig(const SimConfig& cfg);

const char* metricName(Metric m);
const char* stakeDistributionName(StakeDistribution d);
const char* latencySourceName(LatencySource s);

/// Parses "p/q", decimal, or integer literals into an exact rational.
Rational parseRational(const std::string& text);
std::string rationalText(const Rational& r);

/// Shortest decimal text that parses back to exactly the same double.
std::string doubleText(double v);

} // namespace lachesis
