#pragma once

#include "lachesis/rng.hpp"
#include "lachesis/validators.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace lachesis {

enum class LatencySource { Constant, UniformSynthetic, CsvDataset };

/// Symmetric city-to-city latencies parsed from a CSV dataset.
struct CityLatencies {
    std::vector<std::string> cities;
    /// Dense row-major matrix; diagonal defaults to 0, same-city entries in
    /// the file may override it.
    std::vector<double> ms;

    double at(std::size_t a, std::size_t b) const { return ms[a * cities.size() + b]; }
};

/// Parses `city_a,city_b,latency_ms` lines (header required, `#` comments).
/// Asymmetric duplicates resolve to the max with a warning on `warnings`.
/// Every unordered pair of distinct cities must be covered.
CityLatencies loadLatencyCsv(const std::string& path, std::ostream* warnings = nullptr);
CityLatencies parseLatencyCsv(const std::string& text, const std::string& name,
                              std::ostream* warnings = nullptr);

/// Pairwise message delays between nodes. Symmetric, zero diagonal,
/// deterministic for a given seed.
class LatencyModel {
public:
    static LatencyModel constant(std::uint32_t n, double delayMs);

    /// Independent uniform delay in [minMs, maxMs] per unordered node pair.
    static LatencyModel uniformSynthetic(std::uint32_t n, double minMs, double maxMs,
                                         std::uint64_t seed);

    /// Assigns each node a city uniformly at random with citySeed, then takes
    /// the city-pair latency. Nodes sharing a city get the dataset's
    /// same-city entry, or 0 when absent.
    static LatencyModel fromCities(const CityLatencies& data, std::uint32_t n,
                                   std::uint64_t citySeed);

    std::uint32_t nodeCount() const { return n_; }
    double delayMs(NodeId a, NodeId b) const { return matrix_[a * n_ + b]; }

private:
    LatencyModel(std::uint32_t n, std::vector<double> matrix)
        : n_(n), matrix_(std::move(matrix)) {}

    std::uint32_t n_ = 0;
    std::vector<double> matrix_;
};

enum class StakeDistribution { Equal, LogUniform };

/// Equal gives every node stake 1; logUniform draws round(exp(U[ln min,
/// ln max])) per node, clamped to >= 1. Deterministic per seed.
ValidatorSet sampleStakes(std::uint32_t n, std::uint64_t seed, StakeDistribution dist,
                          std::uint64_t minStake = 1, std::uint64_t maxStake = 100);

} // namespace lachesis
