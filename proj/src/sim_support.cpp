#include "lachesis/sim_support.hpp"

#include "lachesis/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <utility>

namespace lachesis {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        return "";
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> splitCsvLine(const std::string& line) {
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) {
        fields.push_back(trim(field));
    }
    return fields;
}

} // namespace

CityLatencies parseLatencyCsv(const std::string& text, const std::string& name,
                              std::ostream* warnings) {
    std::map<std::string, std::size_t> cityIndex;
    std::vector<std::string> cities;
    // (low, high) -> (value, seen) keyed by city indices
    std::map<std::pair<std::size_t, std::size_t>, double> pairs;

    const auto cityOf = [&](const std::string& label) {
        auto [it, inserted] = cityIndex.try_emplace(label, cities.size());
        if (inserted) {
            cities.push_back(label);
        }
        return it->second;
    };

    std::istringstream in(text);
    std::string line;
    std::size_t lineNo = 0;
    bool sawHeader = false;
    while (std::getline(in, line)) {
        ++lineNo;
        const std::string t = trim(line);
        if (t.empty() || t.front() == '#') {
            continue;
        }
        if (!sawHeader) {
            if (splitCsvLine(t) != std::vector<std::string>{"city_a", "city_b", "latency_ms"}) {
                fail(ErrorCode::ParseError,
                     name + ":" + std::to_string(lineNo) +
                         ": expected header city_a,city_b,latency_ms");
            }
            sawHeader = true;
            continue;
        }
        const std::vector<std::string> fields = splitCsvLine(t);
        if (fields.size() != 3 || fields[0].empty() || fields[1].empty()) {
            fail(ErrorCode::ParseError,
                 name + ":" + std::to_string(lineNo) + ": expected city_a,city_b,latency_ms");
        }
        double value = 0;
        try {
            std::size_t pos = 0;
            value = std::stod(fields[2], &pos);
            if (pos != fields[2].size()) {
                throw std::invalid_argument("trailing characters");
            }
        } catch (const std::exception&) {
            fail(ErrorCode::ParseError,
                 name + ":" + std::to_string(lineNo) + ": bad latency value '" + fields[2] + "'");
        }
        if (value < 0) {
            fail(ErrorCode::NegativeLatency,
                 name + ":" + std::to_string(lineNo) + ": negative latency " + fields[2]);
        }
        const std::size_t a = cityOf(fields[0]);
        const std::size_t b = cityOf(fields[1]);
        const auto key = std::minmax(a, b);
        auto [it, inserted] = pairs.try_emplace({key.first, key.second}, value);
        if (!inserted && it->second != value) {
            if (warnings) {
                *warnings << "warning: " << name << ":" << lineNo << ": conflicting latency for "
                          << cities[a] << "," << cities[b] << " (" << it->second << " vs " << value
                          << "), taking max\n";
            }
            it->second = std::max(it->second, value);
        }
    }
    if (!sawHeader) {
        fail(ErrorCode::ParseError, name + ": empty dataset");
    }
    if (cities.size() < 2) {
        fail(ErrorCode::ParseError, name + ": need at least two cities");
    }

    CityLatencies out;
    out.cities = cities;
    out.ms.assign(cities.size() * cities.size(), 0.0);
    for (std::size_t a = 0; a < cities.size(); ++a) {
        for (std::size_t b = a; b < cities.size(); ++b) {
            const auto it = pairs.find({a, b});
            if (it == pairs.end()) {
                if (a == b) {
                    continue; // same-city latency defaults to 0
                }
                fail(ErrorCode::MissingPair,
                     name + ": no latency for " + cities[a] + "," + cities[b]);
            }
            out.ms[a * cities.size() + b] = it->second;
            out.ms[b * cities.size() + a] = it->second;
        }
    }
    return out;
}

CityLatencies loadLatencyCsv(const std::string& path, std::ostream* warnings) {
    std::ifstream in(path);
    if (!in) {
        fail(ErrorCode::ParseError, "cannot open latency dataset " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parseLatencyCsv(buf.str(), path, warnings);
}

LatencyModel LatencyModel::constant(std::uint32_t n, double delayMs) {
    if (delayMs < 0) {
        fail(ErrorCode::NegativeLatency, "constant latency must be >= 0");
    }
    std::vector<double> m(std::size_t(n) * n, delayMs);
    for (std::uint32_t i = 0; i < n; ++i) {
        m[std::size_t(i) * n + i] = 0.0;
    }
    return LatencyModel(n, std::move(m));
}

LatencyModel LatencyModel::uniformSynthetic(std::uint32_t n, double minMs, double maxMs,
                                            std::uint64_t seed) {
    if (minMs < 0 || maxMs < minMs) {
        fail(ErrorCode::NegativeLatency, "uniform latency range must satisfy 0 <= min <= max");
    }
    Rng rng(seed);
    std::vector<double> m(std::size_t(n) * n, 0.0);
    for (std::uint32_t i = 0; i < n; ++i) {
        for (std::uint32_t j = i + 1; j < n; ++j) {
            const double d = minMs + (maxMs - minMs) * rng.uniform01();
            m[std::size_t(i) * n + j] = d;
            m[std::size_t(j) * n + i] = d;
        }
    }
    return LatencyModel(n, std::move(m));
}

LatencyModel LatencyModel::fromCities(const CityLatencies& data, std::uint32_t n,
                                      std::uint64_t citySeed) {
    Rng rng(citySeed);
    std::vector<std::size_t> assigned(n);
    for (std::uint32_t i = 0; i < n; ++i) {
        assigned[i] = rng.below(data.cities.size());
    }
    std::vector<double> m(std::size_t(n) * n, 0.0);
    for (std::uint32_t i = 0; i < n; ++i) {
        for (std::uint32_t j = 0; j < n; ++j) {
            m[std::size_t(i) * n + j] = i == j ? 0.0 : data.at(assigned[i], assigned[j]);
        }
    }
    return LatencyModel(n, std::move(m));
}

ValidatorSet sampleStakes(std::uint32_t n, std::uint64_t seed, StakeDistribution dist,
                          std::uint64_t minStake, std::uint64_t maxStake) {
    if (n < 1) {
        fail(ErrorCode::InvalidRange, "need at least one node");
    }
    if (dist == StakeDistribution::Equal) {
        return ValidatorSet::equal(n);
    }
    if (minStake < 1 || maxStake < minStake) {
        fail(ErrorCode::InvalidRange, "stake range must satisfy 1 <= min <= max");
    }
    Rng rng(seed);
    std::vector<Stake> stakes(n);
    const double lo = std::log(static_cast<double>(minStake));
    const double hi = std::log(static_cast<double>(maxStake));
    for (std::uint32_t i = 0; i < n; ++i) {
        const double x = std::exp(lo + (hi - lo) * rng.uniform01());
        stakes[i] = std::max<Stake>(1, static_cast<Stake>(std::llround(x)));
    }
    return ValidatorSet(std::move(stakes));
}

} // namespace lachesis
