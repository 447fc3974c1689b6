#include "lachesis/config.hpp"

#include "lachesis/errors.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <string_view>

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

template <typename T>
T parseNumber(const std::string& text, const std::string& where) {
    T value{};
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        fail(ErrorCode::ConfigError, where + ": bad number '" + text + "'");
    }
    return value;
}

double parseDouble(const std::string& text, const std::string& where) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(text, &pos);
        if (pos != text.size()) {
            throw std::invalid_argument("trailing characters");
        }
        return v;
    } catch (const std::exception&) {
        fail(ErrorCode::ConfigError, where + ": bad number '" + text + "'");
    }
}

Metric parseMetric(const std::string& text, const std::string& where) {
    if (text == "qi") {
        return Metric::QI;
    }
    if (text == "rk") {
        return Metric::RK;
    }
    fail(ErrorCode::ConfigError, where + ": expected qi or rk, got '" + text + "'");
}

} // namespace

const char* metricName(Metric m) { return m == Metric::QI ? "qi" : "rk"; }

const char* stakeDistributionName(StakeDistribution d) {
    return d == StakeDistribution::Equal ? "equal" : "loguniform";
}

const char* latencySourceName(LatencySource s) {
    switch (s) {
    case LatencySource::Constant: return "constant";
    case LatencySource::UniformSynthetic: return "uniform";
    case LatencySource::CsvDataset: return "csv";
    }
    return "constant";
}

Rational parseRational(const std::string& text) {
    const auto slash = text.find('/');
    if (slash != std::string::npos) {
        const auto num = parseNumber<std::int64_t>(trim(text.substr(0, slash)), "threshold");
        const auto den = parseNumber<std::int64_t>(trim(text.substr(slash + 1)), "threshold");
        if (den == 0) {
            fail(ErrorCode::ConfigError, "threshold: zero denominator in '" + text + "'");
        }
        return Rational(num, den);
    }
    const auto dot = text.find('.');
    if (dot != std::string::npos) {
        const std::string digits = text.substr(0, dot) + text.substr(dot + 1);
        const auto scaled = parseNumber<std::int64_t>(digits, "threshold");
        Rational den = 1;
        for (std::size_t i = dot + 1; i < text.size(); ++i) {
            den *= 10;
        }
        return Rational(scaled) / den;
    }
    return Rational(parseNumber<std::int64_t>(text, "threshold"));
}

std::string rationalText(const Rational& r) {
    std::ostringstream out;
    out << numerator(r);
    if (denominator(r) != 1) {
        out << "/" << denominator(r);
    }
    return out.str();
}

std::string doubleText(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

std::string SimConfig::effectiveLabel() const {
    if (!label.empty()) {
        return label;
    }
    return std::string(metricName(strategy.timing)) + "-" + metricName(strategy.selection);
}

SimConfig parseConfig(const std::string& text, const std::string& name) {
    SimConfig cfg;
    std::istringstream in(text);
    std::string line;
    std::size_t lineNo = 0;
    while (std::getline(in, line)) {
        ++lineNo;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line = line.substr(0, hash);
        }
        const std::string t = trim(line);
        if (t.empty()) {
            continue;
        }
        const std::string where = name + ":" + std::to_string(lineNo);
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            fail(ErrorCode::ConfigError, where + ": expected key = value");
        }
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (key.empty() || value.empty()) {
            fail(ErrorCode::ConfigError, where + ": expected key = value");
        }

        if (key == "nodes") {
            cfg.nodes = parseNumber<std::uint32_t>(value, where);
        } else if (key == "seed") {
            cfg.seed = parseNumber<std::uint64_t>(value, where);
        } else if (key == "duration_ms") {
            cfg.durationMs = parseNumber<std::int64_t>(value, where);
        } else if (key == "stakes") {
            if (value == "equal") {
                cfg.stakes = StakeDistribution::Equal;
            } else if (value == "loguniform") {
                cfg.stakes = StakeDistribution::LogUniform;
            } else {
                fail(ErrorCode::ConfigError, where + ": expected equal or loguniform");
            }
        } else if (key == "stake_min") {
            cfg.stakeMin = parseNumber<std::uint64_t>(value, where);
        } else if (key == "stake_max") {
            cfg.stakeMax = parseNumber<std::uint64_t>(value, where);
        } else if (key == "timing") {
            cfg.strategy.timing = parseMetric(value, where);
        } else if (key == "selection") {
            cfg.strategy.selection = parseMetric(value, where);
        } else if (key == "max_parents") {
            cfg.strategy.maxParents = parseNumber<std::uint32_t>(value, where);
            if (cfg.strategy.maxParents < 1) {
                fail(ErrorCode::ConfigError, where + ": max_parents must be >= 1");
            }
        } else if (key == "threshold") {
            const Rational theta = parseRational(value);
            if (theta <= 0 || theta > 1) {
                fail(ErrorCode::ConfigError, where + ": threshold must be in (0, 1]");
            }
            cfg.strategy.threshold = theta;
        } else if (key == "min_interval_ms") {
            cfg.strategy.minIntervalMs = parseNumber<std::int64_t>(value, where);
        } else if (key == "latency") {
            if (value == "constant") {
                cfg.latency = LatencySource::Constant;
            } else if (value == "uniform") {
                cfg.latency = LatencySource::UniformSynthetic;
            } else if (value == "csv") {
                cfg.latency = LatencySource::CsvDataset;
            } else {
                fail(ErrorCode::ConfigError, where + ": expected constant, uniform or csv");
            }
        } else if (key == "latency_ms") {
            cfg.latencyMs = parseDouble(value, where);
        } else if (key == "latency_min_ms") {
            cfg.latencyMinMs = parseDouble(value, where);
        } else if (key == "latency_max_ms") {
            cfg.latencyMaxMs = parseDouble(value, where);
        } else if (key == "latency_csv") {
            cfg.latencyCsv = value;
        } else if (key == "jitter_ms") {
            cfg.jitterMs = parseDouble(value, where);
            if (cfg.jitterMs < 0) {
                fail(ErrorCode::ConfigError, where + ": jitter_ms must be >= 0");
            }
        } else if (key == "city_seed") {
            cfg.citySeed = parseNumber<std::uint64_t>(value, where);
        } else if (key == "label") {
            cfg.label = value;
        } else {
            fail(ErrorCode::ConfigError, where + ": unknown key '" + key + "'");
        }
    }
    if (cfg.nodes < 1) {
        fail(ErrorCode::ConfigError, name + ": nodes must be >= 1");
    }
    if (cfg.durationMs <= 0) {
        fail(ErrorCode::ConfigError, name + ": duration_ms must be > 0");
    }
    if (cfg.latency == LatencySource::CsvDataset && cfg.latencyCsv.empty()) {
        fail(ErrorCode::ConfigError, name + ": latency = csv requires latency_csv");
    }
    return cfg;
}

SimConfig loadConfig(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        fail(ErrorCode::ConfigError, "cannot open config file " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parseConfig(buf.str(), path);
}

std::string serializeConfig(const SimConfig& cfg) {
    std::ostringstream out;
    out << "nodes = " << cfg.nodes << "\n";
    out << "seed = " << cfg.seed << "\n";
    out << "duration_ms = " << cfg.durationMs << "\n";
    out << "stakes = " << stakeDistributionName(cfg.stakes) << "\n";
    out << "stake_min = " << cfg.stakeMin << "\n";
    out << "stake_max = " << cfg.stakeMax << "\n";
    out << "timing = " << metricName(cfg.strategy.timing) << "\n";
    out << "selection = " << metricName(cfg.strategy.selection) << "\n";
    out << "max_parents = " << cfg.strategy.maxParents << "\n";
    out << "threshold = " << rationalText(cfg.strategy.threshold) << "\n";
    out << "min_interval_ms = " << cfg.strategy.minIntervalMs << "\n";
    out << "latency = " << latencySourceName(cfg.latency) << "\n";
    out << "latency_ms = " << doubleText(cfg.latencyMs) << "\n";
    out << "latency_min_ms = " << doubleText(cfg.latencyMinMs) << "\n";
    out << "latency_max_ms = " << doubleText(cfg.latencyMaxMs) << "\n";
    if (!cfg.latencyCsv.empty()) {
        out << "latency_csv = " << cfg.latencyCsv << "\n";
    }
    out << "jitter_ms = " << doubleText(cfg.jitterMs) << "\n";
    out << "city_seed = " << cfg.citySeed << "\n";
    if (!cfg.label.empty()) {
        out << "label = " << cfg.label << "\n";
    }
    return out.str();
}

} // namespace lachesis
