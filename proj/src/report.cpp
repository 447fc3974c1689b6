#include "lachesis/report.hpp"

#include "lachesis/errors.hpp"

#include "json.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

namespace lachesis {

namespace {

constexpr const char* kHeader =
    "config_id,run_index,seed,total_events,frames_advanced,frames_per_event,"
    "frames_per_second,events_per_second";

struct Accumulator {
    std::vector<double> values;

    void add(double v) { values.push_back(v); }

    double mean() const {
        double s = 0;
        for (double v : values) {
            s += v;
        }
        return s / static_cast<double>(values.size());
    }

    double stddev() const {
        if (values.size() < 2) {
            return 0.0;
        }
        const double m = mean();
        double s = 0;
        for (double v : values) {
            s += (v - m) * (v - m);
        }
        return std::sqrt(s / static_cast<double>(values.size() - 1));
    }
};

std::vector<std::string> splitLine(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) {
        fields.push_back(field);
    }
    if (!line.empty() && line.back() == ',') {
        fields.push_back("");
    }
    return fields;
}

template <typename T>
bool tryParse(const std::string& text, T& out) {
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    return ec == std::errc{} && ptr == text.data() + text.size();
}

double parseDoubleField(const std::string& text, std::size_t lineNo) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(text, &pos);
        if (pos != text.size()) {
            throw std::invalid_argument("trailing characters");
        }
        return v;
    } catch (const std::exception&) {
        fail(ErrorCode::ParseError,
             "report line " + std::to_string(lineNo) + ": bad number '" + text + "'");
    }
}

/// Config ids in first-appearance order.
std::vector<std::string> configOrder(const std::vector<ExperimentRow>& rows) {
    std::vector<std::string> order;
    for (const ExperimentRow& r : rows) {
        if (std::find(order.begin(), order.end(), r.configId) == order.end()) {
            order.push_back(r.configId);
        }
    }
    return order;
}

} // namespace

std::vector<ConfigSummary> summarize(const std::vector<ExperimentRow>& rows) {
    std::vector<ConfigSummary> out;
    for (const std::string& id : configOrder(rows)) {
        Accumulator events, frames, fpe, fps, eps;
        for (const ExperimentRow& r : rows) {
            if (r.configId != id) {
                continue;
            }
            events.add(static_cast<double>(r.report.totalEvents));
            frames.add(static_cast<double>(r.report.framesAdvanced));
            fpe.add(r.report.framesPerEvent);
            fps.add(r.report.framesPerSecond);
            eps.add(r.report.eventsPerSecond);
        }
        ConfigSummary s;
        s.configId = id;
        s.runs = events.values.size();
        s.meanTotalEvents = events.mean();
        s.stddevTotalEvents = events.stddev();
        s.meanFramesAdvanced = frames.mean();
        s.stddevFramesAdvanced = frames.stddev();
        s.meanFramesPerEvent = fpe.mean();
        s.stddevFramesPerEvent = fpe.stddev();
        s.meanFramesPerSecond = fps.mean();
        s.stddevFramesPerSecond = fps.stddev();
        s.meanEventsPerSecond = eps.mean();
        s.stddevEventsPerSecond = eps.stddev();
        out.push_back(s);
    }
    return out;
}

std::string reportCsv(const std::vector<ExperimentRow>& rows) {
    const std::vector<ConfigSummary> summaries = summarize(rows);
    std::ostringstream out;
    out << kHeader << "\n";
    for (const ConfigSummary& s : summaries) {
        for (const ExperimentRow& r : rows) {
            if (r.configId != s.configId) {
                continue;
            }
            out << r.configId << "," << r.runIndex << "," << r.seed << ","
                << r.report.totalEvents << "," << r.report.framesAdvanced << ","
                << doubleText(r.report.framesPerEvent) << ","
                << doubleText(r.report.framesPerSecond) << ","
                << doubleText(r.report.eventsPerSecond) << "\n";
        }
        out << s.configId << ",mean,," << doubleText(s.meanTotalEvents) << ","
            << doubleText(s.meanFramesAdvanced) << "," << doubleText(s.meanFramesPerEvent)
            << "," << doubleText(s.meanFramesPerSecond) << ","
            << doubleText(s.meanEventsPerSecond) << "\n";
        out << s.configId << ",stddev,," << doubleText(s.stddevTotalEvents) << ","
            << doubleText(s.stddevFramesAdvanced) << "," << doubleText(s.stddevFramesPerEvent)
            << "," << doubleText(s.stddevFramesPerSecond) << ","
            << doubleText(s.stddevEventsPerSecond) << "\n";
    }
    return out.str();
}

std::vector<ExperimentRow> parseReportCsv(const std::string& text) {
    std::vector<ExperimentRow> rows;
    std::istringstream in(text);
    std::string line;
    std::size_t lineNo = 0;
    bool sawHeader = false;
    while (std::getline(in, line)) {
        ++lineNo;
        if (line.empty()) {
            continue;
        }
        if (!sawHeader) {
            if (line != kHeader) {
                fail(ErrorCode::ParseError, "report line 1: unexpected header");
            }
            sawHeader = true;
            continue;
        }
        const std::vector<std::string> fields = splitLine(line);
        if (fields.size() != 8) {
            fail(ErrorCode::ParseError,
                 "report line " + std::to_string(lineNo) + ": expected 8 fields");
        }
        ExperimentRow row;
        row.configId = fields[0];
        if (!tryParse(fields[1], row.runIndex)) {
            continue; // mean/stddev summary row; recomputed on serialization
        }
        if (!tryParse(fields[2], row.seed) || !tryParse(fields[3], row.report.totalEvents) ||
            !tryParse(fields[4], row.report.framesAdvanced)) {
            fail(ErrorCode::ParseError,
                 "report line " + std::to_string(lineNo) + ": bad integer field");
        }
        row.report.framesPerEvent = parseDoubleField(fields[5], lineNo);
        row.report.framesPerSecond = parseDoubleField(fields[6], lineNo);
        row.report.eventsPerSecond = parseDoubleField(fields[7], lineNo);
        rows.push_back(row);
    }
    if (!sawHeader) {
        fail(ErrorCode::ParseError, "empty report");
    }
    return rows;
}

std::string reportJson(const std::vector<ExperimentRow>& rows,
                       const std::vector<SimConfig>& configs) {
    using json = nlohmann::ordered_json;
    json doc;
    doc["configs"] = json::array();
    for (const SimConfig& cfg : configs) {
        json c;
        c["id"] = cfg.effectiveLabel();
        c["nodes"] = cfg.nodes;
        c["seed"] = cfg.seed;
        c["duration_ms"] = cfg.durationMs;
        c["stakes"] = stakeDistributionName(cfg.stakes);
        c["stake_min"] = cfg.stakeMin;
        c["stake_max"] = cfg.stakeMax;
        c["timing"] = metricName(cfg.strategy.timing);
        c["selection"] = metricName(cfg.strategy.selection);
        c["max_parents"] = cfg.strategy.maxParents;
        c["threshold"] = rationalText(cfg.strategy.threshold);
        c["min_interval_ms"] = cfg.strategy.minIntervalMs;
        c["latency"] = latencySourceName(cfg.latency);
        c["latency_ms"] = cfg.latencyMs;
        c["latency_min_ms"] = cfg.latencyMinMs;
        c["latency_max_ms"] = cfg.latencyMaxMs;
        if (!cfg.latencyCsv.empty()) {
            c["latency_csv"] = cfg.latencyCsv;
        }
        c["jitter_ms"] = cfg.jitterMs;
        c["city_seed"] = cfg.citySeed;
        doc["configs"].push_back(c);
    }
    doc["runs"] = json::array();
    for (const ExperimentRow& r : rows) {
        json run;
        run["config_id"] = r.configId;
        run["run_index"] = r.runIndex;
        run["seed"] = r.seed;
        run["total_events"] = r.report.totalEvents;
        run["frames_advanced"] = r.report.framesAdvanced;
        run["frames_per_event"] = r.report.framesPerEvent;
        run["frames_per_second"] = r.report.framesPerSecond;
        run["events_per_second"] = r.report.eventsPerSecond;
        doc["runs"].push_back(run);
    }
    doc["summaries"] = json::array();
    for (const ConfigSummary& s : summarize(rows)) {
        json sum;
        sum["config_id"] = s.configId;
        sum["runs"] = s.runs;
        json mean;
        mean["total_events"] = s.meanTotalEvents;
        mean["frames_advanced"] = s.meanFramesAdvanced;
        mean["frames_per_event"] = s.meanFramesPerEvent;
        mean["frames_per_second"] = s.meanFramesPerSecond;
        mean["events_per_second"] = s.meanEventsPerSecond;
        json dev;
        dev["total_events"] = s.stddevTotalEvents;
        dev["frames_advanced"] = s.stddevFramesAdvanced;
        dev["frames_per_event"] = s.stddevFramesPerEvent;
        dev["frames_per_second"] = s.stddevFramesPerSecond;
        dev["events_per_second"] = s.stddevEventsPerSecond;
        sum["mean"] = mean;
        sum["stddev"] = dev;
        doc["summaries"].push_back(sum);
    }
    return doc.dump(2) + "\n";
}

} // namespace lachesis
