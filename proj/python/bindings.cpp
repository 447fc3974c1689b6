// Python surface of the consensus core: DAG stores with the progress
// metrics, emission policies, the network simulator and the report and
// snapshot formats.

#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "lachesis/config.hpp"
#include "lachesis/dag_store.hpp"
#include "lachesis/emission.hpp"
#include "lachesis/errors.hpp"
#include "lachesis/progress.hpp"
#include "lachesis/report.hpp"
#include "lachesis/simulator.hpp"
#include "lachesis/snapshot.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace py = pybind11;
using namespace lachesis;

namespace {

double ratFloat(const Rational& r) { return r.convert_to<double>(); }

EventDraft makeDraft(NodeId creator, std::uint32_t seq, std::optional<EventId> selfParent,
                     std::vector<EventId> otherParents, std::uint32_t nonce,
                     std::int64_t creationTimeMs) {
    EventDraft d;
    d.creator = creator;
    d.seq = seq;
    d.nonce = nonce;
    d.selfParent = selfParent;
    d.otherParents = std::move(otherParents);
    d.creationTimeMs = creationTimeMs;
    return d;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Event-DAG consensus core: stores, progress metrics, emission "
              "policies and the deterministic network simulator.";

    py::register_exception<Error>(m, "DagError");

    py::enum_<Metric>(m, "Metric")
        .value("QI", Metric::QI)
        .value("RK", Metric::RK);
    py::enum_<StakeDistribution>(m, "StakeDistribution")
        .value("EQUAL", StakeDistribution::Equal)
        .value("LOG_UNIFORM", StakeDistribution::LogUniform);
    py::enum_<LatencySource>(m, "LatencySource")
        .value("CONSTANT", LatencySource::Constant)
        .value("UNIFORM", LatencySource::UniformSynthetic)
        .value("CSV", LatencySource::CsvDataset);

    py::class_<EventId>(m, "EventId")
        .def(py::init([](NodeId creator, std::uint32_t seq, std::uint32_t nonce) {
                 return EventId{creator, seq, nonce};
             }),
             py::arg("creator"), py::arg("seq"), py::arg("nonce") = 0)
        .def_readwrite("creator", &EventId::creator)
        .def_readwrite("seq", &EventId::seq)
        .def_readwrite("nonce", &EventId::nonce)
        .def(py::self == py::self)
        .def(py::self < py::self)
        .def("__hash__", [](const EventId& id) { return EventIdHash{}(id); })
        .def("__str__", &EventId::str)
        .def("__repr__", [](const EventId& id) { return "EventId(" + id.str() + ")"; });
    m.def("parse_event_id", &parseEventId, py::arg("text"));

    py::class_<Event>(m, "Event")
        .def_readonly("id", &Event::id)
        .def_readonly("creator", &Event::creator)
        .def_readonly("seq", &Event::seq)
        .def_readonly("self_parent", &Event::selfParent)
        .def_readonly("other_parents", &Event::otherParents)
        .def_readonly("frame", &Event::frame)
        .def_readonly("is_root", &Event::isRoot)
        .def_readonly("creation_time_ms", &Event::creationTimeMs)
        .def("__repr__",
             [](const Event& e) { return "Event(" + e.id.str() + ")"; });

    py::class_<ProgressReport>(m, "ProgressReport")
        .def_property_readonly("k", [](const ProgressReport& r) { return ratFloat(r.k); })
        .def_property_readonly("k_exact",
                               [](const ProgressReport& r) { return rationalText(r.k); })
        .def_readonly("raw_sum", &ProgressReport::rawSum)
        .def_readonly("frame", &ProgressReport::frame)
        .def_readonly("is_root", &ProgressReport::isRoot);

    py::class_<EmissionStrategy>(m, "EmissionStrategy")
        .def(py::init<>())
        .def_readwrite("timing", &EmissionStrategy::timing)
        .def_readwrite("selection", &EmissionStrategy::selection)
        .def_readwrite("max_parents", &EmissionStrategy::maxParents)
        .def_property(
            "threshold",
            [](const EmissionStrategy& s) { return rationalText(s.threshold); },
            [](EmissionStrategy& s, const std::string& t) { s.threshold = parseRational(t); })
        .def_readwrite("min_interval_ms", &EmissionStrategy::minIntervalMs);

    py::class_<TimingDecision>(m, "TimingDecision")
        .def_readonly("emit", &TimingDecision::emit)
        .def_readonly("stake_ahead", &TimingDecision::stakeAhead)
        .def_readonly("stake_ahead_or_tied", &TimingDecision::stakeAheadOrTied)
        .def_readonly("parents", &TimingDecision::parents)
        .def_readonly("retry_at_ms", &TimingDecision::retryAtMs);

    py::class_<DagStore>(m, "DagStore")
        .def(py::init([](const std::vector<Stake>& stakes) {
                 return DagStore(ValidatorSet(stakes));
             }),
             py::arg("stakes"))
        .def("insert",
             [](DagStore& s, NodeId creator, std::uint32_t seq,
                std::optional<EventId> selfParent, std::vector<EventId> otherParents,
                std::uint32_t nonce, std::int64_t creationTimeMs) -> const Event& {
                 return s.insert(makeDraft(creator, seq, selfParent,
                                           std::move(otherParents), nonce,
                                           creationTimeMs));
             },
             py::arg("creator"), py::arg("seq"), py::arg("self_parent") = std::nullopt,
             py::arg("other_parents") = std::vector<EventId>{}, py::arg("nonce") = 0,
             py::arg("creation_time_ms") = 0, py::return_value_policy::reference_internal)
        .def("event", &DagStore::event, py::arg("id"),
             py::return_value_policy::reference_internal)
        .def("event_at", &DagStore::eventAt, py::arg("index"),
             py::return_value_policy::reference_internal)
        .def("contains", &DagStore::contains, py::arg("id"))
        .def_property_readonly("event_count", &DagStore::eventCount)
        .def_property_readonly("node_count", &DagStore::nodeCount)
        .def_property_readonly("max_frame", &DagStore::maxFrame)
        .def_property_readonly("stakes",
                               [](const DagStore& s) { return s.validators().stakes(); })
        .def_property_readonly("quorum",
                               [](const DagStore& s) { return s.validators().quorum(); })
        .def("head", &DagStore::head, py::arg("node"))
        .def("heads", &DagStore::heads)
        .def("observes", &DagStore::observes, py::arg("a"), py::arg("b"))
        .def("forkless_cause", &DagStore::forklessCause, py::arg("root"), py::arg("event"))
        .def("roots_of_frame", &DagStore::rootsOfFrame, py::arg("frame"))
        .def("node_forked", &DagStore::nodeForked, py::arg("node"))
        .def("root_progress",
             [](const DagStore& s, EventId id) { return rootProgress(s, id); },
             py::arg("id"))
        .def("qi_of_event",
             [](const DagStore& s, EventId id) { return ratFloat(qiOfEvent(s, id)); },
             py::arg("id"))
        .def("select_parents", &selectParents, py::arg("node"), py::arg("strategy"))
        .def("evaluate_emission", &evaluateEmission, py::arg("node"), py::arg("strategy"),
             py::arg("now_ms"), py::arg("last_emit_ms"))
        .def("build_event",
             [](DagStore& s, NodeId v, const EmissionStrategy& strategy,
                std::int64_t nowMs) { return buildEvent(s, v, strategy, nowMs); },
             py::arg("node"), py::arg("strategy"), py::arg("now_ms"))
        .def("dump", &dumpDag);
    m.def("load_dag", &loadDag, py::arg("text"), py::arg("name") = "<python>");
    m.def("dump_dag", &dumpDag, py::arg("store"));

    py::class_<SimConfig>(m, "SimConfig")
        .def(py::init<>())
        .def_readwrite("nodes", &SimConfig::nodes)
        .def_readwrite("seed", &SimConfig::seed)
        .def_readwrite("duration_ms", &SimConfig::durationMs)
        .def_readwrite("stakes", &SimConfig::stakes)
        .def_readwrite("stake_min", &SimConfig::stakeMin)
        .def_readwrite("stake_max", &SimConfig::stakeMax)
        .def_readwrite("strategy", &SimConfig::strategy)
        .def_readwrite("latency", &SimConfig::latency)
        .def_readwrite("latency_ms", &SimConfig::latencyMs)
        .def_readwrite("latency_min_ms", &SimConfig::latencyMinMs)
        .def_readwrite("latency_max_ms", &SimConfig::latencyMaxMs)
        .def_readwrite("latency_csv", &SimConfig::latencyCsv)
        .def_readwrite("jitter_ms", &SimConfig::jitterMs)
        .def_readwrite("city_seed", &SimConfig::citySeed)
        .def_readwrite("label", &SimConfig::label)
        .def_property_readonly("effective_label", &SimConfig::effectiveLabel)
        .def("serialize", &serializeConfig);
    m.def("parse_config",
          [](const std::string& text) { return parseConfig(text, "<python>"); },
          py::arg("text"));
    m.def("load_config", &loadConfig, py::arg("path"));

    py::class_<MetricsReport>(m, "MetricsReport")
        .def_readonly("total_events", &MetricsReport::totalEvents)
        .def_readonly("frames_advanced", &MetricsReport::framesAdvanced)
        .def_readonly("frames_per_event", &MetricsReport::framesPerEvent)
        .def_readonly("frames_per_second", &MetricsReport::framesPerSecond)
        .def_readonly("events_per_second", &MetricsReport::eventsPerSecond)
        .def("__repr__", [](const MetricsReport& r) {
            return "MetricsReport(events=" + std::to_string(r.totalEvents) +
                   ", frames=" + std::to_string(r.framesAdvanced) + ")";
        });

    py::class_<SimulationResult>(m, "SimulationResult")
        .def_readonly("report", &SimulationResult::report)
        .def_property_readonly("store_count",
                               [](const SimulationResult& r) { return r.stores.size(); })
        .def("store",
             [](const SimulationResult& r, std::size_t i) -> const DagStore& {
                 return r.stores.at(i);
             },
             py::arg("index"), py::return_value_policy::reference_internal);
    m.def("run_simulation", &runSimulation, py::arg("config"),
          py::call_guard<py::gil_scoped_release>());

    py::class_<ExperimentRow>(m, "ExperimentRow")
        .def_readonly("config_id", &ExperimentRow::configId)
        .def_readonly("run_index", &ExperimentRow::runIndex)
        .def_readonly("seed", &ExperimentRow::seed)
        .def_readonly("report", &ExperimentRow::report);
    m.def("run_experiment",
          [](const std::vector<SimConfig>& configs, std::uint32_t repetitions) {
              return runExperiment(configs, repetitions);
          },
          py::arg("configs"), py::arg("repetitions"),
          py::call_guard<py::gil_scoped_release>());
    m.def("report_csv", &reportCsv, py::arg("rows"));
    m.def("parse_report_csv", &parseReportCsv, py::arg("text"));
    m.def("report_json", &reportJson, py::arg("rows"), py::arg("configs"));
}
