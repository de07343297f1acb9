#include "eog/snapshot_io.hpp"

#include "eog/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace eog {

using nlohmann::json;

namespace {

json load_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) raise(ErrorKind::SnapshotNotFound, "cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        raise(ErrorKind::ParseError, path.filename().string() + ": " + e.what());
    }
}

void write_json_file(const json& j, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) raise(ErrorKind::ParseError, "cannot write " + path.string());
    out << j.dump(2) << "\n";
}

// Wraps per-file parsing so errors name the file and element.
template <typename T, typename Fn>
std::vector<T> parse_array(const json& j, const std::string& file, const char* what, Fn fn) {
    if (!j.is_array()) raise(ErrorKind::ParseError, file + ": expected a top-level array");
    std::vector<T> out;
    out.reserve(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) {
        try {
            out.push_back(fn(j[i]));
        } catch (const Error& e) {
            raise(ErrorKind::ParseError,
                  file + ": " + std::string(what) + "[" + std::to_string(i) + "]: " + e.what());
        } catch (const json::exception& e) {
            raise(ErrorKind::ParseError,
                  file + ": " + std::string(what) + "[" + std::to_string(i) + "]: " + e.what());
        }
    }
    return out;
}

} // namespace

json to_json(const EntityId& id) { return id.canonical(); }

json to_json(const TimeWindow& w) {
    return {{"start", format_rfc3339(w.start)}, {"end", format_rfc3339(w.end)}};
}

json to_json(const TopologyEdge& e) {
    return {{"src", e.src.canonical()}, {"dst", e.dst.canonical()}, {"kind", to_string(e.kind)}};
}

json to_json(const OperationalGraph& g) {
    json nodes = json::array();
    for (const auto& n : g.nodes()) nodes.push_back(n.canonical());
    json edges = json::array();
    for (const auto& e : g.edges()) edges.push_back(to_json(e));
    return {{"nodes", nodes}, {"edges", edges}};
}

json to_json(const Alert& a) {
    return {{"name", a.name},
            {"entity", a.entity.canonical()},
            {"severity", to_string(a.severity)},
            {"signal", to_string(a.signal)},
            {"first_seen", format_rfc3339(a.first_seen)},
            {"last_seen", format_rfc3339(a.last_seen)}};
}

json to_json(const K8sEvent& e) {
    return {{"entity", e.entity.canonical()},
            {"reason", e.reason},
            {"type", to_string(e.type)},
            {"message", e.message},
            {"at", format_rfc3339(e.at)}};
}

json to_json(const SpecChange& c) {
    return {{"entity", c.entity.canonical()},
            {"at", format_rfc3339(c.at)},
            {"diff_summary", c.diff_summary},
            {"fields_changed", c.fields_changed}};
}

json to_json(const MetricSeries& m) {
    json points = json::array();
    for (const auto& p : m.points) points.push_back({{"t", format_rfc3339(p.at)}, {"v", p.value}});
    json j = {{"entity", m.entity.canonical()},
              {"metric", m.metric},
              {"unit", m.unit},
              {"points", points}};
    if (m.staged) j["staged"] = true;
    return j;
}

json to_json(const LogChunk& l) {
    json lines = json::array();
    for (const auto& line : l.lines) {
        lines.push_back({{"t", format_rfc3339(line.at)}, {"level", line.level}, {"text", line.text}});
    }
    return {{"entity", l.entity.canonical()}, {"lines", lines}};
}

json to_json(const Belief& b) {
    return {{"label", to_string(b.label)},
            {"evidence_summary", b.evidence_summary},
            {"updated_at", b.updated_at}};
}

json to_json(const CausalEdge& e) {
    return {{"source", e.source.canonical()},
            {"target", e.target.canonical()},
            {"condition", e.condition},
            {"effect", e.effect}};
}

json to_json(const Message& m) {
    return {{"from", m.from.canonical()},
            {"to", m.to.canonical()},
            {"belief", to_json(m.belief)},
            {"sent_at_step", m.sent_at_step}};
}

json to_json(const NeighborRef& n) {
    return {{"entity", n.entity.canonical()},
            {"kind", to_string(n.kind)},
            {"direction", n.direction == Direction::Upstream ? "upstream" : "downstream"}};
}

json to_json(const PacketMetric& m) {
    json points = json::array();
    for (const auto& p : m.points) points.push_back({{"t", format_rfc3339(p.at)}, {"v", p.value}});
    json j = {{"entity", m.entity.canonical()},
              {"metric", m.metric},
              {"unit", m.unit},
              {"points", points}};
    if (m.baseline) j["baseline"] = *m.baseline;
    return j;
}

json to_json(const ContextPacket& p) {
    json alerts = json::array();
    for (const auto& a : p.local_alerts) alerts.push_back(to_json(a));
    json events = json::array();
    for (const auto& e : p.local_events) events.push_back(to_json(e));
    json changes = json::array();
    for (const auto& c : p.local_spec_changes) changes.push_back(to_json(c));
    json metrics = json::array();
    for (const auto& m : p.local_metrics) metrics.push_back(to_json(m));
    json logs = json::array();
    for (const auto& l : p.local_logs) logs.push_back(to_json(l));
    json neighbors = json::array();
    for (const auto& n : p.neighbors) neighbors.push_back(to_json(n));
    json inbox = json::array();
    for (const auto& m : p.inbox) inbox.push_back(to_json(m));
    return {{"entity", p.entity.canonical()},
            {"window", to_json(p.window)},
            {"alerts", alerts},
            {"events", events},
            {"spec_changes", changes},
            {"metrics", metrics},
            {"logs", logs},
            {"neighbors", neighbors},
            {"inbox", inbox},
            {"page", p.page},
            {"total_pages", p.total_pages},
            {"size_bytes", p.size_bytes},
            {"visit_index", p.visit_index},
            {"chunked", p.chunked}};
}

json to_json(const Snapshot& s) {
    json alerts = json::array();
    for (const auto& a : s.alerts) alerts.push_back(to_json(a));
    json events = json::array();
    for (const auto& e : s.events) events.push_back(to_json(e));
    json changes = json::array();
    for (const auto& c : s.spec_changes) changes.push_back(to_json(c));
    json metrics = json::array();
    for (const auto& m : s.metrics) metrics.push_back(to_json(m));
    json logs = json::array();
    for (const auto& l : s.logs) logs.push_back(to_json(l));
    return {{"topology", to_json(s.topology)}, {"alerts", alerts},   {"events", events},
            {"spec_changes", changes},         {"metrics", metrics}, {"logs", logs}};
}

TimeWindow window_from_json(const json& j) {
    return make_window(parse_rfc3339(j.at("start").get<std::string>()),
                       parse_rfc3339(j.at("end").get<std::string>()));
}

OperationalGraph topology_from_json(const json& j) {
    OperationalGraph g;
    for (const auto& n : j.at("nodes")) g.add_node(parse_entity_id(n.get<std::string>()));
    for (const auto& e : j.at("edges")) {
        g.add_edge(parse_entity_id(e.at("src").get<std::string>()),
                   parse_entity_id(e.at("dst").get<std::string>()),
                   edge_kind_from_string(e.at("kind").get<std::string>()));
    }
    return g;
}

Alert alert_from_json(const json& j) {
    Alert a;
    a.name = j.at("name").get<std::string>();
    a.entity = parse_entity_id(j.at("entity").get<std::string>());
    a.severity = severity_from_string(j.at("severity").get<std::string>());
    a.signal = signal_from_string(j.at("signal").get<std::string>());
    a.first_seen = parse_rfc3339(j.at("first_seen").get<std::string>());
    a.last_seen = parse_rfc3339(j.at("last_seen").get<std::string>());
    if (a.last_seen < a.first_seen) {
        raise(ErrorKind::ParseError, "alert \"" + a.name + "\": first_seen after last_seen");
    }
    return a;
}

K8sEvent event_from_json(const json& j) {
    K8sEvent e;
    e.entity = parse_entity_id(j.at("entity").get<std::string>());
    e.reason = j.at("reason").get<std::string>();
    if (e.reason.empty()) raise(ErrorKind::ParseError, "event reason must be non-empty");
    e.type = event_type_from_string(j.at("type").get<std::string>());
    e.message = j.value("message", "");
    e.at = parse_rfc3339(j.at("at").get<std::string>());
    return e;
}

SpecChange spec_change_from_json(const json& j) {
    SpecChange c;
    c.entity = parse_entity_id(j.at("entity").get<std::string>());
    c.at = parse_rfc3339(j.at("at").get<std::string>());
    c.diff_summary = j.value("diff_summary", "");
    c.fields_changed = j.value("fields_changed", std::vector<std::string>{});
    if (!c.diff_summary.empty() && c.fields_changed.empty()) {
        raise(ErrorKind::ParseError, "spec change with a diff summary must list changed fields");
    }
    return c;
}

MetricSeries metric_series_from_json(const json& j) {
    MetricSeries m;
    m.entity = parse_entity_id(j.at("entity").get<std::string>());
    m.metric = j.at("metric").get<std::string>();
    m.unit = j.value("unit", "");
    m.staged = j.value("staged", false);
    for (const auto& p : j.at("points")) {
        double v = p.at("v").get<double>();
        if (std::isnan(v)) raise(ErrorKind::ParseError, "metric point is NaN");
        m.points.push_back({parse_rfc3339(p.at("t").get<std::string>()), v});
    }
    if (!std::is_sorted(m.points.begin(), m.points.end(),
                        [](const MetricPoint& a, const MetricPoint& b) { return a.at < b.at; })) {
        raise(ErrorKind::ParseError, "metric points must be sorted by timestamp");
    }
    return m;
}

LogChunk log_chunk_from_json(const json& j) {
    LogChunk l;
    l.entity = parse_entity_id(j.at("entity").get<std::string>());
    for (const auto& line : j.at("lines")) {
        l.lines.push_back({parse_rfc3339(line.at("t").get<std::string>()),
                           line.value("level", "info"), line.at("text").get<std::string>()});
    }
    if (!std::is_sorted(l.lines.begin(), l.lines.end(),
                        [](const LogLine& a, const LogLine& b) { return a.at < b.at; })) {
        raise(ErrorKind::ParseError, "log lines must be sorted by timestamp");
    }
    return l;
}

Belief belief_from_json(const json& j) {
    Belief b;
    b.label = label_from_string(j.at("label").get<std::string>());
    b.evidence_summary = j.at("evidence_summary").get<std::string>();
    b.updated_at = j.at("updated_at").get<std::int64_t>();
    return b;
}

CausalEdge causal_edge_from_json(const json& j) {
    return {parse_entity_id(j.at("source").get<std::string>()),
            parse_entity_id(j.at("target").get<std::string>()),
            j.at("condition").get<std::string>(), j.at("effect").get<std::string>()};
}

Message message_from_json(const json& j) {
    Message m;
    m.from = parse_entity_id(j.at("from").get<std::string>());
    m.to = parse_entity_id(j.at("to").get<std::string>());
    m.belief = belief_from_json(j.at("belief"));
    m.sent_at_step = j.at("sent_at_step").get<std::int64_t>();
    return m;
}

ContextPacket packet_from_json(const json& j) {
    ContextPacket p;
    p.entity = parse_entity_id(j.at("entity").get<std::string>());
    p.window = window_from_json(j.at("window"));
    for (const auto& a : j.at("alerts")) p.local_alerts.push_back(alert_from_json(a));
    for (const auto& e : j.at("events")) p.local_events.push_back(event_from_json(e));
    for (const auto& c : j.at("spec_changes")) p.local_spec_changes.push_back(spec_change_from_json(c));
    for (const auto& m : j.at("metrics")) {
        PacketMetric pm;
        pm.entity = parse_entity_id(m.at("entity").get<std::string>());
        pm.metric = m.at("metric").get<std::string>();
        pm.unit = m.value("unit", "");
        for (const auto& pt : m.at("points")) {
            pm.points.push_back({parse_rfc3339(pt.at("t").get<std::string>()), pt.at("v").get<double>()});
        }
        if (m.contains("baseline")) pm.baseline = m.at("baseline").get<double>();
        p.local_metrics.push_back(std::move(pm));
    }
    for (const auto& l : j.at("logs")) p.local_logs.push_back(log_chunk_from_json(l));
    for (const auto& n : j.at("neighbors")) {
        NeighborRef ref;
        ref.entity = parse_entity_id(n.at("entity").get<std::string>());
        ref.kind = edge_kind_from_string(n.at("kind").get<std::string>());
        ref.direction = n.at("direction").get<std::string>() == "upstream" ? Direction::Upstream
                                                                           : Direction::Downstream;
        p.neighbors.push_back(ref);
    }
    for (const auto& m : j.at("inbox")) p.inbox.push_back(message_from_json(m));
    p.page = j.at("page").get<int>();
    p.total_pages = j.at("total_pages").get<int>();
    p.size_bytes = j.at("size_bytes").get<std::int64_t>();
    p.visit_index = j.value("visit_index", 1);
    p.chunked = j.value("chunked", false);
    return p;
}

Snapshot load_snapshot(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) {
        raise(ErrorKind::SnapshotNotFound, dir.string() + " is not a directory");
    }
    const auto topo_path = dir / "topology.json";
    if (!std::filesystem::exists(topo_path)) {
        raise(ErrorKind::SnapshotNotFound, "missing topology.json in " + dir.string());
    }

    Snapshot s;
    try {
        s.topology = topology_from_json(load_json_file(topo_path));
    } catch (const json::exception& e) {
        raise(ErrorKind::ParseError, std::string("topology.json: ") + e.what());
    }

    auto optional_file = [&](const char* name) -> std::optional<json> {
        const auto path = dir / name;
        if (!std::filesystem::exists(path)) return std::nullopt;
        return load_json_file(path);
    };

    if (auto j = optional_file("alerts.json")) {
        s.alerts = parse_array<Alert>(*j, "alerts.json", "alert", alert_from_json);
    }
    if (auto j = optional_file("events.json")) {
        s.events = parse_array<K8sEvent>(*j, "events.json", "event", event_from_json);
    }
    if (auto j = optional_file("spec_changes.json")) {
        s.spec_changes =
            parse_array<SpecChange>(*j, "spec_changes.json", "spec_change", spec_change_from_json);
    }
    if (auto j = optional_file("metrics.json")) {
        s.metrics = parse_array<MetricSeries>(*j, "metrics.json", "series", metric_series_from_json);
    }
    if (auto j = optional_file("logs.json")) {
        s.logs = parse_array<LogChunk>(*j, "logs.json", "chunk", log_chunk_from_json);
    }

    auto note = [&](const EntityId& id) {
        if (!s.topology.contains(id)) s.unregistered.insert(id);
    };
    for (const auto& a : s.alerts) note(a.entity);
    for (const auto& e : s.events) note(e.entity);
    for (const auto& c : s.spec_changes) note(c.entity);
    for (const auto& m : s.metrics) note(m.entity);
    for (const auto& l : s.logs) note(l.entity);
    return s;
}

void save_snapshot(const Snapshot& snapshot, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    write_json_file(to_json(snapshot.topology), dir / "topology.json");

    auto dump_list = [&](const auto& items, const char* name) {
        json arr = json::array();
        for (const auto& item : items) arr.push_back(to_json(item));
        write_json_file(arr, dir / name);
    };
    dump_list(snapshot.alerts, "alerts.json");
    dump_list(snapshot.events, "events.json");
    dump_list(snapshot.spec_changes, "spec_changes.json");
    dump_list(snapshot.metrics, "metrics.json");
    dump_list(snapshot.logs, "logs.json");
}

} // namespace eog
