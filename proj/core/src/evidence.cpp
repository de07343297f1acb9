#include "eog/evidence.hpp"

#include "eog/error.hpp"
#include "eog/snapshot_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace eog {

const char* to_string(Severity s) {
    switch (s) {
    case Severity::Critical: return "critical";
    case Severity::Warning: return "warning";
    case Severity::Info: return "info";
    }
    return "info";
}

Severity severity_from_string(const std::string& text) {
    if (text == "critical") return Severity::Critical;
    if (text == "warning") return Severity::Warning;
    if (text == "info") return Severity::Info;
    raise(ErrorKind::ParseError, "unknown severity \"" + text + "\"");
}

const char* to_string(Signal s) {
    switch (s) {
    case Signal::Errors: return "errors";
    case Signal::Latency: return "latency";
    case Signal::Traffic: return "traffic";
    case Signal::Saturation: return "saturation";
    case Signal::Other: return "other";
    }
    return "other";
}

Signal signal_from_string(const std::string& text) {
    if (text == "errors") return Signal::Errors;
    if (text == "latency") return Signal::Latency;
    if (text == "traffic") return Signal::Traffic;
    if (text == "saturation") return Signal::Saturation;
    if (text == "other") return Signal::Other;
    raise(ErrorKind::ParseError, "unknown signal \"" + text + "\"");
}

bool is_golden_signal(Signal s) {
    return s == Signal::Errors || s == Signal::Latency || s == Signal::Traffic;
}

const char* to_string(EventType t) {
    switch (t) {
    case EventType::Normal: return "Normal";
    case EventType::Warning: return "Warning";
    case EventType::Error: return "Error";
    }
    return "Normal";
}

EventType event_type_from_string(const std::string& text) {
    if (text == "Normal") return EventType::Normal;
    if (text == "Warning") return EventType::Warning;
    if (text == "Error") return EventType::Error;
    raise(ErrorKind::ParseError, "unknown event type \"" + text + "\"");
}

namespace {

bool contains_icase(const std::string& haystack, const std::string& needle) {
    auto it = std::search(haystack.begin(), haystack.end(), needle.begin(), needle.end(),
                          [](char a, char b) { return std::tolower(a) == std::tolower(b); });
    return it != haystack.end();
}

bool is_watchdog(const Alert& a) { return contains_icase(a.name, "watchdog"); }

// Infrastructure-level entities are not anchor material.
bool is_application_entity(const EntityId& id) { return id.kind != "Node"; }

const std::set<std::string>& failure_reasons() {
    static const std::set<std::string> reasons = {
        "OOMKilled",       "CrashLoopBackOff", "Evicted",       "FailedScheduling",
        "FailedMount",     "Unhealthy",        "ProbeWarning",  "FailedCreate",
        "QuotaExceeded",   "BackOff",
    };
    return reasons;
}

} // namespace

std::pair<TimeWindow, std::vector<Alert>> select_window(const std::vector<Alert>& alerts,
                                                        const EvidenceConfig& cfg) {
    if (alerts.empty()) raise(ErrorKind::NoAlerts, "cannot select a window without alerts");

    std::vector<Alert> anchors;
    for (const auto& a : alerts) {
        if (is_golden_signal(a.signal) && !is_watchdog(a) && is_application_entity(a.entity)) {
            anchors.push_back(a);
        }
    }
    if (anchors.empty()) {
        for (const auto& a : alerts) {
            if (!is_watchdog(a)) anchors.push_back(a);
        }
    }
    if (anchors.empty()) anchors = alerts;

    Timestamp earliest = anchors.front().first_seen;
    Timestamp latest = anchors.front().last_seen;
    for (const auto& a : anchors) {
        earliest = std::min(earliest, a.first_seen);
        latest = std::max(latest, a.last_seen);
    }
    return {make_window(earliest - cfg.lead_margin_s, latest), anchors};
}

std::vector<K8sEvent> filter_events(const std::vector<K8sEvent>& events, const TimeWindow& window,
                                    const std::set<EntityId>& alerting, int max_per_page,
                                    const EvidenceConfig& cfg) {
    if (max_per_page < 1) raise(ErrorKind::ParseError, "max_per_page must be >= 1");

    // The anchor alert starts lead_margin after window start by construction.
    const Timestamp alert_start = window.start + cfg.lead_margin_s;

    struct Ranked {
        int tier;
        K8sEvent event;
    };
    std::vector<Ranked> ranked;
    for (const auto& e : events) {
        if (!window.contains(e.at)) continue;
        const bool precedes_alert = e.at < alert_start;
        const bool on_alerting = alerting.count(e.entity) > 0;
        const bool failure = failure_reasons().count(e.reason) > 0;
        const bool abnormal = e.type != EventType::Normal;
        // Normal events only count when they precede the anchor alert.
        if (!abnormal && !precedes_alert) continue;

        int tier = 4;
        if (precedes_alert) tier = 1;
        else if (on_alerting) tier = 2;
        else if (failure) tier = 3;
        ranked.push_back({tier, e});
    }
    std::stable_sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) {
        if (a.tier != b.tier) return a.tier < b.tier;
        if (a.event.at != b.event.at) return a.event.at < b.event.at;
        if (a.event.entity != b.event.entity) return a.event.entity < b.event.entity;
        return a.event.reason < b.event.reason;
    });
    std::vector<K8sEvent> out;
    for (const auto& r : ranked) {
        if (static_cast<int>(out.size()) >= max_per_page) break;
        out.push_back(r.event);
    }
    return out;
}

std::vector<SpecChange> filter_spec_changes(const std::vector<SpecChange>& changes,
                                            const TimeWindow& window, int max_per_page,
                                            const EvidenceConfig& cfg) {
    if (max_per_page < 1) raise(ErrorKind::ParseError, "max_per_page must be >= 1");

    struct Ranked {
        int tier;
        SpecChange change;
    };
    std::vector<Ranked> ranked;
    for (const auto& c : changes) {
        int tier = 3;
        if (c.at < window.start && c.at >= window.start - cfg.pre_incident_margin_s) {
            tier = 1; // just before the incident: prime suspect
        } else if (window.contains(c.at)) {
            tier = 2;
        }
        ranked.push_back({tier, c});
    }
    std::stable_sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) {
        if (a.tier != b.tier) return a.tier < b.tier;
        if (a.change.at != b.change.at) return a.change.at < b.change.at;
        return a.change.entity < b.change.entity;
    });
    std::vector<SpecChange> out;
    for (const auto& r : ranked) {
        if (static_cast<int>(out.size()) >= max_per_page) break;
        out.push_back(r.change);
    }
    return out;
}

ContextPacket get_context(const Snapshot& snapshot, const ExplanatoryGraph& es,
                          const EntityId& entity, const TimeWindow& window,
                          std::vector<Message> inbox, int page, int deps_per_page, int visit_index,
                          const EvidenceConfig& cfg) {
    if (page < 1) raise(ErrorKind::PageOutOfRange, "page must be >= 1");
    if (deps_per_page < 1) raise(ErrorKind::ParseError, "deps_per_page must be >= 1");

    const bool in_topology = snapshot.topology.contains(entity);
    const bool in_es = es.belief(entity).has_value() || !es.edge_endpoints_of(entity).empty();
    if (!in_topology && !in_es) {
        raise(ErrorKind::UnknownEntity,
              entity.canonical() + " appears in neither topology nor explanatory graph");
    }

    ContextPacket p;
    p.entity = entity;
    p.window = window;
    p.visit_index = visit_index;

    for (const auto& a : snapshot.alerts) {
        if (a.entity == entity && window.overlaps(a.first_seen, a.last_seen)) {
            Alert sliced = a;
            sliced.first_seen = std::max(a.first_seen, window.start);
            sliced.last_seen = std::min(a.last_seen, window.end);
            p.local_alerts.push_back(sliced);
        }
    }
    for (const auto& e : snapshot.events) {
        if (e.entity == entity && window.contains(e.at)) p.local_events.push_back(e);
    }
    for (const auto& c : snapshot.spec_changes) {
        // Spec changes just before the window are the prime suspects; pull
        // them in like the tier-1 filter does, clamped by the margin.
        if (c.entity == entity &&
            (window.contains(c.at) ||
             (c.at < window.start && c.at >= window.start - cfg.pre_incident_margin_s))) {
            p.local_spec_changes.push_back(c);
        }
    }
    for (const auto& m : snapshot.metrics) {
        if (!(m.entity == entity)) continue;
        if (m.staged && visit_index < 2) continue;
        PacketMetric pm;
        pm.entity = m.entity;
        pm.metric = m.metric;
        pm.unit = m.unit;
        double baseline_sum = 0.0;
        int baseline_n = 0;
        const Timestamp baseline_start = window.start - cfg.baseline_window_s;
        for (const auto& pt : m.points) {
            if (window.contains(pt.at)) {
                pm.points.push_back(pt);
            } else if (pt.at >= baseline_start && pt.at < window.start) {
                baseline_sum += pt.value;
                ++baseline_n;
            }
        }
        if (baseline_n > 0) pm.baseline = baseline_sum / baseline_n;
        if (!pm.points.empty() || pm.baseline) p.local_metrics.push_back(std::move(pm));
    }
    for (const auto& l : snapshot.logs) {
        if (!(l.entity == entity)) continue;
        LogChunk sliced;
        sliced.entity = l.entity;
        for (const auto& line : l.lines) {
            if (window.contains(line.at)) sliced.lines.push_back(line);
        }
        if (!sliced.lines.empty()) p.local_logs.push_back(std::move(sliced));
    }

    // Neighbor set: topology adjacency plus explanatory-graph edge endpoints
    // touching this entity (discovered dependencies are absent from topology).
    std::set<NeighborRef> refs;
    if (in_topology) {
        for (const auto& e : snapshot.topology.edges()) {
            if (e.dst == entity && !(e.src == entity)) refs.insert({e.src, e.kind, Direction::Upstream});
            if (e.src == entity && !(e.dst == entity)) refs.insert({e.dst, e.kind, Direction::Downstream});
        }
    }
    for (const auto& e : es.edges()) {
        if (e.target == entity) refs.insert({e.source, EdgeKind::Dependency, Direction::Upstream});
        if (e.source == entity) refs.insert({e.target, EdgeKind::Dependency, Direction::Downstream});
    }
    std::vector<NeighborRef> all_neighbors(refs.begin(), refs.end());
    std::sort(all_neighbors.begin(), all_neighbors.end(), [](const NeighborRef& a, const NeighborRef& b) {
        if (!(a.entity == b.entity)) return a.entity < b.entity;
        if (a.kind != b.kind) return a.kind < b.kind;
        return a.direction < b.direction;
    });

    const int total = static_cast<int>(all_neighbors.size());
    p.total_pages = std::max(1, (total + deps_per_page - 1) / deps_per_page);
    if (page > p.total_pages) {
        raise(ErrorKind::PageOutOfRange, "page " + std::to_string(page) + " of " +
                                             std::to_string(p.total_pages) + " for " +
                                             entity.canonical());
    }
    p.page = page;
    const int begin = (page - 1) * deps_per_page;
    const int end = std::min(total, begin + deps_per_page);
    for (int i = begin; i < end; ++i) p.neighbors.push_back(all_neighbors[i]);

    p.inbox = std::move(inbox);
    p.size_bytes = packet_size_bytes(p);
    return p;
}

std::int64_t packet_size_bytes(const ContextPacket& packet) {
    ContextPacket copy = packet;
    copy.size_bytes = 0;
    return static_cast<std::int64_t>(to_json(copy).dump().size());
}

std::vector<ContextPacket> chunk_packet(const ContextPacket& packet, std::int64_t budget_bytes,
                                        double overlap_fraction) {
    if (budget_bytes < 4096) raise(ErrorKind::ParseError, "chunk budget must be >= 4096 bytes");
    if (overlap_fraction < 0.0 || overlap_fraction >= 0.5) {
        raise(ErrorKind::ParseError, "overlap_fraction must be in [0, 0.5)");
    }

    const std::int64_t full_size = packet_size_bytes(packet);
    if (full_size <= budget_bytes) return {packet};

    // Flatten log lines; everything else is replicated into each chunk.
    std::vector<LogLine> lines;
    for (const auto& chunk : packet.local_logs) {
        lines.insert(lines.end(), chunk.lines.begin(), chunk.lines.end());
    }
    std::stable_sort(lines.begin(), lines.end(),
                     [](const LogLine& a, const LogLine& b) { return a.at < b.at; });

    ContextPacket base = packet;
    base.local_logs.clear();
    base.chunked = true;
    const std::int64_t base_cost = packet_size_bytes(base) + 64; // slack for the log envelope

    // Exact serialized cost per line (plus a separator byte).
    auto line_cost = [](const LogLine& l) -> std::int64_t {
        const nlohmann::json j = {
            {"t", format_rfc3339(l.at)}, {"level", l.level}, {"text", l.text}};
        return static_cast<std::int64_t>(j.dump().size()) + 1;
    };

    std::vector<ContextPacket> chunks;
    std::size_t start = 0;
    while (start < lines.size()) {
        std::int64_t used = base_cost;
        std::size_t end = start;
        while (end < lines.size()) {
            const std::int64_t cost = line_cost(lines[end]);
            if (end > start && used + cost > budget_bytes) break;
            used += cost;
            ++end;
        }
        // A single line larger than the budget still gets its own chunk.
        const std::size_t taken = end - start;
        ContextPacket chunk = base;
        LogChunk log;
        log.entity = packet.entity;
        log.lines.assign(lines.begin() + static_cast<std::ptrdiff_t>(start),
                         lines.begin() + static_cast<std::ptrdiff_t>(end));
        chunk.local_logs.push_back(std::move(log));
        chunk.size_bytes = packet_size_bytes(chunk);
        chunks.push_back(std::move(chunk));

        if (end >= lines.size()) break;
        std::size_t overlap = static_cast<std::size_t>(std::floor(overlap_fraction * taken));
        if (overlap >= taken) overlap = taken - 1; // always advance
        start = end - overlap;
    }
    if (chunks.empty()) {
        ContextPacket only = base;
        only.size_bytes = packet_size_bytes(only);
        chunks.push_back(std::move(only));
    }
    return chunks;
}

} // namespace eog
