#pragma once

#include "eog/entity.hpp"
#include "eog/graph.hpp"
#include "eog/time.hpp"

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace eog {

enum class Severity { Critical, Warning, Info };
const char* to_string(Severity s);
Severity severity_from_string(const std::string& text);

// Golden-signal classification of an alert.
enum class Signal { Errors, Latency, Traffic, Saturation, Other };
const char* to_string(Signal s);
Signal signal_from_string(const std::string& text);

struct Alert {
    std::string name;
    EntityId entity;
    Severity severity = Severity::Warning;
    Signal signal = Signal::Other;
    Timestamp first_seen;
    Timestamp last_seen;

    bool operator==(const Alert&) const = default;
};

// Anchors are golden-signal alerts: errors, latency, traffic.
bool is_golden_signal(Signal s);

enum class EventType { Normal, Warning, Error };
const char* to_string(EventType t);
EventType event_type_from_string(const std::string& text);

struct K8sEvent {
    EntityId entity;
    std::string reason; // OOMKilled, CrashLoopBackOff, FailedScheduling, ...
    EventType type = EventType::Normal;
    std::string message;
    Timestamp at;

    bool operator==(const K8sEvent&) const = default;
};

struct SpecChange {
    EntityId entity;
    Timestamp at;
    std::string diff_summary;
    std::vector<std::string> fields_changed;

    bool operator==(const SpecChange&) const = default;
};

struct MetricPoint {
    Timestamp at;
    double value = 0.0;

    bool operator==(const MetricPoint&) const = default;
};

struct MetricSeries {
    EntityId entity;
    std::string metric; // cpu, memory, request_rate, inbound_rate_by_source:<id>, ...
    std::vector<MetricPoint> points; // sorted ascending, no NaN
    std::string unit;
    // Staged evidence: the series is withheld from context packets until the
    // entity's second visit. Set by the simulator for revision scenarios.
    bool staged = false;

    bool operator==(const MetricSeries&) const = default;
};

struct LogLine {
    Timestamp at;
    std::string level; // debug|info|warn|error|fatal
    std::string text;

    bool operator==(const LogLine&) const = default;
};

struct LogChunk {
    EntityId entity;
    std::vector<LogLine> lines; // sorted by timestamp

    bool operator==(const LogChunk&) const = default;
};

// A full observability snapshot. Immutable after load.
struct Snapshot {
    OperationalGraph topology;
    std::vector<Alert> alerts;
    std::vector<K8sEvent> events;
    std::vector<SpecChange> spec_changes;
    std::vector<MetricSeries> metrics;
    std::vector<LogChunk> logs;
    // Entities referenced by evidence but absent from the topology
    // (hidden-dependency support). Computed at load time.
    std::set<EntityId> unregistered;
};

// Belief message delivered to a node's inbox.
struct Message {
    EntityId from;
    EntityId to;
    Belief belief;
    std::int64_t sent_at_step = 0;

    bool operator==(const Message&) const = default;
};

struct NeighborRef {
    EntityId entity;
    EdgeKind kind = EdgeKind::Dependency;
    Direction direction = Direction::Downstream; // relative to the packet owner

    auto operator<=>(const NeighborRef&) const = default;
};

// Metric view inside a packet: points sliced to the window plus the
// pre-window baseline mean (packets carry only in-window timestamps).
struct PacketMetric {
    EntityId entity;
    std::string metric;
    std::string unit;
    std::vector<MetricPoint> points;
    std::optional<double> baseline; // mean over the pre-window baseline span

    bool operator==(const PacketMetric&) const = default;
};

// The Context Contract's bounded per-entity view: window-sliced local
// evidence, 1-hop neighbors (paginated), and the inbox.
struct ContextPacket {
    EntityId entity;
    TimeWindow window;
    std::vector<Alert> local_alerts;
    std::vector<K8sEvent> local_events;
    std::vector<SpecChange> local_spec_changes;
    std::vector<PacketMetric> local_metrics;
    std::vector<LogChunk> local_logs;
    std::vector<NeighborRef> neighbors;
    std::vector<Message> inbox;
    int page = 1;
    int total_pages = 1;
    std::int64_t size_bytes = 0;
    int visit_index = 1; // injected by the controller; 1-based
    bool chunked = false;

    bool operator==(const ContextPacket&) const = default;
};

// Tunables for window selection, filtering tiers and packet assembly.
// Token budgets are rendered as byte budgets (4 bytes/token proxy).
struct EvidenceConfig {
    std::int64_t lead_margin_s = 300;          // window lead before earliest anchor
    std::int64_t pre_incident_margin_s = 900;  // spec-change tier-1 span
    std::int64_t baseline_window_s = 1800;     // metric baseline span before window
    int deps_per_page = 3;
    int max_events_per_page = 50;
    int max_spec_changes_per_page = 20;
    double chunk_overlap_fraction = 0.1;
};

// Chooses the investigation window from golden-signal anchors. Window start
// is the earliest anchor first_seen minus the lead margin; end is the latest
// anchor last_seen. Falls back to non-watchdog alerts, then to all alerts.
// Throws Error(NoAlerts) on an empty list.
std::pair<TimeWindow, std::vector<Alert>> select_window(const std::vector<Alert>& alerts,
                                                        const EvidenceConfig& cfg = {});

// Relevance filter with the four-tier ranking: events preceding the anchor
// alert > events on alerting entities (or their 1-hop dependencies, which the
// caller folds into `alerting`) > failure events > config-change events.
// Normal events are excluded unless they precede the anchor inside the window.
std::vector<K8sEvent> filter_events(const std::vector<K8sEvent>& events, const TimeWindow& window,
                                    const std::set<EntityId>& alerting, int max_per_page,
                                    const EvidenceConfig& cfg = {});

// Three-tier ranking: just-before-window (within the pre-incident margin) >
// inside window > everything else; then truncation.
std::vector<SpecChange> filter_spec_changes(const std::vector<SpecChange>& changes,
                                            const TimeWindow& window, int max_per_page,
                                            const EvidenceConfig& cfg = {});

// Assembles the Context Packet for one entity. The neighbor set is the union
// of topology neighbors and explanatory-graph edge endpoints, paginated at
// deps_per_page. Throws UnknownEntity / PageOutOfRange.
ContextPacket get_context(const Snapshot& snapshot, const ExplanatoryGraph& es,
                          const EntityId& entity, const TimeWindow& window,
                          std::vector<Message> inbox, int page = 1, int deps_per_page = 3,
                          int visit_index = 1, const EvidenceConfig& cfg = {});

// Splits an oversize packet over its log lines. Consecutive chunks share
// overlap_fraction of the previous chunk's lines; every other slice is
// replicated into each chunk. A packet under budget returns unchanged.
std::vector<ContextPacket> chunk_packet(const ContextPacket& packet, std::int64_t budget_bytes,
                                        double overlap_fraction);

// Canonical JSON size of a packet (size_bytes field zeroed for stability).
std::int64_t packet_size_bytes(const ContextPacket& packet);

} // namespace eog
