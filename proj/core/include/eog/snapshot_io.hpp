#pragma once

#include "eog/evidence.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <string>

namespace eog {

// JSON bridges for snapshot and packet types. Entity ids serialize as
// canonical "namespace/Kind/name" strings; timestamps as RFC3339 UTC.
// nlohmann::json orders object keys, so dumps are canonical byte-for-byte.

nlohmann::json to_json(const EntityId& id);
nlohmann::json to_json(const TimeWindow& w);
nlohmann::json to_json(const TopologyEdge& e);
nlohmann::json to_json(const OperationalGraph& g);
nlohmann::json to_json(const Alert& a);
nlohmann::json to_json(const K8sEvent& e);
nlohmann::json to_json(const SpecChange& c);
nlohmann::json to_json(const MetricSeries& m);
nlohmann::json to_json(const LogChunk& l);
nlohmann::json to_json(const Belief& b);
nlohmann::json to_json(const CausalEdge& e);
nlohmann::json to_json(const Message& m);
nlohmann::json to_json(const NeighborRef& n);
nlohmann::json to_json(const PacketMetric& m);
nlohmann::json to_json(const ContextPacket& p);
nlohmann::json to_json(const Snapshot& s);

TimeWindow window_from_json(const nlohmann::json& j);
OperationalGraph topology_from_json(const nlohmann::json& j);
Alert alert_from_json(const nlohmann::json& j);
K8sEvent event_from_json(const nlohmann::json& j);
SpecChange spec_change_from_json(const nlohmann::json& j);
MetricSeries metric_series_from_json(const nlohmann::json& j);
LogChunk log_chunk_from_json(const nlohmann::json& j);
Belief belief_from_json(const nlohmann::json& j);
CausalEdge causal_edge_from_json(const nlohmann::json& j);
Message message_from_json(const nlohmann::json& j);
ContextPacket packet_from_json(const nlohmann::json& j);

// Loads a snapshot directory: topology.json plus optional alerts.json,
// events.json, spec_changes.json, metrics.json, logs.json. Missing optional
// files yield empty collections. Throws SnapshotNotFound / ParseError (with
// the offending file named).
Snapshot load_snapshot(const std::filesystem::path& dir);

// Writes the six snapshot files. Used by the simulator and tests.
void save_snapshot(const Snapshot& snapshot, const std::filesystem::path& dir);

} // namespace eog
