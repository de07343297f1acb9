#include "eog/policy.hpp"

#include "eog/error.hpp"
#include "eog/snapshot_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <regex>

namespace eog {

using nlohmann::json;

const char* to_string(ExploreDirection d) {
    switch (d) {
    case ExploreDirection::Upstream: return "upstream";
    case ExploreDirection::Downstream: return "downstream";
    case ExploreDirection::Ownership: return "ownership";
    case ExploreDirection::Infrastructure: return "infrastructure";
    }
    return "upstream";
}

ExploreDirection explore_direction_from_string(const std::string& text) {
    if (text == "upstream") return ExploreDirection::Upstream;
    if (text == "downstream") return ExploreDirection::Downstream;
    if (text == "ownership") return ExploreDirection::Ownership;
    if (text == "infrastructure") return ExploreDirection::Infrastructure;
    raise(ErrorKind::ParseError, "unknown direction \"" + text + "\"");
}

json to_json(const PolicyOutput& out) {
    json claims = json::array();
    for (const auto& c : out.propagation_claims) claims.push_back(to_json(c));
    json candidates = json::array();
    for (const auto& c : out.next_candidates) candidates.push_back(c.canonical());
    return {{"label", to_string(out.label)},
            {"reasoning", out.reasoning},
            {"evidence_citations", out.evidence_citations},
            {"propagation_claims", claims},
            {"next_candidates", candidates},
            {"direction", to_string(out.direction)}};
}

PolicyOutput policy_output_from_json(const json& j) {
    PolicyOutput out;
    out.label = label_from_string(j.at("label").get<std::string>());
    out.reasoning = j.at("reasoning").get<std::string>();
    out.evidence_citations = j.at("evidence_citations").get<std::vector<std::string>>();
    for (const auto& c : j.at("propagation_claims")) {
        out.propagation_claims.push_back(causal_edge_from_json(c));
    }
    for (const auto& c : j.at("next_candidates")) {
        out.next_candidates.push_back(parse_entity_id(c.get<std::string>()));
    }
    out.direction = explore_direction_from_string(j.at("direction").get<std::string>());
    return out;
}

void validate_policy_output(const PolicyOutput& out, const EntityId& evaluated) {
    if (out.next_candidates.size() > 2) {
        raise(ErrorKind::SchemaViolation, "next_candidates exceeds the cap of 2");
    }
    if (out.label != Label::Defer && out.evidence_citations.empty()) {
        raise(ErrorKind::SchemaViolation,
              std::string("label ") + to_string(out.label) + " requires evidence citations");
    }
    for (const auto& claim : out.propagation_claims) {
        if (claim.source == claim.target) {
            raise(ErrorKind::SchemaViolation, "claim is a self-loop: " + claim.source.canonical());
        }
        if (claim.condition.empty() || claim.effect.empty()) {
            raise(ErrorKind::SchemaViolation, "claim condition/effect must be non-empty");
        }
        if (!(claim.source == evaluated) && !(claim.target == evaluated)) {
            raise(ErrorKind::SchemaViolation, "claim " + claim.source.canonical() + " -> " +
                                                  claim.target.canonical() +
                                                  " does not touch the evaluated entity");
        }
    }
}

std::string policy_output_digest(const PolicyOutput& out) {
    const std::string canonical = to_json(out).dump();
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : canonical) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

const char* const kWorkloadChangeMarker = "workload_pattern_change";

std::string traffic_blame_marker(const EntityId& blamed) {
    return "traffic_overload_from=" + blamed.canonical();
}

std::string caused_by_marker(const EntityId& cause) {
    return "caused_by=" + cause.canonical();
}

namespace {

bool contains(const std::string& haystack, const std::string& needle) {
    return haystack.find(needle) != std::string::npos;
}

bool is_error_level(const std::string& level) { return level == "error" || level == "fatal"; }

struct InboundSurge {
    EntityId source;
    int pct = 0; // rounded percent above baseline
};

// Dominant elevated inbound-rate series, if any. Elevation compares the
// in-window mean against the pre-window baseline carried on the packet.
std::optional<InboundSurge> elevated_inbound(const ContextPacket& packet, double threshold) {
    std::optional<InboundSurge> best;
    double best_delta = 0.0;
    for (const auto& m : packet.local_metrics) {
        const std::string prefix = "inbound_rate_by_source:";
        if (m.metric.rfind(prefix, 0) != 0) continue;
        if (!m.baseline || *m.baseline <= 0.0 || m.points.empty()) continue;
        double sum = 0.0;
        for (const auto& p : m.points) sum += p.value;
        const double mean = sum / static_cast<double>(m.points.size());
        if (mean < *m.baseline * (1.0 + threshold)) continue;
        const double delta = mean - *m.baseline;
        const EntityId source = parse_entity_id(m.metric.substr(prefix.size()));
        if (!best || delta > best_delta ||
            (delta == best_delta && source.canonical() < best->source.canonical())) {
            best = InboundSurge{source, static_cast<int>(std::lround((mean / *m.baseline - 1.0) * 100.0))};
            best_delta = delta;
        }
    }
    return best;
}

std::optional<std::string> resource_failure(const ContextPacket& packet) {
    for (const auto& e : packet.local_events) {
        if (e.reason == "OOMKilled" || e.reason == "Evicted" || e.reason == "OOMKilling") {
            return e.reason;
        }
    }
    for (const auto& chunk : packet.local_logs) {
        for (const auto& line : chunk.lines) {
            if (!is_error_level(line.level)) continue;
            if (contains(line.text, "OutOfMemoryError") || contains(line.text, "OOMKilled")) {
                return std::string("OutOfMemoryError");
            }
        }
    }
    return std::nullopt;
}

// True when a downstream neighbor reported itself a Symptom of this
// entity's traffic.
bool blamed_by_downstream(const ContextPacket& packet) {
    const std::string marker = traffic_blame_marker(packet.entity);
    for (const auto& msg : packet.inbox) {
        if (msg.belief.label == Label::Symptom && contains(msg.belief.evidence_summary, marker)) {
            return true;
        }
    }
    return false;
}

// Callees named by error-level "... calling <namespace/Kind/name> ..." lines,
// ordered by first appearance. Callees that already blamed this entity's
// traffic are excluded: their errors are this entity's downstream effect.
std::vector<EntityId> callees_with_errors(const ContextPacket& packet) {
    static const std::regex callee_re(
        "calling\\s+([A-Za-z0-9_.-]+/[A-Za-z0-9_.-]+/[A-Za-z0-9_.-]+)");
    std::vector<EntityId> callees;
    for (const auto& chunk : packet.local_logs) {
        for (const auto& line : chunk.lines) {
            if (!is_error_level(line.level)) continue;
            auto begin = std::sregex_iterator(line.text.begin(), line.text.end(), callee_re);
            for (auto it = begin; it != std::sregex_iterator(); ++it) {
                EntityId id;
                try {
                    id = parse_entity_id((*it)[1].str());
                } catch (const Error&) {
                    continue;
                }
                if (id == packet.entity) continue;
                if (std::find(callees.begin(), callees.end(), id) != callees.end()) continue;
                const std::string blame = traffic_blame_marker(packet.entity);
                bool blamed_us = false;
                for (const auto& msg : packet.inbox) {
                    if (msg.from == id && msg.belief.label == Label::Symptom &&
                        contains(msg.belief.evidence_summary, blame)) {
                        blamed_us = true;
                        break;
                    }
                }
                if (!blamed_us) callees.push_back(id);
            }
        }
    }
    return callees;
}

std::optional<std::string> workload_marker_line(const ContextPacket& packet) {
    for (const auto& chunk : packet.local_logs) {
        for (const auto& line : chunk.lines) {
            if (contains(line.text, kWorkloadChangeMarker)) return line.text;
        }
    }
    return std::nullopt;
}

bool has_anomalies(const ContextPacket& packet, double threshold) {
    if (!packet.local_alerts.empty()) return true;
    for (const auto& e : packet.local_events) {
        if (e.type != EventType::Normal) return true;
    }
    for (const auto& chunk : packet.local_logs) {
        for (const auto& line : chunk.lines) {
            if (is_error_level(line.level)) return true;
        }
    }
    return elevated_inbound(packet, threshold).has_value();
}

Timestamp first_anomaly_at(const ContextPacket& packet) {
    Timestamp first = packet.window.end; // sentinel: no anomaly observed
    for (const auto& a : packet.local_alerts) first = std::min(first, a.first_seen);
    for (const auto& e : packet.local_events) {
        if (e.type != EventType::Normal) first = std::min(first, e.at);
    }
    for (const auto& chunk : packet.local_logs) {
        for (const auto& line : chunk.lines) {
            if (is_error_level(line.level)) first = std::min(first, line.at);
        }
    }
    return first;
}

std::string join_fields(const std::vector<std::string>& fields) {
    std::string out;
    for (const auto& f : fields) {
        if (!out.empty()) out += ", ";
        out += f;
    }
    return out;
}

} // namespace

PolicyOutput OraclePolicy::evaluate(const ContextPacket& packet) {
    PolicyOutput out;
    const EntityId& self = packet.entity;

    // Rule 1: a spec change preceding the first local anomaly makes this
    // entity an origin ("what changed" discipline).
    const Timestamp anomaly_at = first_anomaly_at(packet);
    const SpecChange* change = nullptr;
    for (const auto& c : packet.local_spec_changes) {
        if (c.at < anomaly_at && (!change || c.at < change->at)) change = &c;
    }
    if (change) {
        out.label = Label::Origin;
        out.direction = ExploreDirection::Downstream;
        out.reasoning = "spec change at " + format_rfc3339(change->at) + " (fields: " +
                        join_fields(change->fields_changed) +
                        ") precedes the first local anomaly; " + change->diff_summary;
        out.evidence_citations.push_back("spec_change " + self.canonical() + " @ " +
                                         format_rfc3339(change->at));
        for (const auto& n : packet.neighbors) {
            bool evidenced = false;
            for (const auto& chunk : packet.local_logs) {
                for (const auto& line : chunk.lines) {
                    if (contains(line.text, n.entity.canonical())) evidenced = true;
                }
            }
            if (evidenced) {
                out.propagation_claims.push_back(
                    {self, n.entity, "spec change on " + self.canonical(),
                     n.entity.canonical() + " degraded downstream"});
            }
        }
        return out;
    }

    const auto failure = resource_failure(packet);
    const auto surge = elevated_inbound(packet, cfg_.traffic_threshold);

    // Rule 2: resource exhaustion under elevated inbound traffic is a
    // symptom of the traffic source.
    if (failure && surge) {
        out.label = Label::Symptom;
        out.direction = ExploreDirection::Upstream;
        out.reasoning = "resource failure (" + *failure + ") with inbound traffic +" +
                        std::to_string(surge->pct) + "% from " + surge->source.canonical() +
                        " above baseline; overload caused the exhaustion; " +
                        traffic_blame_marker(surge->source);
        out.evidence_citations.push_back("event/log " + *failure + " on " + self.canonical());
        out.evidence_citations.push_back("metric inbound_rate_by_source:" +
                                         surge->source.canonical() + " +" +
                                         std::to_string(surge->pct) + "%");
        out.propagation_claims.push_back({surge->source, self,
                                          "traffic surge from " + surge->source.canonical() + " (+" +
                                              std::to_string(surge->pct) + "% above baseline)",
                                          self.canonical() + " exhausted resources"});
        out.next_candidates.push_back(surge->source);
        return out;
    }

    // Rule 3: local resource exhaustion with no traffic story is an origin.
    if (failure && !surge && !blamed_by_downstream(packet)) {
        out.label = Label::Origin;
        out.direction = ExploreDirection::Upstream;
        out.reasoning = "resource failure (" + *failure +
                        "): memory/resources exhausted locally with no inbound traffic elevation";
        out.evidence_citations.push_back("event/log " + *failure + " on " + self.canonical());
        return out;
    }

    // Rule 4: error logs calling another entity point the blame at the
    // callee; claims survive even when the callee is absent from topology.
    const auto callees = callees_with_errors(packet);
    if (!callees.empty()) {
        out.label = Label::Symptom;
        out.direction = ExploreDirection::Upstream;
        std::string list;
        for (const auto& c : callees) {
            if (!list.empty()) list += ", ";
            list += c.canonical();
        }
        out.reasoning = "error logs show failed calls to " + list + "; " +
                        caused_by_marker(callees.front());
        for (const auto& c : callees) {
            out.evidence_citations.push_back("log errors calling " + c.canonical());
            out.propagation_claims.push_back({c, self, "errors calling " + c.canonical(),
                                              self.canonical() + " degraded (5xx/timeouts)"});
        }
        out.next_candidates.push_back(callees.front());
        if (callees.size() > 1) out.next_candidates.push_back(callees[1]);
        return out;
    }

    // Rule 5: a downstream neighbor blames this entity's traffic and our own
    // inbound is elevated: pass the blame upstream.
    if (blamed_by_downstream(packet) && surge) {
        out.label = Label::Symptom;
        out.direction = ExploreDirection::Upstream;
        out.reasoning = "downstream reports overload from this entity; own inbound traffic +" +
                        std::to_string(surge->pct) + "% from " + surge->source.canonical() + "; " +
                        traffic_blame_marker(surge->source);
        out.evidence_citations.push_back("inbox: downstream symptom blames " + self.canonical());
        out.evidence_citations.push_back("metric inbound_rate_by_source:" +
                                         surge->source.canonical() + " +" +
                                         std::to_string(surge->pct) + "%");
        out.propagation_claims.push_back({surge->source, self,
                                          "traffic surge from " + surge->source.canonical() + " (+" +
                                              std::to_string(surge->pct) + "% above baseline)",
                                          self.canonical() + " overloaded downstream dependents"});
        out.next_candidates.push_back(surge->source);
        return out;
    }

    // Rule 6: workload-pattern marker in logs (flash sale and friends).
    if (auto marker = workload_marker_line(packet)) {
        out.label = Label::Origin;
        out.direction = ExploreDirection::Downstream;
        out.reasoning = "workload pattern change: traffic surge started here; " + *marker;
        out.evidence_citations.push_back("log: " + *marker);
        return out;
    }

    // Rule 7: nothing anomalous in the window.
    if (!has_anomalies(packet, cfg_.traffic_threshold)) {
        out.label = Label::Healthy;
        out.direction = ExploreDirection::Upstream;
        out.reasoning = "no anomalies in window for " + self.canonical();
        out.evidence_citations.push_back("window " + format_rfc3339(packet.window.start) + " .. " +
                                         format_rfc3339(packet.window.end) + " clean");
        return out;
    }

    // Rule 8: anomalies without a recognized explanation.
    out.label = Label::Defer;
    out.direction = ExploreDirection::Upstream;
    out.reasoning = "evidence inconclusive for " + self.canonical();
    return out;
}

PolicyOutput AdversarialPolicy::evaluate(const ContextPacket& packet) {
    PolicyOutput out;
    out.label = (packet.visit_index % 2 == 1) ? Label::Origin : Label::Symptom;
    out.direction = ExploreDirection::Upstream;
    out.reasoning = "adversarial oscillation, visit " + std::to_string(packet.visit_index);
    out.evidence_citations.push_back("visit parity " + std::to_string(packet.visit_index % 2));
    return out;
}

PolicyOutput map_reduce_evaluate(const std::vector<ContextPacket>& chunks, AbductivePolicy& inner) {
    if (chunks.empty()) raise(ErrorKind::PolicyFailure, "map-reduce over zero chunks");

    auto rank = [](Label l) {
        switch (l) {
        case Label::Origin: return 3;
        case Label::Symptom: return 2;
        case Label::Defer: return 1;
        case Label::Healthy: return 0;
        }
        return 0;
    };

    std::vector<PolicyOutput> results;
    std::string last_error;
    for (const auto& chunk : chunks) {
        try {
            results.push_back(inner.evaluate(chunk));
        } catch (const Error& e) {
            last_error = e.what();
        }
    }
    if (results.empty()) {
        raise(ErrorKind::PolicyFailure, "all chunk evaluations failed: " + last_error);
    }

    const PolicyOutput* winner = &results.front();
    for (const auto& r : results) {
        if (rank(r.label) > rank(winner->label)) winner = &r;
    }

    PolicyOutput merged;
    merged.label = winner->label;
    merged.reasoning = winner->reasoning;
    merged.direction = winner->direction;
    for (const auto& r : results) {
        for (const auto& cite : r.evidence_citations) merged.evidence_citations.push_back(cite);
        for (const auto& claim : r.propagation_claims) {
            bool dup = std::any_of(merged.propagation_claims.begin(), merged.propagation_claims.end(),
                                   [&](const CausalEdge& e) {
                                       return e.source == claim.source && e.target == claim.target;
                                   });
            if (!dup) merged.propagation_claims.push_back(claim);
        }
        for (const auto& cand : r.next_candidates) {
            if (merged.next_candidates.size() >= 2) break;
            if (std::find(merged.next_candidates.begin(), merged.next_candidates.end(), cand) ==
                merged.next_candidates.end()) {
                merged.next_candidates.push_back(cand);
            }
        }
    }
    return merged;
}

} // namespace eog
