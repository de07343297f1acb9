#pragma once

#include "eog/evidence.hpp"
#include "eog/graph.hpp"

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

namespace eog {

enum class ExploreDirection { Upstream, Downstream, Ownership, Infrastructure };
const char* to_string(ExploreDirection d);
ExploreDirection explore_direction_from_string(const std::string& text);

// Result of one abductive evaluation: local belief, propagation claims, and
// candidate entities for further investigation.
struct PolicyOutput {
    Label label = Label::Defer;
    std::string reasoning;
    std::vector<std::string> evidence_citations;
    std::vector<CausalEdge> propagation_claims;
    std::vector<EntityId> next_candidates; // length <= 2
    ExploreDirection direction = ExploreDirection::Upstream;

    bool operator==(const PolicyOutput&) const = default;
};

nlohmann::json to_json(const PolicyOutput& out);
PolicyOutput policy_output_from_json(const nlohmann::json& j);

// Enforces the output invariants: candidate cap, evidence required for
// non-Defer labels, every claim touching the evaluated entity with non-empty
// condition/effect. Throws Error(SchemaViolation) naming the violation.
void validate_policy_output(const PolicyOutput& out, const EntityId& evaluated);

// Stable digest of a canonical output rendering (FNV-1a 64, hex).
std::string policy_output_digest(const PolicyOutput& out);

// Stateless local-inference policy: a pure function of the packet.
class AbductivePolicy {
public:
    virtual ~AbductivePolicy() = default;
    virtual PolicyOutput evaluate(const ContextPacket& packet) = 0;
    virtual std::string name() const = 0;
};

struct OracleConfig {
    double traffic_threshold = 0.20; // elevation over baseline that counts as a surge
};

// Evidence markers the oracle embeds in belief summaries so that downstream
// evaluations can read blame out of inbox messages.
std::string traffic_blame_marker(const EntityId& blamed);
std::string caused_by_marker(const EntityId& cause);
extern const char* const kWorkloadChangeMarker;

// Deterministic rule-based policy for reproducible runs. Rule cascade, first
// match wins: spec-change origin; traffic-overload symptom; local resource
// exhaustion origin; callee-error symptom (edge discovery); blamed-traffic
// symptom; workload-pattern origin; healthy; defer.
class OraclePolicy final : public AbductivePolicy {
public:
    explicit OraclePolicy(OracleConfig cfg = {}) : cfg_(cfg) {}
    PolicyOutput evaluate(const ContextPacket& packet) override;
    std::string name() const override { return "oracle"; }

private:
    OracleConfig cfg_;
};

// Flips Origin/Symptom on successive visits (by packet visit parity); never
// proposes candidates. Exercises the damping safeguards.
class AdversarialPolicy final : public AbductivePolicy {
public:
    PolicyOutput evaluate(const ContextPacket& packet) override;
    std::string name() const override { return "adversarial"; }
};

// Evaluates each chunk with `inner` and merges: label precedence
// Origin > Symptom > Defer > Healthy, claims unioned by (source, target),
// citations concatenated, first two candidates in claim order. Succeeds when
// at least one chunk evaluation succeeds.
PolicyOutput map_reduce_evaluate(const std::vector<ContextPacket>& chunks, AbductivePolicy& inner);

} // namespace eog
