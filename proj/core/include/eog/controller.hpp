#pragma once

#include "eog/diagnosis.hpp"
#include "eog/evidence.hpp"
#include "eog/graph.hpp"
#include "eog/policy.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace eog {

enum class ActivateReason { Seed, Discovered, Proposed, Reactivated };
const char* to_string(ActivateReason reason);
ActivateReason activate_reason_from_string(const std::string& text);

struct ActivateEvent {
    EntityId entity;
    ActivateReason reason = ActivateReason::Seed;
    // Evaluation count at the event's last cooldown deferral; -1 when never
    // deferred. A deferred event whose count still matches gets the cooldown
    // waived, so a drained queue cannot livelock.
    std::int64_t deferred_at_eval = -1;

    bool operator==(const ActivateEvent&) const = default;
};

struct MessageDeliveryEvent {
    Message message;

    bool operator==(const MessageDeliveryEvent&) const = default;
};

struct BeliefChangedEvent {
    EntityId entity;

    bool operator==(const BeliefChangedEvent&) const = default;
};

using InvestigationEvent = std::variant<ActivateEvent, MessageDeliveryEvent, BeliefChangedEvent>;

nlohmann::json to_json(const InvestigationEvent& ev);
InvestigationEvent investigation_event_from_json(const nlohmann::json& j);

struct LedgerEntry {
    std::int64_t step = 0; // strictly increasing
    EntityId entity;
    Belief belief;
    InvestigationEvent trigger;
    std::string policy_output_digest; // "damped" / "policy-failure" sentinels
    std::vector<CausalEdge> claims;   // claims applied at this evaluation
};

nlohmann::json to_json(const LedgerEntry& e);
LedgerEntry ledger_entry_from_json(const nlohmann::json& j);

struct NodeRuntimeState {
    int visits = 0;
    int flips = 0; // label changes, counting the first assignment
    std::int64_t last_visit_step = -1; // evaluation ordinal of the last visit
    bool frozen_defer = false;

    bool operator==(const NodeRuntimeState&) const = default;
};

struct BudgetConfig {
    int max_hops = 256;  // Budget: policy invocations
    int k_thresh = 3;    // flip damping threshold
    int k_max = 5;       // max visits per node
    int k_cool = 2;      // evaluations of other nodes required between visits
    std::int64_t packet_budget_bytes = 320 * 1024; // ~80K tokens at 4 bytes/token
};

enum class Termination { Quiescence, BudgetExhausted };
const char* to_string(Termination t);

// Declared fallback scoring weights so tests can pin the formula.
struct FallbackWeights {
    double spec_change = 2.0;
    double failure_event = 1.0;
    double outgoing_edge = 0.5;
    double defer_penalty = -0.5;
};

struct AnchorAlert {
    std::string name;
    EntityId entity;

    bool operator==(const AnchorAlert&) const = default;
};

struct InvestigationResult {
    ExplanatoryGraph explanatory_graph;
    std::set<EntityId> frontier;
    std::vector<std::pair<EntityId, double>> fallback_ranking; // non-empty iff frontier empty
    std::vector<LedgerEntry> ledger;
    Termination terminated_by = Termination::Quiescence;
    int budget_remaining = 0;
    std::vector<AnchorAlert> anchor_alerts; // seed alerts, for finalize
};

nlohmann::json to_json(const InvestigationResult& r);

struct StepOutcome {
    enum class Kind { Progressed, Skipped, QueueEmpty };
    enum class SkipReason { None, FrozenDefer, MaxVisits, Cooldown, Damped };

    Kind kind = Kind::Progressed;
    SkipReason skip_reason = SkipReason::None;
};

const char* to_string(StepOutcome::SkipReason r);

// Seed selection ordered by causal-evidence strength: spec change preceding
// the entity's alert > failure event plus alert > changed entity with a
// dependency path to an alerting entity > alerting entity with no change.
// Throws Error(NoCandidates) when the snapshot carries no signals at all.
std::vector<InvestigationEvent> bootstrap(const Snapshot& snapshot, const TimeWindow& window,
                                          const std::vector<K8sEvent>& filtered_events,
                                          const std::vector<SpecChange>& filtered_spec_changes);

// Best-effort ranking for frontier-less runs: non-Healthy nodes scored by
// spec-change/failure evidence, claim fan-out and a Defer penalty.
// Throws Error(EmptyInvestigation) when the explanatory graph has no nodes.
std::vector<std::pair<EntityId, double>> fallback_ranking(const ExplanatoryGraph& es,
                                                          const std::vector<LedgerEntry>& ledger,
                                                          const Snapshot& snapshot,
                                                          const TimeWindow& window,
                                                          const FallbackWeights& weights = {});

struct Checkpoint {
    nlohmann::json payload; // versioned: {"eog_checkpoint_version": 1, ...}
};

// The deterministic investigation engine: an event queue over a frozen
// snapshot, with per-node safeguards and an append-only ledger. Strictly
// sequential; independent investigations may run in parallel.
class Investigation {
public:
    // Bootstraps the queue (window selection, filtering, candidate seeding).
    // `window` std::nullopt selects the window from alerts.
    Investigation(Snapshot snapshot, std::optional<TimeWindow> window, BudgetConfig budget,
                  EvidenceConfig evidence_cfg = {});

    // Processes one event from the queue front.
    StepOutcome step(AbductivePolicy& policy);

    // Drives step() until the queue drains or the budget is exhausted, then
    // computes the frontier (or the fallback ranking).
    InvestigationResult run(AbductivePolicy& policy);

    // Snapshot of all mutable state at a quiescent point (between steps).
    Checkpoint checkpoint() const;

    // Reconstructs an investigation from a checkpoint over the same snapshot.
    // Throws Error(CorruptCheckpoint) on schema/version mismatch.
    static Investigation restore(Snapshot snapshot, const Checkpoint& cp);

    const std::deque<InvestigationEvent>& pending() const { return queue_; }
    const std::vector<LedgerEntry>& ledger() const { return ledger_; }
    const ExplanatoryGraph& graph() const { return explanatory_; }
    const std::map<EntityId, NodeRuntimeState>& runtime() const { return runtime_; }
    const TimeWindow& window() const { return window_; }
    int budget_remaining() const { return budget_remaining_; }
    std::int64_t policy_invocations() const { return eval_count_; }

private:
    Investigation() = default;

    void enqueue_activate(const EntityId& entity, ActivateReason reason);
    std::vector<EntityId> broadcast_neighbors(const EntityId& entity) const;
    bool seen(const EntityId& entity) const;
    StepOutcome process_activate(ActivateEvent ev, AbductivePolicy& policy);
    void apply_damping_freeze(const EntityId& entity, const InvestigationEvent& trigger);

    Snapshot snapshot_;
    TimeWindow window_{};
    BudgetConfig budget_{};
    EvidenceConfig evidence_cfg_{};
    ExplanatoryGraph explanatory_;
    std::deque<InvestigationEvent> queue_;
    std::map<EntityId, std::vector<Message>> inboxes_;
    std::map<EntityId, NodeRuntimeState> runtime_;
    std::vector<LedgerEntry> ledger_;
    std::vector<AnchorAlert> anchor_alerts_;
    std::int64_t step_count_ = 0; // processed events
    std::int64_t eval_count_ = 0; // policy invocations
    int budget_remaining_ = 0;
};

// Convenience wrapper: bootstrap, run, return the result.
InvestigationResult run_investigation(Snapshot snapshot, std::optional<TimeWindow> window,
                                      AbductivePolicy& policy, BudgetConfig budget,
                                      EvidenceConfig evidence_cfg = {});

// Deterministic report rendering: frontier members become contributing
// factors; with an empty frontier the top fallback candidate is reported
// with an explicit uncertainty flag.
Diagnosis finalize(const InvestigationResult& result);

// Ledger JSON Lines export/import. The first line is a meta header carrying
// the ledger version and the damping threshold for replay validation.
std::string ledger_to_jsonl(const std::vector<LedgerEntry>& ledger, const BudgetConfig& budget);
std::pair<std::vector<LedgerEntry>, BudgetConfig> ledger_from_jsonl(const std::string& text);

} // namespace eog
