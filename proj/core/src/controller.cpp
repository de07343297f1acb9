#include "eog/controller.hpp"

#include "eog/error.hpp"
#include "eog/snapshot_io.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

namespace eog {

using nlohmann::json;

const char* to_string(ActivateReason reason) {
    switch (reason) {
    case ActivateReason::Seed: return "seed";
    case ActivateReason::Discovered: return "discovered";
    case ActivateReason::Proposed: return "proposed";
    case ActivateReason::Reactivated: return "reactivated";
    }
    return "seed";
}

ActivateReason activate_reason_from_string(const std::string& text) {
    if (text == "seed") return ActivateReason::Seed;
    if (text == "discovered") return ActivateReason::Discovered;
    if (text == "proposed") return ActivateReason::Proposed;
    if (text == "reactivated") return ActivateReason::Reactivated;
    raise(ErrorKind::ParseError, "unknown activate reason \"" + text + "\"");
}

const char* to_string(Termination t) {
    return t == Termination::Quiescence ? "quiescence" : "budget_exhausted";
}

const char* to_string(StepOutcome::SkipReason r) {
    switch (r) {
    case StepOutcome::SkipReason::None: return "none";
    case StepOutcome::SkipReason::FrozenDefer: return "frozen_defer";
    case StepOutcome::SkipReason::MaxVisits: return "max_visits";
    case StepOutcome::SkipReason::Cooldown: return "cooldown";
    case StepOutcome::SkipReason::Damped: return "damped";
    }
    return "none";
}

json to_json(const InvestigationEvent& ev) {
    if (const auto* a = std::get_if<ActivateEvent>(&ev)) {
        return {{"type", "activate"},
                {"entity", a->entity.canonical()},
                {"reason", to_string(a->reason)},
                {"deferred_at_eval", a->deferred_at_eval}};
    }
    if (const auto* m = std::get_if<MessageDeliveryEvent>(&ev)) {
        return {{"type", "message"}, {"message", to_json(m->message)}};
    }
    const auto& b = std::get<BeliefChangedEvent>(ev);
    return {{"type", "belief_changed"}, {"entity", b.entity.canonical()}};
}

InvestigationEvent investigation_event_from_json(const json& j) {
    const std::string type = j.at("type").get<std::string>();
    if (type == "activate") {
        ActivateEvent a;
        a.entity = parse_entity_id(j.at("entity").get<std::string>());
        a.reason = activate_reason_from_string(j.at("reason").get<std::string>());
        a.deferred_at_eval = j.value("deferred_at_eval", static_cast<std::int64_t>(-1));
        return a;
    }
    if (type == "message") return MessageDeliveryEvent{message_from_json(j.at("message"))};
    if (type == "belief_changed") {
        return BeliefChangedEvent{parse_entity_id(j.at("entity").get<std::string>())};
    }
    raise(ErrorKind::ParseError, "unknown event type \"" + type + "\"");
}

json to_json(const LedgerEntry& e) {
    json claims = json::array();
    for (const auto& c : e.claims) claims.push_back(to_json(c));
    return {{"step", e.step},
            {"entity", e.entity.canonical()},
            {"belief", to_json(e.belief)},
            {"trigger", to_json(e.trigger)},
            {"policy_output_digest", e.policy_output_digest},
            {"claims", claims}};
}

LedgerEntry ledger_entry_from_json(const json& j) {
    LedgerEntry e;
    e.step = j.at("step").get<std::int64_t>();
    e.entity = parse_entity_id(j.at("entity").get<std::string>());
    e.belief = belief_from_json(j.at("belief"));
    e.trigger = investigation_event_from_json(j.at("trigger"));
    e.policy_output_digest = j.at("policy_output_digest").get<std::string>();
    for (const auto& c : j.at("claims")) e.claims.push_back(causal_edge_from_json(c));
    return e;
}

namespace {

json to_json(const BudgetConfig& b) {
    return {{"max_hops", b.max_hops},
            {"k_thresh", b.k_thresh},
            {"k_max", b.k_max},
            {"k_cool", b.k_cool},
            {"packet_budget_bytes", b.packet_budget_bytes}};
}

BudgetConfig budget_from_json(const json& j) {
    BudgetConfig b;
    b.max_hops = j.at("max_hops").get<int>();
    b.k_thresh = j.at("k_thresh").get<int>();
    b.k_max = j.at("k_max").get<int>();
    b.k_cool = j.at("k_cool").get<int>();
    b.packet_budget_bytes = j.at("packet_budget_bytes").get<std::int64_t>();
    return b;
}

json to_json(const EvidenceConfig& c) {
    return {{"lead_margin_s", c.lead_margin_s},
            {"pre_incident_margin_s", c.pre_incident_margin_s},
            {"baseline_window_s", c.baseline_window_s},
            {"deps_per_page", c.deps_per_page},
            {"max_events_per_page", c.max_events_per_page},
            {"max_spec_changes_per_page", c.max_spec_changes_per_page},
            {"chunk_overlap_fraction", c.chunk_overlap_fraction}};
}

EvidenceConfig evidence_config_from_json(const json& j) {
    EvidenceConfig c;
    c.lead_margin_s = j.at("lead_margin_s").get<std::int64_t>();
    c.pre_incident_margin_s = j.at("pre_incident_margin_s").get<std::int64_t>();
    c.baseline_window_s = j.at("baseline_window_s").get<std::int64_t>();
    c.deps_per_page = j.at("deps_per_page").get<int>();
    c.max_events_per_page = j.at("max_events_per_page").get<int>();
    c.max_spec_changes_per_page = j.at("max_spec_changes_per_page").get<int>();
    c.chunk_overlap_fraction = j.at("chunk_overlap_fraction").get<double>();
    return c;
}

const std::set<std::string>& seed_failure_reasons() {
    static const std::set<std::string> reasons = {"OOMKilled", "CrashLoopBackOff", "Evicted"};
    return reasons;
}

// Undirected reachability over the topology.
bool weakly_connected(const OperationalGraph& g, const EntityId& from,
                      const std::set<EntityId>& targets) {
    if (targets.count(from)) return true;
    std::set<EntityId> seen{from};
    std::deque<EntityId> frontier{from};
    while (!frontier.empty()) {
        EntityId cur = frontier.front();
        frontier.pop_front();
        for (const auto& e : g.edges()) {
            EntityId next;
            if (e.src == cur) next = e.dst;
            else if (e.dst == cur) next = e.src;
            else continue;
            if (!seen.insert(next).second) continue;
            if (targets.count(next)) return true;
            frontier.push_back(next);
        }
    }
    return false;
}

constexpr const char* kDampedNote = "belief oscillation exceeded the damping threshold";

bool belief_revised(const std::optional<Belief>& old_belief, const Belief& updated) {
    return !old_belief || old_belief->label != updated.label ||
           old_belief->evidence_summary != updated.evidence_summary;
}

int reason_strength(ActivateReason r) {
    switch (r) {
    case ActivateReason::Seed: return 0;
    case ActivateReason::Discovered: return 1;
    case ActivateReason::Proposed: return 2;
    case ActivateReason::Reactivated: return 3;
    }
    return 3;
}

} // namespace

std::vector<InvestigationEvent> bootstrap(const Snapshot& snapshot, const TimeWindow& window,
                                          const std::vector<K8sEvent>& filtered_events,
                                          const std::vector<SpecChange>& filtered_spec_changes) {
    // Earliest in-window alert per entity.
    std::map<EntityId, Timestamp> alert_start;
    for (const auto& a : snapshot.alerts) {
        if (!window.overlaps(a.first_seen, a.last_seen)) continue;
        auto it = alert_start.find(a.entity);
        if (it == alert_start.end() || a.first_seen < it->second) alert_start[a.entity] = a.first_seen;
    }

    std::set<EntityId> changed;
    for (const auto& c : filtered_spec_changes) changed.insert(c.entity);

    // Tier 1: spec change preceding the entity's own alert.
    std::set<EntityId> tier1;
    for (const auto& c : filtered_spec_changes) {
        auto it = alert_start.find(c.entity);
        if (it != alert_start.end() && c.at < it->second) tier1.insert(c.entity);
    }
    // Tier 2: failure event plus an alert on the entity.
    std::set<EntityId> tier2;
    for (const auto& e : filtered_events) {
        if (seed_failure_reasons().count(e.reason) && alert_start.count(e.entity)) {
            tier2.insert(e.entity);
        }
    }
    // Tier 3: changed entity with a dependency path to an alerting entity.
    std::set<EntityId> alerting;
    for (const auto& [entity, _] : alert_start) alerting.insert(entity);
    std::set<EntityId> tier3;
    for (const auto& entity : changed) {
        if (snapshot.topology.contains(entity) && weakly_connected(snapshot.topology, entity, alerting)) {
            tier3.insert(entity);
        }
    }
    // Tier 4: alerting entity with no change.
    std::set<EntityId> tier4;
    for (const auto& entity : alerting) {
        if (!changed.count(entity)) tier4.insert(entity);
    }

    std::vector<InvestigationEvent> out;
    std::set<EntityId> emitted;
    for (const auto* tier : {&tier1, &tier2, &tier3, &tier4}) {
        for (const auto& entity : *tier) { // std::set iterates in EntityId order
            if (emitted.insert(entity).second) {
                out.push_back(ActivateEvent{entity, ActivateReason::Seed, -1});
            }
        }
    }
    if (out.empty()) {
        raise(ErrorKind::NoCandidates,
              "no investigation candidates: snapshot has no usable alerts, events or spec changes");
    }
    return out;
}

Investigation::Investigation(Snapshot snapshot, std::optional<TimeWindow> window,
                             BudgetConfig budget, EvidenceConfig evidence_cfg)
    : snapshot_(std::move(snapshot)), budget_(budget), evidence_cfg_(evidence_cfg) {
    std::vector<Alert> anchors;
    if (window) {
        window_ = *window;
        if (!snapshot_.alerts.empty()) anchors = select_window(snapshot_.alerts, evidence_cfg_).second;
    } else {
        auto [selected, selected_anchors] = select_window(snapshot_.alerts, evidence_cfg_);
        window_ = selected;
        anchors = std::move(selected_anchors);
    }
    for (const auto& a : anchors) anchor_alerts_.push_back({a.name, a.entity});

    // Focus set for event filtering: alerting entities plus their 1-hop
    // topology neighborhood.
    std::set<EntityId> focus;
    for (const auto& a : snapshot_.alerts) {
        if (!window_.overlaps(a.first_seen, a.last_seen)) continue;
        focus.insert(a.entity);
        if (snapshot_.topology.contains(a.entity)) {
            for (const auto& n : snapshot_.topology.neighbors(a.entity, Direction::Both)) {
                focus.insert(n);
            }
        }
    }
    const auto events = filter_events(snapshot_.events, window_, focus,
                                      evidence_cfg_.max_events_per_page, evidence_cfg_);
    const auto changes = filter_spec_changes(snapshot_.spec_changes, window_,
                                             evidence_cfg_.max_spec_changes_per_page, evidence_cfg_);
    for (auto& ev : bootstrap(snapshot_, window_, events, changes)) queue_.push_back(std::move(ev));
    budget_remaining_ = budget_.max_hops;
}

bool Investigation::seen(const EntityId& entity) const {
    auto it = runtime_.find(entity);
    return it != runtime_.end() && it->second.visits > 0;
}

void Investigation::enqueue_activate(const EntityId& entity, ActivateReason reason) {
    // Only entities the contract can serve: topology members or explanatory-
    // graph participants.
    if (!snapshot_.topology.contains(entity) && !explanatory_.belief(entity) &&
        explanatory_.edge_endpoints_of(entity).empty()) {
        return;
    }
    for (auto it = queue_.begin(); it != queue_.end(); ++it) {
        auto* a = std::get_if<ActivateEvent>(&*it);
        if (!a || !(a->entity == entity)) continue;
        // Coalesce to the stronger reason. A reactivation must run after the
        // broadcast messages enqueued with it, so it moves the pending event
        // to the tail; discovery/proposal coalescing keeps its position.
        const ActivateReason upgraded =
            reason_strength(reason) < reason_strength(a->reason) ? reason : a->reason;
        if (reason == ActivateReason::Reactivated) {
            queue_.erase(it);
            queue_.push_back(ActivateEvent{entity, upgraded, -1});
        } else {
            a->reason = upgraded;
        }
        return;
    }
    queue_.push_back(ActivateEvent{entity, reason, -1});
}

std::vector<EntityId> Investigation::broadcast_neighbors(const EntityId& entity) const {
    std::set<EntityId> out;
    if (snapshot_.topology.contains(entity)) {
        for (const auto& n : snapshot_.topology.neighbors(entity, Direction::Both)) out.insert(n);
    }
    for (const auto& n : explanatory_.edge_endpoints_of(entity)) out.insert(n);
    out.erase(entity);
    return {out.begin(), out.end()};
}

StepOutcome Investigation::step(AbductivePolicy& policy) {
    if (queue_.empty()) return {StepOutcome::Kind::QueueEmpty, StepOutcome::SkipReason::None};
    InvestigationEvent ev = std::move(queue_.front());
    queue_.pop_front();
    ++step_count_;

    if (auto* activate = std::get_if<ActivateEvent>(&ev)) {
        return process_activate(*activate, policy);
    }
    if (auto* delivery = std::get_if<MessageDeliveryEvent>(&ev)) {
        inboxes_[delivery->message.to].push_back(delivery->message);
        return {StepOutcome::Kind::Progressed, StepOutcome::SkipReason::None};
    }

    // BeliefChanged: broadcast the current belief to the neighbor union,
    // then re-activate every non-frozen neighbor. No budget cost.
    const auto& changed = std::get<BeliefChangedEvent>(ev);
    const auto belief = explanatory_.belief(changed.entity);
    if (belief) {
        const auto neighbors = broadcast_neighbors(changed.entity);
        for (const auto& n : neighbors) {
            queue_.push_back(MessageDeliveryEvent{Message{changed.entity, n, *belief, step_count_}});
        }
        for (const auto& n : neighbors) {
            auto it = runtime_.find(n);
            if (it == runtime_.end() || !it->second.frozen_defer) {
                enqueue_activate(n, ActivateReason::Reactivated);
            }
        }
    }
    return {StepOutcome::Kind::Progressed, StepOutcome::SkipReason::None};
}

StepOutcome Investigation::process_activate(ActivateEvent ev, AbductivePolicy& policy) {
    NodeRuntimeState& st = runtime_[ev.entity];
    if (st.frozen_defer) {
        return {StepOutcome::Kind::Skipped, StepOutcome::SkipReason::FrozenDefer};
    }
    if (st.visits >= budget_.k_max) {
        return {StepOutcome::Kind::Skipped, StepOutcome::SkipReason::MaxVisits};
    }
    if (st.visits > 0 && (eval_count_ - st.last_visit_step) < budget_.k_cool) {
        // Cooldown defers rather than drops; a deferral with no evaluation
        // progress since the previous one is waived so the tail of the queue
        // cannot spin forever.
        if (ev.deferred_at_eval != eval_count_) {
            ev.deferred_at_eval = eval_count_;
            queue_.push_back(ev);
            return {StepOutcome::Kind::Skipped, StepOutcome::SkipReason::Cooldown};
        }
    }

    std::vector<Message> inbox;
    if (auto it = inboxes_.find(ev.entity); it != inboxes_.end()) {
        inbox = std::move(it->second);
        inboxes_.erase(it);
    }

    const int visit_index = st.visits + 1;
    PolicyOutput out;
    bool failed = false;
    std::string failure_reason;
    try {
        ContextPacket packet =
            get_context(snapshot_, explanatory_, ev.entity, window_, std::move(inbox), 1,
                        evidence_cfg_.deps_per_page, visit_index, evidence_cfg_);
        const std::int64_t packet_budget = std::max<std::int64_t>(4096, budget_.packet_budget_bytes);
        if (packet.size_bytes > packet_budget) {
            auto chunks = chunk_packet(packet, packet_budget, evidence_cfg_.chunk_overlap_fraction);
            out = map_reduce_evaluate(chunks, policy);
        } else {
            out = policy.evaluate(packet);
        }
        validate_policy_output(out, ev.entity);
    } catch (const Error& e) {
        failed = true;
        failure_reason = e.what();
    }

    ++st.visits;
    ++eval_count_;
    st.last_visit_step = eval_count_;

    if (failed) {
        out = PolicyOutput{};
        out.label = Label::Defer;
        out.reasoning = "policy failure: " + failure_reason;
    }

    const auto old_belief = explanatory_.belief(ev.entity);
    const bool flip = !old_belief || old_belief->label != out.label;
    if (flip) ++st.flips;

    Belief updated;
    updated.label = out.label;
    updated.evidence_summary = out.reasoning;
    updated.updated_at = step_count_;
    if (st.flips >= budget_.k_thresh) {
        // Damping: force the absorbing Defer state.
        updated.label = Label::Defer;
        updated.evidence_summary = kDampedNote;
        st.frozen_defer = true;
    }
    explanatory_.set_belief(ev.entity, updated);

    LedgerEntry entry;
    entry.step = step_count_;
    entry.entity = ev.entity;
    entry.belief = updated;
    entry.trigger = ev;
    entry.policy_output_digest = failed ? "policy-failure"
                                        : (st.frozen_defer ? "damped" : policy_output_digest(out));

    for (const auto& claim : out.propagation_claims) {
        explanatory_.upsert_edge(claim);
        entry.claims.push_back(claim);
        if (!(claim.source == ev.entity) && !seen(claim.source)) {
            auto it = runtime_.find(claim.source);
            if (it == runtime_.end() || !it->second.frozen_defer) {
                enqueue_activate(claim.source, ActivateReason::Discovered);
            }
        }
    }
    ledger_.push_back(std::move(entry));

    if (belief_revised(old_belief, updated)) {
        queue_.push_back(BeliefChangedEvent{ev.entity});
    }
    for (const auto& candidate : out.next_candidates) {
        if (!seen(candidate) && !(candidate == ev.entity)) {
            enqueue_activate(candidate, ActivateReason::Proposed);
        }
    }
    --budget_remaining_;
    return {StepOutcome::Kind::Progressed, StepOutcome::SkipReason::None};
}

InvestigationResult Investigation::run(AbductivePolicy& policy) {
    while (budget_remaining_ > 0) {
        if (step(policy).kind == StepOutcome::Kind::QueueEmpty) break;
    }

    InvestigationResult result;
    result.explanatory_graph = explanatory_;
    result.terminated_by = queue_.empty() ? Termination::Quiescence : Termination::BudgetExhausted;
    result.frontier = compute_frontier(explanatory_);
    result.ledger = ledger_;
    result.budget_remaining = budget_remaining_;
    result.anchor_alerts = anchor_alerts_;
    if (result.frontier.empty() && !explanatory_.nodes().empty()) {
        result.fallback_ranking = fallback_ranking(explanatory_, ledger_, snapshot_, window_);
    }
    return result;
}

std::vector<std::pair<EntityId, double>> fallback_ranking(const ExplanatoryGraph& es,
                                                          const std::vector<LedgerEntry>& ledger,
                                                          const Snapshot& snapshot,
                                                          const TimeWindow& window,
                                                          const FallbackWeights& weights) {
    (void)ledger; // evidence features come from the snapshot; the ledger is
                  // already reflected in the graph's beliefs
    if (es.nodes().empty()) {
        raise(ErrorKind::EmptyInvestigation, "no nodes were investigated");
    }
    std::vector<std::pair<EntityId, double>> ranked;
    for (const auto& [entity, belief] : es.nodes()) {
        if (belief.label == Label::Healthy) continue;
        double score = 0.0;
        for (const auto& c : snapshot.spec_changes) {
            if (c.entity == entity && c.at <= window.end && c.at >= window.start - 900) {
                score += weights.spec_change;
                break;
            }
        }
        for (const auto& e : snapshot.events) {
            if (e.entity == entity && window.contains(e.at) &&
                seed_failure_reasons().count(e.reason)) {
                score += weights.failure_event;
                break;
            }
        }
        for (const auto& edge : es.edges()) {
            if (edge.source == entity) score += weights.outgoing_edge;
        }
        if (belief.label == Label::Defer) score += weights.defer_penalty;
        ranked.emplace_back(entity, score);
    }
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    return ranked;
}

Diagnosis finalize(const InvestigationResult& result) {
    Diagnosis diag;
    const auto& es = result.explanatory_graph;

    std::optional<EntityId> fallback_top;
    if (result.frontier.empty() && !result.fallback_ranking.empty()) {
        fallback_top = result.fallback_ranking.front().first;
        diag.uncertain = true;
    }

    for (const auto& [entity, belief] : es.nodes()) {
        DiagnosisEntity de;
        de.name = entity.canonical();
        de.contributing_factor =
            result.frontier.count(entity) > 0 || (fallback_top && *fallback_top == entity);
        de.reasoning = belief.evidence_summary;
        de.evidence = belief.evidence_summary;
        diag.entities.push_back(std::move(de));
    }
    diag.propagations = es.edges();

    for (const auto& anchor : result.anchor_alerts) {
        AlertExplanation ae;
        ae.alert = anchor.name;
        std::optional<EntityId> origin;
        if (result.frontier.count(anchor.entity)) {
            origin = anchor.entity;
        } else {
            for (const auto& f : result.frontier) {
                if (reaches(es, f, anchor.entity)) {
                    origin = f;
                    break;
                }
            }
        }
        if (origin) {
            ae.explained = true;
            ae.explanation = "caused by " + origin->canonical() +
                             " via the explanatory-graph propagation chain";
        } else {
            ae.explained = false;
            ae.explanation = "no causal path from an identified origin reaches " +
                             anchor.entity.canonical();
        }
        diag.alerts_explained.push_back(std::move(ae));
    }
    return diag;
}

Checkpoint Investigation::checkpoint() const {
    json nodes = json::array();
    for (const auto& [entity, belief] : explanatory_.nodes()) {
        nodes.push_back({{"entity", entity.canonical()}, {"belief", eog::to_json(belief)}});
    }
    json edges = json::array();
    for (const auto& e : explanatory_.edges()) edges.push_back(eog::to_json(e));

    json runtime = json::array();
    for (const auto& [entity, st] : runtime_) {
        runtime.push_back({{"entity", entity.canonical()},
                           {"visits", st.visits},
                           {"flips", st.flips},
                           {"last_visit_step", st.last_visit_step},
                           {"frozen_defer", st.frozen_defer}});
    }
    json queue = json::array();
    for (const auto& ev : queue_) queue.push_back(eog::to_json(ev));
    json inboxes = json::array();
    for (const auto& [entity, messages] : inboxes_) {
        json msgs = json::array();
        for (const auto& m : messages) msgs.push_back(eog::to_json(m));
        inboxes.push_back({{"entity", entity.canonical()}, {"messages", msgs}});
    }
    json ledger = json::array();
    for (const auto& e : ledger_) ledger.push_back(eog::to_json(e));
    json anchors = json::array();
    for (const auto& a : anchor_alerts_) {
        anchors.push_back({{"name", a.name}, {"entity", a.entity.canonical()}});
    }

    Checkpoint cp;
    cp.payload = {{"eog_checkpoint_version", 1},
                  {"window", eog::to_json(window_)},
                  {"budget", to_json(budget_)},
                  {"evidence_config", to_json(evidence_cfg_)},
                  {"budget_remaining", budget_remaining_},
                  {"step_count", step_count_},
                  {"eval_count", eval_count_},
                  {"explanatory_graph", {{"nodes", nodes}, {"edges", edges}}},
                  {"runtime", runtime},
                  {"queue", queue},
                  {"inboxes", inboxes},
                  {"ledger", ledger},
                  {"anchor_alerts", anchors}};
    return cp;
}

Investigation Investigation::restore(Snapshot snapshot, const Checkpoint& cp) {
    try {
        const json& j = cp.payload;
        if (!j.is_object() || j.value("eog_checkpoint_version", 0) != 1) {
            raise(ErrorKind::CorruptCheckpoint, "missing or unsupported eog_checkpoint_version");
        }
        Investigation inv;
        inv.snapshot_ = std::move(snapshot);
        inv.window_ = window_from_json(j.at("window"));
        inv.budget_ = budget_from_json(j.at("budget"));
        inv.evidence_cfg_ = evidence_config_from_json(j.at("evidence_config"));
        inv.budget_remaining_ = j.at("budget_remaining").get<int>();
        inv.step_count_ = j.at("step_count").get<std::int64_t>();
        inv.eval_count_ = j.at("eval_count").get<std::int64_t>();
        for (const auto& n : j.at("explanatory_graph").at("nodes")) {
            inv.explanatory_.set_belief(parse_entity_id(n.at("entity").get<std::string>()),
                                        belief_from_json(n.at("belief")));
        }
        for (const auto& e : j.at("explanatory_graph").at("edges")) {
            inv.explanatory_.upsert_edge(causal_edge_from_json(e));
        }
        for (const auto& r : j.at("runtime")) {
            NodeRuntimeState st;
            st.visits = r.at("visits").get<int>();
            st.flips = r.at("flips").get<int>();
            st.last_visit_step = r.at("last_visit_step").get<std::int64_t>();
            st.frozen_defer = r.at("frozen_defer").get<bool>();
            inv.runtime_[parse_entity_id(r.at("entity").get<std::string>())] = st;
        }
        for (const auto& ev : j.at("queue")) {
            inv.queue_.push_back(investigation_event_from_json(ev));
        }
        for (const auto& box : j.at("inboxes")) {
            auto& messages = inv.inboxes_[parse_entity_id(box.at("entity").get<std::string>())];
            for (const auto& m : box.at("messages")) messages.push_back(message_from_json(m));
        }
        for (const auto& e : j.at("ledger")) inv.ledger_.push_back(ledger_entry_from_json(e));
        for (const auto& a : j.at("anchor_alerts")) {
            inv.anchor_alerts_.push_back(
                {a.at("name").get<std::string>(), parse_entity_id(a.at("entity").get<std::string>())});
        }
        return inv;
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::CorruptCheckpoint) throw;
        raise(ErrorKind::CorruptCheckpoint, e.what());
    } catch (const json::exception& e) {
        raise(ErrorKind::CorruptCheckpoint, e.what());
    }
}

InvestigationResult run_investigation(Snapshot snapshot, std::optional<TimeWindow> window,
                                      AbductivePolicy& policy, BudgetConfig budget,
                                      EvidenceConfig evidence_cfg) {
    Investigation inv(std::move(snapshot), window, budget, evidence_cfg);
    return inv.run(policy);
}

json to_json(const InvestigationResult& r) {
    json nodes = json::array();
    for (const auto& [entity, belief] : r.explanatory_graph.nodes()) {
        nodes.push_back({{"entity", entity.canonical()}, {"belief", to_json(belief)}});
    }
    json edges = json::array();
    for (const auto& e : r.explanatory_graph.edges()) edges.push_back(to_json(e));
    json frontier = json::array();
    for (const auto& f : r.frontier) frontier.push_back(f.canonical());
    json fallback = json::array();
    for (const auto& [entity, score] : r.fallback_ranking) {
        fallback.push_back({{"entity", entity.canonical()}, {"score", score}});
    }
    json ledger = json::array();
    for (const auto& e : r.ledger) ledger.push_back(to_json(e));
    json anchors = json::array();
    for (const auto& a : r.anchor_alerts) {
        anchors.push_back({{"name", a.name}, {"entity", a.entity.canonical()}});
    }
    return {{"explanatory_graph", {{"nodes", nodes}, {"edges", edges}}},
            {"frontier", frontier},
            {"fallback_ranking", fallback},
            {"ledger", ledger},
            {"terminated_by", to_string(r.terminated_by)},
            {"budget_remaining", r.budget_remaining},
            {"anchor_alerts", anchors}};
}

std::string ledger_to_jsonl(const std::vector<LedgerEntry>& ledger, const BudgetConfig& budget) {
    std::ostringstream out;
    out << json{{"eog_ledger_version", 1}, {"k_thresh", budget.k_thresh}}.dump() << "\n";
    for (const auto& e : ledger) out << to_json(e).dump() << "\n";
    return out.str();
}

std::pair<std::vector<LedgerEntry>, BudgetConfig> ledger_from_jsonl(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::vector<LedgerEntry> entries;
    BudgetConfig budget;
    bool have_header = false;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            raise(ErrorKind::ParseError, "ledger line " + std::to_string(line_no) + ": " + e.what());
        }
        if (!have_header) {
            if (j.value("eog_ledger_version", 0) != 1) {
                raise(ErrorKind::ParseError, "ledger header missing eog_ledger_version 1");
            }
            budget.k_thresh = j.value("k_thresh", budget.k_thresh);
            have_header = true;
            continue;
        }
        try {
            entries.push_back(ledger_entry_from_json(j));
        } catch (const json::exception& e) {
            raise(ErrorKind::ParseError, "ledger line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    if (!have_header) raise(ErrorKind::ParseError, "empty ledger: missing header line");
    return {entries, budget};
}

} // namespace eog
