#include "eog/controller.hpp"
#include "eog/error.hpp"
#include "eog/scenario.hpp"
#include "eog/schema.hpp"
#include "eog/snapshot_io.hpp"

#include <doctest.h>

#include "oracles.hpp"

#include <random>

using namespace eog;

namespace {

EntityId eid(const std::string& name, const std::string& kind = "Service") {
    return {"otel-demo", kind, name};
}

Timestamp ts(const std::string& s) { return parse_rfc3339(s); }

// First pending Activate entity, if any.
std::vector<EntityId> pending_activations(const Investigation& inv) {
    std::vector<EntityId> out;
    for (const auto& ev : inv.pending()) {
        if (const auto* a = std::get_if<ActivateEvent>(&ev)) out.push_back(a->entity);
    }
    return out;
}

} // namespace

TEST_SUITE("controller") {

TEST_CASE("bootstrap seeds a lone alerting entity") {
    Snapshot snapshot;
    snapshot.topology.add_node(eid("s2"));
    snapshot.alerts.push_back({"err", eid("s2"), Severity::Critical, Signal::Errors,
                               ts("2026-01-05T10:00:00Z"), ts("2026-01-05T10:20:00Z")});
    const auto window = make_window(ts("2026-01-05T09:55:00Z"), ts("2026-01-05T10:20:00Z"));
    const auto seeds = bootstrap(snapshot, window, {}, {});
    REQUIRE(seeds.size() == 1);
    const auto& activate = std::get<ActivateEvent>(seeds.front());
    CHECK(activate.entity == eid("s2"));
    CHECK(activate.reason == ActivateReason::Seed);
}

TEST_CASE("bootstrap orders the config-change suspect before the alerting service") {
    Snapshot snapshot;
    snapshot.topology.add_edge(eid("frontend"), eid("flagd"), EdgeKind::Dependency);
    snapshot.topology.add_edge(eid("flagd"), eid("flagd-config", "ConfigMap"),
                               EdgeKind::Infrastructure);
    snapshot.alerts.push_back({"err", eid("frontend"), Severity::Critical, Signal::Errors,
                               ts("2026-01-05T10:00:00Z"), ts("2026-01-05T10:20:00Z")});
    const SpecChange change{eid("flagd-config", "ConfigMap"), ts("2026-01-05T09:58:00Z"),
                            "flag flipped", {"data"}};
    const auto window = make_window(ts("2026-01-05T09:55:00Z"), ts("2026-01-05T10:20:00Z"));
    const auto seeds = bootstrap(snapshot, window, {}, {change});
    REQUIRE(seeds.size() == 2);
    CHECK(std::get<ActivateEvent>(seeds[0]).entity == eid("flagd-config", "ConfigMap"));
    CHECK(std::get<ActivateEvent>(seeds[1]).entity == eid("frontend"));
}

TEST_CASE("bootstrap ordering equals an independent tier sort on a mixed fixture") {
    Snapshot snapshot;
    const auto window = make_window(ts("2026-01-05T09:55:00Z"), ts("2026-01-05T10:20:00Z"));
    // Ten entities: a1 (tier 1: change then alert), f1/f2 (tier 2: failure +
    // alert), c1/c2 (tier 3: changed, path to alerting), p1/p2 (tier 4), plus
    // unrelated x1/x2/x3.
    for (const auto& name :
         {"a1", "f1", "f2", "c1", "c2", "p1", "p2", "x1", "x2", "x3"}) {
        snapshot.topology.add_node(eid(name));
    }
    snapshot.topology.add_edge(eid("c1"), eid("p1"), EdgeKind::Dependency);
    snapshot.topology.add_edge(eid("p2"), eid("c2"), EdgeKind::Dependency);
    auto alert = [&](const char* name, const char* t0) {
        snapshot.alerts.push_back({std::string(name) + "-alert", eid(name), Severity::Critical,
                                   Signal::Errors, ts(t0), ts("2026-01-05T10:20:00Z")});
    };
    alert("a1", "2026-01-05T10:00:00Z");
    alert("f1", "2026-01-05T10:01:00Z");
    alert("f2", "2026-01-05T10:02:00Z");
    alert("p1", "2026-01-05T10:03:00Z");
    alert("p2", "2026-01-05T10:04:00Z");

    const std::vector<SpecChange> changes = {
        {eid("a1"), ts("2026-01-05T09:58:00Z"), "change", {"f"}},
        {eid("c1"), ts("2026-01-05T09:57:00Z"), "change", {"f"}},
        {eid("c2"), ts("2026-01-05T09:56:00Z"), "change", {"f"}},
    };
    const std::vector<K8sEvent> events = {
        {eid("f1"), "OOMKilled", EventType::Warning, "oom", ts("2026-01-05T10:01:30Z")},
        {eid("f2"), "CrashLoopBackOff", EventType::Warning, "crash", ts("2026-01-05T10:02:30Z")},
        {eid("x1"), "OOMKilled", EventType::Warning, "oom, no alert", ts("2026-01-05T10:05:00Z")},
    };

    const auto seeds = bootstrap(snapshot, window, events, changes);
    std::vector<EntityId> order;
    for (const auto& ev : seeds) order.push_back(std::get<ActivateEvent>(ev).entity);

    // Oracle: tiers assembled independently, each tier sorted by entity id.
    const std::vector<EntityId> expected = {
        eid("a1"),                       // tier 1
        eid("f1"), eid("f2"),            // tier 2
        eid("c1"), eid("c2"),            // tier 3 (changed, path to alerting)
        eid("p1"), eid("p2"),            // tier 4 (alerting, unchanged)
    };
    CHECK(order == expected);
}

TEST_CASE("bootstrap with an empty snapshot raises NoCandidates") {
    Snapshot snapshot;
    snapshot.topology.add_node(eid("quiet"));
    const auto window = make_window(ts("2026-01-05T09:55:00Z"), ts("2026-01-05T10:20:00Z"));
    CHECK_THROWS_AS(bootstrap(snapshot, window, {}, {}), Error);
}

TEST_CASE("first gateway step discovers the hidden dependency") {
    const auto [snapshot, gt] = generate_flash_sale();
    BudgetConfig budget;
    Investigation inv(snapshot, std::nullopt, budget);
    OraclePolicy oracle;

    REQUIRE(pending_activations(inv) == std::vector<EntityId>{eid("gateway")});
    const auto outcome = inv.step(oracle);
    CHECK(outcome.kind == StepOutcome::Kind::Progressed);

    REQUIRE(inv.ledger().size() == 1);
    CHECK(inv.ledger().front().entity == eid("gateway"));
    CHECK(inv.ledger().front().belief.label == Label::Symptom);
    REQUIRE(inv.ledger().front().claims.size() == 1);
    CHECK(inv.ledger().front().claims.front().source == eid("processor"));
    CHECK(inv.ledger().front().claims.front().target == eid("gateway"));
    CHECK(inv.graph().has_edge(eid("processor"), eid("gateway")));

    // The unseen claim source is enqueued for discovery.
    const auto pending = pending_activations(inv);
    CHECK(std::find(pending.begin(), pending.end(), eid("processor")) != pending.end());
    CHECK(inv.budget_remaining() == budget.max_hops - 1);
}

TEST_CASE("step on an empty queue reports QueueEmpty") {
    const auto [snapshot, gt] = generate_flash_sale();
    BudgetConfig budget;
    Investigation inv(snapshot, std::nullopt, budget);
    OraclePolicy oracle;
    while (inv.step(oracle).kind != StepOutcome::Kind::QueueEmpty) {}
    CHECK(inv.step(oracle).kind == StepOutcome::Kind::QueueEmpty);
}

TEST_CASE("max-visits guard skips a node at k_max") {
    const auto [snapshot, gt] = generate_flash_sale();
    BudgetConfig budget;
    Investigation inv(snapshot, std::nullopt, budget);
    OraclePolicy oracle;
    auto result = inv.run(oracle);
    CHECK(result.terminated_by == Termination::Quiescence);
    for (const auto& [entity, st] : inv.runtime()) {
        CHECK(st.visits <= budget.k_max);
        CHECK(st.flips <= st.visits);
    }

    // Restore a finished state and force another activation of a node pinned
    // at k_max visits.
    auto cp = inv.checkpoint();
    cp.payload["queue"].push_back(
        {{"type", "activate"}, {"entity", "otel-demo/Service/gateway"}, {"reason", "reactivated"},
         {"deferred_at_eval", -1}});
    for (auto& rt : cp.payload["runtime"]) {
        if (rt["entity"] == "otel-demo/Service/gateway") rt["visits"] = budget.k_max;
    }
    auto resumed = Investigation::restore(snapshot, cp);
    const auto outcome = resumed.step(oracle);
    CHECK(outcome.kind == StepOutcome::Kind::Skipped);
    CHECK(outcome.skip_reason == StepOutcome::SkipReason::MaxVisits);
}

TEST_CASE("flash-sale run converges to the frontend with the S4 revision") {
    const auto [snapshot, gt] = generate_flash_sale();
    OraclePolicy oracle;
    BudgetConfig budget;
    const auto result = run_investigation(snapshot, std::nullopt, oracle, budget);

    CHECK(result.terminated_by == Termination::Quiescence);
    CHECK(result.frontier == std::set<EntityId>{eid("frontend")});
    CHECK(result.fallback_ranking.empty());

    // Ledger evaluation order: gateway, processor, database(Origin), then a
    // database revision Origin -> Symptom, and a frontend Origin afterwards.
    REQUIRE(result.ledger.size() >= 4);
    CHECK(result.ledger[0].entity == eid("gateway"));
    CHECK(result.ledger[0].belief.label == Label::Symptom);
    CHECK(result.ledger[1].entity == eid("processor"));
    CHECK(result.ledger[1].belief.label == Label::Symptom);
    CHECK(result.ledger[2].entity == eid("database"));
    CHECK(result.ledger[2].belief.label == Label::Origin);

    std::optional<std::size_t> revision;
    std::optional<std::size_t> database_origin;
    std::optional<std::size_t> frontend_origin;
    Label last_database = Label::Defer;
    for (std::size_t i = 0; i < result.ledger.size(); ++i) {
        const auto& entry = result.ledger[i];
        if (entry.entity == eid("database")) {
            if (entry.belief.label == Label::Origin) database_origin = i;
            if (last_database == Label::Origin && entry.belief.label == Label::Symptom) {
                revision = i;
            }
            last_database = entry.belief.label;
        }
        if (entry.entity == eid("frontend") && entry.belief.label == Label::Origin) {
            if (!frontend_origin) frontend_origin = i;
        }
    }
    REQUIRE(revision.has_value());
    REQUIRE(database_origin.has_value());
    REQUIRE(frontend_origin.has_value());
    CHECK(*database_origin < *revision);

    // Belief labels survive to the final graph.
    CHECK(result.explanatory_graph.belief(eid("database"))->label == Label::Symptom);
    CHECK(result.explanatory_graph.belief(eid("gateway"))->label == Label::Symptom);
    CHECK(result.explanatory_graph.belief(eid("frontend"))->label == Label::Origin);
}

TEST_CASE("belief-change broadcasts deliver messages to every neighbor") {
    const auto [snapshot, gt] = generate_flash_sale();
    OraclePolicy oracle;
    BudgetConfig budget;
    Investigation inv(snapshot, std::nullopt, budget);

    // Step until the first BeliefChanged is at the queue front, then verify
    // the enqueued messages cover the broadcast neighbor set.
    while (!inv.pending().empty() &&
           !std::holds_alternative<BeliefChangedEvent>(inv.pending().front())) {
        inv.step(oracle);
    }
    REQUIRE_FALSE(inv.pending().empty());
    const auto changed = std::get<BeliefChangedEvent>(inv.pending().front()).entity;
    inv.step(oracle);
    std::set<EntityId> message_targets;
    for (const auto& ev : inv.pending()) {
        if (const auto* m = std::get_if<MessageDeliveryEvent>(&ev)) {
            if (m->message.from == changed) message_targets.insert(m->message.to);
        }
    }
    // gateway broadcasts to its topology neighbors plus the discovered
    // explanatory edge endpoint.
    CHECK(changed == eid("gateway"));
    CHECK(message_targets == std::set<EntityId>{eid("frontend"), eid("gateway", "Deployment"),
                                                eid("processor")});
}

TEST_CASE("adversarial policy freezes every oscillator within the bound") {
    std::mt19937_64 seeds(2026);
    for (int trial = 0; trial < 10; ++trial) {
        ScenarioSpec spec;
        spec.seed = static_cast<std::int64_t>(seeds());
        spec.n_services = 10;
        spec.fault = static_cast<FaultKind>(trial % 4);
        spec.hidden_edge_fraction = 0.2;
        spec.cascade_depth = 2;
        auto [snapshot, gt] = generate(spec);

        AdversarialPolicy adversarial;
        BudgetConfig budget;
        budget.max_hops = 100000;
        Investigation inv(snapshot, std::nullopt, budget);
        const auto seeds_count = inv.pending().size();
        const auto result = inv.run(adversarial);

        CHECK(result.terminated_by == Termination::Quiescence);
        const auto v_s = result.explanatory_graph.nodes().size();
        const std::int64_t bound =
            static_cast<std::int64_t>(std::min(budget.k_thresh, budget.k_max)) *
                static_cast<std::int64_t>(v_s) +
            static_cast<std::int64_t>(seeds_count);
        CHECK(inv.policy_invocations() <= bound);
        for (const auto& [entity, st] : inv.runtime()) {
            if (st.flips >= budget.k_thresh) {
                CHECK(st.frozen_defer);
                CHECK(result.explanatory_graph.belief(entity)->label == Label::Defer);
            }
        }
    }
}

TEST_CASE("frozen Defer is absorbing") {
    const auto [snapshot, gt] = generate_flash_sale();
    AdversarialPolicy adversarial;
    BudgetConfig budget;
    budget.max_hops = 10000;
    Investigation inv(snapshot, std::nullopt, budget);
    std::map<EntityId, Label> frozen_labels;
    while (true) {
        if (inv.step(adversarial).kind == StepOutcome::Kind::QueueEmpty) break;
        for (const auto& [entity, st] : inv.runtime()) {
            if (!st.frozen_defer) continue;
            const auto belief = inv.graph().belief(entity);
            REQUIRE(belief.has_value());
            auto it = frozen_labels.find(entity);
            if (it == frozen_labels.end()) {
                CHECK(belief->label == Label::Defer);
                frozen_labels[entity] = belief->label;
            } else {
                CHECK(belief->label == it->second); // never changes again
            }
        }
    }
    CHECK_FALSE(frozen_labels.empty());
}

TEST_CASE("budget=1 exhausts after exactly one policy invocation") {
    const auto [snapshot, gt] = generate_flash_sale();
    OraclePolicy oracle;
    BudgetConfig budget;
    budget.max_hops = 1;
    Investigation inv(snapshot, std::nullopt, budget);
    const auto result = inv.run(oracle);
    CHECK(result.terminated_by == Termination::BudgetExhausted);
    CHECK(inv.policy_invocations() == 1);
    CHECK(result.budget_remaining == 0);
    CHECK(result.ledger.size() == 1);
}

TEST_CASE("budget conservation across a full run") {
    const auto [snapshot, gt] = generate_flash_sale();
    OraclePolicy oracle;
    BudgetConfig budget;
    Investigation inv(snapshot, std::nullopt, budget);
    const auto result = inv.run(oracle);
    CHECK(result.budget_remaining == budget.max_hops - inv.policy_invocations());
}

TEST_CASE("fallback ranking follows the declared weights") {
    Snapshot snapshot;
    snapshot.topology.add_node(eid("lonely"));
    const auto window = make_window(ts("2026-01-05T10:00:00Z"), ts("2026-01-05T11:00:00Z"));

    SUBCASE("single defer node with a spec change scores 1.5") {
        snapshot.spec_changes.push_back(
            {eid("lonely"), ts("2026-01-05T10:05:00Z"), "tweak", {"f"}});
        ExplanatoryGraph es;
        es.set_belief(eid("lonely"), {Label::Defer, "", 1});
        const auto ranked = fallback_ranking(es, {}, snapshot, window);
        REQUIRE(ranked.size() == 1);
        CHECK(ranked.front().second == doctest::Approx(1.5));
    }

    SUBCASE("outgoing claims dominate between two symptoms") {
        ExplanatoryGraph es;
        es.set_belief(eid("rich"), {Label::Symptom, "e", 1});
        es.set_belief(eid("poor"), {Label::Symptom, "e", 1});
        es.upsert_edge({eid("rich"), eid("a"), "c", "e"});
        es.upsert_edge({eid("rich"), eid("b"), "c", "e"});
        const auto ranked = fallback_ranking(es, {}, snapshot, window);
        REQUIRE(ranked.size() == 2);
        CHECK(ranked[0].first == eid("rich"));
        CHECK(ranked[0].second == doctest::Approx(1.0));
        CHECK(ranked[1].second == doctest::Approx(0.0));
    }

    SUBCASE("six-node fixture equals independent score recomputation") {
        ExplanatoryGraph es;
        std::mt19937_64 rng(5);
        for (int i = 0; i < 6; ++i) {
            const auto id = eid("n" + std::to_string(i));
            es.set_belief(id, {static_cast<Label>(1 + rng() % 3), "e", 1});
            if (rng() % 2) {
                snapshot.spec_changes.push_back(
                    {id, ts("2026-01-05T10:05:00Z"), "change", {"f"}});
            }
            if (rng() % 2) {
                snapshot.events.push_back({id, "OOMKilled", EventType::Warning, "oom",
                                           ts("2026-01-05T10:06:00Z")});
            }
        }
        es.upsert_edge({eid("n0"), eid("n1"), "c", "e"});
        es.upsert_edge({eid("n0"), eid("n2"), "c", "e"});
        es.upsert_edge({eid("n3"), eid("n0"), "c", "e"});
        const auto ranked = fallback_ranking(es, {}, snapshot, window);
        for (const auto& [entity, score] : ranked) {
            CHECK(score == doctest::Approx(oracle::fallback_score(es, snapshot, window, entity)));
        }
        for (std::size_t i = 1; i < ranked.size(); ++i) {
            CHECK(ranked[i - 1].second >= ranked[i].second);
        }
    }

    SUBCASE("empty graph raises EmptyInvestigation") {
        ExplanatoryGraph es;
        CHECK_THROWS_AS(fallback_ranking(es, {}, snapshot, window), Error);
    }
}

TEST_CASE("finalize renders the flash-sale diagnosis") {
    const auto [snapshot, gt] = generate_flash_sale();
    OraclePolicy oracle;
    BudgetConfig budget;
    const auto result = run_investigation(snapshot, std::nullopt, oracle, budget);
    const auto diag = finalize(result);

    CHECK_FALSE(diag.uncertain);
    std::map<std::string, bool> contributing;
    for (const auto& e : diag.entities) contributing[e.name] = e.contributing_factor;
    CHECK(contributing.at("otel-demo/Service/frontend"));
    CHECK_FALSE(contributing.at("otel-demo/Service/gateway"));
    CHECK_FALSE(contributing.at("otel-demo/Service/processor"));
    CHECK_FALSE(contributing.at("otel-demo/Service/database"));

    // Propagations include the full traffic chain frontend -> ... -> database.
    std::set<std::pair<std::string, std::string>> edges;
    for (const auto& p : diag.propagations) {
        edges.insert({p.source.canonical(), p.target.canonical()});
    }
    CHECK(edges.count({"otel-demo/Service/frontend", "otel-demo/Service/gateway"}));
    CHECK(edges.count({"otel-demo/Service/gateway", "otel-demo/Service/processor"}));
    CHECK(edges.count({"otel-demo/Service/processor", "otel-demo/Service/database"}));

    REQUIRE(diag.alerts_explained.size() == 1);
    CHECK(diag.alerts_explained.front().alert == "GatewayHighErrorRate");
    CHECK(diag.alerts_explained.front().explained);

    // Every entity carries its belief summary as reasoning and evidence.
    for (const auto& e : diag.entities) {
        CHECK(e.reasoning == e.evidence);
    }
}

TEST_CASE("finalize flags the fallback candidate as uncertain") {
    InvestigationResult result;
    result.explanatory_graph.set_belief(eid("maybe"), {Label::Defer, "", 1});
    result.fallback_ranking = {{eid("maybe"), 1.5}};
    result.terminated_by = Termination::Quiescence;
    const auto diag = finalize(result);
    CHECK(diag.uncertain);
    REQUIRE(diag.entities.size() == 1);
    CHECK(diag.entities.front().contributing_factor);
    CHECK(diag.alerts_explained.empty()); // no anchor alerts recorded
}

TEST_CASE("ledger steps are strictly increasing and jsonl round-trips") {
    const auto [snapshot, gt] = generate_flash_sale();
    OraclePolicy oracle;
    BudgetConfig budget;
    const auto result = run_investigation(snapshot, std::nullopt, oracle, budget);

    std::int64_t prev = -1;
    for (const auto& entry : result.ledger) {
        CHECK(entry.step > prev);
        prev = entry.step;
    }
    const auto text = ledger_to_jsonl(result.ledger, budget);
    const auto [entries, parsed_budget] = ledger_from_jsonl(text);
    CHECK(parsed_budget.k_thresh == budget.k_thresh);
    REQUIRE(entries.size() == result.ledger.size());
    for (std::size_t i = 0; i < entries.size(); ++i) {
        CHECK(to_json(entries[i]).dump() == to_json(result.ledger[i]).dump());
    }
    CHECK_THROWS_AS(ledger_from_jsonl(""), Error);
    CHECK_THROWS_AS(ledger_from_jsonl("{\"not\":\"a header\"}\n"), Error);
}

TEST_CASE("replaying ledger entries rebuilds the explanatory graph") {
    const auto [snapshot, gt] = generate_flash_sale();
    OraclePolicy oracle;
    BudgetConfig budget;
    const auto result = run_investigation(snapshot, std::nullopt, oracle, budget);

    ExplanatoryGraph rebuilt;
    for (const auto& entry : result.ledger) {
        rebuilt.set_belief(entry.entity, entry.belief);
        for (const auto& claim : entry.claims) rebuilt.upsert_edge(claim);
    }
    CHECK(rebuilt.nodes() == result.explanatory_graph.nodes());
    CHECK(rebuilt.edges() == result.explanatory_graph.edges());
}

TEST_CASE("every label change is followed by a pending BeliefChanged broadcast") {
    const auto [snapshot, gt] = generate_flash_sale();
    OraclePolicy oracle;
    BudgetConfig budget;
    Investigation inv(snapshot, std::nullopt, budget);

    std::map<EntityId, Label> last_label;
    std::size_t ledger_before = 0;
    while (true) {
        if (inv.step(oracle).kind == StepOutcome::Kind::QueueEmpty) break;
        if (inv.ledger().size() == ledger_before) continue;
        ledger_before = inv.ledger().size();
        const auto& entry = inv.ledger().back();
        auto it = last_label.find(entry.entity);
        const bool label_changed = it == last_label.end() || it->second != entry.belief.label;
        last_label[entry.entity] = entry.belief.label;
        if (label_changed) {
            bool broadcast_pending = false;
            for (const auto& ev : inv.pending()) {
                if (const auto* b = std::get_if<BeliefChangedEvent>(&ev)) {
                    if (b->entity == entry.entity) broadcast_pending = true;
                }
            }
            CHECK_MESSAGE(broadcast_pending, "no broadcast queued for ",
                          entry.entity.canonical());
        }
    }
}

TEST_CASE("checkpoints and ledger entries validate against the bundled schemas") {
    const auto [snapshot, gt] = generate_flash_sale();
    OraclePolicy oracle;
    BudgetConfig budget;
    Investigation inv(snapshot, std::nullopt, budget);
    for (int i = 0; i < 9; ++i) inv.step(oracle);

    const auto cp = inv.checkpoint();
    CHECK(validate_against_schema(cp.payload, checkpoint_schema()).empty());
    for (const auto& entry : inv.ledger()) {
        CHECK(validate_against_schema(to_json(entry), ledger_entry_schema()).empty());
    }
}

TEST_CASE("checkpoint at step zero restores the bootstrap state") {
    const auto [snapshot, gt] = generate_flash_sale();
    BudgetConfig budget;
    Investigation inv(snapshot, std::nullopt, budget);
    const auto cp = inv.checkpoint();
    auto restored = Investigation::restore(snapshot, cp);
    CHECK(restored.pending().size() == inv.pending().size());
    CHECK(restored.budget_remaining() == inv.budget_remaining());
    CHECK(restored.checkpoint().payload.dump() == cp.payload.dump());
}

TEST_CASE("checkpoint/restore mid-run reproduces the uninterrupted ledger") {
    const auto [snapshot, gt] = generate_flash_sale();
    OraclePolicy oracle;
    BudgetConfig budget;

    Investigation uninterrupted(snapshot, std::nullopt, budget);
    const auto expected = uninterrupted.run(oracle);
    const auto expected_json = to_json(expected).dump();

    for (int pause_after : {3, 7, 12}) {
        Investigation first(snapshot, std::nullopt, budget);
        for (int i = 0; i < pause_after; ++i) first.step(oracle);
        const auto cp = first.checkpoint();
        auto resumed = Investigation::restore(snapshot, cp);
        const auto result = resumed.run(oracle);
        CHECK(to_json(result).dump() == expected_json);
    }
}

TEST_CASE("corrupt checkpoints are rejected") {
    const auto [snapshot, gt] = generate_flash_sale();
    BudgetConfig budget;
    Investigation inv(snapshot, std::nullopt, budget);
    auto cp = inv.checkpoint();

    Checkpoint wrong_version = cp;
    wrong_version.payload["eog_checkpoint_version"] = 99;
    CHECK_THROWS_AS(Investigation::restore(snapshot, wrong_version), Error);

    Checkpoint truncated;
    truncated.payload = {{"eog_checkpoint_version", 1}};
    try {
        Investigation::restore(snapshot, truncated);
        FAIL("expected corruption error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::CorruptCheckpoint);
    }
}

TEST_CASE("runs are deterministic: byte-identical result serialization") {
    const auto [snapshot, gt] = generate_flash_sale();
    OraclePolicy oracle;
    BudgetConfig budget;
    const auto a = to_json(run_investigation(snapshot, std::nullopt, oracle, budget)).dump();
    const auto b = to_json(run_investigation(snapshot, std::nullopt, oracle, budget)).dump();
    CHECK(a == b);
}

TEST_CASE("policy failure defers the node and the run continues") {
    class FailsOnce final : public AbductivePolicy {
    public:
        PolicyOutput evaluate(const ContextPacket& packet) override {
            if (packet.entity == EntityId{"otel-demo", "Service", "gateway"} && !failed_) {
                failed_ = true;
                raise(ErrorKind::PolicyFailure, "synthetic failure");
            }
            return inner_.evaluate(packet);
        }
        std::string name() const override { return "fails-once"; }

    private:
        OraclePolicy inner_;
        bool failed_ = false;
    };

    const auto [snapshot, gt] = generate_flash_sale();
    FailsOnce policy;
    BudgetConfig budget;
    const auto result = run_investigation(snapshot, std::nullopt, policy, budget);
    CHECK(result.terminated_by == Termination::Quiescence);
    REQUIRE(!result.ledger.empty());
    CHECK(result.ledger.front().entity == eid("gateway"));
    CHECK(result.ledger.front().belief.label == Label::Defer);
    CHECK(result.ledger.front().policy_output_digest == "policy-failure");
}

} // TEST_SUITE
