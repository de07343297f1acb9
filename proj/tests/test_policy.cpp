#include "eog/error.hpp"
#include "eog/external_policy.hpp"
#include "eog/policy.hpp"
#include "eog/scenario.hpp"
#include "eog/schema.hpp"
#include "eog/snapshot_io.hpp"

#include <doctest.h>
#include <httplib.h>

#include <atomic>
#include <thread>

using namespace eog;

namespace {

EntityId eid(const std::string& name, const std::string& kind = "Service") {
    return {"otel-demo", kind, name};
}

Timestamp ts(const std::string& s) { return parse_rfc3339(s); }

ContextPacket base_packet(const EntityId& entity, int visit = 1) {
    ContextPacket p;
    p.entity = entity;
    p.window = make_window(ts("2026-03-14T08:55:00Z"), ts("2026-03-14T09:15:00Z"));
    p.visit_index = visit;
    return p;
}

PacketMetric elevated_inbound(const EntityId& on, const EntityId& from, double base, double pct) {
    PacketMetric m;
    m.entity = on;
    m.metric = "inbound_rate_by_source:" + from.canonical();
    m.unit = "req/s";
    m.baseline = base;
    for (int i = 0; i < 10; ++i) {
        m.points.push_back({ts("2026-03-14T09:00:00Z") + i * 60, base * (1.0 + pct / 100.0)});
    }
    return m;
}

LogChunk oom_log(const EntityId& on) {
    return {on, {{ts("2026-03-14T09:03:00Z"), "error", "OutOfMemoryError: allocation failed"}}};
}

} // namespace

TEST_SUITE("policy") {

TEST_CASE("oracle: OOM with no visible traffic is an origin (first visit)") {
    auto packet = base_packet(eid("database"));
    packet.local_logs.push_back(oom_log(eid("database")));
    OraclePolicy oracle;
    const auto out = oracle.evaluate(packet);
    CHECK(out.label == Label::Origin);
    CHECK(out.propagation_claims.empty());
    CHECK_FALSE(out.evidence_citations.empty());
}

TEST_CASE("oracle: OOM under elevated inbound revises to symptom of the source") {
    auto packet = base_packet(eid("database"), 2);
    packet.local_logs.push_back(oom_log(eid("database")));
    packet.local_metrics.push_back(elevated_inbound(eid("database"), eid("processor"), 100.0, 30));
    OraclePolicy oracle;
    const auto out = oracle.evaluate(packet);
    CHECK(out.label == Label::Symptom);
    REQUIRE(out.propagation_claims.size() == 1);
    CHECK(out.propagation_claims.front().source == eid("processor"));
    CHECK(out.propagation_claims.front().target == eid("database"));
    REQUIRE(out.next_candidates.size() == 1);
    CHECK(out.next_candidates.front() == eid("processor"));
    CHECK(out.reasoning.find("+30%") != std::string::npos);
    CHECK(out.reasoning.find(traffic_blame_marker(eid("processor"))) != std::string::npos);
}

TEST_CASE("oracle: traffic below the threshold does not flip the OOM story") {
    auto packet = base_packet(eid("database"), 2);
    packet.local_logs.push_back(oom_log(eid("database")));
    packet.local_metrics.push_back(elevated_inbound(eid("database"), eid("processor"), 100.0, 10));
    OraclePolicy oracle;
    CHECK(oracle.evaluate(packet).label == Label::Origin);
}

TEST_CASE("oracle: error logs naming a callee claim the callee as cause") {
    auto packet = base_packet(eid("gateway"));
    packet.local_logs.push_back(
        {eid("gateway"),
         {{ts("2026-03-14T09:01:00Z"), "error",
           "HTTP 500 calling otel-demo/Service/processor failed"}}});
    OraclePolicy oracle;
    const auto out = oracle.evaluate(packet);
    CHECK(out.label == Label::Symptom);
    REQUIRE(out.propagation_claims.size() == 1);
    CHECK(out.propagation_claims.front().source == eid("processor"));
    CHECK(out.next_candidates == std::vector<EntityId>{eid("processor")});
}

TEST_CASE("oracle: a blamed callee is excluded and the blame moves upstream") {
    auto packet = base_packet(eid("processor"), 3);
    packet.local_logs.push_back(
        {eid("processor"),
         {{ts("2026-03-14T09:02:00Z"), "error",
           "timeout calling otel-demo/Service/database after 10s"}}});
    packet.local_metrics.push_back(elevated_inbound(eid("processor"), eid("gateway"), 100.0, 25));
    Message blame;
    blame.from = eid("database");
    blame.to = eid("processor");
    blame.belief = {Label::Symptom,
                    "overload; " + traffic_blame_marker(eid("processor")), 4};
    packet.inbox.push_back(blame);

    OraclePolicy oracle;
    const auto out = oracle.evaluate(packet);
    CHECK(out.label == Label::Symptom);
    REQUIRE(out.propagation_claims.size() == 1);
    CHECK(out.propagation_claims.front().source == eid("gateway"));
    CHECK(out.propagation_claims.front().target == eid("processor"));
    CHECK(out.reasoning.find(traffic_blame_marker(eid("gateway"))) != std::string::npos);
}

TEST_CASE("oracle: spec change preceding the first anomaly is an origin") {
    auto packet = base_packet(eid("gateway-config", "ConfigMap"));
    packet.local_spec_changes.push_back({packet.entity, ts("2026-03-14T08:57:00Z"),
                                         "feature flag enabled; configuration updated",
                                         {"data.featureFlag"}});
    OraclePolicy oracle;
    const auto out = oracle.evaluate(packet);
    CHECK(out.label == Label::Origin);
    CHECK(out.reasoning.find("configuration updated") != std::string::npos);
}

TEST_CASE("oracle: workload marker yields an origin; empty packet is healthy") {
    auto marked = base_packet(eid("frontend"));
    marked.local_logs.push_back({eid("frontend"),
                                 {{ts("2026-03-14T08:58:00Z"), "info",
                                   std::string(kWorkloadChangeMarker) + " detected"}}});
    OraclePolicy oracle;
    CHECK(oracle.evaluate(marked).label == Label::Origin);

    CHECK(oracle.evaluate(base_packet(eid("idle"))).label == Label::Healthy);
}

TEST_CASE("oracle: unexplained anomalies defer") {
    auto packet = base_packet(eid("flaky"));
    packet.local_events.push_back({eid("flaky"), "FailedScheduling", EventType::Warning,
                                   "0/3 nodes available", ts("2026-03-14T09:01:00Z")});
    OraclePolicy oracle;
    const auto out = oracle.evaluate(packet);
    CHECK(out.label == Label::Defer);
    CHECK(out.evidence_citations.empty());
}

TEST_CASE("oracle determinism: equal packets produce bitwise-equal outputs") {
    const auto [snapshot, gt] = generate_flash_sale();
    ExplanatoryGraph es;
    const auto [window, anchors] = select_window(snapshot.alerts);
    OraclePolicy oracle;
    for (const auto& entity : snapshot.topology.nodes()) {
        const auto packet = get_context(snapshot, es, entity, window, {}, 1, 3, 2);
        const auto a = oracle.evaluate(packet);
        const auto b = oracle.evaluate(packet);
        CHECK(to_json(a).dump() == to_json(b).dump());
        validate_policy_output(a, entity);
        CHECK(a.next_candidates.size() <= 2);
        for (const auto& claim : a.propagation_claims) {
            CHECK((claim.source == entity || claim.target == entity));
        }
    }
}

TEST_CASE("adversarial policy alternates origin/symptom by visit parity") {
    AdversarialPolicy adversarial;
    CHECK(adversarial.evaluate(base_packet(eid("x"), 1)).label == Label::Origin);
    CHECK(adversarial.evaluate(base_packet(eid("x"), 2)).label == Label::Symptom);
    CHECK(adversarial.evaluate(base_packet(eid("x"), 3)).label == Label::Origin);
    CHECK(adversarial.evaluate(base_packet(eid("x"), 1)).propagation_claims.empty());
    CHECK(adversarial.evaluate(base_packet(eid("x"), 1)).next_candidates.empty());
}

TEST_CASE("validate_policy_output enforces the output invariants") {
    PolicyOutput out;
    out.label = Label::Origin;
    out.reasoning = "r";
    CHECK_THROWS_AS(validate_policy_output(out, eid("x")), Error); // no citations

    out.evidence_citations = {"cite"};
    out.next_candidates = {eid("a"), eid("b"), eid("c")};
    CHECK_THROWS_AS(validate_policy_output(out, eid("x")), Error); // cap exceeded

    out.next_candidates = {eid("a")};
    out.propagation_claims = {{eid("a"), eid("b"), "c", "e"}};
    CHECK_THROWS_AS(validate_policy_output(out, eid("x")), Error); // does not touch x

    out.propagation_claims = {{eid("a"), eid("x"), "c", "e"}};
    CHECK_NOTHROW(validate_policy_output(out, eid("x")));
}

TEST_CASE("map_reduce merges by label precedence") {
    class Scripted final : public AbductivePolicy {
    public:
        explicit Scripted(std::vector<PolicyOutput> outs) : outs_(std::move(outs)) {}
        PolicyOutput evaluate(const ContextPacket&) override { return outs_[index_++ % outs_.size()]; }
        std::string name() const override { return "scripted"; }

    private:
        std::vector<PolicyOutput> outs_;
        std::size_t index_ = 0;
    };

    PolicyOutput healthy;
    healthy.label = Label::Healthy;
    healthy.reasoning = "clean";
    healthy.evidence_citations = {"clean"};
    PolicyOutput symptom;
    symptom.label = Label::Symptom;
    symptom.reasoning = "late finding";
    symptom.evidence_citations = {"smoke"};
    symptom.propagation_claims = {{eid("up"), eid("x"), "c", "e"}};
    symptom.next_candidates = {eid("up")};

    const std::vector<ContextPacket> chunks = {base_packet(eid("x")), base_packet(eid("x"))};
    Scripted hs({healthy, symptom});
    const auto merged = map_reduce_evaluate(chunks, hs);
    CHECK(merged.label == Label::Symptom);
    CHECK(merged.reasoning == "late finding");
    CHECK(merged.propagation_claims.size() == 1);
    CHECK(merged.next_candidates == std::vector<EntityId>{eid("up")});
    CHECK(merged.evidence_citations.size() == 2);

    Scripted all_healthy({healthy, healthy});
    const auto unanimous = map_reduce_evaluate(chunks, all_healthy);
    CHECK(unanimous.label == Label::Healthy);
    CHECK(unanimous.propagation_claims.empty());
}

TEST_CASE("map_reduce unions claims by endpoints like an independent set union") {
    class PerChunk final : public AbductivePolicy {
    public:
        PolicyOutput evaluate(const ContextPacket& p) override {
            PolicyOutput out;
            out.label = Label::Symptom;
            out.reasoning = "chunk";
            out.evidence_citations = {"chunk"};
            // Two claims per chunk, one shared across all chunks.
            out.propagation_claims = {
                {eid("shared"), p.entity, "c", "e"},
                {eid("src" + std::to_string(p.visit_index)), p.entity, "c", "e"},
            };
            return out;
        }
        std::string name() const override { return "per-chunk"; }
    };

    std::vector<ContextPacket> chunks;
    for (int i = 1; i <= 4; ++i) chunks.push_back(base_packet(eid("x"), i));
    PerChunk policy;
    const auto merged = map_reduce_evaluate(chunks, policy);

    std::set<std::pair<std::string, std::string>> expected;
    for (const auto& chunk : chunks) {
        PerChunk p;
        for (const auto& claim : p.evaluate(chunk).propagation_claims) {
            expected.insert({claim.source.canonical(), claim.target.canonical()});
        }
    }
    std::set<std::pair<std::string, std::string>> actual;
    for (const auto& claim : merged.propagation_claims) {
        actual.insert({claim.source.canonical(), claim.target.canonical()});
    }
    CHECK(actual == expected);
    CHECK(merged.propagation_claims.size() == expected.size()); // deduplicated
}

TEST_CASE("map_reduce succeeds when at least one chunk succeeds") {
    class Flaky final : public AbductivePolicy {
    public:
        PolicyOutput evaluate(const ContextPacket& p) override {
            if (p.visit_index == 1) raise(ErrorKind::PolicyFailure, "boom");
            PolicyOutput out;
            out.label = Label::Healthy;
            out.reasoning = "ok";
            out.evidence_citations = {"ok"};
            return out;
        }
        std::string name() const override { return "flaky"; }
    };
    Flaky flaky;
    const std::vector<ContextPacket> chunks = {base_packet(eid("x"), 1), base_packet(eid("x"), 2)};
    CHECK(map_reduce_evaluate(chunks, flaky).label == Label::Healthy);

    class AlwaysFails final : public AbductivePolicy {
    public:
        PolicyOutput evaluate(const ContextPacket&) override {
            raise(ErrorKind::PolicyFailure, "boom");
        }
        std::string name() const override { return "fails"; }
    };
    AlwaysFails fails;
    CHECK_THROWS_AS(map_reduce_evaluate(chunks, fails), Error);
}

TEST_CASE("stdio external policy: passthrough of a valid scripted response") {
    ExternalPolicy policy(make_stdio_transport(std::string(EOG_STUB_PATH) +
                                               " --script good --label Symptom"));
    // The stub emits no claims, so Symptom must still validate: citations set.
    const auto out = policy.evaluate(base_packet(eid("x")));
    CHECK(out.label == Label::Symptom);
    CHECK(out.reasoning == "scripted stub response");
    CHECK(policy.retries_used() == 0);
}

TEST_CASE("stdio external policy: one malformed response triggers a single retry") {
    ExternalPolicy policy(make_stdio_transport(std::string(EOG_STUB_PATH) + " --script bad,good"));
    const auto out = policy.evaluate(base_packet(eid("x")));
    CHECK(out.label == Label::Healthy);
    CHECK(policy.retries_used() == 1);
}

TEST_CASE("stdio external policy: two bad responses raise PolicyFailure") {
    ExternalPolicy policy(make_stdio_transport(std::string(EOG_STUB_PATH) + " --script bad,bad"));
    try {
        policy.evaluate(base_packet(eid("x")));
        FAIL("expected policy failure");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::PolicyFailure);
    }
    CHECK(policy.retries_used() == 1);

    ExternalPolicy invalid(make_stdio_transport(std::string(EOG_STUB_PATH) +
                                                " --script invalid,invalid"));
    CHECK_THROWS_AS(invalid.evaluate(base_packet(eid("x"))), Error);
}

TEST_CASE("http external policy round-trips over POST /evaluate") {
    httplib::Server server;
    std::atomic<int> calls{0};
    server.Post("/evaluate", [&](const httplib::Request& req, httplib::Response& res) {
        ++calls;
        const auto body = nlohmann::json::parse(req.body);
        CHECK(body.at("version") == 1);
        CHECK(body.contains("packet"));
        const nlohmann::json out = {{"label", "Healthy"},
                                    {"reasoning", "http stub"},
                                    {"evidence_citations", {"http"}},
                                    {"propagation_claims", nlohmann::json::array()},
                                    {"next_candidates", nlohmann::json::array()},
                                    {"direction", "upstream"}};
        res.set_content(out.dump(), "application/json");
    });
    const int port = server.bind_to_any_port("127.0.0.1");
    REQUIRE(port > 0);
    std::thread server_thread([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    ExternalPolicy policy(make_http_transport("http://127.0.0.1:" + std::to_string(port)));
    const auto out = policy.evaluate(base_packet(eid("x")));
    CHECK(out.reasoning == "http stub");
    CHECK(calls.load() == 1);

    server.stop();
    server_thread.join();
}

TEST_CASE("transport errors surface without a schema retry") {
    ExternalPolicy policy(make_http_transport("http://127.0.0.1:1")); // nothing listens
    try {
        policy.evaluate(base_packet(eid("x")));
        FAIL("expected transport error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Transport);
    }
    CHECK(policy.retries_used() == 0);
}

} // TEST_SUITE
