#include "eog/entity.hpp"
#include "eog/error.hpp"
#include "eog/graph.hpp"

#include <doctest.h>

#include "oracles.hpp"

#include <random>

using namespace eog;

namespace {

EntityId eid(const std::string& name, const std::string& kind = "Service") {
    return {"otel-demo", kind, name};
}

} // namespace

TEST_SUITE("graph-core") {

TEST_CASE("parse_entity_id splits namespace/Kind/name") {
    const auto id = parse_entity_id("otel-demo/Deployment/ad");
    CHECK(id.ns == "otel-demo");
    CHECK(id.kind == "Deployment");
    CHECK(id.name == "ad");

    const auto minimal = parse_entity_id("a/B/c");
    CHECK(minimal.canonical() == "a/B/c");
}

TEST_CASE("parse_entity_id rejects malformed ids") {
    CHECK_THROWS_AS(parse_entity_id("otel-demo/Pod"), Error);
    CHECK_THROWS_AS(parse_entity_id("a/b/c/d"), Error);
    CHECK_THROWS_AS(parse_entity_id("//name"), Error);
    try {
        parse_entity_id("otel-demo/Pod");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::MalformedEntityId);
    }
}

TEST_CASE("parse_entity_id strips pod hash suffix only on request") {
    const std::string pod = "otel-demo/Pod/load-generator-c7cbc4c99-xyz12";
    CHECK(parse_entity_id(pod).name == "load-generator-c7cbc4c99-xyz12");
    CHECK(parse_entity_id(pod, true).name == "load-generator");
    // Non-generated names survive stripping.
    CHECK(parse_entity_id("otel-demo/Service/frontend", true).name == "frontend");
}

TEST_CASE("parse after canonical render is the identity") {
    std::mt19937_64 rng(7);
    const std::string alphabet = "abcdefghijklmnopqrstuvwxyz-0123456789";
    for (int i = 0; i < 200; ++i) {
        auto word = [&](int len) {
            std::string s;
            for (int k = 0; k < len; ++k) s.push_back(alphabet[rng() % (alphabet.size() - 1)]);
            return s;
        };
        EntityId id{word(1 + int(rng() % 8)), word(1 + int(rng() % 8)), word(1 + int(rng() % 12))};
        CHECK(parse_entity_id(id.canonical()) == id);
    }
}

TEST_CASE("neighbors on a 3-node chain") {
    OperationalGraph g;
    g.add_edge(eid("s1"), eid("s2"), EdgeKind::Dependency);
    g.add_edge(eid("s2"), eid("s3"), EdgeKind::Dependency);
    CHECK(g.neighbors(eid("s2"), Direction::Both) ==
          std::vector<EntityId>{eid("s1"), eid("s3")});
    CHECK(g.neighbors(eid("s2"), Direction::Upstream) == std::vector<EntityId>{eid("s1")});
    CHECK(g.neighbors(eid("s2"), Direction::Downstream) == std::vector<EntityId>{eid("s3")});
}

TEST_CASE("neighbors of an isolated node is empty; unknown entity throws") {
    OperationalGraph g;
    g.add_node(eid("alone"));
    CHECK(g.neighbors(eid("alone"), Direction::Both).empty());
    CHECK_THROWS_AS(g.neighbors(eid("ghost"), Direction::Both), Error);
}

TEST_CASE("neighbors matches a brute-force edge scan on random graphs") {
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 50; ++trial) {
        OperationalGraph g;
        std::vector<EntityId> nodes;
        for (int i = 0; i < 6; ++i) {
            nodes.push_back(eid("n" + std::to_string(i)));
            g.add_node(nodes.back());
        }
        for (int e = 0; e < 10; ++e) {
            g.add_edge(nodes[rng() % 6], nodes[rng() % 6],
                       static_cast<EdgeKind>(rng() % 4));
        }
        for (const auto& v : nodes) {
            for (auto dir : {Direction::Upstream, Direction::Downstream, Direction::Both}) {
                CHECK(g.neighbors(v, dir) == oracle::neighbors_bruteforce(g, v, dir));
            }
        }
    }
}

TEST_CASE("neighbors respects the kind filter") {
    OperationalGraph g;
    g.add_edge(eid("a"), eid("b"), EdgeKind::Dependency);
    g.add_edge(eid("a"), eid("c"), EdgeKind::Ownership);
    CHECK(g.neighbors(eid("a"), Direction::Downstream, EdgeKind::Ownership) ==
          std::vector<EntityId>{eid("c")});
}

TEST_CASE("reaches follows causal edges, not reflexivity") {
    ExplanatoryGraph es;
    es.upsert_edge({eid("a"), eid("b"), "c", "e"});
    es.upsert_edge({eid("b"), eid("c"), "c", "e"});
    CHECK(reaches(es, eid("a"), eid("c")));
    CHECK_FALSE(reaches(es, eid("b"), eid("a")));
    CHECK_FALSE(reaches(es, eid("a"), eid("a")));
}

TEST_CASE("reaches matches a Floyd-Warshall closure on random DAGs") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 60; ++trial) {
        const int n = 2 + int(rng() % 7); // up to 8 nodes
        std::set<std::pair<int, int>> edges;
        for (int e = 0; e < n + 3; ++e) {
            int a = int(rng() % n), b = int(rng() % n);
            if (a < b) edges.insert({a, b}); // forward edges only: a DAG
        }
        ExplanatoryGraph es;
        std::vector<EntityId> ids;
        for (int i = 0; i < n; ++i) ids.push_back(eid("n" + std::to_string(i)));
        for (const auto& [a, b] : edges) es.upsert_edge({ids[a], ids[b], "c", "e"});
        const auto closed = oracle::closure(n, edges);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                if (i == j) continue;
                CHECK(reaches(es, ids[i], ids[j]) == closed.at({i, j}));
            }
        }
    }
}

TEST_CASE("compute_frontier on the four-service revision fixture") {
    // Final converged state: one origin at the head of the cause chain.
    ExplanatoryGraph es;
    const auto s1 = eid("s1"), s2 = eid("s2"), s3 = eid("s3"), s4 = eid("s4");
    es.set_belief(s1, {Label::Origin, "workload change", 7});
    es.set_belief(s2, {Label::Symptom, "overload", 6});
    es.set_belief(s3, {Label::Symptom, "overload", 5});
    es.set_belief(s4, {Label::Symptom, "oom from traffic", 4});
    es.upsert_edge({s1, s2, "surge", "load"});
    es.upsert_edge({s2, s3, "surge", "load"});
    es.upsert_edge({s3, s4, "surge", "oom"});
    CHECK(compute_frontier(es) == std::set<EntityId>{s1});
}

TEST_CASE("compute_frontier of a single origin is that origin") {
    ExplanatoryGraph es;
    es.set_belief(eid("x"), {Label::Origin, "spec change", 1});
    CHECK(compute_frontier(es) == std::set<EntityId>{eid("x")});
}

TEST_CASE("compute_frontier matches exhaustive evaluation over small DAGs") {
    // All label assignments over random DAGs with <= 5 nodes.
    std::mt19937_64 rng(1234);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = 2 + int(rng() % 4);
        std::set<std::pair<int, int>> edges;
        for (int e = 0; e < n + 2; ++e) {
            int a = int(rng() % n), b = int(rng() % n);
            if (a < b) edges.insert({a, b});
        }
        std::vector<EntityId> ids;
        for (int i = 0; i < n; ++i) ids.push_back(eid("n" + std::to_string(i)));
        for (int mask = 0; mask < (1 << n); ++mask) {
            ExplanatoryGraph es;
            std::vector<bool> is_origin(n, false);
            for (int i = 0; i < n; ++i) {
                is_origin[i] = (mask >> i) & 1;
                es.set_belief(ids[i], {is_origin[i] ? Label::Origin : Label::Symptom, "x", 0});
            }
            for (const auto& [a, b] : edges) es.upsert_edge({ids[a], ids[b], "c", "e"});
            const auto expected_idx = oracle::frontier_bruteforce(n, edges, is_origin);
            std::set<EntityId> expected;
            for (int i : expected_idx) expected.insert(ids[i]);
            CHECK(compute_frontier(es) == expected);
        }
    }
}

TEST_CASE("frontier soundness, minimality and monotone shrinkage") {
    std::mt19937_64 rng(555);
    for (int trial = 0; trial < 80; ++trial) {
        const int n = 3 + int(rng() % 4);
        ExplanatoryGraph es;
        std::vector<EntityId> ids;
        for (int i = 0; i < n; ++i) {
            ids.push_back(eid("n" + std::to_string(i)));
            const auto label = static_cast<Label>(rng() % 4);
            es.set_belief(ids[i], {label, label == Label::Defer ? "" : "evidence", 0});
        }
        for (int e = 0; e < n; ++e) {
            int a = int(rng() % n), b = int(rng() % n);
            if (a < b) es.upsert_edge({ids[a], ids[b], "c", "e"});
        }
        const auto frontier = compute_frontier(es);
        for (const auto& v : frontier) {
            CHECK(es.belief(v)->label == Label::Origin); // soundness
            for (const auto& [u, belief] : es.nodes()) {
                if (belief.label == Label::Origin && !(u == v)) {
                    CHECK_FALSE(reaches(es, u, v)); // minimality
                }
            }
        }
        // Adding an edge from an origin into a frontier member never grows
        // the frontier.
        std::vector<EntityId> origins;
        for (const auto& [u, belief] : es.nodes()) {
            if (belief.label == Label::Origin) origins.push_back(u);
        }
        if (!frontier.empty() && !origins.empty()) {
            const auto& target = *frontier.begin();
            const auto& src = origins[rng() % origins.size()];
            if (!(src == target)) {
                es.upsert_edge({src, target, "c", "e"});
                CHECK(compute_frontier(es).size() <= frontier.size());
            }
        }
    }
}

TEST_CASE("explanatory graph deduplicates edges by endpoints") {
    ExplanatoryGraph es;
    CHECK(es.upsert_edge({eid("a"), eid("b"), "first", "effect"}));
    CHECK_FALSE(es.upsert_edge({eid("a"), eid("b"), "second", "updated"}));
    REQUIRE(es.edges().size() == 1);
    CHECK(es.edges().front().condition == "second");
    CHECK_THROWS_AS(es.upsert_edge({eid("a"), eid("a"), "c", "e"}), Error);
    CHECK_THROWS_AS(es.upsert_edge({eid("a"), eid("b"), "", ""}), Error);
}

TEST_CASE("edge kind and label serialization round-trips") {
    for (auto kind : {EdgeKind::Dependency, EdgeKind::Ownership, EdgeKind::Infrastructure,
                      EdgeKind::Traffic}) {
        CHECK(edge_kind_from_string(to_string(kind)) == kind);
    }
    for (auto label : {Label::Healthy, Label::Origin, Label::Symptom, Label::Defer}) {
        CHECK(label_from_string(to_string(label)) == label);
    }
    CHECK_THROWS_AS(edge_kind_from_string("sideways"), Error);
    CHECK_THROWS_AS(label_from_string("Maybe"), Error);
}

} // TEST_SUITE
