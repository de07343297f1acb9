#pragma once

#include "eog/entity.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace eog {

enum class EdgeKind { Dependency, Ownership, Infrastructure, Traffic };

const char* to_string(EdgeKind kind);
EdgeKind edge_kind_from_string(const std::string& text);

enum class Direction { Upstream, Downstream, Both };

struct TopologyEdge {
    EntityId src;
    EntityId dst;
    EdgeKind kind;

    auto operator<=>(const TopologyEdge&) const = default;
};

// The environment topology. Directed; cycles are permitted. Immutable after
// construction by convention: build it, then share it read-only.
class OperationalGraph {
public:
    void add_node(const EntityId& id) { nodes_.insert(id); }

    // Inserts both endpoints if absent so edge endpoints are always members.
    void add_edge(const EntityId& src, const EntityId& dst, EdgeKind kind);

    bool contains(const EntityId& id) const { return nodes_.count(id) > 0; }

    const std::set<EntityId>& nodes() const { return nodes_; }
    const std::set<TopologyEdge>& edges() const { return edges_; }

    // 1-hop adjacency, deterministic lexicographic order by canonical id.
    // Upstream = edge sources pointing at v, downstream = edge targets of v.
    // Throws Error(UnknownEntity) when v is not a node.
    std::vector<EntityId> neighbors(const EntityId& v, Direction direction,
                                    std::optional<EdgeKind> kind_filter = std::nullopt) const;

private:
    std::set<EntityId> nodes_;
    std::set<TopologyEdge> edges_;
};

enum class Label { Healthy, Origin, Symptom, Defer };

const char* to_string(Label label);
Label label_from_string(const std::string& text);

// Per-entity explanatory belief. evidence_summary must be non-empty whenever
// label != Defer (every decision cites evidence).
struct Belief {
    Label label = Label::Defer;
    std::string evidence_summary;
    std::int64_t updated_at = 0; // logical step index

    bool operator==(const Belief&) const = default;
};

// Evidence-oriented cause→effect claim: source is the proposed cause.
struct CausalEdge {
    EntityId source;
    EntityId target;
    std::string condition;
    std::string effect;

    auto operator<=>(const CausalEdge&) const = default;
};

// The explanatory graph built during investigation: visited nodes with
// beliefs plus claimed causal edges. Edge endpoints may reference entities
// pending activation (no belief yet). Single-writer (the controller).
class ExplanatoryGraph {
public:
    void set_belief(const EntityId& id, Belief belief) { nodes_[id] = std::move(belief); }

    std::optional<Belief> belief(const EntityId& id) const;

    // Re-claiming an existing (source, target) pair updates condition/effect.
    // Returns true when the edge is new. Throws on source == target or empty
    // condition/effect.
    bool upsert_edge(const CausalEdge& edge);

    const std::map<EntityId, Belief>& nodes() const { return nodes_; }
    const std::vector<CausalEdge>& edges() const { return edges_; }

    // Entities touched by any causal edge as source or target.
    std::set<EntityId> edge_endpoints_of(const EntityId& id) const;

    bool has_edge(const EntityId& source, const EntityId& target) const;

private:
    std::map<EntityId, Belief> nodes_;
    std::vector<CausalEdge> edges_; // insertion order; (source,target) unique
};

// True iff a directed path of causal edges (length >= 1) leads from u to v.
// Reflexivity is false: u does not reach u over an empty path.
bool reaches(const ExplanatoryGraph& es, const EntityId& u, const EntityId& v);

// Origin-labeled nodes with no Origin-labeled proper ancestor.
std::set<EntityId> compute_frontier(const ExplanatoryGraph& es);

} // namespace eog
