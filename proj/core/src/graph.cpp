#include "eog/graph.hpp"

#include "eog/error.hpp"

#include <algorithm>
#include <deque>

namespace eog {

const char* to_string(EdgeKind kind) {
    switch (kind) {
    case EdgeKind::Dependency: return "dependency";
    case EdgeKind::Ownership: return "ownership";
    case EdgeKind::Infrastructure: return "infrastructure";
    case EdgeKind::Traffic: return "traffic";
    }
    return "dependency";
}

EdgeKind edge_kind_from_string(const std::string& text) {
    if (text == "dependency") return EdgeKind::Dependency;
    if (text == "ownership") return EdgeKind::Ownership;
    if (text == "infrastructure") return EdgeKind::Infrastructure;
    if (text == "traffic") return EdgeKind::Traffic;
    raise(ErrorKind::ParseError, "unknown edge kind \"" + text + "\"");
}

const char* to_string(Label label) {
    switch (label) {
    case Label::Healthy: return "Healthy";
    case Label::Origin: return "Origin";
    case Label::Symptom: return "Symptom";
    case Label::Defer: return "Defer";
    }
    return "Defer";
}

Label label_from_string(const std::string& text) {
    if (text == "Healthy") return Label::Healthy;
    if (text == "Origin") return Label::Origin;
    if (text == "Symptom") return Label::Symptom;
    if (text == "Defer") return Label::Defer;
    raise(ErrorKind::ParseError, "unknown label \"" + text + "\"");
}

void OperationalGraph::add_edge(const EntityId& src, const EntityId& dst, EdgeKind kind) {
    nodes_.insert(src);
    nodes_.insert(dst);
    edges_.insert({src, dst, kind});
}

std::vector<EntityId> OperationalGraph::neighbors(const EntityId& v, Direction direction,
                                                  std::optional<EdgeKind> kind_filter) const {
    if (!contains(v)) {
        raise(ErrorKind::UnknownEntity, v.canonical() + " is not in the operational graph");
    }
    std::set<EntityId> out;
    for (const auto& e : edges_) {
        if (kind_filter && e.kind != *kind_filter) continue;
        if ((direction == Direction::Upstream || direction == Direction::Both) && e.dst == v) {
            out.insert(e.src);
        }
        if ((direction == Direction::Downstream || direction == Direction::Both) && e.src == v) {
            out.insert(e.dst);
        }
    }
    return {out.begin(), out.end()};
}

std::optional<Belief> ExplanatoryGraph::belief(const EntityId& id) const {
    auto it = nodes_.find(id);
    if (it == nodes_.end()) return std::nullopt;
    return it->second;
}

bool ExplanatoryGraph::upsert_edge(const CausalEdge& edge) {
    if (edge.source == edge.target) {
        raise(ErrorKind::ParseError, "causal edge must not be a self-loop: " + edge.source.canonical());
    }
    if (edge.condition.empty() || edge.effect.empty()) {
        raise(ErrorKind::ParseError, "causal edge condition/effect must be non-empty");
    }
    for (auto& existing : edges_) {
        if (existing.source == edge.source && existing.target == edge.target) {
            existing.condition = edge.condition;
            existing.effect = edge.effect;
            return false;
        }
    }
    edges_.push_back(edge);
    return true;
}

std::set<EntityId> ExplanatoryGraph::edge_endpoints_of(const EntityId& id) const {
    std::set<EntityId> out;
    for (const auto& e : edges_) {
        if (e.source == id) out.insert(e.target);
        if (e.target == id) out.insert(e.source);
    }
    return out;
}

bool ExplanatoryGraph::has_edge(const EntityId& source, const EntityId& target) const {
    return std::any_of(edges_.begin(), edges_.end(), [&](const CausalEdge& e) {
        return e.source == source && e.target == target;
    });
}

bool reaches(const ExplanatoryGraph& es, const EntityId& u, const EntityId& v) {
    std::deque<EntityId> frontier{u};
    std::set<EntityId> seen;
    while (!frontier.empty()) {
        EntityId cur = frontier.front();
        frontier.pop_front();
        for (const auto& e : es.edges()) {
            if (!(e.source == cur)) continue;
            if (e.target == v) return true;
            if (seen.insert(e.target).second) frontier.push_back(e.target);
        }
    }
    return false;
}

std::set<EntityId> compute_frontier(const ExplanatoryGraph& es) {
    std::vector<EntityId> origins;
    for (const auto& [id, belief] : es.nodes()) {
        if (belief.label == Label::Origin) origins.push_back(id);
    }
    std::set<EntityId> frontier;
    for (const auto& v : origins) {
        bool shadowed = std::any_of(origins.begin(), origins.end(), [&](const EntityId& u) {
            return !(u == v) && reaches(es, u, v);
        });
        if (!shadowed) frontier.insert(v);
    }
    return frontier;
}

} // namespace eog
