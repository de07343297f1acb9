#include "eog/evaluator.hpp"

#include "eog/error.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <regex>
#include <set>

namespace eog {

using nlohmann::json;

json to_json(const GroundTruth& gt) {
    json groups = json::array();
    for (const auto& g : gt.groups) {
        groups.push_back({{"id", g.id},
                          {"kind", g.kind},
                          {"filter", g.filter},
                          {"namespace", g.ns},
                          {"root_cause", g.root_cause}});
    }
    json aliases = json::array();
    for (const auto& a : gt.aliases) aliases.push_back(a);
    json propagations = json::array();
    for (const auto& p : gt.propagations) {
        propagations.push_back({{"source", p.source},
                                {"target", p.target},
                                {"condition", p.condition},
                                {"effect", p.effect}});
    }
    json keywords = json::array();
    for (const auto& k : gt.keywords) {
        keywords.push_back({{"group", k.group}, {"resource", k.resource}, {"actions", k.actions}});
    }
    return {{"groups", groups},
            {"aliases", aliases},
            {"propagations", propagations},
            {"keywords", keywords},
            {"scenario", {{"fault", gt.fault_kind}, {"seed", gt.seed}}}};
}

GroundTruth ground_truth_from_json(const json& j) {
    GroundTruth gt;
    for (const auto& g : j.at("groups")) {
        GtGroup group;
        group.id = g.at("id").get<std::string>();
        group.kind = g.at("kind").get<std::string>();
        group.filter = g.at("filter").get<std::vector<std::string>>();
        group.ns = g.at("namespace").get<std::string>();
        group.root_cause = g.value("root_cause", false);
        gt.groups.push_back(std::move(group));
    }
    for (const auto& a : j.value("aliases", json::array())) {
        gt.aliases.push_back(a.get<std::vector<std::string>>());
    }
    for (const auto& p : j.value("propagations", json::array())) {
        gt.propagations.push_back({p.at("source").get<std::string>(),
                                   p.at("target").get<std::string>(),
                                   p.at("condition").get<std::string>(),
                                   p.at("effect").get<std::string>()});
    }
    for (const auto& k : j.value("keywords", json::array())) {
        gt.keywords.push_back({k.at("group").get<std::string>(),
                               k.at("resource").get<std::vector<std::string>>(),
                               k.at("actions").get<std::vector<std::string>>()});
    }
    if (j.contains("scenario")) {
        gt.fault_kind = j["scenario"].value("fault", "");
        gt.seed = j["scenario"].value("seed", 0);
    }

    std::set<std::string> ids;
    for (const auto& g : gt.groups) ids.insert(g.id);
    for (const auto& alias_set : gt.aliases) {
        for (const auto& member : alias_set) {
            if (!ids.count(member)) {
                raise(ErrorKind::ParseError, "alias references unknown group \"" + member + "\"");
            }
        }
    }
    bool any_root = std::any_of(gt.groups.begin(), gt.groups.end(),
                                [](const GtGroup& g) { return g.root_cause; });
    if (!any_root) raise(ErrorKind::ParseError, "ground truth must mark at least one root cause");
    return gt;
}

GroundTruth load_ground_truth(const std::string& path) {
    std::ifstream in(path);
    if (!in) raise(ErrorKind::SnapshotNotFound, "cannot open " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        raise(ErrorKind::ParseError, path + ": " + e.what());
    }
    try {
        return ground_truth_from_json(j);
    } catch (const json::exception& e) {
        raise(ErrorKind::ParseError, path + ": " + e.what());
    }
}

json to_json(const RunScores& s) {
    json matches = json::array();
    for (const auto& m : s.per_entity_matches) {
        json entry = {{"predicted", m.predicted}};
        if (m.matched_group) entry["matched_group"] = *m.matched_group;
        else entry["matched_group"] = nullptr;
        matches.push_back(entry);
    }
    return {{"precision", s.precision},
            {"recall", s.recall},
            {"f1", s.f1},
            {"reasoning", s.reasoning},
            {"per_entity_matches", matches}};
}

json to_json(const AggregateScores& s) {
    return {{"pass_at_k", s.pass_at_k},
            {"majority_at_k", s.majority_at_k},
            {"reliability_gap", s.reliability_gap},
            {"k", s.k},
            {"mean_f1", s.mean_f1},
            {"mean_recall", s.mean_recall},
            {"mean_reasoning", s.mean_reasoning}};
}

std::map<std::string, int> alias_classes(const GroundTruth& gt) {
    // Union-find over group ids seeded by the alias lists.
    std::map<std::string, std::string> parent;
    for (const auto& g : gt.groups) parent[g.id] = g.id;
    std::function<std::string(const std::string&)> find = [&](const std::string& x) {
        if (parent.at(x) == x) return x;
        parent[x] = find(parent.at(x));
        return parent.at(x);
    };
    for (const auto& alias_set : gt.aliases) {
        for (std::size_t i = 1; i < alias_set.size(); ++i) {
            parent[find(alias_set[i])] = find(alias_set[0]);
        }
    }
    std::map<std::string, int> cls;
    std::map<std::string, int> root_index;
    for (const auto& g : gt.groups) {
        const std::string root = find(g.id);
        auto [it, inserted] = root_index.emplace(root, static_cast<int>(root_index.size()));
        cls[g.id] = it->second;
    }
    return cls;
}

namespace {

std::regex compile_filter(const std::string& pattern) {
    try {
        return std::regex(pattern);
    } catch (const std::regex_error& e) {
        raise(ErrorKind::BadRegex, "filter \"" + pattern + "\": " + e.what());
    }
}

// Group match: kind and namespace equal, and any filter fully matches the
// entity name.
bool group_matches(const GtGroup& group, const EntityId& id) {
    if (group.kind != id.kind || group.ns != id.ns) return false;
    for (const auto& pattern : group.filter) {
        if (std::regex_match(id.name, compile_filter(pattern))) return true;
    }
    return false;
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

bool contains_keyword(const std::string& text_lower, const std::string& keyword) {
    return text_lower.find(lower(keyword)) != std::string::npos;
}

} // namespace

RunScores match_entities(const Diagnosis& diag, const GroundTruth& gt) {
    const auto cls = alias_classes(gt);

    // Alias classes that contain a root-cause group: matching any member
    // counts as identifying that root cause.
    std::set<int> root_classes;
    for (const auto& g : gt.groups) {
        if (g.root_cause) root_classes.insert(cls.at(g.id));
    }

    RunScores scores;
    int correct_predictions = 0;
    std::set<int> matched_classes;
    int total_predictions = 0;
    for (const auto& e : diag.entities) {
        if (!e.contributing_factor) continue;
        ++total_predictions;
        EntityMatch match;
        match.predicted = e.name;
        EntityId id;
        bool parsed = true;
        try {
            id = parse_entity_id(e.name);
        } catch (const Error&) {
            parsed = false;
        }
        if (parsed) {
            for (const auto& g : gt.groups) {
                if (!root_classes.count(cls.at(g.id))) continue;
                if (group_matches(g, id)) {
                    match.matched_group = g.id;
                    ++correct_predictions;
                    matched_classes.insert(cls.at(g.id));
                    break;
                }
            }
        }
        scores.per_entity_matches.push_back(std::move(match));
    }

    const int total_gt = static_cast<int>(root_classes.size());
    scores.precision = total_predictions == 0
                           ? 0.0
                           : static_cast<double>(correct_predictions) / total_predictions;
    scores.recall =
        total_gt == 0 ? 0.0 : static_cast<double>(matched_classes.size()) / total_gt;
    scores.f1 = (scores.precision + scores.recall) == 0.0
                    ? 0.0
                    : 2.0 * scores.precision * scores.recall / (scores.precision + scores.recall);
    return scores;
}

double score_reasoning(const Diagnosis& diag, const GroundTruth& gt) {
    const auto matches = match_entities(diag, gt).per_entity_matches;
    const auto cls = alias_classes(gt);

    std::map<int, const GtKeywords*> keywords_by_class;
    for (const auto& k : gt.keywords) {
        auto it = cls.find(k.group);
        if (it != cls.end()) keywords_by_class[it->second] = &k;
    }

    // Reasoning text per prediction, keyed by canonical name.
    std::map<std::string, std::string> reasoning_by_name;
    for (const auto& e : diag.entities) {
        if (e.contributing_factor) reasoning_by_name[e.name] = e.reasoning;
    }

    double sum = 0.0;
    int n = 0;
    for (const auto& m : matches) {
        if (!m.matched_group) continue;
        ++n;
        const auto* kw = keywords_by_class.count(cls.at(*m.matched_group))
                             ? keywords_by_class.at(cls.at(*m.matched_group))
                             : nullptr;
        if (!kw) continue; // no keyword list: prediction scores 0
        const std::string text = lower(reasoning_by_name[m.predicted]);
        bool all_present = true;
        for (const auto& word : kw->resource) {
            if (!contains_keyword(text, word)) all_present = false;
        }
        bool any_resource = false;
        for (const auto& word : kw->resource) {
            if (contains_keyword(text, word)) any_resource = true;
        }
        bool all_actions = true;
        for (const auto& word : kw->actions) {
            if (!contains_keyword(text, word)) all_actions = false;
        }
        if (all_present && all_actions) sum += 1.0;
        else if (any_resource) sum += 0.5; // resource noun right, key detail missing
    }
    return n == 0 ? 0.0 : sum / n;
}

RunScores score_run(const Diagnosis& diag, const GroundTruth& gt) {
    RunScores scores = match_entities(diag, gt);
    scores.reasoning = score_reasoning(diag, gt);
    return scores;
}

bool SuccessPredicate::operator()(const RunScores& s) const {
    if (rule == SuccessRule::RecallOne) return s.recall >= 1.0 - 1e-9;
    return s.f1 >= f1_threshold - 1e-9;
}

AggregateScores aggregate(const std::vector<RunScores>& runs, const SuccessPredicate& success) {
    if (runs.empty()) raise(ErrorKind::EmptyRuns, "aggregate over zero runs");
    AggregateScores agg;
    agg.k = static_cast<int>(runs.size());
    int successes = 0;
    for (const auto& r : runs) {
        if (success(r)) ++successes;
        agg.mean_f1 += r.f1;
        agg.mean_recall += r.recall;
        agg.mean_reasoning += r.reasoning;
    }
    agg.mean_f1 /= runs.size();
    agg.mean_recall /= runs.size();
    agg.mean_reasoning /= runs.size();
    agg.pass_at_k = successes >= 1 ? 1.0 : 0.0;
    agg.majority_at_k = successes * 2 > agg.k ? 1.0 : 0.0;
    agg.reliability_gap = agg.pass_at_k - agg.majority_at_k;
    return agg;
}

} // namespace eog
