#pragma once

#include "eog/diagnosis.hpp"
#include "eog/entity.hpp"
#include "eog/graph.hpp"

#include <nlohmann/json.hpp>

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace eog {

// Ground-truth entity group: semantic id with regex filters over the name.
struct GtGroup {
    std::string id;
    std::string kind;
    std::vector<std::string> filter; // full-match regexes over the entity name
    std::string ns;
    bool root_cause = false;

    bool operator==(const GtGroup&) const = default;
};

struct GtPropagation {
    std::string source; // group ids
    std::string target;
    std::string condition;
    std::string effect;

    bool operator==(const GtPropagation&) const = default;
};

// Deterministic stand-in for the reasoning judge: per-root-group keyword
// lists the simulator emits (resource nouns + action keywords).
struct GtKeywords {
    std::string group;
    std::vector<std::string> resource;
    std::vector<std::string> actions;

    bool operator==(const GtKeywords&) const = default;
};

struct GroundTruth {
    std::vector<GtGroup> groups;
    std::vector<std::vector<std::string>> aliases;
    std::vector<GtPropagation> propagations;
    std::vector<GtKeywords> keywords;
    std::string fault_kind; // scenario metadata
    std::int64_t seed = 0;
};

nlohmann::json to_json(const GroundTruth& gt);
GroundTruth ground_truth_from_json(const nlohmann::json& j);
GroundTruth load_ground_truth(const std::string& path);

struct EntityMatch {
    std::string predicted;                 // canonical entity string
    std::optional<std::string> matched_group; // GT group id, when matched
    bool operator==(const EntityMatch&) const = default;
};

struct RunScores {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double reasoning = 0.0;
    std::vector<EntityMatch> per_entity_matches; // prediction order
};

struct AggregateScores {
    double pass_at_k = 0.0;
    double majority_at_k = 0.0;
    double reliability_gap = 0.0;
    int k = 0;
    double mean_f1 = 0.0;
    double mean_recall = 0.0;
    double mean_reasoning = 0.0;
};

nlohmann::json to_json(const RunScores& s);
nlohmann::json to_json(const AggregateScores& s);

// Alias-class partition over group ids; classes containing any root_cause
// group make all members valid root-cause matches.
std::map<std::string, int> alias_classes(const GroundTruth& gt);

// Entity P/R/F1 against the root-cause alias classes. Predictions are the
// contributing_factor=true entities, in order. Recall counts each root-cause
// alias class once; empty-prediction precision is 0 by convention.
RunScores match_entities(const Diagnosis& diag, const GroundTruth& gt);

// 0 / 0.5 / 1 keyword rubric over each matched root-cause prediction's
// reasoning: 1.0 when every keyword appears, 0.5 when a resource noun matches
// but at least one action keyword is missing, 0 otherwise; averaged.
double score_reasoning(const Diagnosis& diag, const GroundTruth& gt);

// Scores a diagnosis: entity matching plus the reasoning rubric.
RunScores score_run(const Diagnosis& diag, const GroundTruth& gt);

enum class SuccessRule { RecallOne, F1AtLeast };

struct SuccessPredicate {
    SuccessRule rule = SuccessRule::RecallOne;
    double f1_threshold = 1.0;

    bool operator()(const RunScores& s) const;
};

// Pass@k (success in at least one run), Majority@k (success in more than
// half), and their gap, over one scenario's k runs.
AggregateScores aggregate(const std::vector<RunScores>& runs,
                          const SuccessPredicate& success = {});

} // namespace eog
