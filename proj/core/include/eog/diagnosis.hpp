#pragma once

#include "eog/graph.hpp"

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

namespace eog {

// Final structured report: causing entities (contributing_factor = true),
// impacted entities, the propagation chain, and per-alert explanations.
struct DiagnosisEntity {
    std::string name; // canonical namespace/Kind/name
    bool contributing_factor = false;
    std::string reasoning;
    std::string evidence;

    bool operator==(const DiagnosisEntity&) const = default;
};

struct AlertExplanation {
    std::string alert;
    std::string explanation;
    bool explained = false;

    bool operator==(const AlertExplanation&) const = default;
};

struct Diagnosis {
    std::vector<DiagnosisEntity> entities;
    std::vector<CausalEdge> propagations;
    std::vector<AlertExplanation> alerts_explained;
    // Set only when the frontier was empty and the report carries the
    // best-effort fallback candidate.
    bool uncertain = false;

    bool operator==(const Diagnosis&) const = default;
};

nlohmann::json to_json(const Diagnosis& d);
Diagnosis diagnosis_from_json(const nlohmann::json& j);

} // namespace eog
