#pragma once

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

namespace eog {

// Minimal JSON Schema checker covering the subset the bundled schemas use:
// type, required, properties, items, enum, minItems, additionalProperties
// (boolean form). Returns human-readable violations; empty means valid.
std::vector<std::string> validate_against_schema(const nlohmann::json& instance,
                                                 const nlohmann::json& schema);

// Bundled schemas (mirrors of the files under schemas/).
const nlohmann::json& agent_output_schema();
const nlohmann::json& ground_truth_schema();
const nlohmann::json& checkpoint_schema();
const nlohmann::json& ledger_entry_schema();
const nlohmann::json& policy_output_schema();

} // namespace eog
