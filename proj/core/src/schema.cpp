#include "eog/schema.hpp"

namespace eog {

using nlohmann::json;

namespace {

const char* type_name(const json& j) {
    switch (j.type()) {
    case json::value_t::object: return "object";
    case json::value_t::array: return "array";
    case json::value_t::string: return "string";
    case json::value_t::boolean: return "boolean";
    case json::value_t::number_integer:
    case json::value_t::number_unsigned: return "integer";
    case json::value_t::number_float: return "number";
    case json::value_t::null: return "null";
    default: return "unknown";
    }
}

bool type_matches(const json& instance, const std::string& expected) {
    const std::string actual = type_name(instance);
    if (expected == actual) return true;
    return expected == "number" && actual == "integer";
}

void check(const json& instance, const json& schema, const std::string& path,
           std::vector<std::string>& errors) {
    if (schema.contains("type")) {
        const std::string expected = schema["type"].get<std::string>();
        if (!type_matches(instance, expected)) {
            errors.push_back(path + ": expected " + expected + ", got " + type_name(instance));
            return;
        }
    }
    if (schema.contains("enum")) {
        bool found = false;
        for (const auto& allowed : schema["enum"]) {
            if (instance == allowed) found = true;
        }
        if (!found) errors.push_back(path + ": value not in enum");
    }
    if (instance.is_object()) {
        if (schema.contains("required")) {
            for (const auto& key : schema["required"]) {
                if (!instance.contains(key.get<std::string>())) {
                    errors.push_back(path + ": missing required property \"" +
                                     key.get<std::string>() + "\"");
                }
            }
        }
        const json props = schema.value("properties", json::object());
        for (const auto& [key, value] : instance.items()) {
            if (props.contains(key)) {
                check(value, props[key], path + "." + key, errors);
            } else if (schema.value("additionalProperties", json(true)) == json(false)) {
                errors.push_back(path + ": unexpected property \"" + key + "\"");
            }
        }
    }
    if (instance.is_array()) {
        if (schema.contains("minItems") &&
            instance.size() < schema["minItems"].get<std::size_t>()) {
            errors.push_back(path + ": fewer than " + schema["minItems"].dump() + " items");
        }
        if (schema.contains("items")) {
            for (std::size_t i = 0; i < instance.size(); ++i) {
                check(instance[i], schema["items"], path + "[" + std::to_string(i) + "]", errors);
            }
        }
    }
}

} // namespace

std::vector<std::string> validate_against_schema(const json& instance, const json& schema) {
    std::vector<std::string> errors;
    check(instance, schema, "$", errors);
    return errors;
}

// Embedded mirrors of schemas/*.json; a unit test pins file <-> embedded
// equality so they cannot drift.

const json& agent_output_schema() {
    static const json schema = json::parse(R"JSON(
{
  "$schema": "http://json-schema.org/draft-07/schema#",
  "title": "eog agent output",
  "type": "object",
  "required": ["entities", "propagations", "alerts_explained"],
  "properties": {
    "entities": {
      "type": "array",
      "items": {
        "type": "object",
        "required": ["name", "contributing_factor", "reasoning", "evidence"],
        "properties": {
          "name": {"type": "string"},
          "contributing_factor": {"type": "boolean"},
          "reasoning": {"type": "string"},
          "evidence": {"type": "string"}
        }
      }
    },
    "propagations": {
      "type": "array",
      "items": {
        "type": "object",
        "required": ["source", "target", "condition", "effect"],
        "properties": {
          "source": {"type": "string"},
          "target": {"type": "string"},
          "condition": {"type": "string"},
          "effect": {"type": "string"}
        }
      }
    },
    "alerts_explained": {
      "type": "array",
      "items": {
        "type": "object",
        "required": ["alert", "explanation", "explained"],
        "properties": {
          "alert": {"type": "string"},
          "explanation": {"type": "string"},
          "explained": {"type": "boolean"}
        }
      }
    },
    "uncertain": {"type": "boolean"}
  }
}
)JSON");
    return schema;
}

const json& ground_truth_schema() {
    static const json schema = json::parse(R"JSON(
{
  "$schema": "http://json-schema.org/draft-07/schema#",
  "title": "eog ground truth",
  "type": "object",
  "required": ["groups"],
  "properties": {
    "groups": {
      "type": "array",
      "minItems": 1,
      "items": {
        "type": "object",
        "required": ["id", "kind", "filter", "namespace"],
        "properties": {
          "id": {"type": "string"},
          "kind": {"type": "string"},
          "filter": {"type": "array", "minItems": 1, "items": {"type": "string"}},
          "namespace": {"type": "string"},
          "root_cause": {"type": "boolean"}
        }
      }
    },
    "aliases": {
      "type": "array",
      "items": {"type": "array", "items": {"type": "string"}}
    },
    "propagations": {
      "type": "array",
      "items": {
        "type": "object",
        "required": ["source", "target", "condition", "effect"],
        "properties": {
          "source": {"type": "string"},
          "target": {"type": "string"},
          "condition": {"type": "string"},
          "effect": {"type": "string"}
        }
      }
    },
    "keywords": {
      "type": "array",
      "items": {
        "type": "object",
        "required": ["group", "resource", "actions"],
        "properties": {
          "group": {"type": "string"},
          "resource": {"type": "array", "items": {"type": "string"}},
          "actions": {"type": "array", "items": {"type": "string"}}
        }
      }
    },
    "scenario": {"type": "object"}
  }
}
)JSON");
    return schema;
}

const json& checkpoint_schema() {
    static const json schema = json::parse(R"JSON(
{
  "$schema": "http://json-schema.org/draft-07/schema#",
  "title": "eog checkpoint",
  "type": "object",
  "required": ["eog_checkpoint_version", "window", "budget", "evidence_config",
               "budget_remaining", "step_count", "eval_count", "explanatory_graph",
               "runtime", "queue", "inboxes", "ledger", "anchor_alerts"],
  "properties": {
    "eog_checkpoint_version": {"type": "integer", "enum": [1]},
    "window": {
      "type": "object",
      "required": ["start", "end"],
      "properties": {"start": {"type": "string"}, "end": {"type": "string"}}
    },
    "budget": {"type": "object"},
    "evidence_config": {"type": "object"},
    "budget_remaining": {"type": "integer"},
    "step_count": {"type": "integer"},
    "eval_count": {"type": "integer"},
    "explanatory_graph": {
      "type": "object",
      "required": ["nodes", "edges"],
      "properties": {"nodes": {"type": "array"}, "edges": {"type": "array"}}
    },
    "runtime": {"type": "array"},
    "queue": {"type": "array"},
    "inboxes": {"type": "array"},
    "ledger": {"type": "array"},
    "anchor_alerts": {"type": "array"}
  }
}
)JSON");
    return schema;
}

const json& ledger_entry_schema() {
    static const json schema = json::parse(R"JSON(
{
  "$schema": "http://json-schema.org/draft-07/schema#",
  "title": "eog ledger entry",
  "type": "object",
  "required": ["step", "entity", "belief", "trigger", "policy_output_digest", "claims"],
  "properties": {
    "step": {"type": "integer"},
    "entity": {"type": "string"},
    "belief": {
      "type": "object",
      "required": ["label", "evidence_summary", "updated_at"],
      "properties": {
        "label": {"enum": ["Healthy", "Origin", "Symptom", "Defer"]},
        "evidence_summary": {"type": "string"},
        "updated_at": {"type": "integer"}
      }
    },
    "trigger": {"type": "object", "required": ["type"]},
    "policy_output_digest": {"type": "string"},
    "claims": {
      "type": "array",
      "items": {
        "type": "object",
        "required": ["source", "target", "condition", "effect"]
      }
    }
  }
}
)JSON");
    return schema;
}

const json& policy_output_schema() {
    static const json schema = json::parse(R"JSON(
{
  "$schema": "http://json-schema.org/draft-07/schema#",
  "title": "eog policy output (wire protocol v1)",
  "type": "object",
  "required": ["label", "reasoning", "evidence_citations", "propagation_claims",
               "next_candidates", "direction"],
  "properties": {
    "label": {"enum": ["Healthy", "Origin", "Symptom", "Defer"]},
    "reasoning": {"type": "string"},
    "evidence_citations": {"type": "array", "items": {"type": "string"}},
    "propagation_claims": {
      "type": "array",
      "items": {
        "type": "object",
        "required": ["source", "target", "condition", "effect"],
        "properties": {
          "source": {"type": "string"},
          "target": {"type": "string"},
          "condition": {"type": "string"},
          "effect": {"type": "string"}
        }
      }
    },
    "next_candidates": {"type": "array", "items": {"type": "string"}},
    "direction": {"enum": ["upstream", "downstream", "ownership", "infrastructure"]}
  }
}
)JSON");
    return schema;
}

} // namespace eog
