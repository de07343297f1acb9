#pragma once

#include <compare>
#include <string>

namespace eog {

// Identity of a system entity. Canonical rendering is exactly
// "namespace/Kind/name"; no UID suffixes.
struct EntityId {
    std::string ns;
    std::string kind;
    std::string name;

    std::string canonical() const { return ns + "/" + kind + "/" + name; }

    auto operator<=>(const EntityId&) const = default;
};

// Parses "namespace/Kind/name". Components are trimmed, case preserved.
// With strip_suffix, a generated pod suffix ("-c7cbc4c99-xyz12") is removed
// from the name; default keeps it (the evaluator handles semantic matching).
EntityId parse_entity_id(const std::string& text, bool strip_suffix = false);

// True when text splits into three non-empty components.
bool is_well_formed_entity_id(const std::string& text);

} // namespace eog
