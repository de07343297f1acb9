#include "eog/entity.hpp"

#include "eog/error.hpp"

#include <regex>

namespace eog {

namespace {

std::string trim(const std::string& s) {
    std::size_t begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    std::size_t end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

// Generated pod names look like "<base>-<replicaset hash>-<pod suffix>".
const std::regex kPodSuffix("^(.*?)-[a-z0-9]{5,11}-[a-z0-9]{5}$");

} // namespace

EntityId parse_entity_id(const std::string& text, bool strip_suffix) {
    const std::string trimmed = trim(text);
    std::size_t first = trimmed.find('/');
    std::size_t second = first == std::string::npos ? std::string::npos
                                                    : trimmed.find('/', first + 1);
    if (first == std::string::npos || second == std::string::npos ||
        trimmed.find('/', second + 1) != std::string::npos) {
        raise(ErrorKind::MalformedEntityId,
              "expected namespace/Kind/name, got \"" + trimmed + "\"");
    }
    EntityId id;
    id.ns = trim(trimmed.substr(0, first));
    id.kind = trim(trimmed.substr(first + 1, second - first - 1));
    id.name = trim(trimmed.substr(second + 1));
    if (id.ns.empty() || id.kind.empty() || id.name.empty()) {
        raise(ErrorKind::MalformedEntityId, "empty component in \"" + trimmed + "\"");
    }
    if (strip_suffix) {
        std::smatch m;
        if (std::regex_match(id.name, m, kPodSuffix) && !m[1].str().empty()) {
            id.name = m[1].str();
        }
    }
    return id;
}

bool is_well_formed_entity_id(const std::string& text) {
    try {
        parse_entity_id(text);
        return true;
    } catch (const Error&) {
        return false;
    }
}

} // namespace eog
