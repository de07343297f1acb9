#pragma once

#include <stdexcept>
#include <string>

namespace eog {

enum class ErrorKind {
    MalformedEntityId,
    UnknownEntity,
    PageOutOfRange,
    SnapshotNotFound,
    ParseError,
    NoAlerts,
    NoCandidates,
    PolicyFailure,
    Transport,
    SchemaViolation,
    CorruptCheckpoint,
    InvalidSpec,
    EmptyInvestigation,
    EmptyRuns,
    BadRegex,
};

constexpr const char* to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::MalformedEntityId: return "malformed_entity_id";
    case ErrorKind::UnknownEntity: return "unknown_entity";
    case ErrorKind::PageOutOfRange: return "page_out_of_range";
    case ErrorKind::SnapshotNotFound: return "snapshot_not_found";
    case ErrorKind::ParseError: return "parse_error";
    case ErrorKind::NoAlerts: return "no_alerts";
    case ErrorKind::NoCandidates: return "no_candidates";
    case ErrorKind::PolicyFailure: return "policy_failure";
    case ErrorKind::Transport: return "transport";
    case ErrorKind::SchemaViolation: return "schema_violation";
    case ErrorKind::CorruptCheckpoint: return "corrupt_checkpoint";
    case ErrorKind::InvalidSpec: return "invalid_spec";
    case ErrorKind::EmptyInvestigation: return "empty_investigation";
    case ErrorKind::EmptyRuns: return "empty_runs";
    case ErrorKind::BadRegex: return "bad_regex";
    }
    return "error";
}

// Single exception type for the library; `kind` lets callers map to exit
// codes without string matching.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string message)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void raise(ErrorKind kind, const std::string& message) {
    throw Error(kind, message);
}

} // namespace eog
