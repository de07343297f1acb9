#pragma once

#include <compare>
#include <cstdint>
#include <string>

namespace eog {

// UTC instant with second resolution. All snapshot files carry RFC3339
// timestamps ("2026-03-14T09:00:00Z"); fractional seconds are accepted on
// parse and truncated.
struct Timestamp {
    std::int64_t secs = 0;

    auto operator<=>(const Timestamp&) const = default;

    Timestamp operator+(std::int64_t delta_secs) const { return {secs + delta_secs}; }
    Timestamp operator-(std::int64_t delta_secs) const { return {secs - delta_secs}; }
    std::int64_t operator-(const Timestamp& other) const { return secs - other.secs; }
};

// Throws Error(ParseError) on anything that is not RFC3339 UTC.
Timestamp parse_rfc3339(const std::string& text);

std::string format_rfc3339(Timestamp t);

struct TimeWindow {
    Timestamp start;
    Timestamp end;

    bool contains(Timestamp t) const { return start <= t && t <= end; }
    bool overlaps(Timestamp first, Timestamp last) const { return first <= end && last >= start; }

    auto operator<=>(const TimeWindow&) const = default;
};

// Validates start <= end.
TimeWindow make_window(Timestamp start, Timestamp end);

} // namespace eog
