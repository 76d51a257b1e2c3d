#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace ede::util {

using Timestamp = std::chrono::sys_seconds;

/// Formats as RFC 3339 in UTC, e.g. "2020-01-01T00:00:00Z".
std::string format_rfc3339(Timestamp t);

/// Accepts "YYYY-MM-DDTHH:MM:SS" followed by "Z" or a "+HH:MM"/"-HH:MM" offset.
/// Fractional seconds are truncated. Returns nullopt on malformed input.
std::optional<Timestamp> parse_rfc3339(std::string_view text);

Timestamp now_utc();

}  // namespace ede::util
