#pragma once

#include <cstdint>
#include <string>

namespace engram {

// Renders epoch seconds as "YYYY-MM-DDTHH:MM:SSZ" (UTC).
std::string format_iso8601_utc(std::int64_t epoch_seconds);

// Accepts raw epoch seconds ("1700000000") or ISO-8601 in the forms
// "2024-03-07", "2024-03-07T12:00", "2024-03-07T12:00:05",
// "2024-03-07T12:00:05Z" and "2024-03-07T12:00:05+09:00".
// A missing zone designator is read as UTC.
std::int64_t parse_time(const std::string& text);

std::int64_t now_epoch_seconds();

}  // namespace engram
