#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <string_view>

namespace vigil {

// All persisted instants carry microsecond precision so that serialization
// round-trips exactly.
using Timestamp = std::chrono::sys_time<std::chrono::microseconds>;
using Seconds = std::chrono::duration<double>;

Timestamp now_utc();

Timestamp from_unix_seconds(std::int64_t seconds);
std::int64_t to_unix_seconds(Timestamp t);

/// ISO-8601 UTC, e.g. "2018-01-20T03:18:52.000000Z".
std::string format_iso8601(Timestamp t);

/// Accepts "YYYY-MM-DDTHH:MM:SS[.ffffff]Z". Throws vigil::Error on anything else.
Timestamp parse_iso8601(std::string_view text);

}  // namespace vigil
