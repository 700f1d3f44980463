#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace livedata {

using Timestamp = std::chrono::sys_seconds;

/// Lower-case hex SHA-256 of `bytes`.
std::string sha256_hex(std::string_view bytes);

/// RFC-3339 UTC with second precision: `YYYY-MM-DDTHH:MM:SSZ`.
std::string format_timestamp(Timestamp t);
Timestamp parse_timestamp(std::string_view text);
Timestamp now_utc();

/// `count` random bytes as lower-case hex, from the OS CSPRNG.
std::string random_hex(std::size_t count);

std::vector<std::string> split(std::string_view text, char sep);
std::string to_lower_ascii(std::string_view text);

/// Percent-encodes everything except RFC-3986 unreserved characters.
std::string percent_encode(std::string_view text);
std::string percent_decode(std::string_view text);

bool starts_with(std::string_view text, std::string_view prefix);

}  // namespace livedata
