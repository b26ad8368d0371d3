#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <string_view>

namespace addictfree {

// All instants are UTC seconds. Local calendars only appear as an explicit
// offset applied when bucketing by date.
using Timestamp = std::chrono::sys_seconds;
using Seconds = std::chrono::seconds;
using Date = std::chrono::year_month_day;
using Month = std::chrono::year_month;

constexpr std::int64_t kSecondsPerHour = 3600;
constexpr std::int64_t kSecondsPerDay = 86400;

inline Timestamp from_epoch(std::int64_t secs) { return Timestamp{Seconds{secs}}; }
inline std::int64_t to_epoch(Timestamp t) { return t.time_since_epoch().count(); }

Timestamp floor_hour(Timestamp t);
Timestamp ceil_hour(Timestamp t);

/// Calendar date of `t` as seen from a fixed UTC offset.
Date local_date(Timestamp t, int utc_offset_minutes);
/// Hour of day (0..23) of `t` as seen from a fixed UTC offset.
int local_hour(Timestamp t, int utc_offset_minutes);
/// UTC instant of local midnight starting `d` at the given offset.
Timestamp local_midnight(Date d, int utc_offset_minutes);

/// 0 = Monday ... 6 = Sunday.
int iso_weekday_index(Date d);
int days_in_month(Month m);

std::string format_timestamp(Timestamp t);  // 2024-03-01T18:00:00Z
std::string format_date(Date d);            // 2024-03-01
std::string format_month(Month m);          // 2024-03

// Parsers throw Error{ErrorCode::InvalidArgument} on malformed input.
// Timestamps accept a trailing 'Z' or a +hh:mm / -hh:mm offset.
Timestamp parse_timestamp(std::string_view text);
Date parse_date(std::string_view text);
Month parse_month(std::string_view text);

}  // namespace addictfree
