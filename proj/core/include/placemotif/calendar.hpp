#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace placemotif {

using Date = std::chrono::sys_days;

/// Inclusive range of calendar dates.
struct DateRange {
  Date first;
  Date last;

  bool contains(Date d) const { return first <= d && d <= last; }
  bool contains(const DateRange& other) const {
    return first <= other.first && other.last <= last;
  }
  int length() const { return (last - first).count() + 1; }
  std::vector<Date> days() const;
};

/// Parses `YYYY-MM-DD`. Throws Error(Parse) on malformed or invalid dates.
Date parse_date(std::string_view text);
std::string format_date(Date d);
DateRange parse_date_range(std::string_view first, std::string_view last);

/// Days since `from` (negative when `to` precedes it).
inline int days_between(Date from, Date to) { return (to - from).count(); }

/// Sunday = 0 ... Saturday = 6.
inline unsigned weekday_index(Date d) {
  return std::chrono::weekday{d}.c_encoding();
}

/// Accepts RFC 3339 (`2021-08-01T08:00:00Z`, `...-05:00`, fractional seconds
/// truncated) or integer epoch seconds. Returns UTC epoch seconds.
std::int64_t parse_timestamp(std::string_view text);
/// RFC 3339 in UTC with a `Z` suffix.
std::string format_timestamp(std::int64_t epoch_seconds);

/// Calendar date of an instant seen from a fixed UTC offset.
Date local_date(std::int64_t epoch_seconds, int utc_offset_minutes);

}  // namespace placemotif
