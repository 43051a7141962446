#include "placemotif/calendar.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>

#include "placemotif/error.hpp"

namespace placemotif {
namespace {

using namespace std::chrono;

[[noreturn]] void bad_timestamp(std::string_view text, const char* why) {
  throw Error(ErrorCode::Parse,
              "invalid timestamp '" + std::string(text) + "': " + why);
}

// Reads exactly `width` digits starting at `pos`.
bool read_digits(std::string_view s, std::size_t pos, std::size_t width,
                 int& out) {
  if (pos + width > s.size()) return false;
  int v = 0;
  for (std::size_t i = pos; i < pos + width; ++i) {
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    v = v * 10 + (s[i] - '0');
  }
  out = v;
  return true;
}

bool parse_ymd(std::string_view s, year_month_day& out) {
  int y = 0, m = 0, d = 0;
  if (s.size() < 10 || s[4] != '-' || s[7] != '-') return false;
  if (!read_digits(s, 0, 4, y) || !read_digits(s, 5, 2, m) ||
      !read_digits(s, 8, 2, d)) {
    return false;
  }
  out = year{y} / month{static_cast<unsigned>(m)} / day{static_cast<unsigned>(d)};
  return out.ok();
}

}  // namespace

std::vector<Date> DateRange::days() const {
  std::vector<Date> out;
  for (Date d = first; d <= last; d += std::chrono::days{1}) out.push_back(d);
  return out;
}

Date parse_date(std::string_view text) {
  year_month_day ymd;
  if (text.size() != 10 || !parse_ymd(text, ymd)) {
    throw Error(ErrorCode::Parse, "invalid date '" + std::string(text) +
                                      "' (expected YYYY-MM-DD)");
  }
  return sys_days{ymd};
}

std::string format_date(Date d) {
  const year_month_day ymd{d};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()));
  return buf;
}

DateRange parse_date_range(std::string_view first, std::string_view last) {
  DateRange r{parse_date(first), parse_date(last)};
  if (r.last < r.first) {
    throw Error(ErrorCode::InvalidArgument,
                "date range ends before it starts: " + std::string(first) +
                    ".." + std::string(last));
  }
  return r;
}

std::int64_t parse_timestamp(std::string_view text) {
  if (text.empty()) bad_timestamp(text, "empty");

  // Integer epoch seconds.
  if (text.find_first_not_of("+-0123456789") == std::string_view::npos) {
    std::int64_t v = 0;
    const char* begin = text.data();
    if (*begin == '+') ++begin;
    auto [ptr, ec] = std::from_chars(begin, text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
      bad_timestamp(text, "not an integer");
    }
    return v;
  }

  year_month_day ymd;
  if (!parse_ymd(text, ymd)) bad_timestamp(text, "bad date part");
  if (text.size() < 19 || (text[10] != 'T' && text[10] != 't' && text[10] != ' ')) {
    bad_timestamp(text, "missing time part");
  }
  int hh = 0, mm = 0, ss = 0;
  if (!read_digits(text, 11, 2, hh) || text[13] != ':' ||
      !read_digits(text, 14, 2, mm) || text[16] != ':' ||
      !read_digits(text, 17, 2, ss)) {
    bad_timestamp(text, "bad time part");
  }
  if (hh > 23 || mm > 59 || ss > 60) bad_timestamp(text, "time out of range");

  std::size_t pos = 19;
  if (pos < text.size() && text[pos] == '.') {
    ++pos;
    const std::size_t digits_start = pos;
    while (pos < text.size() &&
           std::isdigit(static_cast<unsigned char>(text[pos]))) {
      ++pos;
    }
    if (pos == digits_start) bad_timestamp(text, "empty fraction");
  }

  int offset_seconds = 0;
  if (pos >= text.size()) bad_timestamp(text, "missing UTC offset");
  if (text[pos] == 'Z' || text[pos] == 'z') {
    ++pos;
  } else if (text[pos] == '+' || text[pos] == '-') {
    int oh = 0, om = 0;
    if (!read_digits(text, pos + 1, 2, oh) || pos + 3 >= text.size() ||
        text[pos + 3] != ':' || !read_digits(text, pos + 4, 2, om)) {
      bad_timestamp(text, "bad UTC offset");
    }
    if (oh > 23 || om > 59) bad_timestamp(text, "UTC offset out of range");
    offset_seconds = (oh * 3600 + om * 60) * (text[pos] == '-' ? -1 : 1);
    pos += 6;
  } else {
    bad_timestamp(text, "bad UTC offset");
  }
  if (pos != text.size()) bad_timestamp(text, "trailing characters");

  const auto day_seconds =
      static_cast<std::int64_t>(sys_days{ymd}.time_since_epoch().count()) * 86400;
  return day_seconds + hh * 3600 + mm * 60 + ss - offset_seconds;
}

std::string format_timestamp(std::int64_t epoch_seconds) {
  const sys_seconds tp{seconds{epoch_seconds}};
  const auto day = floor<days>(tp);
  const hh_mm_ss hms{tp - day};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%sT%02d:%02d:%02dZ", format_date(day).c_str(),
                static_cast<int>(hms.hours().count()),
                static_cast<int>(hms.minutes().count()),
                static_cast<int>(hms.seconds().count()));
  return buf;
}

Date local_date(std::int64_t epoch_seconds, int utc_offset_minutes) {
  const sys_seconds tp{seconds{epoch_seconds + std::int64_t{utc_offset_minutes} * 60}};
  return floor<days>(tp);
}

}  // namespace placemotif
