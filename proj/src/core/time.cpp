#include "addictfree/core/time.hpp"

#include <charconv>
#include <cstdio>

#include "addictfree/core/error.hpp"

namespace addictfree {

using namespace std::chrono;

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

[[noreturn]] void malformed(std::string_view what, std::string_view text) {
  throw Error(ErrorCode::InvalidArgument,
              "malformed " + std::string(what) + ": '" + std::string(text) + "'");
}

int parse_fixed(std::string_view text, std::size_t pos, std::size_t len,
                std::string_view what, std::string_view whole) {
  if (pos + len > text.size()) malformed(what, whole);
  int value = 0;
  auto first = text.data() + pos;
  auto [ptr, ec] = std::from_chars(first, first + len, value);
  if (ec != std::errc{} || ptr != first + len) malformed(what, whole);
  return value;
}

void expect_char(std::string_view text, std::size_t pos, char c, std::string_view what) {
  if (pos >= text.size() || text[pos] != c) malformed(what, text);
}

Date checked_date(int y, int m, int d, std::string_view text) {
  Date date{year{y}, month{static_cast<unsigned>(m)}, day{static_cast<unsigned>(d)}};
  if (!date.ok()) malformed("date", text);
  return date;
}

}  // namespace

Timestamp floor_hour(Timestamp t) {
  return from_epoch(floor_div(to_epoch(t), kSecondsPerHour) * kSecondsPerHour);
}

Timestamp ceil_hour(Timestamp t) {
  Timestamp f = floor_hour(t);
  return f == t ? f : f + hours{1};
}

Date local_date(Timestamp t, int utc_offset_minutes) {
  auto local = t + minutes{utc_offset_minutes};
  return Date{floor<days>(local)};
}

int local_hour(Timestamp t, int utc_offset_minutes) {
  auto local = t + minutes{utc_offset_minutes};
  auto since_midnight = local - floor<days>(local);
  return static_cast<int>(duration_cast<hours>(since_midnight).count());
}

Timestamp local_midnight(Date d, int utc_offset_minutes) {
  return Timestamp{sys_days{d}} - minutes{utc_offset_minutes};
}

int iso_weekday_index(Date d) {
  return static_cast<int>(weekday{sys_days{d}}.iso_encoding()) - 1;
}

int days_in_month(Month m) {
  return static_cast<int>(static_cast<unsigned>(year_month_day_last{m / last}.day()));
}

std::string format_timestamp(Timestamp t) {
  auto dp = floor<days>(t);
  Date ymd{dp};
  hh_mm_ss<seconds> tod{t - dp};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ",
                static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()), static_cast<int>(tod.hours().count()),
                static_cast<int>(tod.minutes().count()),
                static_cast<int>(tod.seconds().count()));
  return buf;
}

std::string format_date(Date d) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()),
                static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
  return buf;
}

std::string format_month(Month m) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u", static_cast<int>(m.year()),
                static_cast<unsigned>(m.month()));
  return buf;
}

Date parse_date(std::string_view text) {
  if (text.size() != 10) malformed("date", text);
  int y = parse_fixed(text, 0, 4, "date", text);
  expect_char(text, 4, '-', "date");
  int m = parse_fixed(text, 5, 2, "date", text);
  expect_char(text, 7, '-', "date");
  int d = parse_fixed(text, 8, 2, "date", text);
  return checked_date(y, m, d, text);
}

Month parse_month(std::string_view text) {
  if (text.size() != 7) malformed("month", text);
  int y = parse_fixed(text, 0, 4, "month", text);
  expect_char(text, 4, '-', "month");
  int m = parse_fixed(text, 5, 2, "month", text);
  Month ym{year{y}, month{static_cast<unsigned>(m)}};
  if (!ym.ok()) malformed("month", text);
  return ym;
}

Timestamp parse_timestamp(std::string_view text) {
  if (text.size() < 20) malformed("timestamp", text);
  Date d = parse_date(text.substr(0, 10));
  if (text[10] != 'T' && text[10] != ' ') malformed("timestamp", text);
  int hh = parse_fixed(text, 11, 2, "timestamp", text);
  expect_char(text, 13, ':', "timestamp");
  int mm = parse_fixed(text, 14, 2, "timestamp", text);
  expect_char(text, 16, ':', "timestamp");
  int ss = parse_fixed(text, 17, 2, "timestamp", text);
  if (hh > 23 || mm > 59 || ss > 60) malformed("timestamp", text);

  std::string_view zone = text.substr(19);
  int offset_minutes = 0;
  if (zone == "Z") {
    offset_minutes = 0;
  } else if (zone.size() == 6 && (zone[0] == '+' || zone[0] == '-') && zone[3] == ':') {
    int oh = parse_fixed(zone, 1, 2, "timestamp", text);
    int om = parse_fixed(zone, 4, 2, "timestamp", text);
    offset_minutes = (zone[0] == '-' ? -1 : 1) * (oh * 60 + om);
  } else {
    malformed("timestamp", text);
  }
  return Timestamp{sys_days{d}} + hours{hh} + minutes{mm} + seconds{ss} -
         minutes{offset_minutes};
}

}  // namespace addictfree
