#include "parkcast/time.hpp"

#include <array>
#include <cstdio>

namespace parkcast {
namespace {

bool is_leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

int month_length(int year, int month) {
  static constexpr std::array<int, 12> kDays = {31, 28, 31, 30, 31, 30,
                                                31, 31, 30, 31, 30, 31};
  if (month == 2 && is_leap(year)) return 29;
  return kDays[month - 1];
}

// Parses a fixed-width decimal field, returns -1 on any non-digit.
int parse_int_field(std::string_view s, size_t pos, size_t len) {
  if (pos + len > s.size()) return -1;
  int v = 0;
  for (size_t i = pos; i < pos + len; ++i) {
    char c = s[i];
    if (c < '0' || c > '9') return -1;
    v = v * 10 + (c - '0');
  }
  return v;
}

}  // namespace

std::int64_t days_from_civil(int y, int m, int d) {
  // Howard Hinnant's algorithm, shifted so day 0 is 1970-01-01.
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

namespace {

void civil_from_days(std::int64_t z, int& y, int& m, int& d) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t yy = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
  m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
  y = static_cast<int>(yy + (m <= 2));
}

}  // namespace

CivilTime civil_from_timestamp(Timestamp t) {
  std::int64_t days = t / kSecondsPerDay;
  std::int64_t sod = t % kSecondsPerDay;
  if (sod < 0) {
    sod += kSecondsPerDay;
    days -= 1;
  }
  CivilTime c;
  civil_from_days(days, c.year, c.month, c.day);
  c.hour = static_cast<int>(sod / 3600);
  c.minute = static_cast<int>((sod % 3600) / 60);
  c.second = static_cast<int>(sod % 60);
  // 1970-01-01 was a Thursday; weekday 0 is Monday.
  c.weekday = static_cast<int>(((days % 7) + 7 + 3) % 7);
  c.days_in_month = month_length(c.year, c.month);
  return c;
}

std::optional<Timestamp> parse_date(std::string_view s) {
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
  int y = parse_int_field(s, 0, 4);
  int m = parse_int_field(s, 5, 2);
  int d = parse_int_field(s, 8, 2);
  if (y < 0 || m < 1 || m > 12 || d < 1) return std::nullopt;
  if (d > month_length(y, m)) return std::nullopt;
  return days_from_civil(y, m, d) * kSecondsPerDay;
}

std::optional<Timestamp> parse_timestamp(std::string_view s) {
  // "YYYY-MM-DD[T ]HH:MM" with optional ":SS".
  if (s.size() < 16) return std::nullopt;
  if (s[10] != 'T' && s[10] != ' ') return std::nullopt;
  auto date = parse_date(s.substr(0, 10));
  if (!date) return std::nullopt;
  int hh = parse_int_field(s, 11, 2);
  int mm = parse_int_field(s, 14, 2);
  if (hh < 0 || hh > 23 || mm < 0 || mm > 59 || s[13] != ':') return std::nullopt;
  int ss = 0;
  if (s.size() == 19) {
    if (s[16] != ':') return std::nullopt;
    ss = parse_int_field(s, 17, 2);
    if (ss < 0 || ss > 59) return std::nullopt;
  } else if (s.size() != 16) {
    return std::nullopt;
  }
  return *date + hh * 3600 + mm * 60 + ss;
}

std::string format_timestamp(Timestamp t) {
  CivilTime c = civil_from_timestamp(t);
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02d", c.year,
                c.month, c.day, c.hour, c.minute, c.second);
  return buf;
}

std::string format_date(Timestamp t) {
  CivilTime c = civil_from_timestamp(t);
  char buf[12];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", c.year, c.month, c.day);
  return buf;
}

}  // namespace parkcast
