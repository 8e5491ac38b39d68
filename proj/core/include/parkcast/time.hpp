#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace parkcast {

/// Seconds since 1970-01-01T00:00:00 in local wall-clock time.
/// The datasets handled here live in a single timezone, so the offset of
/// the epoch is irrelevant as long as it is applied consistently.
using Timestamp = std::int64_t;

constexpr std::int64_t kSecondsPerDay = 86400;

struct CivilTime {
  int year = 1970;
  int month = 1;       // 1..12
  int day = 1;         // 1..31
  int hour = 0;
  int minute = 0;
  int second = 0;
  int weekday = 0;     // 0 = Monday .. 6 = Sunday
  int days_in_month = 31;
};

/// Days since 1970-01-01 for a civil date (proleptic Gregorian).
std::int64_t days_from_civil(int year, int month, int day);

CivilTime civil_from_timestamp(Timestamp t);

/// Parses "YYYY-MM-DD" into the timestamp of local midnight.
std::optional<Timestamp> parse_date(std::string_view text);

/// Parses "YYYY-MM-DDTHH:MM[:SS]" (a space also accepted as separator).
std::optional<Timestamp> parse_timestamp(std::string_view text);

/// Formats as "YYYY-MM-DDTHH:MM:SS".
std::string format_timestamp(Timestamp t);

/// Formats as "YYYY-MM-DD".
std::string format_date(Timestamp t);

}  // namespace parkcast
