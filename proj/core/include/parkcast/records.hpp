#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>

#include "parkcast/time.hpp"

namespace parkcast {

struct Point {
  double x = 0.0;  // projected meters
  double y = 0.0;
};

enum class Mode : int { kMetro = 0, kBus = 1, kRideHailing = 2, kTaxi = 3 };

constexpr int kNumModes = 4;
constexpr std::array<const char*, kNumModes> kModeNames = {
    "metro", "bus", "ride_hailing", "taxi"};

std::optional<Mode> mode_from_name(const std::string& name);

/// One vehicle stay at a parking lot.
struct ParkingRecord {
  std::string lot_id;
  Timestamp arrival = 0;
  Timestamp departure = 0;
  Timestamp date = 0;  // local midnight of the record's calendar date
  int capacity = 0;    // total spots of the lot
};

/// One trip of a travel mode. Bus records are boarding-only: they carry
/// origin and departure time, never a destination or arrival time.
struct TripRecord {
  Mode mode = Mode::kMetro;
  Point origin;
  std::optional<Point> destination;
  Timestamp depart_time = 0;
  std::optional<Timestamp> arrive_time;
};

/// Reconciled accounting of a cleaning pass: total = missing + invalid + retained.
struct DropReport {
  std::size_t total_rows = 0;
  std::size_t dropped_missing = 0;  // NULL/empty required cells
  std::size_t dropped_invalid = 0;  // malformed or invariant-violating rows
  std::size_t retained = 0;

  DropReport& operator+=(const DropReport& other) {
    total_rows += other.total_rows;
    dropped_missing += other.dropped_missing;
    dropped_invalid += other.dropped_invalid;
    retained += other.retained;
    return *this;
  }
};

/// Parser output before cleaning: every cell is optional so that
/// validate_and_drop can classify problems instead of the parser
/// silently skipping rows.
struct RawParkingRow {
  std::optional<std::string> lot_id;
  std::optional<Timestamp> arrival;
  std::optional<Timestamp> departure;
  std::optional<Timestamp> date;
  std::optional<int> capacity;
  bool malformed = false;  // a non-empty cell failed to parse
};

struct RawTripRow {
  Mode mode = Mode::kMetro;
  std::optional<double> o_x, o_y, d_x, d_y;
  std::optional<Timestamp> depart_time;
  std::optional<Timestamp> arrive_time;
  bool malformed = false;
};

}  // namespace parkcast
