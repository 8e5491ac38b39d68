#include "parkcast/ingest.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <istream>
#include <ostream>

#include "parkcast/csv.hpp"
#include "parkcast/errors.hpp"

namespace parkcast {
namespace {

const std::string& column_name(const ColumnMap& schema, const std::string& field) {
  auto it = schema.find(field);
  static const std::string kSame;
  return it == schema.end() ? field : it->second;
}

// Empty cell -> nullopt; unparseable cell -> nullopt + malformed flag.
std::optional<double> parse_double_cell(const std::string& cell, bool& malformed) {
  if (cell.empty()) return std::nullopt;
  errno = 0;
  char* end = nullptr;
  double v = std::strtod(cell.c_str(), &end);
  if (end != cell.c_str() + cell.size() || errno == ERANGE || !std::isfinite(v)) {
    malformed = true;
    return std::nullopt;
  }
  return v;
}

std::optional<int> parse_int_cell(const std::string& cell, bool& malformed) {
  if (cell.empty()) return std::nullopt;
  errno = 0;
  char* end = nullptr;
  long v = std::strtol(cell.c_str(), &end, 10);
  if (end != cell.c_str() + cell.size() || errno == ERANGE) {
    malformed = true;
    return std::nullopt;
  }
  return static_cast<int>(v);
}

std::optional<Timestamp> parse_time_cell(const std::string& cell, bool& malformed) {
  if (cell.empty()) return std::nullopt;
  auto t = parse_timestamp(cell);
  if (!t) malformed = true;
  return t;
}

std::optional<Timestamp> parse_date_cell(const std::string& cell, bool& malformed) {
  if (cell.empty()) return std::nullopt;
  auto t = parse_date(cell);
  if (!t) malformed = true;
  return t;
}

bool parking_fields_present(const RawParkingRow& r) {
  return r.lot_id && r.arrival && r.departure && r.date && r.capacity;
}

bool parking_invariants_hold(const RawParkingRow& r) {
  return *r.departure > *r.arrival && *r.capacity >= 1;
}

}  // namespace

std::optional<Mode> mode_from_name(const std::string& name) {
  for (int i = 0; i < kNumModes; ++i)
    if (name == kModeNames[i]) return static_cast<Mode>(i);
  return std::nullopt;
}

ColumnMap default_parking_schema() {
  return {{"lot_id", "lot_id"},
          {"arrival", "arrival"},
          {"departure", "departure"},
          {"date", "date"},
          {"capacity", "capacity"}};
}

ColumnMap default_trip_schema() {
  return {{"o_x", "o_x"},       {"o_y", "o_y"},
          {"d_x", "d_x"},       {"d_y", "d_y"},
          {"depart_time", "depart_time"},
          {"arrive_time", "arrive_time"}};
}

std::vector<RawParkingRow> parse_parking_records(std::istream& source,
                                                 const ColumnMap& schema) {
  if (!source) throw DataError("unreadable parking source");
  CsvReader reader(source);
  const std::size_t c_lot = reader.column(column_name(schema, "lot_id"));
  const std::size_t c_arr = reader.column(column_name(schema, "arrival"));
  const std::size_t c_dep = reader.column(column_name(schema, "departure"));
  const std::size_t c_date = reader.column(column_name(schema, "date"));
  const std::size_t c_cap = reader.column(column_name(schema, "capacity"));

  std::vector<RawParkingRow> rows;
  std::vector<std::string> cells;
  while (reader.next_row(cells)) {
    RawParkingRow r;
    if (!cells[c_lot].empty()) r.lot_id = cells[c_lot];
    r.arrival = parse_time_cell(cells[c_arr], r.malformed);
    r.departure = parse_time_cell(cells[c_dep], r.malformed);
    r.date = parse_date_cell(cells[c_date], r.malformed);
    r.capacity = parse_int_cell(cells[c_cap], r.malformed);
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<RawTripRow> parse_trip_records(std::istream& source, Mode mode,
                                           const ColumnMap& schema) {
  if (!source) throw DataError("unreadable trip source");
  CsvReader reader(source);
  const bool boarding_only = mode == Mode::kBus;
  const std::size_t c_ox = reader.column(column_name(schema, "o_x"));
  const std::size_t c_oy = reader.column(column_name(schema, "o_y"));
  const std::size_t c_dep = reader.column(column_name(schema, "depart_time"));

  // Bus sources may omit these columns entirely.
  std::size_t c_dx = 0, c_dy = 0, c_arr = 0;
  bool has_dest = reader.has_column(column_name(schema, "d_x")) &&
                  reader.has_column(column_name(schema, "d_y"));
  bool has_arrive = reader.has_column(column_name(schema, "arrive_time"));
  if (!boarding_only) {
    c_dx = reader.column(column_name(schema, "d_x"));
    c_dy = reader.column(column_name(schema, "d_y"));
    c_arr = reader.column(column_name(schema, "arrive_time"));
  } else {
    if (has_dest) {
      c_dx = reader.column(column_name(schema, "d_x"));
      c_dy = reader.column(column_name(schema, "d_y"));
    }
    if (has_arrive) c_arr = reader.column(column_name(schema, "arrive_time"));
  }

  std::vector<RawTripRow> rows;
  std::vector<std::string> cells;
  while (reader.next_row(cells)) {
    RawTripRow r;
    r.mode = mode;
    r.o_x = parse_double_cell(cells[c_ox], r.malformed);
    r.o_y = parse_double_cell(cells[c_oy], r.malformed);
    r.depart_time = parse_time_cell(cells[c_dep], r.malformed);
    if (!boarding_only) {
      r.d_x = parse_double_cell(cells[c_dx], r.malformed);
      r.d_y = parse_double_cell(cells[c_dy], r.malformed);
      r.arrive_time = parse_time_cell(cells[c_arr], r.malformed);
    }
    // Boarding-only rows never carry a destination, even if the file has
    // the columns.
    rows.push_back(std::move(r));
  }
  return rows;
}

std::pair<std::vector<ParkingRecord>, DropReport> validate_and_drop(
    const std::vector<RawParkingRow>& rows) {
  std::vector<ParkingRecord> clean;
  DropReport report;
  report.total_rows = rows.size();
  for (const auto& r : rows) {
    if (r.malformed) {
      ++report.dropped_invalid;
      continue;
    }
    if (!parking_fields_present(r)) {
      ++report.dropped_missing;
      continue;
    }
    if (!parking_invariants_hold(r)) {
      ++report.dropped_invalid;
      continue;
    }
    clean.push_back({*r.lot_id, *r.arrival, *r.departure, *r.date, *r.capacity});
  }
  report.retained = clean.size();
  return {std::move(clean), report};
}

std::pair<std::vector<TripRecord>, DropReport> validate_and_drop(
    const std::vector<RawTripRow>& rows) {
  std::vector<TripRecord> clean;
  DropReport report;
  report.total_rows = rows.size();
  for (const auto& r : rows) {
    const bool boarding_only = r.mode == Mode::kBus;
    if (r.malformed) {
      ++report.dropped_invalid;
      continue;
    }
    if (!r.depart_time) {
      ++report.dropped_missing;
      continue;
    }
    // A trip without its endpoints is not a usable OD record.
    if (!r.o_x || !r.o_y) {
      ++report.dropped_invalid;
      continue;
    }
    if (!boarding_only) {
      if (!r.d_x || !r.d_y || !r.arrive_time) {
        ++report.dropped_invalid;
        continue;
      }
      if (*r.arrive_time < *r.depart_time) {
        ++report.dropped_invalid;
        continue;
      }
    }
    TripRecord t;
    t.mode = r.mode;
    t.origin = {*r.o_x, *r.o_y};
    t.depart_time = *r.depart_time;
    if (!boarding_only) {
      t.destination = Point{*r.d_x, *r.d_y};
      t.arrive_time = *r.arrive_time;
    }
    clean.push_back(std::move(t));
  }
  report.retained = clean.size();
  return {std::move(clean), report};
}

std::pair<std::vector<ParkingRecord>, DropReport> validate_and_drop(
    const std::vector<ParkingRecord>& records) {
  std::vector<RawParkingRow> rows;
  rows.reserve(records.size());
  for (const auto& r : records) {
    RawParkingRow raw;
    if (!r.lot_id.empty()) raw.lot_id = r.lot_id;
    raw.arrival = r.arrival;
    raw.departure = r.departure;
    raw.date = r.date;
    raw.capacity = r.capacity;
    rows.push_back(std::move(raw));
  }
  return validate_and_drop(rows);
}

std::pair<std::vector<TripRecord>, DropReport> validate_and_drop(
    const std::vector<TripRecord>& records) {
  std::vector<RawTripRow> rows;
  rows.reserve(records.size());
  for (const auto& t : records) {
    RawTripRow raw;
    raw.mode = t.mode;
    raw.o_x = t.origin.x;
    raw.o_y = t.origin.y;
    raw.depart_time = t.depart_time;
    if (t.destination) {
      raw.d_x = t.destination->x;
      raw.d_y = t.destination->y;
    }
    raw.arrive_time = t.arrive_time;
    rows.push_back(std::move(raw));
  }
  return validate_and_drop(rows);
}

void write_parking_csv(std::ostream& out, const std::vector<ParkingRecord>& records) {
  out << "lot_id,arrival,departure,date,capacity\n";
  for (const auto& r : records) {
    out << r.lot_id << ',' << format_timestamp(r.arrival) << ','
        << format_timestamp(r.departure) << ',' << format_date(r.date) << ','
        << r.capacity << '\n';
  }
}

void write_trip_csv(std::ostream& out, const std::vector<TripRecord>& trips,
                    bool boarding_only) {
  if (boarding_only)
    out << "mode,o_x,o_y,depart_time\n";
  else
    out << "mode,o_x,o_y,d_x,d_y,depart_time,arrive_time\n";
  for (const auto& t : trips) {
    out << kModeNames[static_cast<int>(t.mode)] << ',' << format_double(t.origin.x)
        << ',' << format_double(t.origin.y) << ',';
    if (!boarding_only) {
      if (t.destination)
        out << format_double(t.destination->x) << ',' << format_double(t.destination->y);
      else
        out << ',';
      out << ',';
    }
    out << format_timestamp(t.depart_time);
    if (!boarding_only) {
      out << ',';
      if (t.arrive_time) out << format_timestamp(*t.arrive_time);
    }
    out << '\n';
  }
}

Point project_lon_lat(double lon_deg, double lat_deg, double ref_lon_deg,
                      double ref_lat_deg) {
  constexpr double kEarthRadius = 6371000.0;
  constexpr double kDegToRad = 0.017453292519943295;
  const double x = (lon_deg - ref_lon_deg) * kDegToRad * kEarthRadius *
                   std::cos(ref_lat_deg * kDegToRad);
  const double y = (lat_deg - ref_lat_deg) * kDegToRad * kEarthRadius;
  return {x, y};
}

}  // namespace parkcast
