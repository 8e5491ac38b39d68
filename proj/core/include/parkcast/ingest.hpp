#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "parkcast/records.hpp"

namespace parkcast {

/// Maps logical field names to the column names used by a particular file.
/// Fields not present in the map keep their default column names.
using ColumnMap = std::map<std::string, std::string>;

ColumnMap default_parking_schema();  // lot_id, arrival, departure, date, capacity
ColumnMap default_trip_schema();     // o_x, o_y, d_x, d_y, depart_time, arrive_time

/// Reads comma-separated parking rows. One raw row per data line, in file
/// order; malformed rows are carried through (flagged) so validate_and_drop
/// can count them rather than losing them here.
/// Throws SchemaError when a mandatory column is missing from the header.
std::vector<RawParkingRow> parse_parking_records(
    std::istream& source, const ColumnMap& schema = default_parking_schema());

/// Reads trip rows and tags every record with `mode`. Bus sources may lack
/// the destination columns entirely; bus rows always get destination and
/// arrive_time = absent.
std::vector<RawTripRow> parse_trip_records(
    std::istream& source, Mode mode,
    const ColumnMap& schema = default_trip_schema());

/// Keeps rows satisfying the record invariants, drops the rest, and
/// reconciles counts. Empty required cells count as missing (dropna
/// semantics); malformed cells and invariant violations count as invalid.
std::pair<std::vector<ParkingRecord>, DropReport> validate_and_drop(
    const std::vector<RawParkingRow>& rows);

/// Trip cleaning. A non-bus row without a full destination or an arrival
/// time is invalid; a bus row never carries either.
std::pair<std::vector<TripRecord>, DropReport> validate_and_drop(
    const std::vector<RawTripRow>& rows);

/// Re-checks already-typed records (used for idempotence: a clean set
/// passes with zero drops).
std::pair<std::vector<ParkingRecord>, DropReport> validate_and_drop(
    const std::vector<ParkingRecord>& records);
std::pair<std::vector<TripRecord>, DropReport> validate_and_drop(
    const std::vector<TripRecord>& records);

/// Serialization that round-trips exactly through the default schemas.
void write_parking_csv(std::ostream& out, const std::vector<ParkingRecord>& records);
void write_trip_csv(std::ostream& out, const std::vector<TripRecord>& trips,
                    bool boarding_only);

/// Converts raw longitude/latitude to projected meters around a reference
/// point (equirectangular projection). Inputs already in meters pass through
/// untouched upstream; this is applied only when a source declares degrees.
Point project_lon_lat(double lon_deg, double lat_deg, double ref_lon_deg,
                      double ref_lat_deg);

}  // namespace parkcast
