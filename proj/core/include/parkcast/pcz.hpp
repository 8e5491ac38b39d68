#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "parkcast/cluster.hpp"
#include "parkcast/records.hpp"
#include "parkcast/series.hpp"

namespace parkcast {

/// Clustering features of one lot: location plus flow statistics.
struct LotFeature {
  std::string lot_id;
  double x = 0.0, y = 0.0;          // meters
  double mean_daily_inflow = 0.0;   // arrivals per day
  double mean_daily_outflow = 0.0;  // departures per day
  double capacity = 0.0;
};

/// Flow statistics over an explicit span. The 24h-count variants below
/// infer the span from the records themselves.
LotFeature lot_feature_vector(const std::vector<ParkingRecord>& lot_records,
                              Point location, double span_days);
LotFeature lot_feature_vector(const std::vector<ParkingRecord>& lot_records,
                              Point location);

/// A cluster of lots with a buffer region: the union over member lots of
/// Minkowski balls of the given radius and order.
struct ParkingClusterZone {
  std::string zone_id;
  std::vector<std::string> lot_ids;  // same order as centers
  std::vector<Point> centers;
  double radius = 500.0;  // meters
  double p = 1.0;         // Minkowski order >= 1
};

ParkingClusterZone build_pcz(const std::vector<LotFeature>& cluster,
                             double radius, double p,
                             const std::string& zone_id);

/// True when the point lies within `radius` (closed) of any member lot
/// under the zone's Minkowski order.
bool contains(const ParkingClusterZone& zone, Point q);

struct FuseReport {
  std::size_t increments = 0;          // endpoint hits inside the grid
  std::size_t out_of_grid = 0;         // endpoint inside zone, time outside grid
};

/// Counts trip endpoints per mode and interval. An origin inside the zone
/// increments at its departure time, a destination inside the zone at its
/// arrival time; a trip with both endpoints inside contributes twice.
DemandSeries fuse_demand(const std::vector<TripRecord>& trips,
                         const ParkingClusterZone& zone, const TimeGrid& grid,
                         FuseReport* report = nullptr);

/// Builds the per-target frame: availability channels ordered target lot
/// first (rest by id), demand channels appended in fixed mode order and
/// scaled to [0, 1]. When `demand_scale` is given (per-mode maxima from the
/// training zones) it is used; otherwise the series' own maxima are used.
FeatureFrame assemble_frame(const ParkingClusterZone& zone,
                            const std::vector<AvailabilitySeries>& availability,
                            const DemandSeries& demand,
                            const std::string& target_lot,
                            const std::optional<std::array<double, kNumModes>>&
                                demand_scale = std::nullopt);

/// JSON (de)serialization of zone definitions plus the split plan.
std::string zones_to_json(const std::vector<ParkingClusterZone>& zones,
                          const SplitPlan& split,
                          const std::string& provenance_json = "");
std::pair<std::vector<ParkingClusterZone>, SplitPlan> zones_from_json(
    const std::string& text);

}  // namespace parkcast
