#include "parkcast/pcz.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "parkcast/errors.hpp"

namespace parkcast {

LotFeature lot_feature_vector(const std::vector<ParkingRecord>& lot_records,
                              Point location, double span_days) {
  if (lot_records.empty())
    throw DataError("lot_feature_vector: no records for lot");
  if (span_days <= 0.0) throw ConfigError("lot_feature_vector: span must be positive");
  LotFeature f;
  f.lot_id = lot_records.front().lot_id;
  f.x = location.x;
  f.y = location.y;
  f.capacity = static_cast<double>(lot_records.front().capacity);
  f.mean_daily_inflow = static_cast<double>(lot_records.size()) / span_days;
  f.mean_daily_outflow = f.mean_daily_inflow;  // one departure per stay
  return f;
}

LotFeature lot_feature_vector(const std::vector<ParkingRecord>& lot_records,
                              Point location) {
  if (lot_records.empty())
    throw DataError("lot_feature_vector: no records for lot");
  Timestamp lo = lot_records.front().arrival;
  Timestamp hi = lot_records.front().departure;
  for (const auto& r : lot_records) {
    lo = std::min(lo, r.arrival);
    hi = std::max(hi, r.departure);
  }
  const double span_days = std::max(
      1.0, std::ceil(static_cast<double>(hi - lo) / kSecondsPerDay));
  return lot_feature_vector(lot_records, location, span_days);
}

ParkingClusterZone build_pcz(const std::vector<LotFeature>& cluster,
                             double radius, double p,
                             const std::string& zone_id) {
  if (cluster.empty()) throw DataError("build_pcz: empty cluster");
  if (p < 1.0) throw ConfigError("build_pcz: Minkowski order must be >= 1");
  ParkingClusterZone zone;
  zone.zone_id = zone_id;
  zone.radius = radius;
  zone.p = p;
  for (const auto& f : cluster) {
    zone.lot_ids.push_back(f.lot_id);
    zone.centers.push_back({f.x, f.y});
  }
  return zone;
}

bool contains(const ParkingClusterZone& zone, Point q) {
  for (const auto& c : zone.centers) {
    const double d = minkowski_distance({q.x, q.y}, {c.x, c.y}, zone.p);
    if (d <= zone.radius) return true;
  }
  return false;
}

namespace {

// Bin index of an instant, or -1 when outside the grid.
std::int64_t bin_of(const TimeGrid& grid, Timestamp t) {
  if (t < grid.start) return -1;
  const std::int64_t b = (t - grid.start) / grid.step;
  if (b >= static_cast<std::int64_t>(grid.length)) return -1;
  return b;
}

}  // namespace

DemandSeries fuse_demand(const std::vector<TripRecord>& trips,
                         const ParkingClusterZone& zone, const TimeGrid& grid,
                         FuseReport* report) {
  DemandSeries out;
  out.zone_id = zone.zone_id;
  out.grid = grid;
  for (auto& ch : out.channels) ch.assign(grid.length, 0.0);
  FuseReport local;
  for (const auto& trip : trips) {
    auto& channel = out.channels[static_cast<int>(trip.mode)];
    if (contains(zone, trip.origin)) {
      const std::int64_t b = bin_of(grid, trip.depart_time);
      if (b >= 0) {
        channel[static_cast<std::size_t>(b)] += 1.0;
        ++local.increments;
      } else {
        ++local.out_of_grid;
      }
    }
    if (trip.destination && contains(zone, *trip.destination)) {
      if (!trip.arrive_time)
        throw DataError("trip with destination but no arrival time");
      const std::int64_t b = bin_of(grid, *trip.arrive_time);
      if (b >= 0) {
        channel[static_cast<std::size_t>(b)] += 1.0;
        ++local.increments;
      } else {
        ++local.out_of_grid;
      }
    }
  }
  if (report) *report = local;
  return out;
}

FeatureFrame assemble_frame(const ParkingClusterZone& zone,
                            const std::vector<AvailabilitySeries>& availability,
                            const DemandSeries& demand,
                            const std::string& target_lot,
                            const std::optional<std::array<double, kNumModes>>&
                                demand_scale) {
  if (std::find(zone.lot_ids.begin(), zone.lot_ids.end(), target_lot) ==
      zone.lot_ids.end())
    throw DataError("target lot '" + target_lot + "' is not in zone " + zone.zone_id);

  FeatureFrame frame;
  frame.zone_id = zone.zone_id;
  frame.grid = demand.grid;

  // Availability channels: target first, everyone else by id.
  std::vector<std::string> rest;
  for (const auto& id : zone.lot_ids)
    if (id != target_lot) rest.push_back(id);
  std::sort(rest.begin(), rest.end());
  frame.lot_order.push_back(target_lot);
  frame.lot_order.insert(frame.lot_order.end(), rest.begin(), rest.end());

  for (const auto& id : frame.lot_order) {
    const AvailabilitySeries* found = nullptr;
    for (const auto& s : availability)
      if (s.lot_id == id) {
        found = &s;
        break;
      }
    if (!found) throw DataError("no availability series for lot '" + id + "'");
    if (!found->grid.aligned_with(frame.grid))
      throw DataError("availability grid for lot '" + id +
                      "' is not aligned with the demand grid");
    frame.lot_channels.push_back(found->values);
  }

  for (int m = 0; m < kNumModes; ++m) {
    double scale = 1.0;
    if (demand_scale) {
      scale = (*demand_scale)[m];
    } else {
      for (double v : demand.channels[m]) scale = std::max(scale, v);
    }
    if (scale <= 0.0) scale = 1.0;
    frame.demand_scale[m] = scale;
    auto& ch = frame.demand_channels[m];
    ch.resize(demand.channels[m].size());
    for (std::size_t i = 0; i < ch.size(); ++i)
      ch[i] = std::min(1.0, demand.channels[m][i] / scale);
  }
  return frame;
}

std::string zones_to_json(const std::vector<ParkingClusterZone>& zones,
                          const SplitPlan& split,
                          const std::string& provenance_json) {
  nlohmann::json j;
  if (!provenance_json.empty())
    j["provenance"] = nlohmann::json::parse(provenance_json);
  j["zones"] = nlohmann::json::array();
  for (const auto& z : zones) {
    nlohmann::json zj;
    zj["zone_id"] = z.zone_id;
    zj["lot_ids"] = z.lot_ids;
    zj["centers"] = nlohmann::json::array();
    for (const auto& c : z.centers) zj["centers"].push_back({c.x, c.y});
    zj["radius"] = z.radius;
    zj["p"] = z.p;
    j["zones"].push_back(zj);
  }
  j["split"]["train_zones"] = split.train_zones;
  j["split"]["test_zones"] = split.test_zones;
  j["split"]["train_fraction"] = split.train_fraction;
  return j.dump(2) + "\n";
}

std::pair<std::vector<ParkingClusterZone>, SplitPlan> zones_from_json(
    const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  std::vector<ParkingClusterZone> zones;
  for (const auto& zj : j.at("zones")) {
    ParkingClusterZone z;
    z.zone_id = zj.at("zone_id").get<std::string>();
    z.lot_ids = zj.at("lot_ids").get<std::vector<std::string>>();
    for (const auto& c : zj.at("centers"))
      z.centers.push_back({c.at(0).get<double>(), c.at(1).get<double>()});
    z.radius = zj.at("radius").get<double>();
    z.p = zj.at("p").get<double>();
    zones.push_back(std::move(z));
  }
  SplitPlan split;
  if (j.contains("split")) {
    for (const auto& s : j["split"].at("train_zones"))
      split.train_zones.insert(s.get<std::string>());
    for (const auto& s : j["split"].at("test_zones"))
      split.test_zones.insert(s.get<std::string>());
    split.train_fraction = j["split"].value("train_fraction", 0.0);
  }
  return {std::move(zones), std::move(split)};
}

}  // namespace parkcast
