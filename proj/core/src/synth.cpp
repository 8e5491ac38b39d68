#include "parkcast/synth.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <queue>

#include <nlohmann/json.hpp>

#include "parkcast/errors.hpp"
#include "parkcast/ingest.hpp"
#include "parkcast/rng.hpp"

namespace parkcast {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr std::int64_t kSimStep = 60;  // arrival intensity evaluated per minute

// Smooth mean-zero AR(1) noise on the bin grid, unit stationary variance.
std::vector<double> ou_noise(std::size_t length, double step_hours,
                             double correlation_hours, Rng& rng) {
  std::vector<double> z(length);
  if (length == 0) return z;
  const double rho = std::exp(-step_hours / std::max(0.01, correlation_hours));
  const double innovation = std::sqrt(1.0 - rho * rho);
  z[0] = rng.normal();
  for (std::size_t i = 1; i < length; ++i)
    z[i] = rho * z[i - 1] + innovation * rng.normal();
  return z;
}

Point disk_point(Point center, double radius, Rng& rng) {
  // Uniform in the Euclidean disk; radius is scaled by 1/sqrt(2) by the
  // caller when it must sit inside a Minkowski p=1 ball of the same radius.
  const double r = radius * std::sqrt(rng.uniform());
  const double theta = rng.uniform(0.0, kTwoPi);
  return {center.x + r * std::cos(theta), center.y + r * std::sin(theta)};
}

}  // namespace

SynthDataset generate(const SynthConfig& config) {
  if (config.n_lots < 1 || config.n_clusters < 1 ||
      config.n_clusters > config.n_lots)
    throw ConfigError("synth: need 1 <= n_clusters <= n_lots");
  if (config.n_days < 1) throw ConfigError("synth: n_days must be >= 1");
  if (config.capacity_min < 1 || config.capacity_max < config.capacity_min)
    throw ConfigError("synth: bad capacity range");
  if (config.coupling < 0.0 || config.coupling > 1.0)
    throw ConfigError("synth: coupling must be in [0, 1]");
  if (config.stay_median_hours <= 0.0)
    throw ConfigError("synth: stay median must be positive");
  const double peak = config.base_occupancy + config.base_jitter +
                      config.daily_amplitude + config.weekly_amplitude;
  if (peak > 2.0)
    throw ConfigError("synth: occupancy waveform peak " + std::to_string(peak) +
                      " oversubscribes capacity beyond recovery");
  double weight_sum = 0.0;
  for (double w : config.mode_weights) weight_sum += w;
  if (weight_sum <= 0.0) throw ConfigError("synth: mode weights sum to zero");

  auto start = parse_date(config.start_date);
  if (!start) throw ConfigError("synth: bad start_date '" + config.start_date + "'");

  SynthDataset data;
  data.config = config;
  data.grid.start = *start;
  data.grid.step = config.step_seconds;
  data.grid.length = static_cast<std::size_t>(config.n_days * kSecondsPerDay /
                                              config.step_seconds);

  Rng root(config.seed);

  // Cluster centers: rejection-sampled for separation so the planted
  // structure is recoverable. The requirement relaxes slowly if the box
  // cannot fit the requested layout.
  Rng center_rng = root.fork("centers");
  double separation = config.min_center_separation;
  int failures = 0;
  while (static_cast<int>(data.cluster_centers.size()) < config.n_clusters) {
    Point c{center_rng.uniform(0.0, config.city_extent),
            center_rng.uniform(0.0, config.city_extent)};
    bool ok = true;
    for (const auto& other : data.cluster_centers) {
      const double dx = c.x - other.x, dy = c.y - other.y;
      if (std::sqrt(dx * dx + dy * dy) < separation) {
        ok = false;
        break;
      }
    }
    if (ok) {
      data.cluster_centers.push_back(c);
    } else if (++failures >= 2000) {
      separation *= 0.95;
      failures = 0;
    }
  }

  // Lots: round-robin over clusters so every cluster is populated. Flow
  // character (typical capacity and demand level) is drawn per cluster with
  // small per-lot jitter, so the planted structure is visible in every
  // clustering feature, not only in the coordinates.
  Rng lot_rng = root.fork("lots");
  std::vector<double> zone_daily_phase(config.n_clusters);
  std::vector<double> zone_weekly_phase(config.n_clusters);
  std::vector<double> zone_capacity(config.n_clusters);
  std::vector<double> zone_base(config.n_clusters);
  for (int z = 0; z < config.n_clusters; ++z) {
    zone_daily_phase[z] = lot_rng.uniform(8.0, 11.0);   // peak hour of day
    zone_weekly_phase[z] = lot_rng.uniform(0.0, 7.0);
    zone_capacity[z] = lot_rng.uniform(static_cast<double>(config.capacity_min),
                                       static_cast<double>(config.capacity_max));
    zone_base[z] = config.base_occupancy +
                   lot_rng.uniform(-config.base_jitter, config.base_jitter);
  }
  for (int i = 0; i < config.n_lots; ++i) {
    SynthLot lot;
    char buf[16];
    std::snprintf(buf, sizeof(buf), "L%03d", i + 1);
    lot.lot_id = buf;
    lot.true_cluster = i % config.n_clusters;
    const Point center = data.cluster_centers[lot.true_cluster];
    lot.location = {center.x + lot_rng.normal(0.0, config.cluster_spread),
                    center.y + lot_rng.normal(0.0, config.cluster_spread)};
    lot.capacity = std::max(
        5, static_cast<int>(std::lround(zone_capacity[lot.true_cluster] *
                                        lot_rng.uniform(0.9, 1.12))));
    lot.base = zone_base[lot.true_cluster] + lot_rng.uniform(-0.04, 0.04);
    lot.daily_phase_hours = zone_daily_phase[lot.true_cluster] +
                            lot_rng.uniform(-0.5, 0.5);
    data.lots.push_back(std::move(lot));
  }

  // Zone-level smooth noise, one path per cluster; per-lot idiosyncratic
  // noise on top. Both include a warm-up day so t=0 is in steady state.
  const std::int64_t warmup = kSecondsPerDay;
  const std::size_t noise_len =
      static_cast<std::size_t>((config.n_days * kSecondsPerDay + warmup) /
                               config.step_seconds) + 2;
  const double step_hours = static_cast<double>(config.step_seconds) / 3600.0;
  std::vector<std::vector<double>> zone_noise(config.n_clusters);
  for (int z = 0; z < config.n_clusters; ++z) {
    Rng rng = root.fork("zone-noise", static_cast<std::uint64_t>(z));
    zone_noise[z] = ou_noise(noise_len, step_hours, config.noise_correlation_hours, rng);
  }

  const double mean_stay_seconds =
      config.stay_median_hours * 3600.0 *
      std::exp(0.5 * config.stay_log_sd * config.stay_log_sd);

  const Timestamp span_begin = data.grid.start;
  const Timestamp span_end = data.grid.end();

  // Per-lot arrival simulation.
  struct PendingTrip {
    Mode mode;
    Timestamp event;  // endpoint time near the lot
    Point near_point;
  };
  std::array<std::vector<TripRecord>, kNumModes> coupled;

  for (std::size_t li = 0; li < data.lots.size(); ++li) {
    const SynthLot& lot = data.lots[li];
    Rng rng = root.fork("lot-sim", static_cast<std::uint64_t>(li));
    Rng trip_rng = root.fork("lot-trips", static_cast<std::uint64_t>(li));
    std::vector<double> idio =
        ou_noise(noise_len, step_hours, config.noise_correlation_hours, rng);

    const auto& znoise = zone_noise[lot.true_cluster];
    auto occupancy_intent = [&](Timestamp t) {
      const double hours =
          static_cast<double>(t - span_begin + warmup) / 3600.0;  // from warm-up start
      const double tod = static_cast<double>((t % kSecondsPerDay + kSecondsPerDay) %
                                             kSecondsPerDay) / 3600.0;
      const std::size_t bin = std::min(
          noise_len - 1,
          static_cast<std::size_t>((t - span_begin + warmup) / config.step_seconds));
      double v = lot.base;
      v += config.daily_amplitude *
           std::sin((tod - lot.daily_phase_hours + 6.0) * kTwoPi / 24.0);
      v += config.weekly_amplitude *
           std::sin((hours / 24.0 - zone_weekly_phase[lot.true_cluster]) * kTwoPi / 7.0);
      v += config.noise_sigma * znoise[bin];
      v += config.idio_sigma * idio[bin];
      return v;
    };

    // Deterministic arrival times: the cumulative intensity crosses integer
    // marks. The accumulator resets at local midnight, which pins the
    // schedule to the day so a noise-free waveform yields an exactly
    // periodic series.
    std::priority_queue<Timestamp, std::vector<Timestamp>, std::greater<>> departures;
    double accumulator = 0.0;
    for (Timestamp t = span_begin - warmup; t < span_end; t += kSimStep) {
      if (((t - span_begin) % kSecondsPerDay + kSecondsPerDay) % kSecondsPerDay == 0)
        accumulator = 0.0;
      const double intent = std::max(0.01, occupancy_intent(t));
      const double rate = static_cast<double>(lot.capacity) * intent /
                          mean_stay_seconds;  // arrivals per second
      accumulator += rate * static_cast<double>(kSimStep);
      while (accumulator >= 1.0) {
        accumulator -= 1.0;
        const Timestamp arrival = t;
        while (!departures.empty() && departures.top() <= arrival) departures.pop();

        // Coupled trip endpoints are emitted for attempts, not just parked
        // stays: a full lot still attracts demand.
        if (config.coupling > 0.0 && arrival >= span_begin &&
            trip_rng.uniform() < config.coupling) {
          double pick = trip_rng.uniform() * weight_sum;
          int mode_idx = kNumModes - 1;
          for (int m = 0; m < kNumModes; ++m) {
            pick -= config.mode_weights[m];
            if (pick <= 0.0) {
              mode_idx = m;
              break;
            }
          }
          const Mode mode = static_cast<Mode>(mode_idx);
          const Point near = disk_point(
              lot.location, config.coupled_radius / std::sqrt(2.0), trip_rng);
          const Timestamp event =
              arrival - static_cast<Timestamp>(
                            trip_rng.uniform(0.0, config.lead_max_minutes * 60.0));
          TripRecord trip;
          trip.mode = mode;
          if (mode == Mode::kBus) {
            trip.origin = near;
            trip.depart_time = event;
          } else {
            trip.origin = {trip_rng.uniform(0.0, config.city_extent),
                           trip_rng.uniform(0.0, config.city_extent)};
            trip.destination = near;
            trip.arrive_time = event;
            trip.depart_time =
                event - static_cast<Timestamp>(trip_rng.uniform(600.0, 2400.0));
          }
          if (trip.depart_time >= span_begin) coupled[mode_idx].push_back(trip);
        }

        if (static_cast<int>(departures.size()) >= lot.capacity)
          continue;  // lot full: the stay is rejected

        const double dur = config.stay_median_hours * 3600.0 *
                           std::exp(config.stay_log_sd * rng.normal());
        Timestamp departure = arrival + std::max<Timestamp>(300, static_cast<Timestamp>(dur));
        departures.push(departure);

        if (departure <= span_begin) continue;  // entirely inside warm-up
        const Timestamp rec_arrival = std::max(arrival, span_begin);
        const Timestamp rec_departure = std::min(departure, span_end);
        if (rec_departure <= rec_arrival) continue;
        ParkingRecord rec;
        rec.lot_id = lot.lot_id;
        rec.arrival = rec_arrival;
        rec.departure = rec_departure;
        rec.date = (rec_arrival / kSecondsPerDay) * kSecondsPerDay;
        rec.capacity = lot.capacity;
        data.parking.push_back(std::move(rec));
      }
    }
  }

  // Background trips, independent of parking.
  for (int m = 0; m < kNumModes; ++m) {
    Rng rng = root.fork("background", static_cast<std::uint64_t>(m));
    const auto count = static_cast<std::size_t>(
        config.background_per_day[m] * static_cast<double>(config.n_days));
    auto& bucket = data.trips[m];
    bucket.reserve(count + coupled[m].size());
    for (std::size_t i = 0; i < count; ++i) {
      TripRecord trip;
      trip.mode = static_cast<Mode>(m);
      trip.origin = {rng.uniform(0.0, config.city_extent),
                     rng.uniform(0.0, config.city_extent)};
      trip.depart_time =
          span_begin + static_cast<Timestamp>(
                           rng.uniform(0.0, static_cast<double>(span_end - span_begin)));
      if (static_cast<Mode>(m) != Mode::kBus) {
        trip.destination = Point{rng.uniform(0.0, config.city_extent),
                                 rng.uniform(0.0, config.city_extent)};
        trip.arrive_time =
            trip.depart_time + static_cast<Timestamp>(rng.uniform(600.0, 2400.0));
      }
      bucket.push_back(std::move(trip));
    }
    bucket.insert(bucket.end(), coupled[m].begin(), coupled[m].end());
    std::stable_sort(bucket.begin(), bucket.end(),
                     [](const TripRecord& a, const TripRecord& b) {
                       if (a.depart_time != b.depart_time)
                         return a.depart_time < b.depart_time;
                       if (a.origin.x != b.origin.x) return a.origin.x < b.origin.x;
                       return a.origin.y < b.origin.y;
                     });
  }

  // Ground-truth manifest.
  nlohmann::json manifest;
  manifest["seed"] = config.seed;
  manifest["n_days"] = config.n_days;
  manifest["step_seconds"] = config.step_seconds;
  manifest["start"] = config.start_date;
  manifest["coupling"] = config.coupling;
  manifest["coupled_radius"] = config.coupled_radius;
  manifest["lead_max_minutes"] = config.lead_max_minutes;
  manifest["stay_median_hours"] = config.stay_median_hours;
  manifest["stay_log_sd"] = config.stay_log_sd;
  manifest["mean_stay_seconds"] = mean_stay_seconds;
  manifest["waveform"] = {{"base", config.base_occupancy},
                          {"daily_amplitude", config.daily_amplitude},
                          {"weekly_amplitude", config.weekly_amplitude},
                          {"noise_sigma", config.noise_sigma},
                          {"idio_sigma", config.idio_sigma}};
  manifest["mode_weights"] = config.mode_weights;
  manifest["background_per_day"] = config.background_per_day;
  manifest["cluster_centers"] = nlohmann::json::array();
  for (const auto& c : data.cluster_centers)
    manifest["cluster_centers"].push_back({c.x, c.y});
  manifest["lots"] = nlohmann::json::array();
  for (const auto& lot : data.lots) {
    manifest["lots"].push_back({{"lot_id", lot.lot_id},
                                {"x", lot.location.x},
                                {"y", lot.location.y},
                                {"capacity", lot.capacity},
                                {"cluster", lot.true_cluster},
                                {"base", lot.base},
                                {"daily_phase_hours", lot.daily_phase_hours}});
  }
  data.manifest_json = manifest.dump(2) + "\n";
  return data;
}

void write_dataset(const SynthDataset& data, const std::string& directory) {
  namespace fs = std::filesystem;
  fs::create_directories(directory);
  {
    std::ofstream out(fs::path(directory) / "parking.csv");
    if (!out) throw DataError("cannot write parking.csv under " + directory);
    write_parking_csv(out, data.parking);
  }
  for (int m = 0; m < kNumModes; ++m) {
    const std::string name = std::string("trips_") + kModeNames[m] + ".csv";
    std::ofstream out(fs::path(directory) / name);
    if (!out) throw DataError("cannot write " + name + " under " + directory);
    write_trip_csv(out, data.trips[m], static_cast<Mode>(m) == Mode::kBus);
  }
  std::ofstream out(fs::path(directory) / "manifest.json");
  out << data.manifest_json;
}

}  // namespace parkcast
