#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "parkcast/records.hpp"
#include "parkcast/series.hpp"

namespace parkcast {

/// Generator settings for the synthetic city. Occupancy follows a daily +
/// weekly waveform with zone-level and per-lot smooth noise; stays are
/// sampled to realize it, and a `coupling` fraction of parking arrivals
/// emits a trip endpoint near the lot shortly before the arrival, which is
/// what makes the fused demand channels genuinely predictive.
struct SynthConfig {
  std::uint64_t seed = 42;
  int n_lots = 40;
  int n_clusters = 8;
  int n_days = 30;
  std::int64_t step_seconds = 600;
  std::string start_date = "2021-09-01";

  // Spatial layout (meters).
  double city_extent = 12000.0;
  double cluster_spread = 200.0;
  double min_center_separation = 3200.0;

  int capacity_min = 20;
  int capacity_max = 80;

  // Occupancy waveform: base + daily + weekly + noise, as an occupancy
  // fraction. Values above 1 oversubscribe the lot and saturate it.
  double base_occupancy = 0.55;
  double base_jitter = 0.15;       // per-lot uniform jitter on the base
  double daily_amplitude = 0.40;   // A_d
  double weekly_amplitude = 0.10;  // A_w
  double noise_sigma = 0.10;       // zone-level smooth noise amplitude
  double idio_sigma = 0.03;        // per-lot smooth noise amplitude
  double noise_correlation_hours = 3.0;

  // Stay durations, log-normal.
  double stay_median_hours = 1.5;
  double stay_log_sd = 0.45;

  // Demand generation.
  double coupling = 0.6;            // kappa
  double coupled_radius = 500.0;    // endpoint distance bound around the lot
  double lead_max_minutes = 20.0;   // endpoint precedes the arrival by U(0, lead)
  std::array<double, kNumModes> mode_weights = {0.35, 0.25, 0.20, 0.20};
  std::array<double, kNumModes> background_per_day = {300.0, 400.0, 250.0, 200.0};
};

struct SynthLot {
  std::string lot_id;
  Point location;
  int capacity = 0;
  int true_cluster = 0;
  double base = 0.0;
  double daily_phase_hours = 0.0;
};

struct SynthDataset {
  SynthConfig config;
  TimeGrid grid;
  std::vector<SynthLot> lots;
  std::vector<Point> cluster_centers;
  std::vector<ParkingRecord> parking;  // grouped by lot, stays in arrival order
  std::array<std::vector<TripRecord>, kNumModes> trips;
  std::string manifest_json;
};

/// Deterministic in config.seed, including file bytes.
SynthDataset generate(const SynthConfig& config);

/// Writes parking.csv, trips_<mode>.csv (bus boarding-only), manifest.json.
void write_dataset(const SynthDataset& dataset, const std::string& directory);

}  // namespace parkcast
