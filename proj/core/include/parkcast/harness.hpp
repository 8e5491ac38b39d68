#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "parkcast/baselines.hpp"
#include "parkcast/metrics.hpp"
#include "parkcast/pcz.hpp"
#include "parkcast/preprocess.hpp"
#include "parkcast/transformer.hpp"

namespace parkcast {

/// Stage knobs from raw records to train/test windows.
struct PipelineConfig {
  std::int64_t step_seconds = 600;
  std::int64_t cutoff_seconds = 3600;  // Fourier low-pass
  std::size_t window = 432;            // L
  std::size_t horizon = 144;           // H
  std::size_t stride = 12;
  double train_fraction = 0.7;

  int k = 0;  // 0 -> ceil(n_lots / 5)
  double minkowski_p = 1.0;
  double radius = 500.0;
  bool use_capacity_feature = true;
  int kmeans_max_iter = 100;
  double kmeans_tol = 1e-6;

  std::uint64_t seed = 42;
};

struct ZoneData {
  ParkingClusterZone zone;
  std::vector<AvailabilitySeries> availability;  // denoised, one per member lot
  DemandSeries demand;                           // raw counts
  FuseReport fuse_report;
};

/// Everything the experiments consume, built once per dataset.
struct PipelineData {
  TimeGrid grid;
  std::vector<ZoneData> zones;  // ordered by zone_id
  SplitPlan split;
  std::array<double, kNumModes> train_demand_scale = {1, 1, 1, 1};
  KMeansResult clustering;
  std::vector<std::string> lot_order;  // clustering row -> lot id
};

std::map<std::string, std::vector<ParkingRecord>> group_by_lot(
    const std::vector<ParkingRecord>& records);

/// Runs availability construction, denoising, clustering, zone building,
/// splitting, and demand fusion.
PipelineData build_pipeline(const std::vector<ParkingRecord>& parking,
                            const std::array<std::vector<TripRecord>, kNumModes>& trips,
                            const std::map<std::string, Point>& lot_locations,
                            const TimeGrid& grid, const PipelineConfig& config);

/// Windows for every (zone, target lot) pair in the given zone set, zones
/// and targets in sorted order.
std::vector<WindowSample> build_samples(const PipelineData& data,
                                        const std::set<std::string>& zone_ids,
                                        FeatureSetting setting,
                                        const PipelineConfig& config);

/// Target timestamps of a sample: the H instants following its window.
std::vector<Timestamp> target_timestamps(const WindowSample& sample,
                                         std::size_t horizon);

/// Baseline protocols under the zone-wise split: HA and AR are fitted on
/// the pooled training-zone availability series; NLinear on the training
/// windows' target channel.
HAModel fit_ha_baseline(const PipelineData& data);
ARModel fit_ar_baseline(const PipelineData& data, int p, int d);

MetricsReport evaluate_transformer(const TrainedModel& model,
                                   const std::vector<WindowSample>& test,
                                   double mape_epsilon = 1e-3);
MetricsReport evaluate_nlinear(const NLinearModel& model,
                               const std::vector<WindowSample>& test,
                               double mape_epsilon = 1e-3);
MetricsReport evaluate_ha(const HAModel& model,
                          const std::vector<WindowSample>& test,
                          double mape_epsilon = 1e-3);
MetricsReport evaluate_ar(const ARModel& model,
                          const std::vector<WindowSample>& test,
                          double mape_epsilon = 1e-3);

struct AblationCell {
  std::string model;  // "transformer" | "nlinear"
  int setting = 1;
  std::uint64_t seed = 0;
  MetricsReport metrics;
};

struct AblationTable {
  std::vector<AblationCell> cells;
  /// Mean test MSE across seeds for one (model, setting) cell.
  double mean_mse(const std::string& model, int setting) const;
};

/// Feature-utilization grid: both models on every requested setting, one
/// training run per seed, identical split and window layout in every cell.
AblationTable run_ablation(const PipelineData& data, const PipelineConfig& config,
                           const ModelConfig& model_base,
                           const TrainOptions& train_base,
                           const std::vector<int>& settings,
                           const std::vector<std::uint64_t>& seeds);

struct SweepPoint {
  std::string model;
  std::size_t horizon = 0;  // 1-based step index
  double mse = 0.0;
  double mae = 0.0;
  std::optional<double> mape;
};

/// Per-horizon error of multi-horizon forecasters: element h-1 of each
/// prediction against element h-1 of each target.
std::vector<SweepPoint> horizon_sweep(
    const std::map<std::string, std::vector<std::vector<double>>>& predictions,
    const std::vector<WindowSample>& test,
    const std::vector<std::size_t>& horizons, double mape_epsilon = 1e-3);

/// Convenience: predictions of each fitted model over a test set.
std::vector<std::vector<double>> predict_all(const TrainedModel& model,
                                             const std::vector<WindowSample>& test);
std::vector<std::vector<double>> predict_all(const NLinearModel& model,
                                             const std::vector<WindowSample>& test);
std::vector<std::vector<double>> predict_all(const HAModel& model,
                                             const std::vector<WindowSample>& test);
std::vector<std::vector<double>> predict_all(const ARModel& model,
                                             const std::vector<WindowSample>& test);

/// Channel count implied by a feature setting for a zone of m lots.
std::size_t channels_for_setting(std::size_t zone_lots, FeatureSetting setting);

std::vector<double> target_channel(const WindowSample& sample);

}  // namespace parkcast
