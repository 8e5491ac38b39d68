#include "parkcast/harness.hpp"

#include <algorithm>
#include <cmath>

#include "parkcast/errors.hpp"
#include "parkcast/rng.hpp"

namespace parkcast {

std::map<std::string, std::vector<ParkingRecord>> group_by_lot(
    const std::vector<ParkingRecord>& records) {
  std::map<std::string, std::vector<ParkingRecord>> by_lot;
  for (const auto& r : records) by_lot[r.lot_id].push_back(r);
  return by_lot;
}

PipelineData build_pipeline(const std::vector<ParkingRecord>& parking,
                            const std::array<std::vector<TripRecord>, kNumModes>& trips,
                            const std::map<std::string, Point>& lot_locations,
                            const TimeGrid& grid, const PipelineConfig& config) {
  PipelineData data;
  data.grid = grid;

  auto by_lot = group_by_lot(parking);
  if (by_lot.empty()) throw DataError("pipeline: no parking records");

  // Availability series, denoised, one per lot.
  std::map<std::string, AvailabilitySeries> availability;
  for (const auto& [lot_id, records] : by_lot) {
    AvailabilitySeries s = build_occupancy_series(records, lot_id, grid);
    availability.emplace(lot_id, fourier_denoise(s, config.cutoff_seconds));
  }

  // Clustering features. The grid span is the flow-normalization span.
  const double span_days = static_cast<double>(grid.step) *
                           static_cast<double>(grid.length) /
                           static_cast<double>(kSecondsPerDay);
  std::vector<LotFeature> features;
  for (const auto& [lot_id, records] : by_lot) {
    auto loc = lot_locations.find(lot_id);
    if (loc == lot_locations.end())
      throw DataError("no location known for lot '" + lot_id + "'");
    features.push_back(lot_feature_vector(records, loc->second, span_days));
    data.lot_order.push_back(lot_id);
  }

  std::vector<std::vector<double>> rows;
  for (const auto& f : features) {
    std::vector<double> row = {f.x, f.y, f.mean_daily_inflow, f.mean_daily_outflow};
    if (config.use_capacity_feature) row.push_back(f.capacity);
    rows.push_back(std::move(row));
  }
  const int k = config.k > 0
                    ? config.k
                    : static_cast<int>((features.size() + 4) / 5);  // ceil(n/5)
  Rng seed_rng(config.seed);
  data.clustering = kmeans(zscore(rows), k, seed_rng.fork("kmeans").next_u64(),
                           config.kmeans_max_iter, config.kmeans_tol);

  // One zone per non-empty cluster.
  std::vector<std::vector<LotFeature>> clusters(k);
  for (std::size_t i = 0; i < features.size(); ++i)
    clusters[data.clustering.assignments[i]].push_back(features[i]);
  std::vector<std::string> zone_ids;
  for (int c = 0; c < k; ++c) {
    if (clusters[c].empty()) continue;
    char buf[16];
    std::snprintf(buf, sizeof(buf), "zone_%02d", c);
    ZoneData zd;
    zd.zone = build_pcz(clusters[c], config.radius, config.minkowski_p, buf);
    data.zones.push_back(std::move(zd));
    zone_ids.push_back(buf);
  }

  data.split = split_by_zone(zone_ids, config.train_fraction,
                             seed_rng.fork("split").next_u64());

  // Demand fusion per zone, then training-zone scale factors per mode.
  std::vector<TripRecord> all_trips;
  for (const auto& bucket : trips)
    all_trips.insert(all_trips.end(), bucket.begin(), bucket.end());
  for (auto& zd : data.zones) {
    zd.demand = fuse_demand(all_trips, zd.zone, grid, &zd.fuse_report);
    zd.availability.clear();
    for (const auto& lot_id : zd.zone.lot_ids) {
      auto it = availability.find(lot_id);
      if (it == availability.end())
        throw DataError("zone member lot '" + lot_id + "' has no availability");
      zd.availability.push_back(it->second);
    }
  }
  for (int m = 0; m < kNumModes; ++m) {
    double mx = 0.0;
    for (const auto& zd : data.zones) {
      if (!data.split.train_zones.count(zd.zone.zone_id)) continue;
      for (double v : zd.demand.channels[m]) mx = std::max(mx, v);
    }
    data.train_demand_scale[m] = mx > 0.0 ? mx : 1.0;
  }
  return data;
}

std::size_t channels_for_setting(std::size_t zone_lots, FeatureSetting setting) {
  switch (setting) {
    case FeatureSetting::kAll: return zone_lots + kNumModes;
    case FeatureSetting::kTargetPlusDemand: return 1 + kNumModes;
    case FeatureSetting::kLotsOnly: return zone_lots;
    case FeatureSetting::kTargetOnly: return 1;
  }
  return 0;
}

std::vector<WindowSample> build_samples(const PipelineData& data,
                                        const std::set<std::string>& zone_ids,
                                        FeatureSetting setting,
                                        const PipelineConfig& config) {
  std::vector<WindowSample> samples;
  for (const auto& zd : data.zones) {
    if (!zone_ids.count(zd.zone.zone_id)) continue;
    std::vector<std::string> targets = zd.zone.lot_ids;
    std::sort(targets.begin(), targets.end());
    for (const auto& target : targets) {
      FeatureFrame frame = assemble_frame(zd.zone, zd.availability, zd.demand,
                                          target, data.train_demand_scale);
      auto w = make_windows(frame, target, config.window, config.horizon,
                            config.stride, setting);
      samples.insert(samples.end(), std::make_move_iterator(w.begin()),
                     std::make_move_iterator(w.end()));
    }
  }
  return samples;
}

std::vector<Timestamp> target_timestamps(const WindowSample& sample,
                                         std::size_t horizon) {
  if (sample.input_timestamps.size() < 2)
    throw DataError("sample lacks timestamps");
  const Timestamp step =
      sample.input_timestamps[1] - sample.input_timestamps[0];
  std::vector<Timestamp> out(horizon);
  const Timestamp last = sample.input_timestamps.back();
  for (std::size_t h = 0; h < horizon; ++h)
    out[h] = last + static_cast<Timestamp>(h + 1) * step;
  return out;
}

std::vector<double> target_channel(const WindowSample& sample) {
  std::vector<double> out(sample.window);
  for (std::size_t i = 0; i < sample.window; ++i) out[i] = sample.at(i, 0);
  return out;
}

HAModel fit_ha_baseline(const PipelineData& data) {
  std::vector<std::pair<Timestamp, double>> train;
  for (const auto& zd : data.zones) {
    if (!data.split.train_zones.count(zd.zone.zone_id)) continue;
    for (const auto& s : zd.availability)
      for (std::size_t i = 0; i < s.values.size(); ++i)
        train.emplace_back(s.grid.instant(i), s.values[i]);
  }
  if (train.empty()) throw DataError("no training zones for HA baseline");
  return ha_fit(train, data.grid.step);
}

ARModel fit_ar_baseline(const PipelineData& data, int p, int d) {
  std::vector<std::vector<double>> series;
  for (const auto& zd : data.zones) {
    if (!data.split.train_zones.count(zd.zone.zone_id)) continue;
    for (const auto& s : zd.availability) series.push_back(s.values);
  }
  if (series.empty()) throw DataError("no training zones for AR baseline");
  return ar_fit(series, p, d);
}

namespace {

MetricsReport evaluate_predictions(
    const std::vector<std::vector<double>>& predictions,
    const std::vector<WindowSample>& test, double mape_epsilon) {
  if (predictions.size() != test.size())
    throw ConfigError("evaluate: prediction/sample count mismatch");
  MetricsAccumulator acc(mape_epsilon);
  for (std::size_t i = 0; i < test.size(); ++i)
    acc.add(test[i].target_lot, predictions[i], test[i].target);
  return acc.report();
}

}  // namespace

std::vector<std::vector<double>> predict_all(const TrainedModel& model,
                                             const std::vector<WindowSample>& test) {
  std::vector<std::vector<double>> out;
  out.reserve(test.size());
  for (const auto& s : test) out.push_back(predict(model, s));
  return out;
}

std::vector<std::vector<double>> predict_all(const NLinearModel& model,
                                             const std::vector<WindowSample>& test) {
  std::vector<std::vector<double>> out;
  out.reserve(test.size());
  for (const auto& s : test) out.push_back(nlinear_predict(model, target_channel(s)));
  return out;
}

std::vector<std::vector<double>> predict_all(const HAModel& model,
                                             const std::vector<WindowSample>& test) {
  std::vector<std::vector<double>> out;
  out.reserve(test.size());
  for (const auto& s : test)
    out.push_back(ha_predict(model, target_timestamps(s, s.target.size())));
  return out;
}

std::vector<std::vector<double>> predict_all(const ARModel& model,
                                             const std::vector<WindowSample>& test) {
  std::vector<std::vector<double>> out;
  out.reserve(test.size());
  for (const auto& s : test)
    out.push_back(ar_predict(model, target_channel(s), s.target.size()));
  return out;
}

MetricsReport evaluate_transformer(const TrainedModel& model,
                                   const std::vector<WindowSample>& test,
                                   double mape_epsilon) {
  return evaluate_predictions(predict_all(model, test), test, mape_epsilon);
}
MetricsReport evaluate_nlinear(const NLinearModel& model,
                               const std::vector<WindowSample>& test,
                               double mape_epsilon) {
  return evaluate_predictions(predict_all(model, test), test, mape_epsilon);
}
MetricsReport evaluate_ha(const HAModel& model,
                          const std::vector<WindowSample>& test,
                          double mape_epsilon) {
  return evaluate_predictions(predict_all(model, test), test, mape_epsilon);
}
MetricsReport evaluate_ar(const ARModel& model,
                          const std::vector<WindowSample>& test,
                          double mape_epsilon) {
  return evaluate_predictions(predict_all(model, test), test, mape_epsilon);
}

double AblationTable::mean_mse(const std::string& model, int setting) const {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& c : cells) {
    if (c.model == model && c.setting == setting) {
      sum += c.metrics.mse;
      ++n;
    }
  }
  if (n == 0) throw DataError("ablation table has no cell for " + model +
                              " setting " + std::to_string(setting));
  return sum / static_cast<double>(n);
}

AblationTable run_ablation(const PipelineData& data, const PipelineConfig& config,
                           const ModelConfig& model_base,
                           const TrainOptions& train_base,
                           const std::vector<int>& settings,
                           const std::vector<std::uint64_t>& seeds) {
  AblationTable table;
  for (int setting_int : settings) {
    const FeatureSetting setting = feature_setting_from_int(setting_int);
    auto train_samples = build_samples(data, data.split.train_zones, setting, config);
    auto test_samples = build_samples(data, data.split.test_zones, setting, config);
    if (train_samples.empty() || test_samples.empty())
      throw DataError("ablation: empty train or test sample set");

    for (std::uint64_t seed : seeds) {
      // NLinear ignores the extra channels by contract, so its cells vary
      // only through the setting's target channel (identical across 1..4);
      // it is fitted per cell anyway to keep the grid uniform.
      NLinearModel nl = nlinear_fit(train_samples, config.horizon);
      AblationCell nl_cell;
      nl_cell.model = "nlinear";
      nl_cell.setting = setting_int;
      nl_cell.seed = seed;
      nl_cell.metrics = evaluate_nlinear(nl, test_samples);
      table.cells.push_back(std::move(nl_cell));

      ModelConfig mc = model_base;
      mc.window = static_cast<std::int64_t>(config.window);
      mc.horizon = static_cast<std::int64_t>(config.horizon);
      mc.input_channels = static_cast<std::int64_t>(train_samples.front().channels);
      TrainOptions to = train_base;
      to.seed = seed;
      TrainedModel tm = train(train_samples, mc, to);
      AblationCell cell;
      cell.model = "transformer";
      cell.setting = setting_int;
      cell.seed = seed;
      cell.metrics = evaluate_transformer(tm, test_samples);
      table.cells.push_back(std::move(cell));
    }
  }
  return table;
}

std::vector<SweepPoint> horizon_sweep(
    const std::map<std::string, std::vector<std::vector<double>>>& predictions,
    const std::vector<WindowSample>& test,
    const std::vector<std::size_t>& horizons, double mape_epsilon) {
  if (test.empty()) throw DataError("horizon sweep over an empty test set");
  const std::size_t H = test.front().target.size();
  std::vector<SweepPoint> out;
  for (const auto& [model, preds] : predictions) {
    if (preds.size() != test.size())
      throw ConfigError("horizon sweep: prediction count mismatch for " + model);
    for (std::size_t h : horizons) {
      if (h < 1 || h > H)
        throw ConfigError("horizon " + std::to_string(h) +
                          " outside the model horizon H=" + std::to_string(H));
      std::vector<double> p(test.size()), a(test.size());
      for (std::size_t i = 0; i < test.size(); ++i) {
        p[i] = preds[i][h - 1];
        a[i] = test[i].target[h - 1];
      }
      SweepPoint point;
      point.model = model;
      point.horizon = h;
      point.mse = mse(p, a);
      point.mae = mae(p, a);
      std::size_t skipped = 0;
      point.mape = mape(p, a, mape_epsilon, &skipped);
      out.push_back(std::move(point));
    }
  }
  return out;
}

}  // namespace parkcast
