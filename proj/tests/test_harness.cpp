#include <doctest.h>

#include <cmath>

#include "parkcast/errors.hpp"
#include "parkcast/harness.hpp"
#include "parkcast/synth.hpp"

using namespace parkcast;

namespace {

// One shared tiny dataset: small enough to keep this suite quick, big
// enough for a zone split and a short training run.
struct Fixture {
  SynthDataset data;
  PipelineData pipeline;
  PipelineConfig config;

  Fixture() {
    SynthConfig sc;
    sc.seed = 101;
    sc.n_lots = 12;
    sc.n_clusters = 3;
    sc.n_days = 6;
    sc.capacity_min = 15;
    sc.capacity_max = 40;
    data = generate(sc);

    config.window = 72;
    config.horizon = 12;
    config.stride = 36;
    config.train_fraction = 0.66;
    config.k = 3;
    config.seed = 5;

    std::map<std::string, Point> locations;
    for (const auto& lot : data.lots) locations[lot.lot_id] = lot.location;
    pipeline = build_pipeline(data.parking, data.trips, locations, data.grid, config);
  }
};

const Fixture& fixture() {
  static Fixture f;
  return f;
}

}  // namespace

TEST_CASE("pipeline builds zones that partition the lots") {
  const auto& f = fixture();
  CHECK(f.pipeline.zones.size() == 3);
  std::set<std::string> seen;
  std::size_t total = 0;
  for (const auto& zd : f.pipeline.zones) {
    for (const auto& id : zd.zone.lot_ids) {
      CHECK(!seen.count(id));
      seen.insert(id);
    }
    total += zd.zone.lot_ids.size();
    CHECK(zd.availability.size() == zd.zone.lot_ids.size());
  }
  CHECK(total == 12);
  CHECK(f.pipeline.split.train_zones.size() == 2);
  CHECK(f.pipeline.split.test_zones.size() == 1);
}

TEST_CASE("build_samples produces the channel counts of each setting") {
  const auto& f = fixture();
  for (int setting = 1; setting <= 4; ++setting) {
    auto samples = build_samples(f.pipeline, f.pipeline.split.train_zones,
                                 feature_setting_from_int(setting), f.config);
    REQUIRE(!samples.empty());
    for (const auto& s : samples) {
      std::size_t zone_lots = 0;
      for (const auto& zd : f.pipeline.zones)
        if (zd.zone.zone_id == s.zone_id) zone_lots = zd.zone.lot_ids.size();
      CHECK(s.channels == channels_for_setting(zone_lots,
                                               feature_setting_from_int(setting)));
      CHECK(s.window == f.config.window);
      CHECK(s.target.size() == f.config.horizon);
    }
  }
}

TEST_CASE("demand channels in samples are scaled by training-zone maxima") {
  const auto& f = fixture();
  auto samples = build_samples(f.pipeline, f.pipeline.split.train_zones,
                               FeatureSetting::kAll, f.config);
  double max_seen = 0.0;
  for (const auto& s : samples) {
    const std::size_t m = s.channels - kNumModes;
    for (std::size_t i = 0; i < s.window; ++i)
      for (std::size_t c = m; c < s.channels; ++c)
        max_seen = std::max(max_seen, s.at(i, c));
  }
  CHECK(max_seen <= 1.0);
  CHECK(max_seen > 0.0);
}

TEST_CASE("baseline protocols run end to end") {
  const auto& f = fixture();
  auto test = build_samples(f.pipeline, f.pipeline.split.test_zones,
                            FeatureSetting::kTargetOnly, f.config);
  REQUIRE(!test.empty());

  HAModel ha = fit_ha_baseline(f.pipeline);
  MetricsReport rh = evaluate_ha(ha, test);
  CHECK(rh.mse > 0.0);
  CHECK(rh.n_terms == test.size() * f.config.horizon);

  ARModel ar = fit_ar_baseline(f.pipeline, 6, 1);
  MetricsReport ra = evaluate_ar(ar, test);
  CHECK(ra.mse > 0.0);

  auto train_samples = build_samples(f.pipeline, f.pipeline.split.train_zones,
                                     FeatureSetting::kTargetOnly, f.config);
  NLinearModel nl = nlinear_fit(train_samples, f.config.horizon);
  MetricsReport rn = evaluate_nlinear(nl, test);
  CHECK(rn.mse > 0.0);

  // Sane scale: availability lives in [0,1], so MSE must too.
  CHECK(rh.mse < 1.0);
  CHECK(ra.mse < 1.0);
  CHECK(rn.mse < 1.0);
}

TEST_CASE("target timestamps continue the window grid") {
  const auto& f = fixture();
  auto test = build_samples(f.pipeline, f.pipeline.split.test_zones,
                            FeatureSetting::kTargetOnly, f.config);
  const auto& s = test.front();
  auto stamps = target_timestamps(s, 3);
  CHECK(stamps[0] == s.input_timestamps.back() + 600);
  CHECK(stamps[2] == s.input_timestamps.back() + 3 * 600);
}

TEST_CASE("horizon sweep shapes and bounds") {
  const auto& f = fixture();
  auto test = build_samples(f.pipeline, f.pipeline.split.test_zones,
                            FeatureSetting::kTargetOnly, f.config);
  HAModel ha = fit_ha_baseline(f.pipeline);
  std::map<std::string, std::vector<std::vector<double>>> preds;
  preds["ha"] = predict_all(ha, test);

  auto points = horizon_sweep(preds, test, {1, 6, 12});
  CHECK(points.size() == 3);
  for (const auto& p : points) {
    CHECK(p.model == "ha");
    CHECK(p.mse >= 0.0);
  }

  CHECK_THROWS_AS(horizon_sweep(preds, test, {13}), ConfigError);
  CHECK_THROWS_AS(horizon_sweep(preds, test, {0}), ConfigError);
}

TEST_CASE("ablation grid covers every cell with both models") {
  const auto& f = fixture();
  ModelConfig mc;
  mc.d_model = 8;
  mc.n_heads = 2;
  mc.n_layers = 1;
  mc.d_ff = 16;
  mc.calendar = {CalendarFeature::kHour};
  TrainOptions to;
  to.epochs = 1;
  to.batch_size = 16;
  to.learning_rate = 1e-3;

  AblationTable table = run_ablation(f.pipeline, f.config, mc, to, {1, 2, 3, 4}, {1});
  CHECK(table.cells.size() == 8);  // 2 models x 4 settings x 1 seed
  for (const auto& cell : table.cells) {
    CHECK(cell.metrics.mse > 0.0);
    CHECK(cell.metrics.n_terms > 0);
  }
  CHECK(table.mean_mse("transformer", 1) > 0.0);
  CHECK(table.mean_mse("nlinear", 3) > 0.0);
  CHECK_THROWS_AS(table.mean_mse("transformer", 9), DataError);
}
