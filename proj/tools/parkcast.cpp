// Command-line front end: config-driven, deterministic, rerunnable stages
//   synth -> cluster -> fuse -> train -> evaluate / ablate / sweep
// Every artifact embeds the effective config hash, the seed, and the tool
// version, so identical configs produce byte-identical outputs.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "parkcast/csv.hpp"
#include "parkcast/errors.hpp"
#include "parkcast/experiment.hpp"
#include "parkcast/harness.hpp"
#include "parkcast/ingest.hpp"
#include "parkcast/synth.hpp"

namespace fs = std::filesystem;
using namespace parkcast;

namespace {

struct CliOptions {
  std::string config_path;
  std::string out_dir;
  std::vector<std::string> overrides;
  bool seed_given = false;
  std::uint64_t seed = 0;
};

ExperimentConfig load_config(const CliOptions& cli) {
  ConfigMap map;
  if (!cli.config_path.empty()) map = read_config_file(cli.config_path);
  apply_overrides(map, cli.overrides);
  if (cli.seed_given) map["seed"] = std::to_string(cli.seed);
  if (!cli.out_dir.empty()) map["out"] = cli.out_dir;
  return config_from_map(map);
}

std::string data_dir(const ExperimentConfig& c) { return c.out_dir + "/data"; }

std::string resolved_parking(const ExperimentConfig& c) {
  return c.parking_path.empty() ? data_dir(c) + "/parking.csv" : c.parking_path;
}
std::string resolved_lots(const ExperimentConfig& c) {
  return c.lots_path.empty() ? data_dir(c) + "/lots.csv" : c.lots_path;
}
std::string resolved_trips(const ExperimentConfig& c, int mode) {
  return c.trip_paths[mode].empty()
             ? data_dir(c) + "/trips_" + kModeNames[mode] + ".csv"
             : c.trip_paths[mode];
}

void require_file(const std::string& path, const std::string& producer) {
  if (!fs::exists(path))
    throw DataError("missing '" + path + "'; run `parkcast " + producer +
                    "` first (or point paths.* at existing data)");
}

std::string provenance_comment(const ExperimentConfig& c) {
  return std::string(kToolVersion) + " config=" + config_hash(c) +
         " seed=" + std::to_string(c.seed);
}

void write_text(const std::string& path, const std::string& text) {
  fs::create_directories(fs::path(path).parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << text;
}

struct Inputs {
  std::vector<ParkingRecord> parking;
  std::array<std::vector<TripRecord>, kNumModes> trips;
  std::map<std::string, Point> locations;
  DropReport parking_report;
  std::array<DropReport, kNumModes> trip_reports;
};

Inputs load_inputs(const ExperimentConfig& c) {
  Inputs in;
  const std::string parking_path = resolved_parking(c);
  require_file(parking_path, "synth");
  {
    std::ifstream f(parking_path);
    auto raw = parse_parking_records(f);
    std::tie(in.parking, in.parking_report) = validate_and_drop(raw);
  }
  for (int m = 0; m < kNumModes; ++m) {
    const std::string path = resolved_trips(c, m);
    require_file(path, "synth");
    std::ifstream f(path);
    auto raw = parse_trip_records(f, static_cast<Mode>(m));
    std::tie(in.trips[m], in.trip_reports[m]) = validate_and_drop(raw);
  }
  const std::string lots_path = resolved_lots(c);
  require_file(lots_path, "synth");
  {
    std::ifstream f(lots_path);
    CsvReader reader(f);
    const std::size_t c_id = reader.column("lot_id");
    const std::size_t c_x = reader.column("x");
    const std::size_t c_y = reader.column("y");
    std::vector<std::string> cells;
    while (reader.next_row(cells))
      in.locations[cells[c_id]] = {std::stod(cells[c_x]), std::stod(cells[c_y])};
  }
  return in;
}

TimeGrid grid_from_records(const std::vector<ParkingRecord>& parking,
                           std::int64_t step) {
  if (parking.empty()) throw DataError("no parking records after cleaning");
  Timestamp lo = parking.front().arrival, hi = parking.front().departure;
  for (const auto& r : parking) {
    lo = std::min(lo, r.arrival);
    hi = std::max(hi, r.departure);
  }
  TimeGrid grid;
  grid.step = step;
  grid.start = (lo / kSecondsPerDay) * kSecondsPerDay;  // midnight of first day
  const Timestamp end = ((hi + kSecondsPerDay - 1) / kSecondsPerDay) * kSecondsPerDay;
  grid.length = static_cast<std::size_t>((end - grid.start) / step);
  return grid;
}

nlohmann::json report_json(const DropReport& r) {
  return {{"total_rows", r.total_rows},
          {"dropped_missing", r.dropped_missing},
          {"dropped_invalid", r.dropped_invalid},
          {"retained", r.retained}};
}

nlohmann::json metrics_json(const MetricsReport& r) {
  nlohmann::json j;
  j["mse"] = r.mse;
  j["mae"] = r.mae;
  if (r.mape) j["mape"] = *r.mape; else j["mape"] = nullptr;
  j["n_terms"] = r.n_terms;
  j["mape_skipped"] = r.mape_skipped;
  nlohmann::json lots = nlohmann::json::object();
  for (const auto& [lot, lm] : r.per_lot) {
    nlohmann::json lj = {{"mse", lm.mse}, {"mae", lm.mae}};
    if (lm.mape) lj["mape"] = *lm.mape; else lj["mape"] = nullptr;
    lots[lot] = lj;
  }
  j["per_lot"] = lots;
  return j;
}

// ---------------------------------------------------------------------------
// synth

int cmd_synth(const ExperimentConfig& c) {
  SynthConfig sc = c.synth;
  SynthDataset data = generate(sc);
  write_dataset(data, data_dir(c));
  // Lot location table: observable data, unlike the ground-truth manifest.
  std::ostringstream lots;
  lots << "lot_id,x,y\n";
  for (const auto& lot : data.lots)
    lots << lot.lot_id << ',' << format_double(lot.location.x) << ','
         << format_double(lot.location.y) << '\n';
  write_text(data_dir(c) + "/lots.csv", lots.str());
  write_text(data_dir(c) + "/provenance.json", provenance_json(c) + "\n");
  std::cout << "synth: " << data.parking.size() << " parking records, "
            << data.lots.size() << " lots -> " << data_dir(c) << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// cluster

int cmd_cluster(const ExperimentConfig& c) {
  Inputs in = load_inputs(c);
  TimeGrid grid = grid_from_records(in.parking, c.pipeline.step_seconds);
  PipelineData data = build_pipeline(in.parking, in.trips, in.locations, grid,
                                     c.pipeline);
  std::vector<ParkingClusterZone> zones;
  for (const auto& zd : data.zones) zones.push_back(zd.zone);
  write_text(c.out_dir + "/zones.json",
             zones_to_json(zones, data.split, provenance_json(c)));

  nlohmann::json report;
  report["provenance"] = nlohmann::json::parse(provenance_json(c));
  report["k"] = data.clustering.centroids.size();
  report["inertia"] = data.clustering.inertia;
  report["iterations"] = data.clustering.iterations;
  report["parking_drop_report"] = report_json(in.parking_report);
  for (int m = 0; m < kNumModes; ++m)
    report["trip_drop_reports"][kModeNames[m]] = report_json(in.trip_reports[m]);
  nlohmann::json sizes = nlohmann::json::object();
  for (const auto& zd : data.zones)
    sizes[zd.zone.zone_id] = zd.zone.lot_ids.size();
  report["zone_sizes"] = sizes;
  write_text(c.out_dir + "/cluster_report.json", report.dump(2) + "\n");
  std::cout << "cluster: " << data.zones.size() << " zones ("
            << data.split.train_zones.size() << " train / "
            << data.split.test_zones.size() << " test) -> " << c.out_dir
            << "/zones.json\n";
  return 0;
}

// ---------------------------------------------------------------------------
// fuse

int cmd_fuse(const ExperimentConfig& c) {
  require_file(c.out_dir + "/zones.json", "cluster");
  Inputs in = load_inputs(c);
  TimeGrid grid = grid_from_records(in.parking, c.pipeline.step_seconds);
  PipelineData data = build_pipeline(in.parking, in.trips, in.locations, grid,
                                     c.pipeline);
  for (const auto& zd : data.zones) {
    // Canonical frame: lots sorted by id; training-zone demand scales.
    std::vector<std::string> sorted = zd.zone.lot_ids;
    std::sort(sorted.begin(), sorted.end());
    FeatureFrame frame = assemble_frame(zd.zone, zd.availability, zd.demand,
                                        sorted.front(), data.train_demand_scale);
    const std::string dir = c.out_dir + "/zones/" + zd.zone.zone_id;
    std::ostringstream csv;
    write_frame_csv(csv, frame, provenance_comment(c));
    write_text(dir + "/frame.csv", csv.str());

    nlohmann::json meta;
    meta["provenance"] = nlohmann::json::parse(provenance_json(c));
    meta["zone_id"] = zd.zone.zone_id;
    meta["lot_order"] = frame.lot_order;
    meta["demand_scale"] = frame.demand_scale;
    meta["fuse_report"] = {{"increments", zd.fuse_report.increments},
                           {"out_of_grid", zd.fuse_report.out_of_grid}};
    write_text(dir + "/meta.json", meta.dump(2) + "\n");
  }
  std::cout << "fuse: wrote " << data.zones.size() << " zone frames under "
            << c.out_dir << "/zones/\n";
  return 0;
}

// ---------------------------------------------------------------------------
// loading fused artifacts

struct LoadedData {
  std::vector<ParkingClusterZone> zones;
  SplitPlan split;
  std::map<std::string, FeatureFrame> frames;  // canonical, by zone id
};

LoadedData load_fused(const ExperimentConfig& c) {
  require_file(c.out_dir + "/zones.json", "cluster");
  LoadedData data;
  {
    std::ifstream f(c.out_dir + "/zones.json");
    std::stringstream buf;
    buf << f.rdbuf();
    std::tie(data.zones, data.split) = zones_from_json(buf.str());
  }
  for (const auto& z : data.zones) {
    const std::string path = c.out_dir + "/zones/" + z.zone_id + "/frame.csv";
    require_file(path, "fuse");
    std::ifstream f(path);
    FeatureFrame frame = read_frame_csv(f);
    frame.zone_id = z.zone_id;
    data.frames.emplace(z.zone_id, std::move(frame));
  }
  return data;
}

FeatureFrame reorder_for_target(const FeatureFrame& canonical,
                                const std::string& target) {
  FeatureFrame out = canonical;
  auto pos = std::find(out.lot_order.begin(), out.lot_order.end(), target);
  if (pos == out.lot_order.end())
    throw DataError("lot '" + target + "' is not in frame " + canonical.zone_id);
  const std::size_t idx = static_cast<std::size_t>(pos - out.lot_order.begin());
  std::rotate(out.lot_order.begin(), out.lot_order.begin() + idx,
              out.lot_order.begin() + idx + 1);
  std::rotate(out.lot_channels.begin(), out.lot_channels.begin() + idx,
              out.lot_channels.begin() + idx + 1);
  return out;
}

std::vector<WindowSample> samples_from_frames(const LoadedData& data,
                                              const std::set<std::string>& zone_ids,
                                              FeatureSetting setting,
                                              const PipelineConfig& pc) {
  std::vector<WindowSample> samples;
  for (const auto& z : data.zones) {
    if (!zone_ids.count(z.zone_id)) continue;
    const FeatureFrame& canonical = data.frames.at(z.zone_id);
    for (const auto& target : canonical.lot_order) {  // already sorted
      FeatureFrame frame = reorder_for_target(canonical, target);
      auto w = make_windows(frame, target, pc.window, pc.horizon, pc.stride,
                            setting);
      samples.insert(samples.end(), std::make_move_iterator(w.begin()),
                     std::make_move_iterator(w.end()));
    }
  }
  return samples;
}

// ---------------------------------------------------------------------------
// train

int cmd_train(const ExperimentConfig& c) {
  LoadedData data = load_fused(c);
  const FeatureSetting setting = feature_setting_from_int(c.train_setting);
  auto train_samples =
      samples_from_frames(data, data.split.train_zones, setting, c.pipeline);
  if (train_samples.empty()) throw DataError("train: no training samples");

  ModelConfig mc = c.model_config();
  mc.input_channels = static_cast<std::int64_t>(train_samples.front().channels);
  TrainedModel model = train(train_samples, mc, c.train_options());
  const std::string mdir = c.out_dir + "/models";
  write_text(mdir + "/transformer_s" + std::to_string(c.train_setting) + ".json",
             model_to_json(model, provenance_json(c)));

  std::ostringstream curve;
  curve << "# " << provenance_comment(c) << "\nepoch,loss\n";
  for (std::size_t e = 0; e < model.train_loss_curve.size(); ++e)
    curve << e + 1 << ',' << format_double(model.train_loss_curve[e]) << '\n';
  write_text(mdir + "/loss_transformer_s" + std::to_string(c.train_setting) + ".csv",
             curve.str());

  NLinearModel nl = nlinear_fit(train_samples, c.pipeline.horizon);
  nlohmann::json nlj;
  nlj["provenance"] = nlohmann::json::parse(provenance_json(c));
  nlj["window"] = nl.window;
  nlj["horizon"] = nl.horizon;
  nlj["weight"] = nl.weight;
  nlj["bias"] = nl.bias;
  write_text(mdir + "/nlinear_s" + std::to_string(c.train_setting) + ".json",
             nlj.dump() + "\n");

  // Baselines fitted on the pooled training-zone target series.
  std::vector<std::pair<Timestamp, double>> ha_rows;
  std::vector<std::vector<double>> ar_series;
  for (const auto& z : data.zones) {
    if (!data.split.train_zones.count(z.zone_id)) continue;
    const FeatureFrame& frame = data.frames.at(z.zone_id);
    for (std::size_t li = 0; li < frame.lot_order.size(); ++li) {
      for (std::size_t i = 0; i < frame.length(); ++i)
        ha_rows.emplace_back(frame.grid.instant(i), frame.lot_channels[li][i]);
      ar_series.push_back(frame.lot_channels[li]);
    }
  }
  HAModel ha = ha_fit(ha_rows, c.pipeline.step_seconds);
  nlohmann::json haj;
  haj["provenance"] = nlohmann::json::parse(provenance_json(c));
  haj["step"] = ha.step;
  haj["global_mean"] = ha.global_mean;
  nlohmann::json slots = nlohmann::json::array();
  for (const auto& [key, mean] : ha.slot_means)
    slots.push_back({key.first, key.second, mean,
                     ha.slot_counts.at(key)});
  haj["slots"] = slots;
  write_text(mdir + "/ha.json", haj.dump() + "\n");

  ARModel ar = ar_fit(ar_series, c.ar_p, c.ar_d);
  nlohmann::json arj;
  arj["provenance"] = nlohmann::json::parse(provenance_json(c));
  arj["p"] = ar.p;
  arj["d"] = ar.d;
  arj["coefficients"] = ar.coefficients;
  arj["intercept"] = ar.intercept;
  arj["ridge_fallback"] = ar.ridge_fallback;
  write_text(mdir + "/ar.json", arj.dump() + "\n");

  std::cout << "train: transformer final loss "
            << (model.train_loss_curve.empty() ? 0.0 : model.train_loss_curve.back())
            << " over " << train_samples.size() << " samples -> " << mdir << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// model loading for evaluate/sweep

struct LoadedModels {
  TrainedModel transformer;
  NLinearModel nlinear;
  HAModel ha;
  ARModel ar;
};

LoadedModels load_models(const ExperimentConfig& c) {
  const std::string mdir = c.out_dir + "/models";
  const std::string suffix = "_s" + std::to_string(c.train_setting) + ".json";
  for (const std::string name :
       {"transformer" + suffix, "nlinear" + suffix, std::string("ha.json"),
        std::string("ar.json")})
    require_file(mdir + "/" + name, "train");

  LoadedModels m;
  {
    std::ifstream f(mdir + "/transformer" + suffix);
    std::stringstream buf;
    buf << f.rdbuf();
    m.transformer = model_from_json(buf.str());
  }
  {
    std::ifstream f(mdir + "/nlinear" + suffix);
    nlohmann::json j = nlohmann::json::parse(f);
    m.nlinear.window = j.at("window").get<std::size_t>();
    m.nlinear.horizon = j.at("horizon").get<std::size_t>();
    m.nlinear.weight = j.at("weight").get<std::vector<double>>();
    m.nlinear.bias = j.at("bias").get<std::vector<double>>();
  }
  {
    std::ifstream f(mdir + "/ha.json");
    nlohmann::json j = nlohmann::json::parse(f);
    m.ha.step = j.at("step").get<std::int64_t>();
    m.ha.global_mean = j.at("global_mean").get<double>();
    for (const auto& s : j.at("slots")) {
      const std::pair<int, int> key{s.at(0).get<int>(), s.at(1).get<int>()};
      m.ha.slot_means[key] = s.at(2).get<double>();
      m.ha.slot_counts[key] = s.at(3).get<std::size_t>();
    }
  }
  {
    std::ifstream f(mdir + "/ar.json");
    nlohmann::json j = nlohmann::json::parse(f);
    m.ar.p = j.at("p").get<int>();
    m.ar.d = j.at("d").get<int>();
    m.ar.coefficients = j.at("coefficients").get<std::vector<double>>();
    m.ar.intercept = j.at("intercept").get<double>();
    m.ar.ridge_fallback = j.value("ridge_fallback", false);
  }
  return m;
}

// ---------------------------------------------------------------------------
// evaluate

int cmd_evaluate(const ExperimentConfig& c) {
  LoadedData data = load_fused(c);
  LoadedModels models = load_models(c);
  const FeatureSetting setting = feature_setting_from_int(c.train_setting);
  auto test = samples_from_frames(data, data.split.test_zones, setting, c.pipeline);
  if (test.empty()) throw DataError("evaluate: no test samples");

  const MetricsReport rt = evaluate_transformer(models.transformer, test, c.mape_epsilon);
  const MetricsReport rn = evaluate_nlinear(models.nlinear, test, c.mape_epsilon);
  const MetricsReport rh = evaluate_ha(models.ha, test, c.mape_epsilon);
  const MetricsReport ra = evaluate_ar(models.ar, test, c.mape_epsilon);

  const CostReport cost = cost_report(models.transformer.config);
  nlohmann::json j;
  j["provenance"] = nlohmann::json::parse(provenance_json(c));
  j["setting"] = c.train_setting;
  j["models"]["transformer"] = metrics_json(rt);
  j["models"]["nlinear"] = metrics_json(rn);
  j["models"]["ha"] = metrics_json(rh);
  j["models"]["ar"] = metrics_json(ra);
  j["cost"]["transformer"] = {{"params_millions", cost.params_millions},
                              {"macs_billions", cost.macs_billions}};
  const double nl_params =
      static_cast<double>(models.nlinear.window * models.nlinear.horizon +
                          models.nlinear.horizon);
  j["cost"]["nlinear"] = {{"params_millions", nl_params / 1e6},
                          {"macs_billions", nl_params / 1e9}};
  write_text(c.out_dir + "/metrics.json", j.dump(2) + "\n");

  std::ostringstream table;
  table << "# " << provenance_comment(c) << "\n";
  table << "model        mse        mae        mape%      params(M)  macs(G)\n";
  auto row = [&table](const std::string& name, const MetricsReport& r,
                      double params_m, double macs_g) {
    char buf[160];
    if (r.mape)
      std::snprintf(buf, sizeof(buf), "%-12s %-10.4g %-10.4g %-10.4g", name.c_str(),
                    r.mse, r.mae, *r.mape);
    else
      std::snprintf(buf, sizeof(buf), "%-12s %-10.4g %-10.4g %-10s", name.c_str(),
                    r.mse, r.mae, "undef");
    table << buf;
    if (params_m > 0.0) {
      std::snprintf(buf, sizeof(buf), " %-10.4g %-10.4g", params_m, macs_g);
      table << buf;
    } else {
      table << " ---        ---";
    }
    table << "\n";
  };
  row("ha", rh, 0.0, 0.0);
  row("ar", ra, 0.0, 0.0);
  row("nlinear", rn, nl_params / 1e6, nl_params / 1e9);
  row("transformer", rt, cost.params_millions, cost.macs_billions);
  write_text(c.out_dir + "/metrics.txt", table.str());
  std::cout << table.str();
  return 0;
}

// ---------------------------------------------------------------------------
// ablate

int cmd_ablate(const ExperimentConfig& c) {
  LoadedData data = load_fused(c);

  AblationTable table;
  for (int setting_int : c.settings) {
    const FeatureSetting setting = feature_setting_from_int(setting_int);
    auto train_samples =
        samples_from_frames(data, data.split.train_zones, setting, c.pipeline);
    auto test_samples =
        samples_from_frames(data, data.split.test_zones, setting, c.pipeline);
    if (train_samples.empty() || test_samples.empty())
      throw DataError("ablate: empty train or test sample set");
    for (std::uint64_t seed : c.ablation_seeds) {
      NLinearModel nl = nlinear_fit(train_samples, c.pipeline.horizon);
      table.cells.push_back({"nlinear", setting_int, seed,
                             evaluate_nlinear(nl, test_samples, c.mape_epsilon)});

      ModelConfig mc = c.model_config();
      mc.input_channels = static_cast<std::int64_t>(train_samples.front().channels);
      TrainOptions to = c.train_options();
      to.seed = seed;
      TrainedModel tm = train(train_samples, mc, to);
      table.cells.push_back({"transformer", setting_int, seed,
                             evaluate_transformer(tm, test_samples, c.mape_epsilon)});
    }
  }

  std::ostringstream csv;
  csv << "# " << provenance_comment(c) << "\nmodel,setting,seed,mse,mae,mape\n";
  for (const auto& cell : table.cells) {
    csv << cell.model << ',' << cell.setting << ',' << cell.seed << ','
        << format_double(cell.metrics.mse) << ',' << format_double(cell.metrics.mae)
        << ',' << (cell.metrics.mape ? format_double(*cell.metrics.mape) : "undef")
        << '\n';
  }
  write_text(c.out_dir + "/ablation.csv", csv.str());

  // Feature-setting grid, mean across seeds.
  std::ostringstream grid;
  grid << "# " << provenance_comment(c) << "\n";
  grid << "setting  nlinear_mse  transformer_mse\n";
  for (int s : c.settings) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%-8d %-12.4g %-12.4g\n", s,
                  table.mean_mse("nlinear", s), table.mean_mse("transformer", s));
    grid << buf;
  }
  write_text(c.out_dir + "/ablation.txt", grid.str());
  std::cout << grid.str();
  return 0;
}

// ---------------------------------------------------------------------------
// sweep

int cmd_sweep(const ExperimentConfig& c) {
  LoadedData data = load_fused(c);
  LoadedModels models = load_models(c);
  const FeatureSetting setting = feature_setting_from_int(c.train_setting);
  auto test = samples_from_frames(data, data.split.test_zones, setting, c.pipeline);
  if (test.empty()) throw DataError("sweep: no test samples");

  std::map<std::string, std::vector<std::vector<double>>> preds;
  preds["transformer"] = predict_all(models.transformer, test);
  preds["nlinear"] = predict_all(models.nlinear, test);
  preds["ha"] = predict_all(models.ha, test);
  preds["ar"] = predict_all(models.ar, test);

  auto points = horizon_sweep(preds, test, c.horizons, c.mape_epsilon);
  std::ostringstream csv;
  csv << "# " << provenance_comment(c) << "\nhorizon,model,mse,mae,mape\n";
  for (const auto& p : points)
    csv << p.horizon << ',' << p.model << ',' << format_double(p.mse) << ','
        << format_double(p.mae) << ','
        << (p.mape ? format_double(*p.mape) : "undef") << '\n';
  write_text(c.out_dir + "/sweep.csv", csv.str());
  std::cout << "sweep: wrote " << points.size() << " points -> " << c.out_dir
            << "/sweep.csv\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"parking availability forecasting pipeline"};
  app.require_subcommand(1);

  CliOptions cli;
  app.add_option("--config", cli.config_path, "experiment config file");
  app.add_option("--out", cli.out_dir, "output directory (overrides config)");
  auto* seed_opt = app.add_option("--seed", cli.seed, "seed override");
  app.add_option("--set", cli.overrides, "key=value config override")
      ->take_all();

  auto* synth = app.add_subcommand("synth", "generate the synthetic dataset");
  auto* cluster = app.add_subcommand("cluster", "build parking cluster zones");
  auto* fuse = app.add_subcommand("fuse", "fuse demand and emit zone frames");
  auto* train_cmd = app.add_subcommand("train", "train forecasters");
  auto* evaluate = app.add_subcommand("evaluate", "metrics on the test zones");
  auto* ablate = app.add_subcommand("ablate", "feature-setting grid");
  auto* sweep = app.add_subcommand("sweep", "per-horizon error curves");

  CLI11_PARSE(app, argc, argv);
  cli.seed_given = seed_opt->count() > 0;

  try {
    const ExperimentConfig config = load_config(cli);
    if (synth->parsed()) return cmd_synth(config);
    if (cluster->parsed()) return cmd_cluster(config);
    if (fuse->parsed()) return cmd_fuse(config);
    if (train_cmd->parsed()) return cmd_train(config);
    if (evaluate->parsed()) return cmd_evaluate(config);
    if (ablate->parsed()) return cmd_ablate(config);
    if (sweep->parsed()) return cmd_sweep(config);
    std::cerr << "no subcommand given\n";
    return 1;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const NumericError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
