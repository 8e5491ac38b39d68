#include "parkcast/experiment.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "parkcast/csv.hpp"
#include "parkcast/errors.hpp"

namespace parkcast {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  if constexpr (std::is_floating_point_v<T>) {
    try {
      std::size_t pos = 0;
      out = static_cast<T>(std::stod(value, &pos));
      if (pos != value.size()) throw std::invalid_argument(value);
    } catch (const std::exception&) {
      throw ConfigError("config key '" + key + "': bad number '" + value + "'");
    }
  } else {
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc() || ptr != value.data() + value.size())
      throw ConfigError("config key '" + key + "': bad integer '" + value + "'");
  }
  return out;
}

std::vector<std::string> split_csv(const std::string& value) {
  std::vector<std::string> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string join_u64(const std::vector<std::uint64_t>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(v[i]);
  }
  return out;
}

std::string join_sz(const std::vector<std::size_t>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(v[i]);
  }
  return out;
}

std::string join_int(const std::vector<int>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(v[i]);
  }
  return out;
}

}  // namespace

ModelConfig ExperimentConfig::model_config() const {
  ModelConfig mc;
  mc.window = static_cast<std::int64_t>(pipeline.window);
  mc.horizon = static_cast<std::int64_t>(pipeline.horizon);
  mc.d_model = d_model;
  mc.n_heads = n_heads;
  mc.n_layers = n_layers;
  mc.d_ff = d_ff;
  mc.calendar = parse_calendar_features(calendar);
  mc.dropout = dropout;
  mc.seed = seed;
  return mc;
}

TrainOptions ExperimentConfig::train_options() const {
  TrainOptions to;
  to.epochs = epochs;
  to.batch_size = batch;
  to.learning_rate = lr;
  to.seed = seed;
  return to;
}

ConfigMap parse_config_text(const std::string& text) {
  ConfigMap map;
  std::stringstream ss(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(ss, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
    map[key] = value;
  }
  return map;
}

ConfigMap read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

void apply_overrides(ConfigMap& map, const std::vector<std::string>& overrides) {
  for (const auto& item : overrides) {
    const std::size_t eq = item.find('=');
    if (eq == std::string::npos)
      throw ConfigError("override '" + item + "' is not key=value");
    map[trim(item.substr(0, eq))] = trim(item.substr(eq + 1));
  }
}

ExperimentConfig config_from_map(const ConfigMap& map) {
  ExperimentConfig c;
  for (const auto& [key, value] : map) {
    if (key == "seed") c.seed = parse_number<std::uint64_t>(key, value);
    else if (key == "out") c.out_dir = value;
    else if (key == "paths.parking") c.parking_path = value;
    else if (key == "paths.lots") c.lots_path = value;
    else if (key == "paths.trips.metro") c.trip_paths[0] = value;
    else if (key == "paths.trips.bus") c.trip_paths[1] = value;
    else if (key == "paths.trips.ride_hailing") c.trip_paths[2] = value;
    else if (key == "paths.trips.taxi") c.trip_paths[3] = value;
    else if (key == "synth.seed") c.synth.seed = parse_number<std::uint64_t>(key, value);
    else if (key == "synth.n_lots") c.synth.n_lots = parse_number<int>(key, value);
    else if (key == "synth.n_clusters") c.synth.n_clusters = parse_number<int>(key, value);
    else if (key == "synth.n_days") c.synth.n_days = parse_number<int>(key, value);
    else if (key == "synth.start_date") c.synth.start_date = value;
    else if (key == "synth.city_extent") c.synth.city_extent = parse_number<double>(key, value);
    else if (key == "synth.cluster_spread") c.synth.cluster_spread = parse_number<double>(key, value);
    else if (key == "synth.capacity_min") c.synth.capacity_min = parse_number<int>(key, value);
    else if (key == "synth.capacity_max") c.synth.capacity_max = parse_number<int>(key, value);
    else if (key == "synth.base_occupancy") c.synth.base_occupancy = parse_number<double>(key, value);
    else if (key == "synth.base_jitter") c.synth.base_jitter = parse_number<double>(key, value);
    else if (key == "synth.daily_amplitude") c.synth.daily_amplitude = parse_number<double>(key, value);
    else if (key == "synth.weekly_amplitude") c.synth.weekly_amplitude = parse_number<double>(key, value);
    else if (key == "synth.noise_sigma") c.synth.noise_sigma = parse_number<double>(key, value);
    else if (key == "synth.idio_sigma") c.synth.idio_sigma = parse_number<double>(key, value);
    else if (key == "synth.noise_correlation_hours") c.synth.noise_correlation_hours = parse_number<double>(key, value);
    else if (key == "synth.stay_median_hours") c.synth.stay_median_hours = parse_number<double>(key, value);
    else if (key == "synth.stay_log_sd") c.synth.stay_log_sd = parse_number<double>(key, value);
    else if (key == "synth.coupling") c.synth.coupling = parse_number<double>(key, value);
    else if (key == "synth.coupled_radius") c.synth.coupled_radius = parse_number<double>(key, value);
    else if (key == "synth.lead_max_minutes") c.synth.lead_max_minutes = parse_number<double>(key, value);
    else if (key == "prep.step_seconds") c.pipeline.step_seconds = parse_number<std::int64_t>(key, value);
    else if (key == "prep.cutoff_seconds") c.pipeline.cutoff_seconds = parse_number<std::int64_t>(key, value);
    else if (key == "prep.window") c.pipeline.window = parse_number<std::size_t>(key, value);
    else if (key == "prep.horizon") c.pipeline.horizon = parse_number<std::size_t>(key, value);
    else if (key == "prep.stride") c.pipeline.stride = parse_number<std::size_t>(key, value);
    else if (key == "prep.train_fraction") c.pipeline.train_fraction = parse_number<double>(key, value);
    else if (key == "cluster.k") c.pipeline.k = parse_number<int>(key, value);
    else if (key == "cluster.p") c.pipeline.minkowski_p = parse_number<double>(key, value);
    else if (key == "cluster.radius") c.pipeline.radius = parse_number<double>(key, value);
    else if (key == "cluster.use_capacity") c.pipeline.use_capacity_feature = (value == "true" || value == "1");
    else if (key == "cluster.max_iter") c.pipeline.kmeans_max_iter = parse_number<int>(key, value);
    else if (key == "cluster.tol") c.pipeline.kmeans_tol = parse_number<double>(key, value);
    else if (key == "model.d_model") c.d_model = parse_number<std::int64_t>(key, value);
    else if (key == "model.n_heads") c.n_heads = parse_number<std::int64_t>(key, value);
    else if (key == "model.n_layers") c.n_layers = parse_number<std::int64_t>(key, value);
    else if (key == "model.d_ff") c.d_ff = parse_number<std::int64_t>(key, value);
    else if (key == "model.calendar") c.calendar = value;
    else if (key == "model.dropout") c.dropout = parse_number<double>(key, value);
    else if (key == "train.epochs") c.epochs = parse_number<int>(key, value);
    else if (key == "train.batch") c.batch = parse_number<int>(key, value);
    else if (key == "train.lr") c.lr = parse_number<double>(key, value);
    else if (key == "train.setting") c.train_setting = parse_number<int>(key, value);
    else if (key == "ar.p") c.ar_p = parse_number<int>(key, value);
    else if (key == "ar.d") c.ar_d = parse_number<int>(key, value);
    else if (key == "eval.mape_epsilon") c.mape_epsilon = parse_number<double>(key, value);
    else if (key == "eval.horizons") {
      c.horizons.clear();
      for (const auto& item : split_csv(value))
        c.horizons.push_back(parse_number<std::size_t>(key, item));
    } else if (key == "eval.settings") {
      c.settings.clear();
      for (const auto& item : split_csv(value))
        c.settings.push_back(parse_number<int>(key, item));
    } else if (key == "eval.seeds") {
      c.ablation_seeds.clear();
      for (const auto& item : split_csv(value))
        c.ablation_seeds.push_back(parse_number<std::uint64_t>(key, item));
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
  // The master seed feeds every stage unless a stage seed was given.
  if (!map.count("synth.seed")) c.synth.seed = c.seed;
  c.pipeline.seed = c.seed;
  return c;
}

std::string canonical_config(const ExperimentConfig& c) {
  // Everything that affects outputs, in fixed key order.
  std::map<std::string, std::string> kv;
  kv["seed"] = std::to_string(c.seed);
  kv["paths.parking"] = c.parking_path;
  kv["paths.lots"] = c.lots_path;
  for (int m = 0; m < kNumModes; ++m)
    kv[std::string("paths.trips.") + kModeNames[m]] = c.trip_paths[m];
  kv["synth.seed"] = std::to_string(c.synth.seed);
  kv["synth.n_lots"] = std::to_string(c.synth.n_lots);
  kv["synth.n_clusters"] = std::to_string(c.synth.n_clusters);
  kv["synth.n_days"] = std::to_string(c.synth.n_days);
  kv["synth.start_date"] = c.synth.start_date;
  kv["synth.base_occupancy"] = format_double(c.synth.base_occupancy);
  kv["synth.base_jitter"] = format_double(c.synth.base_jitter);
  kv["synth.daily_amplitude"] = format_double(c.synth.daily_amplitude);
  kv["synth.weekly_amplitude"] = format_double(c.synth.weekly_amplitude);
  kv["synth.noise_sigma"] = format_double(c.synth.noise_sigma);
  kv["synth.idio_sigma"] = format_double(c.synth.idio_sigma);
  kv["synth.stay_median_hours"] = format_double(c.synth.stay_median_hours);
  kv["synth.stay_log_sd"] = format_double(c.synth.stay_log_sd);
  kv["synth.coupling"] = format_double(c.synth.coupling);
  kv["synth.coupled_radius"] = format_double(c.synth.coupled_radius);
  kv["synth.lead_max_minutes"] = format_double(c.synth.lead_max_minutes);
  kv["synth.capacity_min"] = std::to_string(c.synth.capacity_min);
  kv["synth.capacity_max"] = std::to_string(c.synth.capacity_max);
  kv["prep.step_seconds"] = std::to_string(c.pipeline.step_seconds);
  kv["prep.cutoff_seconds"] = std::to_string(c.pipeline.cutoff_seconds);
  kv["prep.window"] = std::to_string(c.pipeline.window);
  kv["prep.horizon"] = std::to_string(c.pipeline.horizon);
  kv["prep.stride"] = std::to_string(c.pipeline.stride);
  kv["prep.train_fraction"] = format_double(c.pipeline.train_fraction);
  kv["cluster.k"] = std::to_string(c.pipeline.k);
  kv["cluster.p"] = format_double(c.pipeline.minkowski_p);
  kv["cluster.radius"] = format_double(c.pipeline.radius);
  kv["cluster.use_capacity"] = c.pipeline.use_capacity_feature ? "true" : "false";
  kv["model.d_model"] = std::to_string(c.d_model);
  kv["model.n_heads"] = std::to_string(c.n_heads);
  kv["model.n_layers"] = std::to_string(c.n_layers);
  kv["model.d_ff"] = std::to_string(c.d_ff);
  kv["model.calendar"] = c.calendar;
  kv["model.dropout"] = format_double(c.dropout);
  kv["train.epochs"] = std::to_string(c.epochs);
  kv["train.batch"] = std::to_string(c.batch);
  kv["train.lr"] = format_double(c.lr);
  kv["train.setting"] = std::to_string(c.train_setting);
  kv["ar.p"] = std::to_string(c.ar_p);
  kv["ar.d"] = std::to_string(c.ar_d);
  kv["eval.horizons"] = join_sz(c.horizons);
  kv["eval.settings"] = join_int(c.settings);
  kv["eval.seeds"] = join_u64(c.ablation_seeds);
  kv["eval.mape_epsilon"] = format_double(c.mape_epsilon);

  std::string out;
  for (const auto& [k, v] : kv) out += k + "=" + v + "\n";
  return out;
}

std::string config_hash(const ExperimentConfig& config) {
  const std::string text = canonical_config(config);
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string provenance_json(const ExperimentConfig& config) {
  nlohmann::json j;
  j["config_hash"] = config_hash(config);
  j["seed"] = config.seed;
  j["tool_version"] = kToolVersion;
  return j.dump();
}

}  // namespace parkcast
