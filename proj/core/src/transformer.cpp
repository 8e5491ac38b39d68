#include "parkcast/transformer.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "parkcast/errors.hpp"
#include "parkcast/rng.hpp"

namespace parkcast {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

constexpr std::array<const char*, 4> kCalendarNames = {"hour", "day", "week",
                                                       "month"};

double feature_value(const CivilTime& c, double frac_day, CalendarFeature f) {
  switch (f) {
    case CalendarFeature::kHour:
      return static_cast<double>(c.hour) + static_cast<double>(c.minute) / 60.0 +
             static_cast<double>(c.second) / 3600.0;
    case CalendarFeature::kDay:
      return static_cast<double>(c.day - 1) + frac_day;
    case CalendarFeature::kWeek:
      return static_cast<double>(c.weekday) + frac_day;
    case CalendarFeature::kMonth:
      return static_cast<double>(c.month - 1) +
             (static_cast<double>(c.day - 1) + frac_day) /
                 static_cast<double>(c.days_in_month);
  }
  return 0.0;
}

double feature_period(CalendarFeature f) {
  switch (f) {
    case CalendarFeature::kHour: return 24.0;
    case CalendarFeature::kDay: return 31.0;
    case CalendarFeature::kWeek: return 7.0;
    case CalendarFeature::kMonth: return 12.0;
  }
  return 1.0;
}

}  // namespace

std::vector<CalendarFeature> parse_calendar_features(const std::string& csv) {
  std::vector<CalendarFeature> out;
  std::size_t start = 0;
  while (start <= csv.size()) {
    std::size_t pos = csv.find(',', start);
    std::string item = csv.substr(
        start, pos == std::string::npos ? std::string::npos : pos - start);
    if (!item.empty()) {
      bool known = false;
      for (int i = 0; i < 4; ++i) {
        if (item == kCalendarNames[i]) {
          out.push_back(static_cast<CalendarFeature>(i));
          known = true;
          break;
        }
      }
      if (!known && item != "none")
        throw ConfigError("unknown calendar feature '" + item + "'");
    }
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string calendar_features_to_string(const std::vector<CalendarFeature>& fs) {
  if (fs.empty()) return "none";
  std::string out;
  for (std::size_t i = 0; i < fs.size(); ++i) {
    if (i) out += ',';
    out += kCalendarNames[static_cast<int>(fs[i])];
  }
  return out;
}

std::vector<double> calendar_encoding(Timestamp t,
                                      const std::vector<CalendarFeature>& features) {
  const CivilTime c = civil_from_timestamp(t);
  const double frac_day =
      (static_cast<double>(c.hour) * 3600.0 + static_cast<double>(c.minute) * 60.0 +
       static_cast<double>(c.second)) /
      86400.0;
  std::vector<double> enc;
  enc.reserve(2 * features.size());
  for (auto f : features) {
    const double v = feature_value(c, frac_day, f);
    const double period = feature_period(f);
    enc.push_back(std::sin(v * kTwoPi / period));
    enc.push_back(std::cos(v * kTwoPi / period));
  }
  return enc;
}

std::int64_t ModelConfig::head_dim() const {
  if (n_heads <= 0 || d_model % n_heads != 0)
    throw ConfigError("d_model (" + std::to_string(d_model) +
                      ") must be divisible by n_heads (" + std::to_string(n_heads) + ")");
  return d_model / n_heads;
}

Tensor scaled_dot_attention(const Tensor& q, const Tensor& k, const Tensor& v) {
  if (q.cols() != k.cols())
    throw ConfigError("attention: query/key dimensions disagree");
  if (k.rows() != v.rows())
    throw ConfigError("attention: key/value counts disagree");
  const double inv_sqrt_dk = 1.0 / std::sqrt(static_cast<double>(q.cols()));
  Tensor scores = scale(matmul(q, transpose(k)), inv_sqrt_dk);
  return matmul(softmax_rows(scores), v);
}

Tensor multi_head_attention(const Tensor& x, const AttentionParams& p) {
  const std::size_t h = p.wq.size();
  if (h == 0 || p.wk.size() != h || p.wv.size() != h)
    throw ConfigError("multi_head_attention: malformed parameter set");
  std::vector<Tensor> heads;
  heads.reserve(h);
  for (std::size_t i = 0; i < h; ++i) {
    Tensor q = add_row_bias(matmul(x, p.wq[i]), p.bq[i]);
    Tensor k = add_row_bias(matmul(x, p.wk[i]), p.bk[i]);
    Tensor v = add_row_bias(matmul(x, p.wv[i]), p.bv[i]);
    heads.push_back(scaled_dot_attention(q, k, v));
  }
  Tensor cat = h == 1 ? heads.front() : concat_cols(heads);
  return add_row_bias(matmul(cat, p.wo), p.bo);
}

Tensor feed_forward(const Tensor& hidden, const Tensor& w1, const Tensor& b1,
                    const Tensor& w2, const Tensor& b2) {
  return add_row_bias(matmul(relu(add_row_bias(matmul(hidden, w1), b1)), w2), b2);
}

Tensor& TrainedModel::param(const std::string& name) {
  auto it = params.find(name);
  if (it == params.end()) throw ConfigError("unknown parameter '" + name + "'");
  return it->second;
}
const Tensor& TrainedModel::param(const std::string& name) const {
  auto it = params.find(name);
  if (it == params.end()) throw ConfigError("unknown parameter '" + name + "'");
  return it->second;
}

namespace {

Tensor uniform_init(std::vector<std::int64_t> shape, std::int64_t fan_in, Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(std::max<std::int64_t>(1, fan_in)));
  Tensor t = Tensor::zeros(std::move(shape), true);
  for (auto& v : t.values()) v = rng.uniform(-bound, bound);
  return t;
}

std::string layer_prefix(std::int64_t layer) {
  return "layer" + std::to_string(layer) + ".";
}

AttentionParams attention_params(const TrainedModel& m, std::int64_t layer) {
  AttentionParams p;
  const std::string pre = layer_prefix(layer) + "attn.";
  for (std::int64_t h = 0; h < m.config.n_heads; ++h) {
    const std::string hp = pre + "h" + std::to_string(h) + ".";
    p.wq.push_back(m.param(hp + "wq"));
    p.bq.push_back(m.param(hp + "bq"));
    p.wk.push_back(m.param(hp + "wk"));
    p.bk.push_back(m.param(hp + "bk"));
    p.wv.push_back(m.param(hp + "wv"));
    p.bv.push_back(m.param(hp + "bv"));
  }
  p.wo = m.param(pre + "wo");
  p.bo = m.param(pre + "bo");
  return p;
}

}  // namespace

TrainedModel init_model(const ModelConfig& config) {
  if (config.input_channels <= 0)
    throw ConfigError("model config has no input channels");
  const std::int64_t d = config.d_model;
  const std::int64_t dk = config.head_dim();
  Rng rng = Rng(config.seed).fork("model-init");

  TrainedModel m;
  m.config = config;
  auto put = [&m](const std::string& name, Tensor t) {
    m.params.emplace(name, std::move(t));
  };

  // Parameter creation order is fixed; the map iterates by name for
  // optimizer and serialization purposes, and init draws happen in the
  // order written here.
  put("embed.w", uniform_init({config.input_channels, d}, config.input_channels, rng));
  put("embed.b", Tensor::zeros({d}, true));
  if (!config.calendar.empty()) {
    const std::int64_t f2 = 2 * static_cast<std::int64_t>(config.calendar.size());
    put("cal.w", uniform_init({f2, d}, f2, rng));
    put("cal.b", Tensor::zeros({d}, true));
  }
  for (std::int64_t layer = 0; layer < config.n_layers; ++layer) {
    const std::string pre = layer_prefix(layer);
    put(pre + "attn.norm.gain", Tensor::constant({d}, 1.0, true));
    put(pre + "attn.norm.shift", Tensor::zeros({d}, true));
    for (std::int64_t h = 0; h < config.n_heads; ++h) {
      const std::string hp = pre + "attn.h" + std::to_string(h) + ".";
      put(hp + "wq", uniform_init({d, dk}, d, rng));
      put(hp + "bq", Tensor::zeros({dk}, true));
      put(hp + "wk", uniform_init({d, dk}, d, rng));
      put(hp + "bk", Tensor::zeros({dk}, true));
      put(hp + "wv", uniform_init({d, dk}, d, rng));
      put(hp + "bv", Tensor::zeros({dk}, true));
    }
    put(pre + "attn.wo", uniform_init({d, d}, d, rng));
    put(pre + "attn.bo", Tensor::zeros({d}, true));
    put(pre + "ffn.norm.gain", Tensor::constant({d}, 1.0, true));
    put(pre + "ffn.norm.shift", Tensor::zeros({d}, true));
    put(pre + "ffn.w1", uniform_init({d, config.d_ff}, d, rng));
    put(pre + "ffn.b1", Tensor::zeros({config.d_ff}, true));
    put(pre + "ffn.w2", uniform_init({config.d_ff, d}, config.d_ff, rng));
    put(pre + "ffn.b2", Tensor::zeros({d}, true));
  }
  put("head.w", uniform_init({d, config.horizon}, d, rng));
  put("head.b", Tensor::zeros({config.horizon}, true));
  return m;
}

Tensor model_forward(const TrainedModel& model, const WindowSample& sample,
                     std::uint64_t train_step) {
  const ModelConfig& cfg = model.config;
  if (static_cast<std::int64_t>(sample.channels) != cfg.input_channels)
    throw ConfigError("sample has " + std::to_string(sample.channels) +
                      " channels but the model expects " +
                      std::to_string(cfg.input_channels));
  if (static_cast<std::int64_t>(sample.window) != cfg.window)
    throw ConfigError("sample window length does not match the model");

  const std::int64_t L = cfg.window;
  Tensor input = Tensor::from_values({L, cfg.input_channels}, sample.input);
  Tensor x = add_row_bias(matmul(input, model.param("embed.w")),
                          model.param("embed.b"));

  if (!cfg.calendar.empty()) {
    const std::int64_t f2 = 2 * static_cast<std::int64_t>(cfg.calendar.size());
    std::vector<double> enc(L * f2);
    for (std::int64_t i = 0; i < L; ++i) {
      const auto e = calendar_encoding(sample.input_timestamps[i], cfg.calendar);
      std::copy(e.begin(), e.end(), enc.begin() + i * f2);
    }
    Tensor cal = Tensor::from_values({L, f2}, std::move(enc));
    x = add(x, add_row_bias(matmul(cal, model.param("cal.w")),
                            model.param("cal.b")));
  }

  const bool use_dropout = cfg.dropout > 0.0 && train_step != 0;
  for (std::int64_t layer = 0; layer < cfg.n_layers; ++layer) {
    const std::string pre = layer_prefix(layer);
    Tensor normed = layer_norm_rows(x, model.param(pre + "attn.norm.gain"),
                                    model.param(pre + "attn.norm.shift"));
    Tensor attn = multi_head_attention(normed, attention_params(model, layer));
    if (use_dropout)
      attn = dropout(attn, cfg.dropout, train_step * 1000003ull + layer * 2 + 1);
    x = add(x, attn);

    Tensor normed2 = layer_norm_rows(x, model.param(pre + "ffn.norm.gain"),
                                     model.param(pre + "ffn.norm.shift"));
    Tensor ff = feed_forward(normed2, model.param(pre + "ffn.w1"),
                             model.param(pre + "ffn.b1"),
                             model.param(pre + "ffn.w2"),
                             model.param(pre + "ffn.b2"));
    if (use_dropout)
      ff = dropout(ff, cfg.dropout, train_step * 1000003ull + layer * 2 + 2);
    x = add(x, ff);
  }

  Tensor pooled = mean_rows(x);  // [1, d]
  return add_row_bias(matmul(pooled, model.param("head.w")),
                      model.param("head.b"));  // [1, H]
}

std::vector<double> predict(const TrainedModel& model, const WindowSample& sample) {
  NoGradGuard guard;
  return model_forward(model, sample).values();
}

AdamOptimizer::AdamOptimizer(std::vector<Tensor> params, double lr, double beta1,
                             double beta2, double epsilon)
    : params_(std::move(params)),
      lr_(lr),
      beta1_(beta1),
      beta2_(beta2),
      epsilon_(epsilon) {
  for (const auto& p : params_) {
    m_.emplace_back(p.size(), 0.0);
    v_.emplace_back(p.size(), 0.0);
  }
}

void AdamOptimizer::zero_grad() {
  for (auto& p : params_) p.zero_grad();
}

void AdamOptimizer::step() {
  ++t_;
  const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t k = 0; k < params_.size(); ++k) {
    auto& values = params_[k].values();
    const auto& grad = params_[k].grad();
    auto& m = m_[k];
    auto& v = v_[k];
    for (std::size_t i = 0; i < values.size(); ++i) {
      m[i] = beta1_ * m[i] + (1.0 - beta1_) * grad[i];
      v[i] = beta2_ * v[i] + (1.0 - beta2_) * grad[i] * grad[i];
      const double mhat = m[i] / bc1;
      const double vhat = v[i] / bc2;
      values[i] -= lr_ * mhat / (std::sqrt(vhat) + epsilon_);
    }
  }
}

TrainedModel train(const std::vector<WindowSample>& dataset,
                   const ModelConfig& config, const TrainOptions& options) {
  if (dataset.empty()) throw DataError("train: empty dataset");
  if (options.batch_size <= 0) throw ConfigError("train: batch size must be positive");

  ModelConfig cfg = config;
  cfg.seed = options.seed;
  TrainedModel model = init_model(cfg);

  std::vector<Tensor> params;
  for (auto& [name, tensor] : model.params) params.push_back(tensor);
  AdamOptimizer opt(params, options.learning_rate, options.adam_beta1,
                    options.adam_beta2, options.adam_epsilon);

  Rng shuffle_rng = Rng(options.seed).fork("train-shuffle");
  std::vector<std::size_t> order(dataset.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  std::uint64_t step = 0;
  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    shuffle_rng.shuffle(order);
    double epoch_loss = 0.0;
    std::size_t seen = 0;
    for (std::size_t begin = 0; begin < order.size();
         begin += static_cast<std::size_t>(options.batch_size)) {
      const std::size_t end =
          std::min(order.size(), begin + static_cast<std::size_t>(options.batch_size));
      ++step;
      opt.zero_grad();
      Tensor batch_loss;
      for (std::size_t idx = begin; idx < end; ++idx) {
        const WindowSample& sample = dataset[order[idx]];
        Tensor pred = model_forward(model, sample, step);
        Tensor target = Tensor::from_values({1, cfg.horizon}, sample.target);
        Tensor loss = mse_loss(pred, target);
        batch_loss = batch_loss.defined() ? add(batch_loss, loss) : loss;
      }
      batch_loss = scale(batch_loss, 1.0 / static_cast<double>(end - begin));
      const double loss_value = batch_loss.item();
      if (!std::isfinite(loss_value))
        throw NumericError(
            "training loss became non-finite at epoch " + std::to_string(epoch) +
            "; lower train.lr (currently " + std::to_string(options.learning_rate) + ")");
      batch_loss.backward();
      opt.step();
      epoch_loss += loss_value * static_cast<double>(end - begin);
      seen += end - begin;
    }
    model.train_loss_curve.push_back(epoch_loss / static_cast<double>(seen));
  }
  return model;
}

std::string model_to_json(const TrainedModel& model,
                          const std::string& provenance_json) {
  nlohmann::json j;
  if (!provenance_json.empty())
    j["provenance"] = nlohmann::json::parse(provenance_json);
  j["config"] = {
      {"input_channels", model.config.input_channels},
      {"window", model.config.window},
      {"horizon", model.config.horizon},
      {"d_model", model.config.d_model},
      {"n_heads", model.config.n_heads},
      {"n_layers", model.config.n_layers},
      {"d_ff", model.config.d_ff},
      {"calendar", calendar_features_to_string(model.config.calendar)},
      {"dropout", model.config.dropout},
      {"seed", model.config.seed},
  };
  j["train_loss_curve"] = model.train_loss_curve;
  nlohmann::json params = nlohmann::json::object();
  for (const auto& [name, tensor] : model.params) {
    params[name] = {{"shape", tensor.shape()}, {"values", tensor.values()}};
  }
  j["params"] = std::move(params);
  return j.dump() + "\n";
}

TrainedModel model_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  const auto& cj = j.at("config");
  ModelConfig cfg;
  cfg.input_channels = cj.at("input_channels").get<std::int64_t>();
  cfg.window = cj.at("window").get<std::int64_t>();
  cfg.horizon = cj.at("horizon").get<std::int64_t>();
  cfg.d_model = cj.at("d_model").get<std::int64_t>();
  cfg.n_heads = cj.at("n_heads").get<std::int64_t>();
  cfg.n_layers = cj.at("n_layers").get<std::int64_t>();
  cfg.d_ff = cj.at("d_ff").get<std::int64_t>();
  cfg.calendar = parse_calendar_features(cj.at("calendar").get<std::string>());
  cfg.dropout = cj.value("dropout", 0.0);
  cfg.seed = cj.at("seed").get<std::uint64_t>();

  TrainedModel expected = init_model(cfg);
  TrainedModel model;
  model.config = cfg;
  model.train_loss_curve = j.value("train_loss_curve", std::vector<double>{});
  for (const auto& [name, pj] : j.at("params").items()) {
    auto shape = pj.at("shape").get<std::vector<std::int64_t>>();
    auto values = pj.at("values").get<std::vector<double>>();
    auto it = expected.params.find(name);
    if (it == expected.params.end())
      throw DataError("model file has unexpected parameter '" + name + "'");
    if (it->second.shape() != shape)
      throw DataError("model parameter '" + name + "' has the wrong shape");
    model.params.emplace(name, Tensor::from_values(std::move(shape),
                                                   std::move(values), true));
  }
  if (model.params.size() != expected.params.size())
    throw DataError("model file is missing parameters");
  return model;
}

}  // namespace parkcast
