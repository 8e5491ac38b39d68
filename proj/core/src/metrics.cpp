#include "parkcast/metrics.hpp"

#include <cmath>

#include "parkcast/errors.hpp"

namespace parkcast {

namespace {

void check_lengths(const std::vector<double>& pred,
                   const std::vector<double>& actual) {
  if (pred.size() != actual.size() || pred.empty())
    throw ConfigError("metrics: prediction/actual lengths must match and be >= 1");
}

}  // namespace

double mse(const std::vector<double>& pred, const std::vector<double>& actual) {
  check_lengths(pred, actual);
  double s = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = pred[i] - actual[i];
    s += d * d;
  }
  return s / static_cast<double>(pred.size());
}

double mae(const std::vector<double>& pred, const std::vector<double>& actual) {
  check_lengths(pred, actual);
  double s = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) s += std::abs(pred[i] - actual[i]);
  return s / static_cast<double>(pred.size());
}

std::optional<double> mape(const std::vector<double>& pred,
                           const std::vector<double>& actual, double epsilon,
                           std::size_t* skipped) {
  check_lengths(pred, actual);
  double s = 0.0;
  std::size_t used = 0, skip = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (std::abs(actual[i]) < epsilon) {
      ++skip;
      continue;
    }
    s += std::abs((pred[i] - actual[i]) / actual[i]);
    ++used;
  }
  if (skipped) *skipped = skip;
  if (used == 0) return std::nullopt;
  return 100.0 * s / static_cast<double>(used);
}

void MetricsAccumulator::add(const std::string& lot_id,
                             const std::vector<double>& pred,
                             const std::vector<double>& actual) {
  check_lengths(pred, actual);
  Sums& s = per_lot_[lot_id];
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = pred[i] - actual[i];
    s.se += d * d;
    s.ae += std::abs(d);
    if (std::abs(actual[i]) < epsilon_) {
      ++s.mape_skipped;
    } else {
      s.ape += std::abs(d / actual[i]);
      ++s.mape_n;
    }
    ++s.n;
  }
}

MetricsReport MetricsAccumulator::report() const {
  MetricsReport r;
  double se = 0.0, ae = 0.0, ape = 0.0;
  std::size_t mape_n = 0;
  for (const auto& [lot, s] : per_lot_) {
    LotMetrics lm;
    lm.mse = s.se / static_cast<double>(s.n);
    lm.mae = s.ae / static_cast<double>(s.n);
    if (s.mape_n > 0) lm.mape = 100.0 * s.ape / static_cast<double>(s.mape_n);
    r.per_lot[lot] = lm;
    se += s.se;
    ae += s.ae;
    ape += s.ape;
    r.n_terms += s.n;
    mape_n += s.mape_n;
    r.mape_skipped += s.mape_skipped;
  }
  if (r.n_terms == 0) throw DataError("metrics report over zero terms");
  r.mse = se / static_cast<double>(r.n_terms);
  r.mae = ae / static_cast<double>(r.n_terms);
  if (mape_n > 0) r.mape = 100.0 * ape / static_cast<double>(mape_n);
  return r;
}

std::int64_t count_params(const ModelConfig& config) {
  const std::int64_t c = config.input_channels;
  const std::int64_t d = config.d_model;
  const std::int64_t f2 = 2 * static_cast<std::int64_t>(config.calendar.size());
  std::int64_t total = c * d + d;                 // input embedding
  if (f2 > 0) total += f2 * d + d;                // calendar embedding
  const std::int64_t per_layer = 4 * d * d + 4 * d        // Q,K,V,O with biases
                                 + 2 * d * config.d_ff + config.d_ff + d  // FFN
                                 + 4 * d;                 // two layer norms
  total += config.n_layers * per_layer;
  total += d * config.horizon + config.horizon;  // head
  return total;
}

std::int64_t count_macs(const ModelConfig& config, std::int64_t window) {
  const std::int64_t c = config.input_channels;
  const std::int64_t d = config.d_model;
  const std::int64_t f2 = 2 * static_cast<std::int64_t>(config.calendar.size());
  const std::int64_t L = window;
  std::int64_t total = L * c * d;  // input embedding
  if (f2 > 0) total += L * f2 * d; // calendar embedding
  const std::int64_t per_layer = 4 * L * d * d       // Q,K,V projections + output
                                 + 2 * L * L * d     // scores + weighted sum
                                 + 2 * L * d * config.d_ff;  // FFN
  total += config.n_layers * per_layer;
  total += d * config.horizon;  // head on the pooled vector
  return total;
}

CostReport cost_report(const ModelConfig& config) {
  CostReport r;
  r.params_millions = static_cast<double>(count_params(config)) / 1e6;
  r.macs_billions =
      static_cast<double>(count_macs(config, config.window)) / 1e9;
  return r;
}

std::int64_t enumerate_params(const TrainedModel& model) {
  std::int64_t total = 0;
  for (const auto& [name, tensor] : model.params) total += tensor.size();
  return total;
}

std::int64_t instrumented_forward_macs(const TrainedModel& model,
                                       const WindowSample& sample) {
  NoGradGuard guard;
  reset_mac_count();
  set_mac_counting(true);
  model_forward(model, sample);
  set_mac_counting(false);
  return static_cast<std::int64_t>(mac_count());
}

}  // namespace parkcast
