#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "parkcast/series.hpp"
#include "parkcast/tensor.hpp"
#include "parkcast/time.hpp"

namespace parkcast {

/// Periodic calendar features encoded as sine/cosine pairs of the feature's
/// fractional value: hour of day (T=24), day of month (T=31), day of week
/// (T=7), month of year (T=12).
enum class CalendarFeature : int { kHour = 0, kDay = 1, kWeek = 2, kMonth = 3 };

std::vector<CalendarFeature> parse_calendar_features(const std::string& csv);
std::string calendar_features_to_string(const std::vector<CalendarFeature>& fs);

/// sin/cos pair per feature, in the order given: length 2 * |features|.
std::vector<double> calendar_encoding(Timestamp t,
                                      const std::vector<CalendarFeature>& features);

struct ModelConfig {
  std::int64_t input_channels = 0;  // C, set from the feature setting
  std::int64_t window = 432;        // L
  std::int64_t horizon = 144;       // H
  std::int64_t d_model = 64;
  std::int64_t n_heads = 4;
  std::int64_t n_layers = 2;
  std::int64_t d_ff = 128;
  std::vector<CalendarFeature> calendar = {CalendarFeature::kHour,
                                           CalendarFeature::kWeek};
  double dropout = 0.0;
  std::uint64_t seed = 0;

  std::int64_t head_dim() const;  // d_k; validates divisibility
};

/// softmax(Q K^T / sqrt(d_k)) V with row-wise, max-subtracted softmax.
Tensor scaled_dot_attention(const Tensor& q, const Tensor& k, const Tensor& v);

struct AttentionParams {
  std::vector<Tensor> wq, bq, wk, bk, wv, bv;  // one per head
  Tensor wo, bo;
};

/// Per-head projections of x, scaled dot-product attention, concatenation,
/// output projection.
Tensor multi_head_attention(const Tensor& x, const AttentionParams& p);

/// ReLU(h W1 + b1) W2 + b2, applied position-wise.
Tensor feed_forward(const Tensor& h, const Tensor& w1, const Tensor& b1,
                    const Tensor& w2, const Tensor& b2);

/// The forecaster: parameters are owned by the ordered name->tensor map so
/// that serialization, optimization order, and cost accounting all agree.
struct TrainedModel {
  ModelConfig config;
  std::map<std::string, Tensor> params;
  std::vector<double> train_loss_curve;  // mean training MSE per epoch

  Tensor& param(const std::string& name);
  const Tensor& param(const std::string& name) const;
};

/// Fresh model with scaled-uniform weights (bound 1/sqrt(fan_in)), zero
/// biases, unit layer-norm gains. Deterministic in config.seed.
TrainedModel init_model(const ModelConfig& config);

/// One window through the encoder: returns the H-step forecast.
/// `train_step` seeds dropout masks; leave it 0 for inference.
Tensor model_forward(const TrainedModel& model, const WindowSample& sample,
                     std::uint64_t train_step = 0);

std::vector<double> predict(const TrainedModel& model, const WindowSample& sample);

struct TrainOptions {
  int epochs = 10;
  int batch_size = 32;
  double learning_rate = 1e-3;
  std::uint64_t seed = 0;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  bool verbose = false;
};

/// Bias-corrected Adam over a fixed parameter list.
class AdamOptimizer {
 public:
  AdamOptimizer(std::vector<Tensor> params, double lr, double beta1 = 0.9,
                double beta2 = 0.999, double epsilon = 1e-8);
  void step();
  void zero_grad();

 private:
  std::vector<Tensor> params_;
  std::vector<std::vector<double>> m_, v_;
  double lr_, beta1_, beta2_, epsilon_;
  std::int64_t t_ = 0;
};

/// Minimizes MSE over H-step targets with seeded shuffling and
/// deterministic batching; throws NumericError on NaN loss.
TrainedModel train(const std::vector<WindowSample>& dataset,
                   const ModelConfig& config, const TrainOptions& options);

/// JSON round-trip of config + named parameter arrays + loss curve.
std::string model_to_json(const TrainedModel& model,
                          const std::string& provenance_json = "");
TrainedModel model_from_json(const std::string& text);

}  // namespace parkcast
