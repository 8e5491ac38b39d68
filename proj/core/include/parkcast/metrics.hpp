#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "parkcast/transformer.hpp"

namespace parkcast {

double mse(const std::vector<double>& pred, const std::vector<double>& actual);
double mae(const std::vector<double>& pred, const std::vector<double>& actual);

/// Mean absolute percentage error in percent. Terms with |actual| below
/// epsilon are skipped; `skipped` (when given) receives their count.
/// Returns nullopt when every term was skipped.
std::optional<double> mape(const std::vector<double>& pred,
                           const std::vector<double>& actual,
                           double epsilon = 1e-3,
                           std::size_t* skipped = nullptr);

struct LotMetrics {
  double mse = 0.0;
  double mae = 0.0;
  std::optional<double> mape;
};

struct MetricsReport {
  double mse = 0.0;
  double mae = 0.0;
  std::optional<double> mape;      // undefined when every term was skipped
  std::size_t n_terms = 0;
  std::size_t mape_skipped = 0;
  std::map<std::string, LotMetrics> per_lot;
};

/// Accumulates prediction/actual pairs, attributed to lots for the
/// per-lot breakdown. Metric order never matters: sums are accumulated
/// per lot and combined in lot-id order.
class MetricsAccumulator {
 public:
  explicit MetricsAccumulator(double mape_epsilon = 1e-3)
      : epsilon_(mape_epsilon) {}
  void add(const std::string& lot_id, const std::vector<double>& pred,
           const std::vector<double>& actual);
  MetricsReport report() const;

 private:
  struct Sums {
    double se = 0.0, ae = 0.0, ape = 0.0;
    std::size_t n = 0, mape_n = 0, mape_skipped = 0;
  };
  double epsilon_;
  std::map<std::string, Sums> per_lot_;
};

struct CostReport {
  double params_millions = 0.0;
  double macs_billions = 0.0;
};

/// Analytic trainable-parameter count for a model config, in raw units.
/// Matches exactly what init_model materializes.
std::int64_t count_params(const ModelConfig& config);

/// Analytic multiply-accumulate count of one forward pass over a window of
/// `window` steps, in raw units. Counts dense projections, attention scores
/// and weighted sums, the FFN, the input and calendar embeddings, and the
/// output head; matches the instrumented matmul counter exactly.
std::int64_t count_macs(const ModelConfig& config, std::int64_t window);

CostReport cost_report(const ModelConfig& config);

/// Oracle-side helpers: actual parameter tally of a built model and the
/// instrumented multiply count of a real forward pass.
std::int64_t enumerate_params(const TrainedModel& model);
std::int64_t instrumented_forward_macs(const TrainedModel& model,
                                       const WindowSample& sample);

}  // namespace parkcast
