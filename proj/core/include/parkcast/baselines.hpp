#pragma once

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "parkcast/series.hpp"
#include "parkcast/time.hpp"

namespace parkcast {

/// Historical average over (day-of-week, slot-of-day) cells, where a slot
/// is the 10-minute grid position. Unseen slots fall back to the global mean.
struct HAModel {
  std::int64_t step = 600;
  std::map<std::pair<int, int>, double> slot_means;   // (weekday, slot) -> mean
  std::map<std::pair<int, int>, std::size_t> slot_counts;
  double global_mean = 0.0;
};

HAModel ha_fit(const std::vector<std::pair<Timestamp, double>>& train,
               std::int64_t step);
std::vector<double> ha_predict(const HAModel& model,
                               const std::vector<Timestamp>& when);

/// Direct multi-step linear model on last-value-anchored windows:
/// predict(x) = (x - x_L 1) W + b + x_L 1.
struct NLinearModel {
  std::size_t window = 0;   // L
  std::size_t horizon = 0;  // H
  std::vector<double> weight;  // row-major [L x H]
  std::vector<double> bias;    // [H]
};

/// Least squares on the anchored representation (the analytic minimizer of
/// the training MSE). Samples must be single-channel target-lot windows;
/// multichannel samples contribute channel 0 only.
NLinearModel nlinear_fit(const std::vector<WindowSample>& samples,
                         std::size_t horizon);
std::vector<double> nlinear_predict(const NLinearModel& model,
                                    const std::vector<double>& window);

/// Autoregression of order p on a d-times differenced series, fitted by
/// ordinary least squares; forecasts recursively and integrates back.
struct ARModel {
  int p = 6;
  int d = 1;
  std::vector<double> coefficients;  // lag 1..p
  double intercept = 0.0;
  bool ridge_fallback = false;  // set when the lag matrix was singular
};

ARModel ar_fit(const std::vector<double>& series, int p, int d);
/// Pooled fit over several series (lag rows never straddle series bounds).
ARModel ar_fit(const std::vector<std::vector<double>>& series, int p, int d);
std::vector<double> ar_predict(const ARModel& model,
                               const std::vector<double>& history,
                               std::size_t horizon);

}  // namespace parkcast
