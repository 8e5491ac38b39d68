#include "parkcast/preprocess.hpp"

#include <algorithm>
#include <cmath>

#include <unsupported/Eigen/FFT>

#include "parkcast/errors.hpp"
#include "parkcast/rng.hpp"

namespace parkcast {

AvailabilitySeries build_occupancy_series(const std::vector<ParkingRecord>& records,
                                          const std::string& lot_id,
                                          const TimeGrid& grid) {
  AvailabilitySeries out;
  out.lot_id = lot_id;
  out.grid = grid;
  if (records.empty()) {
    out.capacity = 1;
    out.values.assign(grid.length, 1.0);
    out.empty_lot_warning = true;
    return out;
  }
  out.capacity = records.front().capacity;
  for (const auto& r : records) {
    if (r.lot_id != lot_id)
      throw DataError("record for lot '" + r.lot_id +
                      "' passed to series builder for '" + lot_id + "'");
  }

  // Difference counting over grid indices. A stay [a, d) covers instant i
  // when a <= t_i and t_i < d; timestamps are integer seconds so the index
  // ranges are exact.
  const std::int64_t n = static_cast<std::int64_t>(grid.length);
  std::vector<std::int64_t> diff(grid.length + 1, 0);
  for (const auto& r : records) {
    std::int64_t first = (r.arrival - grid.start + grid.step - 1) / grid.step;
    if (r.arrival <= grid.start) first = 0;  // guard negative division
    std::int64_t last = (r.departure - 1 - grid.start) / grid.step;  // t_i < departure
    if (r.departure <= grid.start) continue;
    first = std::max<std::int64_t>(first, 0);
    last = std::min<std::int64_t>(last, n - 1);
    if (first > last) continue;
    diff[first] += 1;
    diff[last + 1] -= 1;
  }
  out.values.resize(grid.length);
  std::int64_t occupied = 0;
  const double cap = static_cast<double>(out.capacity);
  for (std::size_t i = 0; i < grid.length; ++i) {
    occupied += diff[i];
    double v = (cap - static_cast<double>(occupied)) / cap;
    out.values[i] = std::clamp(v, 0.0, 1.0);
  }
  return out;
}

std::vector<double> lowpass_filter_values(const std::vector<double>& values,
                                          std::int64_t step_seconds,
                                          std::int64_t cutoff_seconds) {
  const std::size_t n = values.size();
  if (n < 2) throw DataError("series too short for Fourier filtering");
  if (cutoff_seconds <= 2 * step_seconds) return values;  // nothing above Nyquist

  std::vector<std::complex<double>> time_domain(n), freq(n);
  for (std::size_t i = 0; i < n; ++i) time_domain[i] = values[i];
  Eigen::FFT<double> fft;
  fft.fwd(freq, time_domain);

  // Bin k (and its mirror n-k) has period n*step/k; zero everything with a
  // period strictly below the cutoff. DC is always kept.
  const double span = static_cast<double>(n) * static_cast<double>(step_seconds);
  for (std::size_t k = 1; k <= n / 2; ++k) {
    const double period = span / static_cast<double>(k);
    if (period < static_cast<double>(cutoff_seconds)) {
      freq[k] = 0.0;
      freq[n - k] = 0.0;  // k == n/2 for even n maps onto itself
    }
  }

  std::vector<std::complex<double>> filtered(n);
  fft.inv(filtered, freq);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = filtered[i].real();
  return out;
}

AvailabilitySeries fourier_denoise(const AvailabilitySeries& series,
                                   std::int64_t cutoff_seconds) {
  AvailabilitySeries out = series;
  out.values = lowpass_filter_values(series.values, series.grid.step, cutoff_seconds);
  for (double& v : out.values) v = std::clamp(v, 0.0, 1.0);
  return out;
}

std::size_t window_count(std::size_t frame_len, std::size_t window,
                         std::size_t horizon, std::size_t stride) {
  if (frame_len < window + horizon) return 0;
  return (frame_len - window - horizon) / stride + 1;
}

namespace {

std::vector<std::size_t> selected_channels(const FeatureFrame& frame,
                                           FeatureSetting setting) {
  // Frame channel space: [lot 0 .. lot m-1, demand 0..3]; the target lot is
  // channel 0 by the frame's ordering contract.
  const std::size_t m = frame.lot_count();
  std::vector<std::size_t> sel;
  switch (setting) {
    case FeatureSetting::kAll:
      for (std::size_t i = 0; i < m + kNumModes; ++i) sel.push_back(i);
      break;
    case FeatureSetting::kTargetPlusDemand:
      sel.push_back(0);
      for (int d = 0; d < kNumModes; ++d) sel.push_back(m + d);
      break;
    case FeatureSetting::kLotsOnly:
      for (std::size_t i = 0; i < m; ++i) sel.push_back(i);
      break;
    case FeatureSetting::kTargetOnly:
      sel.push_back(0);
      break;
  }
  return sel;
}

}  // namespace

std::vector<WindowSample> make_windows(const FeatureFrame& frame,
                                       const std::string& target_lot,
                                       std::size_t window, std::size_t horizon,
                                       std::size_t stride,
                                       FeatureSetting setting) {
  if (stride == 0) throw ConfigError("window stride must be positive");
  if (frame.lot_order.empty() || frame.lot_order.front() != target_lot)
    throw DataError("frame is not assembled for target lot '" + target_lot + "'");

  std::vector<WindowSample> samples;
  const std::size_t count = window_count(frame.length(), window, horizon, stride);
  if (count == 0) return samples;  // frame too short; caller may warn

  const auto sel = selected_channels(frame, setting);
  const std::size_t m = frame.lot_count();
  samples.reserve(count);
  for (std::size_t s = 0; s < count; ++s) {
    const std::size_t o = s * stride;
    WindowSample w;
    w.window = window;
    w.channels = sel.size();
    w.target_lot = target_lot;
    w.zone_id = frame.zone_id;
    w.setting = setting;
    w.input.resize(window * sel.size());
    w.input_timestamps.resize(window);
    for (std::size_t i = 0; i < window; ++i) {
      w.input_timestamps[i] = frame.grid.instant(o + i);
      for (std::size_t c = 0; c < sel.size(); ++c) {
        const std::size_t ch = sel[c];
        const double v = ch < m ? frame.lot_channels[ch][o + i]
                                : frame.demand_channels[ch - m][o + i];
        w.input[i * sel.size() + c] = v;
      }
    }
    w.target.resize(horizon);
    for (std::size_t h = 0; h < horizon; ++h)
      w.target[h] = frame.lot_channels[0][o + window + h];
    samples.push_back(std::move(w));
  }
  return samples;
}

SplitPlan split_by_zone(const std::vector<std::string>& zone_ids,
                        double fraction, std::uint64_t seed) {
  if (zone_ids.size() < 2)
    throw DataError("zone split needs at least 2 zones, got " +
                    std::to_string(zone_ids.size()));
  if (!(fraction > 0.0 && fraction < 1.0))
    throw ConfigError("train fraction must be in (0, 1)");

  std::vector<std::string> order = zone_ids;
  std::sort(order.begin(), order.end());  // input order must not matter
  Rng rng(seed);
  rng.shuffle(order);

  const std::size_t n_train = static_cast<std::size_t>(
      std::ceil(fraction * static_cast<double>(order.size())));
  SplitPlan plan;
  plan.train_fraction = fraction;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (i < n_train)
      plan.train_zones.insert(order[i]);
    else
      plan.test_zones.insert(order[i]);
  }
  return plan;
}

}  // namespace parkcast
