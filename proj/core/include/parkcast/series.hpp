#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <set>
#include <string>
#include <vector>

#include "parkcast/records.hpp"
#include "parkcast/time.hpp"

namespace parkcast {

/// Fixed-interval sampling grid. Instant i is start + i * step.
struct TimeGrid {
  Timestamp start = 0;
  std::int64_t step = 600;  // seconds
  std::size_t length = 0;

  Timestamp instant(std::size_t i) const {
    return start + static_cast<std::int64_t>(i) * step;
  }
  Timestamp end() const { return instant(length); }
  bool aligned_with(const TimeGrid& other) const {
    return start == other.start && step == other.step && length == other.length;
  }
};

/// Normalized free-spot fraction of one lot on a fixed grid.
struct AvailabilitySeries {
  std::string lot_id;
  TimeGrid grid;
  int capacity = 0;
  std::vector<double> values;  // in [0, 1]
  bool empty_lot_warning = false;
};

/// Per-zone trip-endpoint counts per interval, one channel per mode
/// (metro, bus, ride_hailing, taxi).
struct DemandSeries {
  std::string zone_id;
  TimeGrid grid;
  std::array<std::vector<double>, kNumModes> channels;  // integer counts >= 0
};

/// Multichannel time grid for one zone and one target lot:
/// member-lot availabilities (target lot first) followed by the four
/// demand channels scaled to [0, 1].
struct FeatureFrame {
  std::string zone_id;
  TimeGrid grid;
  std::vector<std::string> lot_order;            // target first, rest by id
  std::vector<std::vector<double>> lot_channels; // one per lot, same order
  std::array<std::vector<double>, kNumModes> demand_channels;
  std::array<double, kNumModes> demand_scale = {1, 1, 1, 1};

  std::size_t length() const { return grid.length; }
  std::size_t lot_count() const { return lot_channels.size(); }
};

/// Which channels a training sample carries.
///   1: all zone lots + demand     2: target lot + demand
///   3: all zone lots              4: target lot only
enum class FeatureSetting : int { kAll = 1, kTargetPlusDemand = 2, kLotsOnly = 3, kTargetOnly = 4 };

FeatureSetting feature_setting_from_int(int v);

/// One supervised pair: L input steps over C channels and the target lot's
/// next H availability values.
struct WindowSample {
  std::vector<double> input;  // row-major [L x C]
  std::size_t window = 0;     // L
  std::size_t channels = 0;   // C
  std::vector<Timestamp> input_timestamps;  // length L
  std::vector<double> target;               // length H
  std::string target_lot;
  std::string zone_id;
  FeatureSetting setting = FeatureSetting::kAll;

  double at(std::size_t step, std::size_t channel) const {
    return input[step * channels + channel];
  }
};

/// Zone-wise train/test partition.
struct SplitPlan {
  std::set<std::string> train_zones;
  std::set<std::string> test_zones;
  double train_fraction = 0.0;
};

/// Columnar text format shared by series and frames: a timestamp column
/// followed by one column per channel.
void write_columns(std::ostream& out, const TimeGrid& grid,
                   const std::vector<std::string>& names,
                   const std::vector<const std::vector<double>*>& columns,
                   const std::string& comment = "");

void write_frame_csv(std::ostream& out, const FeatureFrame& frame,
                     const std::string& comment = "");
FeatureFrame read_frame_csv(std::istream& in);

}  // namespace parkcast
