#pragma once

#include <complex>
#include <vector>

#include "parkcast/series.hpp"

namespace parkcast {

/// Availability of one lot sampled at every grid instant:
/// (capacity - vehicles present) / capacity, clamped to [0, 1].
/// A vehicle is present at instant t when arrival <= t < departure.
/// All records must belong to `lot_id`; with no records the lot reads as
/// empty (all 1.0) and the warning flag is set.
AvailabilitySeries build_occupancy_series(const std::vector<ParkingRecord>& records,
                                          const std::string& lot_id,
                                          const TimeGrid& grid);

/// Low-pass filter: transform, zero every frequency bin whose period is
/// shorter than cutoff_seconds, transform back, clamp to [0, 1].
/// A cutoff at or below the Nyquist period (2 * step) is an identity.
AvailabilitySeries fourier_denoise(const AvailabilitySeries& series,
                                   std::int64_t cutoff_seconds);

/// The unclamped filter core, exposed for spectral-energy checks.
std::vector<double> lowpass_filter_values(const std::vector<double>& values,
                                          std::int64_t step_seconds,
                                          std::int64_t cutoff_seconds);

/// Number of windows produced for a frame of `frame_len` steps.
std::size_t window_count(std::size_t frame_len, std::size_t window,
                         std::size_t horizon, std::size_t stride);

/// Cuts supervised samples at offsets 0, stride, 2*stride, ... The input
/// carries the channels selected by `setting`; the target is the target
/// lot's availability over the H steps after the window. A frame shorter
/// than L + H yields an empty sequence.
std::vector<WindowSample> make_windows(const FeatureFrame& frame,
                                       const std::string& target_lot,
                                       std::size_t window, std::size_t horizon,
                                       std::size_t stride,
                                       FeatureSetting setting);

/// Shuffles zones with a seeded RNG and assigns the first
/// ceil(fraction * n) to training. Deterministic for a fixed seed.
SplitPlan split_by_zone(const std::vector<std::string>& zone_ids,
                        double fraction, std::uint64_t seed);

}  // namespace parkcast
