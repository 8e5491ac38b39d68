#include <doctest.h>

#include <cmath>

#include "parkcast/errors.hpp"
#include "parkcast/preprocess.hpp"
#include "parkcast/rng.hpp"
#include "support/oracles.hpp"

using namespace parkcast;

namespace {

ParkingRecord stay(const std::string& lot, Timestamp a, Timestamp d, int cap) {
  ParkingRecord r;
  r.lot_id = lot;
  r.arrival = a;
  r.departure = d;
  r.date = (a / kSecondsPerDay) * kSecondsPerDay;
  r.capacity = cap;
  return r;
}

TimeGrid day_grid(Timestamp start, std::size_t length, std::int64_t step = 600) {
  return TimeGrid{start, step, length};
}

}  // namespace

TEST_CASE("occupancy: single stay and empty instants") {
  const Timestamp t0 = *parse_timestamp("2021-09-01T00:00");
  TimeGrid grid = day_grid(t0, 144);
  std::vector<ParkingRecord> records = {
      stay("L1", *parse_timestamp("2021-09-01T08:00"),
           *parse_timestamp("2021-09-01T09:30"), 10)};
  auto series = build_occupancy_series(records, "L1", grid);
  REQUIRE(series.values.size() == 144);
  // 08:30 is bin 51 (8.5 h * 6 bins/h).
  CHECK(series.values[51] == doctest::Approx(0.9));
  // 07:00 has nobody parked.
  CHECK(series.values[42] == 1.0);
  // Half-open convention: the vehicle is counted at 08:00 but not at 09:30.
  CHECK(series.values[48] == doctest::Approx(0.9));
  CHECK(series.values[57] == 1.0);
  CHECK(!series.empty_lot_warning);
}

TEST_CASE("occupancy: empty record set reads as an empty lot with a warning") {
  TimeGrid grid = day_grid(*parse_date("2021-09-01"), 12);
  auto series = build_occupancy_series({}, "L7", grid);
  CHECK(series.empty_lot_warning);
  for (double v : series.values) CHECK(v == 1.0);
}

TEST_CASE("occupancy matches the brute-force interval count on random stays") {
  const Timestamp t0 = *parse_date("2021-09-01");
  TimeGrid grid = day_grid(t0, 3 * 144);
  Rng rng(99);
  std::vector<ParkingRecord> records;
  const int capacity = 600;  // large enough that clamping never bites
  for (int i = 0; i < 500; ++i) {
    const Timestamp a =
        t0 + static_cast<Timestamp>(rng.uniform(0.0, 2.8 * kSecondsPerDay));
    const Timestamp d = a + 60 + static_cast<Timestamp>(rng.uniform(0.0, 14000.0));
    records.push_back(stay("L1", a, d, capacity));
  }
  auto series = build_occupancy_series(records, "L1", grid);
  Rng pick(100);
  for (int probe = 0; probe < 20; ++probe) {
    const std::size_t i = static_cast<std::size_t>(pick.uniform_index(grid.length));
    const int expected = oracle::occupancy_at(records, grid.instant(i));
    CHECK(series.values[i] ==
          doctest::Approx((capacity - expected) / static_cast<double>(capacity)));
  }
}

TEST_CASE("fourier: cutoff at Nyquist is the identity") {
  TimeGrid grid = day_grid(*parse_date("2021-09-01"), 288);
  AvailabilitySeries s;
  s.lot_id = "L1";
  s.grid = grid;
  s.capacity = 10;
  Rng rng(5);
  for (std::size_t i = 0; i < grid.length; ++i)
    s.values.push_back(rng.uniform(0.2, 0.8));
  auto out = fourier_denoise(s, 2 * grid.step);
  REQUIRE(out.values.size() == s.values.size());
  for (std::size_t i = 0; i < s.values.size(); ++i)
    CHECK(out.values[i] == doctest::Approx(s.values[i]).epsilon(1e-9));
}

TEST_CASE("fourier: a 24h sinusoid survives a 1h cutoff unchanged") {
  TimeGrid grid = day_grid(*parse_date("2021-09-01"), 4 * 144);
  AvailabilitySeries s;
  s.grid = grid;
  s.capacity = 10;
  for (std::size_t i = 0; i < grid.length; ++i) {
    const double t = static_cast<double>(i) / 144.0;  // days
    s.values.push_back(0.5 + 0.2 * std::sin(2.0 * M_PI * t));
  }
  auto out = fourier_denoise(s, 3600);
  for (std::size_t i = 0; i < s.values.size(); ++i)
    CHECK(std::abs(out.values[i] - s.values[i]) < 1e-9);
}

TEST_CASE("fourier: two-tone input keeps only the 24h component") {
  TimeGrid grid = day_grid(*parse_date("2021-09-01"), 4 * 144);
  AvailabilitySeries s;
  s.grid = grid;
  s.capacity = 10;
  std::vector<double> clean;
  for (std::size_t i = 0; i < grid.length; ++i) {
    const double days = static_cast<double>(i) / 144.0;
    const double minutes = static_cast<double>(i) * 10.0;
    const double slow = 0.5 + 0.2 * std::sin(2.0 * M_PI * days);
    const double jitter = 0.05 * std::sin(2.0 * M_PI * minutes / 20.0);
    clean.push_back(slow);
    s.values.push_back(slow + jitter);
  }
  auto out = fourier_denoise(s, 3600);
  for (std::size_t i = 0; i < clean.size(); ++i)
    CHECK(std::abs(out.values[i] - clean[i]) < 1e-6);
}

TEST_CASE("fourier core agrees with the direct DFT reference") {
  Rng rng(17);
  std::vector<double> x;
  for (int i = 0; i < 300; ++i) x.push_back(rng.uniform(-1.0, 1.0));
  auto fast = lowpass_filter_values(x, 600, 7200);
  auto slow = oracle::lowpass_reference(x, 600, 7200);
  REQUIRE(fast.size() == slow.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    CHECK(fast[i] == doctest::Approx(slow[i]).epsilon(1e-9));
}

TEST_CASE("fourier filtering never increases spectral energy") {
  Rng rng(23);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<double> x;
    const int n = 200 + trial * 37;
    for (int i = 0; i < n; ++i) x.push_back(rng.uniform(0.0, 1.0));
    auto y = lowpass_filter_values(x, 600, 3600 * (trial + 1));
    double ex = 0.0, ey = 0.0;
    for (double v : x) ex += v * v;
    for (double v : y) ey += v * v;
    CHECK(ey <= ex * (1.0 + 1e-12) + 1e-12);
  }
}

namespace {

FeatureFrame tiny_frame(std::size_t length, std::size_t lots) {
  FeatureFrame f;
  f.zone_id = "zone_00";
  f.grid = day_grid(*parse_date("2021-09-01"), length);
  for (std::size_t l = 0; l < lots; ++l) {
    f.lot_order.push_back("L" + std::to_string(l));
    std::vector<double> ch(length);
    for (std::size_t i = 0; i < length; ++i)
      ch[i] = 0.1 * static_cast<double>(l) +
              0.001 * static_cast<double>(i % 100);
    f.lot_channels.push_back(std::move(ch));
  }
  for (int m = 0; m < kNumModes; ++m)
    f.demand_channels[m].assign(length, 0.25 * (m + 1));
  return f;
}

}  // namespace

TEST_CASE("window count formula and channel selection per setting") {
  FeatureFrame f = tiny_frame(4032, 3);

  auto s1 = make_windows(f, "L0", 432, 144, 1, FeatureSetting::kAll);
  CHECK(s1.size() == 3457);  // 4032 - 432 - 144 + 1
  CHECK(s1.front().channels == 3 + 4);

  auto s4 = make_windows(f, "L0", 432, 144, 1, FeatureSetting::kTargetOnly);
  CHECK(s4.front().channels == 1);

  auto s2 = make_windows(f, "L0", 432, 144, 4032, FeatureSetting::kTargetPlusDemand);
  CHECK(s2.size() == 1);  // stride = frame length -> at most one sample
  CHECK(s2.front().channels == 1 + 4);

  auto s3 = make_windows(f, "L0", 432, 144, 7, FeatureSetting::kLotsOnly);
  CHECK(s3.size() == window_count(4032, 432, 144, 7));
  CHECK(s3.front().channels == 3);

  // Too short a frame yields nothing.
  FeatureFrame small = tiny_frame(100, 2);
  CHECK(make_windows(small, "L0", 90, 20, 1, FeatureSetting::kAll).empty());
}

TEST_CASE("window count formula holds across random shapes") {
  Rng rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t len = 1 + rng.uniform_index(500);
    const std::size_t L = 1 + rng.uniform_index(80);
    const std::size_t H = 1 + rng.uniform_index(40);
    const std::size_t stride = 1 + rng.uniform_index(60);
    std::size_t expected = 0;
    for (std::size_t o = 0; o + L + H <= len; o += stride) ++expected;
    CHECK(window_count(len, L, H, stride) == expected);
  }
}

TEST_CASE("windows carry aligned targets and timestamps") {
  FeatureFrame f = tiny_frame(300, 2);
  auto samples = make_windows(f, "L0", 48, 12, 30, FeatureSetting::kTargetOnly);
  REQUIRE(!samples.empty());
  const auto& s = samples[1];  // offset 30
  CHECK(s.input_timestamps.front() == f.grid.instant(30));
  CHECK(s.input_timestamps.back() == f.grid.instant(30 + 47));
  CHECK(s.target.front() == f.lot_channels[0][30 + 48]);
  CHECK(s.target.back() == f.lot_channels[0][30 + 48 + 11]);
  CHECK(s.at(0, 0) == f.lot_channels[0][30]);
}

TEST_CASE("zone split: sizes, determinism, partition") {
  std::vector<std::string> zones;
  for (int i = 0; i < 24; ++i) zones.push_back("zone_" + std::to_string(i));

  SplitPlan plan = split_by_zone(zones, 0.75, 11);
  CHECK(plan.train_zones.size() == 18);
  CHECK(plan.test_zones.size() == 6);

  SplitPlan again = split_by_zone(zones, 0.75, 11);
  CHECK(plan.train_zones == again.train_zones);
  CHECK(plan.test_zones == again.test_zones);

  SplitPlan other = split_by_zone(zones, 0.75, 12);
  CHECK(plan.train_zones != other.train_zones);  // overwhelmingly likely

  // Partition property.
  std::set<std::string> all;
  for (const auto& z : plan.train_zones) {
    CHECK(!plan.test_zones.count(z));
    all.insert(z);
  }
  for (const auto& z : plan.test_zones) all.insert(z);
  CHECK(all.size() == zones.size());

  SplitPlan half = split_by_zone({"a", "b"}, 0.5, 3);
  CHECK(half.train_zones.size() == 1);
  CHECK(half.test_zones.size() == 1);

  CHECK_THROWS_AS(split_by_zone({"only"}, 0.5, 1), DataError);
  CHECK_THROWS_AS(split_by_zone(zones, 1.5, 1), ConfigError);
}
