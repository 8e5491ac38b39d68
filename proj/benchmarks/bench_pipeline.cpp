#include <benchmark/benchmark.h>

#include "parkcast/cluster.hpp"
#include "parkcast/pcz.hpp"
#include "parkcast/preprocess.hpp"
#include "parkcast/rng.hpp"
#include "parkcast/synth.hpp"

using namespace parkcast;

namespace {

void BM_occupancy_series(benchmark::State& state) {
  Rng rng(1);
  const Timestamp t0 = 1630454400;
  TimeGrid grid{t0, 600, 4320};
  std::vector<ParkingRecord> records;
  for (int i = 0; i < state.range(0); ++i) {
    ParkingRecord r;
    r.lot_id = "L";
    r.arrival = t0 + static_cast<Timestamp>(rng.uniform(0.0, 29.0 * kSecondsPerDay));
    r.departure = r.arrival + 300 + static_cast<Timestamp>(rng.uniform(0.0, 20000.0));
    r.capacity = 500;
    records.push_back(r);
  }
  for (auto _ : state) {
    auto s = build_occupancy_series(records, "L", grid);
    benchmark::DoNotOptimize(s.values.data());
  }
}
BENCHMARK(BM_occupancy_series)->Arg(10000)->Arg(100000);

void BM_fourier_denoise(benchmark::State& state) {
  Rng rng(2);
  AvailabilitySeries s;
  s.grid = {1630454400, 600, static_cast<std::size_t>(state.range(0))};
  s.capacity = 100;
  for (std::size_t i = 0; i < s.grid.length; ++i)
    s.values.push_back(rng.uniform(0.0, 1.0));
  for (auto _ : state) {
    auto out = fourier_denoise(s, 3600);
    benchmark::DoNotOptimize(out.values.data());
  }
}
BENCHMARK(BM_fourier_denoise)->Arg(4032)->Arg(8064);

void BM_kmeans(benchmark::State& state) {
  Rng rng(3);
  std::vector<std::vector<double>> pts;
  for (int i = 0; i < state.range(0); ++i)
    pts.push_back({rng.uniform(0, 1000), rng.uniform(0, 1000), rng.uniform(0, 10),
                   rng.uniform(0, 10), rng.uniform(0, 100)});
  for (auto _ : state) {
    auto res = kmeans(pts, 24, 7);
    benchmark::DoNotOptimize(res.inertia);
  }
}
BENCHMARK(BM_kmeans)->Arg(127)->Arg(1000);

void BM_fuse_demand(benchmark::State& state) {
  Rng rng(4);
  std::vector<LotFeature> lots;
  for (int i = 0; i < 5; ++i)
    lots.push_back({"L" + std::to_string(i), rng.uniform(0, 3000),
                    rng.uniform(0, 3000), 1, 1, 10});
  auto zone = build_pcz(lots, 500.0, 1.0, "z");
  TimeGrid grid{1630454400, 600, 4320};
  std::vector<TripRecord> trips;
  for (int i = 0; i < state.range(0); ++i) {
    TripRecord t;
    t.mode = static_cast<Mode>(rng.uniform_index(4));
    t.origin = {rng.uniform(0, 3000), rng.uniform(0, 3000)};
    t.depart_time = grid.start + static_cast<Timestamp>(
                                     rng.uniform(0.0, 29.0 * kSecondsPerDay));
    if (t.mode != Mode::kBus) {
      t.destination = Point{rng.uniform(0, 3000), rng.uniform(0, 3000)};
      t.arrive_time = t.depart_time + 900;
    }
    trips.push_back(t);
  }
  for (auto _ : state) {
    auto d = fuse_demand(trips, zone, grid);
    benchmark::DoNotOptimize(d.channels[0].data());
  }
}
BENCHMARK(BM_fuse_demand)->Arg(100000);

void BM_synth_generate(benchmark::State& state) {
  SynthConfig cfg;
  cfg.n_lots = static_cast<int>(state.range(0));
  cfg.n_clusters = cfg.n_lots / 5;
  cfg.n_days = 10;
  for (auto _ : state) {
    auto data = generate(cfg);
    benchmark::DoNotOptimize(data.parking.size());
  }
}
BENCHMARK(BM_synth_generate)->Arg(10)->Arg(40);

}  // namespace
