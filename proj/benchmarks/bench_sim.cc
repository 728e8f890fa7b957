#include <benchmark/benchmark.h>

#include <vector>

#include "cdca/comms.hpp"
#include "cdca/dynamics.hpp"
#include "cdca/engine.hpp"
#include "cdca/gap.hpp"
#include "cdca/scenario.hpp"
#include "cdca/vehicle.hpp"

namespace {

using namespace cdca;

std::vector<Vehicle> packed_world(int count) {
  Rng rng(9);
  std::vector<Vehicle> world;
  world.reserve(count);
  for (int i = 0; i < count; ++i) {
    Vehicle v;
    v.id = i + 1;
    v.lane = LaneId::main(Direction::forward,
                          static_cast<int>(rng.next_u64() % 3) + 1);
    v.position = rng.next_unit() * 10000.0;
    v.speed = rng.next_unit() * 30.0;
    world.push_back(v);
  }
  return world;
}

void BM_FollowingAccel(benchmark::State& state) {
  const DrivingParams params;
  double speed = 0.0;
  for (auto _ : state) {
    speed += 0.001;
    if (speed > 30.0) speed = 0.0;
    benchmark::DoNotOptimize(
        following_accel(speed, 35.0, speed - 20.0, params));
  }
}
BENCHMARK(BM_FollowingAccel);

void BM_GapView(benchmark::State& state) {
  const std::vector<Vehicle> world = packed_world(
      static_cast<int>(state.range(0)));
  const LaneId lane = LaneId::main(Direction::forward, 2);
  VehicleId id = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(gap_view(id, lane, world));
    id = id % world.size() + 1;
  }
}
BENCHMARK(BM_GapView)->Arg(50)->Arg(200)->Arg(500);

void BM_Deliver(benchmark::State& state) {
  const std::vector<Vehicle> world = packed_world(
      static_cast<int>(state.range(0)));
  std::vector<Rsu> rsus = {{1, 2500.0, 1500.0}, {2, 5000.0, 1500.0},
                           {3, 7500.0, 1500.0}};
  std::vector<Transmission> txs;
  for (int i = 0; i < 20; ++i) {
    WarningMessage m;
    m.message_id = i % 5 + 1;
    m.blocked_lane = LaneId::main(Direction::forward, 1);
    m.incident_position = 5000.0;
    const Vehicle& src = world[static_cast<std::size_t>(i * 7) % world.size()];
    txs.push_back(Transmission{m, TxSource::from_vehicle(src.id),
                               src.position, 0});
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(deliver(txs, world, rsus, 1000.0, 10000.0));
  }
}
BENCHMARK(BM_Deliver)->Arg(100)->Arg(300);

void BM_WorldStep(benchmark::State& state) {
  ScenarioConfig cfg;
  cfg.warmup = 0.0;
  cfg.main_inflow = 1.0;
  AccidentEvent ev;
  ev.time = 60.0;
  ev.lane = LaneId::main(Direction::forward, 1);
  ev.position = 5000.0;
  cfg.accidents.push_back(ev);

  World world(cfg);
  for (int i = 0; i < 400; ++i) world.step();  // populate the road
  for (auto _ : state) {
    world.step();
    benchmark::DoNotOptimize(world.metrics().back());
  }
  state.counters["vehicles"] =
      static_cast<double>(world.vehicles().size());
}
BENCHMARK(BM_WorldStep)->Unit(benchmark::kMicrosecond);

void BM_ShortRun(benchmark::State& state) {
  ScenarioConfig cfg;
  cfg.duration = 30.0;
  cfg.warmup = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(run(cfg));
  }
  state.SetLabel("30 s simulated per iteration");
}
BENCHMARK(BM_ShortRun)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
