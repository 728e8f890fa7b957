#include "cdca/engine.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "cdca/metrics.hpp"
#include "cdca/scenario.hpp"
#include "doctest.h"

using namespace cdca;

namespace {

constexpr LaneId kF1{Direction::forward, 1};

ScenarioConfig quiet_config() {
  ScenarioConfig cfg;
  cfg.main_inflow = 0.0;
  cfg.ramp_inflow = 0.0;
  cfg.warmup = 0.0;
  return cfg;
}

ScenarioConfig busy_config(std::uint64_t seed, double duration = 60.0) {
  ScenarioConfig cfg;
  cfg.seed = seed;
  cfg.duration = duration;
  cfg.warmup = 0.0;
  AccidentEvent ev;
  ev.time = 10.0;
  ev.lane = kF1;
  ev.position = 5000.0;
  cfg.accidents.push_back(ev);
  return cfg;
}

const Vehicle& by_id(const World& world, VehicleId id) {
  const Vehicle* v = world.find_vehicle(id);
  REQUIRE(v != nullptr);
  return *v;
}

}  // namespace

TEST_CASE("equal seeds give byte-identical outputs; seeds matter") {
  const RunResult a = run(busy_config(11));
  const RunResult b = run(busy_config(11));
  CHECK(metrics_to_csv(a.series) == metrics_to_csv(b.series));
  CHECK(events_to_csv(a.log) == events_to_csv(b.log));
  CHECK(a.config_echo == b.config_echo);

  const RunResult c = run(busy_config(12));
  CHECK(metrics_to_csv(a.series) != metrics_to_csv(c.series));
}

TEST_CASE("metric rows are stamped at the end of each tick") {
  World world(quiet_config());
  world.step();
  world.step();
  world.step();
  const MetricsSeries& m = world.metrics();
  REQUIRE(m.size() == 3);
  CHECK(m[0].time == 0.5);
  CHECK(m[1].time == 1.0);
  CHECK(m[2].time == 1.5);
  CHECK(m[2].active_vehicles == 0);
}

TEST_CASE("a warning reaches neighbours exactly one tick after emission") {
  ScenarioConfig cfg = quiet_config();
  AccidentEvent ev;
  ev.time = 0.5;
  ev.lane = kF1;
  ev.position = 5000.0;
  cfg.accidents.push_back(ev);

  World world(cfg);
  const VehicleId victim = world.add_vehicle(kF1, 5000.0, 0.0);
  const VehicleId witness = world.add_vehicle(kF1, 4500.0, 20.0);

  world.step();  // tick 0: accident fires, first broadcast is emitted
  CHECK(by_id(world, victim).status == VehicleStatus::blocked);
  CHECK(by_id(world, witness).status == VehicleStatus::active);
  CHECK(world.messages_total() == 1);

  world.step();  // tick 1: delivered, acted on, and the lane change made
  CHECK(by_id(world, witness).lane == LaneId::main(Direction::forward, 2));
  CHECK(world.diversions_total() == 1);

  double broadcast_time = -1.0;
  double receive_time = -1.0;
  for (const EventLogEntry& e : world.events()) {
    if (e.kind == EventKind::broadcast && broadcast_time < 0)
      broadcast_time = e.time;
    if (e.kind == EventKind::receive && receive_time < 0) receive_time = e.time;
  }
  CHECK(broadcast_time == 0.5);
  CHECK(receive_time == 1.0);
}

TEST_CASE("silence without a protocol: no messages when disabled") {
  ScenarioConfig cfg = busy_config(3, 30.0);
  cfg.cdca_enabled = false;
  const RunResult r = run(cfg);
  CHECK(r.messages_total == 0);
  CHECK(r.diversions_total == 0);
  for (const EventLogEntry& e : r.log) {
    CHECK(e.kind != EventKind::broadcast);
    CHECK(e.kind != EventKind::receive);
    CHECK(e.kind != EventKind::diversion);
  }
}

TEST_CASE("spawning respects the population target") {
  ScenarioConfig cfg;
  cfg.vehicle_target = 5;
  cfg.main_inflow = 5.0;  // far above what the cap admits
  cfg.warmup = 0.0;
  World world(cfg);
  for (int i = 0; i < 200; ++i) world.step();
  for (const MetricsRecord& r : world.metrics()) {
    CHECK(r.active_vehicles <= 5);
  }
  CHECK(world.metrics().back().active_vehicles == 5);
}

TEST_CASE("vehicle ids are never reused") {
  World world(busy_config(7));
  std::set<std::string> seen;
  for (int i = 0; i < 400; ++i) world.step();
  int spawns = 0;
  for (const EventLogEntry& e : world.events()) {
    if (e.kind != EventKind::spawn) continue;
    ++spawns;
    CHECK(seen.insert(e.subject).second);  // each id announced once
  }
  CHECK(spawns > 50);
}

TEST_CASE("add_vehicle validates the lane") {
  World world(quiet_config());
  CHECK_THROWS_AS(world.add_vehicle(LaneId{Direction::forward, 9}, 100.0, 10.0),
                  InvalidGeometryError);
}

TEST_CASE("accidents pin the victim and clear after the set duration") {
  ScenarioConfig cfg = quiet_config();
  cfg.incident_duration = 5.0;
  AccidentEvent ev;
  ev.time = 0.5;
  ev.lane = kF1;
  ev.position = 5000.0;
  cfg.accidents.push_back(ev);

  World world(cfg);
  const VehicleId victim = world.add_vehicle(kF1, 5000.0, 25.0);
  world.step();
  CHECK(by_id(world, victim).status == VehicleStatus::blocked);
  CHECK(by_id(world, victim).speed == 0.0);
  REQUIRE(world.incidents().size() == 1);
  CHECK_FALSE(world.incidents()[0].cleared);

  for (int i = 0; i < 12; ++i) world.step();
  CHECK(world.incidents()[0].cleared);
  CHECK(by_id(world, victim).status == VehicleStatus::active);
  // Freed again: the vehicle accelerates away.
  for (int i = 0; i < 20; ++i) world.step();
  CHECK(by_id(world, victim).speed > 1.0);
}

TEST_CASE("an accident with no vehicle nearby stalls a fresh one") {
  ScenarioConfig cfg = quiet_config();
  AccidentEvent ev;
  ev.time = 0.5;
  ev.lane = kF1;
  ev.position = 5000.0;
  cfg.accidents.push_back(ev);

  World world(cfg);  // empty road
  world.step();
  REQUIRE(world.incidents().size() == 1);
  const Vehicle& victim = by_id(world, world.incidents()[0].blocked_vehicle);
  CHECK(victim.status == VehicleStatus::blocked);
  CHECK(victim.lane == kF1);
  CHECK(victim.position == 5000.0);
}

TEST_CASE("no overlap survives 10000 randomized ticks") {
  // Five stressed worlds, 2000 ticks each: heavy inflow, early accidents,
  // protocol on; the engine's own invariant check throws on any overlap,
  // and an independent scan double-checks every tick.
  for (std::uint64_t seed : {101u, 202u, 303u, 404u, 505u}) {
    ScenarioConfig cfg;
    cfg.seed = seed;
    cfg.main_inflow = 1.2;
    cfg.ramp_inflow = 0.1;
    cfg.backward_inflow = 0.3;
    cfg.vehicle_target = 400;
    cfg.warmup = 0.0;
    cfg.duration = 1000.0;
    AccidentEvent ev;
    ev.time = 30.0;
    ev.lane = LaneId::main(Direction::forward, (seed % 3) + 1);
    ev.position = 3000.0 + 1000.0 * static_cast<double>(seed % 5);
    cfg.accidents.push_back(ev);
    cfg.incident_duration = seed % 2 == 0 ? 200.0 : 0.0;

    World world(cfg);
    for (int t = 0; t < 2000; ++t) {
      world.step();
      std::map<LaneId, std::vector<const Vehicle*>> lanes;
      for (const Vehicle& v : world.vehicles()) lanes[v.lane].push_back(&v);
      for (auto& [lane, list] : lanes) {
        std::sort(list.begin(), list.end(),
                  [](const Vehicle* a, const Vehicle* b) {
                    return a->position < b->position;
                  });
        for (std::size_t i = 1; i < list.size(); ++i) {
          REQUIRE(list[i]->rear() >= list[i - 1]->position - 1e-9);
        }
      }
    }
  }
}

TEST_CASE("prefill seeds the mains with non-overlapping free-flow traffic") {
  ScenarioConfig cfg;  // defaults: prefill on, main_inflow 0.9
  cfg.warmup = 0.0;
  World world(cfg);

  const auto& vehicles = world.vehicles();
  CHECK(vehicles.size() > 300);
  CHECK(static_cast<int>(vehicles.size()) <= cfg.vehicle_target);

  std::map<LaneId, std::vector<const Vehicle*>> lanes;
  for (const Vehicle& v : vehicles) {
    CHECK(!v.lane.is_ramp());
    CHECK(v.speed > 0.0);
    lanes[v.lane].push_back(&v);
  }
  CHECK(lanes.size() == 3);  // forward mains only under the defaults
  for (auto& [lane, list] : lanes) {
    std::sort(list.begin(), list.end(), [](const Vehicle* a, const Vehicle* b) {
      return a->position < b->position;
    });
    for (std::size_t i = 1; i < list.size(); ++i) {
      CHECK(list[i]->rear() - list[i - 1]->position >= cfg.min_gap);
    }
  }

  ScenarioConfig off = cfg;
  off.prefill = false;
  CHECK(World(off).vehicles().empty());

  ScenarioConfig capped = cfg;
  capped.vehicle_target = 5;
  CHECK(World(capped).vehicles().size() == 5);
}

TEST_CASE("an unwarned driver queues behind a stopped lane instead of dodging") {
  ScenarioConfig cfg = quiet_config();
  cfg.cdca_enabled = false;
  AccidentEvent ev;
  ev.time = 0.5;
  ev.lane = kF1;
  ev.position = 5000.0;
  cfg.accidents.push_back(ev);

  World world(cfg);
  world.add_vehicle(kF1, 5000.0, 0.0);  // becomes the accident victim
  const VehicleId witness = world.add_vehicle(kF1, 4700.0, 22.2);

  for (int i = 0; i < 60; ++i) {
    world.step();
    CHECK(by_id(world, witness).lane == kF1);  // never swerves out blind
  }
  const Vehicle& w = by_id(world, witness);
  CHECK(w.speed == 0.0);  // queued at a full stop behind the victim
  CHECK(w.position > 4980.0);
  CHECK(w.position < 4995.0);
  CHECK(world.diversions_total() == 0);
}
