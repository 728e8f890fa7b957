// Acceptance gate: one line per criterion, [PASS]/[FAIL], nonzero exit on
// any failure. Each criterion states its tolerance inline.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "cdca/comms.hpp"
#include "cdca/dynamics.hpp"
#include "cdca/engine.hpp"
#include "cdca/gap.hpp"
#include "cdca/metrics.hpp"
#include "cdca/protocol.hpp"
#include "cdca/scenario.hpp"
#include "cdca/units.hpp"

using namespace cdca;

namespace {

struct Check {
  bool ok = true;
  std::string note;

  void require(bool cond, const std::string& what) {
    if (cond) return;
    ok = false;
    if (!note.empty()) note += "; ";
    note += what;
  }
  void info(const std::string& what) {
    if (!note.empty()) note += "; ";
    note += what;
  }
};

constexpr LaneId kF1{Direction::forward, 1};
constexpr LaneId kF2{Direction::forward, 2};
constexpr LaneId kF3{Direction::forward, 3};

// The two-blocked-lanes scenario: defaults, accidents at t = 120 s in lanes
// 1 and 3 at s = 5000 m, 600 s at dt = 0.5 s.
ScenarioConfig blocked_lanes_config(bool cdca_on) {
  ScenarioConfig cfg;
  cfg.cdca_enabled = cdca_on;
  for (int lane : {1, 3}) {
    AccidentEvent ev;
    ev.time = 120.0;
    ev.lane = LaneId::main(Direction::forward, lane);
    ev.position = 5000.0;
    cfg.accidents.push_back(ev);
  }
  return cfg;
}

const MetricsRecord& record_at(const MetricsSeries& series, double time,
                               double dt) {
  const std::size_t idx =
      static_cast<std::size_t>(std::llround(time / dt)) - 1;
  return series.at(idx);
}

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

// --------------------------------------------------------------- criterion 1

Check criterion_detection(const RunResult*& out_baseline) {
  Check c;
  static RunResult r;  // reused by criterion 7
  const auto t0 = std::chrono::steady_clock::now();
  r = run(blocked_lanes_config(false));
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  out_baseline = &r;

  bool calm = true;
  bool middle_clear = true;
  for (const MetricsRecord& m : r.series) {
    if (m.time > 60.0 && m.time < 120.0 && m.congested_vehicles != 0)
      calm = false;
    if (m.per_lane_congested[1] != 0) middle_clear = false;
  }
  c.require(calm, "congested != 0 before the accidents (post warm-up)");
  c.require(middle_clear, "lane 2 shows congestion");

  int prev = record_at(r.series, 120.0, 0.5).congested_vehicles;
  bool growing = true;
  for (double t = 180.0; t <= 600.0; t += 60.0) {
    const int now = record_at(r.series, t, 0.5).congested_vehicles;
    if (now <= prev) growing = false;
    prev = now;
  }
  c.require(growing, "congested count not strictly increasing at 60 s marks");

  const int final_count = r.series.back().congested_vehicles;
  c.require(final_count >= 20, "congested at 600 s = " +
                                   std::to_string(final_count) + " (< 20)");
  c.require(wall < 10.0, "runtime " + fmt("%.2f", wall) + " s (>= 10 s)");
  c.info("congested(600s)=" + std::to_string(final_count) + ", runtime=" +
         fmt("%.2f", wall) + "s");
  return c;
}

// --------------------------------------------------------------- criterion 2

Check criterion_control(EventLog& out_events) {
  Check c;
  World world(blocked_lanes_config(true));
  std::map<VehicleId, int> zero_streak;
  int worst_streak = 0;

  for (int t = 0; t < 1200; ++t) {
    world.step();
    for (const Vehicle& v : world.vehicles()) {
      if (v.status == VehicleStatus::blocked) {
        zero_streak.erase(v.id);
        continue;
      }
      if (v.speed == 0.0) {
        const int s = ++zero_streak[v.id];
        if (s > worst_streak) worst_streak = s;
      } else {
        zero_streak.erase(v.id);
      }
    }
  }

  int blocked = 0;
  for (const Vehicle& v : world.vehicles()) {
    if (v.status == VehicleStatus::blocked) ++blocked;
  }
  const int congested = world.metrics().back().congested_vehicles;

  c.require(blocked == 2, "expected 2 blocked vehicles, got " +
                              std::to_string(blocked));
  c.require(congested == blocked,
            "congested(600s)=" + std::to_string(congested) + " != blocked=" +
                std::to_string(blocked) + " (tolerance: exact)");
  c.require(worst_streak <= 60, "a queued vehicle sat " +
                                    fmt("%.1f", worst_streak * 0.5) +
                                    " s at zero speed (> 30 s)");
  c.require(world.diversions_total() > 0, "no diversions happened");
  c.info("diversions=" + std::to_string(world.diversions_total()) +
         ", worst zero-speed streak=" + fmt("%.1f", worst_streak * 0.5) + "s");
  out_events = world.events();
  return c;
}

// --------------------------------------------------------------- criterion 3

Check criterion_cessation() {
  Check c;
  ScenarioConfig with = blocked_lanes_config(true);
  ScenarioConfig without = with;
  without.cessation_enabled = false;

  const RunResult r_with = run(with);
  const RunResult r_without = run(without);
  c.require(r_with.messages_total < r_without.messages_total,
            "cessation did not lower the message count (" +
                std::to_string(r_with.messages_total) + " vs " +
                std::to_string(r_without.messages_total) + ")");
  if (r_without.messages_total > 0) {
    const double ratio = static_cast<double>(r_with.messages_total) /
                         static_cast<double>(r_without.messages_total);
    c.info("messages " + std::to_string(r_with.messages_total) + " vs " +
           std::to_string(r_without.messages_total) + " (ratio " +
           fmt("%.3f", ratio) + ")");
  }
  return c;
}

// --------------------------------------------------------------- criterion 4

WarningMessage incident_message(MessageId id, LaneId lane, double position,
                                bool via_rsu = false) {
  WarningMessage m;
  m.message_id = id;
  m.origin_vehicle_id = 999;
  m.blocked_lane = lane;
  m.incident_position = position;
  m.relayed_by_rsu = via_rsu;
  return m;
}

Check criterion_protocol(const EventLog& control_events) {
  Check c;

  // (a) Only accident-blocked vehicles originate: every message id's first
  // broadcast comes from the vehicle named in that id's accident event.
  {
    std::map<MessageId, const EventLogEntry*> first_broadcast;
    std::map<MessageId, const EventLogEntry*> accident_event;
    for (const EventLogEntry& e : control_events) {
      if (!e.message_id) continue;
      if (e.kind == EventKind::broadcast && e.subject[0] == 'v' &&
          !first_broadcast.count(*e.message_id)) {
        first_broadcast[*e.message_id] = &e;
      }
      if (e.kind == EventKind::accident) accident_event[*e.message_id] = &e;
    }
    bool ok = !first_broadcast.empty();
    for (const auto& [id, bc] : first_broadcast) {
      const auto it = accident_event.find(id);
      if (it == accident_event.end() || it->second->subject != bc->subject ||
          it->second->time > bc->time) {
        ok = false;
      }
    }
    c.require(ok, "a message id was first broadcast by a non-blocked vehicle");
  }

  // (b) Ceased stations stay silent: no broadcast after a vehicle's
  // cessation event.
  {
    std::map<std::string, double> ceased_at;
    for (const EventLogEntry& e : control_events) {
      if (e.kind == EventKind::cessation && !ceased_at.count(e.subject))
        ceased_at[e.subject] = e.time;
    }
    bool silent = true;
    for (const EventLogEntry& e : control_events) {
      if (e.kind != EventKind::broadcast) continue;
      const auto it = ceased_at.find(e.subject);
      if (it != ceased_at.end() && e.time > it->second) silent = false;
    }
    c.require(!ceased_at.empty(), "no cessation ever happened");
    c.require(silent, "a ceased vehicle transmitted again");
  }

  ScenarioConfig cfg;
  const RoadNetwork network = build_network(cfg);

  // (c) Duplicate suppression at the receiver.
  {
    std::vector<Vehicle> world(1);
    world[0].id = 1;
    world[0].lane = kF1;
    world[0].position = 3000.0;
    ProtocolContext ctx{network, world, cfg, 0};
    const WarningMessage m = incident_message(5, kF1, 4000.0);
    const ReceiveDecision first = on_receive(world[0], m, ctx);
    const ReceiveDecision second = on_receive(world[0], m, ctx);
    c.require(first.action == ReceiveAction::divert &&
                  second.action == ReceiveAction::duplicate &&
                  !second.forward && !second.updated_msg,
              "duplicate copies are not suppressed");
  }

  // (d) Divert iff the receiver's lane matches and the incident lies ahead
  // within the lookahead window.
  {
    struct Case {
      LaneId lane;
      double pos;
      bool divert;
    };
    const Case cases[] = {
        {kF1, 3500.0, true},   // match, 500 m ahead
        {kF1, 2500.0, true},   // match, 1500 m ahead
        {kF1, 1500.0, false},  // match, 2500 m ahead: beyond lookahead
        {kF1, 4500.0, false},  // match, behind
        {kF2, 3500.0, false},  // other lane, in window
    };
    bool ok = true;
    MessageId next_id = 10;
    for (const Case& k : cases) {
      std::vector<Vehicle> world(1);
      world[0].id = 1;
      world[0].lane = k.lane;
      world[0].position = k.pos;
      ProtocolContext ctx{network, world, cfg, 0};
      const ReceiveDecision d =
          on_receive(world[0], incident_message(next_id++, kF1, 4000.0), ctx);
      if ((d.action == ReceiveAction::divert) != k.divert) ok = false;
    }
    c.require(ok, "divert decision deviates from lane-match + lookahead");
  }

  // (e) A tower relay reaches a vehicle 1800 m upstream of the incident:
  // outside the 1000 m V2V range, inside the 1500 m coverage of a tower at
  // 4000 m. Tolerance: informed within 5 ticks, through the RSU.
  {
    ScenarioConfig far_cfg;
    far_cfg.main_inflow = 0.0;
    far_cfg.ramp_inflow = 0.0;
    far_cfg.warmup = 0.0;
    far_cfg.rsus.push_back(RsuSpec{4000.0, 1500.0});
    AccidentEvent ev;
    ev.time = 0.5;
    ev.lane = kF1;
    ev.position = 5000.0;
    far_cfg.accidents.push_back(ev);

    World world(far_cfg);
    world.add_vehicle(kF1, 5000.0, 0.0);
    const VehicleId witness = world.add_vehicle(kF2, 3200.0, 0.0);

    bool via_rsu = false;
    int ticks = 0;
    for (; ticks < 5 && !via_rsu; ++ticks) {
      world.step();
      const Vehicle* w = world.find_vehicle(witness);
      for (const KnownIncident& k : w->protocol.known_incidents) {
        if (k.via_rsu) via_rsu = true;
      }
    }
    c.require(via_rsu, "the relay never reached 1800 m upstream");
    if (via_rsu) c.info("relay reached 1800 m upstream in " +
                        std::to_string(ticks) + " ticks");
  }

  return c;
}

// --------------------------------------------------------------- criterion 5

DrivingParams idm_params(double desired = 30.0, double a_max = 1.5,
                         double limit = 1e9) {
  DrivingParams p;
  p.desired_speed = desired;
  p.max_accel = a_max;
  p.speed_limit = limit;
  return p;
}

Check criterion_dynamics() {
  Check c;

  // Pinned car-following points, tolerance 1e-9 relative.
  struct Point {
    double speed, gap, approach, expected;
    DrivingParams p;
  };
  const Point points[] = {
      {0.0, kNoLeaderGap, 0.0, 1.5, idm_params()},
      {30.0, kNoLeaderGap, 0.0, 0.0, idm_params()},
      {0.0, 2.0, 0.0, 0.0, idm_params()},
      {25.0, 50.0, 0.0, -0.1595296296296299, idm_params()},
      {30.0, 100.0, 10.0, -2.677445819336059, idm_params()},
      {30.0, 5.0, 30.0, -8.0, idm_params()},
      {15.0, 30.0, 5.0, -2.891870789366979, idm_params(15.0, 1.0)},
      {20.0, kNoLeaderGap, 0.0, 0.5158499999999999,
       idm_params(30.0, 1.5, 80.0 / 3.6)},
      {10.0, 20.0, -5.0, 1.4567854645234137, idm_params()},
      {10.0, 12.0, 0.0, -1.5289351851851856, idm_params()},
  };
  int idm_failures = 0;
  for (const Point& pt : points) {
    const double got = following_accel(pt.speed, pt.gap, pt.approach, pt.p);
    const double tol = 1e-9 * std::max(1.0, std::abs(pt.expected));
    if (std::abs(got - pt.expected) > tol) ++idm_failures;
  }
  c.require(idm_failures == 0, std::to_string(idm_failures) +
                                   " of 10 car-following points off (> 1e-9)");

  // Gap queries: exact match with a quadratic scan on 200 random worlds.
  {
    Rng rng(777);
    const LaneId lanes[] = {kF1, kF2, kF3,
                            {Direction::backward, 1},
                            {Direction::backward, 2},
                            {Direction::backward, 3},
                            LaneId::ramp()};
    bool exact = true;
    for (int w = 0; w < 200 && exact; ++w) {
      std::vector<Vehicle> world;
      for (int i = 0; i < 50; ++i) {
        Vehicle v;
        v.id = i + 1;
        v.lane = lanes[rng.next_u64() % 7];
        v.position = rng.next_unit() * 10000.0;
        v.speed = rng.next_unit() * 30.0;
        v.klass.length = rng.next_unit() < 0.2 ? 12.0 : 5.0;
        world.push_back(v);
      }
      for (const Vehicle& self : world) {
        for (const LaneId lane : lanes) {
          const GapView got = gap_view(self.id, lane, world);
          const Vehicle* leader = nullptr;
          const Vehicle* follower = nullptr;
          for (const Vehicle& o : world) {
            if (o.id == self.id || o.lane != lane) continue;
            if (o.position >= self.position) {
              if (!leader || o.position < leader->position ||
                  (o.position == leader->position && o.id < leader->id))
                leader = &o;
            } else if (!follower || o.position > follower->position ||
                       (o.position == follower->position &&
                        o.id < follower->id)) {
              follower = &o;
            }
          }
          const double want_gap =
              leader ? std::max(0.0, leader->rear() - self.position)
                     : kNoLeaderGap;
          const double want_follow =
              follower ? std::max(0.0, self.position - self.klass.length -
                                           follower->position)
                       : kNoLeaderGap;
          if (got.net_gap != want_gap || got.follower_gap != want_follow ||
              got.leader_id !=
                  (leader ? std::optional<VehicleId>(leader->id)
                          : std::nullopt) ||
              got.follower_id !=
                  (follower ? std::optional<VehicleId>(follower->id)
                            : std::nullopt)) {
            exact = false;
          }
        }
      }
    }
    c.require(exact, "gap query deviated from the quadratic oracle");
  }

  // No collision over 10000 randomized ticks (engine invariant + rescan).
  {
    bool clean = true;
    std::string detail;
    for (std::uint64_t seed : {11u, 22u, 33u, 44u, 55u}) {
      ScenarioConfig cfg;
      cfg.seed = seed;
      cfg.main_inflow = 1.2;
      cfg.ramp_inflow = 0.1;
      cfg.backward_inflow = 0.3;
      cfg.warmup = 0.0;
      cfg.duration = 1000.0;
      AccidentEvent ev;
      ev.time = 25.0;
      ev.lane = LaneId::main(Direction::forward,
                             static_cast<int>(seed % 3) + 1);
      ev.position = 2500.0 + 1250.0 * static_cast<double>(seed % 4);
      cfg.accidents.push_back(ev);

      try {
        World world(cfg);
        for (int t = 0; t < 2000 && clean; ++t) {
          world.step();
          std::map<LaneId, std::vector<const Vehicle*>> lanes;
          for (const Vehicle& v : world.vehicles())
            lanes[v.lane].push_back(&v);
          for (auto& [lane, list] : lanes) {
            std::sort(list.begin(), list.end(),
                      [](const Vehicle* a, const Vehicle* b) {
                        return a->position < b->position;
                      });
            for (std::size_t i = 1; i < list.size(); ++i) {
              if (list[i]->rear() < list[i - 1]->position - 1e-9) clean = false;
            }
          }
        }
      } catch (const RuntimeBreachError& e) {
        clean = false;
        detail = e.what();
      }
    }
    c.require(clean, "overlap detected during randomized stress" +
                         (detail.empty() ? "" : (": " + detail)));
  }
  return c;
}

// --------------------------------------------------------------- criterion 6

Check criterion_units() {
  Check c;
  c.require(kmh_to_ms(108.0) == 30.0, "108 km/h != 30 m/s exactly");
  c.require(kmh_to_ms(54.0) == 15.0, "54 km/h != 15 m/s exactly");
  c.require(std::abs(kmh_to_ms(80.0) - 22.22) < 0.005,
            "80 km/h off 22.22 m/s by >= 0.005");
  bool round_trips = true;
  for (double kmh : {108.0, 54.0, 80.0, 0.0, 130.0}) {
    if (ms_to_kmh(kmh_to_ms(kmh)) != kmh) round_trips = false;
  }
  c.require(round_trips, "km/h round trip not exact");
  return c;
}

// --------------------------------------------------------------- criterion 7

Check criterion_determinism(const RunResult* baseline) {
  Check c;
  const RunResult again = run(blocked_lanes_config(false));
  c.require(metrics_to_csv(baseline->series) == metrics_to_csv(again.series),
            "metrics.csv differs between identical runs");
  c.require(events_to_csv(baseline->log) == events_to_csv(again.log),
            "events.csv differs between identical runs");
  c.info("byte-identical across " + std::to_string(again.series.size()) +
         " metric rows");
  return c;
}

// --------------------------------------------------------------- criterion 8

Check criterion_delivery() {
  Check c;

  // Inclusive boundary.
  {
    std::vector<Vehicle> vehicles(2);
    vehicles[0].id = 1;
    vehicles[0].lane = kF1;
    vehicles[0].position = 2000.0;
    vehicles[1].id = 2;
    vehicles[1].lane = kF1;
    vehicles[1].position = 3000.0;
    WarningMessage m = incident_message(1, kF1, 2000.0);
    std::vector<Transmission> txs = {
        Transmission{m, TxSource::from_vehicle(1), 2000.0, 0}};
    const Deliveries d = deliver(txs, vehicles, {}, 1000.0, 10000.0);
    c.require(d.to_vehicles.count(2) == 1,
              "a copy at exactly v2v_range was not delivered");
  }

  // 100 randomized worlds against a quadratic oracle; tolerance: exact.
  Rng rng(31337);
  bool exact = true;
  for (int w = 0; w < 100 && exact; ++w) {
    std::vector<Vehicle> vehicles;
    const int n = 3 + static_cast<int>(rng.next_u64() % 20);
    for (int i = 0; i < n; ++i) {
      Vehicle v;
      v.id = i + 1;
      v.lane = LaneId::main(
          rng.next_unit() < 0.7 ? Direction::forward : Direction::backward, 2);
      v.position = rng.next_unit() * 10000.0;
      vehicles.push_back(v);
    }
    std::vector<Rsu> rsus;
    const int nr = static_cast<int>(rng.next_u64() % 3);
    for (int i = 0; i < nr; ++i) {
      rsus.push_back(Rsu{i + 1, rng.next_unit() * 10000.0,
                         800.0 + rng.next_unit() * 1500.0});
    }
    std::vector<Transmission> txs;
    const int k = 1 + static_cast<int>(rng.next_u64() % 8);
    for (int i = 0; i < k; ++i) {
      const MessageId id = 1 + static_cast<MessageId>(rng.next_u64() % 4);
      WarningMessage m = incident_message(id, kF1, 5000.0);
      if (!rsus.empty() && rng.next_unit() < 0.3) {
        const Rsu& r = rsus[rng.next_u64() % rsus.size()];
        m.origin_speed = 1000.0 + r.id;
        m.relayed_by_rsu = true;
        txs.push_back(Transmission{m, TxSource::from_rsu(r.id), r.position, 0});
      } else {
        const Vehicle& v = vehicles[rng.next_u64() % vehicles.size()];
        m.origin_speed = static_cast<double>(v.id);
        txs.push_back(Transmission{m, TxSource::from_vehicle(v.id),
                                   absolute_position(v, 10000.0), 0});
      }
    }

    const Deliveries got = deliver(txs, vehicles, rsus, 1000.0, 10000.0);

    // Oracle.
    Deliveries want;
    auto rsu_by_id = [&](std::int64_t id) -> const Rsu* {
      for (const Rsu& r : rsus)
        if (r.id == id) return &r;
      return nullptr;
    };
    for (const Vehicle& v : vehicles) {
      const double at = absolute_position(v, 10000.0);
      std::map<MessageId, const Transmission*> best;
      for (const Transmission& t : txs) {
        bool reachable = false;
        if (t.source.kind == TxSource::Kind::vehicle) {
          if (t.source.id == v.id) continue;
          reachable = std::abs(t.emit_position - at) <= 1000.0;
        } else if (const Rsu* r = rsu_by_id(t.source.id)) {
          reachable = rsu_covers(*r, at);
        }
        if (!reachable) continue;
        auto [it, inserted] = best.emplace(t.message.message_id, &t);
        if (!inserted && t.source < it->second->source) it->second = &t;
      }
      for (const auto& [id, t] : best)
        want.to_vehicles[v.id].messages.push_back(t->message);
    }
    for (const Rsu& r : rsus) {
      std::map<MessageId, const Transmission*> best;
      for (const Transmission& t : txs) {
        if (t.source.kind != TxSource::Kind::vehicle) continue;
        if (!rsu_covers(r, t.emit_position)) continue;
        auto [it, inserted] = best.emplace(t.message.message_id, &t);
        if (!inserted && t.source < it->second->source) it->second = &t;
      }
      for (const auto& [id, t] : best)
        want.to_rsus[r.id].messages.push_back(t->message);
    }

    auto flat = [](const Deliveries& d) {
      std::vector<std::tuple<int, std::int64_t, MessageId, double>> rows;
      for (const auto& [vid, inbox] : d.to_vehicles)
        for (const WarningMessage& m : inbox.messages)
          rows.emplace_back(0, vid, m.message_id, m.origin_speed);
      for (const auto& [rid, inbox] : d.to_rsus)
        for (const WarningMessage& m : inbox.messages)
          rows.emplace_back(1, rid, m.message_id, m.origin_speed);
      return rows;
    };
    if (flat(got) != flat(want)) exact = false;
  }
  c.require(exact, "delivery deviated from the quadratic oracle");
  return c;
}

}  // namespace

int main() {
  int failures = 0;
  auto report = [&](int idx, const std::string& name, const Check& c) {
    std::printf("[%s] criterion %d: %s%s%s\n", c.ok ? "PASS" : "FAIL", idx,
                name.c_str(), c.note.empty() ? "" : " — ", c.note.c_str());
    std::fflush(stdout);
    if (!c.ok) ++failures;
  };

  const RunResult* baseline = nullptr;
  report(1, "congestion detection without the protocol",
         criterion_detection(baseline));

  EventLog control_events;
  report(2, "congestion control with the protocol",
         criterion_control(control_events));
  report(3, "cessation lowers the message overhead", criterion_cessation());
  report(4, "protocol state machine properties",
         criterion_protocol(control_events));
  report(5, "car-following, gap, and collision-freedom oracles",
         criterion_dynamics());
  report(6, "unit conversions", criterion_units());
  report(7, "byte-identical reruns", criterion_determinism(baseline));
  report(8, "radio delivery oracle", criterion_delivery());

  if (failures > 0) {
    std::printf("%d of 8 criteria failed\n", failures);
    return 1;
  }
  std::printf("all 8 criteria passed\n");
  return 0;
}
