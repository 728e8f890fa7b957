#include "cdca/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "cdca/gap.hpp"
#include "cdca/log.hpp"
#include "cdca/units.hpp"

namespace cdca {
namespace {

// A follower may consume its whole gap minus this margin in one tick, which
// keeps bumper-to-bumper gaps strictly positive under synchronous updates.
constexpr double kContactMargin = 0.01;  // m

// Discretionary (incentive-based) changes model overtaking in moving
// traffic. Once the vehicle directly ahead has dropped below this speed the
// lane is in stop-and-go and an unwarned driver brakes and queues instead of
// darting out; escaping the queue requires a diversion plan.
constexpr double kQueuedLeaderSpeed = 5.0;  // m/s

// Brake-light analogue of the same rule: a leader decelerating harder than
// this is reacting to trouble ahead, and the driver behind covers the brake
// rather than starting an overtake.
constexpr double kLeaderHardBraking = 3.0;  // m/s^2

ScenarioConfig checked(ScenarioConfig config) {
  validate(config);
  return config;
}

std::string lane_detail(LaneId from, LaneId to) {
  return "from=" + lane_to_string(from) + " to=" + lane_to_string(to);
}

}  // namespace

std::uint64_t Rng::next_u64() {
  state_ += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double Rng::next_unit() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

World::World(const ScenarioConfig& config)
    : config_(checked(config)),
      network_(build_network(config_)),
      rng_(config_.seed) {
  const std::vector<RsuSpec> layout = resolved_rsu_layout(config_);
  rsus_.reserve(layout.size());
  rsu_states_.reserve(layout.size());
  for (std::size_t i = 0; i < layout.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    rsus_.push_back(Rsu{id, layout[i].position, layout[i].coverage});
    rsu_states_.push_back(RsuState{id, {}});
  }
  interval_ticks_ = std::max<Tick>(
      1, std::llround(config_.rebroadcast_interval / config_.dt));
  ttl_ticks_ = config_.message_ttl > 0.0
                   ? std::max<Tick>(1, std::llround(config_.message_ttl /
                                                    config_.dt))
                   : 0;
  accident_fired_.assign(config_.accidents.size(), false);
  if (config_.prefill) prefill_roads();
  log_info("world: seed=" + std::to_string(config_.seed) + " rsus=" +
           std::to_string(rsus_.size()) + " accidents=" +
           std::to_string(config_.accidents.size()) + " prefilled=" +
           std::to_string(vehicles_.size()) + " cdca=" +
           (config_.cdca_enabled ? "on" : "off"));
}

// Seeds the main carriageways with free-flow traffic at the density the
// inflow rates would sustain, so a run does not begin with an empty road.
// Headways are exponential (Poisson arrivals mapped to distance); initial
// speeds are capped so nobody starts harder on the brakes than the
// comfortable deceleration.
void World::prefill_roads() {
  struct Source {
    Direction direction;
    double rate;  // veh/s per lane
  };
  std::vector<Source> sources;
  if (config_.main_inflow > 0.0) {
    sources.push_back({Direction::forward,
                       config_.main_inflow / network_.lanes_per_direction});
  }
  if (config_.backward_inflow > 0.0) {
    sources.push_back({Direction::backward,
                       config_.backward_inflow / network_.lanes_per_direction});
  }

  const double limit = config_.speed_limit;
  const double car_v0 = std::min(config_.car_speed, limit);
  const double truck_v0 = std::min(config_.truck_speed, limit);
  const double mean_speed = (1.0 - config_.truck_share) * car_v0 +
                            config_.truck_share * truck_v0;

  for (const Source& src : sources) {
    if (src.rate <= 0.0) continue;
    const double mean_headway = mean_speed / src.rate;  // m, front to front
    for (int i = 1; i <= network_.lanes_per_direction; ++i) {
      const LaneId lane{src.direction, i};
      double front = config_.main_length -
                     rng_.next_unit() * mean_headway;  // random phase
      std::optional<double> leader_rear;
      std::optional<double> leader_speed;
      while (front > config_.truck_length + config_.min_gap) {
        if (static_cast<int>(vehicles_.size()) >= config_.vehicle_target) {
          return;
        }
        const bool truck = rng_.next_unit() < config_.truck_share;
        const VehicleKind kind = truck ? VehicleKind::truck : VehicleKind::car;
        const double length =
            truck ? config_.truck_length : config_.car_length;
        const double v0 = truck ? truck_v0 : car_v0;
        double speed = v0;
        if (leader_rear) {
          const double gap = *leader_rear - front;
          Vehicle probe;
          probe.klass = VehicleClass{kind, truck ? config_.truck_speed
                                                 : config_.car_speed,
                                     length};
          probe.driving = driving_params_for(probe);
          if (following_accel(speed, gap, speed - *leader_speed,
                              probe.driving) < -config_.comfortable_decel) {
            speed = std::min(speed, *leader_speed);
          }
        }
        add_vehicle(lane, front, speed, kind);
        leader_rear = front - length;
        leader_speed = speed;
        const double draw =
            -std::log(1.0 - rng_.next_unit()) * mean_headway;
        front -= std::max(draw, length + config_.min_gap + 2.0);
      }
    }
  }
}

void World::step() {
  messages_this_tick_ = 0;
  inject_accidents();
  deliver_pending();
  protocol_phase();
  lane_change_phase();
  dynamics_phase();
  spawn_despawn_phase();
  ++tick_;
  record_metrics();
  assert_no_collision();
  if (log_level() >= LogLevel::trace) {
    const MetricsRecord& m = metrics_.back();
    log_trace("tick " + std::to_string(tick_) + ": active=" +
              std::to_string(m.active_vehicles) + " congested=" +
              std::to_string(m.congested_vehicles) + " msgs=" +
              std::to_string(m.messages_sent_this_tick));
  }
}

VehicleId World::add_vehicle(LaneId lane, double position, double speed,
                             VehicleKind kind) {
  if (!network_.valid_lane(lane)) {
    throw InvalidGeometryError("add_vehicle: invalid lane " +
                               lane_to_string(lane));
  }
  Vehicle v;
  v.id = next_vehicle_id_++;
  if (kind == VehicleKind::truck) {
    v.klass = VehicleClass{VehicleKind::truck, config_.truck_speed,
                           config_.truck_length};
  } else {
    v.klass =
        VehicleClass{VehicleKind::car, config_.car_speed, config_.car_length};
  }
  v.position = position;
  v.lane = lane;
  v.speed = speed;
  v.driving = driving_params_for(v);
  vehicles_.push_back(std::move(v));
  const Vehicle& added = vehicles_.back();
  log_event(EventKind::spawn, "v" + std::to_string(added.id), std::nullopt,
            "lane=" + lane_to_string(lane) +
                " kind=" + (kind == VehicleKind::truck ? "truck" : "car"));
  return added.id;
}

const Vehicle* World::find_vehicle(VehicleId id) const {
  for (const Vehicle& v : vehicles_) {
    if (v.id == id) return &v;
  }
  return nullptr;
}

Vehicle* World::find_vehicle(VehicleId id) {
  for (Vehicle& v : vehicles_) {
    if (v.id == id) return &v;
  }
  return nullptr;
}

DrivingParams World::driving_params_for(const Vehicle& v) const {
  DrivingParams p;
  p.desired_speed = v.klass.desired_speed;
  p.time_headway = config_.time_headway;
  p.max_accel = v.klass.kind == VehicleKind::truck ? config_.truck_max_accel
                                                   : config_.car_max_accel;
  p.comfortable_decel = config_.comfortable_decel;
  p.min_gap = config_.min_gap;
  p.accel_exponent = config_.accel_exponent;
  p.speed_limit = config_.speed_limit;
  return p;
}

LaneChangeParams World::lane_change_params() const {
  LaneChangeParams p;
  p.politeness = config_.politeness;
  p.changing_threshold = config_.changing_threshold;
  p.safe_decel = config_.safe_decel;
  return p;
}

bool World::incident_cleared(MessageId id) const {
  for (const Incident& inc : incidents_) {
    if (inc.message_id == id) return inc.cleared;
  }
  return false;
}

void World::log_event(EventKind kind, const std::string& subject,
                      std::optional<MessageId> msg_id,
                      const std::string& detail) {
  EventLogEntry e;
  // Events carry the wall time of the tick they land in (its end).
  e.time = static_cast<double>(tick_ + 1) * config_.dt;
  e.kind = kind;
  e.subject = subject;
  e.message_id = msg_id;
  e.detail = detail;
  events_.push_back(std::move(e));
}

void World::queue_transmission(const WarningMessage& msg, TxSource source,
                               double emit_position) {
  Transmission tx;
  tx.message = msg;
  tx.source = source;
  tx.emit_position = emit_position;
  tx.emit_tick = tick_;
  pending_.push_back(std::move(tx));
  ++messages_this_tick_;
  ++messages_total_;
  const std::string subject =
      (source.kind == TxSource::Kind::rsu ? "r" : "v") +
      std::to_string(source.id);
  log_event(EventKind::broadcast, subject, msg.message_id, msg.to_log_string());
}

// ---------------------------------------------------------------------------
// Phase 1: accident injection and incident clearing.

void World::inject_accidents() {
  const double tick_end = static_cast<double>(tick_ + 1) * config_.dt;
  for (std::size_t i = 0; i < config_.accidents.size(); ++i) {
    if (accident_fired_[i]) continue;
    const AccidentEvent& ev = config_.accidents[i];
    if (ev.time > tick_end + 1e-9) continue;
    accident_fired_[i] = true;

    // Victim: nearest non-blocked vehicle at or upstream of the event
    // position, else a stalled vehicle placed there.
    Vehicle* victim = nullptr;
    for (Vehicle& v : vehicles_) {
      if (v.lane != ev.lane) continue;
      if (v.status == VehicleStatus::blocked) continue;
      if (v.position > ev.position) continue;
      if (ev.position - v.position > 100.0) continue;
      if (!victim || v.position > victim->position) victim = &v;
    }
    if (!victim) {
      double front = ev.position;
      const double length = config_.car_length;
      bool moved = true;
      while (moved) {
        moved = false;
        for (const Vehicle& o : vehicles_) {
          if (o.lane != ev.lane) continue;
          if (o.position > front - length - kContactMargin &&
              o.rear() < front + kContactMargin) {
            front = o.rear() - 0.5;
            moved = true;
          }
        }
      }
      const VehicleId id = add_vehicle(ev.lane, front, 0.0, VehicleKind::car);
      victim = find_vehicle(id);
    }
    if (!apply_blockage(*victim)) continue;

    Incident inc;
    inc.blocked_vehicle = victim->id;
    inc.lane = ev.lane;
    inc.position = victim->position;
    inc.start_tick = tick_;
    if (config_.cdca_enabled) {
      inc.message_id = next_message_id_++;
      on_accident(*victim, inc.message_id, tick_);
    }
    incidents_.push_back(inc);
    log_info("accident: vehicle " + std::to_string(victim->id) + " blocked in " +
             lane_to_string(ev.lane) + " at " + std::to_string(victim->position));
    log_event(EventKind::accident, "v" + std::to_string(victim->id),
              inc.message_id != 0 ? std::optional<MessageId>(inc.message_id)
                                  : std::nullopt,
              "lane=" + lane_to_string(ev.lane) +
                  " position=" + std::to_string(victim->position));
  }

  if (config_.incident_duration > 0.0) {
    for (Incident& inc : incidents_) {
      if (inc.cleared) continue;
      const double age = static_cast<double>(tick_ - inc.start_tick) *
                         config_.dt;
      if (age < config_.incident_duration) continue;
      inc.cleared = true;
      if (Vehicle* v = find_vehicle(inc.blocked_vehicle)) {
        v->status = VehicleStatus::active;
        if (v->protocol.mode == ProtocolMode::affected_broadcasting) {
          v->protocol.mode = ProtocolMode::ceased;
          v->protocol.outgoing.reset();
          log_event(EventKind::cessation, "v" + std::to_string(v->id),
                    inc.message_id != 0
                        ? std::optional<MessageId>(inc.message_id)
                        : std::nullopt,
                    "incident cleared");
        }
      }
      for (RsuState& st : rsu_states_) rsu_stop_schedule(st, inc.message_id);
    }
  }
}

// ---------------------------------------------------------------------------
// Phase 2: deliveries of the previous tick's transmissions.

void World::deliver_pending() {
  std::vector<Transmission> txs;
  txs.swap(pending_);
  if (txs.empty()) {
    inbound_ = Deliveries{};
    return;
  }
  if (config_.drop_probability > 0.0) {
    inbound_ = deliver(
        txs, vehicles_, rsus_, config_.v2v_range, config_.main_length,
        [this] { return rng_.next_unit() < config_.drop_probability; });
  } else {
    inbound_ = deliver(txs, vehicles_, rsus_, config_.v2v_range,
                       config_.main_length);
  }
}

// ---------------------------------------------------------------------------
// Phase 3: protocol receive / RSU receive / rebroadcast.

void World::protocol_phase() {
  if (!config_.cdca_enabled) {
    inbound_ = Deliveries{};
    return;
  }
  const ProtocolContext ctx{network_, vehicles_, config_, tick_};

  auto handle_decision = [this](Vehicle& v, const ReceiveDecision& d) {
    if (d.forward && d.updated_msg) {
      queue_transmission(*d.updated_msg, TxSource::from_vehicle(v.id),
                         absolute_position(v, config_.main_length));
    }
  };

  for (const auto& [vid, inbox] : inbound_.to_vehicles) {
    Vehicle* v = find_vehicle(vid);
    if (!v) continue;  // despawned between emit and delivery
    for (const WarningMessage& msg : inbox.messages) {
      const ReceiveDecision d = on_receive(*v, msg, ctx);
      switch (d.action) {
        case ReceiveAction::duplicate:
          break;  // not logged, keeps the event log bounded
        case ReceiveAction::malformed:
          ++rejected_messages_;
          log_event(EventKind::receive, "v" + std::to_string(vid),
                    msg.message_id, "action=malformed");
          break;
        case ReceiveAction::divert:
          log_event(EventKind::receive, "v" + std::to_string(vid),
                    msg.message_id,
                    "action=divert target=" +
                        lane_to_string(d.target_lane.value_or(v->lane)));
          handle_decision(*v, d);
          break;
        case ReceiveAction::heed_advisory:
          log_event(EventKind::receive, "v" + std::to_string(vid),
                    msg.message_id, "action=advisory");
          break;
        case ReceiveAction::ignore:
          log_event(EventKind::receive, "v" + std::to_string(vid),
                    msg.message_id, "action=noted");
          break;
      }
    }
  }

  // Late deciders: vehicles that learned of an incident before it entered
  // their lookahead, or that changed into a lane they know is blocked.
  for (Vehicle& v : vehicles_) {
    if (v.status == VehicleStatus::blocked) continue;
    const ReceiveDecision d = divert_from_known_incidents(v, ctx);
    if (d.action == ReceiveAction::divert) handle_decision(v, d);
  }

  for (const auto& [rid, inbox] : inbound_.to_rsus) {
    RsuState* state = nullptr;
    for (RsuState& st : rsu_states_) {
      if (st.rsu_id == rid) {
        state = &st;
        break;
      }
    }
    if (!state) continue;
    for (const WarningMessage& msg : inbox.messages) {
      if (rsu_on_receive(*state, msg)) {
        log_event(EventKind::receive, "r" + std::to_string(rid),
                  msg.message_id, "action=relay_scheduled");
      }
    }
  }

  for (Vehicle& v : vehicles_) {
    for (const Transmission& tx :
         broadcast_tick(v, tick_, interval_ticks_)) {
      queue_transmission(tx.message, tx.source,
                         absolute_position(v, config_.main_length));
    }
  }
  for (std::size_t i = 0; i < rsu_states_.size(); ++i) {
    for (const Transmission& tx : rsu_broadcast_tick(
             rsu_states_[i], rsus_[i], tick_, interval_ticks_, ttl_ticks_)) {
      queue_transmission(tx.message, tx.source, tx.emit_position);
    }
  }
  inbound_ = Deliveries{};
}

// ---------------------------------------------------------------------------
// Phase 4: lane changes — forced diversions and ramp merges, then incentive.

bool World::try_lane_change(Vehicle& v, LaneId target, bool forced) {
  if (!network_.valid_lane(target)) return false;
  if (lane_change_decision(v, target, vehicles_, lane_change_params(),
                           forced) != LaneChange::change) {
    return false;
  }
  const LaneId from = v.lane;
  v.lane = target;
  if (v.protocol.planned_target_lane) {
    complete_diversion(v, from, target);
  }
  return true;
}

void World::complete_diversion(Vehicle& v, LaneId from, LaneId to) {
  ++diversions_total_;
  std::optional<MessageId> msg_id;
  for (const KnownIncident& inc : v.protocol.known_incidents) {
    if (inc.blocked_lane == from && !incident_cleared(inc.message_id)) {
      msg_id = inc.message_id;
      break;
    }
  }
  log_event(EventKind::diversion, "v" + std::to_string(v.id), msg_id,
            lane_detail(from, to));
  if (v.status == VehicleStatus::diverting) v.status = VehicleStatus::active;
  if (config_.cessation_enabled) {
    const ProtocolMode before = v.protocol.mode;
    on_lane_change_complete(v);
    if (before == ProtocolMode::forwarding ||
        before == ProtocolMode::informed_diverting) {
      log_event(EventKind::cessation, "v" + std::to_string(v.id), msg_id,
                "diversion complete");
    }
  } else {
    // Control experiment: the diversion happens but the rebroadcast never
    // stops, so the overhead of cessation-free flooding is measurable.
    v.protocol.planned_target_lane.reset();
  }
}

void World::lane_change_phase() {
  std::set<VehicleId> changed;

  for (Vehicle& v : vehicles_) {
    if (v.status == VehicleStatus::blocked) continue;
    if (!v.protocol.planned_target_lane) continue;
    const LaneId target = *v.protocol.planned_target_lane;
    if (target == v.lane) {
      v.protocol.planned_target_lane.reset();
      continue;
    }
    if (try_lane_change(v, target, /*forced=*/true)) changed.insert(v.id);
  }

  for (Vehicle& v : vehicles_) {
    if (v.status == VehicleStatus::blocked) continue;
    if (!v.lane.is_ramp()) continue;
    if (changed.count(v.id)) continue;
    if (!network_.ramp_adjacent_at(v.position, v.lane.direction)) continue;
    const LaneId target = LaneId{v.lane.direction,
                                 network_.lanes_per_direction};
    if (try_lane_change(v, target, /*forced=*/true)) changed.insert(v.id);
  }

  for (Vehicle& v : vehicles_) {
    if (v.status == VehicleStatus::blocked) continue;
    if (v.lane.is_ramp()) continue;
    if (v.protocol.planned_target_lane) continue;
    if (changed.count(v.id)) continue;
    const GapView own = gap_view(v.id, v.lane, vehicles_);
    if (own.leader_id) {
      if (own.leader_speed < kQueuedLeaderSpeed) continue;
      const Vehicle* leader = find_vehicle(*own.leader_id);
      if (leader && leader->accel < -kLeaderHardBraking) continue;
    }
    for (const LaneId cand : adjacent_lanes(v.lane)) {
      if (cand.is_ramp()) continue;
      if (lane_known_blocked_ahead(v, cand)) continue;
      if (try_lane_change(v, cand, /*forced=*/false)) break;
    }
  }
}

bool World::lane_known_blocked_ahead(const Vehicle& v, LaneId lane) const {
  for (const KnownIncident& inc : v.protocol.known_incidents) {
    if (inc.blocked_lane != lane) continue;
    if (incident_cleared(inc.message_id)) continue;
    const double dist = inc.incident_position - v.position;
    if (dist > 0.0 && dist <= config_.lookahead) return true;
  }
  return false;
}

double World::advisory_capped_speed(const Vehicle& v) const {
  double cap = std::numeric_limits<double>::infinity();
  for (const KnownIncident& inc : v.protocol.known_incidents) {
    if (!inc.via_rsu) continue;
    if (inc.blocked_lane.direction != v.lane.direction) continue;
    if (incident_cleared(inc.message_id)) continue;
    const double dist = inc.incident_position - v.position;
    if (dist > 0.0 && dist <= config_.advisory_zone) {
      cap = std::min(cap, config_.advisory_speed_factor * config_.speed_limit);
    }
  }
  return cap;
}

// ---------------------------------------------------------------------------
// Phase 5: car following and synchronous kinematic integration.

void World::dynamics_phase() {
  const std::size_t n = vehicles_.size();
  std::map<LaneId, std::vector<std::size_t>> lanes;
  for (std::size_t i = 0; i < n; ++i) lanes[vehicles_[i].lane].push_back(i);
  for (auto& [lane, idx] : lanes) {
    std::sort(idx.begin(), idx.end(), [this](std::size_t a, std::size_t b) {
      const Vehicle& va = vehicles_[a];
      const Vehicle& vb = vehicles_[b];
      if (va.position != vb.position) return va.position < vb.position;
      return va.id < vb.id;
    });
  }

  std::vector<double> accel(n, 0.0);
  std::vector<double> max_pos(n, std::numeric_limits<double>::infinity());
  for (const auto& [lane, idx] : lanes) {
    for (std::size_t k = 0; k < idx.size(); ++k) {
      const std::size_t i = idx[k];
      const Vehicle& v = vehicles_[i];
      if (v.status == VehicleStatus::blocked) continue;

      double gap = kNoLeaderGap;
      double leader_speed = 0.0;
      if (k + 1 < idx.size()) {
        const Vehicle& leader = vehicles_[idx[k + 1]];
        gap = leader.rear() - v.position;
        leader_speed = leader.speed;
      }
      if (v.lane.is_ramp()) {
        // The acceleration lane ends at a wall.
        const double wall_gap = network_.ramp_end() - v.position;
        if (wall_gap < gap) {
          gap = wall_gap;
          leader_speed = 0.0;
        }
      }

      DrivingParams p = v.driving;
      if (config_.cdca_enabled) {
        p.desired_speed =
            std::min(p.desired_speed, advisory_capped_speed(v));
      }
      accel[i] = gap <= 0.0 ? -kEmergencyDecel
                            : following_accel(v.speed, gap,
                                              v.speed - leader_speed, p);
      if (std::isfinite(gap)) {
        max_pos[i] = v.position + std::max(0.0, gap - kContactMargin);
      }
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    Vehicle& v = vehicles_[i];
    const double old_pos = v.position;
    step_kinematics(v, accel[i], config_.dt);
    if (v.position > max_pos[i]) {
      v.position = max_pos[i];
      v.speed = std::max(0.0, (v.position - old_pos) / config_.dt);
      if (v.speed < kStandstillSpeed) v.speed = 0.0;
    }
  }
}

// ---------------------------------------------------------------------------
// Phase 6: spawn / despawn.

bool World::spawn_one(LaneId lane, VehicleKind kind) {
  const double length = kind == VehicleKind::truck ? config_.truck_length
                                                   : config_.car_length;
  const double desired = kind == VehicleKind::truck ? config_.truck_speed
                                                    : config_.car_speed;
  const double front =
      lane.is_ramp() ? network_.ramp_begin() + length : length;

  const GapView g = gap_view_at(front, length, lane, vehicles_);
  if (g.follower_id && g.follower_gap <= config_.min_gap) return false;

  Vehicle probe;
  probe.klass = VehicleClass{kind, desired, length};
  probe.driving = driving_params_for(probe);
  const double v0 = std::min(desired, config_.speed_limit);
  auto safe_at = [&](double speed) {
    if (!g.leader_id) return true;
    if (g.net_gap <= config_.min_gap) return false;
    return following_accel(speed, g.net_gap, speed - g.leader_speed,
                           probe.driving) >= -config_.comfortable_decel;
  };
  double speed = lane.is_ramp() ? 0.5 * v0 : v0;
  if (!safe_at(speed)) {
    speed = std::min(speed, g.leader_speed);
    if (!safe_at(speed)) return false;
  }
  add_vehicle(lane, front, speed, kind);
  return true;
}

void World::spawn_despawn_phase() {
  for (auto it = vehicles_.begin(); it != vehicles_.end();) {
    const bool off_road =
        !it->lane.is_ramp() && it->position > config_.main_length;
    if (off_road) {
      log_event(EventKind::despawn, "v" + std::to_string(it->id),
                std::nullopt, "lane=" + lane_to_string(it->lane));
      it = vehicles_.erase(it);
    } else {
      ++it;
    }
  }

  struct Source {
    LaneId lane;
    double rate;
  };
  std::vector<Source> sources;
  for (int i = 1; i <= network_.lanes_per_direction; ++i) {
    sources.push_back({LaneId{Direction::forward, i}, config_.main_inflow /
                                                          network_.lanes_per_direction});
  }
  if (config_.ramp_length > 0.0 && config_.ramp_inflow > 0.0) {
    sources.push_back({LaneId::ramp(Direction::forward), config_.ramp_inflow});
  }
  if (config_.backward_inflow > 0.0) {
    for (int i = 1; i <= network_.lanes_per_direction; ++i) {
      sources.push_back({LaneId{Direction::backward, i},
                         config_.backward_inflow /
                             network_.lanes_per_direction});
    }
  }

  for (const Source& s : sources) {
    if (static_cast<int>(vehicles_.size()) >= config_.vehicle_target) break;
    const double p = std::min(1.0, s.rate * config_.dt);
    if (p <= 0.0) continue;
    if (rng_.next_unit() >= p) continue;
    const VehicleKind kind = rng_.next_unit() < config_.truck_share
                                 ? VehicleKind::truck
                                 : VehicleKind::car;
    spawn_one(s.lane, kind);
  }
}

// ---------------------------------------------------------------------------
// Phase 7: metrics and invariants.

void World::record_metrics() {
  MetricsRecord r;
  r.time = now();
  r.active_vehicles = static_cast<int>(vehicles_.size());
  r.congested_vehicles =
      congestion_count(vehicles_, config_.congestion_threshold,
                       config_.congestion_includes_blocked);
  double speed_sum = 0.0;
  for (const Vehicle& v : vehicles_) {
    speed_sum += v.speed;
    const bool congested =
        v.speed <= config_.congestion_threshold &&
        (config_.congestion_includes_blocked ||
         v.status != VehicleStatus::blocked);
    if (congested && v.lane.direction == Direction::forward &&
        v.lane.is_main()) {
      r.per_lane_congested[v.lane.index - 1] += 1;
    }
  }
  r.mean_speed = vehicles_.empty()
                     ? 0.0
                     : speed_sum / static_cast<double>(vehicles_.size());
  r.messages_sent_this_tick = messages_this_tick_;
  r.messages_cumulative = messages_total_;
  r.diversions_cumulative = diversions_total_;
  metrics_.push_back(r);
}

void World::assert_no_collision() {
  std::map<LaneId, std::vector<const Vehicle*>> lanes;
  for (const Vehicle& v : vehicles_) lanes[v.lane].push_back(&v);
  for (auto& [lane, vs] : lanes) {
    std::sort(vs.begin(), vs.end(), [](const Vehicle* a, const Vehicle* b) {
      if (a->position != b->position) return a->position < b->position;
      return a->id < b->id;
    });
    for (std::size_t k = 0; k + 1 < vs.size(); ++k) {
      const Vehicle* follower = vs[k];
      const Vehicle* leader = vs[k + 1];
      if (leader->rear() - follower->position < -1e-9) {
        std::ostringstream out;
        out << "collision at tick " << tick_ << " lane "
            << lane_to_string(lane) << ": v" << follower->id << " front "
            << follower->position << " overlaps v" << leader->id << " rear "
            << leader->rear() << " (speeds " << follower->speed << ", "
            << leader->speed << ")";
        throw RuntimeBreachError(out.str());
      }
    }
  }
  for (const Vehicle& v : vehicles_) {
    if (v.protocol.mode == ProtocolMode::affected_broadcasting &&
        v.status != VehicleStatus::blocked) {
      throw RuntimeBreachError(
          "protocol breach at tick " + std::to_string(tick_) + ": v" +
          std::to_string(v.id) + " broadcasts as affected but is not blocked");
    }
  }
}

RunResult run(const ScenarioConfig& config) {
  World world(config);
  const Tick total = std::llround(config.duration / config.dt);
  for (Tick t = 0; t < total; ++t) world.step();

  RunResult result;
  result.series = world.metrics();
  result.log = world.events();
  result.config_echo = serialize_scenario(world.config());
  for (const Vehicle& v : world.vehicles()) {
    if (v.status == VehicleStatus::blocked) ++result.blocked_final;
  }
  result.congested_final =
      result.series.empty() ? 0 : result.series.back().congested_vehicles;
  result.messages_total = world.messages_total();
  result.diversions_total = world.diversions_total();
  return result;
}

}  // namespace cdca
