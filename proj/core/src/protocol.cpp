#include "cdca/protocol.hpp"

#include <algorithm>

#include "cdca/gap.hpp"
#include "cdca/scenario.hpp"
#include "cdca/vehicle.hpp"

namespace cdca {

const char* to_string(ProtocolMode mode) {
  switch (mode) {
    case ProtocolMode::idle: return "idle";
    case ProtocolMode::affected_broadcasting: return "affected_broadcasting";
    case ProtocolMode::informed_diverting: return "informed_diverting";
    case ProtocolMode::forwarding: return "forwarding";
    case ProtocolMode::ceased: return "ceased";
  }
  return "?";
}

namespace {

void remember_incident(ProtocolState& state, const WarningMessage& msg) {
  for (KnownIncident& inc : state.known_incidents) {
    if (inc.message_id == msg.message_id) {
      inc.via_rsu = inc.via_rsu || msg.relayed_by_rsu;
      inc.hop_count = std::min(inc.hop_count, msg.hop_count);
      return;
    }
  }
  state.known_incidents.push_back(KnownIncident{
      msg.message_id, msg.blocked_lane, msg.incident_position,
      msg.created_tick, msg.relayed_by_rsu, msg.hop_count});
}

bool incident_ahead_within(const Vehicle& v, LaneId blocked_lane,
                           double incident_position, double window) {
  if (blocked_lane.direction != v.lane.direction) return false;
  const double distance = incident_position - v.position;
  return distance > 0.0 && distance <= window;
}

// Diversion target: prefer a lane not named blocked ahead in any known
// incident, then the larger net gap, then the lower index.
LaneId pick_target_lane(const Vehicle& v, const ProtocolContext& ctx) {
  const std::vector<LaneId> candidates = adjacent_lanes(v.lane);
  LaneId best = candidates.front();
  int best_blocked = 2;
  double best_gap = -1.0;
  for (LaneId cand : candidates) {
    int blocked = 0;
    for (const KnownIncident& inc : v.protocol.known_incidents) {
      if (inc.blocked_lane == cand &&
          incident_ahead_within(v, inc.blocked_lane, inc.incident_position,
                                ctx.config.lookahead)) {
        blocked = 1;
        break;
      }
    }
    const double gap = gap_view(v.id, cand, ctx.vehicles).net_gap;
    if (blocked < best_blocked ||
        (blocked == best_blocked && gap > best_gap)) {
      best = cand;
      best_blocked = blocked;
      best_gap = gap;
    }
  }
  return best;
}

// Plans the diversion and prepares the updated message for forwarding.
// Cessation is permanent: a ceased vehicle may still divert for its own
// safety but never transmits again; the hop cap likewise suppresses the
// forward while leaving the diversion intact.
ReceiveDecision plan_diversion(Vehicle& v, const WarningMessage& msg,
                               const ProtocolContext& ctx) {
  ReceiveDecision decision;
  decision.action = ReceiveAction::divert;
  const LaneId target = pick_target_lane(v, ctx);
  decision.target_lane = target;
  v.protocol.planned_target_lane = target;
  v.status = VehicleStatus::diverting;

  const bool ceased = v.protocol.mode == ProtocolMode::ceased;
  const bool hop_ok = msg.hop_count + 1 <= ctx.config.max_hops;
  if (!ceased && hop_ok) {
    WarningMessage updated = msg;
    updated.decision_field = DecisionField::diversion(target);
    updated.relayed_by_rsu = false;
    updated.hop_count = msg.hop_count + 1;
    decision.forward = true;
    decision.updated_msg = updated;
    v.protocol.outgoing = updated;
    v.protocol.mode = ProtocolMode::forwarding;
    v.protocol.last_broadcast_tick = ctx.now;
  } else if (!ceased) {
    v.protocol.mode = ProtocolMode::informed_diverting;
  }
  return decision;
}

}  // namespace

WarningMessage on_accident(Vehicle& vehicle, MessageId message_id, Tick now) {
  WarningMessage msg;
  msg.message_id = message_id;
  msg.origin_vehicle_id = vehicle.id;
  msg.origin_speed = 0.0;
  msg.blocked_lane = vehicle.lane;
  msg.incident_position = vehicle.position;
  msg.created_tick = now;
  vehicle.protocol.mode = ProtocolMode::affected_broadcasting;
  vehicle.protocol.outgoing = msg;
  vehicle.protocol.last_broadcast_tick.reset();
  vehicle.protocol.known_message_ids.insert(message_id);
  remember_incident(vehicle.protocol, msg);
  return msg;
}

std::vector<Transmission> broadcast_tick(Vehicle& vehicle, Tick now,
                                         Tick interval_ticks) {
  ProtocolState& st = vehicle.protocol;
  if (st.mode != ProtocolMode::affected_broadcasting &&
      st.mode != ProtocolMode::forwarding) {
    return {};
  }
  if (!st.outgoing) return {};
  if (st.last_broadcast_tick &&
      now - *st.last_broadcast_tick < interval_ticks) {
    return {};
  }
  st.last_broadcast_tick = now;
  Transmission tx;
  tx.message = *st.outgoing;
  tx.source = TxSource::from_vehicle(vehicle.id);
  tx.emit_tick = now;
  return {tx};
}

ReceiveDecision on_receive(Vehicle& vehicle, const WarningMessage& msg,
                           const ProtocolContext& ctx) {
  ReceiveDecision decision;
  if (!ctx.network.valid_lane(msg.blocked_lane)) {
    decision.action = ReceiveAction::malformed;
    return decision;
  }
  if (vehicle.protocol.knows(msg.message_id)) {
    decision.action = ReceiveAction::duplicate;
    return decision;
  }
  vehicle.protocol.known_message_ids.insert(msg.message_id);
  remember_incident(vehicle.protocol, msg);

  if (vehicle.status != VehicleStatus::blocked &&
      vehicle.lane == msg.blocked_lane &&
      incident_ahead_within(vehicle, msg.blocked_lane, msg.incident_position,
                            ctx.config.lookahead)) {
    return plan_diversion(vehicle, msg, ctx);
  }
  if (msg.relayed_by_rsu && vehicle.lane != msg.blocked_lane) {
    decision.action = ReceiveAction::heed_advisory;
    return decision;
  }
  return decision;  // ignore
}

ReceiveDecision divert_from_known_incidents(Vehicle& vehicle,
                                            const ProtocolContext& ctx) {
  ReceiveDecision decision;
  if (vehicle.status == VehicleStatus::blocked) return decision;
  if (vehicle.protocol.planned_target_lane) return decision;
  for (const KnownIncident& inc : vehicle.protocol.known_incidents) {
    if (inc.blocked_lane != vehicle.lane) continue;
    if (!incident_ahead_within(vehicle, inc.blocked_lane,
                               inc.incident_position, ctx.config.lookahead)) {
      continue;
    }
    WarningMessage msg;
    msg.message_id = inc.message_id;
    msg.blocked_lane = inc.blocked_lane;
    msg.incident_position = inc.incident_position;
    msg.created_tick = inc.created_tick;
    msg.hop_count = inc.hop_count;
    return plan_diversion(vehicle, msg, ctx);
  }
  return decision;
}

void on_lane_change_complete(Vehicle& vehicle) {
  ProtocolState& st = vehicle.protocol;
  if (st.mode == ProtocolMode::informed_diverting ||
      st.mode == ProtocolMode::forwarding) {
    st.mode = ProtocolMode::ceased;
    st.outgoing.reset();
  }
  st.planned_target_lane.reset();
}

bool rsu_on_receive(RsuState& state, const WarningMessage& msg) {
  auto it = state.schedules.find(msg.message_id);
  if (it != state.schedules.end()) return false;
  WarningMessage relayed = msg;
  relayed.relayed_by_rsu = true;
  state.schedules.emplace(msg.message_id,
                          RsuSchedule{relayed, std::nullopt, false});
  return true;
}

std::vector<Transmission> rsu_broadcast_tick(RsuState& state, const Rsu& rsu,
                                             Tick now, Tick interval_ticks,
                                             Tick ttl_ticks) {
  std::vector<Transmission> out;
  for (auto& [id, sched] : state.schedules) {
    if (sched.stopped) continue;
    if (ttl_ticks > 0 && now - sched.message.created_tick > ttl_ticks) {
      sched.stopped = true;
      continue;
    }
    if (sched.last_broadcast_tick &&
        now - *sched.last_broadcast_tick < interval_ticks) {
      continue;
    }
    sched.last_broadcast_tick = now;
    Transmission tx;
    tx.message = sched.message;
    tx.source = TxSource::from_rsu(rsu.id);
    tx.emit_position = rsu.position;
    tx.emit_tick = now;
    out.push_back(tx);
  }
  return out;
}

void rsu_stop_schedule(RsuState& state, MessageId id) {
  auto it = state.schedules.find(id);
  if (it != state.schedules.end()) it->second.stopped = true;
}

}  // namespace cdca
