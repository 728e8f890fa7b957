#ifndef CDCA_PROTOCOL_HPP
#define CDCA_PROTOCOL_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <vector>

#include "cdca/comms.hpp"
#include "cdca/message.hpp"
#include "cdca/road.hpp"

namespace cdca {

struct Vehicle;
struct ScenarioConfig;

enum class ProtocolMode : std::uint8_t {
  idle,
  affected_broadcasting,  // accident origin, rebroadcasts its own message
  informed_diverting,     // diversion planned, nothing to forward (hop cap)
  forwarding,             // diversion planned, relays the updated message
  ceased,                 // broadcast stopped for good after the lane change
};

const char* to_string(ProtocolMode mode);

// An incident the vehicle has heard about. Retained after the triggering
// message is consumed so late deciders (vehicles informed long before the
// incident enters their lookahead) still divert, and so lane selection can
// avoid lanes known to be blocked ahead.
struct KnownIncident {
  MessageId message_id = 0;
  LaneId blocked_lane{};
  double incident_position = 0.0;
  Tick created_tick = 0;
  bool via_rsu = false;   // ever heard through a roadside unit
  int hop_count = 0;      // lowest hop count seen for this incident
};

struct ProtocolState {
  ProtocolMode mode = ProtocolMode::idle;
  std::set<MessageId> known_message_ids;
  std::optional<Tick> last_broadcast_tick;
  std::optional<LaneId> planned_target_lane;
  // Message this vehicle rebroadcasts: its own for affected vehicles, the
  // updated copy for forwarders.
  std::optional<WarningMessage> outgoing;
  std::vector<KnownIncident> known_incidents;

  bool knows(MessageId id) const { return known_message_ids.count(id) > 0; }
};

enum class ReceiveAction : std::uint8_t {
  ignore,
  duplicate,
  divert,
  heed_advisory,
  malformed,
};

struct ReceiveDecision {
  ReceiveAction action = ReceiveAction::ignore;
  std::optional<LaneId> target_lane;
  bool forward = false;
  std::optional<WarningMessage> updated_msg;
};

// World snapshot the receive handlers consult for lane selection.
struct ProtocolContext {
  const RoadNetwork& network;
  std::span<const Vehicle> vehicles;
  const ScenarioConfig& config;
  Tick now = 0;
};

// Transition of a just-blocked vehicle into affected_broadcasting; returns
// the origin warning message. The first transmission goes out on this tick's
// broadcast pass.
WarningMessage on_accident(Vehicle& vehicle, MessageId message_id, Tick now);

// Periodic rebroadcast for affected and forwarding vehicles. Emits at the
// first call after activation and then once per `interval_ticks`.
std::vector<Transmission> broadcast_tick(Vehicle& vehicle, Tick now,
                                         Tick interval_ticks);

ReceiveDecision on_receive(Vehicle& vehicle, const WarningMessage& msg,
                           const ProtocolContext& ctx);

// Deferred diversion: a vehicle that already knows about an incident in its
// current lane decides to divert once the incident is ahead within the
// lookahead. Covers both late arrivals into the lookahead window and lane
// changes into a lane the vehicle knows is blocked.
ReceiveDecision divert_from_known_incidents(Vehicle& vehicle,
                                            const ProtocolContext& ctx);

// Broadcast cessation after the diversion lane change completes.
void on_lane_change_complete(Vehicle& vehicle);

struct RsuSchedule {
  WarningMessage message;  // relayed_by_rsu already set
  std::optional<Tick> last_broadcast_tick;
  bool stopped = false;    // incident cleared
};

struct RsuState {
  int rsu_id = 0;
  std::map<MessageId, RsuSchedule> schedules;
};

// Starts (or keeps) the periodic rebroadcast schedule for msg; duplicate ids
// collapse into the existing schedule. Returns true when a new schedule was
// created.
bool rsu_on_receive(RsuState& state, const WarningMessage& msg);

std::vector<Transmission> rsu_broadcast_tick(RsuState& state, const Rsu& rsu,
                                             Tick now, Tick interval_ticks,
                                             Tick ttl_ticks);

void rsu_stop_schedule(RsuState& state, MessageId id);

}  // namespace cdca

#endif  // CDCA_PROTOCOL_HPP
