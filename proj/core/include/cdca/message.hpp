#ifndef CDCA_MESSAGE_HPP
#define CDCA_MESSAGE_HPP

#include <cstdint>
#include <string>

#include "cdca/road.hpp"

namespace cdca {

using VehicleId = std::int64_t;
using MessageId = std::int64_t;
using Tick = std::int64_t;

// Receiver-side decision recorded into the message before forwarding.
struct DecisionField {
  enum class Kind : std::uint8_t { none = 0, diversion_taken = 1 };
  Kind kind = Kind::none;
  LaneId target_lane{};  // meaningful only for diversion_taken

  static DecisionField none() { return {}; }
  static DecisionField diversion(LaneId target) {
    return DecisionField{Kind::diversion_taken, target};
  }
  bool operator==(const DecisionField&) const = default;
};

// The broadcast record originated by an accident-blocked vehicle. The
// message id is stable across forwards and RSU relays, so receivers can
// de-duplicate every copy of the same incident report.
struct WarningMessage {
  MessageId message_id = 0;
  VehicleId origin_vehicle_id = 0;
  double origin_speed = 0.0;       // m/s, zero for accident-origin messages
  LaneId blocked_lane{};
  double incident_position = 0.0;  // m along the blocked lane's direction
  Tick created_tick = 0;
  DecisionField decision_field{};
  bool relayed_by_rsu = false;
  int hop_count = 0;

  // Canonical field-order serialization used in the event log.
  std::string to_log_string() const;
};

}  // namespace cdca

#endif  // CDCA_MESSAGE_HPP
