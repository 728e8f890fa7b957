#include "cdca/message.hpp"

#include <cstdio>

#include "cdca/vehicle.hpp"

namespace cdca {

const char* to_string(VehicleStatus status) {
  switch (status) {
    case VehicleStatus::active: return "active";
    case VehicleStatus::blocked: return "blocked";
    case VehicleStatus::diverting: return "diverting";
  }
  return "?";
}

std::string WarningMessage::to_log_string() const {
  char buf[256];
  std::string decision = "none";
  if (decision_field.kind == DecisionField::Kind::diversion_taken) {
    decision = "diversion_taken:" + lane_to_string(decision_field.target_lane);
  }
  std::snprintf(buf, sizeof(buf),
                "id=%lld origin=v%lld speed=%.3f lane=%s pos=%.3f tick=%lld "
                "decision=%s rsu=%d hops=%d",
                static_cast<long long>(message_id),
                static_cast<long long>(origin_vehicle_id), origin_speed,
                lane_to_string(blocked_lane).c_str(), incident_position,
                static_cast<long long>(created_tick), decision.c_str(),
                relayed_by_rsu ? 1 : 0, hop_count);
  return buf;
}

}  // namespace cdca
