#ifndef CDCA_VEHICLE_HPP
#define CDCA_VEHICLE_HPP

#include <algorithm>
#include <cstdint>
#include <vector>

#include "cdca/message.hpp"
#include "cdca/protocol.hpp"
#include "cdca/road.hpp"

namespace cdca {

enum class VehicleKind : std::uint8_t { car = 0, truck = 1 };

struct VehicleClass {
  VehicleKind kind = VehicleKind::car;
  double desired_speed = 30.0;  // m/s
  double length = 5.0;          // m
};

// Longitudinal car-following parameters.
struct DrivingParams {
  double desired_speed = 30.0;     // v0, m/s
  double time_headway = 1.5;       // T, s
  double max_accel = 1.5;          // a_max, m/s^2
  double comfortable_decel = 2.0;  // b, m/s^2
  double min_gap = 2.0;            // s0, m
  double accel_exponent = 4.0;     // delta
  double speed_limit = 80.0 / 3.6; // imposed limit, m/s
};

struct LaneChangeParams {
  double politeness = 0.25;         // p
  double changing_threshold = 0.2;  // minimum net incentive, m/s^2
  double safe_decel = 4.0;          // b_safe, veto bound on the new follower
};

enum class VehicleStatus : std::uint8_t { active, blocked, diverting };

const char* to_string(VehicleStatus status);

struct Vehicle {
  VehicleId id = 0;
  VehicleClass klass{};
  double position = 0.0;  // front bumper, m along the direction of travel
  LaneId lane{};
  double speed = 0.0;     // m/s
  double accel = 0.0;     // m/s^2
  DrivingParams driving{};
  VehicleStatus status = VehicleStatus::active;
  ProtocolState protocol{};

  double rear() const { return position - klass.length; }
  double max_speed() const {
    return std::min(driving.desired_speed, driving.speed_limit);
  }
};

// Vehicle positions are progress along the direction of travel; radio
// geometry works in absolute road coordinates.
inline double absolute_position(const Vehicle& v, double main_length) {
  return v.lane.direction == Direction::forward ? v.position
                                                : main_length - v.position;
}

}  // namespace cdca

#endif  // CDCA_VEHICLE_HPP
