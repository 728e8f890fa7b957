#include "cdca/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cdca/log.hpp"

namespace cdca {

double following_accel(double speed, double net_gap, double approach_rate,
                       const DrivingParams& p) {
  if (!(net_gap > 0.0)) {
    throw std::domain_error("non-positive net gap");
  }
  const double v0 = std::min(p.desired_speed, p.speed_limit);
  const double desired_gap =
      p.min_gap +
      std::max(0.0, speed * p.time_headway +
                        speed * approach_rate /
                            (2.0 * std::sqrt(p.max_accel * p.comfortable_decel)));
  const double interaction =
      std::isinf(net_gap) ? 0.0 : (desired_gap / net_gap) * (desired_gap / net_gap);
  const double accel =
      p.max_accel *
      (1.0 - std::pow(speed / v0, p.accel_exponent) - interaction);
  return std::clamp(accel, -kEmergencyDecel, p.max_accel);
}

namespace {

double accel_against(const Vehicle& v, const GapView& view,
                     const DrivingParams& params) {
  if (view.net_gap <= 0.0) return -kEmergencyDecel;
  return following_accel(v.speed, view.net_gap, v.speed - view.leader_speed,
                         params);
}

double follower_accel_with_leader(const Vehicle& follower, double gap,
                                  double leader_speed) {
  if (gap <= 0.0) return -kEmergencyDecel;
  return following_accel(follower.speed, gap,
                         follower.speed - leader_speed, follower.driving);
}

}  // namespace

LaneChange lane_change_decision(const Vehicle& vehicle, LaneId target_lane,
                                std::span<const Vehicle> vehicles,
                                const LaneChangeParams& params, bool forced) {
  const GapView target = gap_view(vehicle.id, target_lane, vehicles);

  // Strictly positive gaps on both sides of the slot, or no slot at all.
  if (target.leader_id && target.net_gap <= 0.0) return LaneChange::stay;
  if (target.follower_id && target.follower_gap <= 0.0) return LaneChange::stay;

  // Safety: required deceleration of the would-be follower.
  const Vehicle* new_follower = nullptr;
  if (target.follower_id) {
    for (const Vehicle& other : vehicles) {
      if (other.id == *target.follower_id) {
        new_follower = &other;
        break;
      }
    }
  }
  double follower_after = 0.0;
  if (new_follower) {
    follower_after = follower_accel_with_leader(*new_follower,
                                                target.follower_gap,
                                                vehicle.speed);
    if (follower_after < -params.safe_decel) return LaneChange::stay;
  }
  if (forced) return LaneChange::change;

  const GapView own = gap_view(vehicle.id, vehicle.lane, vehicles);
  const double self_before = accel_against(vehicle, own, vehicle.driving);
  const GapView ahead_after{target.leader_id, target.net_gap,
                            target.leader_speed, {}, 0.0, 0.0};
  const double self_after = accel_against(vehicle, ahead_after, vehicle.driving);

  double followers_delta = 0.0;
  if (new_follower) {
    const double before = follower_accel_with_leader(
        *new_follower,
        target.follower_gap + vehicle.klass.length + target.net_gap,
        target.leader_speed);
    followers_delta += follower_after - before;
  }
  if (own.follower_id) {
    for (const Vehicle& other : vehicles) {
      if (other.id != *own.follower_id) continue;
      const double before = follower_accel_with_leader(other, own.follower_gap,
                                                       vehicle.speed);
      // After the change the old follower inherits this vehicle's leader.
      const double gap_after =
          own.follower_gap + vehicle.klass.length + own.net_gap;
      const double after =
          follower_accel_with_leader(other, gap_after, own.leader_speed);
      followers_delta += after - before;
      break;
    }
  }

  const double incentive =
      (self_after - self_before) + params.politeness * followers_delta;
  return incentive > params.changing_threshold ? LaneChange::change
                                               : LaneChange::stay;
}

void step_kinematics(Vehicle& vehicle, double accel, double dt) {
  if (vehicle.status == VehicleStatus::blocked) {
    vehicle.speed = 0.0;
    vehicle.accel = 0.0;
    return;
  }
  vehicle.accel = accel;
  vehicle.speed =
      std::clamp(vehicle.speed + accel * dt, 0.0, vehicle.max_speed());
  if (vehicle.speed < kStandstillSpeed) {
    vehicle.speed = 0.0;
  }
  vehicle.position += vehicle.speed * dt;
}

bool apply_blockage(Vehicle& vehicle) {
  if (vehicle.status == VehicleStatus::blocked) {
    log_info("apply_blockage: vehicle " + std::to_string(vehicle.id) +
             " already blocked");
    return false;
  }
  vehicle.status = VehicleStatus::blocked;
  vehicle.speed = 0.0;
  vehicle.accel = 0.0;
  return true;
}

}  // namespace cdca
