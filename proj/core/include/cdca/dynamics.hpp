#ifndef CDCA_DYNAMICS_HPP
#define CDCA_DYNAMICS_HPP

#include <span>

#include "cdca/gap.hpp"
#include "cdca/vehicle.hpp"

namespace cdca {

// Deceleration applied when a caller reports a non-positive gap; also the
// lower bound on any commanded acceleration.
inline constexpr double kEmergencyDecel = 8.0;  // m/s^2

// Speeds below this collapse to a full stop (brake hold). Without the snap
// the car-following law only creeps asymptotically toward standstill and a
// queued vehicle would never register as stopped.
inline constexpr double kStandstillSpeed = 0.01;  // m/s

// Intelligent-Driver-Model style car-following law:
//   s* = s0 + max(0, v*T + v*dv / (2*sqrt(a_max*b)))
//   a  = a_max * (1 - (v/v0)^delta - (s*/s)^2)
// clamped to [-kEmergencyDecel, a_max]. `approach_rate` is v - v_leader.
// Throws std::domain_error on a non-positive gap; pass kNoLeaderGap for an
// empty lane.
double following_accel(double speed, double net_gap, double approach_rate,
                       const DrivingParams& params);

enum class LaneChange : std::uint8_t { stay, change };

// Incentive-based lane change with a safety veto on the would-be follower:
//   change iff follower_decel <= safe_decel and
//     own_gain + politeness * (followers' gain) > changing_threshold.
// `forced` drops the incentive test (diversions, ramp merges); the safety
// veto and the strict positive-gap requirement always apply.
LaneChange lane_change_decision(const Vehicle& vehicle, LaneId target_lane,
                                std::span<const Vehicle> vehicles,
                                const LaneChangeParams& params,
                                bool forced = false);

// Semi-implicit update: speed first, then position from the new speed.
// Speed clamps to [0, min(v0, limit)] and snaps to 0 below kStandstillSpeed;
// blocked vehicles do not move.
void step_kinematics(Vehicle& vehicle, double accel, double dt);

// Accident blockage: speed pinned to zero, status = blocked. Returns false
// (no-op) when the vehicle is already blocked.
bool apply_blockage(Vehicle& vehicle);

}  // namespace cdca

#endif  // CDCA_DYNAMICS_HPP
