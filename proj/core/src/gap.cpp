#include "cdca/gap.hpp"

#include <algorithm>

namespace cdca {

namespace {

// Leader = lowest (position, id) at or ahead of `position`; follower =
// highest (position, id) strictly behind. Ties at equal position count as
// leaders, which the overlap clamp turns into a zero gap.
GapView scan(double position, double length, LaneId target_lane,
             std::span<const Vehicle> vehicles,
             std::optional<VehicleId> exclude) {
  GapView view;
  const Vehicle* leader = nullptr;
  const Vehicle* follower = nullptr;
  for (const Vehicle& other : vehicles) {
    if (other.lane != target_lane) continue;
    if (exclude && other.id == *exclude) continue;
    if (other.position >= position) {
      if (!leader || other.position < leader->position ||
          (other.position == leader->position && other.id < leader->id)) {
        leader = &other;
      }
    } else {
      if (!follower || other.position > follower->position ||
          (other.position == follower->position && other.id < follower->id)) {
        follower = &other;
      }
    }
  }
  if (leader) {
    view.leader_id = leader->id;
    view.net_gap = std::max(0.0, leader->rear() - position);
    view.leader_speed = leader->speed;
  }
  if (follower) {
    view.follower_id = follower->id;
    view.follower_gap = std::max(0.0, position - length - follower->position);
    view.follower_speed = follower->speed;
  }
  return view;
}

}  // namespace

GapView gap_view(VehicleId vehicle_id, LaneId target_lane,
                 std::span<const Vehicle> vehicles) {
  const Vehicle* self = nullptr;
  for (const Vehicle& v : vehicles) {
    if (v.id == vehicle_id) {
      self = &v;
      break;
    }
  }
  if (!self) {
    throw UnknownVehicleError("unknown vehicle id " +
                              std::to_string(vehicle_id));
  }
  return scan(self->position, self->klass.length, target_lane, vehicles,
              vehicle_id);
}

GapView gap_view_at(double position, double length, LaneId target_lane,
                    std::span<const Vehicle> vehicles,
                    std::optional<VehicleId> exclude) {
  return scan(position, length, target_lane, vehicles, exclude);
}

}  // namespace cdca
