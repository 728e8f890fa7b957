#ifndef CDCA_GAP_HPP
#define CDCA_GAP_HPP

#include <limits>
#include <optional>
#include <span>
#include <stdexcept>

#include "cdca/road.hpp"
#include "cdca/vehicle.hpp"

namespace cdca {

inline constexpr double kNoLeaderGap = std::numeric_limits<double>::infinity();

// Nearest neighbours of a vehicle in a target lane. Gaps are
// bumper-to-bumper and clamp to zero on longitudinal overlap; the leader gap
// is +infinity when the lane is empty ahead.
struct GapView {
  std::optional<VehicleId> leader_id;
  double net_gap = kNoLeaderGap;
  double leader_speed = 0.0;
  std::optional<VehicleId> follower_id;
  double follower_gap = kNoLeaderGap;
  double follower_speed = 0.0;
};

class UnknownVehicleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Nearest leader/follower of `vehicle_id` in `target_lane`. A vehicle at the
// same position counts as a leader (overlap, zero gap). Throws
// UnknownVehicleError when the id is absent.
GapView gap_view(VehicleId vehicle_id, LaneId target_lane,
                 std::span<const Vehicle> vehicles);

// Same query for a hypothetical vehicle (used for spawn checks), described
// by front-bumper position and length.
GapView gap_view_at(double position, double length, LaneId target_lane,
                    std::span<const Vehicle> vehicles,
                    std::optional<VehicleId> exclude = std::nullopt);

}  // namespace cdca

#endif  // CDCA_GAP_HPP
