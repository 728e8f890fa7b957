#ifndef CDCA_ROAD_HPP
#define CDCA_ROAD_HPP

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace cdca {

struct ScenarioConfig;

enum class Direction : std::uint8_t { forward = 0, backward = 1 };

// Main-carriageway lanes are indexed 1 (upper), 2 (middle), 3 (lower).
// The on-ramp acceleration lane carries the distinguished index below; it
// is not a main lane and never appears in a warning message.
inline constexpr int kRampIndex = 4;

struct LaneId {
  Direction direction = Direction::forward;
  int index = 1;

  auto operator<=>(const LaneId&) const = default;

  bool is_main() const { return index >= 1 && index <= 3; }
  bool is_ramp() const { return index == kRampIndex; }

  static LaneId main(Direction dir, int index) { return LaneId{dir, index}; }
  static LaneId ramp(Direction dir = Direction::forward) {
    return LaneId{dir, kRampIndex};
  }
};

std::string lane_to_string(LaneId lane);
// Parses "F1".."F3", "B1".."B3", "FR", "BR". Throws std::invalid_argument.
LaneId lane_from_string(const std::string& text);

class InvalidGeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Directed highway: a main carriageway per direction plus one on-ramp
// acceleration lane that runs alongside lane 3 over
// [merge_position, merge_position + ramp_length].
struct RoadNetwork {
  double main_length = 10000.0;   // m
  double ramp_length = 300.0;     // m
  double merge_position = 2000.0; // m, where the ramp joins the main flow
  int lanes_per_direction = 3;
  int directions = 2;

  double ramp_begin() const { return merge_position; }
  double ramp_end() const { return merge_position + ramp_length; }

  bool valid_lane(LaneId lane) const {
    return lane.is_ramp() ||
           (lane.index >= 1 && lane.index <= lanes_per_direction);
  }
  // True when the ramp runs alongside lane 3 of `direction` at position s.
  bool ramp_adjacent_at(double s, Direction direction = Direction::forward) const;
};

// Throws InvalidGeometryError on non-positive lengths or a merge point
// outside the main segment.
RoadNetwork build_network(const ScenarioConfig& config);

// Main lanes reachable by one lane change in the same direction, ordered by
// index. The ramp's only neighbour is lane 3; lane 3 gains the ramp as a
// neighbour only within the merge span, which gap queries handle separately.
std::vector<LaneId> adjacent_lanes(LaneId lane);

}  // namespace cdca

#endif  // CDCA_ROAD_HPP
