#include "cdca/road.hpp"

#include <sstream>

#include "cdca/scenario.hpp"

namespace cdca {

std::string lane_to_string(LaneId lane) {
  std::string out(1, lane.direction == Direction::forward ? 'F' : 'B');
  if (lane.is_ramp()) {
    out += 'R';
  } else {
    out += static_cast<char>('0' + lane.index);
  }
  return out;
}

LaneId lane_from_string(const std::string& text) {
  if (text.size() != 2 || (text[0] != 'F' && text[0] != 'B')) {
    throw std::invalid_argument("bad lane: '" + text + "'");
  }
  Direction dir = text[0] == 'F' ? Direction::forward : Direction::backward;
  if (text[1] == 'R') return LaneId::ramp(dir);
  int index = text[1] - '0';
  if (index < 1 || index > 3) {
    throw std::invalid_argument("bad lane index: '" + text + "'");
  }
  return LaneId::main(dir, index);
}

bool RoadNetwork::ramp_adjacent_at(double s, Direction direction) const {
  if (direction != Direction::forward) return false;
  return s >= ramp_begin() && s <= ramp_end();
}

RoadNetwork build_network(const ScenarioConfig& config) {
  std::ostringstream problems;
  if (config.main_length <= 0.0) problems << " main_length";
  if (config.ramp_length < 0.0) problems << " ramp_length";
  if (config.merge_position < 0.0 ||
      config.merge_position + config.ramp_length > config.main_length)
    problems << " merge_position";
  if (config.lanes_per_direction != 3) problems << " lanes_per_direction";
  if (!problems.str().empty()) {
    throw InvalidGeometryError("invalid geometry:" + problems.str());
  }
  RoadNetwork net;
  net.main_length = config.main_length;
  net.ramp_length = config.ramp_length;
  net.merge_position = config.merge_position;
  net.lanes_per_direction = config.lanes_per_direction;
  net.directions = 2;
  return net;
}

std::vector<LaneId> adjacent_lanes(LaneId lane) {
  if (lane.is_ramp()) {
    return {LaneId::main(lane.direction, 3)};
  }
  std::vector<LaneId> out;
  if (lane.index > 1) out.push_back(LaneId::main(lane.direction, lane.index - 1));
  if (lane.index < 3) out.push_back(LaneId::main(lane.direction, lane.index + 1));
  return out;
}

}  // namespace cdca
