#ifndef CDCA_SCENARIO_HPP
#define CDCA_SCENARIO_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "cdca/road.hpp"

namespace cdca {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct AccidentEvent {
  double time = 0.0;      // s
  LaneId lane{};          // main lane
  double position = 0.0;  // m along the lane's direction of travel
};

struct RsuSpec {
  double position = 0.0;
  double coverage = 1500.0;
};

struct ScenarioConfig {
  // Traffic
  int vehicle_target = 500;
  double car_speed = 108.0 / 3.6;    // m/s (config key in km/h)
  double truck_speed = 54.0 / 3.6;   // m/s (config key in km/h)
  double truck_share = 0.2;
  double car_length = 5.0;
  double truck_length = 12.0;

  // Road
  double main_length = 10000.0;
  double ramp_length = 300.0;
  double merge_position = 2000.0;
  int lanes_per_direction = 3;

  // Driving model
  double speed_limit = 80.0 / 3.6;   // m/s (config key in km/h)
  double time_headway = 1.5;
  double car_max_accel = 1.5;
  double truck_max_accel = 1.0;
  double comfortable_decel = 2.0;
  double min_gap = 2.0;
  double accel_exponent = 4.0;
  double politeness = 0.25;
  double changing_threshold = 0.2;
  double safe_decel = 4.0;

  // Run control
  std::uint64_t seed = 1;
  double dt = 0.5;
  double duration = 600.0;
  double warmup = 60.0;
  double main_inflow = 0.9;      // veh/s across the forward main lanes
  double ramp_inflow = 0.05;     // veh/s on the on-ramp
  double backward_inflow = 0.0;  // veh/s across the backward main lanes
  bool prefill = true;           // start with steady-state traffic on the mains

  // Communications
  double v2v_range = 1000.0;
  double rsu_spacing = 2500.0;
  double rsu_coverage = 1500.0;
  std::vector<RsuSpec> rsus;  // explicit placement; overrides spacing

  // Protocol
  bool cdca_enabled = true;
  bool cessation_enabled = true;
  double rebroadcast_interval = 1.0;  // s
  int max_hops = 3;
  double lookahead = 2000.0;          // m, diversion decision window
  double advisory_speed_factor = 0.6; // advisory cap as fraction of limit
  double advisory_zone = 2000.0;      // m, advisory active within this range
  double drop_probability = 0.0;
  double incident_duration = 0.0;     // s; 0 = blocked until run end
  double message_ttl = 0.0;           // s; 0 = no expiry

  // Metrics
  double congestion_threshold = 0.0;  // m/s
  bool congestion_includes_blocked = true;

  // Echo-only field from the original tool's configuration; no physical
  // meaning here.
  double simulation_speed = 10.0;

  std::vector<AccidentEvent> accidents;
};

// Parses a key = value scenario file. Unknown keys are errors; every
// offending key is reported. Speeds given in km/h are converted on load.
ScenarioConfig load_scenario(const std::string& path);
ScenarioConfig parse_scenario_text(const std::string& text,
                                   const std::string& origin = "<string>");

// Full validation; throws ConfigError listing every violated constraint.
void validate(const ScenarioConfig& config);

// Canonical key = value serialization; parse_scenario_text round-trips it.
std::string serialize_scenario(const ScenarioConfig& config);

// RSU layout: explicit specs when given, otherwise towers every
// `rsu_spacing` metres starting at `rsu_spacing` and staying inside the
// main segment.
std::vector<RsuSpec> resolved_rsu_layout(const ScenarioConfig& config);

}  // namespace cdca

#endif  // CDCA_SCENARIO_HPP
