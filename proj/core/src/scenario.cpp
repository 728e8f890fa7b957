#include "cdca/scenario.hpp"

#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "cdca/units.hpp"

namespace cdca {
namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

// Collects every problem instead of stopping at the first one, so a bad
// file is fixable in one pass.
struct Issues {
  std::vector<std::string> items;

  void add(std::string msg) { items.push_back(std::move(msg)); }
  bool empty() const { return items.empty(); }
  std::string joined(const std::string& origin) const {
    std::string out = origin + ": ";
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (i > 0) out += "; ";
      out += items[i];
    }
    return out;
  }
};

bool parse_double(const std::string& text, double& out) {
  const std::string t = trim(text);
  if (t.empty()) return false;
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size() || errno == ERANGE) return false;
  out = v;
  return true;
}

bool parse_int(const std::string& text, long long& out) {
  const std::string t = trim(text);
  if (t.empty()) return false;
  errno = 0;
  char* end = nullptr;
  const long long v = std::strtoll(t.c_str(), &end, 10);
  if (end != t.c_str() + t.size() || errno == ERANGE) return false;
  out = v;
  return true;
}

bool parse_bool(const std::string& text, bool& out) {
  const std::string t = trim(text);
  if (t == "true" || t == "on" || t == "yes" || t == "1") {
    out = true;
    return true;
  }
  if (t == "false" || t == "off" || t == "no" || t == "0") {
    out = false;
    return true;
  }
  return false;
}

// Accepts "1".."3" (forward main lane) as well as the full "F1"/"B2" form.
bool parse_lane(const std::string& text, LaneId& out) {
  const std::string t = trim(text);
  if (t.size() == 1 && t[0] >= '1' && t[0] <= '9') {
    out = LaneId{Direction::forward, t[0] - '0'};
    return true;
  }
  try {
    out = lane_from_string(t);
    return true;
  } catch (const std::invalid_argument&) {
    return false;
  }
}

// Splits "time=120 lane=1 position=5000" into its k=v tokens.
std::map<std::string, std::string> parse_fields(const std::string& value,
                                                Issues& issues,
                                                const std::string& where) {
  std::map<std::string, std::string> fields;
  std::istringstream in(value);
  std::string token;
  while (in >> token) {
    const std::size_t eq = token.find('=');
    if (eq == std::string::npos || eq == 0) {
      issues.add(where + ": expected field=value, got '" + token + "'");
      continue;
    }
    fields[token.substr(0, eq)] = token.substr(eq + 1);
  }
  return fields;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

ScenarioConfig parse_scenario_text(const std::string& text,
                                   const std::string& origin) {
  ScenarioConfig cfg;
  Issues issues;

  using DoubleField = double ScenarioConfig::*;
  using IntField = int ScenarioConfig::*;
  using BoolField = bool ScenarioConfig::*;
  // Speed keys carry the unit in their name and land in the m/s fields.
  static const std::map<std::string, DoubleField> kKmhKeys = {
      {"car_speed_kmh", &ScenarioConfig::car_speed},
      {"truck_speed_kmh", &ScenarioConfig::truck_speed},
      {"speed_limit_kmh", &ScenarioConfig::speed_limit},
  };
  static const std::map<std::string, DoubleField> kDoubleKeys = {
      {"truck_share", &ScenarioConfig::truck_share},
      {"car_length", &ScenarioConfig::car_length},
      {"truck_length", &ScenarioConfig::truck_length},
      {"main_length", &ScenarioConfig::main_length},
      {"ramp_length", &ScenarioConfig::ramp_length},
      {"merge_position", &ScenarioConfig::merge_position},
      {"time_headway", &ScenarioConfig::time_headway},
      {"car_max_accel", &ScenarioConfig::car_max_accel},
      {"truck_max_accel", &ScenarioConfig::truck_max_accel},
      {"comfortable_decel", &ScenarioConfig::comfortable_decel},
      {"min_gap", &ScenarioConfig::min_gap},
      {"accel_exponent", &ScenarioConfig::accel_exponent},
      {"politeness", &ScenarioConfig::politeness},
      {"changing_threshold", &ScenarioConfig::changing_threshold},
      {"safe_decel", &ScenarioConfig::safe_decel},
      {"dt", &ScenarioConfig::dt},
      {"duration", &ScenarioConfig::duration},
      {"warmup", &ScenarioConfig::warmup},
      {"main_inflow", &ScenarioConfig::main_inflow},
      {"ramp_inflow", &ScenarioConfig::ramp_inflow},
      {"backward_inflow", &ScenarioConfig::backward_inflow},
      {"v2v_range", &ScenarioConfig::v2v_range},
      {"rsu_spacing", &ScenarioConfig::rsu_spacing},
      {"rsu_coverage", &ScenarioConfig::rsu_coverage},
      {"rebroadcast_interval", &ScenarioConfig::rebroadcast_interval},
      {"lookahead", &ScenarioConfig::lookahead},
      {"advisory_speed_factor", &ScenarioConfig::advisory_speed_factor},
      {"advisory_zone", &ScenarioConfig::advisory_zone},
      {"drop_probability", &ScenarioConfig::drop_probability},
      {"incident_duration", &ScenarioConfig::incident_duration},
      {"message_ttl", &ScenarioConfig::message_ttl},
      {"congestion_threshold", &ScenarioConfig::congestion_threshold},
      {"simulation_speed", &ScenarioConfig::simulation_speed},
  };
  static const std::map<std::string, IntField> kIntKeys = {
      {"vehicle_target", &ScenarioConfig::vehicle_target},
      {"lanes_per_direction", &ScenarioConfig::lanes_per_direction},
      {"max_hops", &ScenarioConfig::max_hops},
  };
  static const std::map<std::string, BoolField> kBoolKeys = {
      {"cdca_enabled", &ScenarioConfig::cdca_enabled},
      {"cessation_enabled", &ScenarioConfig::cessation_enabled},
      {"congestion_includes_blocked",
       &ScenarioConfig::congestion_includes_blocked},
      {"prefill", &ScenarioConfig::prefill},
  };

  std::vector<std::string> unknown;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::size_t hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(line_no);

    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      issues.add(where + ": expected key = value");
      continue;
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      issues.add(where + ": empty key");
      continue;
    }

    if (key == "seed") {
      errno = 0;
      char* end = nullptr;
      const unsigned long long v = std::strtoull(value.c_str(), &end, 10);
      if (end != value.c_str() + value.size() || value.empty() ||
          errno == ERANGE) {
        issues.add(where + ": seed: bad unsigned integer '" + value + "'");
      } else {
        cfg.seed = v;
      }
      continue;
    }
    if (key == "accident") {
      auto fields = parse_fields(value, issues, where + ": accident");
      AccidentEvent ev;
      bool ok = fields.count("time") && parse_double(fields["time"], ev.time);
      ok = ok && fields.count("lane") && parse_lane(fields["lane"], ev.lane);
      ok = ok && fields.count("position") &&
           parse_double(fields["position"], ev.position);
      if (!ok) {
        issues.add(where + ": accident needs time=, lane=, position=");
      } else {
        cfg.accidents.push_back(ev);
      }
      continue;
    }
    if (key == "rsu") {
      auto fields = parse_fields(value, issues, where + ": rsu");
      RsuSpec spec;
      spec.coverage = cfg.rsu_coverage;
      const bool pos_ok =
          fields.count("position") && parse_double(fields["position"], spec.position);
      bool cov_ok = true;
      if (fields.count("coverage")) {
        cov_ok = parse_double(fields["coverage"], spec.coverage);
      }
      if (!pos_ok || !cov_ok) {
        issues.add(where + ": rsu needs position= (and optional coverage=)");
      } else {
        cfg.rsus.push_back(spec);
      }
      continue;
    }

    if (auto it = kKmhKeys.find(key); it != kKmhKeys.end()) {
      double v = 0.0;
      if (parse_double(value, v)) {
        cfg.*(it->second) = kmh_to_ms(v);
      } else {
        issues.add(where + ": " + key + ": bad number '" + value + "'");
      }
      continue;
    }
    if (auto it = kDoubleKeys.find(key); it != kDoubleKeys.end()) {
      double v = 0.0;
      if (parse_double(value, v)) {
        cfg.*(it->second) = v;
      } else {
        issues.add(where + ": " + key + ": bad number '" + value + "'");
      }
      continue;
    }
    if (auto it = kIntKeys.find(key); it != kIntKeys.end()) {
      long long v = 0;
      if (parse_int(value, v)) {
        cfg.*(it->second) = static_cast<int>(v);
      } else {
        issues.add(where + ": " + key + ": bad integer '" + value + "'");
      }
      continue;
    }
    if (auto it = kBoolKeys.find(key); it != kBoolKeys.end()) {
      bool v = false;
      if (parse_bool(value, v)) {
        cfg.*(it->second) = v;
      } else {
        issues.add(where + ": " + key + ": bad boolean '" + value + "'");
      }
      continue;
    }
    unknown.push_back(key);
  }

  if (!unknown.empty()) {
    std::string msg = "unknown key(s):";
    for (const std::string& k : unknown) msg += " " + k;
    issues.add(msg);
  }
  if (!issues.empty()) throw ConfigError(issues.joined(origin));

  validate(cfg);
  return cfg;
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path + ": cannot open scenario file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario_text(buf.str(), path);
}

void validate(const ScenarioConfig& c) {
  Issues issues;
  auto require = [&](bool ok, const std::string& msg) {
    if (!ok) issues.add(msg);
  };

  require(c.vehicle_target > 0, "vehicle_target must be > 0");
  require(c.car_speed > 0, "car_speed_kmh must be > 0");
  require(c.truck_speed > 0, "truck_speed_kmh must be > 0");
  require(c.speed_limit > 0, "speed_limit_kmh must be > 0");
  require(c.truck_share >= 0 && c.truck_share <= 1,
          "truck_share must be in [0,1]");
  require(c.car_length > 0, "car_length must be > 0");
  require(c.truck_length > 0, "truck_length must be > 0");

  require(c.main_length > 0, "main_length must be > 0");
  require(c.ramp_length >= 0, "ramp_length must be >= 0");
  require(c.merge_position >= 0 &&
              c.merge_position + c.ramp_length <= c.main_length,
          "ramp must lie inside the main segment");
  require(c.lanes_per_direction == 3, "lanes_per_direction must be 3");

  require(c.time_headway > 0, "time_headway must be > 0");
  require(c.car_max_accel > 0, "car_max_accel must be > 0");
  require(c.truck_max_accel > 0, "truck_max_accel must be > 0");
  require(c.comfortable_decel > 0, "comfortable_decel must be > 0");
  require(c.min_gap >= 0, "min_gap must be >= 0");
  require(c.accel_exponent > 0, "accel_exponent must be > 0");
  require(c.politeness >= 0 && c.politeness <= 1,
          "politeness must be in [0,1]");
  require(c.changing_threshold >= 0, "changing_threshold must be >= 0");
  require(c.safe_decel > 0, "safe_decel must be > 0");

  require(c.dt > 0, "dt must be > 0");
  require(c.duration > 0, "duration must be > 0");
  require(c.warmup >= 0 && c.warmup <= c.duration,
          "warmup must be in [0, duration]");
  require(c.main_inflow >= 0, "main_inflow must be >= 0");
  require(c.ramp_inflow >= 0, "ramp_inflow must be >= 0");
  require(c.backward_inflow >= 0, "backward_inflow must be >= 0");

  require(c.v2v_range > 0, "v2v_range must be > 0");
  require(c.rsu_spacing > 0, "rsu_spacing must be > 0");
  require(c.rsu_coverage > 0, "rsu_coverage must be > 0");
  for (std::size_t i = 0; i < c.rsus.size(); ++i) {
    const RsuSpec& r = c.rsus[i];
    require(r.position >= 0 && r.position <= c.main_length,
            "rsu[" + std::to_string(i) + "] position outside the road");
    require(r.coverage > 0,
            "rsu[" + std::to_string(i) + "] coverage must be > 0");
  }

  require(c.rebroadcast_interval > 0, "rebroadcast_interval must be > 0");
  require(c.max_hops >= 0, "max_hops must be >= 0");
  require(c.lookahead > 0, "lookahead must be > 0");
  require(c.advisory_speed_factor > 0 && c.advisory_speed_factor <= 1,
          "advisory_speed_factor must be in (0,1]");
  require(c.advisory_zone > 0, "advisory_zone must be > 0");
  require(c.drop_probability >= 0 && c.drop_probability <= 1,
          "drop_probability must be in [0,1]");
  require(c.incident_duration >= 0, "incident_duration must be >= 0");
  require(c.message_ttl >= 0, "message_ttl must be >= 0");
  require(c.congestion_threshold >= 0, "congestion_threshold must be >= 0");

  for (std::size_t i = 0; i < c.accidents.size(); ++i) {
    const AccidentEvent& ev = c.accidents[i];
    const std::string tag = "accident[" + std::to_string(i) + "]";
    require(ev.time >= 0 && ev.time < c.duration,
            tag + " time must be in [0, duration)");
    require(ev.lane.is_main() && ev.lane.index >= 1 &&
                ev.lane.index <= c.lanes_per_direction,
            tag + " lane must be a main lane");
    require(ev.position >= 0 && ev.position <= c.main_length,
            tag + " position outside the road");
  }

  if (!issues.empty()) throw ConfigError(issues.joined("config"));
}

std::string serialize_scenario(const ScenarioConfig& c) {
  std::ostringstream out;
  auto kv = [&](const char* key, const std::string& value) {
    out << key << " = " << value << "\n";
  };
  auto kvd = [&](const char* key, double v) { kv(key, format_double(v)); };
  auto kvi = [&](const char* key, long long v) { kv(key, std::to_string(v)); };
  auto kvb = [&](const char* key, bool v) { kv(key, v ? "true" : "false"); };

  out << "# traffic\n";
  kvi("vehicle_target", c.vehicle_target);
  kvd("car_speed_kmh", ms_to_kmh(c.car_speed));
  kvd("truck_speed_kmh", ms_to_kmh(c.truck_speed));
  kvd("truck_share", c.truck_share);
  kvd("car_length", c.car_length);
  kvd("truck_length", c.truck_length);
  out << "\n# road\n";
  kvd("main_length", c.main_length);
  kvd("ramp_length", c.ramp_length);
  kvd("merge_position", c.merge_position);
  kvi("lanes_per_direction", c.lanes_per_direction);
  out << "\n# driving model\n";
  kvd("speed_limit_kmh", ms_to_kmh(c.speed_limit));
  kvd("time_headway", c.time_headway);
  kvd("car_max_accel", c.car_max_accel);
  kvd("truck_max_accel", c.truck_max_accel);
  kvd("comfortable_decel", c.comfortable_decel);
  kvd("min_gap", c.min_gap);
  kvd("accel_exponent", c.accel_exponent);
  kvd("politeness", c.politeness);
  kvd("changing_threshold", c.changing_threshold);
  kvd("safe_decel", c.safe_decel);
  out << "\n# run control\n";
  kv("seed", std::to_string(c.seed));
  kvd("dt", c.dt);
  kvd("duration", c.duration);
  kvd("warmup", c.warmup);
  kvd("main_inflow", c.main_inflow);
  kvd("ramp_inflow", c.ramp_inflow);
  kvd("backward_inflow", c.backward_inflow);
  kvb("prefill", c.prefill);
  out << "\n# communications\n";
  kvd("v2v_range", c.v2v_range);
  kvd("rsu_spacing", c.rsu_spacing);
  kvd("rsu_coverage", c.rsu_coverage);
  for (const RsuSpec& r : c.rsus) {
    out << "rsu = position=" << format_double(r.position)
        << " coverage=" << format_double(r.coverage) << "\n";
  }
  out << "\n# protocol\n";
  kvb("cdca_enabled", c.cdca_enabled);
  kvb("cessation_enabled", c.cessation_enabled);
  kvd("rebroadcast_interval", c.rebroadcast_interval);
  kvi("max_hops", c.max_hops);
  kvd("lookahead", c.lookahead);
  kvd("advisory_speed_factor", c.advisory_speed_factor);
  kvd("advisory_zone", c.advisory_zone);
  kvd("drop_probability", c.drop_probability);
  kvd("incident_duration", c.incident_duration);
  kvd("message_ttl", c.message_ttl);
  out << "\n# metrics\n";
  kvd("congestion_threshold", c.congestion_threshold);
  kvb("congestion_includes_blocked", c.congestion_includes_blocked);
  kvd("simulation_speed", c.simulation_speed);
  if (!c.accidents.empty()) out << "\n# events\n";
  for (const AccidentEvent& ev : c.accidents) {
    out << "accident = time=" << format_double(ev.time)
        << " lane=" << lane_to_string(ev.lane)
        << " position=" << format_double(ev.position) << "\n";
  }
  return out.str();
}

std::vector<RsuSpec> resolved_rsu_layout(const ScenarioConfig& c) {
  if (!c.rsus.empty()) return c.rsus;
  std::vector<RsuSpec> layout;
  for (double pos = c.rsu_spacing; pos < c.main_length;
       pos += c.rsu_spacing) {
    layout.push_back(RsuSpec{pos, c.rsu_coverage});
  }
  return layout;
}

}  // namespace cdca
