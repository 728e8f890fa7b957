#ifndef CDCA_METRICS_HPP
#define CDCA_METRICS_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cdca/message.hpp"
#include "cdca/vehicle.hpp"

namespace cdca {

struct MetricsRecord {
  double time = 0.0;
  int active_vehicles = 0;
  int congested_vehicles = 0;
  std::array<int, 3> per_lane_congested{};  // forward lanes 1..3
  double mean_speed = 0.0;
  int messages_sent_this_tick = 0;
  std::int64_t messages_cumulative = 0;
  std::int64_t diversions_cumulative = 0;
};

using MetricsSeries = std::vector<MetricsRecord>;

enum class EventKind : std::uint8_t {
  accident,
  broadcast,
  receive,
  diversion,
  cessation,
  spawn,
  despawn,
};

const char* to_string(EventKind kind);

struct EventLogEntry {
  double time = 0.0;
  EventKind kind = EventKind::spawn;
  std::string subject;  // "v<id>" or "r<id>"
  std::optional<MessageId> message_id;
  std::string detail;   // comma-free
};

using EventLog = std::vector<EventLogEntry>;

// Number of on-road vehicles with speed <= threshold. Blocked vehicles count
// unless include_blocked is false.
int congestion_count(std::span<const Vehicle> vehicles, double threshold,
                     bool include_blocked = true);

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr const char* kMetricsCsvHeader =
    "t,active,congested,cong_l1,cong_l2,cong_l3,mean_speed,msgs_tick,"
    "msgs_total,diversions";
inline constexpr const char* kEventsCsvHeader = "t,kind,subject,message,detail";

// Writes metrics.csv, events.csv and config_echo.cfg into out_dir. UTF-8,
// LF line endings, floats fixed to three decimals; byte-stable for equal
// (config, seed) runs. Throws IoError.
void write_outputs(const MetricsSeries& series, const EventLog& log,
                   const std::string& config_echo, const std::string& out_dir);

std::string metrics_to_csv(const MetricsSeries& series);
std::string events_to_csv(const EventLog& log);

}  // namespace cdca

#endif  // CDCA_METRICS_HPP
