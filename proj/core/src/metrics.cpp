#include "cdca/metrics.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace cdca {
namespace {

// Fixed three-decimal formatting keeps the CSV byte-stable across platforms.
std::string fixed3(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("short write to " + path.string());
}

}  // namespace

const char* to_string(EventKind kind) {
  switch (kind) {
    case EventKind::accident: return "accident";
    case EventKind::broadcast: return "broadcast";
    case EventKind::receive: return "receive";
    case EventKind::diversion: return "diversion";
    case EventKind::cessation: return "cessation";
    case EventKind::spawn: return "spawn";
    case EventKind::despawn: return "despawn";
  }
  return "?";
}

int congestion_count(std::span<const Vehicle> vehicles, double threshold,
                     bool include_blocked) {
  int count = 0;
  for (const Vehicle& v : vehicles) {
    if (v.status == VehicleStatus::blocked && !include_blocked) continue;
    if (v.speed <= threshold) ++count;
  }
  return count;
}

std::string metrics_to_csv(const MetricsSeries& series) {
  std::ostringstream out;
  out << kMetricsCsvHeader << "\n";
  for (const MetricsRecord& r : series) {
    out << fixed3(r.time) << ',' << r.active_vehicles << ','
        << r.congested_vehicles << ',' << r.per_lane_congested[0] << ','
        << r.per_lane_congested[1] << ',' << r.per_lane_congested[2] << ','
        << fixed3(r.mean_speed) << ',' << r.messages_sent_this_tick << ','
        << r.messages_cumulative << ',' << r.diversions_cumulative << "\n";
  }
  return out.str();
}

std::string events_to_csv(const EventLog& log) {
  std::ostringstream out;
  out << kEventsCsvHeader << "\n";
  for (const EventLogEntry& e : log) {
    out << fixed3(e.time) << ',' << to_string(e.kind) << ',' << e.subject
        << ',';
    if (e.message_id) out << *e.message_id;
    out << ',' << e.detail << "\n";
  }
  return out.str();
}

void write_outputs(const MetricsSeries& series, const EventLog& log,
                   const std::string& config_echo,
                   const std::string& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir + ": " + ec.message());
  const std::filesystem::path dir(out_dir);
  write_file(dir / "metrics.csv", metrics_to_csv(series));
  write_file(dir / "events.csv", events_to_csv(log));
  write_file(dir / "config_echo.cfg", config_echo);
}

}  // namespace cdca
