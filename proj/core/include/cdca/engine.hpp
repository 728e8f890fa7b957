#ifndef CDCA_ENGINE_HPP
#define CDCA_ENGINE_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "cdca/comms.hpp"
#include "cdca/dynamics.hpp"
#include "cdca/metrics.hpp"
#include "cdca/protocol.hpp"
#include "cdca/road.hpp"
#include "cdca/scenario.hpp"
#include "cdca/vehicle.hpp"

namespace cdca {

// Invariant breach during a run (collision, protocol violation). Carries a
// diagnostic dump of the offending tick.
class RuntimeBreachError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Deterministic 64-bit generator (splitmix64). Hand-rolled so streams do not
// depend on the standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64();
  double next_unit();  // uniform in [0, 1)

 private:
  std::uint64_t state_;
};

struct Incident {
  MessageId message_id = 0;  // 0 when CDCA is disabled
  VehicleId blocked_vehicle = 0;
  LaneId lane{};
  double position = 0.0;
  Tick start_tick = 0;
  bool cleared = false;
};

class World {
 public:
  explicit World(const ScenarioConfig& config);

  // Executes one tick with the fixed phase order:
  //   1. inject due accident events
  //   2. deliver the previous tick's transmissions
  //   3. protocol: receive / RSU receive / rebroadcast
  //   4. lane changes (forced diversions and ramp merges, then incentive;
  //      incentive changes are overtaking moves and are skipped while the
  //      vehicle directly ahead is in stop-and-go)
  //   5. car following + kinematic integration
  //   6. spawn / despawn
  //   7. metrics record + collision assertion
  void step();

  // Places a vehicle directly (scenario setup, tests). Returns its id.
  VehicleId add_vehicle(LaneId lane, double position, double speed,
                        VehicleKind kind = VehicleKind::car);

  const ScenarioConfig& config() const { return config_; }
  const RoadNetwork& network() const { return network_; }
  const std::vector<Vehicle>& vehicles() const { return vehicles_; }
  const std::vector<Rsu>& rsus() const { return rsus_; }
  const std::vector<Incident>& incidents() const { return incidents_; }
  const MetricsSeries& metrics() const { return metrics_; }
  const EventLog& events() const { return events_; }
  Tick tick() const { return tick_; }
  double now() const { return static_cast<double>(tick_) * config_.dt; }
  std::int64_t messages_total() const { return messages_total_; }
  std::int64_t diversions_total() const { return diversions_total_; }
  std::int64_t rejected_messages() const { return rejected_messages_; }

  const Vehicle* find_vehicle(VehicleId id) const;
  Vehicle* find_vehicle(VehicleId id);

  DrivingParams driving_params_for(const Vehicle& v) const;
  LaneChangeParams lane_change_params() const;

 private:
  void inject_accidents();
  void deliver_pending();
  void protocol_phase();
  void lane_change_phase();
  void dynamics_phase();
  void spawn_despawn_phase();
  void record_metrics();
  void assert_no_collision();

  bool try_lane_change(Vehicle& v, LaneId target, bool forced);
  void complete_diversion(Vehicle& v, LaneId from, LaneId to);
  bool spawn_one(LaneId lane, VehicleKind kind);
  void prefill_roads();
  double advisory_capped_speed(const Vehicle& v) const;
  bool lane_known_blocked_ahead(const Vehicle& v, LaneId lane) const;
  bool incident_cleared(MessageId id) const;
  void queue_transmission(const WarningMessage& msg, TxSource source,
                          double emit_position);
  void log_event(EventKind kind, const std::string& subject,
                 std::optional<MessageId> msg_id, const std::string& detail);

  ScenarioConfig config_;
  RoadNetwork network_;
  std::vector<Vehicle> vehicles_;
  std::vector<Rsu> rsus_;
  std::vector<RsuState> rsu_states_;
  std::vector<Transmission> pending_;   // emitted this tick, delivered next
  Deliveries inbound_;                  // delivered this tick
  std::vector<Incident> incidents_;
  std::vector<bool> accident_fired_;
  Rng rng_;
  Tick tick_ = 0;
  Tick interval_ticks_ = 2;
  Tick ttl_ticks_ = 0;
  MessageId next_message_id_ = 1;
  VehicleId next_vehicle_id_ = 1;
  std::int64_t messages_total_ = 0;
  std::int64_t diversions_total_ = 0;
  std::int64_t rejected_messages_ = 0;
  int messages_this_tick_ = 0;
  MetricsSeries metrics_;
  EventLog events_;
};

struct RunResult {
  MetricsSeries series;
  EventLog log;
  std::string config_echo;
  int blocked_final = 0;
  int congested_final = 0;
  std::int64_t messages_total = 0;
  std::int64_t diversions_total = 0;
};

// Pure entry point: validates, builds a world, advances it for the
// configured duration. Safe to call concurrently with distinct configs.
RunResult run(const ScenarioConfig& config);

}  // namespace cdca

#endif  // CDCA_ENGINE_HPP
