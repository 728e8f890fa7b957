#ifndef CDCA_COMMS_HPP
#define CDCA_COMMS_HPP

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <vector>

#include "cdca/message.hpp"

namespace cdca {

struct Vehicle;

// Roadside tower. Coverage is the long-range V2I channel and must exceed
// the V2V range.
struct Rsu {
  int id = 0;
  double position = 0.0;         // m along the main flow
  double coverage_radius = 1500.0;
};

struct TxSource {
  enum class Kind : std::uint8_t { vehicle = 0, rsu = 1 };
  Kind kind = Kind::vehicle;
  std::int64_t id = 0;

  auto operator<=>(const TxSource&) const = default;

  static TxSource from_vehicle(VehicleId id) {
    return TxSource{Kind::vehicle, id};
  }
  static TxSource from_rsu(int id) { return TxSource{Kind::rsu, id}; }
};

struct Transmission {
  WarningMessage message;
  TxSource source;
  double emit_position = 0.0;  // m along the main flow
  Tick emit_tick = 0;
};

// Per-recipient, per-tick mailbox; entries are unique by message id and
// ordered by message id.
struct Inbox {
  std::vector<WarningMessage> messages;
};

struct Deliveries {
  std::map<VehicleId, Inbox> to_vehicles;
  std::map<int, Inbox> to_rsus;

  std::size_t total_deliveries() const;
};

// Loss-free unit-disc channel, inclusive boundary.
inline bool in_v2v_range(double pos_a, double pos_b, double v2v_range) {
  return std::abs(pos_a - pos_b) <= v2v_range;
}

inline bool rsu_covers(const Rsu& rsu, double pos) {
  return std::abs(rsu.position - pos) <= rsu.coverage_radius;
}

// Delivers one tick's transmissions:
//   - vehicle-sourced: every other vehicle within v2v_range of the emit
//     position, plus every RSU whose coverage includes the emit position;
//   - RSU-sourced: every vehicle inside that RSU's coverage.
// The sender never receives its own transmission. Each inbox is
// de-duplicated by message id; when several copies of one id arrive in the
// same tick the copy from the lowest source wins (vehicles order before
// RSUs, then by id), making the result independent of input order.
// Positions are absolute road coordinates; `main_length` maps
// backward-direction vehicle progress onto them. `drop` is an optional
// per-delivery-edge drop test (returns true to drop); it is only consulted
// when non-null, so the default channel is loss-free and consumes no
// randomness.
Deliveries deliver(std::span<const Transmission> transmissions,
                   std::span<const Vehicle> vehicles,
                   std::span<const Rsu> rsus, double v2v_range,
                   double main_length,
                   const std::function<bool()>& drop = nullptr);

}  // namespace cdca

#endif  // CDCA_COMMS_HPP
