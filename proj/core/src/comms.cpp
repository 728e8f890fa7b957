#include "cdca/comms.hpp"

#include <algorithm>

#include "cdca/vehicle.hpp"

namespace cdca {

std::size_t Deliveries::total_deliveries() const {
  std::size_t n = 0;
  for (const auto& [id, inbox] : to_vehicles) n += inbox.messages.size();
  for (const auto& [id, inbox] : to_rsus) n += inbox.messages.size();
  return n;
}

namespace {

struct Candidate {
  const Transmission* tx;
};

// Keeps the copy from the lowest source per message id.
void admit(std::map<MessageId, const Transmission*>& slot,
           const Transmission& tx) {
  auto [it, inserted] = slot.try_emplace(tx.message.message_id, &tx);
  if (!inserted && tx.source < it->second->source) {
    it->second = &tx;
  }
}

Inbox finalize(const std::map<MessageId, const Transmission*>& slot) {
  Inbox inbox;
  inbox.messages.reserve(slot.size());
  for (const auto& [id, tx] : slot) inbox.messages.push_back(tx->message);
  return inbox;
}

}  // namespace

Deliveries deliver(std::span<const Transmission> transmissions,
                   std::span<const Vehicle> vehicles,
                   std::span<const Rsu> rsus, double v2v_range,
                   double main_length, const std::function<bool()>& drop) {
  // Winning copy per (recipient, message id); std::map keeps recipients and
  // inbox entries in canonical order.
  std::map<VehicleId, std::map<MessageId, const Transmission*>> veh_slots;
  std::map<int, std::map<MessageId, const Transmission*>> rsu_slots;

  for (const Transmission& tx : transmissions) {
    for (const Vehicle& v : vehicles) {
      if (tx.source.kind == TxSource::Kind::vehicle && tx.source.id == v.id)
        continue;  // sender never hears itself
      const double pos = absolute_position(v, main_length);
      bool reachable = false;
      if (tx.source.kind == TxSource::Kind::vehicle) {
        reachable = in_v2v_range(tx.emit_position, pos, v2v_range);
      } else {
        for (const Rsu& r : rsus) {
          if (r.id == tx.source.id) {
            reachable = rsu_covers(r, pos);
            break;
          }
        }
      }
      if (!reachable) continue;
      if (drop && drop()) continue;
      admit(veh_slots[v.id], tx);
    }
    if (tx.source.kind == TxSource::Kind::vehicle) {
      for (const Rsu& r : rsus) {
        if (!rsu_covers(r, tx.emit_position)) continue;
        if (drop && drop()) continue;
        admit(rsu_slots[r.id], tx);
      }
    }
  }

  Deliveries out;
  for (const auto& [id, slot] : veh_slots) out.to_vehicles[id] = finalize(slot);
  for (const auto& [id, slot] : rsu_slots) out.to_rsus[id] = finalize(slot);
  return out;
}

}  // namespace cdca
