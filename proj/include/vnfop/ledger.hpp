#pragma once

#include <cstddef>
#include <set>
#include <vector>

#include "vnfop/augmented.hpp"

namespace vnfop {

// Capacity comparison with a small absolute/relative slack for accumulated
// floating point error.
inline bool FitsWithin(double used, double capacity) {
  return used <= capacity + 1e-9 * std::max(1.0, std::abs(capacity));
}

// Committed loads on slots, servers and links. Supports checkpoint/rollback
// so that search code can undo tentative commitments exactly.
class ResourceLedger {
 public:
  explicit ResourceLedger(const AugmentedNetwork& net)
      : kinds_(net.kind_count()),
        slot_active_(net.slot_count(), 0),
        slot_load_(net.slot_count(), 0.0),
        server_used_(static_cast<std::size_t>(net.topology().server_count()) *
                         net.kind_count(),
                     0.0),
        server_active_slots_(net.topology().server_count(), 0),
        link_load_(net.topology().link_count(), 0.0) {}

  bool slot_active(int m) const { return slot_active_[m] != 0; }
  double slot_load(int m) const { return slot_load_[m]; }
  double server_used(int server, int kind) const {
    return server_used_[server * kinds_ + kind];
  }
  int server_active_slots(int server) const {
    return server_active_slots_[server];
  }
  bool server_active(int server) const {
    return server_active_slots_[server] > 0;
  }
  double link_load(int link) const { return link_load_[link]; }
  bool link_active(int link) const { return link_load_[link] > 0.0; }

  std::set<int> ActiveSlots() const {
    std::set<int> out;
    for (std::size_t m = 0; m < slot_active_.size(); ++m) {
      if (slot_active_[m]) out.insert(static_cast<int>(m));
    }
    return out;
  }

  // True when slot m could carry `bandwidth` more, activating it if needed.
  bool CanCarry(const AugmentedNetwork& net, int m, double bandwidth) const {
    const PseudoVnf& s = net.slot(m);
    if (!FitsWithin(slot_load_[m] + bandwidth,
                    net.catalog().at(s.type).capacity_mbps)) {
      return false;
    }
    return slot_active(m) || CanActivate(net, m);
  }

  bool CanActivate(const AugmentedNetwork& net, int m) const {
    const PseudoVnf& s = net.slot(m);
    for (int k = 0; k < kinds_; ++k) {
      double need = net.Requirement(s.type, k);
      if (need <= 0.0) continue;
      if (!FitsWithin(server_used(s.server, k) + need,
                      net.topology().Capacity(s.server, k))) {
        return false;
      }
    }
    return true;
  }

  void Activate(const AugmentedNetwork& net, int m) {
    if (slot_active_[m]) return;
    const PseudoVnf& s = net.slot(m);
    Record(Field::kSlotActive, m, slot_active_[m]);
    slot_active_[m] = 1;
    Record(Field::kServerSlots, s.server, server_active_slots_[s.server]);
    ++server_active_slots_[s.server];
    for (int k = 0; k < kinds_; ++k) {
      double need = net.Requirement(s.type, k);
      if (need == 0.0) continue;
      std::size_t idx = static_cast<std::size_t>(s.server) * kinds_ + k;
      Record(Field::kServerUsed, static_cast<int>(idx), server_used_[idx]);
      server_used_[idx] += need;
    }
  }

  // Routes `bandwidth` of traffic through slot m, activating it if needed.
  void AddSlotLoad(const AugmentedNetwork& net, int m, double bandwidth) {
    Activate(net, m);
    Record(Field::kSlotLoad, m, slot_load_[m]);
    slot_load_[m] += bandwidth;
  }

  void AddLinkLoad(int link, double bandwidth) {
    Record(Field::kLinkLoad, link, link_load_[link]);
    link_load_[link] += bandwidth;
  }

  std::size_t Checkpoint() const { return undo_.size(); }

  void Rollback(std::size_t checkpoint) {
    while (undo_.size() > checkpoint) {
      const Change& c = undo_.back();
      switch (c.field) {
        case Field::kSlotActive:
          slot_active_[c.index] = static_cast<char>(c.old_value);
          break;
        case Field::kSlotLoad:
          slot_load_[c.index] = c.old_value;
          break;
        case Field::kServerUsed:
          server_used_[c.index] = c.old_value;
          break;
        case Field::kServerSlots:
          server_active_slots_[c.index] = static_cast<int>(c.old_value);
          break;
        case Field::kLinkLoad:
          link_load_[c.index] = c.old_value;
          break;
      }
      undo_.pop_back();
    }
  }

  // Drops the undo history; the current values become the baseline.
  void ClearHistory() { undo_.clear(); }

  bool SameLoads(const ResourceLedger& other) const {
    return slot_active_ == other.slot_active_ &&
           slot_load_ == other.slot_load_ &&
           server_used_ == other.server_used_ &&
           server_active_slots_ == other.server_active_slots_ &&
           link_load_ == other.link_load_;
  }

 private:
  enum class Field { kSlotActive, kSlotLoad, kServerUsed, kServerSlots, kLinkLoad };
  struct Change {
    Field field;
    int index;
    double old_value;
  };

  void Record(Field f, int index, double old_value) {
    undo_.push_back({f, index, old_value});
  }

  int kinds_;
  std::vector<char> slot_active_;
  std::vector<double> slot_load_;
  std::vector<double> server_used_;
  std::vector<int> server_active_slots_;
  std::vector<double> link_load_;
  std::vector<Change> undo_;
};

}  // namespace vnfop
