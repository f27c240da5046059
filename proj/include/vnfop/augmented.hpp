#pragma once

// Network transformation: every VNF instance that could ever run is
// enumerated up front as a pseudo-VNF "slot" on its host server. Solvers
// then only decide which slots to activate and which traffic they carry.

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "vnfop/model.hpp"

namespace vnfop {

struct PseudoVnf {
  std::string id;  // "<server>/<type>/<ordinal>"
  int type = -1;
  int server = -1;
  int switch_index = -1;
  int ordinal = 0;
  // Artificial switch between the slot and its real switch; only the exact
  // solver's flow bookkeeping refers to it.
  std::string pseudo_switch;
};

class AugmentedNetwork {
 public:
  AugmentedNetwork(Topology topology, VnfCatalog catalog)
      : topology_(std::move(topology)), catalog_(std::move(catalog)) {
    const int kinds = static_cast<int>(topology_.resource_kinds().size());
    requirement_.assign(catalog_.size(), std::vector<double>(kinds, 0.0));
    for (int p = 0; p < catalog_.size(); ++p) {
      for (const auto& [kind, amount] : catalog_.at(p).requirements) {
        requirement_[p][*topology_.FindKind(kind)] = amount;
      }
    }
    by_server_.assign(topology_.server_count(), {});
    by_type_.assign(catalog_.size(), {});
    by_switch_type_.assign(topology_.switch_count(),
                           std::vector<std::vector<int>>(catalog_.size()));
    for (int n = 0; n < topology_.server_count(); ++n) {
      const ServerSpec& server = topology_.servers()[n];
      for (int p = 0; p < catalog_.size(); ++p) {
        if (!catalog_.at(p).AllowedOn(server.id)) continue;
        int count = MaxInstances(n, p);
        for (int k = 0; k < count; ++k) {
          PseudoVnf slot;
          slot.type = p;
          slot.server = n;
          slot.switch_index = topology_.ServerSwitch(n);
          slot.ordinal = k;
          slot.id = server.id + "/" + catalog_.at(p).id + "/" + std::to_string(k);
          slot.pseudo_switch = "ps:" + slot.id;
          int index = static_cast<int>(slots_.size());
          slots_.push_back(std::move(slot));
          by_server_[n].push_back(index);
          by_type_[p].push_back(index);
          by_switch_type_[topology_.ServerSwitch(n)][p].push_back(index);
        }
      }
    }
  }

  const Topology& topology() const { return topology_; }
  const VnfCatalog& catalog() const { return catalog_; }
  const std::vector<PseudoVnf>& slots() const { return slots_; }
  const PseudoVnf& slot(int m) const { return slots_.at(m); }
  int slot_count() const { return static_cast<int>(slots_.size()); }
  int kind_count() const {
    return static_cast<int>(topology_.resource_kinds().size());
  }

  // kappa^r_p by kind index.
  double Requirement(int type, int kind) const {
    return requirement_.at(type).at(kind);
  }

  std::span<const int> SlotsOnServer(int server) const {
    return by_server_.at(server);
  }
  std::span<const int> SlotsOfType(int type) const { return by_type_.at(type); }
  std::span<const int> SlotsAt(int switch_index, int type) const {
    return by_switch_type_.at(switch_index).at(type);
  }

  // All slots of `type` hosted on servers attached to `switch_id`, in slot
  // order.
  std::vector<PseudoVnf> SlotsFor(std::string_view switch_id,
                                  std::string_view type) const {
    std::vector<PseudoVnf> out;
    for (int m : SlotsAt(topology_.SwitchIndex(switch_id), catalog_.Index(type))) {
      out.push_back(slots_[m]);
    }
    return out;
  }

  std::optional<int> FindSlot(std::string_view id) const {
    for (int m = 0; m < slot_count(); ++m) {
      if (slots_[m].id == id) return m;
    }
    return std::nullopt;
  }

  // Largest number of instances of `type` that fit on `server` alone: the
  // minimum over required kinds of floor(capacity / requirement).
  int MaxInstances(int server, int type) const {
    double best = std::numeric_limits<double>::infinity();
    for (int k = 0; k < kind_count(); ++k) {
      double need = requirement_[type][k];
      if (need <= 0.0) continue;
      best = std::min(best, std::floor(topology_.Capacity(server, k) / need + 1e-9));
    }
    return std::isfinite(best) ? static_cast<int>(best) : 0;
  }

 private:
  Topology topology_;
  VnfCatalog catalog_;
  std::vector<std::vector<double>> requirement_;
  std::vector<PseudoVnf> slots_;
  std::vector<std::vector<int>> by_server_;
  std::vector<std::vector<int>> by_type_;
  std::vector<std::vector<std::vector<int>>> by_switch_type_;
};

inline std::shared_ptr<const AugmentedNetwork> EnumerateVnfs(
    Topology topology, VnfCatalog catalog) {
  return std::make_shared<const AugmentedNetwork>(std::move(topology),
                                                  std::move(catalog));
}

}  // namespace vnfop
