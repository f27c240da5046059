#pragma once

// Routing helpers over the physical topology. All tie-breaks are on switch
// index, which is lexicographic switch-id order.

#include <algorithm>
#include <limits>
#include <optional>
#include <queue>
#include <set>
#include <tuple>
#include <vector>

#include "vnfop/model.hpp"

namespace vnfop {

using SwitchPath = std::vector<int>;  // switch indices, endpoints included

inline Route ToRoute(const SwitchPath& path) {
  Route route;
  for (std::size_t i = 1; i < path.size(); ++i) {
    route.push_back({path[i - 1], path[i]});
  }
  return route;
}

inline double SwitchPathDelay(const Topology& topo, const SwitchPath& path) {
  double d = 0.0;
  for (std::size_t i = 1; i < path.size(); ++i) {
    d += topo.links()[*topo.FindLink(path[i - 1], path[i])].delay_ms;
  }
  return d;
}

inline int HopCount(const SwitchPath& path) {
  return path.empty() ? 0 : static_cast<int>(path.size()) - 1;
}

namespace detail {

struct DijkstraResult {
  std::vector<double> delay;
  std::vector<int> hops;
  std::vector<int> pred;
};

// Minimum-delay tree from `src`, ties broken by fewer hops and then by the
// smaller predecessor index. Nodes/links flagged in the masks are skipped.
inline DijkstraResult Dijkstra(const Topology& topo, int src,
                               const std::vector<char>* banned_nodes = nullptr,
                               const std::set<std::pair<int, int>>* banned_links =
                                   nullptr) {
  const int n = topo.switch_count();
  const double inf = std::numeric_limits<double>::infinity();
  DijkstraResult r{std::vector<double>(n, inf), std::vector<int>(n, 0),
                   std::vector<int>(n, -1)};
  using Key = std::tuple<double, int, int>;
  std::priority_queue<Key, std::vector<Key>, std::greater<Key>> pq;
  std::vector<char> done(n, 0);
  r.delay[src] = 0.0;
  pq.push({0.0, 0, src});
  while (!pq.empty()) {
    auto [d, h, u] = pq.top();
    pq.pop();
    if (done[u]) continue;
    done[u] = 1;
    for (const Adjacent& adj : topo.Adjacency(u)) {
      int v = adj.neighbor;
      if (done[v]) continue;
      if (banned_nodes && (*banned_nodes)[v]) continue;
      if (banned_links && banned_links->contains({u, v})) continue;
      double nd = d + topo.links()[adj.link].delay_ms;
      int nh = h + 1;
      bool better = nd < r.delay[v] || (nd == r.delay[v] && nh < r.hops[v]) ||
                    (nd == r.delay[v] && nh == r.hops[v] && u < r.pred[v]);
      if (better) {
        r.delay[v] = nd;
        r.hops[v] = nh;
        r.pred[v] = u;
        pq.push({nd, nh, v});
      }
    }
  }
  return r;
}

inline SwitchPath Extract(const DijkstraResult& r, int src, int dst) {
  if (src == dst) return {src};
  if (r.pred[dst] < 0) return {};
  SwitchPath path;
  for (int v = dst; v != -1; v = (v == src ? -1 : r.pred[v])) path.push_back(v);
  std::reverse(path.begin(), path.end());
  return path;
}

}  // namespace detail

// Precomputed all-pairs minimum-delay paths and hop distances.
class PathTable {
 public:
  explicit PathTable(const Topology& topo) : n_(topo.switch_count()) {
    paths_.resize(static_cast<std::size_t>(n_) * n_);
    delay_.resize(static_cast<std::size_t>(n_) * n_);
    hops_.assign(static_cast<std::size_t>(n_) * n_, -1);
    for (int s = 0; s < n_; ++s) {
      auto r = detail::Dijkstra(topo, s);
      for (int t = 0; t < n_; ++t) {
        paths_[s * n_ + t] = detail::Extract(r, s, t);
        delay_[s * n_ + t] = r.delay[t];
      }
      // Breadth-first hop distances.
      std::vector<int>& dist = hops_;
      std::queue<int> q;
      dist[s * n_ + s] = 0;
      q.push(s);
      while (!q.empty()) {
        int u = q.front();
        q.pop();
        for (const Adjacent& adj : topo.Adjacency(u)) {
          if (dist[s * n_ + adj.neighbor] < 0) {
            dist[s * n_ + adj.neighbor] = dist[s * n_ + u] + 1;
            q.push(adj.neighbor);
          }
        }
      }
    }
  }

  // Minimum-delay path a -> b ({a} when a == b, empty when unreachable).
  const SwitchPath& DelayPath(int a, int b) const { return paths_[a * n_ + b]; }
  double MinDelay(int a, int b) const { return delay_[a * n_ + b]; }
  // Fewest hops between a and b, -1 when unreachable.
  int Hops(int a, int b) const { return hops_[a * n_ + b]; }

 private:
  int n_;
  std::vector<SwitchPath> paths_;
  std::vector<double> delay_;
  std::vector<int> hops_;
};

// Up to `k` loop-free a -> b paths in order of delay (then hops, then
// switch sequence), via Yen's algorithm.
inline std::vector<SwitchPath> KShortestPaths(const Topology& topo, int a, int b,
                                              int k) {
  std::vector<SwitchPath> result;
  if (k <= 0) return result;
  if (a == b) return {{a}};
  auto first = detail::Extract(detail::Dijkstra(topo, a), a, b);
  if (first.empty()) return result;
  result.push_back(first);
  auto key = [&](const SwitchPath& p) {
    return std::make_tuple(SwitchPathDelay(topo, p), HopCount(p), p);
  };
  std::set<std::tuple<double, int, SwitchPath>> candidates;
  while (static_cast<int>(result.size()) < k) {
    const SwitchPath& last = result.back();
    for (std::size_t i = 0; i + 1 < last.size(); ++i) {
      int spur = last[i];
      SwitchPath root(last.begin(), last.begin() + i + 1);
      std::set<std::pair<int, int>> banned_links;
      for (const SwitchPath& p : result) {
        if (p.size() > i + 1 && std::equal(root.begin(), root.end(), p.begin())) {
          banned_links.insert({p[i], p[i + 1]});
        }
      }
      std::vector<char> banned_nodes(topo.switch_count(), 0);
      for (std::size_t j = 0; j < i; ++j) banned_nodes[root[j]] = 1;
      auto r = detail::Dijkstra(topo, spur, &banned_nodes, &banned_links);
      SwitchPath spur_path = detail::Extract(r, spur, b);
      if (spur_path.empty()) continue;
      SwitchPath total = root;
      total.insert(total.end(), spur_path.begin() + 1, spur_path.end());
      if (std::find(result.begin(), result.end(), total) == result.end()) {
        candidates.insert(key(total));
      }
    }
    if (candidates.empty()) break;
    result.push_back(std::get<2>(*candidates.begin()));
    candidates.erase(candidates.begin());
  }
  return result;
}

// Every simple a -> b path with at most `max_hops` links, ordered by
// (hops, delay, switch sequence). Returns nullopt when more than `limit`
// paths exist.
inline std::optional<std::vector<SwitchPath>> SimplePaths(const Topology& topo,
                                                          int a, int b,
                                                          int max_hops,
                                                          std::size_t limit) {
  std::vector<SwitchPath> out;
  if (a == b) return std::vector<SwitchPath>{{a}};
  std::vector<char> on_path(topo.switch_count(), 0);
  SwitchPath current{a};
  on_path[a] = 1;
  bool overflow = false;
  auto dfs = [&](auto&& self, int u) -> void {
    if (overflow) return;
    if (u == b) {
      out.push_back(current);
      if (out.size() > limit) overflow = true;
      return;
    }
    if (HopCount(current) >= max_hops) return;
    for (const Adjacent& adj : topo.Adjacency(u)) {
      if (on_path[adj.neighbor]) continue;
      on_path[adj.neighbor] = 1;
      current.push_back(adj.neighbor);
      self(self, adj.neighbor);
      current.pop_back();
      on_path[adj.neighbor] = 0;
    }
  };
  dfs(dfs, a);
  if (overflow) return std::nullopt;
  std::vector<std::tuple<int, double, SwitchPath>> keyed;
  for (SwitchPath& p : out) {
    keyed.emplace_back(HopCount(p), SwitchPathDelay(topo, p), std::move(p));
  }
  std::sort(keyed.begin(), keyed.end());
  out.clear();
  for (auto& [h, d, p] : keyed) out.push_back(std::move(p));
  return out;
}

}  // namespace vnfop
