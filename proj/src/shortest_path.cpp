#include "maas/shortest_path.hpp"

#include <cassert>
#include <cmath>
#include <queue>
#include <stdexcept>
#include <tuple>

namespace maas {

std::optional<PathResult> shortest_path(const ExpandedNetwork& net, std::span<const double> cost,
                                        int origin, int destination) {
  const auto n = net.vertex_count();
  if (cost.size() != net.link_count()) throw std::invalid_argument("cost vector size mismatch");
  std::vector<double> dist(n, kInfinity);
  std::vector<int> hops(n, 0);
  using Key = std::tuple<double, int, int>;
  std::priority_queue<Key, std::vector<Key>, std::greater<>> pq;
  dist[static_cast<std::size_t>(destination)] = 0.0;
  pq.push({0.0, 0, destination});
  // Reverse search from the destination so every vertex knows its
  // remaining distance and hop count.
  while (!pq.empty()) {
    auto [d, h, v] = pq.top();
    pq.pop();
    const auto vi = static_cast<std::size_t>(v);
    if (d > dist[vi] || (d == dist[vi] && h > hops[vi])) continue;
    if (v == origin) break;
    for (int li : net.in_links(v)) {
      const double c = cost[static_cast<std::size_t>(li)];
      if (c == kInfinity) continue;
      assert(c >= 0.0 && "shortest_path requires nonnegative costs");
      const int u = net.link(li).tail;
      const auto ui = static_cast<std::size_t>(u);
      const double nd = d + c;
      if (nd < dist[ui] || (nd == dist[ui] && h + 1 < hops[ui])) {
        dist[ui] = nd;
        hops[ui] = h + 1;
        pq.push({nd, h + 1, u});
      }
    }
  }
  if (dist[static_cast<std::size_t>(origin)] == kInfinity) return std::nullopt;

  PathResult out;
  out.cost = dist[static_cast<std::size_t>(origin)];
  int v = origin;
  while (v != destination) {
    const auto vi = static_cast<std::size_t>(v);
    const double eps = 1e-12 * (1.0 + std::abs(dist[vi]));
    int pick = -1;
    for (int li : net.out_links(v)) {
      const double c = cost[static_cast<std::size_t>(li)];
      if (c == kInfinity) continue;
      const auto hi = static_cast<std::size_t>(net.link(li).head);
      if (dist[hi] == kInfinity || hops[hi] != hops[vi] - 1) continue;
      if (std::abs(c + dist[hi] - dist[vi]) > eps) continue;
      if (pick < 0 || li < pick) pick = li;
    }
    if (pick < 0) throw std::logic_error("shortest_path: broken predecessor chain");
    out.links.push_back(pick);
    v = net.link(pick).head;
  }
  return out;
}

std::vector<LinkPath> enumerate_paths(const ExpandedNetwork& net, int origin, int destination,
                                      const std::function<bool(int)>& allowed, std::size_t limit) {
  std::vector<LinkPath> out;
  std::vector<char> on_path(net.vertex_count(), 0);
  LinkPath cur;
  std::function<void(int)> dfs = [&](int v) {
    if (out.size() >= limit) return;
    if (v == destination) {
      out.push_back(cur);
      return;
    }
    on_path[static_cast<std::size_t>(v)] = 1;
    for (int li : net.out_links(v)) {
      if (!allowed(li)) continue;
      const int h = net.link(li).head;
      if (on_path[static_cast<std::size_t>(h)]) continue;
      cur.push_back(li);
      dfs(h);
      cur.pop_back();
    }
    on_path[static_cast<std::size_t>(v)] = 0;
  };
  dfs(origin);
  return out;
}

double path_cost(std::span<const double> cost, const LinkPath& path) {
  double s = 0.0;
  for (int l : path) s += cost[static_cast<std::size_t>(l)];
  return s;
}

}  // namespace maas
