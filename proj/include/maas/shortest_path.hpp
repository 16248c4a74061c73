#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "maas/network.hpp"

namespace maas {

using LinkPath = std::vector<int>;

struct PathResult {
  LinkPath links;
  double cost = 0.0;
};

/// Minimum-cost path between two vertices under per-link costs. A cost of
/// +inf excludes the link; all other costs must be nonnegative. Among
/// equal-cost paths the one with fewest links wins, then the lowest link-id
/// sequence. Returns nullopt when the destination is unreachable.
std::optional<PathResult> shortest_path(const ExpandedNetwork& net, std::span<const double> cost,
                                        int origin, int destination);

/// Every elementary path from origin to destination over links accepted by
/// `allowed`, in depth-first order by link id. Intended for small networks.
std::vector<LinkPath> enumerate_paths(const ExpandedNetwork& net, int origin, int destination,
                                      const std::function<bool(int)>& allowed,
                                      std::size_t limit = 100000);

double path_cost(std::span<const double> cost, const LinkPath& path);

}  // namespace maas
