#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace maas {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

using NodeId = std::int64_t;
using OperatorId = std::int64_t;
using GroupId = std::int64_t;

/// Raised for malformed inputs that cannot be represented as violations
/// (duplicate ids, dangling references during expansion, bad JSON).
class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class NodeKind { centroid, station };

struct Node {
  NodeId id = 0;
  NodeKind kind = NodeKind::centroid;
};

/// Walking or transfer link. Owned by nobody, uncapacitated.
struct BaseLink {
  NodeId tail = 0;
  NodeId head = 0;
  double travel_cost = 0.0;
};

struct FrequencyOption {
  double travel_cost = 0.0;
  double operating_cost = 0.0;
  double capacity = kInfinity;

  bool operator==(const FrequencyOption&) const = default;
};

/// One (i, j) service segment with its parallel frequency/capacity options.
struct FixedRouteLink {
  NodeId tail = 0;
  NodeId head = 0;
  std::vector<FrequencyOption> options;
};

struct FixedRouteOperator {
  OperatorId id = 0;
  std::string name;
  std::vector<FixedRouteLink> links;
};

/// tau(x; h) = a1 * x^b1 * h^b2 on MOD access links.
struct AccessCostParams {
  double a1 = 1.0;
  double b1 = 1.0;
  double b2 = -2.0;
};

/// m(h) = a2 * h^b3, the per-passenger operating cost of a MOD link.
struct OperatingCostParams {
  double a2 = 1.0;
  double b3 = 2.0;
};

struct ModTravelCostEntry {
  NodeId from = 0;
  NodeId to = 0;
  double travel_cost = 0.0;
};

/// How in-vehicle costs of MOD links are obtained: an explicit per-pair
/// matrix, or a factor applied to the shortest-path cost on the base network
/// (walking, transfer and cheapest fixed-route option).
struct ModTravelCost {
  enum class Rule { matrix, shortest_path_factor };
  Rule rule = Rule::shortest_path_factor;
  double factor = 1.0;
  std::vector<ModTravelCostEntry> entries;
};

struct ModOperator {
  OperatorId id = 0;
  std::string name;
  std::vector<NodeId> zones;
  std::vector<int> fleet_sizes;
  AccessCostParams access;
  OperatingCostParams operating;
  // Aligned with `zones`; the same cost applies to every fleet layer.
  std::vector<double> opening_cost;
  ModTravelCost link_travel_cost;
};

struct TravelerGroup {
  GroupId id = 0;
  NodeId origin = 0;
  NodeId destination = 0;
  double demand = 0.0;
  double trip_utility = 0.0;
  std::optional<double> optout_disutility;

  /// Dummy-link cost; defaults to the trip utility so opting out pays 0.
  double optout() const { return optout_disutility.value_or(trip_utility); }
};

struct Scenario {
  std::string name;
  std::vector<Node> nodes;
  std::vector<BaseLink> walking_links;
  std::vector<BaseLink> transfer_links;
  std::vector<FixedRouteOperator> fixed_route_operators;
  std::vector<ModOperator> mod_operators;
  std::vector<TravelerGroup> traveler_groups;
};

struct Violation {
  std::string field;
  std::string rule;

  bool operator==(const Violation&) const = default;
};

/// Checks every data invariant and returns one entry per broken rule; an
/// empty result means the scenario can be expanded and solved.
std::vector<Violation> validate(const Scenario& scenario);

double mod_access_cost(double flow, double fleet, const AccessCostParams& params);

/// d(tau(x) * x)/dx, the marginal social cost of one more access user.
double mod_access_marginal_cost(double flow, double fleet,
                                const AccessCostParams& params);

double mod_unit_operating_cost(double fleet, const OperatingCostParams& params);

}  // namespace maas
