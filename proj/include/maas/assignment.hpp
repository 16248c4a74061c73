#pragma once

#include <iosfwd>
#include <map>
#include <set>
#include <vector>

#include "maas/network.hpp"
#include "maas/shortest_path.hpp"

namespace maas {

/// Branch fixings on design variables. Y sets hold fixed-route link
/// indices, V sets hold MOD vertex indices.
struct BranchFixings {
  std::set<int> y1, y0, v1, v0;

  bool operator==(const BranchFixings&) const = default;
};

/// Capacity multipliers gamma_l (indexed by link) and strong-forcing
/// multipliers beta_sl (indexed [group][link]); only fixed-route entries
/// are ever nonzero.
struct Multipliers {
  std::vector<double> gamma;
  std::vector<std::vector<double>> beta;
  double theta = 1.0;
  int iteration = 0;

  static Multipliers zero(const ExpandedNetwork& net);
};

/// The expanded network with branch fixings applied.
class BranchNetwork {
 public:
  BranchNetwork(const ExpandedNetwork& net, BranchFixings fixings);

  const ExpandedNetwork& net() const { return *net_; }
  const BranchFixings& fixings() const { return fix_; }

  bool active(int link) const { return active_[static_cast<std::size_t>(link)] != 0; }
  /// Active and, for dummy links, owned by `group`.
  bool usable(int link, int group) const;
  bool node_open(int mod_vertex) const { return node_open_[static_cast<std::size_t>(mod_vertex)] != 0; }

  bool y_fixed_one(int link) const { return fix_.y1.count(link) != 0; }
  bool v_fixed_one(int vertex) const { return fix_.v1.count(vertex) != 0; }
  /// min(w_l, total demand); equals the total demand for uncapacitated links.
  double effective_capacity(int link) const;
  /// b_sl = min(d_s, w_l).
  double forcing_bound(int group, int link) const;
  /// Fixed-route links that are active and whose y is not fixed.
  const std::vector<int>& free_fixed() const { return free_fixed_; }
  const std::vector<int>& active_fixed() const { return active_fixed_; }
  /// MOD vertices that are open and not fixed to one.
  const std::vector<int>& free_mod() const { return free_mod_; }

 private:
  const ExpandedNetwork* net_;
  BranchFixings fix_;
  std::vector<char> active_;
  std::vector<char> node_open_;
  std::vector<int> free_fixed_;
  std::vector<int> active_fixed_;
  std::vector<int> free_mod_;
};

struct FlowState {
  std::vector<std::vector<double>> group_flow;  // [group][link]
  std::vector<double> link_flow;
  /// Exact path decomposition of group_flow, maintained through the steps.
  std::vector<std::map<LinkPath, double>> path_flow;
  double objective = 0.0;    // relaxed objective without constants
  double lower_bound = -kInfinity;  // linearization bound on its minimum
  double gap = kInfinity;
  int iterations = 0;
  bool converged = false;

  static FlowState on_dummies(const ExpandedNetwork& net);
};

/// Discovered paths per group, deduplicated by link sequence.
class PathSet {
 public:
  explicit PathSet(std::size_t groups = 0) : paths_(groups), seen_(groups) {}
  bool add(int group, const LinkPath& path);
  const std::vector<LinkPath>& of(int group) const { return paths_[static_cast<std::size_t>(group)]; }
  std::size_t groups() const { return paths_.size(); }
  std::size_t size() const;

 private:
  std::vector<std::vector<LinkPath>> paths_;
  std::vector<std::set<LinkPath>> seen_;
};

/// Per-group linear cost coefficients of the relaxed objective. MOD access
/// links carry 0 here; their congestion term is handled separately.
std::vector<std::vector<double>> linear_costs(const BranchNetwork& branch, const Multipliers& mult);

/// Adjusted per-unit cost of `link` for `group` (the linear coefficient, or
/// the marginal access cost at `access_flow` for MOD access links).
double adjusted_cost(const BranchNetwork& branch, const Multipliers& mult, int link, int group,
                     double access_flow = 0.0);

/// c_l(beta) = c_l - sum_s b_sl beta_sl.
double reduced_operating_cost(const BranchNetwork& branch, const Multipliers& mult, int link);

/// Relaxed objective (no constants) at the given per-group flows.
double relaxed_objective(const BranchNetwork& branch, const std::vector<std::vector<double>>& lin,
                         const std::vector<std::vector<double>>& group_flow,
                         const std::vector<double>& link_flow);

struct AonResult {
  std::vector<std::vector<double>> group_flow;
  std::vector<double> link_flow;
  std::vector<LinkPath> paths;  // one per group
};

/// Assigns each group's demand to its cheapest path under `lin` plus the
/// marginal access costs at `link_flow`.
AonResult all_or_nothing(const BranchNetwork& branch, const std::vector<std::vector<double>>& lin,
                         const std::vector<double>& link_flow, int threads = 1);

/// Step length minimizing the relaxed objective along F_Y - F_X.
double line_search(const BranchNetwork& branch, const std::vector<std::vector<double>>& lin,
                   const FlowState& fx, const AonResult& fy);

struct FwOptions {
  double epsilon = 0.01;
  int consecutive = 5;
  int max_iterations = 5000;
  int threads = 1;
  std::ostream* trace = nullptr;  // CSV rows: iteration,alpha,objective
};

/// Modified Frank-Wolfe on the relaxed problem. Starts with all demand on
/// dummy links and appends every shortest path it finds to `paths`.
FlowState frank_wolfe(const BranchNetwork& branch, const Multipliers& mult, const FwOptions& options,
                      PathSet* paths = nullptr);

}  // namespace maas
