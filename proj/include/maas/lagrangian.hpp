#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "maas/assignment.hpp"

namespace maas {

struct SubgradientOptions {
  double epsilon = 0.05;
  int max_iterations = 500;
  FwOptions fw;
  std::ostream* trace = nullptr;  // CSV rows: iteration,step_norm,dual_value
};

struct SubgradientResult {
  Multipliers multipliers;  // the multipliers behind `flows`
  FlowState flows;
  PathSet paths;
  double lower_bound = -kInfinity;
  bool converged = false;
  int iterations = 0;
};

/// Lagrangian dual value for the given multipliers and the FW linearization
/// bound of the corresponding relaxed problem.
double lagrangian_bound(const BranchNetwork& branch, const Multipliers& mult, double relaxed_lower_bound);

/// Algorithm-1 subgradient loop. `warm` seeds the multipliers; the returned
/// bound is never below `parent_bound`.
SubgradientResult subgradient(const BranchNetwork& branch, const SubgradientOptions& options,
                              const Multipliers* warm = nullptr, double parent_bound = -kInfinity);

struct DesignValues {
  std::vector<double> y;  // per link; meaningful for fixed-route links
  std::vector<double> v;  // per vertex; meaningful for MOD vertices
};

/// y_hat and v_hat from link flows for the branch.
DesignValues recover_integers(const BranchNetwork& branch, const Multipliers& mult,
                              const std::vector<double>& link_flow);

/// Total flow leaving MOD vertex i over its mod_links and egress links.
double node_throughput(const ExpandedNetwork& net, const std::vector<double>& link_flow, int mod_vertex);

struct PathFlow {
  int group = 0;
  LinkPath links;
  double flow = 0.0;
};

struct RecoveryOptions {
  std::vector<char> excluded_links;  // paths through these links are dropped
  double capacity_repair = 0.005;
};

struct RecoveryResult {
  std::vector<PathFlow> paths;
  bool from_lp = false;          // false means the FW path decomposition was used
  bool capacity_rows = false;    // repair rows were needed
};

/// Path flows over the discovered path sets, matching FW flows on MOD links.
/// Returns nullopt only when options exclude every usable path of a group.
std::optional<RecoveryResult> recover_path_flows(const BranchNetwork& branch, const PathSet& paths,
                                                 const FlowState& flows, const Multipliers& mult,
                                                 const RecoveryOptions& options = {});

void aggregate(const ExpandedNetwork& net, const std::vector<PathFlow>& paths,
               std::vector<std::vector<double>>& group_flow, std::vector<double>& link_flow);

/// Objective of the matching problem for given flows and design values.
double branch_objective(const ExpandedNetwork& net, const std::vector<double>& link_flow,
                        const std::vector<double>& y, const std::vector<double>& v);

struct BranchSolution {
  BranchFixings fixings;
  std::vector<PathFlow> paths;
  std::vector<std::vector<double>> group_flow;
  std::vector<double> link_flow;
  std::vector<double> y;
  std::vector<double> v;
  double objective = 0.0;
  std::vector<double> mu;  // capacity price per link (gamma)
  Multipliers multipliers;
  double lower_bound = -kInfinity;
  bool converged = false;
  bool integral = false;
  bool capacity_feasible = true;  // every fixed-route flow within 0.5% of capacity
  int subgradient_iterations = 0;
};

struct BranchOptions {
  SubgradientOptions subgradient;
  double integrality_tolerance = 1e-4;
};

/// Solves one branch: subgradient, path recovery, design recovery and the
/// objective. Integral solutions are rounded (tiny flows snapped away) and
/// idle links or nodes fixed open are evaluated as closed.
BranchSolution solve_branch(const BranchNetwork& branch, const BranchOptions& options,
                            const Multipliers* warm = nullptr, double parent_bound = -kInfinity);

}  // namespace maas
