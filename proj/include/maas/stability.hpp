#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "maas/lagrangian.hpp"

namespace maas {

struct MatchedPath {
  int group = 0;
  LinkPath links;
  double flow = 0.0;
  double travel_cost = 0.0;  // sum of t over non-access links plus tau(X*) on access links
};

/// Paths carrying flow in a matching, merged by link sequence.
struct MatchedPathSet {
  std::vector<MatchedPath> paths;
  std::vector<std::vector<int>> of_group;  // indices into `paths`
  std::vector<int> fare_links;             // matched fixed-route and access links, ascending
  std::vector<double> link_flow;           // aggregate X* of the matched paths
};

enum class OutcomeVertex { buyer_optimal, seller_optimal };

std::string_view to_string(OutcomeVertex vertex);

struct GeneratedPath {
  int group = 0;
  LinkPath links;
};

struct StableOutcome {
  OutcomeVertex vertex = OutcomeVertex::buyer_optimal;
  bool feasible = false;
  std::vector<double> u;        // per group
  std::vector<double> fares;    // per link; zero outside the fare links
  std::vector<double> revenue;  // per operator
  double total_revenue = 0.0;
  std::vector<GeneratedPath> binding;  // generated switching rows that are tight
  int rounds = 0;
  int generated_rows = 0;
};

struct SubsidyPlan {
  bool feasible = false;
  std::vector<double> a;  // per matched path, per user
  double total = 0.0;
  double z_l1s = 0.0;
};

struct SubsidyResult {
  SubsidyPlan plan;
  StableOutcome buyer;
  StableOutcome seller;
};

struct StabilityOptions {
  double violation_tolerance = 1e-6;
  int max_rounds = 1000;
  double min_path_flow = 1e-12;
};

struct SwitchCandidate {
  LinkPath links;
  double weight = 0.0;  // composite switching cost including fares
  double gain = 0.0;    // U_s - weight - u_s
};

struct InstabilityDiagnostic {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

/// The cost allocation problem for one integral matching. Keeps a copy of
/// the matching and its path set and builds the allocation LPs on demand;
/// the network must outlive the problem.
class StabilityProblem {
 public:
  StabilityProblem(const ExpandedNetwork& net, const BranchSolution& matching, StabilityOptions options = {});

  const ExpandedNetwork& net() const { return *net_; }
  const MatchedPathSet& matched() const { return matched_; }
  const BranchSolution& matching() const { return chi_; }
  const StabilityOptions& options() const { return opt_; }

  /// Travel cost of a path as charged in the matched-path payoff rows.
  double path_travel_cost(const LinkPath& path) const;
  /// Composite switching weights without fares; other groups' dummies are
  /// excluded per group by `separation_oracle`.
  const std::vector<double>& base_weights() const { return base_weights_; }

  /// Most violated switching path of `group`, if any.
  std::optional<SwitchCandidate> separation_oracle(int group, std::span<const double> u,
                                                   std::span<const double> fares) const;

  /// Row-generated L2 vertex. `subsidies`, when given, are fixed per-path
  /// payments added to the matched-path payoff rows.
  StableOutcome solve_vertex(OutcomeVertex vertex, const std::vector<double>* subsidies = nullptr) const;

  /// Row-generated minimum subsidy problem, then both vertices with the
  /// subsidies fixed.
  SubsidyResult min_subsidy() const;

  /// Fares that exactly recover each operator's cost from its own flows.
  std::vector<double> fare_floor() const;

  /// Instability test for matched path `r` against alternative `alt`.
  InstabilityDiagnostic instability_condition(int r, const LinkPath& alt,
                                              const std::vector<double>* fares = nullptr) const;

  /// Operating cost per operator: c*y for fixed-route, m*X plus q*v for MOD.
  std::vector<double> operator_costs() const;
  std::vector<double> operator_revenue(std::span<const double> fares) const;

  /// Sum over matched paths of flow times travel cost.
  double system_travel_cost() const;

  /// sum d_s u_s + revenue + travel cost - sum a_r x_r - sum d_s U_s.
  double conservation_residual(const StableOutcome& outcome, const std::vector<double>* subsidies = nullptr) const;

  /// Largest violation of the operator, payoff and sign rows at the outcome.
  double max_row_violation(const StableOutcome& outcome, const std::vector<double>* subsidies = nullptr) const;

  /// Number of groups with a violated switching path; `found` collects them.
  int count_violations(std::span<const double> u, std::span<const double> fares,
                       std::vector<SwitchCandidate>* found = nullptr) const;

 private:
  enum class Mode { payoff, fixed_subsidy, min_subsidy };
  struct Solved;
  Solved run(Mode mode, OutcomeVertex vertex, const std::vector<double>* subsidies) const;

  const ExpandedNetwork* net_;
  BranchSolution chi_;
  StabilityOptions opt_;
  MatchedPathSet matched_;
  std::vector<double> base_weights_;
};

MatchedPathSet matched_paths(const ExpandedNetwork& net, const std::vector<PathFlow>& paths, double min_flow = 1e-12);

/// Largest gap between a group's used-path cost and its cheapest path cost,
/// with costs t + m on mod links and tau(X) on access links.
double wardrop_violation(const ExpandedNetwork& net, const std::vector<PathFlow>& paths,
                         const std::vector<double>& link_flow);

/// The scenario with every access cost coefficient scaled by 1/(b1 + 1), so
/// that the system-optimal assignment of the result is the user equilibrium
/// of the original.
Scenario beckmann_transform(Scenario scenario);

}  // namespace maas
