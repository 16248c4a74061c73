#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "maas/branch_bound.hpp"

namespace maas {

inline constexpr int kFormatVersion = 1;

/// Scenario documents. Missing or non-numeric numbers load as NaN so that
/// validate() reports them by field; structural errors throw ScenarioError.
Scenario scenario_from_json(const nlohmann::json& j);
nlohmann::json scenario_to_json(const Scenario& scenario);
Scenario load_scenario(const std::filesystem::path& path);
void save_scenario(const Scenario& scenario, const std::filesystem::path& path);

/// 64-bit FNV-1a of the canonical scenario JSON, as 16 hex digits.
std::string fingerprint(const Scenario& scenario);

struct OperatorSummary {
  OperatorId id = 0;
  std::string name;
  bool is_mod = false;
  bool operating = false;
  int fleet = 0;  // MOD fleet size in use, 0 when not operating
  double cost = 0.0;
  double revenue_buyer = 0.0;
  double revenue_seller = 0.0;
};

struct GroupSummary {
  GroupId id = 0;
  NodeId origin = 0;
  NodeId destination = 0;
  double demand = 0.0;
  double unserved = 0.0;
  double u_buyer = 0.0;
  double u_seller = 0.0;
};

struct OutcomeRecord {
  bool feasible = false;
  std::vector<double> u;
  std::vector<double> fares;  // per link
  double total_revenue = 0.0;
  std::vector<GeneratedPath> binding;
};

struct RunMetadata {
  long branches = 0;
  double wall_time = 0.0;
  double eps_sg = 0.05;
  double eps_fw = 0.01;
  int fw_consecutive = 5;
  double gap_threshold = 0.0;
  long max_branches = 0;
  double max_time = kInfinity;
};

struct ResultsDocument {
  std::string fingerprint;
  std::string scenario_name;
  SolveMode mode = SolveMode::exact;
  bool found = false;
  bool closed = false;
  bool limit_hit = false;
  double objective_l1 = 0.0;   // matching cost of the reported solution
  double objective_l1s = 0.0;  // plus the subsidy
  double upper_bound = kInfinity;
  double lower_bound = -kInfinity;
  double gap = kInfinity;
  double relative_gap = kInfinity;
  std::vector<double> link_flow;
  std::vector<double> y;
  std::vector<double> v;
  std::vector<double> mu;
  std::vector<PathFlow> paths;   // matched paths
  std::vector<double> subsidies;  // per matched path, per user
  double subsidy_total = 0.0;
  bool stable = false;  // non-empty outcome set without subsidy
  OutcomeRecord buyer;
  OutcomeRecord seller;
  std::vector<OperatorSummary> operators;
  std::vector<GroupSummary> groups;
  double total_unserved = 0.0;
  double payoff_buyer = 0.0;   // sum of d_s u_s
  double payoff_seller = 0.0;
  RunMetadata metadata;
};

/// Builds the document for a finished run. In exact mode the stored
/// outcomes are the unsubsidized vertices when they exist.
ResultsDocument make_results(const Scenario& scenario, const ExpandedNetwork& net, const SolveResult& result,
                             const SolveOptions& options);

nlohmann::json results_to_json(const ResultsDocument& doc);
ResultsDocument results_from_json(const nlohmann::json& j);
ResultsDocument load_results(const std::filesystem::path& path);
void save_results(const ResultsDocument& doc, const std::filesystem::path& path);

/// Matching stored in a document, for re-running the stability checks.
BranchSolution to_branch_solution(const ExpandedNetwork& net, const ResultsDocument& doc);

}  // namespace maas
