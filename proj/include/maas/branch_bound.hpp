#pragma once

#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

#include "maas/stability.hpp"

namespace maas {

enum class SolveMode { exact, heuristic };

std::string_view to_string(SolveMode mode);

struct SolveOptions {
  SolveMode mode = SolveMode::exact;
  double gap = 0.0;  // relative (upper - lower) / lower at which to stop
  long max_branches = 1'000'000;
  double max_time = kInfinity;  // seconds of wall clock
  double prune_tolerance = 1e-6;
  BranchOptions branch;
  StabilityOptions stability;
  std::ostream* progress = nullptr;  // line-delimited JSON, one object per branch
};

/// A design variable to branch on: a fixed-route link or a MOD vertex.
struct BranchVariable {
  bool is_link = true;
  int index = kNone;

  bool operator==(const BranchVariable&) const = default;
};

/// Most fractional free variable; ties go to the larger cost coefficient,
/// then the lower index (links before MOD vertices). Throws
/// std::logic_error on an integral solution.
BranchVariable branch_select(const BranchNetwork& branch, const BranchSolution& solution,
                             double integrality_tolerance = 1e-4);

/// Children (fix to 1, fix to 0) with the exclusivity fixings applied.
std::pair<BranchFixings, BranchFixings> child_fixings(const ExpandedNetwork& net, const BranchFixings& parent,
                                                      BranchVariable var);

/// Stability verdict of an integral matching.
struct StabilityVerdict {
  bool stable = false;  // non-empty outcome set without subsidy
  StableOutcome buyer;
  StableOutcome seller;
  SubsidyPlan subsidy;  // zero plan when stable
};

StabilityVerdict assess_stability(const ExpandedNetwork& net, const BranchSolution& solution,
                                  const StabilityOptions& options = {});

struct SolveResult {
  SolveMode mode = SolveMode::exact;
  bool found = false;
  BranchSolution best;
  std::optional<StabilityVerdict> verdict;  // heuristic mode, or on request
  double upper_bound = kInfinity;   // best L1 cost (exact) or subsidized cost (heuristic)
  double lower_bound = -kInfinity;  // smallest bound over open and unresolved branches
  double gap = kInfinity;           // upper - lower
  double relative_gap = kInfinity;
  bool closed = false;     // every branch was closed
  bool limit_hit = false;  // time or branch cap stopped the run
  long branches = 0;
  double wall_time = 0.0;
  std::vector<BranchSolution> locally_stable;
  std::vector<BranchFixings> deferred;
};

/// Exact branch and bound for the matching problem.
SolveResult solve_L1(const ExpandedNetwork& net, const SolveOptions& options);

/// Bounded heuristic for the subsidized equilibrium.
SolveResult solve_L1S(const ExpandedNetwork& net, const SolveOptions& options);

/// Dispatches on options.mode.
SolveResult solve(const ExpandedNetwork& net, const SolveOptions& options);

}  // namespace maas
