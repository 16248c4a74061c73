#include "maas/branch_bound.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <memory>
#include <ostream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace maas {

std::string_view to_string(SolveMode mode) { return mode == SolveMode::exact ? "exact" : "heuristic"; }

namespace {

double cost_coefficient(const ExpandedNetwork& net, BranchVariable var) {
  return var.is_link ? net.link(var.index).operating_cost : net.vertex(var.index).opening_cost;
}

// True when a ranks ahead of b: closer to one half, then larger cost, then
// lower index with links first.
bool ranks_ahead(const ExpandedNetwork& net, BranchVariable a, double fa, BranchVariable b, double fb) {
  if (std::abs(fa - fb) > 1e-12) return fa < fb;
  const double ca = cost_coefficient(net, a);
  const double cb = cost_coefficient(net, b);
  if (ca != cb) return ca > cb;
  if (a.is_link != b.is_link) return a.is_link;
  return a.index < b.index;
}

struct Candidate {
  BranchVariable var;
  double distance = kInfinity;
};

void consider(const ExpandedNetwork& net, Candidate& best, BranchVariable var, double distance) {
  if (best.var.index == kNone || ranks_ahead(net, var, distance, best.var, best.distance)) best = {var, distance};
}

}  // namespace

BranchVariable branch_select(const BranchNetwork& branch, const BranchSolution& solution, double tol) {
  if (solution.integral) throw std::logic_error("branch_select called on an integral solution");
  const auto& net = branch.net();
  Candidate frac;
  Candidate fallback;
  Candidate tiny;
  for (int l : branch.free_fixed()) {
    const double y = solution.y[static_cast<std::size_t>(l)];
    const BranchVariable var{true, l};
    if (y > tol && y < 1.0 - tol) consider(net, frac, var, std::abs(y - 0.5));
    if (y > tol) consider(net, fallback, var, std::abs(y - 0.5));
    if (y > 0.0) consider(net, tiny, var, -y);
  }
  for (int v : branch.free_mod()) {
    const double x = solution.v[static_cast<std::size_t>(v)];
    const BranchVariable var{false, v};
    if (x > tol && x < 1.0 - tol) consider(net, frac, var, std::abs(x - 0.5));
    if (x > tol) consider(net, fallback, var, std::abs(x - 0.5));
    if (x > 0.0) consider(net, tiny, var, -x);
  }
  if (frac.var.index != kNone) return frac.var;
  if (fallback.var.index != kNone) return fallback.var;
  if (tiny.var.index != kNone) return tiny.var;
  throw std::logic_error("branch_select found no free variable to branch on");
}

std::pair<BranchFixings, BranchFixings> child_fixings(const ExpandedNetwork& net, const BranchFixings& parent,
                                                      BranchVariable var) {
  BranchFixings one = parent;
  BranchFixings zero = parent;
  if (var.is_link) {
    one.y1.insert(var.index);
    for (int l : net.option_groups()[static_cast<std::size_t>(net.link(var.index).option_group)])
      if (l != var.index) one.y0.insert(l);
    zero.y0.insert(var.index);
  } else {
    one.v1.insert(var.index);
    const auto& vx = net.vertex(var.index);
    for (const auto& layer : net.operators()[static_cast<std::size_t>(vx.op)].layers)
      if (layer.fleet != vx.fleet) one.v0.insert(layer.nodes.begin(), layer.nodes.end());
    zero.v0.insert(var.index);
  }
  return {std::move(one), std::move(zero)};
}

StabilityVerdict assess_stability(const ExpandedNetwork& net, const BranchSolution& solution,
                                  const StabilityOptions& options) {
  StabilityProblem problem(net, solution, options);
  StabilityVerdict v;
  v.buyer = problem.solve_vertex(OutcomeVertex::buyer_optimal);
  if (v.buyer.feasible) {
    v.stable = true;
    v.seller = problem.solve_vertex(OutcomeVertex::seller_optimal);
    v.subsidy.feasible = true;
    v.subsidy.a.assign(problem.matched().paths.size(), 0.0);
    v.subsidy.z_l1s = solution.objective;
    return v;
  }
  SubsidyResult res = problem.min_subsidy();
  v.subsidy = std::move(res.plan);
  v.buyer = std::move(res.buyer);
  v.seller = std::move(res.seller);
  return v;
}

namespace {

struct Node {
  long id = 0;
  BranchFixings fixings;
  double bound = -kInfinity;
  std::shared_ptr<const Multipliers> warm;
  int depth = 0;
};

nlohmann::json fixings_json(const BranchFixings& f) {
  return {{"y1", f.y1}, {"y0", f.y0}, {"v1", f.v1}, {"v0", f.v0}};
}

class Search {
 public:
  Search(const ExpandedNetwork& net, const SolveOptions& opt) : net_(net), opt_(opt) {}

  SolveResult run() {
    const auto start = std::chrono::steady_clock::now();
    res_.mode = opt_.mode;
    open_.push_back({next_id_++, {}, -kInfinity, nullptr, 0});
    while (!open_.empty()) {
      const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      if (res_.branches >= opt_.max_branches || elapsed >= opt_.max_time) {
        res_.limit_hit = true;
        break;
      }
      update_bounds();
      if (res_.found && opt_.gap > 0.0 && res_.relative_gap <= opt_.gap) break;
      Node node = pop();
      process(std::move(node));
    }
    res_.closed = open_.empty();
    update_bounds();
    res_.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return std::move(res_);
  }

 private:
  double prune_level() const {
    return res_.upper_bound - opt_.prune_tolerance * std::max(1.0, std::abs(res_.upper_bound));
  }

  void update_bounds() {
    double lb = std::min(res_.upper_bound, leaf_floor_);
    for (const auto& n : open_) lb = std::min(lb, n.bound);
    res_.lower_bound = lb;
    if (res_.found) {
      res_.gap = std::max(0.0, res_.upper_bound - lb);
      res_.relative_gap = res_.gap / std::max(1e-12, std::abs(lb));
    }
  }

  Node pop() {
    auto pick = open_.begin();
    for (auto it = open_.begin(); it != open_.end(); ++it) {
      if (!res_.found) {
        // Depth-first dive until an incumbent exists.
        if (it->depth > pick->depth || (it->depth == pick->depth && it->id > pick->id)) pick = it;
      } else if (it->bound < pick->bound || (it->bound == pick->bound && it->id < pick->id)) {
        pick = it;
      }
    }
    Node n = std::move(*pick);
    open_.erase(pick);
    return n;
  }

  void push_children(const Node& parent, const BranchSolution& sol, double bound, BranchVariable var) {
    auto [one, zero] = child_fixings(net_, parent.fixings, var);
    auto warm = std::make_shared<const Multipliers>(sol.multipliers);
    open_.push_back({next_id_++, std::move(zero), bound, warm, parent.depth + 1});
    open_.push_back({next_id_++, std::move(one), bound, warm, parent.depth + 1});
  }

  void emit(const Node& node, double bound, const BranchSolution* sol, std::string_view status,
            std::string_view stability) {
    if (!opt_.progress) return;
    nlohmann::json j;
    j["branch"] = node.id;
    j["fixings"] = fixings_json(node.fixings);
    j["lower"] = std::isfinite(bound) ? nlohmann::json(bound) : nlohmann::json(nullptr);
    j["upper"] = std::isfinite(res_.upper_bound) ? nlohmann::json(res_.upper_bound) : nlohmann::json(nullptr);
    j["objective"] = sol ? nlohmann::json(sol->objective) : nlohmann::json(nullptr);
    j["gap"] = res_.found && std::isfinite(bound) ? nlohmann::json(res_.upper_bound - bound) : nlohmann::json(nullptr);
    j["status"] = status;
    j["stability"] = stability;
    *opt_.progress << j.dump() << '\n';
  }

  // A free variable that the integral solution operates, for exploring a
  // deferred branch further.
  std::optional<BranchVariable> operated_free(const BranchNetwork& branch, const BranchSolution& sol) const {
    std::optional<BranchVariable> best;
    auto take = [&](BranchVariable v) {
      if (!best || cost_coefficient(net_, v) > cost_coefficient(net_, *best)) best = v;
    };
    for (int l : branch.free_fixed())
      if (sol.y[static_cast<std::size_t>(l)] > 0.5) take({true, l});
    for (int v : branch.free_mod())
      if (sol.v[static_cast<std::size_t>(v)] > 0.5) take({false, v});
    return best;
  }

  void process(Node node) {
    ++res_.branches;
    if (res_.found && node.bound >= prune_level()) {
      emit(node, node.bound, nullptr, "pruned", "n/a");
      return;
    }
    BranchNetwork branch(net_, node.fixings);
    BranchSolution sol = solve_branch(branch, opt_.branch, node.warm.get(), node.bound);
    const double bound = std::max(sol.lower_bound, node.bound);
    if (res_.found && bound >= prune_level()) {
      emit(node, bound, &sol, "pruned", "n/a");
      return;
    }
    if (!sol.integral) {
      push_children(node, sol, bound, branch_select(branch, sol, opt_.branch.integrality_tolerance));
      emit(node, bound, &sol, "fractional", "n/a");
      return;
    }
    if (!sol.capacity_feasible) {
      // Integral designs whose recovered flows overload a link cannot be
      // accepted; the branch stays unresolved.
      leaf_floor_ = std::min(leaf_floor_, bound);
      emit(node, bound, &sol, "capacity_infeasible", "n/a");
      return;
    }
    if (bound < sol.objective) leaf_floor_ = std::min(leaf_floor_, bound);
    if (opt_.mode == SolveMode::exact) {
      if (sol.objective < res_.upper_bound) {
        res_.upper_bound = sol.objective;
        res_.best = std::move(sol);
        res_.found = true;
        emit(node, bound, &res_.best, "incumbent", "n/a");
      } else {
        emit(node, bound, &sol, "integral", "n/a");
      }
      return;
    }

    StabilityVerdict verdict = assess_stability(net_, sol, opt_.stability);
    const double candidate = verdict.stable ? sol.objective : sol.objective + verdict.subsidy.total;
    const std::string_view tag = verdict.stable ? "stable" : "subsidized";
    if (verdict.stable) res_.locally_stable.push_back(sol);
    if (candidate < res_.upper_bound) {
      res_.upper_bound = candidate;
      res_.best = std::move(sol);
      res_.verdict = std::move(verdict);
      res_.found = true;
      emit(node, bound, &res_.best, "incumbent", tag);
      return;
    }
    if (sol.objective < res_.upper_bound) {
      res_.deferred.push_back(node.fixings);
      if (auto var = operated_free(branch, sol)) push_children(node, sol, bound, *var);
      emit(node, bound, &sol, "deferred", tag);
      return;
    }
    emit(node, bound, &sol, "integral", tag);
  }

  const ExpandedNetwork& net_;
  const SolveOptions& opt_;
  SolveResult res_;
  std::vector<Node> open_;
  long next_id_ = 0;
  double leaf_floor_ = kInfinity;
};

}  // namespace

SolveResult solve_L1(const ExpandedNetwork& net, const SolveOptions& options) {
  SolveOptions opt = options;
  opt.mode = SolveMode::exact;
  return Search(net, opt).run();
}

SolveResult solve_L1S(const ExpandedNetwork& net, const SolveOptions& options) {
  SolveOptions opt = options;
  opt.mode = SolveMode::heuristic;
  return Search(net, opt).run();
}

SolveResult solve(const ExpandedNetwork& net, const SolveOptions& options) {
  return options.mode == SolveMode::exact ? solve_L1(net, options) : solve_L1S(net, options);
}

}  // namespace maas
