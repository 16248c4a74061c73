#include "maas/lagrangian.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <set>

#include "maas/lp.hpp"

namespace maas {

double lagrangian_bound(const BranchNetwork& branch, const Multipliers& mult, double relaxed_lower_bound) {
  double lb = relaxed_lower_bound;
  for (int l : branch.active_fixed()) {
    lb -= mult.gamma[static_cast<std::size_t>(l)] * branch.effective_capacity(l);
    const double cb = reduced_operating_cost(branch, mult, l);
    if (branch.y_fixed_one(l) || cb < 0.0) lb += cb;
  }
  for (int v : branch.fixings().v1) {
    if (branch.node_open(v)) lb += branch.net().vertex(v).opening_cost;
  }
  return lb;
}

SubgradientResult subgradient(const BranchNetwork& branch, const SubgradientOptions& opt,
                              const Multipliers* warm, double parent_bound) {
  const auto& net = branch.net();
  SubgradientResult res;
  res.paths = PathSet(net.groups().size());
  Multipliers mult = warm ? *warm : Multipliers::zero(net);
  res.lower_bound = parent_bound;
  // Links outside the branch keep zero multipliers.
  for (int l : net.fixed_links()) {
    if (branch.active(l)) continue;
    mult.gamma[static_cast<std::size_t>(l)] = 0.0;
    for (auto& b : mult.beta) b[static_cast<std::size_t>(l)] = 0.0;
  }
  for (int k = 1; k <= opt.max_iterations; ++k) {
    mult.iteration = k;
    mult.theta = 1.0 / k;
    FlowState fs = frank_wolfe(branch, mult, opt.fw, &res.paths);
    const double lb = lagrangian_bound(branch, mult, fs.lower_bound);
    res.lower_bound = std::max(res.lower_bound, lb);

    double step2 = 0.0;
    Multipliers next = mult;
    for (int l : branch.active_fixed()) {
      const auto li = static_cast<std::size_t>(l);
      const double g = std::max(0.0, mult.gamma[li] + mult.theta * (fs.link_flow[li] - branch.effective_capacity(l)));
      step2 += (g - mult.gamma[li]) * (g - mult.gamma[li]);
      next.gamma[li] = g;
      for (std::size_t s = 0; s < net.groups().size(); ++s) {
        const double b = std::max(
            0.0, mult.beta[s][li] + mult.theta * (fs.group_flow[s][li] - branch.forcing_bound(static_cast<int>(s), l)));
        step2 += (b - mult.beta[s][li]) * (b - mult.beta[s][li]);
        next.beta[s][li] = b;
      }
    }
    const double step = std::sqrt(step2);
    if (opt.trace) *opt.trace << k << ',' << step << ',' << lb << '\n';
    res.flows = std::move(fs);
    res.multipliers = mult;
    res.iterations = k;
    if (step < opt.epsilon) {
      res.converged = true;
      break;
    }
    mult = std::move(next);
  }
  return res;
}

double node_throughput(const ExpandedNetwork& net, const std::vector<double>& link_flow, int mod_vertex) {
  double t = 0.0;
  for (int l : net.out_links(mod_vertex)) t += link_flow[static_cast<std::size_t>(l)];
  return t;
}

DesignValues recover_integers(const BranchNetwork& branch, const Multipliers& mult,
                              const std::vector<double>& link_flow) {
  const auto& net = branch.net();
  DesignValues d;
  d.y.assign(net.link_count(), 0.0);
  d.v.assign(net.vertex_count(), 0.0);
  for (int l : branch.active_fixed()) {
    const auto li = static_cast<std::size_t>(l);
    if (branch.y_fixed_one(l) || reduced_operating_cost(branch, mult, l) < 0.0) {
      d.y[li] = 1.0;
    } else {
      d.y[li] = std::min(1.0, link_flow[li] / branch.effective_capacity(l));
    }
  }
  for (int v : net.mod_vertices()) {
    const auto vi = static_cast<std::size_t>(v);
    if (!branch.node_open(v)) continue;
    d.v[vi] = branch.v_fixed_one(v) ? 1.0 : std::min(1.0, node_throughput(net, link_flow, v) / net.total_demand());
  }
  return d;
}

void aggregate(const ExpandedNetwork& net, const std::vector<PathFlow>& paths,
               std::vector<std::vector<double>>& group_flow, std::vector<double>& link_flow) {
  group_flow.assign(net.groups().size(), std::vector<double>(net.link_count(), 0.0));
  link_flow.assign(net.link_count(), 0.0);
  for (const auto& p : paths) {
    for (int l : p.links) {
      group_flow[static_cast<std::size_t>(p.group)][static_cast<std::size_t>(l)] += p.flow;
      link_flow[static_cast<std::size_t>(l)] += p.flow;
    }
  }
}

namespace {

bool path_allowed(const BranchNetwork& branch, int group, const LinkPath& path,
                  const std::vector<char>& excluded) {
  for (int l : path) {
    if (!branch.usable(l, group)) return false;
    if (!excluded.empty() && excluded[static_cast<std::size_t>(l)]) return false;
  }
  return true;
}

}  // namespace

std::optional<RecoveryResult> recover_path_flows(const BranchNetwork& branch, const PathSet& paths,
                                                 const FlowState& flows, const Multipliers& mult,
                                                 const RecoveryOptions& options) {
  const auto& net = branch.net();
  const auto lin = linear_costs(branch, mult);
  lp::LinearProgram prog(lp::Sense::minimize);
  struct Var {
    int group;
    const LinkPath* path;
  };
  std::vector<Var> vars;
  std::map<int, std::vector<lp::Term>> pins;
  std::map<int, std::vector<lp::Term>> cap_terms;
  for (std::size_t g = 0; g < net.groups().size(); ++g) {
    std::vector<lp::Term> demand;
    for (const auto& path : paths.of(static_cast<int>(g))) {
      if (!path_allowed(branch, static_cast<int>(g), path, options.excluded_links)) continue;
      double c = 0.0;
      for (int l : path) {
        const auto& lk = net.link(l);
        const auto li = static_cast<std::size_t>(l);
        c += lk.kind == LinkKind::mod_access ? mod_access_cost(flows.link_flow[li], lk.fleet, lk.access) : lin[g][li];
      }
      const int var = prog.add_variable(c);
      vars.push_back({static_cast<int>(g), &path});
      demand.push_back({var, 1.0});
      for (int l : path) {
        const auto kind = net.link(l).kind;
        if (kind == LinkKind::mod_access || kind == LinkKind::mod_link) pins[l].push_back({var, 1.0});
        if (kind == LinkKind::fixed_route && std::isfinite(net.link(l).capacity)) cap_terms[l].push_back({var, 1.0});
      }
    }
    if (demand.empty()) return std::nullopt;
    prog.add_row(std::move(demand), lp::Relation::equal, net.groups()[g].demand);
  }
  // With excluded links the pinned flows may include excluded routes, so the
  // pins only cap the MOD flows.
  const bool snapping = std::any_of(options.excluded_links.begin(), options.excluded_links.end(),
                                    [](char c) { return c != 0; });
  for (auto& [l, terms] : pins) {
    prog.add_row(std::move(terms), snapping ? lp::Relation::less_equal : lp::Relation::equal,
                 flows.link_flow[static_cast<std::size_t>(l)]);
  }

  auto collect = [&](const lp::LpSolution& sol) {
    RecoveryResult r;
    r.from_lp = true;
    for (std::size_t k = 0; k < vars.size(); ++k) {
      const double x = sol.x[k];
      if (x > 1e-9) r.paths.push_back({vars[k].group, *vars[k].path, x});
    }
    return r;
  };
  auto violates_capacity = [&](const RecoveryResult& r) {
    std::vector<std::vector<double>> gf;
    std::vector<double> lf;
    aggregate(net, r.paths, gf, lf);
    for (int l : branch.active_fixed()) {
      const double w = net.link(l).capacity;
      if (lf[static_cast<std::size_t>(l)] > w * (1.0 + options.capacity_repair)) return true;
    }
    return false;
  };

  lp::Simplex simplex(prog);
  const auto& sol = simplex.solve();
  if (sol.optimal()) {
    RecoveryResult r = collect(sol);
    if (violates_capacity(r) && !cap_terms.empty()) {
      std::vector<lp::Row> rows;
      for (auto& [l, terms] : cap_terms) {
        rows.push_back({terms, lp::Relation::less_equal, net.link(l).capacity, {}});
      }
      const auto& repaired = simplex.add_rows(rows);
      if (repaired.optimal()) {
        r = collect(repaired);
        r.capacity_rows = true;
      }
    }
    return r;
  }
  if (!options.excluded_links.empty()) return std::nullopt;
  // The FW iterate is itself a convex combination of discovered paths.
  RecoveryResult r;
  for (std::size_t g = 0; g < flows.path_flow.size(); ++g) {
    for (const auto& [p, x] : flows.path_flow[g]) {
      if (x > 1e-9) r.paths.push_back({static_cast<int>(g), p, x});
    }
  }
  return r;
}

double branch_objective(const ExpandedNetwork& net, const std::vector<double>& link_flow,
                        const std::vector<double>& y, const std::vector<double>& v) {
  double obj = 0.0;
  for (std::size_t i = 0; i < net.link_count(); ++i) {
    const double x = link_flow[i];
    const auto& l = net.links()[i];
    if (l.kind == LinkKind::fixed_route) obj += l.operating_cost * y[i];
    if (x == 0.0) continue;
    switch (l.kind) {
      case LinkKind::mod_access: obj += mod_access_cost(x, l.fleet, l.access) * x; break;
      case LinkKind::mod_link: obj += (l.travel_cost + l.unit_operating_cost) * x; break;
      default: obj += l.travel_cost * x; break;
    }
  }
  for (int m : net.mod_vertices()) obj += net.vertex(m).opening_cost * v[static_cast<std::size_t>(m)];
  return obj;
}

namespace {

bool near(double x, double target, double tol) { return std::abs(x - target) <= tol; }

// Integral within tolerance and consistent with option and fleet exclusivity.
bool integral_designs(const BranchNetwork& branch, const DesignValues& d, double tol) {
  const auto& net = branch.net();
  for (int l : branch.active_fixed()) {
    const double y = d.y[static_cast<std::size_t>(l)];
    if (!near(y, 0.0, tol) && !near(y, 1.0, tol)) return false;
  }
  for (int v : net.mod_vertices()) {
    const double x = d.v[static_cast<std::size_t>(v)];
    if (!near(x, 0.0, tol) && !near(x, 1.0, tol)) return false;
  }
  for (const auto& grp : net.option_groups()) {
    int ones = 0;
    for (int l : grp) ones += d.y[static_cast<std::size_t>(l)] > 0.5 ? 1 : 0;
    if (ones > 1) return false;
  }
  for (const auto& op : net.operators()) {
    int layers = 0;
    for (const auto& layer : op.layers) {
      bool any = false;
      for (int v : layer.nodes) any = any || d.v[static_cast<std::size_t>(v)] > 0.5;
      layers += any ? 1 : 0;
    }
    if (layers > 1) return false;
  }
  return true;
}

}  // namespace

BranchSolution solve_branch(const BranchNetwork& branch, const BranchOptions& options,
                            const Multipliers* warm, double parent_bound) {
  const auto& net = branch.net();
  BranchSolution sol;
  sol.fixings = branch.fixings();
  SubgradientResult sg = subgradient(branch, options.subgradient, warm, parent_bound);
  sol.lower_bound = sg.lower_bound;
  sol.converged = sg.converged;
  sol.subgradient_iterations = sg.iterations;
  sol.multipliers = sg.multipliers;
  sol.mu = sg.multipliers.gamma;

  auto rec = recover_path_flows(branch, sg.paths, sg.flows, sg.multipliers);
  sol.paths = std::move(rec->paths);
  aggregate(net, sol.paths, sol.group_flow, sol.link_flow);
  DesignValues d = recover_integers(branch, sg.multipliers, sol.link_flow);
  const double tol = options.integrality_tolerance;
  sol.integral = integral_designs(branch, d, tol);

  if (sol.integral) {
    // Snap variables that are integral only within tolerance but still
    // carry flow: their paths are removed and the recovery re-solved.
    RecoveryOptions ro;
    ro.excluded_links.assign(net.link_count(), 0);
    bool snap = false;
    for (int l : branch.active_fixed()) {
      const auto li = static_cast<std::size_t>(l);
      if (d.y[li] < 0.5 && sol.link_flow[li] > 0.0) {
        ro.excluded_links[li] = 1;
        snap = true;
      }
    }
    for (int v : net.mod_vertices()) {
      if (d.v[static_cast<std::size_t>(v)] < 0.5 && node_throughput(net, sol.link_flow, v) > 0.0) {
        for (int l : net.out_links(v)) ro.excluded_links[static_cast<std::size_t>(l)] = 1;
        for (int l : net.in_links(v)) ro.excluded_links[static_cast<std::size_t>(l)] = 1;
        snap = true;
      }
    }
    if (snap) {
      auto snapped = recover_path_flows(branch, sg.paths, sg.flows, sg.multipliers, ro);
      if (snapped) {
        sol.paths = std::move(snapped->paths);
        aggregate(net, sol.paths, sol.group_flow, sol.link_flow);
      } else {
        sol.integral = false;
      }
    }
  }

  if (sol.integral) {
    sol.y.assign(net.link_count(), 0.0);
    sol.v.assign(net.vertex_count(), 0.0);
    for (int l : branch.active_fixed()) {
      const auto li = static_cast<std::size_t>(l);
      sol.y[li] = (d.y[li] > 0.5 && sol.link_flow[li] > 0.0) ? 1.0 : 0.0;
    }
    for (int v : net.mod_vertices()) {
      const auto vi = static_cast<std::size_t>(v);
      sol.v[vi] = (d.v[vi] > 0.5 && node_throughput(net, sol.link_flow, v) > 0.0) ? 1.0 : 0.0;
    }
  } else {
    sol.y = std::move(d.y);
    sol.v = std::move(d.v);
  }
  for (int l : branch.active_fixed()) {
    if (sol.link_flow[static_cast<std::size_t>(l)] > net.link(l).capacity * 1.005) sol.capacity_feasible = false;
  }
  sol.objective = branch_objective(net, sol.link_flow, sol.y, sol.v);
  return sol;
}

}  // namespace maas
