#include "maas/stability.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "maas/lp.hpp"

namespace maas {

std::string_view to_string(OutcomeVertex vertex) {
  return vertex == OutcomeVertex::buyer_optimal ? "buyer_optimal" : "seller_optimal";
}

MatchedPathSet matched_paths(const ExpandedNetwork& net, const std::vector<PathFlow>& paths, double min_flow) {
  MatchedPathSet out;
  out.of_group.resize(net.groups().size());
  out.link_flow.assign(net.link_count(), 0.0);
  std::map<std::pair<int, LinkPath>, std::size_t> index;
  for (const auto& pf : paths) {
    if (pf.flow <= min_flow) continue;
    auto key = std::make_pair(pf.group, pf.links);
    auto it = index.find(key);
    if (it == index.end()) {
      index.emplace(std::move(key), out.paths.size());
      out.of_group[static_cast<std::size_t>(pf.group)].push_back(static_cast<int>(out.paths.size()));
      out.paths.push_back({pf.group, pf.links, pf.flow, 0.0});
    } else {
      out.paths[it->second].flow += pf.flow;
    }
  }
  std::vector<char> fare(net.link_count(), 0);
  for (const auto& p : out.paths) {
    for (int l : p.links) {
      out.link_flow[static_cast<std::size_t>(l)] += p.flow;
      const auto k = net.link(l).kind;
      if (k == LinkKind::fixed_route || k == LinkKind::mod_access) fare[static_cast<std::size_t>(l)] = 1;
    }
  }
  for (std::size_t l = 0; l < fare.size(); ++l)
    if (fare[l]) out.fare_links.push_back(static_cast<int>(l));
  for (auto& p : out.paths) {
    double c = 0.0;
    for (int l : p.links) {
      const auto& link = net.link(l);
      c += link.kind == LinkKind::mod_access
               ? mod_access_cost(out.link_flow[static_cast<std::size_t>(l)], link.fleet, link.access)
               : link.travel_cost;
    }
    p.travel_cost = c;
  }
  return out;
}

namespace {

double at(const std::vector<double>& v, int i) {
  return static_cast<std::size_t>(i) < v.size() ? v[static_cast<std::size_t>(i)] : 0.0;
}

}  // namespace

StabilityProblem::StabilityProblem(const ExpandedNetwork& net, const BranchSolution& matching,
                                   StabilityOptions options)
    : net_(&net), chi_(matching), opt_(options), matched_(matched_paths(net, matching.paths, options.min_path_flow)) {
  base_weights_.assign(net.link_count(), 0.0);
  for (std::size_t i = 0; i < net.link_count(); ++i) {
    const auto& l = net.links()[i];
    const int li = static_cast<int>(i);
    auto node_charge = [&](int vertex) {
      return net.vertex(vertex).opening_cost * (1.0 - at(matching.v, vertex));
    };
    double w = 0.0;
    switch (l.kind) {
      case LinkKind::fixed_route:
        w = l.travel_cost + std::max(0.0, at(matching.mu, li)) + l.operating_cost * (1.0 - at(matching.y, li));
        break;
      case LinkKind::mod_access:
        w = mod_access_cost(matched_.link_flow[i] + 1.0, l.fleet, l.access) + node_charge(l.head);
        break;
      case LinkKind::mod_link:
        w = l.travel_cost + l.unit_operating_cost + node_charge(l.head);
        break;
      case LinkKind::mod_egress:
        w = 0.0;
        break;
      default:
        w = l.travel_cost;
        break;
    }
    base_weights_[i] = w;
  }
}

double StabilityProblem::path_travel_cost(const LinkPath& path) const {
  double c = 0.0;
  for (int l : path) {
    const auto& link = net_->link(l);
    c += link.kind == LinkKind::mod_access
             ? mod_access_cost(matched_.link_flow[static_cast<std::size_t>(l)], link.fleet, link.access)
             : link.travel_cost;
  }
  return c;
}

std::optional<SwitchCandidate> StabilityProblem::separation_oracle(int group, std::span<const double> u,
                                                                   std::span<const double> fares) const {
  const auto& g = net_->groups()[static_cast<std::size_t>(group)];
  std::vector<double> w = base_weights_;
  for (int l : matched_.fare_links) w[static_cast<std::size_t>(l)] += fares[static_cast<std::size_t>(l)];
  for (const auto& other : net_->groups())
    if (other.dummy_link != g.dummy_link) w[static_cast<std::size_t>(other.dummy_link)] = kInfinity;
  auto sp = shortest_path(*net_, w, g.origin, g.destination);
  if (!sp) return std::nullopt;
  const double gain = g.trip_utility - sp->cost - u[static_cast<std::size_t>(group)];
  if (gain <= opt_.violation_tolerance) return std::nullopt;
  for (int r : matched_.of_group[static_cast<std::size_t>(group)])
    if (matched_.paths[static_cast<std::size_t>(r)].links == sp->links) return std::nullopt;
  return SwitchCandidate{std::move(sp->links), sp->cost, gain};
}

int StabilityProblem::count_violations(std::span<const double> u, std::span<const double> fares,
                                       std::vector<SwitchCandidate>* found) const {
  int n = 0;
  for (std::size_t s = 0; s < net_->groups().size(); ++s) {
    auto c = separation_oracle(static_cast<int>(s), u, fares);
    if (!c) continue;
    ++n;
    if (found) found->push_back(std::move(*c));
  }
  return n;
}

std::vector<double> StabilityProblem::operator_costs() const {
  const auto& net = *net_;
  std::vector<double> cost(net.operators().size(), 0.0);
  for (std::size_t i = 0; i < net.link_count(); ++i) {
    const auto& l = net.links()[i];
    if (l.owner == kNone) continue;
    auto& c = cost[static_cast<std::size_t>(l.owner)];
    if (l.kind == LinkKind::fixed_route) c += l.operating_cost * at(chi_.y, static_cast<int>(i));
    if (l.kind == LinkKind::mod_link) c += l.unit_operating_cost * matched_.link_flow[i];
  }
  for (int m : net.mod_vertices()) {
    const auto& v = net.vertex(m);
    cost[static_cast<std::size_t>(v.op)] += v.opening_cost * at(chi_.v, m);
  }
  return cost;
}

std::vector<double> StabilityProblem::operator_revenue(std::span<const double> fares) const {
  std::vector<double> rev(net_->operators().size(), 0.0);
  for (int l : matched_.fare_links) {
    const int owner = net_->link(l).owner;
    if (owner == kNone) continue;
    rev[static_cast<std::size_t>(owner)] +=
        fares[static_cast<std::size_t>(l)] * matched_.link_flow[static_cast<std::size_t>(l)];
  }
  return rev;
}

double StabilityProblem::system_travel_cost() const {
  double s = 0.0;
  for (const auto& p : matched_.paths) s += p.flow * p.travel_cost;
  return s;
}

std::vector<double> StabilityProblem::fare_floor() const {
  const auto& net = *net_;
  std::vector<double> fares(net.link_count(), 0.0);
  const auto cost = operator_costs();
  std::vector<double> access_flow(net.operators().size(), 0.0);
  for (int l : matched_.fare_links) {
    const auto& link = net.link(l);
    if (link.kind == LinkKind::mod_access)
      access_flow[static_cast<std::size_t>(link.owner)] += matched_.link_flow[static_cast<std::size_t>(l)];
  }
  for (int l : matched_.fare_links) {
    const auto& link = net.link(l);
    const double x = matched_.link_flow[static_cast<std::size_t>(l)];
    if (link.kind == LinkKind::fixed_route) {
      fares[static_cast<std::size_t>(l)] = link.operating_cost * at(chi_.y, l) / x;
    } else {
      const auto o = static_cast<std::size_t>(link.owner);
      fares[static_cast<std::size_t>(l)] = access_flow[o] > 0.0 ? cost[o] / access_flow[o] : 0.0;
    }
  }
  return fares;
}

InstabilityDiagnostic StabilityProblem::instability_condition(int r, const LinkPath& alt,
                                                              const std::vector<double>* fares) const {
  const auto& net = *net_;
  const std::vector<double> floor = fares ? std::vector<double>{} : fare_floor();
  const std::vector<double>& p = fares ? *fares : floor;
  const auto& path = matched_.paths.at(static_cast<std::size_t>(r));
  const double xr = path.flow;
  auto operated = [&](int l) { return net.link(l).kind == LinkKind::fixed_route && at(chi_.y, l) > 0.5; };

  InstabilityDiagnostic d;
  for (int l : path.links) {
    d.lhs += xr * at(p, l);
    if (!operated(l)) continue;
    d.lhs -= net.link(l).operating_cost;
    if (matched_.link_flow[static_cast<std::size_t>(l)] > xr + 1e-9) d.rhs -= net.link(l).operating_cost;
  }
  for (int l : alt) {
    d.rhs += xr * std::max(0.0, at(chi_.mu, l)) + xr * at(p, l);
    if (net.link(l).kind == LinkKind::fixed_route && !operated(l)) d.rhs += (xr - 1.0) * net.link(l).operating_cost;
  }
  d.holds = d.lhs > d.rhs + 1e-9;
  return d;
}

struct StabilityProblem::Solved {
  bool feasible = false;
  std::vector<double> u;
  std::vector<double> fares;
  std::vector<double> a;
  std::vector<GeneratedPath> binding;
  int rounds = 0;
  int generated = 0;
};

StabilityProblem::Solved StabilityProblem::run(Mode mode, OutcomeVertex vertex,
                                               const std::vector<double>* subsidies) const {
  using lp::Relation;
  using lp::Term;
  const auto& net = *net_;
  const auto groups = net.groups().size();
  const bool seller = vertex == OutcomeVertex::seller_optimal;
  Solved out;

  lp::LinearProgram prog(mode == Mode::min_subsidy ? lp::Sense::minimize : lp::Sense::maximize);
  std::vector<int> u_var(groups);
  for (std::size_t s = 0; s < groups; ++s)
    u_var[s] = prog.add_variable(mode != Mode::min_subsidy && !seller ? 1.0 : 0.0);
  std::vector<int> p_var(net.link_count(), -1);
  for (int l : matched_.fare_links) {
    const double x = matched_.link_flow[static_cast<std::size_t>(l)];
    p_var[static_cast<std::size_t>(l)] = prog.add_variable(mode != Mode::min_subsidy && seller ? x : 0.0);
  }
  std::vector<int> a_var;
  if (mode == Mode::min_subsidy)
    for (const auto& p : matched_.paths) a_var.push_back(prog.add_variable(p.flow));

  // Operator rationality: fares on an operator's links cover its cost.
  std::vector<std::vector<Term>> op_terms(net.operators().size());
  for (int l : matched_.fare_links) {
    const auto& link = net.link(l);
    op_terms[static_cast<std::size_t>(link.owner)].push_back(
        {p_var[static_cast<std::size_t>(l)], matched_.link_flow[static_cast<std::size_t>(l)]});
  }
  const auto cost = operator_costs();
  for (std::size_t o = 0; o < op_terms.size(); ++o) {
    if (op_terms[o].empty()) {
      if (cost[o] > 1e-9) return out;
      continue;
    }
    prog.add_row(std::move(op_terms[o]), Relation::greater_equal, cost[o], "operator");
  }

  for (std::size_t r = 0; r < matched_.paths.size(); ++r) {
    const auto& path = matched_.paths[r];
    const auto& g = net.groups()[static_cast<std::size_t>(path.group)];
    std::vector<Term> terms{{u_var[static_cast<std::size_t>(path.group)], 1.0}};
    for (int l : path.links)
      if (p_var[static_cast<std::size_t>(l)] >= 0) terms.push_back({p_var[static_cast<std::size_t>(l)], 1.0});
    double rhs = g.trip_utility - path.travel_cost;
    if (mode == Mode::min_subsidy) terms.push_back({a_var[r], -1.0});
    if (mode == Mode::fixed_subsidy && subsidies) rhs += (*subsidies)[r];
    prog.add_row(std::move(terms), Relation::equal, rhs, "payoff");
  }

  lp::Simplex simplex(std::move(prog));
  const lp::LpSolution* sol = &simplex.solve();
  std::vector<GeneratedPath> generated;
  std::vector<lp::Row> generated_rows;
  std::vector<double> u(groups), fares(net.link_count(), 0.0);
  auto extract = [&] {
    for (std::size_t s = 0; s < groups; ++s) u[s] = sol->x[static_cast<std::size_t>(u_var[s])];
    for (int l : matched_.fare_links)
      fares[static_cast<std::size_t>(l)] = sol->x[static_cast<std::size_t>(p_var[static_cast<std::size_t>(l)])];
  };
  while (true) {
    if (sol->status == lp::LpStatus::unbounded) throw std::logic_error("allocation LP is unbounded");
    if (sol->status == lp::LpStatus::iteration_limit) throw std::runtime_error("allocation LP hit its iteration limit");
    if (sol->status == lp::LpStatus::infeasible) return out;
    extract();
    std::vector<lp::Row> rows;
    for (std::size_t s = 0; s < groups; ++s) {
      auto c = separation_oracle(static_cast<int>(s), u, fares);
      if (!c) continue;
      const auto& g = net.groups()[s];
      lp::Row row;
      row.terms.push_back({u_var[s], 1.0});
      double fixed_weight = 0.0;
      for (int l : c->links) {
        fixed_weight += base_weights_[static_cast<std::size_t>(l)];
        if (p_var[static_cast<std::size_t>(l)] >= 0) row.terms.push_back({p_var[static_cast<std::size_t>(l)], 1.0});
      }
      row.relation = Relation::greater_equal;
      row.rhs = g.trip_utility - fixed_weight;
      row.name = "switch";
      rows.push_back(row);
      generated_rows.push_back(std::move(row));
      generated.push_back({static_cast<int>(s), std::move(c->links)});
    }
    if (rows.empty()) break;
    if (++out.rounds > opt_.max_rounds) throw std::runtime_error("row generation did not converge");
    sol = &simplex.add_rows(rows);
  }

  out.feasible = true;
  out.u = u;
  out.fares = fares;
  out.generated = static_cast<int>(generated.size());
  for (auto& a : out.u) a = std::max(0.0, a);
  for (auto& p : out.fares) p = std::max(0.0, p);
  if (mode == Mode::min_subsidy)
    for (int v : a_var) out.a.push_back(std::max(0.0, sol->x[static_cast<std::size_t>(v)]));
  for (std::size_t k = 0; k < generated_rows.size(); ++k) {
    double lhs = 0.0;
    for (const auto& t : generated_rows[k].terms) lhs += t.coef * sol->x[static_cast<std::size_t>(t.var)];
    if (lhs - generated_rows[k].rhs <= 1e-7 * (1.0 + std::abs(generated_rows[k].rhs)))
      out.binding.push_back(std::move(generated[k]));
  }
  return out;
}

StableOutcome StabilityProblem::solve_vertex(OutcomeVertex vertex, const std::vector<double>* subsidies) const {
  Solved s = run(subsidies ? Mode::fixed_subsidy : Mode::payoff, vertex, subsidies);
  StableOutcome o;
  o.vertex = vertex;
  o.feasible = s.feasible;
  o.rounds = s.rounds;
  o.generated_rows = s.generated;
  if (!s.feasible) return o;
  o.u = std::move(s.u);
  o.fares = std::move(s.fares);
  o.binding = std::move(s.binding);
  o.revenue = operator_revenue(o.fares);
  for (double r : o.revenue) o.total_revenue += r;
  return o;
}

SubsidyResult StabilityProblem::min_subsidy() const {
  SubsidyResult res;
  Solved s = run(Mode::min_subsidy, OutcomeVertex::buyer_optimal, nullptr);
  if (!s.feasible) throw std::logic_error("minimum subsidy problem is infeasible");
  auto& plan = res.plan;
  plan.feasible = true;
  plan.a = std::move(s.a);
  for (auto& a : plan.a)
    if (a < 1e-9) a = 0.0;
  for (std::size_t r = 0; r < plan.a.size(); ++r) plan.total += plan.a[r] * matched_.paths[r].flow;
  plan.z_l1s = chi_.objective + plan.total;
  res.buyer = solve_vertex(OutcomeVertex::buyer_optimal, &plan.a);
  res.seller = solve_vertex(OutcomeVertex::seller_optimal, &plan.a);
  return res;
}

double StabilityProblem::conservation_residual(const StableOutcome& outcome,
                                               const std::vector<double>* subsidies) const {
  double lhs = outcome.total_revenue + system_travel_cost();
  double rhs = 0.0;
  for (std::size_t s = 0; s < net_->groups().size(); ++s) {
    const auto& g = net_->groups()[s];
    lhs += g.demand * outcome.u[s];
    rhs += g.demand * g.trip_utility;
  }
  if (subsidies)
    for (std::size_t r = 0; r < matched_.paths.size(); ++r) lhs -= (*subsidies)[r] * matched_.paths[r].flow;
  return lhs - rhs;
}

double StabilityProblem::max_row_violation(const StableOutcome& outcome, const std::vector<double>* subsidies) const {
  double worst = 0.0;
  for (double u : outcome.u) worst = std::max(worst, -u);
  for (double p : outcome.fares) worst = std::max(worst, -p);
  const auto cost = operator_costs();
  const auto rev = operator_revenue(outcome.fares);
  for (std::size_t o = 0; o < cost.size(); ++o) worst = std::max(worst, cost[o] - rev[o]);
  for (std::size_t r = 0; r < matched_.paths.size(); ++r) {
    const auto& path = matched_.paths[r];
    const auto& g = net_->groups()[static_cast<std::size_t>(path.group)];
    double lhs = outcome.u[static_cast<std::size_t>(path.group)];
    for (int l : path.links) lhs += outcome.fares[static_cast<std::size_t>(l)];
    double rhs = g.trip_utility - path.travel_cost + (subsidies ? (*subsidies)[r] : 0.0);
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return worst;
}

double wardrop_violation(const ExpandedNetwork& net, const std::vector<PathFlow>& paths,
                         const std::vector<double>& link_flow) {
  std::vector<double> cost(net.link_count(), 0.0);
  for (std::size_t i = 0; i < net.link_count(); ++i) {
    const auto& l = net.links()[i];
    switch (l.kind) {
      case LinkKind::mod_access: cost[i] = mod_access_cost(link_flow[i], l.fleet, l.access); break;
      case LinkKind::mod_link: cost[i] = l.travel_cost + l.unit_operating_cost; break;
      case LinkKind::mod_egress: cost[i] = 0.0; break;
      default: cost[i] = l.travel_cost; break;
    }
  }
  double worst = 0.0;
  for (std::size_t s = 0; s < net.groups().size(); ++s) {
    const auto& g = net.groups()[s];
    std::vector<double> w = cost;
    for (const auto& other : net.groups())
      if (other.dummy_link != g.dummy_link) w[static_cast<std::size_t>(other.dummy_link)] = kInfinity;
    auto sp = shortest_path(net, w, g.origin, g.destination);
    if (!sp) continue;
    for (const auto& pf : paths) {
      if (pf.group != static_cast<int>(s) || pf.flow <= 1e-9) continue;
      worst = std::max(worst, path_cost(w, pf.links) - sp->cost);
    }
  }
  return worst;
}

Scenario beckmann_transform(Scenario scenario) {
  for (auto& op : scenario.mod_operators) op.access.a1 /= op.access.b1 + 1.0;
  return scenario;
}

}  // namespace maas
