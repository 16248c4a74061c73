#include "maas/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <thread>

namespace maas {

Multipliers Multipliers::zero(const ExpandedNetwork& net) {
  Multipliers m;
  m.gamma.assign(net.link_count(), 0.0);
  m.beta.assign(net.groups().size(), std::vector<double>(net.link_count(), 0.0));
  return m;
}

BranchNetwork::BranchNetwork(const ExpandedNetwork& net, BranchFixings fixings)
    : net_(&net), fix_(std::move(fixings)) {
  for (int v : fix_.y1) {
    if (fix_.y0.count(v)) throw std::invalid_argument("link fixed to both 0 and 1");
  }
  for (int v : fix_.v1) {
    if (fix_.v0.count(v)) throw std::invalid_argument("MOD node fixed to both 0 and 1");
  }
  std::set<int> closed = fix_.v0;
  // Fixing a node open in one fleet layer closes the operator's other layers.
  for (int v : fix_.v1) {
    const auto& vx = net.vertex(v);
    for (const auto& layer : net.operators()[static_cast<std::size_t>(vx.op)].layers) {
      if (layer.fleet == vx.fleet) continue;
      closed.insert(layer.nodes.begin(), layer.nodes.end());
    }
  }
  node_open_.assign(net.vertex_count(), 1);
  for (int v : closed) node_open_[static_cast<std::size_t>(v)] = 0;

  std::vector<char> group_has_one(net.option_groups().size(), 0);
  for (int l : fix_.y1) group_has_one[static_cast<std::size_t>(net.link(l).option_group)] = 1;

  active_.assign(net.link_count(), 1);
  for (std::size_t i = 0; i < net.link_count(); ++i) {
    const auto& l = net.links()[i];
    const int li = static_cast<int>(i);
    switch (l.kind) {
      case LinkKind::fixed_route:
        if (fix_.y0.count(li)) active_[i] = 0;
        if (group_has_one[static_cast<std::size_t>(l.option_group)] && !fix_.y1.count(li)) active_[i] = 0;
        break;
      case LinkKind::mod_link:
        if (!node_open_[static_cast<std::size_t>(l.tail)] || !node_open_[static_cast<std::size_t>(l.head)]) {
          active_[i] = 0;
        }
        break;
      case LinkKind::mod_access:
      case LinkKind::mod_egress:
        if (!node_open_[static_cast<std::size_t>(l.mod_node)]) active_[i] = 0;
        break;
      default: break;
    }
  }
  for (int l : net.fixed_links()) {
    if (!active(l)) continue;
    active_fixed_.push_back(l);
    if (!y_fixed_one(l)) free_fixed_.push_back(l);
  }
  for (int v : net.mod_vertices()) {
    if (node_open(v) && !v_fixed_one(v)) free_mod_.push_back(v);
  }
}

bool BranchNetwork::usable(int link, int group) const {
  if (!active(link)) return false;
  const auto& l = net_->link(link);
  return l.kind != LinkKind::dummy || l.group == group;
}

double BranchNetwork::effective_capacity(int link) const {
  return std::min(net_->link(link).capacity, net_->total_demand());
}

double BranchNetwork::forcing_bound(int group, int link) const {
  return std::min(net_->groups()[static_cast<std::size_t>(group)].demand, net_->link(link).capacity);
}

FlowState FlowState::on_dummies(const ExpandedNetwork& net) {
  FlowState f;
  f.group_flow.assign(net.groups().size(), std::vector<double>(net.link_count(), 0.0));
  f.link_flow.assign(net.link_count(), 0.0);
  f.path_flow.assign(net.groups().size(), {});
  for (std::size_t g = 0; g < net.groups().size(); ++g) {
    const auto& grp = net.groups()[g];
    f.path_flow[g][{grp.dummy_link}] = grp.demand;
    f.group_flow[g][static_cast<std::size_t>(grp.dummy_link)] = grp.demand;
    f.link_flow[static_cast<std::size_t>(grp.dummy_link)] += grp.demand;
  }
  return f;
}

bool PathSet::add(int group, const LinkPath& path) {
  const auto g = static_cast<std::size_t>(group);
  if (!seen_[g].insert(path).second) return false;
  paths_[g].push_back(path);
  return true;
}

std::size_t PathSet::size() const {
  std::size_t n = 0;
  for (const auto& p : paths_) n += p.size();
  return n;
}

double reduced_operating_cost(const BranchNetwork& branch, const Multipliers& mult, int link) {
  const auto& net = branch.net();
  double c = net.link(link).operating_cost;
  for (std::size_t g = 0; g < net.groups().size(); ++g) {
    c -= branch.forcing_bound(static_cast<int>(g), link) * mult.beta[g][static_cast<std::size_t>(link)];
  }
  return c;
}

namespace {

double node_unit_cost(const BranchNetwork& branch, int mod_vertex) {
  if (branch.v_fixed_one(mod_vertex)) return 0.0;
  return branch.net().vertex(mod_vertex).opening_cost / branch.net().total_demand();
}

}  // namespace

std::vector<std::vector<double>> linear_costs(const BranchNetwork& branch, const Multipliers& mult) {
  const auto& net = branch.net();
  const auto L = net.link_count();
  // Group-independent part first.
  std::vector<double> common(L, kInfinity);
  for (std::size_t i = 0; i < L; ++i) {
    const int li = static_cast<int>(i);
    if (!branch.active(li)) continue;
    const auto& l = net.links()[i];
    switch (l.kind) {
      case LinkKind::fixed_route: {
        double c = l.travel_cost + mult.gamma[i];
        if (!branch.y_fixed_one(li)) {
          c += std::max(0.0, reduced_operating_cost(branch, mult, li)) / branch.effective_capacity(li);
        }
        common[i] = c;
        break;
      }
      case LinkKind::walking:
      case LinkKind::transfer:
      case LinkKind::dummy: common[i] = l.travel_cost; break;
      case LinkKind::mod_link:
        common[i] = l.travel_cost + l.unit_operating_cost + node_unit_cost(branch, l.mod_node);
        break;
      case LinkKind::mod_egress: common[i] = node_unit_cost(branch, l.mod_node); break;
      case LinkKind::mod_access: common[i] = 0.0; break;
    }
  }
  std::vector<std::vector<double>> lin(net.groups().size(), common);
  for (std::size_t g = 0; g < net.groups().size(); ++g) {
    for (int l : branch.active_fixed()) lin[g][static_cast<std::size_t>(l)] += mult.beta[g][static_cast<std::size_t>(l)];
    for (std::size_t i = 0; i < L; ++i) {
      const auto& l = net.links()[i];
      if (l.kind == LinkKind::dummy && l.group != static_cast<int>(g)) lin[g][i] = kInfinity;
    }
  }
  return lin;
}

double adjusted_cost(const BranchNetwork& branch, const Multipliers& mult, int link, int group,
                     double access_flow) {
  const auto& l = branch.net().link(link);
  if (!branch.usable(link, group)) return kInfinity;
  if (l.kind == LinkKind::mod_access) return mod_access_marginal_cost(access_flow, l.fleet, l.access);
  const auto lin = linear_costs(branch, mult);
  return lin[static_cast<std::size_t>(group)][static_cast<std::size_t>(link)];
}

double relaxed_objective(const BranchNetwork& branch, const std::vector<std::vector<double>>& lin,
                         const std::vector<std::vector<double>>& group_flow,
                         const std::vector<double>& link_flow) {
  const auto& net = branch.net();
  double obj = 0.0;
  for (std::size_t g = 0; g < group_flow.size(); ++g) {
    for (std::size_t i = 0; i < group_flow[g].size(); ++i) {
      const double x = group_flow[g][i];
      if (x != 0.0) obj += lin[g][i] * x;
    }
  }
  for (std::size_t i = 0; i < net.link_count(); ++i) {
    const auto& l = net.links()[i];
    if (l.kind != LinkKind::mod_access || link_flow[i] == 0.0) continue;
    obj += mod_access_cost(link_flow[i], l.fleet, l.access) * link_flow[i];
  }
  return obj;
}

AonResult all_or_nothing(const BranchNetwork& branch, const std::vector<std::vector<double>>& lin,
                         const std::vector<double>& link_flow, int threads) {
  const auto& net = branch.net();
  const auto G = net.groups().size();
  const auto L = net.link_count();
  std::vector<std::pair<int, double>> access;
  for (std::size_t i = 0; i < L; ++i) {
    const auto& l = net.links()[i];
    if (l.kind == LinkKind::mod_access && branch.active(static_cast<int>(i))) {
      access.push_back({static_cast<int>(i), mod_access_marginal_cost(link_flow[i], l.fleet, l.access)});
    }
  }
  AonResult out;
  out.group_flow.assign(G, std::vector<double>(L, 0.0));
  out.paths.assign(G, {});
  auto run = [&](std::size_t g) {
    std::vector<double> cost = lin[g];
    for (const auto& [l, c] : access) cost[static_cast<std::size_t>(l)] = c;
    const auto& grp = net.groups()[g];
    auto sp = shortest_path(net, cost, grp.origin, grp.destination);
    if (!sp) throw std::logic_error("group has no path although its dummy link exists");
    for (int l : sp->links) out.group_flow[g][static_cast<std::size_t>(l)] += grp.demand;
    out.paths[g] = std::move(sp->links);
  };
  if (threads <= 1 || G < 2) {
    for (std::size_t g = 0; g < G; ++g) run(g);
  } else {
    const auto workers = std::min<std::size_t>(static_cast<std::size_t>(threads), G);
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t g = w; g < G; g += workers) run(g);
      });
    }
  }
  out.link_flow.assign(L, 0.0);
  for (std::size_t g = 0; g < G; ++g) {
    for (std::size_t i = 0; i < L; ++i) out.link_flow[i] += out.group_flow[g][i];
  }
  return out;
}

namespace {

struct Direction {
  double linear = 0.0;  // constant part of the directional derivative
  std::vector<std::tuple<double, double, const Link*>> access;  // (X, dX, link)

  double derivative(double alpha) const {
    double g = linear;
    for (const auto& [x, dx, l] : access) {
      g += mod_access_marginal_cost(std::max(0.0, x + alpha * dx), l->fleet, l->access) * dx;
    }
    return g;
  }
};

Direction direction(const BranchNetwork& branch, const std::vector<std::vector<double>>& lin,
                    const FlowState& fx, const AonResult& fy) {
  const auto& net = branch.net();
  Direction d;
  for (std::size_t g = 0; g < fx.group_flow.size(); ++g) {
    for (std::size_t i = 0; i < net.link_count(); ++i) {
      const double delta = fy.group_flow[g][i] - fx.group_flow[g][i];
      if (delta != 0.0) d.linear += lin[g][i] * delta;
    }
  }
  for (std::size_t i = 0; i < net.link_count(); ++i) {
    const auto& l = net.links()[i];
    if (l.kind != LinkKind::mod_access) continue;
    const double dx = fy.link_flow[i] - fx.link_flow[i];
    if (dx != 0.0) d.access.push_back({fx.link_flow[i], dx, &l});
  }
  return d;
}

double search(const Direction& d) {
  if (d.derivative(0.0) >= 0.0) return 0.0;
  if (d.derivative(1.0) <= 0.0) return 1.0;
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double g = d.derivative(mid);
    if (std::abs(g) < 1e-10) return mid;
    (g < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double line_search(const BranchNetwork& branch, const std::vector<std::vector<double>>& lin,
                   const FlowState& fx, const AonResult& fy) {
  return search(direction(branch, lin, fx, fy));
}

FlowState frank_wolfe(const BranchNetwork& branch, const Multipliers& mult, const FwOptions& opt,
                      PathSet* paths) {
  const auto& net = branch.net();
  const auto lin = linear_costs(branch, mult);
  FlowState fx = FlowState::on_dummies(net);
  if (paths) {
    for (std::size_t g = 0; g < net.groups().size(); ++g) {
      paths->add(static_cast<int>(g), {net.groups()[g].dummy_link});
    }
  }
  fx.objective = relaxed_objective(branch, lin, fx.group_flow, fx.link_flow);
  int consecutive = 0;
  while (fx.iterations < opt.max_iterations) {
    ++fx.iterations;
    AonResult fy = all_or_nothing(branch, lin, fx.link_flow, opt.threads);
    if (paths) {
      for (std::size_t g = 0; g < fy.paths.size(); ++g) paths->add(static_cast<int>(g), fy.paths[g]);
    }
    const Direction d = direction(branch, lin, fx, fy);
    const double g0 = d.derivative(0.0);
    fx.lower_bound = std::max(fx.lower_bound, fx.objective + g0);
    fx.gap = -g0;
    if (fx.gap <= 1e-12 * std::max(1.0, std::abs(fx.objective))) {
      fx.converged = true;
      if (opt.trace) *opt.trace << fx.iterations << ",0," << fx.objective << '\n';
      break;
    }
    const double alpha = search(d);
    if (alpha > 0.0) {
      for (std::size_t g = 0; g < fx.group_flow.size(); ++g) {
        auto& row = fx.group_flow[g];
        const auto& y = fy.group_flow[g];
        for (std::size_t i = 0; i < row.size(); ++i) row[i] += alpha * (y[i] - row[i]);
      }
      for (std::size_t i = 0; i < fx.link_flow.size(); ++i) {
        fx.link_flow[i] += alpha * (fy.link_flow[i] - fx.link_flow[i]);
      }
      for (std::size_t g = 0; g < fx.path_flow.size(); ++g) {
        auto& pf = fx.path_flow[g];
        for (auto it = pf.begin(); it != pf.end();) {
          it->second *= 1.0 - alpha;
          it = it->second <= 0.0 ? pf.erase(it) : std::next(it);
        }
        pf[fy.paths[g]] += alpha * net.groups()[g].demand;
      }
      fx.objective = relaxed_objective(branch, lin, fx.group_flow, fx.link_flow);
    }
    if (opt.trace) *opt.trace << fx.iterations << ',' << alpha << ',' << fx.objective << '\n';
    consecutive = alpha < opt.epsilon ? consecutive + 1 : 0;
    if (consecutive >= opt.consecutive) {
      fx.converged = true;
      break;
    }
  }
  return fx;
}

}  // namespace maas
