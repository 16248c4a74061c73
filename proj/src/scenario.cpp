#include "maas/scenario.hpp"

#include <cmath>
#include <set>
#include <string>

namespace maas {

namespace {

bool nonnegative(double v) { return std::isfinite(v) && v >= 0.0; }

class Collector {
 public:
  void add(std::string field, std::string rule) {
    out_.push_back({std::move(field), std::move(rule)});
  }
  void require_nonnegative(const std::string& field, double v) {
    if (std::isnan(v)) {
      add(field, "missing or not a number");
    } else if (!nonnegative(v)) {
      add(field, "must be finite and nonnegative");
    }
  }
  std::vector<Violation> take() { return std::move(out_); }

 private:
  std::vector<Violation> out_;
};

std::string idx(const std::string& base, std::size_t i) {
  return base + "[" + std::to_string(i) + "]";
}

}  // namespace

std::vector<Violation> validate(const Scenario& s) {
  Collector c;
  std::set<NodeId> all_nodes;
  std::set<NodeId> centroids;
  for (std::size_t i = 0; i < s.nodes.size(); ++i) {
    if (!all_nodes.insert(s.nodes[i].id).second) {
      c.add(idx("nodes", i) + ".id", "duplicate node id " + std::to_string(s.nodes[i].id));
    }
    if (s.nodes[i].kind == NodeKind::centroid) centroids.insert(s.nodes[i].id);
  }
  auto check_endpoint = [&](const std::string& field, NodeId n) {
    if (!all_nodes.count(n)) c.add(field, "references unknown node " + std::to_string(n));
  };

  auto check_base = [&](const std::string& name, const std::vector<BaseLink>& links) {
    for (std::size_t i = 0; i < links.size(); ++i) {
      const auto f = idx(name, i);
      check_endpoint(f + ".from", links[i].tail);
      check_endpoint(f + ".to", links[i].head);
      if (links[i].tail == links[i].head) c.add(f, "self loop");
      c.require_nonnegative(f + ".travel_cost", links[i].travel_cost);
    }
  };
  check_base("walking_links", s.walking_links);
  check_base("transfer_links", s.transfer_links);

  std::set<OperatorId> op_ids;
  for (std::size_t k = 0; k < s.fixed_route_operators.size(); ++k) {
    const auto& op = s.fixed_route_operators[k];
    const auto fo = idx("fixed_route_operators", k);
    if (!op_ids.insert(op.id).second) c.add(fo + ".id", "duplicate operator id");
    std::set<std::pair<NodeId, NodeId>> pairs;
    for (std::size_t i = 0; i < op.links.size(); ++i) {
      const auto& l = op.links[i];
      const auto fl = idx(fo + ".links", i);
      check_endpoint(fl + ".from", l.tail);
      check_endpoint(fl + ".to", l.head);
      if (l.tail == l.head) c.add(fl, "self loop");
      if (!pairs.insert({l.tail, l.head}).second) {
        c.add(fl, "duplicate (from, to) pair within operator");
      }
      if (l.options.empty()) c.add(fl + ".options", "each link needs at least one frequency option");
      for (std::size_t a = 0; a < l.options.size(); ++a) {
        const auto& o = l.options[a];
        const auto fopt = idx(fl + ".options", a);
        c.require_nonnegative(fopt + ".travel_cost", o.travel_cost);
        c.require_nonnegative(fopt + ".operating_cost", o.operating_cost);
        if (std::isnan(o.capacity) || !(o.capacity > 0.0)) {
          c.add(fopt + ".capacity", "capacity must be positive");
        }
        for (std::size_t b = 0; b < a; ++b) {
          if (l.options[b] == o) c.add(fopt, "options within one link group must be distinct");
        }
      }
    }
  }

  for (std::size_t k = 0; k < s.mod_operators.size(); ++k) {
    const auto& op = s.mod_operators[k];
    const auto fo = idx("mod_operators", k);
    if (!op_ids.insert(op.id).second) c.add(fo + ".id", "duplicate operator id");
    if (op.zones.size() < 1) c.add(fo + ".zones", "at least one candidate zone required");
    std::set<NodeId> zs;
    for (std::size_t i = 0; i < op.zones.size(); ++i) {
      if (!centroids.count(op.zones[i])) {
        c.add(idx(fo + ".zones", i), "zone must be a declared centroid");
      }
      if (!zs.insert(op.zones[i]).second) c.add(idx(fo + ".zones", i), "duplicate zone");
    }
    if (op.fleet_sizes.empty()) c.add(fo + ".fleet_sizes", "at least one fleet option required");
    std::set<int> hs;
    for (std::size_t i = 0; i < op.fleet_sizes.size(); ++i) {
      if (op.fleet_sizes[i] < 1) c.add(idx(fo + ".fleet_sizes", i), "fleet size must be a positive integer");
      if (!hs.insert(op.fleet_sizes[i]).second) c.add(idx(fo + ".fleet_sizes", i), "duplicate fleet size");
    }
    if (std::isnan(op.access.a1) || !(op.access.a1 > 0.0)) c.add(fo + ".access.a1", "a1 > 0");
    if (!std::isfinite(op.access.b1) || op.access.b1 < 0.0) c.add(fo + ".access.b1", "b1 >= 0");
    if (!std::isfinite(op.access.b2)) c.add(fo + ".access.b2", "b2 must be finite");
    if (std::isnan(op.operating.a2) || std::isnan(op.operating.b3) || !(op.operating.a2 > 0.0) ||
        !(op.operating.b3 > 0.0)) {
      c.add(fo + ".operating", "a2 > 0 and b3 > 0");
    }
    if (op.opening_cost.size() != op.zones.size()) {
      c.add(fo + ".node_opening_cost", "one opening cost per zone required");
    }
    for (std::size_t i = 0; i < op.opening_cost.size(); ++i) {
      c.require_nonnegative(idx(fo + ".node_opening_cost", i), op.opening_cost[i]);
    }
    const auto& rule = op.link_travel_cost;
    if (rule.rule == ModTravelCost::Rule::shortest_path_factor) {
      c.require_nonnegative(fo + ".link_travel_cost.factor", rule.factor);
    } else {
      std::set<std::pair<NodeId, NodeId>> have;
      for (std::size_t i = 0; i < rule.entries.size(); ++i) {
        const auto& e = rule.entries[i];
        const auto fe = idx(fo + ".link_travel_cost.entries", i);
        if (!zs.count(e.from) || !zs.count(e.to)) c.add(fe, "entry endpoints must be candidate zones");
        c.require_nonnegative(fe + ".travel_cost", e.travel_cost);
        have.insert({e.from, e.to});
      }
      for (NodeId a : op.zones) {
        for (NodeId b : op.zones) {
          if (a != b && !have.count({a, b})) {
            c.add(fo + ".link_travel_cost.entries",
                  "missing pair " + std::to_string(a) + "->" + std::to_string(b));
          }
        }
      }
    }
  }

  std::set<GroupId> gids;
  if (s.traveler_groups.empty()) c.add("traveler_groups", "at least one traveler group required");
  for (std::size_t i = 0; i < s.traveler_groups.size(); ++i) {
    const auto& g = s.traveler_groups[i];
    const auto fg = idx("traveler_groups", i);
    if (!gids.insert(g.id).second) c.add(fg + ".id", "duplicate group id");
    if (!centroids.count(g.origin)) c.add(fg + ".origin", "origin must be a declared centroid");
    if (!centroids.count(g.destination)) c.add(fg + ".destination", "destination must be a declared centroid");
    if (g.origin == g.destination) c.add(fg, "origin equals destination");
    if (std::isnan(g.demand)) {
      c.add(fg + ".demand", "missing or not a number");
    } else if (!(g.demand > 0.0) || !std::isfinite(g.demand)) {
      c.add(fg + ".demand", "demand must be positive");
    }
    c.require_nonnegative(fg + ".trip_utility", g.trip_utility);
    if (g.optout_disutility) {
      c.require_nonnegative(fg + ".optout_disutility", *g.optout_disutility);
      if (*g.optout_disutility > g.trip_utility) {
        c.add(fg + ".optout_disutility", "optout_disutility exceeds trip utility");
      }
    }
  }
  return c.take();
}

double mod_access_cost(double flow, double fleet, const AccessCostParams& p) {
  if (flow <= 0.0) return p.b1 > 0.0 ? 0.0 : p.a1 * std::pow(fleet, p.b2);
  return p.a1 * std::pow(flow, p.b1) * std::pow(fleet, p.b2);
}

double mod_access_marginal_cost(double flow, double fleet, const AccessCostParams& p) {
  if (flow <= 0.0) return p.b1 > 0.0 ? 0.0 : p.a1 * std::pow(fleet, p.b2);
  return p.a1 * (p.b1 + 1.0) * std::pow(flow, p.b1) * std::pow(fleet, p.b2);
}

double mod_unit_operating_cost(double fleet, const OperatingCostParams& p) {
  return p.a2 * std::pow(fleet, p.b3);
}

}  // namespace maas
