#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "maas/io.hpp"
#include "maas/network.hpp"
#include "support/oracle.hpp"

namespace {

using namespace maas;
namespace mt = maas::testing;

bool has_rule(const std::vector<Violation>& v, const std::string& field_part, const std::string& rule_part) {
  return std::any_of(v.begin(), v.end(), [&](const Violation& x) {
    return x.field.find(field_part) != std::string::npos && x.rule.find(rule_part) != std::string::npos;
  });
}

TEST(Validate, BundledScenariosAreClean) {
  for (const char* name : {"line.json", "line_walk19.json", "line_walk18_5.json", "toy.json",
                           "sioux_falls.json", "sioux_falls_reduced_cost.json",
                           "sioux_falls_reduced_cost_half_access.json", "sioux_falls_heterogeneous.json"}) {
    const auto v = validate(load_scenario(mt::data_file(name)));
    EXPECT_TRUE(v.empty()) << name << ": " << (v.empty() ? "" : v.front().field + " " + v.front().rule);
  }
}

TEST(Validate, ReportsEachBrokenRuleByField) {
  Scenario s = mt::line_scenario();
  s.nodes.push_back({1, NodeKind::centroid});
  s.walking_links.push_back({2, 2, 1.0});
  s.fixed_route_operators[0].links[0].options[0].capacity = 0.0;
  s.traveler_groups[1].destination = 1;
  s.traveler_groups[0].demand = -3.0;
  s.traveler_groups[0].optout_disutility = 40.0;
  const auto v = validate(s);
  EXPECT_TRUE(has_rule(v, "nodes[3].id", "duplicate node id"));
  EXPECT_TRUE(has_rule(v, "walking_links[2]", "self loop"));
  EXPECT_TRUE(has_rule(v, "capacity", "positive"));
  EXPECT_TRUE(has_rule(v, "traveler_groups[1]", "origin equals destination"));
  EXPECT_TRUE(has_rule(v, "traveler_groups[0].demand", "positive"));
  EXPECT_TRUE(has_rule(v, "optout_disutility", "exceeds"));
}

TEST(Validate, MissingNumbersSurfaceAsViolations) {
  auto j = scenario_to_json(mt::line_scenario());
  j["walking_links"][0].erase("travel_cost");
  const auto v = validate(scenario_from_json(j));
  ASSERT_FALSE(v.empty());
  EXPECT_TRUE(has_rule(v, "walking_links[0]", "missing"));
}

TEST(Validate, ModOperatorRules) {
  Scenario s = mt::congested_scenario(0);
  s.mod_operators[0].fleet_sizes = {1, 1};
  s.mod_operators[0].access.a1 = 0.0;
  s.mod_operators[0].zones.push_back(99);
  s.mod_operators[0].opening_cost.push_back(1.0);
  const auto v = validate(s);
  EXPECT_TRUE(has_rule(v, "fleet_sizes", "duplicate fleet size"));
  EXPECT_TRUE(has_rule(v, "access.a1", "a1 > 0"));
  EXPECT_TRUE(has_rule(v, "zones", "declared centroid"));
}

TEST(Validate, ExpandRejectsInvalidScenarios) {
  Scenario s = mt::line_scenario();
  s.traveler_groups.clear();
  EXPECT_THROW(expand(s), ScenarioError);
}

TEST(CostFunctions, AccessAndOperatingCosts) {
  const AccessCostParams p{2.0, 1.0, -2.0};
  EXPECT_DOUBLE_EQ(mod_access_cost(10.0, 2.0, p), 5.0);
  EXPECT_DOUBLE_EQ(mod_access_marginal_cost(10.0, 2.0, p), 10.0);
  EXPECT_DOUBLE_EQ(mod_access_marginal_cost(0.0, 1.0, p), 0.0);
  EXPECT_DOUBLE_EQ(mod_unit_operating_cost(2.0, {4.0, 2.0}), 16.0);
}

TEST(Expand, LineNetworkIsBasePlusDummies) {
  const ExpandedNetwork net = expand(mt::line_scenario());
  EXPECT_EQ(net.vertex_count(), 3u);
  EXPECT_EQ(net.link_count(), 3u + 2u);
  EXPECT_EQ(net.count(LinkKind::dummy), 2u);
  EXPECT_EQ(net.count(LinkKind::fixed_route), 1u);
  EXPECT_DOUBLE_EQ(net.total_demand(), 200.0);
  for (const auto& g : net.groups()) {
    const Link& d = net.link(g.dummy_link);
    EXPECT_EQ(d.kind, LinkKind::dummy);
    EXPECT_EQ(d.tail, g.origin);
    EXPECT_EQ(d.head, g.destination);
    EXPECT_DOUBLE_EQ(d.travel_cost, 25.0);
  }
}

TEST(Expand, ModLayersFormCompleteSubgraphs) {
  Scenario s = mt::congested_scenario(0);
  s.mod_operators[0].fleet_sizes = {1, 2};
  s.mod_operators[0].link_travel_cost.entries.clear();
  for (NodeId a : s.mod_operators[0].zones)
    for (NodeId b : s.mod_operators[0].zones)
      if (a != b) s.mod_operators[0].link_travel_cost.entries.push_back({a, b, 2.0});
  const ExpandedNetwork net = expand(s);
  EXPECT_EQ(net.mod_vertices().size(), 6u);
  EXPECT_EQ(net.count(LinkKind::mod_link), 12u);
  EXPECT_EQ(net.count(LinkKind::mod_access), 6u);
  EXPECT_EQ(net.count(LinkKind::mod_egress), 6u);
  ASSERT_EQ(net.operators().size(), 1u);
  ASSERT_EQ(net.operators()[0].layers.size(), 2u);
  for (int l = 0; l < static_cast<int>(net.link_count()); ++l) {
    const Link& k = net.link(l);
    if (k.kind == LinkKind::mod_link) {
      EXPECT_DOUBLE_EQ(k.unit_operating_cost, 0.5 * k.fleet * k.fleet);
      EXPECT_EQ(net.vertex(k.tail).fleet, net.vertex(k.head).fleet);
    }
    if (k.kind == LinkKind::mod_access) EXPECT_EQ(net.vertex(k.head).kind, VertexKind::mod);
  }
}

TEST(Expand, ShortestPathFactorRule) {
  Scenario s = mt::congested_scenario(0);
  s.mod_operators[0].link_travel_cost = {ModTravelCost::Rule::shortest_path_factor, 0.75, {}};
  const ExpandedNetwork net = expand(s);
  // 1 -> 3 walks directly for 12, 1 -> 4 -> 3 costs 21.
  bool seen = false;
  for (int l = 0; l < static_cast<int>(net.link_count()); ++l) {
    const Link& k = net.link(l);
    if (k.kind != LinkKind::mod_link) continue;
    const auto from = net.vertex(net.vertex(k.tail).zone).external_id;
    const auto to = net.vertex(net.vertex(k.head).zone).external_id;
    if (from == 1 && to == 3) {
      EXPECT_DOUBLE_EQ(k.travel_cost, 9.0);
      seen = true;
    }
  }
  EXPECT_TRUE(seen);
}

TEST(Expand, SiouxFallsCounts) {
  const ExpandedNetwork net = expand(load_scenario(mt::data_file("sioux_falls.json")));
  EXPECT_EQ(net.vertex_count(), 82u);
  EXPECT_EQ(net.count(LinkKind::dummy), 30u);
  EXPECT_EQ(net.count(LinkKind::fixed_route), 36u);
  EXPECT_DOUBLE_EQ(net.total_demand(), 9700.0);
  EXPECT_EQ(net.operators().size(), 7u);
}

TEST(Expand, CsvAndDotExports) {
  const ExpandedNetwork net = expand(mt::line_scenario());
  std::ostringstream nodes, links, dot;
  write_nodes_csv(net, nodes);
  write_links_csv(net, links);
  write_dot(net, dot);
  const std::string n = nodes.str(), l = links.str();
  EXPECT_EQ(std::count(n.begin(), n.end(), '\n'), 4);
  EXPECT_EQ(std::count(l.begin(), l.end(), '\n'), 6);
  EXPECT_NE(dot.str().find("digraph"), std::string::npos);
  EXPECT_EQ(vertex_label(net, net.vertex_of(2)), "2");
}

}  // namespace
