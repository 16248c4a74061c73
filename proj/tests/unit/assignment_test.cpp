#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "maas/lagrangian.hpp"
#include "support/oracle.hpp"

namespace {

using namespace maas;
namespace mt = maas::testing;

int link_of(const ExpandedNetwork& net, LinkKind kind, NodeId a, NodeId b) {
  for (int l = 0; l < static_cast<int>(net.link_count()); ++l) {
    const Link& k = net.link(l);
    if (k.kind == kind && net.vertex(k.tail).external_id == a && net.vertex(k.head).external_id == b) return l;
  }
  return kNone;
}

TEST(ShortestPath, PicksCheapestAndBreaksTiesByHops) {
  Scenario s;
  s.nodes = {{1, NodeKind::centroid}, {2, NodeKind::centroid}, {3, NodeKind::centroid}};
  s.walking_links = {{1, 2, 2.0}, {2, 3, 2.0}, {1, 3, 4.0}};
  s.traveler_groups = {{1, 1, 3, 1.0, 10.0, std::nullopt}};
  const ExpandedNetwork net = expand(s);
  std::vector<double> cost(net.link_count());
  for (int l = 0; l < static_cast<int>(net.link_count()); ++l) cost[static_cast<std::size_t>(l)] = net.link(l).travel_cost;
  const auto p = shortest_path(net, cost, net.vertex_of(1), net.vertex_of(3));
  ASSERT_TRUE(p);
  EXPECT_DOUBLE_EQ(p->cost, 4.0);
  ASSERT_EQ(p->links.size(), 1u);  // the direct walk or the dummy, both one link
  EXPECT_DOUBLE_EQ(path_cost(cost, p->links), 4.0);

  cost[static_cast<std::size_t>(link_of(net, LinkKind::walking, 1, 3))] = kInfinity;
  cost[static_cast<std::size_t>(net.groups()[0].dummy_link)] = kInfinity;
  const auto q = shortest_path(net, cost, net.vertex_of(1), net.vertex_of(3));
  ASSERT_TRUE(q);
  EXPECT_EQ(q->links.size(), 2u);

  EXPECT_FALSE(shortest_path(net, cost, net.vertex_of(3), net.vertex_of(1)));
}

TEST(ShortestPath, EnumeratesElementaryPaths) {
  const ExpandedNetwork net = expand(mt::line_scenario());
  const auto all = enumerate_paths(net, net.vertex_of(1), net.vertex_of(3), [&](int l) {
    return net.link(l).kind != LinkKind::dummy;
  });
  EXPECT_EQ(all.size(), 2u);  // walk, or ride then walk
}

TEST(BranchNetwork, FixingsDeactivateLinksAndNodes) {
  const ExpandedNetwork net = expand(mt::congested_scenario(0));
  const int m = net.mod_vertices().front();
  BranchFixings f;
  f.v0.insert(m);
  const BranchNetwork b(net, f);
  EXPECT_FALSE(b.node_open(m));
  for (int l = 0; l < static_cast<int>(net.link_count()); ++l) {
    const Link& k = net.link(l);
    if (k.tail == m || k.head == m) EXPECT_FALSE(b.active(l));
  }
  EXPECT_EQ(b.free_mod().size(), net.mod_vertices().size() - 1);
  EXPECT_DOUBLE_EQ(b.effective_capacity(0), net.total_demand());
}

TEST(BranchNetwork, ForcingBoundUsesDemandAndCapacity) {
  Scenario s = mt::line_scenario();
  s.fixed_route_operators[0].links[0].options[0].capacity = 70.0;
  const ExpandedNetwork net = expand(s);
  const BranchNetwork b(net, {});
  const int l = net.fixed_links().front();
  EXPECT_DOUBLE_EQ(b.effective_capacity(l), 70.0);
  EXPECT_DOUBLE_EQ(b.forcing_bound(0, l), 70.0);
}

TEST(LinearCosts, FixedLinkCarriesPerUnitOperatingCost) {
  const ExpandedNetwork net = expand(mt::line_scenario());
  const BranchNetwork root(net, {});
  const auto lin = linear_costs(root, Multipliers::zero(net));
  const int l = net.fixed_links().front();
  // t + c / min(w, D) with w infinite.
  EXPECT_DOUBLE_EQ(lin[0][static_cast<std::size_t>(l)], 12.0 + 480.0 / 200.0);

  BranchFixings one;
  one.y1.insert(l);
  const auto lin1 = linear_costs(BranchNetwork(net, one), Multipliers::zero(net));
  EXPECT_DOUBLE_EQ(lin1[0][static_cast<std::size_t>(l)], 12.0);
}

TEST(FrankWolfe, DummyOnlyConvergesImmediately) {
  Scenario s;
  s.nodes = {{1, NodeKind::centroid}, {2, NodeKind::centroid}};
  s.traveler_groups = {{1, 1, 2, 50.0, 20.0, std::nullopt}};
  const ExpandedNetwork net = expand(s);
  const auto f = frank_wolfe(BranchNetwork(net, {}), Multipliers::zero(net), {});
  EXPECT_TRUE(f.converged);
  EXPECT_DOUBLE_EQ(f.objective, 1000.0);
  EXPECT_LE(f.iterations, 2);
}

TEST(FrankWolfe, MatchesReferenceSystemOptimum) {
  for (int v = 0; v < 3; ++v) {
    const Scenario s = mt::congested_scenario(v);
    const ExpandedNetwork net = expand(s);
    FwOptions o;
    o.epsilon = 1e-8;
    o.consecutive = 10;
    o.max_iterations = 20000;
    BranchFixings all_open;
    for (int m : net.mod_vertices()) all_open.v1.insert(m);
    const auto f = frank_wolfe(BranchNetwork(net, all_open), Multipliers::zero(net), o);
    const mt::RefGraph g = mt::reference_graph(s);
    const auto ref = mt::reference_assignment(g, std::vector<char>(g.design.size(), 1),
                                              mt::RefObjective::system_optimum, 1e-12, 100000);
    EXPECT_NEAR(f.objective, ref.cost, 1e-4 * ref.cost) << s.name;
    EXPECT_LE(f.lower_bound, f.objective + 1e-9);
  }
}

TEST(FrankWolfe, TraceIsMonotoneAndPathsAreRecorded) {
  const ExpandedNetwork net = expand(mt::congested_scenario(2));
  std::ostringstream trace;
  FwOptions o;
  o.epsilon = 1e-6;
  o.trace = &trace;
  PathSet paths(net.groups().size());
  const auto f = frank_wolfe(BranchNetwork(net, {}), Multipliers::zero(net), o, &paths);
  EXPECT_GT(paths.size(), net.groups().size());
  std::istringstream in(trace.str());
  std::string line;
  double prev = kInfinity;
  int rows = 0;
  while (std::getline(in, line)) {
    std::istringstream r(line);
    int it;
    char c;
    double alpha, obj;
    if (!(r >> it >> c >> alpha >> c >> obj)) continue;
    EXPECT_LE(obj, prev + 1e-9 * std::abs(prev));
    EXPECT_GE(alpha, 0.0);
    EXPECT_LE(alpha, 1.0);
    prev = obj;
    ++rows;
  }
  EXPECT_GT(rows, 1);
  // Path flows reproduce the link flows.
  std::vector<double> rebuilt(net.link_count(), 0.0);
  for (const auto& pf : f.path_flow)
    for (const auto& [path, x] : pf)
      for (int l : path) rebuilt[static_cast<std::size_t>(l)] += x;
  for (std::size_t l = 0; l < rebuilt.size(); ++l) EXPECT_NEAR(rebuilt[l], f.link_flow[l], 1e-7);
}

TEST(LineSearch, StaysInUnitInterval) {
  const ExpandedNetwork net = expand(mt::congested_scenario(0));
  const BranchNetwork b(net, {});
  const auto mult = Multipliers::zero(net);
  const auto lin = linear_costs(b, mult);
  const FlowState start = FlowState::on_dummies(net);
  const auto aon = all_or_nothing(b, lin, start.link_flow);
  const double alpha = line_search(b, lin, start, aon);
  EXPECT_GE(alpha, 0.0);
  EXPECT_LE(alpha, 1.0);
}

TEST(Lagrangian, RootBoundBelowOptimumAndRecoveryOfLineNetwork) {
  const ExpandedNetwork net = expand(mt::line_scenario());
  const BranchNetwork root(net, {});
  const auto sg = subgradient(root, {});
  EXPECT_LE(sg.lower_bound, 3480.0 + 1e-6);

  const int l = net.fixed_links().front();
  BranchFixings one;
  one.y1.insert(l);
  const BranchSolution sol = solve_branch(BranchNetwork(net, one), {});
  EXPECT_TRUE(sol.integral);
  EXPECT_NEAR(sol.objective, 3480.0, 1e-6);
  EXPECT_DOUBLE_EQ(sol.y[static_cast<std::size_t>(l)], 1.0);
  EXPECT_LE(sol.lower_bound, sol.objective + 1e-6);

  BranchFixings zero;
  zero.y0.insert(l);
  const BranchSolution closed = solve_branch(BranchNetwork(net, zero), {});
  // Group 1 walks for 20, group 2 opts out at 25.
  EXPECT_NEAR(closed.objective, 100.0 * 20.0 + 100.0 * 25.0, 1e-6);
}

TEST(Lagrangian, RecoverIntegersFromFlows) {
  const ExpandedNetwork net = expand(mt::line_scenario());
  const BranchNetwork root(net, {});
  std::vector<double> flow(net.link_count(), 0.0);
  const int l = net.fixed_links().front();
  flow[static_cast<std::size_t>(l)] = 50.0;
  const auto dv = recover_integers(root, Multipliers::zero(net), flow);
  EXPECT_DOUBLE_EQ(dv.y[static_cast<std::size_t>(l)], 0.25);
}

TEST(Lagrangian, BranchObjectiveCountsOperatedCosts) {
  const ExpandedNetwork net = expand(mt::line_scenario());
  std::vector<double> flow(net.link_count(), 0.0);
  for (const auto& g : net.groups()) flow[static_cast<std::size_t>(g.dummy_link)] = g.demand;
  std::vector<double> y(net.link_count(), 0.0), v(net.vertex_count(), 0.0);
  EXPECT_DOUBLE_EQ(branch_objective(net, flow, y, v), 5000.0);
  y[static_cast<std::size_t>(net.fixed_links().front())] = 1.0;
  EXPECT_DOUBLE_EQ(branch_objective(net, flow, y, v), 5480.0);
}

}  // namespace
