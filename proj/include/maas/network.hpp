#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "maas/scenario.hpp"

namespace maas {

enum class LinkKind { fixed_route, walking, transfer, mod_link, mod_access, mod_egress, dummy };

std::string_view to_string(LinkKind kind);

enum class VertexKind { centroid, station, mod };

inline constexpr int kNone = -1;

struct Vertex {
  VertexKind kind = VertexKind::centroid;
  NodeId external_id = 0;  // scenario id for base nodes, synthetic for MOD nodes
  int op = kNone;          // operator index (MOD nodes)
  int fleet = 0;           // fleet size h (MOD nodes)
  int zone = kNone;        // underlying centroid vertex (MOD nodes)
  double opening_cost = 0.0;
};

struct Link {
  LinkKind kind = LinkKind::walking;
  int tail = 0;
  int head = 0;
  int owner = kNone;          // operator index, kNone for infrastructure/dummy
  double travel_cost = 0.0;   // t_l (dummy: t_s; egress and access: 0)
  double operating_cost = 0;  // c_l, fixed_route only
  double capacity = kInfinity;
  double unit_operating_cost = 0.0;  // m_l, mod_link only
  AccessCostParams access;           // mod_access only
  double fleet = 0.0;                // h, MOD links
  int option_group = kNone;          // fixed_route: index into option_groups
  int mod_node = kNone;  // access: head; egress and mod_link: tail MOD vertex
  int group = kNone;     // dummy: owning traveler group
};

struct Group {
  GroupId id = 0;
  int origin = 0;
  int destination = 0;
  double demand = 0.0;
  double trip_utility = 0.0;
  double optout = 0.0;
  int dummy_link = kNone;
};

struct FleetLayer {
  int fleet = 0;
  std::vector<int> nodes;
};

struct OperatorInfo {
  OperatorId id = 0;
  std::string name;
  bool is_mod = false;
  std::vector<int> links;        // fixed_route links owned (fixed operators)
  std::vector<FleetLayer> layers;  // MOD operators
};

/// The layered graph: base nodes, one copy of every MOD zone per fleet
/// option, and typed links. Indices are dense and deterministic.
class ExpandedNetwork {
 public:
  int add_vertex(Vertex v);
  int add_link(Link l);
  int add_group(Group g);
  int add_operator(OperatorInfo op);
  /// Builds adjacency and option-group indices; required before queries.
  void finalize();

  const std::vector<Vertex>& vertices() const { return vertices_; }
  const std::vector<Link>& links() const { return links_; }
  const std::vector<Group>& groups() const { return groups_; }
  const std::vector<OperatorInfo>& operators() const { return operators_; }
  const std::vector<std::vector<int>>& option_groups() const { return option_groups_; }

  const Vertex& vertex(int i) const { return vertices_.at(static_cast<std::size_t>(i)); }
  const Link& link(int i) const { return links_.at(static_cast<std::size_t>(i)); }
  const std::vector<int>& out_links(int v) const { return out_[static_cast<std::size_t>(v)]; }
  const std::vector<int>& in_links(int v) const { return in_[static_cast<std::size_t>(v)]; }

  std::size_t vertex_count() const { return vertices_.size(); }
  std::size_t link_count() const { return links_.size(); }
  double total_demand() const { return total_demand_; }

  /// Vertex index of a scenario node id; throws ScenarioError if absent.
  int vertex_of(NodeId id) const;
  /// MOD vertex indices in ascending order.
  const std::vector<int>& mod_vertices() const { return mod_vertices_; }
  /// Fixed-route link indices in ascending order.
  const std::vector<int>& fixed_links() const { return fixed_links_; }
  std::size_t count(LinkKind kind) const;

 private:
  std::vector<Vertex> vertices_;
  std::vector<Link> links_;
  std::vector<Group> groups_;
  std::vector<OperatorInfo> operators_;
  std::vector<std::vector<int>> out_;
  std::vector<std::vector<int>> in_;
  std::vector<std::vector<int>> option_groups_;
  std::vector<int> mod_vertices_;
  std::vector<int> fixed_links_;
  double total_demand_ = 0.0;
};

/// Builds the expanded network. Validates first and throws ScenarioError
/// listing the violations when the scenario is not clean.
ExpandedNetwork expand(const Scenario& scenario);

/// Writes nodes.csv-style and links.csv-style tables.
void write_nodes_csv(const ExpandedNetwork& net, std::ostream& out);
void write_links_csv(const ExpandedNetwork& net, std::ostream& out);
/// Graphviz description of the network.
void write_dot(const ExpandedNetwork& net, std::ostream& out);

/// Scenario id of a base vertex, or m<operator>h<fleet>z<zone> for MOD vertices.
std::string vertex_label(const ExpandedNetwork& net, int vertex);

/// Human-readable description of a link for reports, e.g. "fixed_route 1->2 (op 1)".
std::string describe_link(const ExpandedNetwork& net, int link);

}  // namespace maas
