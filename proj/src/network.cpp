#include "maas/network.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <queue>
#include <sstream>

namespace maas {

std::string_view to_string(LinkKind kind) {
  switch (kind) {
    case LinkKind::fixed_route: return "fixed_route";
    case LinkKind::walking: return "walking";
    case LinkKind::transfer: return "transfer";
    case LinkKind::mod_link: return "mod_link";
    case LinkKind::mod_access: return "mod_access";
    case LinkKind::mod_egress: return "mod_egress";
    case LinkKind::dummy: return "dummy";
  }
  return "unknown";
}

int ExpandedNetwork::add_vertex(Vertex v) {
  vertices_.push_back(v);
  return static_cast<int>(vertices_.size()) - 1;
}

int ExpandedNetwork::add_link(Link l) {
  links_.push_back(l);
  return static_cast<int>(links_.size()) - 1;
}

int ExpandedNetwork::add_group(Group g) {
  groups_.push_back(g);
  return static_cast<int>(groups_.size()) - 1;
}

int ExpandedNetwork::add_operator(OperatorInfo op) {
  operators_.push_back(std::move(op));
  return static_cast<int>(operators_.size()) - 1;
}

void ExpandedNetwork::finalize() {
  const auto nv = vertices_.size();
  out_.assign(nv, {});
  in_.assign(nv, {});
  mod_vertices_.clear();
  fixed_links_.clear();
  int max_group = -1;
  for (std::size_t i = 0; i < links_.size(); ++i) {
    const auto& l = links_[i];
    if (l.tail < 0 || l.head < 0 || static_cast<std::size_t>(l.tail) >= nv ||
        static_cast<std::size_t>(l.head) >= nv) {
      throw ScenarioError("link " + std::to_string(i) + " has an endpoint outside the vertex set");
    }
    out_[static_cast<std::size_t>(l.tail)].push_back(static_cast<int>(i));
    in_[static_cast<std::size_t>(l.head)].push_back(static_cast<int>(i));
    if (l.kind == LinkKind::fixed_route) {
      fixed_links_.push_back(static_cast<int>(i));
      max_group = std::max(max_group, l.option_group);
    }
  }
  option_groups_.assign(static_cast<std::size_t>(max_group + 1), {});
  for (int l : fixed_links_) {
    option_groups_[static_cast<std::size_t>(links_[static_cast<std::size_t>(l)].option_group)].push_back(l);
  }
  for (std::size_t v = 0; v < nv; ++v) {
    if (vertices_[v].kind == VertexKind::mod) mod_vertices_.push_back(static_cast<int>(v));
  }
  total_demand_ = 0.0;
  for (const auto& g : groups_) total_demand_ += g.demand;
}

int ExpandedNetwork::vertex_of(NodeId id) const {
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    if (vertices_[i].kind != VertexKind::mod && vertices_[i].external_id == id) {
      return static_cast<int>(i);
    }
  }
  throw ScenarioError("unknown node id " + std::to_string(id));
}

std::size_t ExpandedNetwork::count(LinkKind kind) const {
  return static_cast<std::size_t>(
      std::count_if(links_.begin(), links_.end(), [kind](const Link& l) { return l.kind == kind; }));
}

namespace {

// Shortest costs from `source` over walking, transfer and cheapest fixed-route
// options, used by the MOD travel-cost factor rule.
std::vector<double> base_shortest(const ExpandedNetwork& net, int source) {
  std::vector<double> dist(net.vertex_count(), kInfinity);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  dist[static_cast<std::size_t>(source)] = 0.0;
  pq.push({0.0, source});
  while (!pq.empty()) {
    auto [d, v] = pq.top();
    pq.pop();
    if (d > dist[static_cast<std::size_t>(v)]) continue;
    for (int li : net.out_links(v)) {
      const auto& l = net.link(li);
      if (l.kind != LinkKind::fixed_route && l.kind != LinkKind::walking &&
          l.kind != LinkKind::transfer) {
        continue;
      }
      const double nd = d + l.travel_cost;
      if (nd < dist[static_cast<std::size_t>(l.head)]) {
        dist[static_cast<std::size_t>(l.head)] = nd;
        pq.push({nd, l.head});
      }
    }
  }
  return dist;
}

std::string join_violations(const std::vector<Violation>& v) {
  std::ostringstream os;
  os << "scenario is invalid:";
  for (const auto& x : v) os << "\n  " << x.field << ": " << x.rule;
  return os.str();
}

}  // namespace

ExpandedNetwork expand(const Scenario& s) {
  // Duplicate ids and unknown zones are reported by validate as well; they
  // are the two structural errors expansion cannot work around.
  if (auto v = validate(s); !v.empty()) throw ScenarioError(join_violations(v));

  ExpandedNetwork net;
  std::map<NodeId, int> index;
  for (const auto& n : s.nodes) {
    Vertex v;
    v.kind = n.kind == NodeKind::centroid ? VertexKind::centroid : VertexKind::station;
    v.external_id = n.id;
    index[n.id] = net.add_vertex(v);
  }

  int option_group = 0;
  for (const auto& op : s.fixed_route_operators) {
    OperatorInfo info;
    info.id = op.id;
    info.name = op.name;
    const int opi = static_cast<int>(net.operators().size());
    for (const auto& fl : op.links) {
      for (const auto& o : fl.options) {
        Link l;
        l.kind = LinkKind::fixed_route;
        l.tail = index.at(fl.tail);
        l.head = index.at(fl.head);
        l.owner = opi;
        l.travel_cost = o.travel_cost;
        l.operating_cost = o.operating_cost;
        l.capacity = o.capacity;
        l.option_group = option_group;
        info.links.push_back(net.add_link(l));
      }
      ++option_group;
    }
    net.add_operator(std::move(info));
  }
  auto add_base = [&](const std::vector<BaseLink>& links, LinkKind kind) {
    for (const auto& b : links) {
      Link l;
      l.kind = kind;
      l.tail = index.at(b.tail);
      l.head = index.at(b.head);
      l.travel_cost = b.travel_cost;
      net.add_link(l);
    }
  };
  add_base(s.walking_links, LinkKind::walking);
  add_base(s.transfer_links, LinkKind::transfer);

  // Base adjacency is needed for the shortest-path factor rule.
  net.finalize();
  std::map<int, std::vector<double>> base_dist;
  auto base_cost = [&](int from, int to) {
    auto it = base_dist.find(from);
    if (it == base_dist.end()) it = base_dist.emplace(from, base_shortest(net, from)).first;
    return it->second[static_cast<std::size_t>(to)];
  };

  for (const auto& op : s.mod_operators) {
    OperatorInfo info;
    info.id = op.id;
    info.name = op.name;
    info.is_mod = true;
    const int opi = static_cast<int>(net.operators().size());
    std::map<std::pair<NodeId, NodeId>, double> matrix;
    for (const auto& e : op.link_travel_cost.entries) matrix[{e.from, e.to}] = e.travel_cost;
    for (int h : op.fleet_sizes) {
      FleetLayer layer;
      layer.fleet = h;
      for (std::size_t z = 0; z < op.zones.size(); ++z) {
        Vertex v;
        v.kind = VertexKind::mod;
        v.external_id = op.zones[z];
        v.op = opi;
        v.fleet = h;
        v.zone = index.at(op.zones[z]);
        v.opening_cost = op.opening_cost[z];
        layer.nodes.push_back(net.add_vertex(v));
      }
      const double m = mod_unit_operating_cost(h, op.operating);
      for (std::size_t a = 0; a < op.zones.size(); ++a) {
        for (std::size_t b = 0; b < op.zones.size(); ++b) {
          if (a == b) continue;
          double t;
          if (op.link_travel_cost.rule == ModTravelCost::Rule::matrix) {
            t = matrix.at({op.zones[a], op.zones[b]});
          } else {
            t = op.link_travel_cost.factor * base_cost(index.at(op.zones[a]), index.at(op.zones[b]));
          }
          if (!std::isfinite(t)) continue;
          Link l;
          l.kind = LinkKind::mod_link;
          l.tail = layer.nodes[a];
          l.head = layer.nodes[b];
          l.owner = opi;
          l.travel_cost = t;
          l.unit_operating_cost = m;
          l.fleet = h;
          l.mod_node = layer.nodes[a];
          net.add_link(l);
        }
      }
      info.layers.push_back(std::move(layer));
    }
    for (const auto& layer : info.layers) {
      for (std::size_t z = 0; z < op.zones.size(); ++z) {
        Link l;
        l.kind = LinkKind::mod_access;
        l.tail = index.at(op.zones[z]);
        l.head = layer.nodes[z];
        l.owner = opi;
        l.access = op.access;
        l.fleet = layer.fleet;
        l.mod_node = layer.nodes[z];
        net.add_link(l);
      }
    }
    for (const auto& layer : info.layers) {
      for (std::size_t z = 0; z < op.zones.size(); ++z) {
        Link l;
        l.kind = LinkKind::mod_egress;
        l.tail = layer.nodes[z];
        l.head = index.at(op.zones[z]);
        l.owner = opi;
        l.fleet = layer.fleet;
        l.mod_node = layer.nodes[z];
        net.add_link(l);
      }
    }
    net.add_operator(std::move(info));
  }

  for (const auto& g : s.traveler_groups) {
    Group grp;
    grp.id = g.id;
    grp.origin = index.at(g.origin);
    grp.destination = index.at(g.destination);
    grp.demand = g.demand;
    grp.trip_utility = g.trip_utility;
    grp.optout = g.optout();
    const int gi = static_cast<int>(net.groups().size());
    Link l;
    l.kind = LinkKind::dummy;
    l.tail = grp.origin;
    l.head = grp.destination;
    l.travel_cost = grp.optout;
    l.group = gi;
    grp.dummy_link = net.add_link(l);
    net.add_group(grp);
  }
  net.finalize();
  return net;
}

std::string vertex_label(const ExpandedNetwork& net, int v) {
  const auto& x = net.vertex(v);
  if (x.kind != VertexKind::mod) return std::to_string(x.external_id);
  return "m" + std::to_string(net.operators()[static_cast<std::size_t>(x.op)].id) + "h" +
         std::to_string(x.fleet) + "z" + std::to_string(x.external_id);
}

namespace {

std::string_view vertex_kind(VertexKind k) {
  switch (k) {
    case VertexKind::centroid: return "centroid";
    case VertexKind::station: return "station";
    case VertexKind::mod: return "mod";
  }
  return "unknown";
}

}  // namespace

void write_nodes_csv(const ExpandedNetwork& net, std::ostream& out) {
  out << "index,label,kind,operator,fleet,opening_cost\n";
  for (std::size_t i = 0; i < net.vertex_count(); ++i) {
    const auto& v = net.vertices()[i];
    out << i << ',' << vertex_label(net, static_cast<int>(i)) << ',' << vertex_kind(v.kind) << ',';
    if (v.op != kNone) out << net.operators()[static_cast<std::size_t>(v.op)].id;
    out << ',' << v.fleet << ',' << v.opening_cost << '\n';
  }
}

void write_links_csv(const ExpandedNetwork& net, std::ostream& out) {
  out << "index,kind,tail,head,owner,travel_cost,operating_cost,capacity,unit_operating_cost,fleet,group\n";
  for (std::size_t i = 0; i < net.link_count(); ++i) {
    const auto& l = net.links()[i];
    out << i << ',' << to_string(l.kind) << ',' << vertex_label(net, l.tail) << ','
        << vertex_label(net, l.head) << ',';
    if (l.owner != kNone) out << net.operators()[static_cast<std::size_t>(l.owner)].id;
    out << ',' << l.travel_cost << ',' << l.operating_cost << ',';
    if (std::isfinite(l.capacity)) out << l.capacity;
    out << ',' << l.unit_operating_cost << ',' << l.fleet << ',';
    if (l.group != kNone) out << net.groups()[static_cast<std::size_t>(l.group)].id;
    out << '\n';
  }
}

void write_dot(const ExpandedNetwork& net, std::ostream& out) {
  out << "digraph maas {\n";
  for (std::size_t i = 0; i < net.vertex_count(); ++i) {
    out << "  n" << i << " [label=\"" << vertex_label(net, static_cast<int>(i)) << "\"];\n";
  }
  for (std::size_t i = 0; i < net.link_count(); ++i) {
    const auto& l = net.links()[i];
    out << "  n" << l.tail << " -> n" << l.head << " [label=\"" << i << ":" << to_string(l.kind)
        << "\"";
    if (l.kind == LinkKind::dummy) out << ", style=dashed";
    out << "];\n";
  }
  out << "}\n";
}

std::string describe_link(const ExpandedNetwork& net, int link) {
  const auto& l = net.link(link);
  std::string s{to_string(l.kind)};
  s += " " + vertex_label(net, l.tail) + "->" + vertex_label(net, l.head);
  if (l.owner != kNone) s += " (op " + std::to_string(net.operators()[static_cast<std::size_t>(l.owner)].id) + ")";
  return s;
}

}  // namespace maas
