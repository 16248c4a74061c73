#include "maas/io.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace maas {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double number(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_number()) return kNaN;
  return it->get<double>();
}

std::int64_t integer(const json& j, const char* key, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_number_integer())
    throw ScenarioError(where + "." + key + ": missing or not an integer");
  return it->get<std::int64_t>();
}

const json& array(const json& j, const char* key, const std::string& where) {
  static const json empty = json::array();
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return empty;
  if (!it->is_array()) throw ScenarioError(where + key + ": expected an array");
  return *it;
}

std::string text(const json& j, const char* key) {
  auto it = j.find(key);
  return it != j.end() && it->is_string() ? it->get<std::string>() : std::string{};
}

std::string at(const char* list, std::size_t i) { return std::string(list) + "[" + std::to_string(i) + "]"; }

BaseLink base_link(const json& j, const std::string& where) {
  return {integer(j, "tail", where), integer(j, "head", where), number(j, "travel_cost")};
}

json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

double read_or(const json& j, const char* key, double fallback) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return fallback;
  return it->get<double>();
}

}  // namespace

Scenario scenario_from_json(const json& j) {
  if (!j.is_object()) throw ScenarioError("scenario document must be a JSON object");
  if (auto it = j.find("format_version"); it != j.end() && (!it->is_number_integer() || it->get<int>() != kFormatVersion))
    throw ScenarioError("unsupported format_version");
  Scenario s;
  s.name = text(j, "name");
  const auto& nodes = array(j, "nodes", "");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto w = at("nodes", i);
    Node n;
    n.id = integer(nodes[i], "id", w);
    const auto kind = text(nodes[i], "kind");
    if (kind == "centroid") n.kind = NodeKind::centroid;
    else if (kind == "station") n.kind = NodeKind::station;
    else throw ScenarioError(w + ".kind: expected \"centroid\" or \"station\"");
    s.nodes.push_back(n);
  }
  const auto& walking = array(j, "walking_links", "");
  for (std::size_t i = 0; i < walking.size(); ++i) s.walking_links.push_back(base_link(walking[i], at("walking_links", i)));
  const auto& transfer = array(j, "transfer_links", "");
  for (std::size_t i = 0; i < transfer.size(); ++i)
    s.transfer_links.push_back(base_link(transfer[i], at("transfer_links", i)));

  const auto& fixed = array(j, "fixed_route_operators", "");
  for (std::size_t i = 0; i < fixed.size(); ++i) {
    const auto w = at("fixed_route_operators", i);
    FixedRouteOperator op;
    op.id = integer(fixed[i], "id", w);
    op.name = text(fixed[i], "name");
    const auto& links = array(fixed[i], "links", w + ".");
    for (std::size_t k = 0; k < links.size(); ++k) {
      const auto lw = w + "." + at("links", k);
      FixedRouteLink link;
      link.tail = integer(links[k], "tail", lw);
      link.head = integer(links[k], "head", lw);
      for (const auto& o : array(links[k], "options", lw + "."))
        link.options.push_back({number(o, "travel_cost"), number(o, "operating_cost"), read_or(o, "capacity", kInfinity)});
      op.links.push_back(std::move(link));
    }
    s.fixed_route_operators.push_back(std::move(op));
  }

  const auto& mods = array(j, "mod_operators", "");
  for (std::size_t i = 0; i < mods.size(); ++i) {
    const auto w = at("mod_operators", i);
    const json& m = mods[i];
    ModOperator op;
    op.id = integer(m, "id", w);
    op.name = text(m, "name");
    for (const auto& z : array(m, "zones", w + ".")) {
      if (!z.is_number_integer()) throw ScenarioError(w + ".zones: expected integer node ids");
      op.zones.push_back(z.get<NodeId>());
    }
    for (const auto& h : array(m, "fleet_sizes", w + ".")) {
      if (!h.is_number_integer()) throw ScenarioError(w + ".fleet_sizes: expected integers");
      op.fleet_sizes.push_back(h.get<int>());
    }
    const json access = m.value("access", json::object());
    op.access = {number(access, "a1"), number(access, "b1"), number(access, "b2")};
    const json operating = m.value("operating", json::object());
    op.operating = {number(operating, "a2"), number(operating, "b3")};
    for (const auto& q : array(m, "opening_cost", w + ".")) op.opening_cost.push_back(q.is_number() ? q.get<double>() : kNaN);
    const json rule = m.value("link_travel_cost", json::object());
    const auto kind = text(rule, "rule");
    if (kind == "matrix") {
      op.link_travel_cost.rule = ModTravelCost::Rule::matrix;
      const auto& entries = array(rule, "entries", w + ".link_travel_cost.");
      for (std::size_t k = 0; k < entries.size(); ++k) {
        const auto ew = w + ".link_travel_cost." + at("entries", k);
        op.link_travel_cost.entries.push_back(
            {integer(entries[k], "from", ew), integer(entries[k], "to", ew), number(entries[k], "travel_cost")});
      }
    } else if (kind == "shortest_path_factor" || kind.empty()) {
      op.link_travel_cost.rule = ModTravelCost::Rule::shortest_path_factor;
      op.link_travel_cost.factor = number(rule, "factor");
    } else {
      throw ScenarioError(w + ".link_travel_cost.rule: unknown rule \"" + kind + "\"");
    }
    s.mod_operators.push_back(std::move(op));
  }

  const auto& groups = array(j, "traveler_groups", "");
  for (std::size_t i = 0; i < groups.size(); ++i) {
    const auto w = at("traveler_groups", i);
    TravelerGroup g;
    g.id = integer(groups[i], "id", w);
    g.origin = integer(groups[i], "origin", w);
    g.destination = integer(groups[i], "destination", w);
    g.demand = number(groups[i], "demand");
    g.trip_utility = number(groups[i], "trip_utility");
    if (auto it = groups[i].find("optout_disutility"); it != groups[i].end() && !it->is_null())
      g.optout_disutility = it->is_number() ? it->get<double>() : kNaN;
    s.traveler_groups.push_back(g);
  }
  return s;
}

json scenario_to_json(const Scenario& s) {
  json j;
  j["format_version"] = kFormatVersion;
  j["name"] = s.name;
  j["nodes"] = json::array();
  for (const auto& n : s.nodes) j["nodes"].push_back({{"id", n.id}, {"kind", n.kind == NodeKind::centroid ? "centroid" : "station"}});
  auto base = [](const std::vector<BaseLink>& links) {
    json a = json::array();
    for (const auto& l : links) a.push_back({{"tail", l.tail}, {"head", l.head}, {"travel_cost", l.travel_cost}});
    return a;
  };
  j["walking_links"] = base(s.walking_links);
  j["transfer_links"] = base(s.transfer_links);
  j["fixed_route_operators"] = json::array();
  for (const auto& op : s.fixed_route_operators) {
    json o{{"id", op.id}, {"name", op.name}, {"links", json::array()}};
    for (const auto& l : op.links) {
      json lj{{"tail", l.tail}, {"head", l.head}, {"options", json::array()}};
      for (const auto& opt : l.options) {
        json oj{{"travel_cost", opt.travel_cost}, {"operating_cost", opt.operating_cost}};
        if (std::isfinite(opt.capacity)) oj["capacity"] = opt.capacity;
        lj["options"].push_back(std::move(oj));
      }
      o["links"].push_back(std::move(lj));
    }
    j["fixed_route_operators"].push_back(std::move(o));
  }
  j["mod_operators"] = json::array();
  for (const auto& op : s.mod_operators) {
    json o{{"id", op.id},
           {"name", op.name},
           {"zones", op.zones},
           {"fleet_sizes", op.fleet_sizes},
           {"access", {{"a1", op.access.a1}, {"b1", op.access.b1}, {"b2", op.access.b2}}},
           {"operating", {{"a2", op.operating.a2}, {"b3", op.operating.b3}}},
           {"opening_cost", op.opening_cost}};
    json rule;
    if (op.link_travel_cost.rule == ModTravelCost::Rule::matrix) {
      rule["rule"] = "matrix";
      rule["entries"] = json::array();
      for (const auto& e : op.link_travel_cost.entries)
        rule["entries"].push_back({{"from", e.from}, {"to", e.to}, {"travel_cost", e.travel_cost}});
    } else {
      rule["rule"] = "shortest_path_factor";
      rule["factor"] = op.link_travel_cost.factor;
    }
    o["link_travel_cost"] = std::move(rule);
    j["mod_operators"].push_back(std::move(o));
  }
  j["traveler_groups"] = json::array();
  for (const auto& g : s.traveler_groups) {
    json gj{{"id", g.id}, {"origin", g.origin}, {"destination", g.destination}, {"demand", g.demand},
            {"trip_utility", g.trip_utility}};
    if (g.optout_disutility) gj["optout_disutility"] = *g.optout_disutility;
    j["traveler_groups"].push_back(std::move(gj));
  }
  return j;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ScenarioError(path.string() + ": " + e.what());
  }
  Scenario s = scenario_from_json(j);
  if (s.name.empty()) s.name = path.stem().string();
  return s;
}

void save_scenario(const Scenario& scenario, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << scenario_to_json(scenario).dump(2) << '\n';
}

std::string fingerprint(const Scenario& scenario) {
  const std::string canonical = scenario_to_json(scenario).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

OutcomeRecord record(const StableOutcome& o) {
  return {o.feasible, o.u, o.fares, o.total_revenue, o.binding};
}

double payoff(const ExpandedNetwork& net, const OutcomeRecord& o) {
  if (!o.feasible) return 0.0;
  double s = 0.0;
  for (std::size_t g = 0; g < net.groups().size(); ++g) s += net.groups()[g].demand * o.u[g];
  return s;
}

}  // namespace

ResultsDocument make_results(const Scenario& scenario, const ExpandedNetwork& net, const SolveResult& result,
                             const SolveOptions& options) {
  ResultsDocument doc;
  doc.fingerprint = fingerprint(scenario);
  doc.scenario_name = scenario.name;
  doc.mode = result.mode;
  doc.found = result.found;
  doc.closed = result.closed;
  doc.limit_hit = result.limit_hit;
  doc.upper_bound = result.upper_bound;
  doc.lower_bound = result.lower_bound;
  doc.gap = result.gap;
  doc.relative_gap = result.relative_gap;
  doc.metadata = {result.branches,
                  result.wall_time,
                  options.branch.subgradient.epsilon,
                  options.branch.subgradient.fw.epsilon,
                  options.branch.subgradient.fw.consecutive,
                  options.gap,
                  options.max_branches,
                  options.max_time};
  if (!result.found) return doc;

  const BranchSolution& best = result.best;
  StabilityProblem problem(net, best, options.stability);
  doc.objective_l1 = best.objective;
  doc.link_flow = problem.matched().link_flow;
  doc.y = best.y;
  doc.v = best.v;
  doc.mu = best.mu;
  for (const auto& p : problem.matched().paths) doc.paths.push_back({p.group, p.links, p.flow});

  StabilityVerdict verdict;
  if (result.verdict) {
    verdict = *result.verdict;
  } else {
    verdict.buyer = problem.solve_vertex(OutcomeVertex::buyer_optimal);
    verdict.stable = verdict.buyer.feasible;
    if (verdict.stable) verdict.seller = problem.solve_vertex(OutcomeVertex::seller_optimal);
    verdict.subsidy.a.assign(doc.paths.size(), 0.0);
  }
  doc.stable = verdict.stable;
  doc.subsidies = verdict.subsidy.a;
  doc.subsidies.resize(doc.paths.size(), 0.0);
  doc.subsidy_total = verdict.subsidy.total;
  doc.objective_l1s = best.objective + doc.subsidy_total;
  doc.buyer = record(verdict.buyer);
  doc.seller = record(verdict.seller);
  doc.payoff_buyer = payoff(net, doc.buyer);
  doc.payoff_seller = payoff(net, doc.seller);

  const auto cost = problem.operator_costs();
  for (std::size_t o = 0; o < net.operators().size(); ++o) {
    const auto& op = net.operators()[o];
    OperatorSummary s;
    s.id = op.id;
    s.name = op.name;
    s.is_mod = op.is_mod;
    s.cost = cost[o];
    if (op.is_mod) {
      for (const auto& layer : op.layers)
        for (int v : layer.nodes)
          if (best.v[static_cast<std::size_t>(v)] > 0.5) {
            s.operating = true;
            s.fleet = layer.fleet;
          }
    } else {
      for (int l : op.links) s.operating = s.operating || best.y[static_cast<std::size_t>(l)] > 0.5;
    }
    if (doc.buyer.feasible) s.revenue_buyer = verdict.buyer.revenue[o];
    if (doc.seller.feasible) s.revenue_seller = verdict.seller.revenue[o];
    doc.operators.push_back(std::move(s));
  }
  for (std::size_t g = 0; g < net.groups().size(); ++g) {
    const auto& grp = net.groups()[g];
    GroupSummary s;
    s.id = grp.id;
    s.origin = net.vertex(grp.origin).external_id;
    s.destination = net.vertex(grp.destination).external_id;
    s.demand = grp.demand;
    s.unserved = doc.link_flow[static_cast<std::size_t>(grp.dummy_link)];
    if (doc.buyer.feasible) s.u_buyer = doc.buyer.u[g];
    if (doc.seller.feasible) s.u_seller = doc.seller.u[g];
    doc.total_unserved += s.unserved;
    doc.groups.push_back(s);
  }
  return doc;
}

namespace {

json outcome_json(const OutcomeRecord& o) {
  json j{{"feasible", o.feasible}, {"u", o.u}, {"total_revenue", o.total_revenue}};
  json fares = json::array();
  for (std::size_t l = 0; l < o.fares.size(); ++l)
    if (o.fares[l] != 0.0) fares.push_back({{"link", l}, {"fare", o.fares[l]}});
  j["fares"] = std::move(fares);
  j["fare_vector_size"] = o.fares.size();
  json binding = json::array();
  for (const auto& b : o.binding) binding.push_back({{"group", b.group}, {"links", b.links}});
  j["binding_paths"] = std::move(binding);
  return j;
}

OutcomeRecord outcome_from(const json& j) {
  OutcomeRecord o;
  o.feasible = j.at("feasible").get<bool>();
  o.u = j.at("u").get<std::vector<double>>();
  o.total_revenue = j.at("total_revenue").get<double>();
  o.fares.assign(j.at("fare_vector_size").get<std::size_t>(), 0.0);
  for (const auto& f : j.at("fares")) o.fares.at(f.at("link").get<std::size_t>()) = f.at("fare").get<double>();
  for (const auto& b : j.at("binding_paths")) o.binding.push_back({b.at("group").get<int>(), b.at("links").get<LinkPath>()});
  return o;
}

}  // namespace

json results_to_json(const ResultsDocument& d) {
  json j;
  j["format_version"] = kFormatVersion;
  j["fingerprint"] = d.fingerprint;
  j["scenario"] = d.scenario_name;
  j["mode"] = to_string(d.mode);
  j["found"] = d.found;
  j["closed"] = d.closed;
  j["limit_hit"] = d.limit_hit;
  j["objective"] = {{"l1", d.objective_l1},
                    {"l1s", d.objective_l1s},
                    {"upper_bound", finite_or_null(d.upper_bound)},
                    {"lower_bound", finite_or_null(d.lower_bound)},
                    {"gap", finite_or_null(d.gap)},
                    {"relative_gap", finite_or_null(d.relative_gap)}};
  j["link_flow"] = d.link_flow;
  j["y"] = d.y;
  j["v"] = d.v;
  j["mu"] = d.mu;
  json ops = json::array();
  for (std::size_t l = 0; l < d.y.size(); ++l)
    if (d.y[l] > 0.5) ops.push_back(l);
  j["operated_links"] = std::move(ops);
  json nodes = json::array();
  for (std::size_t v = 0; v < d.v.size(); ++v)
    if (d.v[v] > 0.5) nodes.push_back(v);
  j["open_mod_nodes"] = std::move(nodes);
  json paths = json::array();
  for (std::size_t r = 0; r < d.paths.size(); ++r)
    paths.push_back({{"group", d.paths[r].group},
                     {"links", d.paths[r].links},
                     {"flow", d.paths[r].flow},
                     {"subsidy", r < d.subsidies.size() ? d.subsidies[r] : 0.0}});
  j["matched_paths"] = std::move(paths);
  j["stable"] = d.stable;
  j["subsidy_total"] = d.subsidy_total;
  j["outcomes"] = {{"buyer_optimal", outcome_json(d.buyer)}, {"seller_optimal", outcome_json(d.seller)}};
  json operators = json::array();
  for (const auto& o : d.operators)
    operators.push_back({{"id", o.id},
                         {"name", o.name},
                         {"is_mod", o.is_mod},
                         {"operating", o.operating},
                         {"fleet", o.fleet},
                         {"cost", o.cost},
                         {"revenue_buyer", o.revenue_buyer},
                         {"revenue_seller", o.revenue_seller}});
  j["operators"] = std::move(operators);
  json groups = json::array();
  for (const auto& g : d.groups)
    groups.push_back({{"id", g.id},
                      {"origin", g.origin},
                      {"destination", g.destination},
                      {"demand", g.demand},
                      {"unserved", g.unserved},
                      {"u_buyer", g.u_buyer},
                      {"u_seller", g.u_seller}});
  j["groups"] = std::move(groups);
  j["total_unserved"] = d.total_unserved;
  j["payoff"] = {{"buyer_optimal", d.payoff_buyer}, {"seller_optimal", d.payoff_seller}};
  const auto& m = d.metadata;
  j["metadata"] = {{"branches", m.branches},
                   {"wall_time", m.wall_time},
                   {"tolerances",
                    {{"eps_sg", m.eps_sg},
                     {"eps_fw", m.eps_fw},
                     {"fw_consecutive", m.fw_consecutive},
                     {"gap", m.gap_threshold},
                     {"max_branches", m.max_branches},
                     {"max_time", finite_or_null(m.max_time)}}}};
  return j;
}

ResultsDocument results_from_json(const json& j) {
  try {
    if (j.at("format_version").get<int>() != kFormatVersion) throw ScenarioError("unsupported results format_version");
    ResultsDocument d;
    d.fingerprint = j.at("fingerprint").get<std::string>();
    d.scenario_name = j.at("scenario").get<std::string>();
    d.mode = j.at("mode").get<std::string>() == "exact" ? SolveMode::exact : SolveMode::heuristic;
    d.found = j.at("found").get<bool>();
    d.closed = j.at("closed").get<bool>();
    d.limit_hit = j.at("limit_hit").get<bool>();
    const auto& obj = j.at("objective");
    d.objective_l1 = obj.at("l1").get<double>();
    d.objective_l1s = obj.at("l1s").get<double>();
    d.upper_bound = read_or(obj, "upper_bound", kInfinity);
    d.lower_bound = read_or(obj, "lower_bound", -kInfinity);
    d.gap = read_or(obj, "gap", kInfinity);
    d.relative_gap = read_or(obj, "relative_gap", kInfinity);
    d.link_flow = j.at("link_flow").get<std::vector<double>>();
    d.y = j.at("y").get<std::vector<double>>();
    d.v = j.at("v").get<std::vector<double>>();
    d.mu = j.at("mu").get<std::vector<double>>();
    for (const auto& p : j.at("matched_paths")) {
      d.paths.push_back({p.at("group").get<int>(), p.at("links").get<LinkPath>(), p.at("flow").get<double>()});
      d.subsidies.push_back(p.at("subsidy").get<double>());
    }
    d.stable = j.at("stable").get<bool>();
    d.subsidy_total = j.at("subsidy_total").get<double>();
    d.buyer = outcome_from(j.at("outcomes").at("buyer_optimal"));
    d.seller = outcome_from(j.at("outcomes").at("seller_optimal"));
    for (const auto& o : j.at("operators"))
      d.operators.push_back({o.at("id").get<OperatorId>(), o.at("name").get<std::string>(), o.at("is_mod").get<bool>(),
                             o.at("operating").get<bool>(), o.at("fleet").get<int>(), o.at("cost").get<double>(),
                             o.at("revenue_buyer").get<double>(), o.at("revenue_seller").get<double>()});
    for (const auto& g : j.at("groups"))
      d.groups.push_back({g.at("id").get<GroupId>(), g.at("origin").get<NodeId>(), g.at("destination").get<NodeId>(),
                          g.at("demand").get<double>(), g.at("unserved").get<double>(), g.at("u_buyer").get<double>(),
                          g.at("u_seller").get<double>()});
    d.total_unserved = j.at("total_unserved").get<double>();
    d.payoff_buyer = j.at("payoff").at("buyer_optimal").get<double>();
    d.payoff_seller = j.at("payoff").at("seller_optimal").get<double>();
    const auto& m = j.at("metadata");
    const auto& t = m.at("tolerances");
    d.metadata = {m.at("branches").get<long>(),  m.at("wall_time").get<double>(),   t.at("eps_sg").get<double>(),
                  t.at("eps_fw").get<double>(),  t.at("fw_consecutive").get<int>(), t.at("gap").get<double>(),
                  t.at("max_branches").get<long>(), read_or(t, "max_time", kInfinity)};
    return d;
  } catch (const json::exception& e) {
    throw ScenarioError(std::string("malformed results document: ") + e.what());
  }
}

ResultsDocument load_results(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open " + path.string());
  try {
    return results_from_json(json::parse(in));
  } catch (const json::parse_error& e) {
    throw ScenarioError(path.string() + ": " + e.what());
  }
}

void save_results(const ResultsDocument& doc, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << results_to_json(doc).dump(2) << '\n';
}

BranchSolution to_branch_solution(const ExpandedNetwork& net, const ResultsDocument& doc) {
  if (doc.y.size() != net.link_count() || doc.v.size() != net.vertex_count() || doc.link_flow.size() != net.link_count())
    throw ScenarioError("results do not match the scenario's network");
  BranchSolution sol;
  sol.paths = doc.paths;
  for (const auto& p : sol.paths) {
    if (p.group < 0 || static_cast<std::size_t>(p.group) >= net.groups().size())
      throw ScenarioError("matched path refers to an unknown group");
    for (int l : p.links)
      if (l < 0 || static_cast<std::size_t>(l) >= net.link_count()) throw ScenarioError("matched path refers to an unknown link");
  }
  aggregate(net, sol.paths, sol.group_flow, sol.link_flow);
  sol.y = doc.y;
  sol.v = doc.v;
  sol.mu = doc.mu;
  sol.mu.resize(net.link_count(), 0.0);
  sol.integral = true;
  sol.objective = branch_objective(net, sol.link_flow, sol.y, sol.v);
  return sol;
}

}  // namespace maas
