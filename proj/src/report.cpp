#include "maas/report.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace maas {

ReportFormat parse_report_format(std::string_view name) {
  if (name == "table") return ReportFormat::table;
  if (name == "csv") return ReportFormat::csv;
  if (name == "json") return ReportFormat::json;
  throw std::invalid_argument("unknown report format: " + std::string(name));
}

namespace {

std::string fixed2(double x) {
  if (!std::isfinite(x)) return x > 0 ? "inf" : (x < 0 ? "-inf" : "nan");
  std::ostringstream s;
  s << std::fixed << std::setprecision(2) << (std::abs(x) < 0.005 ? 0.0 : x);
  return s.str();
}

std::string revenue_cell(const OperatorSummary& o, bool feasible, double value) {
  if (!o.operating) return "Not Operating";
  return feasible ? fixed2(value) : "n/a";
}

std::string operator_label(const OperatorSummary& o) {
  std::string s = std::to_string(o.id);
  if (!o.name.empty()) s += " " + o.name;
  return s;
}

void table(const ResultsDocument& d, std::ostream& out) {
  auto row = [&](const std::string& k, const std::string& v) { out << std::left << std::setw(34) << k << v << '\n'; };
  row("Scenario", d.scenario_name);
  row("Mode", std::string(to_string(d.mode)));
  row("Fingerprint", d.fingerprint);
  if (!d.found) {
    row("Result", "no integral solution found");
    return;
  }
  row("Objective (matching)", fixed2(d.objective_l1));
  row("Subsidized system cost", fixed2(d.objective_l1s));
  row("Total subsidy", fixed2(d.subsidy_total));
  row("Stable without subsidy", d.stable ? "yes" : "no");
  row("Lower bound", fixed2(d.lower_bound));
  row("Gap", fixed2(d.gap));
  row("Search closed", d.closed ? "yes" : "no");
  row("Branches", std::to_string(d.metadata.branches));
  out << '\n';
  out << std::left << std::setw(24) << "Operator" << std::setw(8) << "Type" << std::setw(8) << "Fleet" << std::right
      << std::setw(14) << "Cost" << std::setw(26) << "Revenue (buyer-optimal)" << std::setw(26)
      << "Revenue (seller-optimal)" << '\n';
  for (const auto& o : d.operators) {
    out << std::left << std::setw(24) << operator_label(o) << std::setw(8) << (o.is_mod ? "MOD" : "fixed")
        << std::setw(8) << (o.is_mod && o.operating ? std::to_string(o.fleet) : std::string("-")) << std::right
        << std::setw(14) << (o.operating ? fixed2(o.cost) : std::string("Not Operating")) << std::setw(26)
        << revenue_cell(o, d.buyer.feasible, o.revenue_buyer) << std::setw(26)
        << revenue_cell(o, d.seller.feasible, o.revenue_seller) << '\n';
  }
  out << '\n';
  row("Users' payoff (buyer-optimal)", d.buyer.feasible ? fixed2(d.payoff_buyer) : "n/a");
  row("Users' payoff (seller-optimal)", d.seller.feasible ? fixed2(d.payoff_seller) : "n/a");
  row("Total unserved demand", fixed2(d.total_unserved));
}

void csv(const ResultsDocument& d, std::ostream& out) {
  out << "section,key,value\n";
  auto kv = [&](const std::string& k, const std::string& v) { out << "summary," << k << ',' << v << '\n'; };
  kv("scenario", d.scenario_name);
  kv("mode", std::string(to_string(d.mode)));
  kv("objective", fixed2(d.objective_l1));
  kv("subsidized_cost", fixed2(d.objective_l1s));
  kv("subsidy_total", fixed2(d.subsidy_total));
  kv("stable", d.stable ? "true" : "false");
  kv("lower_bound", fixed2(d.lower_bound));
  kv("gap", fixed2(d.gap));
  kv("payoff_buyer_optimal", d.buyer.feasible ? fixed2(d.payoff_buyer) : "");
  kv("payoff_seller_optimal", d.seller.feasible ? fixed2(d.payoff_seller) : "");
  kv("total_unserved", fixed2(d.total_unserved));
  out << "\noperator,type,status,fleet,cost,revenue_buyer_optimal,revenue_seller_optimal\n";
  for (const auto& o : d.operators) {
    out << o.id << ',' << (o.is_mod ? "MOD" : "fixed") << ',' << (o.operating ? "Operating" : "Not Operating") << ','
        << o.fleet << ',' << fixed2(o.cost) << ',' << revenue_cell(o, d.buyer.feasible, o.revenue_buyer) << ','
        << revenue_cell(o, d.seller.feasible, o.revenue_seller) << '\n';
  }
  out << "\ngroup,origin,destination,demand,unserved,u_buyer_optimal,u_seller_optimal\n";
  for (const auto& g : d.groups) {
    out << g.id << ',' << g.origin << ',' << g.destination << ',' << fixed2(g.demand) << ',' << fixed2(g.unserved)
        << ',' << fixed2(g.u_buyer) << ',' << fixed2(g.u_seller) << '\n';
  }
}

void json_summary(const ResultsDocument& d, std::ostream& out) {
  nlohmann::json j = results_to_json(d);
  nlohmann::json s;
  s["scenario"] = j["scenario"];
  s["mode"] = j["mode"];
  s["objective"] = j["objective"];
  s["subsidy_total"] = j["subsidy_total"];
  s["stable"] = j["stable"];
  s["operators"] = j["operators"];
  s["payoff"] = j["payoff"];
  s["total_unserved"] = j["total_unserved"];
  s["groups"] = j["groups"];
  out << s.dump(2) << '\n';
}

}  // namespace

void render_report(const ResultsDocument& doc, ReportFormat format, std::ostream& out) {
  switch (format) {
    case ReportFormat::table: table(doc, out); break;
    case ReportFormat::csv: csv(doc, out); break;
    case ReportFormat::json: json_summary(doc, out); break;
  }
}

std::string path_nodes(const ExpandedNetwork& net, const LinkPath& path) {
  if (path.empty()) return "[]";
  std::string s = "[" + vertex_label(net, net.link(path.front()).tail);
  for (int l : path) s += "," + vertex_label(net, net.link(l).head);
  return s + "]";
}

bool AuditReport::stable() const {
  if (findings.empty()) return false;
  return std::all_of(findings.begin(), findings.end(), [](const AuditFinding& f) { return f.clean; });
}

std::size_t AuditReport::violation_count() const {
  std::size_t n = 0;
  for (const auto& f : findings) n += f.paths.size() + f.operators.size();
  return n;
}

AuditReport audit(const Scenario& scenario, const ResultsDocument& doc, double tolerance) {
  AuditReport report;
  report.fingerprint_matches = fingerprint(scenario) == doc.fingerprint;
  if (!doc.found) return report;
  const ExpandedNetwork net = expand(scenario);
  const BranchSolution sol = to_branch_solution(net, doc);
  StabilityOptions opts;
  opts.violation_tolerance = tolerance;
  StabilityProblem problem(net, sol, opts);
  const auto& matched = problem.matched();
  std::vector<double> subsidies(matched.paths.size(), 0.0);
  // Matched paths are rebuilt from the stored ones in the same order.
  for (std::size_t r = 0; r < subsidies.size() && r < doc.subsidies.size(); ++r) subsidies[r] = doc.subsidies[r];
  const auto cost = problem.operator_costs();

  auto check = [&](OutcomeVertex vertex, bool stored, std::vector<double> u, std::vector<double> fares) {
    AuditFinding f;
    f.vertex = vertex;
    f.stored = stored;
    fares.resize(net.link_count(), 0.0);
    u.resize(net.groups().size(), 0.0);
    const auto rev = problem.operator_revenue(fares);
    for (std::size_t o = 0; o < cost.size(); ++o)
      if (cost[o] - rev[o] > tolerance * std::max(1.0, cost[o]))
        f.operators.push_back({net.operators()[o].id, rev[o], cost[o]});
    for (std::size_t r = 0; r < matched.paths.size(); ++r) {
      const auto& p = matched.paths[r];
      const auto& g = net.groups()[static_cast<std::size_t>(p.group)];
      double lhs = u[static_cast<std::size_t>(p.group)];
      for (int l : p.links) lhs += fares[static_cast<std::size_t>(l)];
      f.payoff_residual = std::max(f.payoff_residual, std::abs(lhs - (g.trip_utility - p.travel_cost + subsidies[r])));
    }
    for (std::size_t s = 0; s < net.groups().size(); ++s) {
      auto c = problem.separation_oracle(static_cast<int>(s), u, fares);
      if (!c) continue;
      PathViolation v;
      v.group = static_cast<int>(s);
      v.group_id = net.groups()[s].id;
      v.links = c->links;
      v.gain = c->gain;
      int main = -1;
      for (int r : matched.of_group[s])
        if (main < 0 || matched.paths[static_cast<std::size_t>(r)].flow > matched.paths[static_cast<std::size_t>(main)].flow)
          main = r;
      if (main >= 0) v.diagnostic = problem.instability_condition(main, v.links, &fares);
      f.paths.push_back(std::move(v));
    }
    f.clean = f.paths.empty() && f.operators.empty() && f.payoff_residual <= tolerance * 10.0;
    report.findings.push_back(std::move(f));
  };

  if (doc.buyer.feasible) check(OutcomeVertex::buyer_optimal, true, doc.buyer.u, doc.buyer.fares);
  if (doc.seller.feasible) check(OutcomeVertex::seller_optimal, true, doc.seller.u, doc.seller.fares);
  if (report.findings.empty()) {
    // No stored outcome: price each operator at its cost-recovery floor and
    // give every group the payoff of its best matched path.
    std::vector<double> fares = problem.fare_floor();
    std::vector<double> u(net.groups().size(), kInfinity);
    for (std::size_t r = 0; r < matched.paths.size(); ++r) {
      const auto& p = matched.paths[r];
      const auto& g = net.groups()[static_cast<std::size_t>(p.group)];
      double price = 0.0;
      for (int l : p.links) price += fares[static_cast<std::size_t>(l)];
      auto& us = u[static_cast<std::size_t>(p.group)];
      us = std::min(us, g.trip_utility - p.travel_cost - price + subsidies[r]);
    }
    for (auto& x : u) x = std::isfinite(x) ? std::max(0.0, x) : 0.0;
    check(OutcomeVertex::buyer_optimal, false, u, fares);
    report.findings.back().payoff_residual = 0.0;
    auto& f = report.findings.back();
    f.clean = f.paths.empty() && f.operators.empty();
  }
  return report;
}

void render_audit(const AuditReport& report, const ExpandedNetwork& net, std::ostream& out) {
  if (!report.fingerprint_matches) out << "warning: scenario fingerprint differs from the results document\n";
  if (report.findings.empty()) {
    out << "no solution to audit\n";
    return;
  }
  out << (report.stable() ? "stable" : "unstable") << ", " << report.violation_count() << " violations\n";
  for (const auto& f : report.findings) {
    out << to_string(f.vertex) << (f.stored ? "" : " (fare floor)") << ": "
        << (f.clean ? "ok" : "violated") << '\n';
    for (const auto& o : f.operators)
      out << "  operator " << o.id << " revenue " << o.revenue << " below cost " << o.cost << '\n';
    if (f.payoff_residual > 0.0) out << "  payoff residual " << f.payoff_residual << '\n';
    for (const auto& v : f.paths) {
      out << "  group " << v.group_id << " path " << path_nodes(net, v.links) << " payoff gap " << v.gain
          << "; instability condition lhs " << v.diagnostic.lhs << " rhs " << v.diagnostic.rhs
          << (v.diagnostic.holds ? " (holds)" : " (does not hold)") << '\n';
    }
  }
}

}  // namespace maas
