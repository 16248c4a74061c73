#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "maas/branch_bound.hpp"
#include "maas/io.hpp"
#include "maas/report.hpp"

namespace {

enum ExitCode { kOk = 0, kLimit = 1, kInput = 2, kUnstable = 3 };

enum class LogLevel { error, warn, info, debug };

LogLevel log_level() {
  const char* env = std::getenv("MAAS_LOG");
  const std::string v = env ? env : "";
  if (v == "error" || v == "0") return LogLevel::error;
  if (v == "info" || v == "2") return LogLevel::info;
  if (v == "debug" || v == "3") return LogLevel::debug;
  return LogLevel::warn;
}

bool logs(LogLevel at) { return static_cast<int>(log_level()) >= static_cast<int>(at); }

int cmd_validate(const std::string& path) {
  maas::Scenario s;
  try {
    s = maas::load_scenario(path);
  } catch (const maas::ScenarioError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInput;
  }
  const auto violations = maas::validate(s);
  for (const auto& v : violations) std::cout << v.field << ": " << v.rule << '\n';
  if (!violations.empty()) return kInput;
  std::cout << "ok: " << s.name << '\n';
  return kOk;
}

struct SolveFlags {
  std::string scenario;
  std::string mode = "heuristic";
  double gap = 0.0;
  long max_branches = 1'000'000;
  double max_time = maas::kInfinity;
  double eps_sg = 0.05;
  double eps_fw = 0.01;
  int fw_consec = 5;
  int threads = 1;
  bool deterministic = false;
  std::string out;
};

int cmd_solve(const SolveFlags& f) {
  maas::Scenario s;
  std::optional<maas::ExpandedNetwork> net;
  try {
    s = maas::load_scenario(f.scenario);
    net.emplace(maas::expand(s));
  } catch (const maas::ScenarioError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInput;
  }
  maas::SolveOptions opt;
  opt.mode = f.mode == "exact" ? maas::SolveMode::exact : maas::SolveMode::heuristic;
  opt.gap = f.gap;
  opt.max_branches = f.max_branches;
  opt.max_time = f.max_time;
  opt.branch.subgradient.epsilon = f.eps_sg;
  opt.branch.subgradient.fw.epsilon = f.eps_fw;
  opt.branch.subgradient.fw.consecutive = f.fw_consec;
  opt.branch.subgradient.fw.threads = f.threads;
  if (logs(LogLevel::debug)) opt.progress = &std::cerr;

  const maas::SolveResult result = maas::solve(*net, opt);
  const maas::ResultsDocument doc = maas::make_results(s, *net, result, opt);
  if (f.out.empty()) {
    std::cout << maas::results_to_json(doc).dump(2) << '\n';
  } else {
    maas::save_results(doc, f.out);
  }
  if (logs(LogLevel::info)) {
    std::cerr << "branches " << result.branches << ", objective " << doc.objective_l1 << ", subsidized "
              << doc.objective_l1s << ", gap " << result.gap << ", " << result.wall_time << " s\n";
  }
  if (!result.found) {
    if (logs(LogLevel::warn)) std::cerr << "warning: no integral solution found\n";
    return kLimit;
  }
  if (result.limit_hit) {
    if (logs(LogLevel::warn)) std::cerr << "warning: search stopped at a limit; gap " << result.gap << '\n';
    return kLimit;
  }
  return kOk;
}

int cmd_report(const std::string& results, const std::string& format, const std::string& scenario) {
  try {
    const auto doc = maas::load_results(results);
    if (!scenario.empty() && maas::fingerprint(maas::load_scenario(scenario)) != doc.fingerprint && logs(LogLevel::warn))
      std::cerr << "warning: scenario fingerprint differs from the results document\n";
    maas::render_report(doc, maas::parse_report_format(format), std::cout);
  } catch (const maas::ScenarioError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInput;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInput;
  } catch (const std::exception& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    return kLimit;
  }
  return kOk;
}

int cmd_audit(const std::string& scenario, const std::string& results) {
  try {
    const auto s = maas::load_scenario(scenario);
    const auto doc = maas::load_results(results);
    const auto net = maas::expand(s);
    const auto report = maas::audit(s, doc);
    maas::render_audit(report, net, std::cout);
    return report.stable() ? kOk : kUnstable;
  } catch (const maas::ScenarioError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInput;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MaaS platform assignment: matching, stable pricing and subsidies"};
  app.require_subcommand(1);

  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "Check a scenario file");
  validate->add_option("scenario", validate_path, "Scenario JSON")->required();

  SolveFlags sf;
  auto* solve = app.add_subcommand("solve", "Solve a scenario and write a results document");
  solve->add_option("scenario", sf.scenario, "Scenario JSON")->required();
  solve->add_option("--mode", sf.mode, "exact or heuristic")->check(CLI::IsMember({"exact", "heuristic"}));
  solve->add_option("--gap", sf.gap, "Relative optimality gap at which to stop");
  solve->add_option("--max-branches", sf.max_branches, "Branch cap");
  solve->add_option("--max-time", sf.max_time, "Wall-clock cap in seconds");
  solve->add_option("--eps-sg", sf.eps_sg, "Subgradient tolerance");
  solve->add_option("--eps-fw", sf.eps_fw, "Frank-Wolfe step tolerance");
  solve->add_option("--fw-consec", sf.fw_consec, "Consecutive small steps that stop Frank-Wolfe");
  solve->add_option("--threads", sf.threads, "Worker threads for shortest paths")->check(CLI::PositiveNumber);
  solve->add_flag("--seedless-deterministic", sf.deterministic, "Sequential best-bound order (always on)");
  solve->add_option("--out", sf.out, "Results file (stdout when omitted)");

  std::string report_path, report_format = "table", report_scenario;
  auto* report = app.add_subcommand("report", "Render a results document");
  report->add_option("results", report_path, "Results JSON")->required();
  report->add_option("--format", report_format, "table, csv or json")->check(CLI::IsMember({"table", "csv", "json"}));
  report->add_option("--scenario", report_scenario, "Scenario to check the fingerprint against");

  std::string audit_scenario, audit_results;
  auto* audit = app.add_subcommand("audit", "Re-check the stability of a stored outcome");
  audit->add_option("scenario", audit_scenario, "Scenario JSON")->required();
  audit->add_option("results", audit_results, "Results JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInput;
  }

  try {
    if (*validate) return cmd_validate(validate_path);
    if (*solve) return cmd_solve(sf);
    if (*report) return cmd_report(report_path, report_format, report_scenario);
    if (*audit) return cmd_audit(audit_scenario, audit_results);
  } catch (const maas::ScenarioError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInput;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInput;
  } catch (const std::exception& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    return kLimit;
  }
  return kOk;
}
