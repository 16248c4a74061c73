#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "maas/io.hpp"

namespace maas {

enum class ReportFormat { table, csv, json };

/// Parses "table", "csv" or "json"; throws std::invalid_argument otherwise.
ReportFormat parse_report_format(std::string_view name);

/// Deterministic rendering of a results document. Tables round to two
/// decimals; json keeps full precision.
void render_report(const ResultsDocument& doc, ReportFormat format, std::ostream& out);

struct PathViolation {
  int group = 0;
  GroupId group_id = 0;
  LinkPath links;
  double gain = 0.0;  // payoff a switching traveler would gain
  InstabilityDiagnostic diagnostic;  // against the group's largest matched path
};

struct OperatorViolation {
  OperatorId id = 0;
  double revenue = 0.0;
  double cost = 0.0;
};

struct AuditFinding {
  OutcomeVertex vertex = OutcomeVertex::buyer_optimal;
  bool stored = false;  // false when the fare floor stood in for a missing outcome
  std::vector<PathViolation> paths;
  std::vector<OperatorViolation> operators;
  double payoff_residual = 0.0;  // largest matched-path payoff row residual
  bool clean = true;
};

struct AuditReport {
  bool fingerprint_matches = true;
  std::vector<AuditFinding> findings;

  bool stable() const;
  std::size_t violation_count() const;
};

/// Re-checks a stored outcome against the scenario: operator cost
/// recovery, matched-path payoffs and a fresh separation pass.
AuditReport audit(const Scenario& scenario, const ResultsDocument& doc, double tolerance = 1e-6);

void render_audit(const AuditReport& report, const ExpandedNetwork& net, std::ostream& out);

/// Node sequence of a path, e.g. "[1,2,3]"; MOD vertices print as
/// m<operator>h<fleet>z<zone>.
std::string path_nodes(const ExpandedNetwork& net, const LinkPath& path);

}  // namespace maas
