#include "maas/lp.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace maas::lp {

std::string to_string(LpStatus status) {
  switch (status) {
    case LpStatus::optimal: return "optimal";
    case LpStatus::infeasible: return "infeasible";
    case LpStatus::unbounded: return "unbounded";
    case LpStatus::iteration_limit: return "iteration_limit";
  }
  return "unknown";
}

int LinearProgram::add_variable(double cost, double lower, double upper, std::string name) {
  vars_.push_back({cost, lower, upper, std::move(name)});
  return static_cast<int>(vars_.size()) - 1;
}

int LinearProgram::add_row(Row row) {
  rows_.push_back(std::move(row));
  return static_cast<int>(rows_.size()) - 1;
}

int LinearProgram::add_row(std::vector<Term> terms, Relation relation, double rhs, std::string name) {
  return add_row(Row{std::move(terms), relation, rhs, std::move(name)});
}

void LinearProgram::set_cost(int var, double cost) { vars_.at(static_cast<std::size_t>(var)).cost = cost; }

void LinearProgram::set_bounds(int var, double lower, double upper) {
  auto& v = vars_.at(static_cast<std::size_t>(var));
  v.lower = lower;
  v.upper = upper;
}

void LinearProgram::check() const {
  const int n = static_cast<int>(vars_.size());
  for (std::size_t j = 0; j < vars_.size(); ++j) {
    const auto& v = vars_[j];
    if (!std::isfinite(v.cost)) throw LpError("variable " + std::to_string(j) + " has a non-finite cost");
    if (std::isnan(v.lower) || std::isnan(v.upper) || v.lower == kInf || v.upper == -kInf) {
      throw LpError("variable " + std::to_string(j) + " has invalid bounds");
    }
  }
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    const auto& r = rows_[i];
    if (!std::isfinite(r.rhs)) throw LpError("row " + std::to_string(i) + " has a non-finite rhs");
    for (const auto& t : r.terms) {
      if (t.var < 0 || t.var >= n) {
        throw LpError("row " + std::to_string(i) + " references undeclared variable " + std::to_string(t.var));
      }
      if (!std::isfinite(t.coef)) throw LpError("row " + std::to_string(i) + " has a non-finite coefficient");
    }
  }
}

namespace {

enum class MapKind { shift, reflect, split };

// How an original variable is expressed through nonnegative columns.
struct VarMap {
  MapKind kind = MapKind::shift;
  int col = 0;  // split uses col (positive part) and col + 1 (negative part)
  double bound = 0.0;
};

// A row in column space, before slack/artificial columns are attached.
struct ColRow {
  std::vector<std::pair<int, double>> coefs;
  Relation rel = Relation::less_equal;
  double rhs = 0.0;
  int origin = -1;     // original row index, -1 for upper-bound rows
  double sign = 1.0;   // multiplier relating this row to the original row
};

}  // namespace

namespace detail {

struct Tableau {
  std::vector<VarMap> vmap;
  int struct_cols = 0;
  double cost_offset = 0.0;

  std::vector<std::vector<double>> T;
  std::vector<double> b;
  std::vector<int> basis;
  std::vector<double> d;  // reduced costs for the current phase
  double objval = 0.0;    // current phase objective, sum of c_B * b
  std::vector<double> cost;  // phase-two costs (min sense)
  std::vector<char> artificial;
  std::vector<int> identity_col;
  std::vector<int> row_origin;
  std::vector<double> row_sign;
  int iterations = 0;

  int cols() const { return static_cast<int>(d.size()); }
  int rows() const { return static_cast<int>(T.size()); }

  int add_column(double c, bool art) {
    for (auto& r : T) r.push_back(0.0);
    d.push_back(0.0);
    cost.push_back(c);
    artificial.push_back(art ? 1 : 0);
    return cols() - 1;
  }

  void pivot(int r, int c) {
    auto& pr = T[static_cast<std::size_t>(r)];
    const double inv = 1.0 / pr[static_cast<std::size_t>(c)];
    std::vector<int> nz;
    nz.reserve(pr.size());
    for (std::size_t j = 0; j < pr.size(); ++j) {
      if (pr[j] != 0.0) {
        pr[j] *= inv;
        nz.push_back(static_cast<int>(j));
      }
    }
    pr[static_cast<std::size_t>(c)] = 1.0;
    b[static_cast<std::size_t>(r)] *= inv;
    const double br = b[static_cast<std::size_t>(r)];
    for (std::size_t i = 0; i < T.size(); ++i) {
      if (static_cast<int>(i) == r) continue;
      auto& row = T[i];
      const double f = row[static_cast<std::size_t>(c)];
      if (f == 0.0) continue;
      for (int j : nz) row[static_cast<std::size_t>(j)] -= f * pr[static_cast<std::size_t>(j)];
      row[static_cast<std::size_t>(c)] = 0.0;
      b[i] -= f * br;
    }
    const double f = d[static_cast<std::size_t>(c)];
    if (f != 0.0) {
      for (int j : nz) d[static_cast<std::size_t>(j)] -= f * pr[static_cast<std::size_t>(j)];
      d[static_cast<std::size_t>(c)] = 0.0;
      objval += f * br;
    }
    basis[static_cast<std::size_t>(r)] = c;
    ++iterations;
  }

  void price(const std::vector<double>& c) {
    d = c;
    objval = 0.0;
    for (std::size_t i = 0; i < T.size(); ++i) {
      const double cb = c[static_cast<std::size_t>(basis[i])];
      if (cb == 0.0) continue;
      for (std::size_t j = 0; j < d.size(); ++j) d[j] -= cb * T[i][j];
      objval += cb * b[i];
    }
    for (std::size_t i = 0; i < T.size(); ++i) d[static_cast<std::size_t>(basis[i])] = 0.0;
  }

  // Primal simplex with Bland's rule. Returns optimal, unbounded or
  // iteration_limit.
  LpStatus primal(bool bar_artificials, const LpTolerances& tol, int max_iter) {
    const double opt_tol = 1e-9;
    while (true) {
      if (iterations >= max_iter) return LpStatus::iteration_limit;
      int enter = -1;
      for (int j = 0; j < cols(); ++j) {
        if (bar_artificials && artificial[static_cast<std::size_t>(j)]) continue;
        if (d[static_cast<std::size_t>(j)] < -opt_tol) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return LpStatus::optimal;
      int leave = -1;
      double best = 0.0;
      for (int i = 0; i < rows(); ++i) {
        const double a = T[static_cast<std::size_t>(i)][static_cast<std::size_t>(enter)];
        if (a <= tol.pivot) continue;
        const double ratio = std::max(0.0, b[static_cast<std::size_t>(i)]) / a;
        if (leave < 0 || ratio < best - 1e-12 * (1.0 + std::abs(best)) ||
            (std::abs(ratio - best) <= 1e-12 * (1.0 + std::abs(best)) &&
             basis[static_cast<std::size_t>(i)] < basis[static_cast<std::size_t>(leave)])) {
          leave = i;
          best = ratio;
        }
      }
      if (leave < 0) return LpStatus::unbounded;
      pivot(leave, enter);
    }
  }

  // Dual simplex from a dual-feasible basis.
  LpStatus dual(const LpTolerances& tol, int max_iter) {
    while (true) {
      if (iterations >= max_iter) return LpStatus::iteration_limit;
      int leave = -1;
      for (int i = 0; i < rows(); ++i) {
        if (b[static_cast<std::size_t>(i)] < -tol.feasibility &&
            (leave < 0 || basis[static_cast<std::size_t>(i)] < basis[static_cast<std::size_t>(leave)])) {
          leave = i;
        }
      }
      if (leave < 0) return LpStatus::optimal;
      const auto& row = T[static_cast<std::size_t>(leave)];
      int enter = -1;
      double best = 0.0;
      for (int j = 0; j < cols(); ++j) {
        if (artificial[static_cast<std::size_t>(j)]) continue;
        const double a = row[static_cast<std::size_t>(j)];
        if (a >= -tol.pivot) continue;
        const double ratio = std::max(0.0, d[static_cast<std::size_t>(j)]) / -a;
        if (enter < 0 || ratio < best - 1e-12 * (1.0 + std::abs(best))) {
          enter = j;
          best = ratio;
        }
      }
      if (enter < 0) return LpStatus::infeasible;
      pivot(leave, enter);
    }
  }
};

}  // namespace detail

namespace {

using Tab = detail::Tableau;

}  // namespace

// Maps an original row to column space (coefficients merged per column).
static ColRow to_columns(const Row& row, const std::vector<VarMap>& vmap) {
  ColRow cr;
  cr.rel = row.relation;
  cr.rhs = row.rhs;
  std::vector<std::pair<int, double>> raw;
  for (const auto& t : row.terms) {
    const auto& m = vmap[static_cast<std::size_t>(t.var)];
    switch (m.kind) {
      case MapKind::shift:
        raw.push_back({m.col, t.coef});
        cr.rhs -= t.coef * m.bound;
        break;
      case MapKind::reflect:
        raw.push_back({m.col, -t.coef});
        cr.rhs -= t.coef * m.bound;
        break;
      case MapKind::split:
        raw.push_back({m.col, t.coef});
        raw.push_back({m.col + 1, -t.coef});
        break;
    }
  }
  std::sort(raw.begin(), raw.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  for (const auto& [c, v] : raw) {
    if (!cr.coefs.empty() && cr.coefs.back().first == c) {
      cr.coefs.back().second += v;
    } else {
      cr.coefs.push_back({c, v});
    }
  }
  return cr;
}

Simplex::Simplex(LinearProgram lp, LpTolerances tol) : lp_(std::move(lp)), tol_(tol) {}
Simplex::~Simplex() = default;
Simplex::Simplex(Simplex&&) noexcept = default;
Simplex& Simplex::operator=(Simplex&&) noexcept = default;

namespace {

void extract(const LinearProgram& lp, const Tab& t, LpSolution& sol) {
  std::vector<double> z(static_cast<std::size_t>(t.cols()), 0.0);
  for (std::size_t i = 0; i < t.basis.size(); ++i) z[static_cast<std::size_t>(t.basis[i])] = t.b[i];
  sol.x.assign(lp.variable_count(), 0.0);
  for (std::size_t j = 0; j < lp.variable_count(); ++j) {
    const auto& m = t.vmap[j];
    const double zc = z[static_cast<std::size_t>(m.col)];
    switch (m.kind) {
      case MapKind::shift: sol.x[j] = m.bound + zc; break;
      case MapKind::reflect: sol.x[j] = m.bound - zc; break;
      case MapKind::split: sol.x[j] = zc - z[static_cast<std::size_t>(m.col + 1)]; break;
    }
  }
  sol.objective = evaluate_objective(lp, sol.x);
  sol.duals.assign(lp.row_count(), 0.0);
  const double sense = lp.sense() == Sense::maximize ? -1.0 : 1.0;
  for (std::size_t i = 0; i < t.T.size(); ++i) {
    if (t.row_origin[i] < 0) continue;
    const int c = t.identity_col[i];
    const double y = t.cost[static_cast<std::size_t>(c)] - t.d[static_cast<std::size_t>(c)];
    sol.duals[static_cast<std::size_t>(t.row_origin[i])] += sense * t.row_sign[i] * y;
  }
}

void append_row(Tab& t, ColRow cr) {
  if (cr.rhs < 0.0) {
    for (auto& [c, v] : cr.coefs) v = -v;
    cr.rhs = -cr.rhs;
    cr.sign = -cr.sign;
    if (cr.rel == Relation::less_equal) {
      cr.rel = Relation::greater_equal;
    } else if (cr.rel == Relation::greater_equal) {
      cr.rel = Relation::less_equal;
    }
  }
  std::vector<double> row(static_cast<std::size_t>(t.cols()), 0.0);
  for (const auto& [c, v] : cr.coefs) row[static_cast<std::size_t>(c)] = v;
  t.T.push_back(std::move(row));
  t.b.push_back(cr.rhs);
  const int r = t.rows() - 1;
  int id = -1;
  if (cr.rel == Relation::less_equal) {
    id = t.add_column(0.0, false);
    t.T[static_cast<std::size_t>(r)][static_cast<std::size_t>(id)] = 1.0;
  } else {
    if (cr.rel == Relation::greater_equal) {
      const int s = t.add_column(0.0, false);
      t.T[static_cast<std::size_t>(r)][static_cast<std::size_t>(s)] = -1.0;
    }
    id = t.add_column(0.0, true);
    t.T[static_cast<std::size_t>(r)][static_cast<std::size_t>(id)] = 1.0;
  }
  t.basis.push_back(id);
  t.identity_col.push_back(id);
  t.row_origin.push_back(cr.origin);
  t.row_sign.push_back(cr.sign);
}

}  // namespace

void Simplex::cold() {
  ++cold_solves_;
  lp_.check();
  tab_ = std::make_unique<detail::Tableau>();
  auto& t = *tab_;
  sol_ = LpSolution{};

  std::vector<ColRow> bound_rows;
  int col = 0;
  std::vector<double> struct_cost;
  for (const auto& v : lp_.variables()) {
    if (v.lower > v.upper) {
      sol_.status = LpStatus::infeasible;
      return;
    }
    VarMap m;
    if (std::isfinite(v.lower)) {
      m = {MapKind::shift, col, v.lower};
      struct_cost.push_back(v.cost);
      t.cost_offset += v.cost * v.lower;
      if (std::isfinite(v.upper)) {
        ColRow ub;
        ub.coefs = {{col, 1.0}};
        ub.rhs = v.upper - v.lower;
        bound_rows.push_back(ub);
      }
      ++col;
    } else if (std::isfinite(v.upper)) {
      m = {MapKind::reflect, col, v.upper};
      struct_cost.push_back(-v.cost);
      t.cost_offset += v.cost * v.upper;
      ++col;
    } else {
      m = {MapKind::split, col, 0.0};
      struct_cost.push_back(v.cost);
      struct_cost.push_back(-v.cost);
      col += 2;
    }
    t.vmap.push_back(m);
  }
  t.struct_cols = col;
  const double sense = lp_.sense() == Sense::maximize ? -1.0 : 1.0;
  for (int j = 0; j < col; ++j) t.add_column(sense * struct_cost[static_cast<std::size_t>(j)], false);

  for (std::size_t i = 0; i < lp_.row_count(); ++i) {
    ColRow cr = to_columns(lp_.rows()[i], t.vmap);
    cr.origin = static_cast<int>(i);
    append_row(t, std::move(cr));
  }
  for (auto& br : bound_rows) append_row(t, std::move(br));

  // Phase one: minimize the sum of artificials.
  std::vector<double> phase1(static_cast<std::size_t>(t.cols()), 0.0);
  bool any_art = false;
  for (int j = 0; j < t.cols(); ++j) {
    if (t.artificial[static_cast<std::size_t>(j)]) {
      phase1[static_cast<std::size_t>(j)] = 1.0;
      any_art = true;
    }
  }
  double bmax = 1.0;
  for (double v : t.b) bmax = std::max(bmax, std::abs(v));
  if (any_art) {
    t.price(phase1);
    const auto st = t.primal(false, tol_, tol_.max_iterations);
    if (st == LpStatus::iteration_limit) {
      sol_.status = st;
      sol_.iterations = t.iterations;
      return;
    }
    if (t.objval > tol_.feasibility * bmax) {
      sol_.status = LpStatus::infeasible;
      sol_.iterations = t.iterations;
      return;
    }
    // Drive zero-valued artificials out of the basis where possible; rows
    // where that fails are linearly dependent and stay inert.
    for (int i = 0; i < t.rows(); ++i) {
      if (!t.artificial[static_cast<std::size_t>(t.basis[static_cast<std::size_t>(i)])]) continue;
      const auto& row = t.T[static_cast<std::size_t>(i)];
      int best = -1;
      for (int j = 0; j < t.cols(); ++j) {
        if (t.artificial[static_cast<std::size_t>(j)]) continue;
        if (std::abs(row[static_cast<std::size_t>(j)]) > tol_.pivot &&
            (best < 0 || std::abs(row[static_cast<std::size_t>(j)]) >
                             std::abs(row[static_cast<std::size_t>(best)]) * 10.0)) {
          best = j;
        }
      }
      if (best >= 0) t.pivot(i, best);
    }
  }
  t.price(t.cost);
  const auto st = t.primal(true, tol_, tol_.max_iterations);
  sol_.status = st;
  sol_.iterations = t.iterations;
  if (st == LpStatus::optimal) extract(lp_, t, sol_);
}

const LpSolution& Simplex::solve() {
  cold();
  return sol_;
}

const LpSolution& Simplex::add_rows(std::span<const Row> rows) {
  for (const auto& r : rows) lp_.add_row(r);
  if (!tab_ || sol_.status == LpStatus::unbounded || sol_.status == LpStatus::iteration_limit) {
    cold();
    return sol_;
  }
  if (sol_.status == LpStatus::infeasible) return sol_;  // adding rows cannot restore feasibility
  lp_.check();
  ++warm_solves_;
  auto& t = *tab_;
  const std::size_t first = lp_.row_count() - rows.size();
  for (std::size_t k = 0; k < rows.size(); ++k) {
    ColRow base = to_columns(rows[k], t.vmap);
    base.origin = static_cast<int>(first + k);
    std::vector<ColRow> parts;
    if (base.rel == Relation::equal) {
      ColRow le = base;
      le.rel = Relation::less_equal;
      ColRow ge = base;
      ge.rel = Relation::greater_equal;
      parts = {le, ge};
    } else {
      parts = {base};
    }
    for (auto& p : parts) {
      // Stored as a <= row with a basic slack; the row is then rewritten in
      // terms of the nonbasic columns.
      if (p.rel == Relation::greater_equal) {
        for (auto& [c, v] : p.coefs) v = -v;
        p.rhs = -p.rhs;
        p.sign = -p.sign;
      }
      const int s = t.add_column(0.0, false);
      std::vector<double> row(static_cast<std::size_t>(t.cols()), 0.0);
      for (const auto& [c, v] : p.coefs) row[static_cast<std::size_t>(c)] = v;
      row[static_cast<std::size_t>(s)] = 1.0;
      double rhs = p.rhs;
      for (int i = 0; i < t.rows(); ++i) {
        const int bc = t.basis[static_cast<std::size_t>(i)];
        const double f = row[static_cast<std::size_t>(bc)];
        if (f == 0.0) continue;
        const auto& ti = t.T[static_cast<std::size_t>(i)];
        for (std::size_t j = 0; j < row.size(); ++j) {
          if (ti[j] != 0.0) row[j] -= f * ti[j];
        }
        row[static_cast<std::size_t>(bc)] = 0.0;
        rhs -= f * t.b[static_cast<std::size_t>(i)];
      }
      t.T.push_back(std::move(row));
      t.b.push_back(rhs);
      t.basis.push_back(s);
      t.identity_col.push_back(s);
      t.row_origin.push_back(p.origin);
      t.row_sign.push_back(p.sign);
    }
  }
  const int budget = t.iterations + 50 * (t.rows() + t.cols()) + 1000;
  const auto st = t.dual(tol_, budget);
  if (st == LpStatus::iteration_limit) {
    cold();
    return sol_;
  }
  sol_.status = st;
  sol_.iterations = t.iterations;
  if (st == LpStatus::optimal) {
    // Clean up any dual infeasibility introduced by round-off.
    const auto st2 = t.primal(true, tol_, tol_.max_iterations);
    if (st2 != LpStatus::optimal) {
      cold();
      return sol_;
    }
    extract(lp_, t, sol_);
    if (max_violation(lp_, sol_.x) > tol_.feasibility * 10.0) cold();
  }
  return sol_;
}

LpSolution solve_lp(const LinearProgram& lp, const LpTolerances& tol) {
  Simplex s(lp, tol);
  return s.solve();
}

double evaluate_objective(const LinearProgram& lp, std::span<const double> x) {
  double obj = 0.0;
  for (std::size_t j = 0; j < lp.variable_count(); ++j) obj += lp.variables()[j].cost * x[j];
  return obj;
}

double max_violation(const LinearProgram& lp, std::span<const double> x) {
  if (x.size() != lp.variable_count()) return x.empty() && lp.variable_count() == 0 ? 0.0 : kInf;
  double worst = 0.0;
  for (std::size_t j = 0; j < lp.variable_count(); ++j) {
    const auto& v = lp.variables()[j];
    worst = std::max(worst, v.lower - x[j]);
    worst = std::max(worst, x[j] - v.upper);
  }
  for (const auto& r : lp.rows()) {
    double lhs = 0.0;
    for (const auto& t : r.terms) lhs += t.coef * x[static_cast<std::size_t>(t.var)];
    switch (r.relation) {
      case Relation::less_equal: worst = std::max(worst, lhs - r.rhs); break;
      case Relation::greater_equal: worst = std::max(worst, r.rhs - lhs); break;
      case Relation::equal: worst = std::max(worst, std::abs(lhs - r.rhs)); break;
    }
  }
  return worst;
}

void write_mps(const LinearProgram& lp, std::ostream& out, const std::string& name) {
  auto rname = [&](std::size_t i) {
    const auto& n = lp.rows()[i].name;
    return n.empty() ? "R" + std::to_string(i) : n;
  };
  auto cname = [&](std::size_t j) {
    const auto& n = lp.variables()[j].name;
    return n.empty() ? "X" + std::to_string(j) : n;
  };
  out << "NAME          " << name << "\n";
  if (lp.sense() == Sense::maximize) out << "OBJSENSE\n    MAX\n";
  out << "ROWS\n N  COST\n";
  for (std::size_t i = 0; i < lp.row_count(); ++i) {
    const char c = lp.rows()[i].relation == Relation::less_equal      ? 'L'
                   : lp.rows()[i].relation == Relation::greater_equal ? 'G'
                                                                      : 'E';
    out << ' ' << c << "  " << rname(i) << "\n";
  }
  std::vector<std::vector<std::pair<std::size_t, double>>> cols(lp.variable_count());
  for (std::size_t i = 0; i < lp.row_count(); ++i) {
    for (const auto& t : lp.rows()[i].terms) cols[static_cast<std::size_t>(t.var)].push_back({i, t.coef});
  }
  out << "COLUMNS\n" << std::setprecision(17);
  for (std::size_t j = 0; j < lp.variable_count(); ++j) {
    out << "    " << std::left << std::setw(10) << cname(j) << std::setw(10) << "COST"
        << lp.variables()[j].cost << "\n";
    for (const auto& [i, v] : cols[j]) {
      out << "    " << std::setw(10) << cname(j) << std::setw(10) << rname(i) << v << "\n";
    }
  }
  out << "RHS\n";
  for (std::size_t i = 0; i < lp.row_count(); ++i) {
    if (lp.rows()[i].rhs != 0.0) {
      out << "    " << std::setw(10) << "RHS" << std::setw(10) << rname(i) << lp.rows()[i].rhs << "\n";
    }
  }
  out << "BOUNDS\n";
  for (std::size_t j = 0; j < lp.variable_count(); ++j) {
    const auto& v = lp.variables()[j];
    if (v.lower == -kInf && v.upper == kInf) {
      out << " FR BND       " << cname(j) << "\n";
      continue;
    }
    if (v.lower == -kInf) {
      out << " MI BND       " << cname(j) << "\n";
    } else if (v.lower != 0.0) {
      out << " LO BND       " << std::setw(10) << cname(j) << v.lower << "\n";
    }
    if (v.upper != kInf) out << " UP BND       " << std::setw(10) << cname(j) << v.upper << "\n";
  }
  out << "ENDATA\n" << std::right;
}

}  // namespace maas::lp
