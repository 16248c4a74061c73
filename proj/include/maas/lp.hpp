#pragma once

#include <iosfwd>
#include <limits>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace maas::lp {

namespace detail {
struct Tableau;
}

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Sense { minimize, maximize };
enum class Relation { less_equal, equal, greater_equal };
enum class LpStatus { optimal, infeasible, unbounded, iteration_limit };

std::string to_string(LpStatus status);

struct Term {
  int var = 0;
  double coef = 0.0;
};

struct Row {
  std::vector<Term> terms;
  Relation relation = Relation::less_equal;
  double rhs = 0.0;
  std::string name;
};

struct Variable {
  double cost = 0.0;
  double lower = 0.0;
  double upper = kInf;
  std::string name;
};

/// Thrown when a row references an undeclared variable or carries a
/// non-finite coefficient.
class LpError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class LinearProgram {
 public:
  explicit LinearProgram(Sense sense = Sense::minimize) : sense_(sense) {}

  int add_variable(double cost, double lower = 0.0, double upper = kInf, std::string name = {});
  int add_row(Row row);
  int add_row(std::vector<Term> terms, Relation relation, double rhs, std::string name = {});
  void set_cost(int var, double cost);
  void set_bounds(int var, double lower, double upper);

  Sense sense() const { return sense_; }
  const std::vector<Variable>& variables() const { return vars_; }
  const std::vector<Row>& rows() const { return rows_; }
  std::size_t variable_count() const { return vars_.size(); }
  std::size_t row_count() const { return rows_.size(); }

  /// Throws LpError when a row or variable is malformed.
  void check() const;

 private:
  Sense sense_;
  std::vector<Variable> vars_;
  std::vector<Row> rows_;
};

struct LpTolerances {
  double feasibility = 1e-7;
  double pivot = 1e-9;
  int max_iterations = 200000;
};

struct LpSolution {
  LpStatus status = LpStatus::infeasible;
  std::vector<double> x;
  double objective = 0.0;
  /// One dual value per row, in the program's own sense: d(objective)/d(rhs).
  std::vector<double> duals;
  int iterations = 0;

  bool optimal() const { return status == LpStatus::optimal; }
};

/// Dense two-phase primal simplex with Bland's rule.
LpSolution solve_lp(const LinearProgram& lp, const LpTolerances& tol = {});

/// Owns a program and its final tableau so rows can be appended and the
/// program re-optimized from the previous basis by dual simplex.
class Simplex {
 public:
  explicit Simplex(LinearProgram lp, LpTolerances tol = {});
  ~Simplex();
  Simplex(Simplex&&) noexcept;
  Simplex& operator=(Simplex&&) noexcept;
  Simplex(const Simplex&) = delete;
  Simplex& operator=(const Simplex&) = delete;

  const LpSolution& solve();
  /// Appends rows and re-optimizes. Equivalent to solve_lp on the augmented
  /// program; falls back to a cold solve when no warm basis is usable.
  const LpSolution& add_rows(std::span<const Row> rows);
  const LpSolution& add_row(const Row& row) { return add_rows(std::span<const Row>(&row, 1)); }

  const LinearProgram& program() const { return lp_; }
  const LpSolution& solution() const { return sol_; }
  int warm_solves() const { return warm_solves_; }
  int cold_solves() const { return cold_solves_; }

 private:
  LinearProgram lp_;
  LpTolerances tol_;
  LpSolution sol_;
  std::unique_ptr<detail::Tableau> tab_;
  int warm_solves_ = 0;
  int cold_solves_ = 0;
  void cold();
};

/// Largest violation of any row or bound at `x` (0 when feasible).
double max_violation(const LinearProgram& lp, std::span<const double> x);

double evaluate_objective(const LinearProgram& lp, std::span<const double> x);

/// Fixed-format MPS dump for cross-checking with external solvers.
void write_mps(const LinearProgram& lp, std::ostream& out, const std::string& name = "MAAS");

}  // namespace maas::lp
