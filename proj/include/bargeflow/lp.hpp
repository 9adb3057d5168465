#pragma once

#include <cstddef>
#include <limits>
#include <vector>

namespace bargeflow {

constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class RowSense { kLessEqual, kGreaterEqual, kEqual };

struct SparseEntry {
  std::size_t row = 0;
  std::size_t col = 0;
  double value = 0.0;
  bool operator==(const SparseEntry&) const = default;
};

// min c'x  s.t.  A x (sense) b,  lower <= x <= upper.
// Lower bounds must be finite or -inf with a finite upper bound; upper bounds
// may be +inf.
struct StandardFormLP {
  std::vector<double> objective;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<RowSense> sense;
  std::vector<double> rhs;
  std::vector<SparseEntry> entries;

  std::size_t num_cols() const { return objective.size(); }
  std::size_t num_rows() const { return rhs.size(); }

  std::size_t add_col(double cost, double lo, double hi);
  std::size_t add_row(RowSense row_sense, double row_rhs);
  void set(std::size_t row, std::size_t col, double value);

  bool operator==(const StandardFormLP&) const = default;
};

// Same LP with duplicate entries summed, zeros dropped and entries sorted by
// (row, col); two canonical LPs compare equal iff they describe one model.
StandardFormLP canonicalize(const StandardFormLP& lp);

enum class LpStatus { kOptimal, kInfeasible, kUnbounded };

const char* to_string(LpStatus status);

struct LpResult {
  LpStatus status = LpStatus::kInfeasible;
  double objective = 0.0;
  std::vector<double> primal;         // per column
  // Row duals y with d = c - A'y; y_i <= 0 on binding <= rows, >= 0 on >=.
  std::vector<double> duals;
  std::vector<double> reduced_costs;  // per column
  // Infeasible: y with y'b > max over the bound box of y'(A x + s), where the
  // row slack s is >= 0 for <= rows, <= 0 for >= rows and 0 for equalities.
  std::vector<double> farkas;
  // Unbounded: direction r with c'r < 0 that stays feasible from primal.
  std::vector<double> ray;
  std::size_t iterations = 0;
  // Optimal: the basic variables, column j as j and the slack of row i as
  // num_cols + i.
  std::vector<std::size_t> basis;
};

// Starting point for a related LP with the same rows and columns, typically
// an earlier optimum after bound changes. Missing or dependent basic
// variables are replaced by slacks.
struct WarmStart {
  std::vector<std::size_t> basis;
  std::vector<double> primal;  // nonbasic columns start at the nearest bound
};

struct SimplexOptions {
  double feasibility_tol = 1e-8;
  double optimality_tol = 1e-8;
  double zero_tol = 1e-11;
  double pivot_tol = 1e-9;
  std::size_t refactor_interval = 100;
  std::size_t bland_after_degenerate = 50;
  std::size_t max_iterations = 200000;
  std::size_t max_refactor_retries = 3;
};

// Bounded-variable revised simplex. Deterministic: identical input gives
// bit-identical output. Throws InvalidInput on malformed input and
// NumericalFailure when no usable basis can be recovered.
LpResult solve_lp(const StandardFormLP& lp, const SimplexOptions& options = {},
                  const WarmStart* warm = nullptr);

// Largest violation of rows and bounds by x; 0 when feasible.
double max_violation(const StandardFormLP& lp, const std::vector<double>& x);

}  // namespace bargeflow
