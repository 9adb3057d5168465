#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "bargeflow/branch_bound.hpp"
#include "bargeflow/extensive_form.hpp"

namespace bargeflow {

struct SubproblemSolution {
  double value = 0.0;
  std::vector<double> primal;
  std::vector<double> duals;          // per recourse row
  std::vector<double> reduced_costs;  // per recourse column
};

// Recourse LP of one scenario at a first-stage plan (flat first-stage ids).
// Throws InternalError if the LP is not optimal, since shortage variables make
// every plan recoverable.
SubproblemSolution solve_subproblem(const RecourseLp& recourse,
                                    const std::vector<double>& plan,
                                    const SimplexOptions& options = {});
SubproblemSolution solve_subproblem(const NetworkInstance& instance,
                                    const Scenario& scenario,
                                    const std::vector<double>& plan);

// theta >= intercept + sum(coefficients * y). scenario < 0 marks an aggregate
// cut on the expected recourse.
struct OptimalityCut {
  std::ptrdiff_t scenario = -1;
  double intercept = 0.0;
  std::vector<std::pair<std::size_t, double>> coefficients;

  double evaluate(const std::vector<double>& plan) const;
  bool operator==(const OptimalityCut&) const = default;
};

// Dual lower bound of the recourse as an affine function of the plan. Exact
// at the plan the duals came from.
OptimalityCut generate_cut(const RecourseLp& recourse,
                           const SubproblemSolution& solution,
                           std::ptrdiff_t scenario);

// Probability-weighted sum of per-scenario cuts.
OptimalityCut aggregate_cuts(const std::vector<OptimalityCut>& cuts,
                             const std::vector<double>& weights);

// Cuts keyed by their data rounded to a 1e-9 grid; duplicates are rejected.
class CutPool {
 public:
  bool add(const OptimalityCut& cut);
  const std::vector<OptimalityCut>& cuts() const { return cuts_; }
  std::size_t size() const { return cuts_.size(); }
  // Times each cut was binding at a master solution.
  const std::vector<std::size_t>& activity() const { return activity_; }
  void record_activity(const std::vector<double>& plan,
                       const std::vector<double>& theta, double tol);

 private:
  std::vector<OptimalityCut> cuts_;
  std::vector<std::size_t> activity_;
  std::set<std::vector<std::int64_t>> keys_;
};

struct IterationLog {
  std::size_t iteration = 0;
  double lower_bound = 0.0;
  double upper_bound = 0.0;
  double gap = 0.0;
  std::size_t cuts_added = 0;
  double wall_seconds = 0.0;
};

// Tab-separated: iteration, LB, UB, gap, cuts added, wall seconds.
void write_log_line(std::ostream& out, const IterationLog& entry);

struct LShapedOptions {
  // Stops when UB - LB <= tolerance * (1 + |UB|).
  double tolerance = 1e-6;
  std::size_t max_iterations = 500;
  bool multi_cut = true;
  std::size_t workers = 1;
  MilpOptions master;
  // Warm start: cuts over the same scenario set and a candidate plan.
  std::vector<OptimalityCut> initial_cuts;
  std::optional<std::vector<double>> incumbent;
  std::ostream* log = nullptr;
};

struct LShapedResult {
  MilpStatus status = MilpStatus::kInfeasible;
  bool iteration_limit = false;
  double objective = 0.0;  // expected cost of `plan`
  std::vector<double> plan;
  std::vector<double> scenario_values;  // recourse cost of `plan` per scenario
  double lower_bound = 0.0;
  double upper_bound = 0.0;
  std::size_t iterations = 0;
  std::vector<IterationLog> history;
  std::vector<OptimalityCut> cuts;
  std::vector<std::size_t> cut_activity;
};

LShapedResult run_lshaped(const NetworkInstance& instance,
                          const ScenarioSet& scenarios,
                          const LShapedOptions& options = {});

// Expected cost of a fixed plan: fixed costs plus weighted recourse values.
struct PlanEvaluation {
  double objective = 0.0;
  std::vector<double> scenario_values;
  std::vector<OptimalityCut> cuts;
};

PlanEvaluation evaluate_plan(const NetworkInstance& instance,
                             const ScenarioSet& scenarios,
                             const std::vector<RecourseLp>& recourse,
                             const std::vector<double>& plan,
                             std::size_t workers);

}  // namespace bargeflow
