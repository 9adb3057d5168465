#include "bargeflow/lshaped.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>

#include "bargeflow/error.hpp"
#include "bargeflow/parallel.hpp"

namespace bargeflow {

SubproblemSolution solve_subproblem(const RecourseLp& recourse,
                                    const std::vector<double>& plan,
                                    const SimplexOptions& options) {
  const LpResult res = solve_lp(fix_plan(recourse, plan), options);
  if (res.status != LpStatus::kOptimal) {
    throw InternalError(std::string("recourse problem is ") +
                        to_string(res.status) +
                        "; relatively complete recourse violated");
  }
  return {res.objective, res.primal, res.duals, res.reduced_costs};
}

SubproblemSolution solve_subproblem(const NetworkInstance& instance,
                                    const Scenario& scenario,
                                    const std::vector<double>& plan) {
  return solve_subproblem(build_recourse(instance, scenario), plan);
}

double OptimalityCut::evaluate(const std::vector<double>& plan) const {
  double v = intercept;
  for (const auto& [col, coef] : coefficients) {
    if (col >= plan.size()) throw InvalidInput("cut references a missing column");
    v += coef * plan[col];
  }
  return v;
}

OptimalityCut generate_cut(const RecourseLp& recourse,
                           const SubproblemSolution& solution,
                           std::ptrdiff_t scenario) {
  const StandardFormLP& lp = recourse.lp;
  if (solution.duals.size() != lp.num_rows() ||
      solution.reduced_costs.size() != lp.num_cols()) {
    throw InvalidInput("duals do not match the recourse problem");
  }
  OptimalityCut cut;
  cut.scenario = scenario;
  double intercept = 0.0;
  for (std::size_t r = 0; r < lp.num_rows(); ++r) {
    intercept += solution.duals[r] * lp.rhs[r];
  }
  // Bound terms of the dual objective, with d recomputed from the duals so
  // the cut is a true dual bound.
  std::vector<double> d = lp.objective;
  for (const SparseEntry& e : lp.entries) d[e.col] -= e.value * solution.duals[e.row];
  for (std::size_t j = 0; j < lp.num_cols(); ++j) {
    if (d[j] > 0.0 && std::isfinite(lp.lower[j])) {
      intercept += lp.lower[j] * d[j];
    } else if (d[j] < 0.0 && std::isfinite(lp.upper[j])) {
      intercept += lp.upper[j] * d[j];
    }
  }
  cut.intercept = intercept;
  std::vector<std::pair<std::size_t, double>> terms;
  for (const SparseEntry& link : recourse.links) {
    const double coef = -solution.duals[link.row] * link.value;
    if (coef != 0.0) terms.push_back({link.col, coef});
  }
  std::sort(terms.begin(), terms.end());
  for (const auto& t : terms) {
    if (!cut.coefficients.empty() && cut.coefficients.back().first == t.first) {
      cut.coefficients.back().second += t.second;
    } else {
      cut.coefficients.push_back(t);
    }
  }
  std::erase_if(cut.coefficients, [](const auto& t) { return t.second == 0.0; });
  return cut;
}

OptimalityCut aggregate_cuts(const std::vector<OptimalityCut>& cuts,
                             const std::vector<double>& weights) {
  if (cuts.size() != weights.size()) throw InvalidInput("one weight per cut");
  std::map<std::size_t, double> sum;
  OptimalityCut out;
  for (std::size_t k = 0; k < cuts.size(); ++k) {
    out.intercept += weights[k] * cuts[k].intercept;
    for (const auto& [col, coef] : cuts[k].coefficients) sum[col] += weights[k] * coef;
  }
  for (const auto& [col, coef] : sum) {
    if (coef != 0.0) out.coefficients.push_back({col, coef});
  }
  return out;
}

bool CutPool::add(const OptimalityCut& cut) {
  auto grid = [](double v) { return static_cast<std::int64_t>(std::llround(v * 1e9)); };
  std::vector<std::int64_t> key;
  key.reserve(2 + 2 * cut.coefficients.size());
  key.push_back(cut.scenario);
  key.push_back(grid(cut.intercept));
  for (const auto& [col, coef] : cut.coefficients) {
    key.push_back(static_cast<std::int64_t>(col));
    key.push_back(grid(coef));
  }
  if (!keys_.insert(std::move(key)).second) return false;
  cuts_.push_back(cut);
  activity_.push_back(0);
  return true;
}

void CutPool::record_activity(const std::vector<double>& plan,
                              const std::vector<double>& theta, double tol) {
  for (std::size_t k = 0; k < cuts_.size(); ++k) {
    const std::size_t slot =
        cuts_[k].scenario < 0 ? 0 : static_cast<std::size_t>(cuts_[k].scenario);
    if (slot < theta.size() &&
        std::abs(cuts_[k].evaluate(plan) - theta[slot]) <= tol * (1.0 + std::abs(theta[slot]))) {
      ++activity_[k];
    }
  }
}

void write_log_line(std::ostream& out, const IterationLog& e) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%zu\t%.10g\t%.10g\t%.3e\t%zu\t%.3f", e.iteration,
                e.lower_bound, e.upper_bound, e.gap, e.cuts_added, e.wall_seconds);
  out << buf << '\n';
}

PlanEvaluation evaluate_plan(const NetworkInstance& instance,
                             const ScenarioSet& scenarios,
                             const std::vector<RecourseLp>& recourse,
                             const std::vector<double>& plan,
                             std::size_t workers) {
  const VariableIndex index(instance, 0);
  if (plan.size() != index.num_first_stage()) {
    throw InvalidInput("plan length does not match the first stage");
  }
  const std::vector<double> fixed = first_stage_costs(instance, index);
  PlanEvaluation out;
  for (std::size_t j = 0; j < plan.size(); ++j) out.objective += fixed[j] * plan[j];
  auto results = parallel_map_index<std::pair<double, OptimalityCut>>(
      scenarios.size(),
      [&](std::size_t w) {
        const SubproblemSolution sol = solve_subproblem(recourse[w], plan);
        return std::make_pair(sol.value,
                              generate_cut(recourse[w], sol, static_cast<std::ptrdiff_t>(w)));
      },
      workers);
  // Ordered reduction keeps the sum independent of the worker count.
  for (std::size_t w = 0; w < scenarios.size(); ++w) {
    const auto& [value, cut] = results[w].get();
    out.scenario_values.push_back(value);
    out.cuts.push_back(cut);
    out.objective += scenarios.probabilities[w] * value;
  }
  return out;
}

LShapedResult run_lshaped(const NetworkInstance& instance,
                          const ScenarioSet& scenarios,
                          const LShapedOptions& options) {
  if (const ValidationReport report = validate(instance, scenarios); !report.ok()) {
    throw InvalidInput("invalid scenarios: " + report.to_string());
  }
  const auto started = std::chrono::steady_clock::now();
  const ExtensiveForm first = build_first_stage(instance);
  const std::size_t n1 = first.index.num_first_stage();
  const std::size_t W = scenarios.size();
  const std::size_t thetas = options.multi_cut ? W : 1;

  std::vector<RecourseLp> recourse;
  recourse.reserve(W);
  for (const Scenario& s : scenarios.scenarios) recourse.push_back(build_recourse(instance, s));

  // Master: first-stage model plus nonnegative epigraph columns (all recourse
  // costs are nonnegative).
  MilpModel master = first.model;
  for (std::size_t k = 0; k < thetas; ++k) {
    master.lp.add_col(options.multi_cut ? scenarios.probabilities[k] : 1.0, 0.0, kInfinity);
    master.is_integer.push_back(0);
  }

  CutPool pool;
  auto add_cut = [&](const OptimalityCut& cut) {
    if (!pool.add(cut)) return false;
    const std::size_t theta =
        n1 + (cut.scenario < 0 ? 0 : static_cast<std::size_t>(cut.scenario));
    const std::size_t row = master.lp.add_row(RowSense::kGreaterEqual, cut.intercept);
    master.lp.set(row, theta, 1.0);
    for (const auto& [col, coef] : cut.coefficients) master.lp.set(row, col, -coef);
    return true;
  };
  auto matches_mode = [&](const OptimalityCut& cut) {
    return options.multi_cut ? (cut.scenario >= 0 && static_cast<std::size_t>(cut.scenario) < W)
                             : cut.scenario < 0;
  };
  for (const OptimalityCut& cut : options.initial_cuts) {
    if (matches_mode(cut)) add_cut(cut);
  }

  LShapedResult result;
  double upper = kInfinity;
  double lower = -kInfinity;
  std::vector<double> master_start;

  auto consider = [&](const std::vector<double>& plan, const PlanEvaluation& eval) {
    if (eval.objective < upper) {
      upper = eval.objective;
      result.plan = plan;
      result.scenario_values = eval.scenario_values;
      master_start = plan;
      if (options.multi_cut) {
        master_start.insert(master_start.end(), eval.scenario_values.begin(),
                            eval.scenario_values.end());
      } else {
        double expected = 0.0;
        for (std::size_t w = 0; w < W; ++w) expected += scenarios.probabilities[w] * eval.scenario_values[w];
        master_start.push_back(expected);
      }
    }
  };
  auto add_plan_cuts = [&](const PlanEvaluation& eval) {
    if (options.multi_cut) {
      for (const OptimalityCut& cut : eval.cuts) add_cut(cut);
    } else {
      add_cut(aggregate_cuts(eval.cuts, scenarios.probabilities));
    }
  };

  if (options.incumbent) {
    const PlanEvaluation eval = evaluate_plan(instance, scenarios, recourse,
                                              *options.incumbent, options.workers);
    consider(*options.incumbent, eval);
    add_plan_cuts(eval);
  }

  MilpOptions master_options = options.master;
  master_options.relative_gap = std::min(master_options.relative_gap, 0.1 * options.tolerance);

  for (std::size_t iter = 1;; ++iter) {
    if (iter > options.max_iterations) {
      result.iteration_limit = true;
      break;
    }
    if (!master_start.empty()) master_options.incumbent = master_start;
    const MilpResult m = solve_milp(master, master_options);
    if (m.status == MilpStatus::kInfeasible) {
      result.status = MilpStatus::kInfeasible;
      return result;
    }
    if (m.status != MilpStatus::kOptimal) {
      throw InternalError(std::string("master problem ended with status ") + to_string(m.status));
    }
    lower = std::max(lower, std::min(m.lower_bound, m.objective));
    std::vector<double> plan(m.solution.begin(), m.solution.begin() + static_cast<std::ptrdiff_t>(n1));
    std::vector<double> theta(m.solution.begin() + static_cast<std::ptrdiff_t>(n1), m.solution.end());
    pool.record_activity(plan, theta, 1e-9);

    const PlanEvaluation eval = evaluate_plan(instance, scenarios, recourse, plan, options.workers);
    consider(plan, eval);

    std::size_t added = 0;
    const double cut_tol = 1e-9;
    if (options.multi_cut) {
      for (std::size_t w = 0; w < W; ++w) {
        if (eval.scenario_values[w] > theta[w] + cut_tol * (1.0 + std::abs(theta[w]))) {
          added += add_cut(eval.cuts[w]) ? 1 : 0;
        }
      }
    } else {
      double expected = 0.0;
      for (std::size_t w = 0; w < W; ++w) expected += scenarios.probabilities[w] * eval.scenario_values[w];
      if (expected > theta[0] + cut_tol * (1.0 + std::abs(theta[0]))) {
        added += add_cut(aggregate_cuts(eval.cuts, scenarios.probabilities)) ? 1 : 0;
      }
    }

    IterationLog entry;
    entry.iteration = iter;
    entry.lower_bound = lower;
    entry.upper_bound = upper;
    entry.gap = (upper - lower) / (1.0 + std::abs(upper));
    entry.cuts_added = added;
    entry.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    result.history.push_back(entry);
    if (options.log != nullptr) write_log_line(*options.log, entry);
    result.iterations = iter;
    if (upper - lower <= options.tolerance * (1.0 + std::abs(upper)) || added == 0) break;
  }

  result.status = result.plan.empty() ? MilpStatus::kNodeLimit
                  : result.iteration_limit ? MilpStatus::kNodeLimit
                                           : MilpStatus::kOptimal;
  result.objective = upper;
  result.upper_bound = upper;
  result.lower_bound = std::min(lower, upper);
  result.cuts = pool.cuts();
  result.cut_activity = pool.activity();
  return result;
}

}  // namespace bargeflow
