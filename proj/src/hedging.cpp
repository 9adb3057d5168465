#include "bargeflow/hedging.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "bargeflow/error.hpp"
#include "bargeflow/parallel.hpp"

namespace bargeflow {

const char* to_string(PhaStatus status) {
  switch (status) {
    case PhaStatus::kConverged:
      return "converged";
    case PhaStatus::kIterationLimit:
      return "iteration_limit";
    case PhaStatus::kRepairFailed:
      return "repair_failed";
  }
  return "unknown";
}

std::vector<double> consensus(const std::vector<std::vector<double>>& y,
                              const std::vector<double>& probabilities) {
  if (y.empty() || y.size() != probabilities.size()) {
    throw InvalidInput("one vector per scenario is required");
  }
  std::vector<double> avg(y.front().size(), 0.0);
  for (std::size_t w = 0; w < y.size(); ++w) {
    for (std::size_t j = 0; j < avg.size(); ++j) avg[j] += probabilities[w] * y[w][j];
  }
  return avg;
}

double consensus_residual(const PhaState& state,
                          const std::vector<double>& probabilities) {
  double total = 0.0;
  for (std::size_t w = 0; w < state.y.size(); ++w) {
    double sq = 0.0;
    for (std::size_t j = 0; j < state.y_bar.size(); ++j) {
      const double d = state.y[w][j] - state.y_bar[j];
      sq += d * d;
    }
    total += probabilities[w] * std::sqrt(sq);
  }
  return total;
}

namespace {

// Per-scenario deterministic models, built once per run.
class ScenarioModels {
 public:
  ScenarioModels(const NetworkInstance& instance, const ScenarioSet& scenarios) {
    if (const ValidationReport report = validate(instance, scenarios); !report.ok()) {
      throw InvalidInput("invalid scenarios: " + report.to_string());
    }
    for (const Scenario& s : scenarios.scenarios) {
      models_.push_back(build(instance, ScenarioSet{{s}, {1.0}}).model);
    }
    n1_ = VariableIndex(instance, 0).num_first_stage();
    costs_ = first_stage_costs(instance, VariableIndex(instance, 0));
  }

  std::size_t first_stage_size() const { return n1_; }
  const std::vector<double>& costs() const { return costs_; }

  // Solves every scenario with its linearized penalty; empty multipliers mean
  // the plain objective.
  std::vector<std::vector<double>> solve(const PhaState& state,
                                         const PhaOptions& options) const {
    const bool penalized = !state.w.empty();
    auto outcomes = parallel_map_index<std::vector<double>>(
        models_.size(),
        [&](std::size_t w) {
          MilpModel model = models_[w];
          if (penalized) {
            for (std::size_t j = 0; j < n1_; ++j) {
              model.lp.objective[j] +=
                  state.w[w][j] + 0.5 * state.rho[j] * (1.0 - 2.0 * state.y_bar[j]);
            }
          }
          const MilpResult res = solve_milp(model, options.subproblem);
          if (res.status != MilpStatus::kOptimal) {
            throw InternalError(std::string("scenario subproblem ended with status ") +
                                to_string(res.status));
          }
          return std::vector<double>(res.solution.begin(),
                                     res.solution.begin() + static_cast<std::ptrdiff_t>(n1_));
        },
        options.workers);
    std::vector<std::vector<double>> y;
    for (const auto& o : outcomes) y.push_back(o.get());
    return y;
  }

 private:
  std::vector<MilpModel> models_;
  std::size_t n1_ = 0;
  std::vector<double> costs_;
};

void update(PhaState& state, std::vector<std::vector<double>> y,
            const std::vector<double>& probabilities) {
  state.y = std::move(y);
  state.y_bar = consensus(state.y, probabilities);
  const std::size_t W = state.y.size();
  const std::size_t n = state.y_bar.size();
  if (state.w.empty()) state.w.assign(W, std::vector<double>(n, 0.0));
  for (std::size_t w = 0; w < W; ++w) {
    for (std::size_t j = 0; j < n; ++j) {
      state.w[w][j] += state.rho[j] * (state.y[w][j] - state.y_bar[j]);
    }
  }
  state.residual = consensus_residual(state, probabilities);
}

PhaState start_with(const ScenarioModels& models, const ScenarioSet& scenarios,
                    const PhaOptions& options) {
  PhaState state;
  const std::size_t n = models.first_stage_size();
  if (options.rho) {
    if (options.rho->size() != n) throw InvalidInput("rho length must match the first stage");
    state.rho = *options.rho;
  } else {
    state.rho.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
      state.rho[j] = options.rho_scale * (std::abs(models.costs()[j]) + 1.0);
    }
  }
  update(state, models.solve(state, options), scenarios.probabilities);
  return state;
}

PhaState step_with(const PhaState& state, const ScenarioModels& models,
                   const ScenarioSet& scenarios, const PhaOptions& options) {
  PhaState next = state;
  update(next, models.solve(state, options), scenarios.probabilities);
  ++next.iteration;
  return next;
}

// Closest plan to `target` in Hamming distance that satisfies the
// first-stage rows.
std::optional<std::vector<double>> repair(const NetworkInstance& instance,
                                          const std::vector<double>& target,
                                          const MilpOptions& options) {
  ExtensiveForm first = build_first_stage(instance);
  MilpModel& model = first.model;
  for (std::size_t j = 0; j < target.size(); ++j) {
    model.lp.objective[j] = target[j] > 0.5 ? -1.0 : 1.0;
  }
  const MilpResult res = solve_milp(model, options);
  if (res.status != MilpStatus::kOptimal) return std::nullopt;
  return res.solution;
}

}  // namespace

PhaState pha_start(const NetworkInstance& instance, const ScenarioSet& scenarios,
                   const PhaOptions& options) {
  return start_with(ScenarioModels(instance, scenarios), scenarios, options);
}

PhaState pha_iterate(const PhaState& state, const NetworkInstance& instance,
                     const ScenarioSet& scenarios, const PhaOptions& options) {
  if (state.y.size() != scenarios.size() || state.w.size() != scenarios.size()) {
    throw InvalidInput("state does not match the scenario set");
  }
  return step_with(state, ScenarioModels(instance, scenarios), scenarios, options);
}

PhaResult pha_run(const NetworkInstance& instance, const ScenarioSet& scenarios,
                  const PhaOptions& options) {
  const auto started = std::chrono::steady_clock::now();
  const ScenarioModels models(instance, scenarios);
  PhaResult result;
  PhaState state = start_with(models, scenarios, options);

  auto record = [&](const PhaState& s) {
    PhaLog entry;
    entry.iteration = s.iteration;
    entry.residual = s.residual;
    double sum = 0.0;
    for (double r : s.rho) sum += r;
    entry.mean_rho = s.rho.empty() ? 0.0 : sum / static_cast<double>(s.rho.size());
    entry.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    result.history.push_back(entry);
    if (options.log != nullptr) {
      char buf[128];
      std::snprintf(buf, sizeof buf, "%zu\t%.6e\t%.6g\t%.3f", entry.iteration,
                    entry.residual, entry.mean_rho, entry.wall_seconds);
      *options.log << buf << '\n';
    }
  };
  record(state);
  bool converged = state.residual <= options.epsilon;
  while (!converged && state.iteration < options.max_iterations) {
    state = step_with(state, models, scenarios, options);
    record(state);
    converged = state.residual <= options.epsilon;
  }

  std::vector<double> plan(state.y_bar.size());
  for (std::size_t j = 0; j < plan.size(); ++j) plan[j] = state.y_bar[j] > 0.5 ? 1.0 : 0.0;
  const ExtensiveForm first = build_first_stage(instance);
  if (max_violation(first.model.lp, plan) > 1e-9) {
    auto fixed = repair(instance, plan, options.subproblem);
    if (!fixed) {
      result.status = PhaStatus::kRepairFailed;
      result.state = std::move(state);
      return result;
    }
    plan = *fixed;
    result.repaired = true;
  }

  std::vector<RecourseLp> recourse;
  for (const Scenario& s : scenarios.scenarios) recourse.push_back(build_recourse(instance, s));
  const PlanEvaluation eval = evaluate_plan(instance, scenarios, recourse, plan, options.workers);
  result.plan = plan;
  result.upper_bound = eval.objective;
  result.scenario_values = eval.scenario_values;
  result.cuts = eval.cuts;
  // Cuts at the scenario plans help a later decomposition run.
  for (std::size_t w = 0; w < scenarios.size(); ++w) {
    if (state.y[w] == plan) continue;
    const SubproblemSolution sol = solve_subproblem(recourse[w], state.y[w]);
    result.cuts.push_back(generate_cut(recourse[w], sol, static_cast<std::ptrdiff_t>(w)));
  }
  result.status = converged ? PhaStatus::kConverged : PhaStatus::kIterationLimit;
  result.state = std::move(state);
  return result;
}

}  // namespace bargeflow
