#include "bargeflow/saa.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <optional>
#include <ostream>

#include "bargeflow/error.hpp"

namespace bargeflow {

const char* to_string(SolverKind kind) {
  switch (kind) {
    case SolverKind::kExtensive:
      return "extensive";
    case SolverKind::kLShaped:
      return "lshaped";
    case SolverKind::kPha:
      return "pha";
  }
  return "unknown";
}

SolverKind parse_solver(const std::string& name) {
  if (name == "extensive") return SolverKind::kExtensive;
  if (name == "lshaped") return SolverKind::kLShaped;
  if (name == "pha") return SolverKind::kPha;
  throw InvalidInput("unknown solver '" + name + "' (expected extensive, lshaped or pha)");
}

double SaaReport::combined_stderr() const {
  return std::sqrt(lower_stderr * lower_stderr + upper_stderr * upper_stderr);
}

std::uint64_t replication_seed(std::uint64_t seed, std::size_t r) {
  return seed ^ static_cast<std::uint64_t>(r);
}

std::uint64_t evaluation_seed(std::uint64_t seed) {
  // Far from every replication seed seed ^ r for small r.
  return seed ^ 0x9E3779B97F4A7C15ULL;
}

namespace {

// Merges repeated draws and restores exact count / draws probabilities.
ScenarioSet merge_sample(const ScenarioSet& sample, std::size_t draws) {
  ScenarioSet merged = collapse_duplicates(sample);
  for (double& p : merged.probabilities) {
    p = std::round(p * static_cast<double>(draws)) / static_cast<double>(draws);
  }
  return merged;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

SaaReplication solve_replication(const NetworkInstance& instance,
                                 const ScenarioSet& sample,
                                 const SaaConfig& config) {
  const auto t0 = std::chrono::steady_clock::now();
  SaaReplication rep;
  rep.distinct_scenarios = sample.size();
  switch (config.solver) {
    case SolverKind::kExtensive: {
      const ExtensiveForm ef = build(instance, sample);
      MilpOptions opts;
      opts.relative_gap = config.tolerance;
      const MilpResult res = solve_milp(ef.model, opts);
      if (res.status != MilpStatus::kOptimal) {
        throw NumericalFailure(std::string("extensive form ended with status ") +
                               to_string(res.status));
      }
      rep.objective = res.objective;
      rep.plan.assign(res.solution.begin(),
                      res.solution.begin() +
                          static_cast<std::ptrdiff_t>(ef.index.num_first_stage()));
      break;
    }
    case SolverKind::kLShaped: {
      PhaOptions pha = config.pha;
      pha.workers = config.workers;
      const PhaResult warm = pha_run(instance, sample, pha);
      LShapedOptions opts;
      opts.tolerance = config.tolerance;
      opts.workers = config.workers;
      if (warm.status != PhaStatus::kRepairFailed) {
        opts.incumbent = warm.plan;
        opts.initial_cuts = warm.cuts;
      }
      const LShapedResult res = run_lshaped(instance, sample, opts);
      if (res.status != MilpStatus::kOptimal || res.iteration_limit) {
        throw NumericalFailure("decomposition did not reach the tolerance");
      }
      rep.objective = res.objective;
      rep.plan = res.plan;
      break;
    }
    case SolverKind::kPha: {
      PhaOptions pha = config.pha;
      pha.workers = config.workers;
      const PhaResult res = pha_run(instance, sample, pha);
      if (res.status == PhaStatus::kRepairFailed) {
        throw NumericalFailure("hedging could not repair its consensus plan");
      }
      rep.objective = res.upper_bound;
      rep.plan = res.plan;
      break;
    }
  }
  rep.seconds = seconds_since(t0);
  return rep;
}

PlanEstimate estimate_plan(const NetworkInstance& instance,
                           const ScenarioSet& sample, std::size_t draws,
                           const std::vector<double>& plan, std::size_t workers) {
  std::vector<RecourseLp> recourse;
  recourse.reserve(sample.size());
  for (const Scenario& s : sample.scenarios) recourse.push_back(build_recourse(instance, s));
  const PlanEvaluation eval = evaluate_plan(instance, sample, recourse, plan, workers);
  PlanEstimate est;
  est.mean = eval.objective;
  if (draws > 1) {
    // Per-draw cost differs from the mean only through the recourse part.
    double recourse_mean = 0.0;
    for (std::size_t w = 0; w < sample.size(); ++w) {
      recourse_mean += sample.probabilities[w] * eval.scenario_values[w];
    }
    double var = 0.0;
    for (std::size_t w = 0; w < sample.size(); ++w) {
      const double d = eval.scenario_values[w] - recourse_mean;
      var += sample.probabilities[w] * d * d;
    }
    const double n = static_cast<double>(draws);
    var *= n / (n - 1.0);
    est.stderr_ = std::sqrt(var / n);
  }
  return est;
}

SaaReport saa_run(const NetworkInstance& instance, const StochasticSpec& spec,
                  const SaaConfig& config) {
  if (config.replications == 0 || config.sample_size == 0 || config.evaluation_size == 0) {
    throw InvalidInput("replications, sample size and evaluation size must be positive");
  }
  if (const ValidationReport report = validate(instance, spec); !report.ok()) {
    throw InvalidInput("invalid stochastic spec: " + report.to_string());
  }
  SaaReport report;
  for (std::size_t r = 0; r < config.replications; ++r) {
    const std::uint64_t seed = replication_seed(config.seed, r);
    const ScenarioSet sample = merge_sample(
        sample_scenarios(instance, spec, config.sample_size, seed), config.sample_size);
    SaaReplication rep = solve_replication(instance, sample, config);
    rep.index = r;
    rep.seed = seed;
    report.replications.push_back(std::move(rep));
  }

  const double m = static_cast<double>(config.replications);
  double sum = 0.0;
  for (const SaaReplication& rep : report.replications) sum += rep.objective;
  report.lower_bound = sum / m;
  if (config.replications > 1) {
    double sq = 0.0;
    for (const SaaReplication& rep : report.replications) {
      sq += (rep.objective - report.lower_bound) * (rep.objective - report.lower_bound);
    }
    report.lower_stderr = std::sqrt(sq / (m - 1.0)) / std::sqrt(m);
  }

  const ScenarioSet evaluation = merge_sample(
      sample_scenarios(instance, spec, config.evaluation_size, evaluation_seed(config.seed)),
      config.evaluation_size);
  bool first = true;
  for (std::size_t r = 0; r < report.replications.size(); ++r) {
    const auto& plan = report.replications[r].plan;
    // Identical candidates share one estimate.
    std::optional<std::size_t> same;
    for (std::size_t q = 0; q < r; ++q) {
      if (report.replications[q].plan == plan) {
        same = q;
        break;
      }
    }
    PlanEstimate est;
    if (same) {
      est.mean = report.candidate_estimates[*same];
    } else {
      est = estimate_plan(instance, evaluation, config.evaluation_size, plan, config.workers);
    }
    report.candidate_estimates.push_back(est.mean);
    if (!same && (first || est.mean < report.upper_bound)) {
      first = false;
      report.best_replication = r;
      report.best_plan = plan;
      report.upper_bound = est.mean;
      report.upper_stderr = est.stderr_;
    }
  }
  return report;
}

void write_report(std::ostream& out, const SaaReport& report) {
  char buf[256];
  auto line = [&](const char* key, double v) {
    std::snprintf(buf, sizeof buf, "%s: %.10g\n", key, v);
    out << buf;
  };
  std::snprintf(buf, sizeof buf, "replications: %zu\n", report.replications.size());
  out << buf;
  line("lower_bound", report.lower_bound);
  line("lower_stderr", report.lower_stderr);
  line("upper_bound", report.upper_bound);
  line("upper_stderr", report.upper_stderr);
  line("gap", report.gap());
  line("combined_stderr", report.combined_stderr());
  std::snprintf(buf, sizeof buf, "best_replication: %zu\n", report.best_replication);
  out << buf;
  for (std::size_t r = 0; r < report.replications.size(); ++r) {
    const SaaReplication& rep = report.replications[r];
    std::size_t used = 0;
    for (double v : rep.plan) used += v > 0.5 ? 1 : 0;
    std::snprintf(buf, sizeof buf,
                  "replication %zu: seed=%llu scenarios=%zu objective=%.10g "
                  "estimate=%.10g binaries_on=%zu seconds=%.3f\n",
                  r, static_cast<unsigned long long>(rep.seed), rep.distinct_scenarios,
                  rep.objective, report.candidate_estimates[r], used, rep.seconds);
    out << buf;
  }
}

}  // namespace bargeflow
