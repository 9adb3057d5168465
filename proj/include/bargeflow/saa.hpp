#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "bargeflow/hedging.hpp"
#include "bargeflow/lshaped.hpp"
#include "bargeflow/scenario.hpp"

namespace bargeflow {

enum class SolverKind { kExtensive, kLShaped, kPha };

const char* to_string(SolverKind kind);
// Accepts "extensive", "lshaped" and "pha"; throws InvalidInput otherwise.
SolverKind parse_solver(const std::string& name);

struct SaaConfig {
  std::size_t replications = 5;      // M
  std::size_t sample_size = 30;      // N per replication
  std::size_t evaluation_size = 200; // N' for the upper bound
  std::uint64_t seed = 0;
  std::size_t workers = 1;
  // kLShaped runs PHA first and warm-starts the decomposition from its plan
  // and cuts. kPha keeps the PHA plan, whose value is only an upper estimate
  // of the replication optimum.
  SolverKind solver = SolverKind::kLShaped;
  double tolerance = 1e-6;
  PhaOptions pha;
};

struct SaaReplication {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  std::size_t distinct_scenarios = 0;
  double objective = 0.0;
  std::vector<double> plan;
  double seconds = 0.0;
};

struct SaaReport {
  std::vector<SaaReplication> replications;
  double lower_bound = 0.0;
  double lower_stderr = 0.0;
  // Best candidate plan on the evaluation sample.
  std::size_t best_replication = 0;
  std::vector<double> best_plan;
  double upper_bound = 0.0;
  double upper_stderr = 0.0;
  std::vector<double> candidate_estimates;

  double gap() const { return upper_bound - lower_bound; }
  double combined_stderr() const;
};

// Seed of replication r; the evaluation sample uses evaluation_seed(seed).
std::uint64_t replication_seed(std::uint64_t seed, std::size_t r);
std::uint64_t evaluation_seed(std::uint64_t seed);

// Solves one sampled problem to optimality with the configured solver.
SaaReplication solve_replication(const NetworkInstance& instance,
                                 const ScenarioSet& sample,
                                 const SaaConfig& config);

// Mean and standard error of per-sample costs of `plan` on `sample`. The
// sample may hold merged duplicates; probabilities act as multiplicities out
// of `draws`.
struct PlanEstimate {
  double mean = 0.0;
  double stderr_ = 0.0;
};
PlanEstimate estimate_plan(const NetworkInstance& instance,
                           const ScenarioSet& sample, std::size_t draws,
                           const std::vector<double>& plan, std::size_t workers);

SaaReport saa_run(const NetworkInstance& instance, const StochasticSpec& spec,
                  const SaaConfig& config);

// Key: value lines followed by one line per replication.
void write_report(std::ostream& out, const SaaReport& report);

}  // namespace bargeflow
