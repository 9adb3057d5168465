#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <vector>

#include "bargeflow/branch_bound.hpp"
#include "bargeflow/lshaped.hpp"

namespace bargeflow {

struct PhaOptions {
  // Stops when sum_w p_w * ||y_w - y_bar||_2 <= epsilon.
  double epsilon = 1e-4;
  std::size_t max_iterations = 100;
  std::size_t workers = 1;
  // Penalty per first-stage column is rho_scale * (|cost| + 1) unless given.
  double rho_scale = 1.0;
  std::optional<std::vector<double>> rho;
  MilpOptions subproblem;
  std::ostream* log = nullptr;
};

struct PhaState {
  std::vector<std::vector<double>> y;  // per scenario, first-stage vector
  std::vector<double> y_bar;
  std::vector<std::vector<double>> w;  // multipliers per scenario
  std::vector<double> rho;
  std::size_t iteration = 0;
  double residual = 0.0;
};

// Probability-weighted average of the scenario vectors.
std::vector<double> consensus(const std::vector<std::vector<double>>& y,
                              const std::vector<double>& probabilities);

// sum_w p_w * ||y_w - y_bar||_2
double consensus_residual(const PhaState& state,
                          const std::vector<double>& probabilities);

// Iteration 0: every scenario solved on its own objective, multipliers set
// from the first disagreement.
PhaState pha_start(const NetworkInstance& instance, const ScenarioSet& scenarios,
                   const PhaOptions& options = {});

// One progressive hedging step: scenario solves with objective
// cost + w_w y + rho/2 ||y - y_bar||^2 (linear on binaries), then the
// averaging and multiplier updates.
PhaState pha_iterate(const PhaState& state, const NetworkInstance& instance,
                     const ScenarioSet& scenarios,
                     const PhaOptions& options = {});

enum class PhaStatus { kConverged, kIterationLimit, kRepairFailed };

const char* to_string(PhaStatus status);

struct PhaLog {
  std::size_t iteration = 0;
  double residual = 0.0;
  double mean_rho = 0.0;
  double wall_seconds = 0.0;
};

struct PhaResult {
  PhaStatus status = PhaStatus::kRepairFailed;
  std::vector<double> plan;
  // Expected cost of `plan`, re-evaluated with recourse solves.
  double upper_bound = kInfinity;
  std::vector<double> scenario_values;
  bool repaired = false;
  PhaState state;
  std::vector<OptimalityCut> cuts;
  std::vector<PhaLog> history;
};

// Runs PHA to consensus or the iteration cap, then rounds the weighted vote
// (ties to 0) and repairs the rounded plan to the nearest first-stage
// feasible plan in Hamming distance.
PhaResult pha_run(const NetworkInstance& instance, const ScenarioSet& scenarios,
                  const PhaOptions& options = {});

}  // namespace bargeflow
