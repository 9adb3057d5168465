#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "bargeflow/config.hpp"
#include "bargeflow/extensive_form.hpp"
#include "bargeflow/saa.hpp"

namespace bargeflow {

struct MetricsRow {
  std::size_t period = 0;  // 1-based
  std::size_t barge_uses = 0;
  std::size_t tow_uses = 0;
  double ratio = 0.0;  // barge_uses / tow_uses, 0 without tows
  double fixed_cost = 0.0;
  double holding_cost = 0.0;
  double transport_cost = 0.0;
  double procurement_cost = 0.0;
  double shortage_cost = 0.0;

  double total_cost() const {
    return fixed_cost + holding_cost + transport_cost + procurement_cost + shortage_cost;
  }
  bool operator==(const MetricsRow&) const = default;
};

// One row per period from a plan and its per-scenario recourse.
std::vector<MetricsRow> metrics_rows(const NetworkInstance& instance,
                                     const ScenarioSet& scenarios,
                                     const FirstStagePlan& plan,
                                     const std::vector<RecourseSolution>& recourse);

// Barge uses whose towboat variable on the same arc and period is off.
std::size_t barges_without_tow(const NetworkInstance& instance,
                               const FirstStagePlan& plan);

struct SolveOutcome {
  RunSolver solver = RunSolver::kExtensive;
  double objective = 0.0;
  std::vector<double> plan;  // flat first-stage vector
  ScenarioSet scenarios;     // the set the costs refer to
  Extraction extraction;
  std::vector<MetricsRow> rows;
  std::optional<SaaReport> saa;
};

// Solves the run with its configured solver. The recourse of a plan from
// lshaped, pha or saa is recovered by scenario LP solves. For saa, costs refer
// to the best candidate on the evaluation sample. Throws NumericalFailure when
// a solver stops short of its tolerance.
SolveOutcome solve_run(const NetworkInstance& instance, const StochasticSpec& spec,
                       const RunConfig& run, std::ostream* log = nullptr);

struct SweepTable {
  double factor = 0.0;
  bool ok = false;
  std::string error;
  double objective = 0.0;
  std::vector<MetricsRow> rows;

  std::size_t total_barge_uses() const;
  std::size_t total_tow_uses() const;
  double peak_ratio() const;
  std::size_t peak_period() const;  // 1-based, first maximum; 0 if no tows
};

// Shifts the mean water level by each factor and solves. Failures are kept
// per factor.
std::vector<SweepTable> run_sweep(const NetworkInstance& instance,
                                  const StochasticSpec& spec, const RunConfig& run,
                                  const std::vector<double>& factors);

struct SweepDelta {
  double factor = 0.0;
  long long barge_uses = 0;  // vs the base table
  double peak_ratio = 0.0;
};

// Differences against the table with factor 0, which must be present and ok.
std::vector<SweepDelta> sweep_deltas(const std::vector<SweepTable>& tables);

extern const char* const kCsvHeader;

void write_csv(std::ostream& out, const std::vector<MetricsRow>& rows);
std::vector<MetricsRow> read_csv(std::istream& in);
std::vector<MetricsRow> read_csv(const std::filesystem::path& path);

// "factor_<f>.csv" with f printed by %g.
std::string csv_name(double factor);

// One CSV per successful factor plus summary.csv; returns the written paths.
std::vector<std::filesystem::path> emit_csv(const std::vector<SweepTable>& tables,
                                            const std::filesystem::path& out_dir);

}  // namespace bargeflow
