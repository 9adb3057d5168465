#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "bargeflow/extensive_form.hpp"
#include "bargeflow/lp.hpp"

namespace bargeflow {

enum class MilpStatus { kOptimal, kInfeasible, kUnbounded, kNodeLimit };

const char* to_string(MilpStatus status);

struct MilpOptions {
  // Search stops once incumbent - bound <= relative_gap * (1 + |incumbent|).
  double relative_gap = 1e-6;
  double integrality_tol = 1e-6;
  std::size_t node_limit = 200000;
  // LP rounding probe at the root and then every this many nodes; 0 disables.
  std::size_t rounding_interval = 16;
  // Splits the model into independent blocks after dropping fixed columns.
  bool decompose = true;
  // Optional starting incumbent; ignored when infeasible.
  std::optional<std::vector<double>> incumbent;
  SimplexOptions lp;
};

struct MilpResult {
  MilpStatus status = MilpStatus::kInfeasible;
  double objective = 0.0;
  std::vector<double> solution;
  double lower_bound = 0.0;
  double gap = 0.0;  // (objective - lower_bound) / (1 + |objective|)
  std::size_t nodes = 0;
  std::size_t branchings = 0;
  std::size_t components = 0;
  // Global lower bound after every node, nondecreasing.
  std::vector<double> bound_trace;
};

// Best-bound branch-and-bound over the flagged binaries. Node order is fixed
// (bound, then creation id) and the branching variable is the most fractional
// one with the lowest index on ties, so runs are reproducible. With a node
// limit the best incumbent is returned with status kNodeLimit.
MilpResult solve_milp(const MilpModel& model, const MilpOptions& options = {});

}  // namespace bargeflow
