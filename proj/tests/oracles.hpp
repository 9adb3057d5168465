#pragma once

// Independent reference solvers used only by the tests.

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "bargeflow/lp.hpp"
#include "bargeflow/network.hpp"
#include "bargeflow/scenario.hpp"

namespace oracle {

enum class VertexStatus { kOptimal, kInfeasible, kUnbounded };

struct VertexResult {
  VertexStatus status = VertexStatus::kInfeasible;
  double objective = 0.0;
};

// Solves a small LP with finite lower bounds by enumerating every basic
// solution (n active constraints out of rows and finite bounds). Unboundedness
// is detected by comparing optima under two large artificial boxes.
VertexResult vertex_enumeration(const bargeflow::StandardFormLP& lp);

// Random LP with at most max_cols columns and max_rows rows, small integer
// data and finite lower bounds.
bargeflow::StandardFormLP random_lp(std::mt19937_64& rng, int max_cols,
                                    int max_rows);

// Dual objective from row duals and reduced costs, or nullopt when the dual
// solution is not sign-feasible within tol.
std::optional<double> dual_objective(const bargeflow::StandardFormLP& lp,
                                     const bargeflow::LpResult& result,
                                     double tol);

// y'b - max over the bound box of y'(A x + s); positive for a valid Farkas
// certificate.
double farkas_margin(const bargeflow::StandardFormLP& lp,
                     const std::vector<double>& y);

// Exhaustive search over every binary first-stage vector, each priced with an
// independently assembled recourse LP per scenario.
struct EnumerationResult {
  double objective = 0.0;
  std::vector<double> first_stage;  // flat ids as in the extensive form
  std::size_t feasible_plans = 0;
};

// Checks the first-stage rows directly against the instance data.
bool first_stage_feasible(const bargeflow::NetworkInstance& instance,
                          const std::vector<double>& y);

EnumerationResult enumerate_plans(const bargeflow::NetworkInstance& instance,
                                  const bargeflow::ScenarioSet& scenarios);

// Random instance inside the given caps, plus a paired scenario set.
struct RandomCase {
  bargeflow::NetworkInstance instance;
  bargeflow::ScenarioSet scenarios;
};

struct RandomCaps {
  int origins = 2;
  int destinations = 2;
  int commodities = 2;
  int periods = 2;
  int barges = 3;
  int towboats = 1;
  int scenarios = 3;
  std::size_t max_binaries = 14;
};

RandomCase random_case(std::mt19937_64& rng, const RandomCaps& caps);

}  // namespace oracle
