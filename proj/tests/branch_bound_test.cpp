#include <doctest.h>

#include <cmath>
#include <random>

#include "bargeflow/branch_bound.hpp"
#include "bargeflow/error.hpp"
#include "bargeflow/fixtures.hpp"
#include "oracles.hpp"

using namespace bargeflow;

namespace {

MilpModel knapsack_like() {
  MilpModel m;
  m.lp.add_col(1.0, 0.0, 1.0);
  m.lp.add_col(1.0, 0.0, 1.0);
  m.is_integer = {1, 1};
  const auto r = m.lp.add_row(RowSense::kGreaterEqual, 1.0);
  m.lp.set(r, 0, 1.0);
  m.lp.set(r, 1, 1.0);
  return m;
}

void check_incumbent(const MilpModel& model, const MilpResult& res) {
  CHECK(max_violation(model.lp, res.solution) <= 1e-8);
  double obj = 0.0;
  for (std::size_t j = 0; j < res.solution.size(); ++j) {
    obj += model.lp.objective[j] * res.solution[j];
    if (model.is_integer[j]) {
      CHECK((res.solution[j] == 0.0 || res.solution[j] == 1.0));
    }
  }
  CHECK(obj == doctest::Approx(res.objective).epsilon(1e-12));
  for (std::size_t k = 1; k < res.bound_trace.size(); ++k) {
    CHECK(res.bound_trace[k] >= res.bound_trace[k - 1]);
  }
  CHECK(res.lower_bound <= res.objective + 1e-9);
}

}  // namespace

TEST_CASE("two binaries covering one unit") {
  const MilpModel m = knapsack_like();
  const MilpResult res = solve_milp(m);
  REQUIRE(res.status == MilpStatus::kOptimal);
  CHECK(res.objective == doctest::Approx(1.0));
  check_incumbent(m, res);
}

TEST_CASE("integral relaxation needs no branching") {
  MilpModel m = knapsack_like();
  m.lp.objective = {1.0, 2.0};
  const MilpResult res = solve_milp(m);
  CHECK(res.status == MilpStatus::kOptimal);
  CHECK(res.branchings == 0);
  CHECK(res.solution == std::vector<double>{1.0, 0.0});
}

TEST_CASE("fractional relaxation is branched") {
  // max x1 + x2 + x3 with 2 x1 + 2 x2 + 2 x3 <= 3.
  MilpModel m;
  for (int j = 0; j < 3; ++j) m.lp.add_col(-1.0, 0.0, 1.0);
  m.is_integer = {1, 1, 1};
  const auto r = m.lp.add_row(RowSense::kLessEqual, 3.0);
  for (std::size_t j = 0; j < 3; ++j) m.lp.set(r, j, 2.0);
  MilpOptions opts;
  opts.rounding_interval = 0;
  const MilpResult res = solve_milp(m, opts);
  REQUIRE(res.status == MilpStatus::kOptimal);
  CHECK(res.objective == doctest::Approx(-1.0));
  CHECK(res.branchings > 0);
  check_incumbent(m, res);
}

TEST_CASE("infeasible and unbounded models") {
  MilpModel m = knapsack_like();
  m.lp.rhs[0] = 3.0;
  CHECK(solve_milp(m).status == MilpStatus::kInfeasible);
  MilpModel u;
  u.lp.add_col(-1.0, 0.0, kInfinity);
  u.lp.add_col(0.0, 0.0, 1.0);
  u.is_integer = {0, 1};
  CHECK(solve_milp(u).status == MilpStatus::kUnbounded);
  MilpModel general = knapsack_like();
  general.lp.upper[0] = 2.0;
  CHECK_THROWS_AS(solve_milp(general), InvalidInput);
}

TEST_CASE("micro instance extensive form") {
  const Fixture f = micro_instance_m1();
  const ExtensiveForm ef = build(f.instance, f.scenarios);
  for (bool decompose : {true, false}) {
    MilpOptions opts;
    opts.decompose = decompose;
    const MilpResult res = solve_milp(ef.model, opts);
    REQUIRE(res.status == MilpStatus::kOptimal);
    CHECK(res.objective == doctest::Approx(480.0));
    const Extraction ex = extract(f.instance, ef.index, res.solution);
    CHECK(ex.plan.tow_uses() == 1);
    CHECK(ex.plan.barge_uses() == 2);
    check_incumbent(ef.model, res);
  }
}

TEST_CASE("matches exhaustive enumeration on small instances") {
  std::mt19937_64 rng(404);
  oracle::RandomCaps caps;
  caps.max_binaries = 12;
  for (int k = 0; k < 25; ++k) {
    const oracle::RandomCase c = oracle::random_case(rng, caps);
    const oracle::EnumerationResult ref = oracle::enumerate_plans(c.instance, c.scenarios);
    const ExtensiveForm ef = build(c.instance, c.scenarios);
    MilpOptions opts;
    opts.relative_gap = 0.0;
    const MilpResult res = solve_milp(ef.model, opts);
    CAPTURE(k);
    REQUIRE(res.status == MilpStatus::kOptimal);
    CHECK(std::abs(res.objective - ref.objective) <= 1e-9 * (1 + std::abs(ref.objective)));
    check_incumbent(ef.model, res);
    opts.decompose = false;
    const MilpResult whole = solve_milp(ef.model, opts);
    CHECK(std::abs(whole.objective - ref.objective) <= 1e-9 * (1 + std::abs(ref.objective)));
  }
}

TEST_CASE("runs are deterministic and warm starts are honoured") {
  std::mt19937_64 rng(12);
  const oracle::RandomCase c = oracle::random_case(rng, {});
  const ExtensiveForm ef = build(c.instance, c.scenarios);
  const MilpResult a = solve_milp(ef.model);
  const MilpResult b = solve_milp(ef.model);
  CHECK(a.solution == b.solution);
  CHECK(a.bound_trace == b.bound_trace);
  MilpOptions warm;
  warm.incumbent = a.solution;
  const MilpResult w = solve_milp(ef.model, warm);
  CHECK(w.objective == doctest::Approx(a.objective));
  CHECK(w.nodes <= a.nodes);
}

TEST_CASE("node limit returns the incumbent with a flag") {
  MilpModel m;
  const int n = 12;
  for (int j = 0; j < n; ++j) m.lp.add_col(-(j % 3 + 1.0), 0.0, 1.0);
  m.is_integer.assign(n, 1);
  const auto r = m.lp.add_row(RowSense::kLessEqual, 7.5);
  for (int j = 0; j < n; ++j) m.lp.set(r, j, 1.0 + 0.1 * j);
  MilpOptions opts;
  opts.node_limit = 1;
  opts.decompose = false;
  const MilpResult res = solve_milp(m, opts);
  CHECK(res.status == MilpStatus::kNodeLimit);
  CHECK(res.nodes == 1);
  if (!res.solution.empty()) CHECK(max_violation(m.lp, res.solution) <= 1e-8);
  const MilpResult full = solve_milp(m);
  CHECK(full.status == MilpStatus::kOptimal);
  CHECK(full.objective <= res.objective + 1e-9);
}

TEST_CASE("independent blocks are solved separately") {
  MilpModel m;
  for (int block = 0; block < 3; ++block) {
    const auto a = m.lp.add_col(1.0, 0.0, 1.0);
    const auto b = m.lp.add_col(1.5, 0.0, 1.0);
    m.is_integer.push_back(1);
    m.is_integer.push_back(1);
    const auto r = m.lp.add_row(RowSense::kGreaterEqual, 1.5);
    m.lp.set(r, a, 1.0);
    m.lp.set(r, b, 1.0);
  }
  m.lp.add_col(2.0, 1.0, 1.0);
  m.is_integer.push_back(0);
  const MilpResult res = solve_milp(m);
  CHECK(res.components == 3);
  CHECK(res.objective == doctest::Approx(3 * 2.5 + 2.0));
  CHECK(res.solution.back() == 1.0);
}
