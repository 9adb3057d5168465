#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "bargeflow/error.hpp"
#include "bargeflow/fixtures.hpp"
#include "bargeflow/lshaped.hpp"
#include "oracles.hpp"

using namespace bargeflow;

namespace {

std::vector<std::vector<double>> all_plans(const NetworkInstance& inst) {
  const std::size_t n = VariableIndex(inst, 0).num_first_stage();
  std::vector<std::vector<double>> out;
  for (std::uint64_t code = 0; code < (std::uint64_t{1} << n); ++code) {
    std::vector<double> y(n);
    for (std::size_t k = 0; k < n; ++k) y[k] = static_cast<double>((code >> k) & 1U);
    if (oracle::first_stage_feasible(inst, y)) out.push_back(y);
  }
  return out;
}

double extensive_optimum(const NetworkInstance& inst, const ScenarioSet& sc) {
  MilpOptions opts;
  opts.relative_gap = 0.0;
  const MilpResult res = solve_milp(build(inst, sc).model, opts);
  REQUIRE(res.status == MilpStatus::kOptimal);
  return res.objective;
}

}  // namespace

TEST_CASE("micro instance subproblem values") {
  const Fixture f = micro_instance_m1();
  const std::vector<double> full{1, 1, 1};
  const std::vector<double> none{0, 0, 0};
  CHECK(solve_subproblem(f.instance, f.scenarios.scenarios[1], full).value ==
        doctest::Approx(580.0));
  CHECK(solve_subproblem(f.instance, f.scenarios.scenarios[0], full).value ==
        doctest::Approx(240.0));
  for (const Scenario& s : f.scenarios.scenarios) {
    CHECK(solve_subproblem(f.instance, s, none).value == doctest::Approx(1600.0));
  }
}

TEST_CASE("cuts are tight at their plan and valid elsewhere") {
  const Fixture f = micro_instance_m1();
  const auto plans = all_plans(f.instance);
  CHECK(plans.size() == 4);
  for (std::size_t w = 0; w < 2; ++w) {
    const RecourseLp rec = build_recourse(f.instance, f.scenarios.scenarios[w]);
    for (const auto& at : plans) {
      const SubproblemSolution sol = solve_subproblem(rec, at);
      const OptimalityCut cut = generate_cut(rec, sol, static_cast<std::ptrdiff_t>(w));
      CHECK(std::abs(cut.evaluate(at) - sol.value) <= 1e-7);
      for (const auto& other : plans) {
        CHECK(cut.evaluate(other) <= solve_subproblem(rec, other).value + 1e-7);
      }
    }
  }
}

TEST_CASE("cuts under-estimate the recourse on random instances") {
  std::mt19937_64 rng(31);
  for (int k = 0; k < 15; ++k) {
    const oracle::RandomCase c = oracle::random_case(rng, {});
    const auto plans = all_plans(c.instance);
    for (std::size_t w = 0; w < c.scenarios.size(); ++w) {
      const RecourseLp rec = build_recourse(c.instance, c.scenarios.scenarios[w]);
      std::vector<double> values;
      for (const auto& y : plans) values.push_back(solve_subproblem(rec, y).value);
      for (std::size_t a = 0; a < plans.size(); a += 3) {
        const SubproblemSolution sol = solve_subproblem(rec, plans[a]);
        const OptimalityCut cut = generate_cut(rec, sol, 0);
        CHECK(std::abs(cut.evaluate(plans[a]) - values[a]) <= 1e-7 * (1 + values[a]));
        for (std::size_t b = 0; b < plans.size(); ++b) {
          CHECK(cut.evaluate(plans[b]) <= values[b] + 1e-7 * (1 + values[b]));
        }
      }
    }
  }
}

TEST_CASE("zero demand gives a zero cut") {
  Fixture f = micro_instance_m1();
  f.instance.params.demand(0, 0, 0) = 0.0;
  const RecourseLp rec = build_recourse(f.instance, f.scenarios.scenarios[0]);
  const SubproblemSolution sol = solve_subproblem(rec, {1, 1, 1});
  const OptimalityCut cut = generate_cut(rec, sol, 0);
  CHECK(sol.value == 0.0);
  CHECK(cut.intercept == 0.0);
  CHECK(cut.coefficients.empty());
}

TEST_CASE("stale duals are rejected") {
  const Fixture f = micro_instance_m1();
  const RecourseLp rec = build_recourse(f.instance, f.scenarios.scenarios[0]);
  SubproblemSolution sol = solve_subproblem(rec, {1, 1, 1});
  sol.duals.pop_back();
  CHECK_THROWS_AS(generate_cut(rec, sol, 0), InvalidInput);
}

TEST_CASE("cut pool removes duplicates") {
  CutPool pool;
  OptimalityCut a;
  a.scenario = 1;
  a.intercept = 10.0;
  a.coefficients = {{0, -2.0}, {3, 1.5}};
  CHECK(pool.add(a));
  OptimalityCut b = a;
  b.intercept += 1e-12;
  CHECK_FALSE(pool.add(b));
  b.intercept += 1e-6;
  CHECK(pool.add(b));
  OptimalityCut c = a;
  c.scenario = 2;
  CHECK(pool.add(c));
  CHECK(pool.size() == 3);
}

TEST_CASE("micro instance by decomposition") {
  const Fixture f = micro_instance_m1();
  for (bool multi : {true, false}) {
    LShapedOptions opts;
    opts.multi_cut = multi;
    std::ostringstream log;
    opts.log = &log;
    const LShapedResult res = run_lshaped(f.instance, f.scenarios, opts);
    REQUIRE(res.status == MilpStatus::kOptimal);
    CHECK(res.objective == doctest::Approx(480.0));
    CHECK(res.plan == std::vector<double>{1, 1, 1});
    CHECK(res.scenario_values[1] == doctest::Approx(580.0));
    std::istringstream lines(log.str());
    std::string first;
    std::getline(lines, first);
    CHECK(std::count(first.begin(), first.end(), '\t') == 5);
  }
}

TEST_CASE("single scenario matches the deterministic model") {
  std::mt19937_64 rng(41);
  for (int k = 0; k < 10; ++k) {
    const oracle::RandomCase c = oracle::random_case(rng, {});
    const ScenarioSet one{{c.scenarios.scenarios[0]}, {1.0}};
    const LShapedResult res = run_lshaped(c.instance, one);
    CHECK(res.objective == doctest::Approx(extensive_optimum(c.instance, one)).epsilon(1e-6));
  }
}

TEST_CASE("agrees with the extensive form and keeps bounds ordered") {
  std::mt19937_64 rng(2718);
  for (int k = 0; k < 25; ++k) {
    const oracle::RandomCase c = oracle::random_case(rng, {});
    const double ref = extensive_optimum(c.instance, c.scenarios);
    LShapedOptions multi;
    const LShapedResult a = run_lshaped(c.instance, c.scenarios, multi);
    LShapedOptions single;
    single.multi_cut = false;
    const LShapedResult b = run_lshaped(c.instance, c.scenarios, single);
    CAPTURE(k);
    REQUIRE(a.status == MilpStatus::kOptimal);
    REQUIRE(b.status == MilpStatus::kOptimal);
    CHECK(std::abs(a.objective - ref) <= 1e-6 * (1 + std::abs(ref)));
    CHECK(std::abs(b.objective - ref) <= 1e-6 * (1 + std::abs(ref)));
    for (std::size_t i = 0; i < a.history.size(); ++i) {
      CHECK(a.history[i].lower_bound <= a.history[i].upper_bound + 1e-9);
      if (i > 0) {
        CHECK(a.history[i].lower_bound >= a.history[i - 1].lower_bound);
        CHECK(a.history[i].upper_bound <= a.history[i - 1].upper_bound);
      }
    }
    // Every pooled cut stays below the true recourse at feasible plans.
    const auto plans = all_plans(c.instance);
    for (std::size_t p = 0; p < plans.size(); p += 2) {
      std::vector<double> q;
      for (const Scenario& s : c.scenarios.scenarios) {
        q.push_back(solve_subproblem(c.instance, s, plans[p]).value);
      }
      for (const OptimalityCut& cut : a.cuts) {
        const double truth = q[static_cast<std::size_t>(cut.scenario)];
        CHECK(cut.evaluate(plans[p]) <= truth + 1e-7 * (1 + truth));
      }
    }
  }
}

TEST_CASE("worker count and warm start do not change the answer") {
  std::mt19937_64 rng(99);
  const oracle::RandomCase c = oracle::random_case(rng, {});
  LShapedOptions one;
  const LShapedResult a = run_lshaped(c.instance, c.scenarios, one);
  LShapedOptions four;
  four.workers = 4;
  const LShapedResult b = run_lshaped(c.instance, c.scenarios, four);
  CHECK(a.objective == b.objective);
  CHECK(a.plan == b.plan);
  CHECK(a.cuts == b.cuts);
  LShapedOptions warm;
  warm.incumbent = a.plan;
  warm.initial_cuts = a.cuts;
  const LShapedResult w = run_lshaped(c.instance, c.scenarios, warm);
  CHECK(w.objective == doctest::Approx(a.objective).epsilon(1e-6));
  CHECK(w.iterations <= a.iterations);
}
