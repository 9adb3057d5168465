#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "bargeflow/error.hpp"
#include "bargeflow/fixtures.hpp"
#include "bargeflow/hedging.hpp"
#include "oracles.hpp"

using namespace bargeflow;

TEST_CASE("consensus and residual") {
  const std::vector<std::vector<double>> y{{1, 0}, {0, 0}, {1, 1}};
  const std::vector<double> p{0.5, 0.25, 0.25};
  const auto avg = consensus(y, p);
  CHECK(avg[0] == doctest::Approx(0.75));
  CHECK(avg[1] == doctest::Approx(0.25));
  PhaState s;
  s.y = y;
  s.y_bar = avg;
  const double expected = 0.5 * std::sqrt(0.0625 + 0.0625) +
                          0.25 * std::sqrt(0.5625 + 0.0625) +
                          0.25 * std::sqrt(0.0625 + 0.5625);
  CHECK(consensus_residual(s, p) == doctest::Approx(expected));
  CHECK_THROWS_AS(consensus({}, {}), InvalidInput);
}

TEST_CASE("micro instance reaches the optimum") {
  const Fixture f = micro_instance_m1();
  std::ostringstream log;
  PhaOptions opts;
  opts.log = &log;
  const PhaResult res = pha_run(f.instance, f.scenarios, opts);
  CHECK(res.status == PhaStatus::kConverged);
  CHECK(res.upper_bound == doctest::Approx(480.0));
  CHECK(res.plan == std::vector<double>{1, 1, 1});
  CHECK(oracle::first_stage_feasible(f.instance, res.plan));
  CHECK(!res.history.empty());
  CHECK(log.str().find('\t') != std::string::npos);
}

TEST_CASE("multipliers stay balanced") {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 5; ++k) {
    const oracle::RandomCase c = oracle::random_case(rng, {});
    PhaState s = pha_start(c.instance, c.scenarios);
    for (int it = 0; it < 3; ++it) {
      for (std::size_t j = 0; j < s.y_bar.size(); ++j) {
        double sum = 0.0;
        for (std::size_t w = 0; w < s.w.size(); ++w) {
          sum += c.scenarios.probabilities[w] * s.w[w][j];
        }
        CHECK(std::abs(sum) <= 1e-9 * (1 + s.rho[j]));
      }
      s = pha_iterate(s, c.instance, c.scenarios);
      CHECK(s.iteration == static_cast<std::size_t>(it + 1));
    }
  }
}

TEST_CASE("one scenario solves exactly in one pass") {
  std::mt19937_64 rng(17);
  for (int k = 0; k < 5; ++k) {
    const oracle::RandomCase c = oracle::random_case(rng, {});
    const ScenarioSet one{{c.scenarios.scenarios[0]}, {1.0}};
    const PhaResult res = pha_run(c.instance, one);
    CHECK(res.status == PhaStatus::kConverged);
    CHECK(res.history.size() == 1);
    CHECK(res.upper_bound ==
          doctest::Approx(oracle::enumerate_plans(c.instance, one).objective).epsilon(1e-6));
  }
}

TEST_CASE("identical scenarios keep multipliers at zero") {
  const Fixture f = micro_instance_m1();
  const Scenario s = f.scenarios.scenarios[0];
  const ScenarioSet twins{{s, s}, {0.5, 0.5}};
  const PhaResult res = pha_run(f.instance, twins);
  CHECK(res.status == PhaStatus::kConverged);
  for (const auto& w : res.state.w) {
    for (double v : w) CHECK(v == 0.0);
  }
}

TEST_CASE("upper bound is valid and feasible on random instances") {
  std::mt19937_64 rng(123);
  for (int k = 0; k < 15; ++k) {
    const oracle::RandomCase c = oracle::random_case(rng, {});
    const double best = oracle::enumerate_plans(c.instance, c.scenarios).objective;
    PhaOptions opts;
    opts.max_iterations = 30;
    const PhaResult res = pha_run(c.instance, c.scenarios, opts);
    CAPTURE(k);
    REQUIRE(res.status != PhaStatus::kRepairFailed);
    CHECK(oracle::first_stage_feasible(c.instance, res.plan));
    CHECK(res.upper_bound >= best - 1e-6 * (1 + std::abs(best)));
    // Cuts returned for warm starts are valid at the chosen plan.
    for (const OptimalityCut& cut : res.cuts) {
      const double truth = res.scenario_values[static_cast<std::size_t>(cut.scenario)];
      CHECK(cut.evaluate(res.plan) <= truth + 1e-7 * (1 + std::abs(truth)));
    }
  }
}

TEST_CASE("worker count does not change the result") {
  std::mt19937_64 rng(8);
  const oracle::RandomCase c = oracle::random_case(rng, {});
  PhaOptions one;
  PhaOptions four;
  four.workers = 4;
  const PhaResult a = pha_run(c.instance, c.scenarios, one);
  const PhaResult b = pha_run(c.instance, c.scenarios, four);
  CHECK(a.plan == b.plan);
  CHECK(a.upper_bound == b.upper_bound);
  CHECK(a.history.size() == b.history.size());
}

TEST_CASE("bad rho length is rejected") {
  const Fixture f = micro_instance_m1();
  PhaOptions opts;
  opts.rho = std::vector<double>{1.0};
  CHECK_THROWS_AS(pha_run(f.instance, f.scenarios, opts), InvalidInput);
}
