#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "bargeflow/error.hpp"
#include "bargeflow/extensive_form.hpp"
#include "bargeflow/fixtures.hpp"
#include "bargeflow/mps.hpp"
#include "oracles.hpp"

using namespace bargeflow;

namespace {

std::size_t count_family(const ExtensiveForm& ef, RowFamily family) {
  return static_cast<std::size_t>(
      std::count(ef.row_family.begin(), ef.row_family.end(), family));
}

// Extensive form with the first stage pinned to y, solved as an LP.
LpResult solve_fixed(const ExtensiveForm& ef, const std::vector<double>& y) {
  StandardFormLP lp = ef.model.lp;
  for (std::size_t k = 0; k < y.size(); ++k) lp.lower[k] = lp.upper[k] = y[k];
  return solve_lp(lp);
}

std::vector<double> random_feasible_plan(const NetworkInstance& inst,
                                         std::mt19937_64& rng) {
  const VariableIndex index(inst, 0);
  std::bernoulli_distribution coin(0.5);
  for (int attempt = 0; attempt < 200; ++attempt) {
    std::vector<double> y(index.num_first_stage());
    for (double& v : y) v = coin(rng) ? 1.0 : 0.0;
    if (oracle::first_stage_feasible(inst, y)) return y;
  }
  return std::vector<double>(index.num_first_stage(), 0.0);
}

double recourse_value(const NetworkInstance& inst, const Scenario& s,
                      const std::vector<double>& y) {
  const LpResult res = solve_lp(fix_plan(build_recourse(inst, s), y));
  REQUIRE(res.status == LpStatus::kOptimal);
  return res.objective;
}

}  // namespace

TEST_CASE("micro instance dimensions") {
  const Fixture f = micro_instance_m1();
  const ExtensiveForm ef = build(f.instance, f.scenarios);
  CHECK(ef.index.num_first_stage() == 3);
  CHECK(ef.model.num_vars() == 15);
  CHECK(std::count(ef.model.is_integer.begin(), ef.model.is_integer.end(), 1) == 3);
  CHECK(count_family(ef, RowFamily::kOneCommodity) == 2);
  CHECK(count_family(ef, RowFamily::kTowLoad) == 2);
  CHECK(count_family(ef, RowFamily::kWeight) == 4);
  CHECK(ef.row_family.size() == ef.model.num_rows());
  for (std::size_t k = 0; k < ef.model.num_vars(); ++k) {
    CHECK(ef.model.is_integer[k] == (k < 3 ? 1 : 0));
    CHECK(ef.model.lp.lower[k] == 0.0);
  }
}

TEST_CASE("variable index is a bijection") {
  std::mt19937_64 rng(3);
  for (int k = 0; k < 10; ++k) {
    const oracle::RandomCase c = oracle::random_case(rng, {});
    const VariableIndex index(c.instance, c.scenarios.size());
    for (std::size_t id = 0; id < index.num_vars(); ++id) {
      const VarKey key = index.decode(id);
      REQUIRE(index.encode(key) == id);
      CHECK((id < index.num_first_stage()) ==
            (key.kind == VarKind::kTow || key.kind == VarKind::kBarge));
    }
    CHECK_THROWS_AS(index.decode(index.num_vars()), InvalidInput);
  }
}

TEST_CASE("micro instance optimum extracts to the expected flows") {
  const Fixture f = micro_instance_m1();
  const ExtensiveForm ef = build(f.instance, f.scenarios);
  const LpResult res = solve_fixed(ef, {1, 1, 1});
  REQUIRE(res.status == LpStatus::kOptimal);
  CHECK(res.objective == doctest::Approx(480.0));
  const Extraction ex = extract(f.instance, ef.index, res.primal);
  CHECK(ex.plan.tow_uses() == 1);
  CHECK(ex.plan.barge_uses() == 2);
  const auto shipped = [](const RecourseSolution& r) {
    double sum = 0.0;
    for (double v : r.flow.values()) sum += v;
    return sum;
  };
  CHECK(shipped(ex.recourse[0]) == doctest::Approx(80.0));
  CHECK(shipped(ex.recourse[1]) == doctest::Approx(60.0));
  CHECK(ex.recourse[1].shortage(0, 0, 0) == doctest::Approx(20.0));
  CHECK(ex.recourse[0].shortage(0, 0, 0) == doctest::Approx(0.0));
  const CostBreakdown total =
      total_costs(period_costs(f.instance, f.scenarios, ex.plan, ex.recourse));
  CHECK(total.total() == doctest::Approx(480.0));
  CHECK(total.fixed == doctest::Approx(70.0));
}

TEST_CASE("extraction of zero and fractional vectors") {
  const Fixture f = micro_instance_m1();
  const ExtensiveForm ef = build(f.instance, f.scenarios);
  const Extraction zero =
      extract(f.instance, ef.index, std::vector<double>(ef.index.num_vars(), 0.0));
  CHECK(zero.plan == empty_plan(f.instance));
  CHECK(zero.recourse.size() == 2);
  for (double v : zero.recourse[1].flow.values()) CHECK(v == 0.0);

  std::vector<double> half(ef.index.num_vars(), 0.0);
  half[0] = 0.5;
  CHECK_THROWS_AS(extract(f.instance, ef.index, half), InvalidInput);
  half[0] = 1.0 - 1e-7;
  CHECK(extract(f.instance, ef.index, half).plan.tow_uses() == 1);
  CHECK_THROWS_AS(extract(f.instance, ef.index, std::vector<double>(4, 0.0)),
                  InvalidInput);
}

TEST_CASE("one scenario reproduces the deterministic objective") {
  std::mt19937_64 rng(8);
  for (int k = 0; k < 20; ++k) {
    const oracle::RandomCase c = oracle::random_case(rng, {});
    const ScenarioSet single{{c.scenarios.scenarios[0]}, {1.0}};
    const ExtensiveForm ef = build(c.instance, single);
    const std::vector<double> y = random_feasible_plan(c.instance, rng);
    const LpResult res = solve_fixed(ef, y);
    REQUIRE(res.status == LpStatus::kOptimal);
    const std::vector<double> fixed = first_stage_costs(c.instance, ef.index);
    double first = 0.0;
    for (std::size_t j = 0; j < y.size(); ++j) first += fixed[j] * y[j];
    CHECK(res.objective == doctest::Approx(
                               first + recourse_value(c.instance, single.scenarios[0], y))
                               .epsilon(1e-9));
  }
}

TEST_CASE("model objective equals the direct cost evaluation") {
  std::mt19937_64 rng(21);
  for (int k = 0; k < 30; ++k) {
    const oracle::RandomCase c = oracle::random_case(rng, {});
    const ExtensiveForm ef = build(c.instance, c.scenarios);
    const std::vector<double> y = random_feasible_plan(c.instance, rng);
    const LpResult res = solve_fixed(ef, y);
    REQUIRE(res.status == LpStatus::kOptimal);
    CHECK(max_violation(ef.model.lp, res.primal) <= 1e-7);
    const Extraction ex = extract(c.instance, ef.index, res.primal);
    const double direct =
        total_costs(period_costs(c.instance, c.scenarios, ex.plan, ex.recourse)).total();
    CHECK(std::abs(direct - res.objective) <= 1e-9 * (1 + std::abs(res.objective)));
  }
}

TEST_CASE("every first-stage feasible plan has a feasible recourse") {
  std::mt19937_64 rng(34);
  for (int k = 0; k < 40; ++k) {
    const oracle::RandomCase c = oracle::random_case(rng, {});
    for (int rep = 0; rep < 5; ++rep) {
      const std::vector<double> y = random_feasible_plan(c.instance, rng);
      for (const Scenario& s : c.scenarios.scenarios) {
        const LpResult res = solve_lp(fix_plan(build_recourse(c.instance, s), y));
        CHECK(res.status == LpStatus::kOptimal);
      }
    }
  }
}

TEST_CASE("implied bounds do not change the recourse value") {
  std::mt19937_64 rng(55);
  for (int k = 0; k < 30; ++k) {
    const oracle::RandomCase c = oracle::random_case(rng, {});
    const std::vector<double> y = random_feasible_plan(c.instance, rng);
    const Scenario& s = c.scenarios.scenarios[0];
    const LpResult tight = solve_lp(fix_plan(build_recourse(c.instance, s), y));
    const LpResult loose =
        solve_lp(fix_plan(build_recourse(c.instance, s, {false}), y));
    REQUIRE(tight.status == LpStatus::kOptimal);
    REQUIRE(loose.status == LpStatus::kOptimal);
    CHECK(tight.objective == doctest::Approx(loose.objective).epsilon(1e-9));
  }
}

TEST_CASE("first-stage rows match the independent feasibility check") {
  std::mt19937_64 rng(77);
  for (int k = 0; k < 20; ++k) {
    const oracle::RandomCase c = oracle::random_case(rng, {});
    const ExtensiveForm fs = build_first_stage(c.instance, {false});
    const std::size_t n = fs.index.num_first_stage();
    for (int rep = 0; rep < 50; ++rep) {
      std::vector<double> y(n);
      for (double& v : y) v = static_cast<double>(rng() & 1U);
      const bool rows_ok = max_violation(fs.model.lp, y) <= 1e-9;
      CHECK(rows_ok == oracle::first_stage_feasible(c.instance, y));
      const ExtensiveForm tight = build_first_stage(c.instance);
      if (rows_ok) CHECK(max_violation(tight.model.lp, y) <= 1e-9);
    }
  }
}

TEST_CASE("build rejects invalid input") {
  Fixture f = micro_instance_m1();
  ScenarioSet none;
  CHECK_THROWS_AS(build(f.instance, none), InvalidInput);
  f.instance.params.deterioration_rate(0) = 2.0;
  CHECK_THROWS_AS(build(f.instance, f.scenarios), InvalidInput);
}

TEST_CASE("MPS round trip is exact") {
  const Fixture f = micro_instance_m1();
  const ExtensiveForm ef = build(f.instance, f.scenarios);
  std::stringstream buffer;
  write_mps(ef.model, buffer);
  const std::string text = buffer.str();
  const auto start = text.find("'INTORG'");
  const auto stop = text.find("'INTEND'");
  REQUIRE(start != std::string::npos);
  REQUIRE(stop != std::string::npos);
  std::size_t objective_entries = 0;
  std::istringstream section(text.substr(start, stop - start));
  for (std::string ln; std::getline(section, ln);) {
    if (ln.find(" OBJ ") != std::string::npos) ++objective_entries;
  }
  CHECK(objective_entries == 3);

  const MilpModel back = read_mps(buffer);
  MilpModel expected = ef.model;
  expected.lp = canonicalize(expected.lp);
  CHECK(back == expected);

  std::mt19937_64 rng(2);
  for (int k = 0; k < 10; ++k) {
    const oracle::RandomCase c = oracle::random_case(rng, {});
    MilpModel model = build(c.instance, c.scenarios).model;
    model.lp.lower[model.num_vars() - 1] = -kInfinity;
    model.lp.upper[model.num_vars() - 1] = 1.0 / 3.0;
    std::stringstream io;
    write_mps(model, io);
    MilpModel canonical = model;
    canonical.lp = canonicalize(model.lp);
    CHECK(read_mps(io) == canonical);
  }
}

TEST_CASE("MPS of an empty objective lists zero costs") {
  MilpModel model;
  model.lp.add_col(0.0, 0.0, 1.0);
  model.lp.add_col(0.0, 0.0, kInfinity);
  model.is_integer = {1, 0};
  const auto r = model.lp.add_row(RowSense::kLessEqual, 1.0);
  model.lp.set(r, 0, 1.0);
  std::stringstream io;
  write_mps(model, io);
  CHECK(io.str().find("C0000002  OBJ       0") != std::string::npos);
  CHECK(read_mps(io) == model);
  std::istringstream broken("ROWS\n N  OBJ\nCOLUMNS\n    C1  R9  1\nENDATA\n");
  CHECK_THROWS_AS(read_mps(broken), InvalidInput);
}
