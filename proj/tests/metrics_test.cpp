#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "bargeflow/error.hpp"
#include "bargeflow/fixtures.hpp"
#include "bargeflow/metrics.hpp"

using namespace bargeflow;

namespace {

double row_total(const std::vector<MetricsRow>& rows) {
  double sum = 0.0;
  for (const MetricsRow& r : rows) sum += r.total_cost();
  return sum;
}

}  // namespace

TEST_CASE("micro instance gives one row") {
  const Fixture f = micro_instance_m1();
  const StochasticSpec spec = make_discrete_spec(f.scenarios);
  for (RunSolver solver : {RunSolver::kExtensive, RunSolver::kLShaped, RunSolver::kPha}) {
    RunConfig run;
    run.solver = solver;
    const SolveOutcome out = solve_run(f.instance, spec, run);
    CAPTURE(to_string(solver));
    CHECK(out.objective == doctest::Approx(480.0));
    REQUIRE(out.rows.size() == 1);
    CHECK(out.rows[0].period == 1);
    CHECK(out.rows[0].barge_uses == 2);
    CHECK(out.rows[0].tow_uses == 1);
    CHECK(out.rows[0].ratio == 2.0);
    CHECK(out.rows[0].fixed_cost == doctest::Approx(70.0));
    CHECK(std::abs(row_total(out.rows) - out.objective) <= 1e-6);
    CHECK(barges_without_tow(f.instance, out.extraction.plan) == 0);
  }
}

TEST_CASE("empty plan row is zero with ratio 0") {
  const Fixture f = micro_instance_m1();
  std::vector<RecourseSolution> rec;
  for (std::size_t w = 0; w < 2; ++w) {
    rec.push_back(recourse_from_block(
        f.instance, std::vector<double>(VariableIndex(f.instance, 1).block_size(), 0.0)));
  }
  const auto rows = metrics_rows(f.instance, f.scenarios, empty_plan(f.instance), rec);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].barge_uses == 0);
  CHECK(rows[0].tow_uses == 0);
  CHECK(rows[0].ratio == 0.0);
  CHECK(rows[0].fixed_cost == 0.0);
}

TEST_CASE("barges without a towboat are counted") {
  const Fixture f = micro_instance_m1();
  FirstStagePlan p = empty_plan(f.instance);
  p.barge(0, 1, 0, 0, 0) = 1;
  CHECK(barges_without_tow(f.instance, p) == 1);
  p.tow(0, 0, 0) = 1;
  CHECK(barges_without_tow(f.instance, p) == 0);
}

TEST_CASE("csv round trip is exact") {
  std::vector<MetricsRow> rows;
  for (std::size_t t = 1; t <= 12; ++t) {
    MetricsRow r;
    r.period = t;
    r.barge_uses = 3 * t;
    r.tow_uses = t;
    r.ratio = 3.0;
    r.fixed_cost = 0.1 * static_cast<double>(t);
    r.holding_cost = 1.0 / 3.0;
    r.transport_cost = std::sqrt(2.0) * 1e6;
    r.procurement_cost = 1e-300;
    r.shortage_cost = 123456789.123456789;
    rows.push_back(r);
  }
  std::stringstream ss;
  write_csv(ss, rows);
  CHECK(ss.str().rfind(std::string(kCsvHeader) + "\n", 0) == 0);
  CHECK(read_csv(ss) == rows);
  std::stringstream bad("period,x\n");
  CHECK_THROWS_AS(read_csv(bad), InvalidInput);
  std::stringstream short_row(std::string(kCsvHeader) + "\n1,2,3\n");
  CHECK_THROWS_AS(read_csv(short_row), InvalidInput);
}

TEST_CASE("sweep over the micro instance") {
  const Fixture f = micro_instance_m1();
  const StochasticSpec spec = make_discrete_spec(f.scenarios);
  RunConfig run;
  const auto tables = run_sweep(f.instance, spec, run, {-0.4, 0.0, 0.0, 0.4});
  REQUIRE(tables.size() == 4);
  for (const auto& t : tables) CHECK(t.ok);
  // Identity factor reproduces the base run.
  CHECK(tables[1].rows == tables[2].rows);
  CHECK(tables[1].objective == 480.0);
  const auto deltas = sweep_deltas(tables);
  CHECK(deltas.size() == 4);
  CHECK(deltas[1].barge_uses == 0);
  CHECK_THROWS_AS(run_sweep(f.instance, spec, run, {}), InvalidInput);
  CHECK_THROWS_AS(run_sweep(f.instance, spec, run, {-1.0}), InvalidInput);
  CHECK_THROWS_AS(sweep_deltas({tables[0]}), InvalidInput);

  const std::filesystem::path dir = std::filesystem::temp_directory_path() / "bargeflow_metrics_test";
  std::filesystem::remove_all(dir);
  const auto files = emit_csv(tables, dir);
  CHECK(files.size() == 5);
  CHECK(std::filesystem::exists(dir / "factor_-0.4.csv"));
  CHECK(std::filesystem::exists(dir / "factor_0.csv"));
  CHECK(read_csv(dir / csv_name(0.4)) == tables[3].rows);
  std::ifstream summary(dir / "summary.csv");
  std::string header;
  std::getline(summary, header);
  CHECK(header.find("peak_ratio") != std::string::npos);
  std::filesystem::remove_all(dir);
}
