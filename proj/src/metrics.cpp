#include "bargeflow/metrics.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>

#include "bargeflow/error.hpp"
#include "bargeflow/hedging.hpp"
#include "bargeflow/lshaped.hpp"
#include "bargeflow/parallel.hpp"

namespace bargeflow {

const char* const kCsvHeader =
    "period,barge_uses,tow_uses,ratio,fixed_cost,holding_cost,transport_cost,"
    "procurement_cost,shortage_cost";

std::vector<MetricsRow> metrics_rows(const NetworkInstance& instance,
                                     const ScenarioSet& scenarios,
                                     const FirstStagePlan& plan,
                                     const std::vector<RecourseSolution>& recourse) {
  const std::vector<CostBreakdown> costs = period_costs(instance, scenarios, plan, recourse);
  std::vector<MetricsRow> rows(instance.num_periods);
  for (std::size_t t = 0; t < instance.num_periods; ++t) {
    MetricsRow& row = rows[t];
    row.period = t + 1;
    for (std::size_t s = 0; s < instance.num_towboats(); ++s) {
      for (std::size_t a = 0; a < instance.num_arcs(); ++a) {
        row.tow_uses += plan.tow(s, a, t);
        for (std::size_t m = 0; m < instance.num_commodities(); ++m) {
          for (std::size_t b = 0; b < instance.num_barges(); ++b) {
            row.barge_uses += plan.barge(m, b, s, a, t);
          }
        }
      }
    }
    row.ratio = row.tow_uses == 0 ? 0.0
                                  : static_cast<double>(row.barge_uses) /
                                        static_cast<double>(row.tow_uses);
    row.fixed_cost = costs[t].fixed;
    row.holding_cost = costs[t].holding;
    row.transport_cost = costs[t].transport;
    row.procurement_cost = costs[t].procurement;
    row.shortage_cost = costs[t].shortage;
  }
  return rows;
}

std::size_t barges_without_tow(const NetworkInstance& instance, const FirstStagePlan& plan) {
  std::size_t count = 0;
  for (std::size_t m = 0; m < instance.num_commodities(); ++m) {
    for (std::size_t b = 0; b < instance.num_barges(); ++b) {
      for (std::size_t s = 0; s < instance.num_towboats(); ++s) {
        for (std::size_t a = 0; a < instance.num_arcs(); ++a) {
          for (std::size_t t = 0; t < instance.num_periods; ++t) {
            if (plan.barge(m, b, s, a, t) != 0 && plan.tow(s, a, t) == 0) ++count;
          }
        }
      }
    }
  }
  return count;
}

namespace {

// Recovers the recourse of a fixed plan scenario by scenario.
Extraction extract_plan(const NetworkInstance& instance, const ScenarioSet& scenarios,
                        const std::vector<double>& plan, std::size_t workers) {
  Extraction ex;
  ex.plan = plan_from_vector(instance, VariableIndex(instance, 0), plan);
  auto outcomes = parallel_map_index<RecourseSolution>(
      scenarios.size(),
      [&](std::size_t w) {
        const RecourseLp rec = build_recourse(instance, scenarios.scenarios[w]);
        return recourse_from_block(instance, solve_subproblem(rec, plan).primal);
      },
      workers);
  for (const auto& o : outcomes) ex.recourse.push_back(o.get());
  return ex;
}

}  // namespace

SolveOutcome solve_run(const NetworkInstance& instance, const StochasticSpec& spec,
                       const RunConfig& run, std::ostream* log) {
  SolveOutcome out;
  out.solver = run.solver;
  if (run.solver == RunSolver::kSaa) {
    SaaReport rep = saa_run(instance, spec, saa_config(run));
    out.scenarios = collapse_duplicates(
        sample_scenarios(instance, spec, run.evaluation_size, evaluation_seed(run.seed)));
    const double n = static_cast<double>(run.evaluation_size);
    for (double& p : out.scenarios.probabilities) p = std::round(p * n) / n;
    out.plan = rep.best_plan;
    out.objective = rep.upper_bound;
    out.saa = std::move(rep);
  } else {
    out.scenarios = run_scenarios(instance, spec, run);
    switch (run.solver) {
      case RunSolver::kExtensive: {
        const ExtensiveForm ef = build(instance, out.scenarios);
        MilpOptions opts;
        opts.relative_gap = run.tolerance;
        const MilpResult res = solve_milp(ef.model, opts);
        if (res.status != MilpStatus::kOptimal) {
          throw NumericalFailure(std::string("extensive form ended with status ") +
                                 to_string(res.status));
        }
        out.objective = res.objective;
        out.plan.assign(res.solution.begin(),
                        res.solution.begin() +
                            static_cast<std::ptrdiff_t>(ef.index.num_first_stage()));
        out.extraction = extract(instance, ef.index, res.solution);
        break;
      }
      case RunSolver::kLShaped: {
        LShapedOptions opts;
        opts.tolerance = run.tolerance;
        opts.workers = run.workers;
        opts.log = log;
        const LShapedResult res = run_lshaped(instance, out.scenarios, opts);
        if (res.status != MilpStatus::kOptimal || res.iteration_limit) {
          throw NumericalFailure("decomposition did not reach the tolerance");
        }
        out.objective = res.objective;
        out.plan = res.plan;
        break;
      }
      case RunSolver::kPha: {
        PhaOptions opts;
        opts.workers = run.workers;
        opts.log = log;
        const PhaResult res = pha_run(instance, out.scenarios, opts);
        if (res.status == PhaStatus::kRepairFailed) {
          throw NumericalFailure("hedging could not repair its consensus plan");
        }
        out.objective = res.upper_bound;
        out.plan = res.plan;
        break;
      }
      case RunSolver::kSaa:
        break;
    }
  }
  if (out.extraction.recourse.empty()) {
    out.extraction = extract_plan(instance, out.scenarios, out.plan, run.workers);
  }
  out.rows = metrics_rows(instance, out.scenarios, out.extraction.plan, out.extraction.recourse);
  return out;
}

std::size_t SweepTable::total_barge_uses() const {
  std::size_t n = 0;
  for (const MetricsRow& r : rows) n += r.barge_uses;
  return n;
}

std::size_t SweepTable::total_tow_uses() const {
  std::size_t n = 0;
  for (const MetricsRow& r : rows) n += r.tow_uses;
  return n;
}

double SweepTable::peak_ratio() const {
  double best = 0.0;
  for (const MetricsRow& r : rows) best = std::max(best, r.ratio);
  return best;
}

std::size_t SweepTable::peak_period() const {
  std::size_t at = 0;
  double best = 0.0;
  for (const MetricsRow& r : rows) {
    if (r.ratio > best) {
      best = r.ratio;
      at = r.period;
    }
  }
  return at;
}

std::vector<SweepTable> run_sweep(const NetworkInstance& instance, const StochasticSpec& spec,
                                  const RunConfig& run, const std::vector<double>& factors) {
  if (factors.empty()) throw InvalidInput("sweep needs at least one factor");
  std::vector<SweepTable> tables;
  for (double f : factors) {
    if (!std::isfinite(f) || f <= -1.0) {
      throw InvalidInput("sweep factor must be finite and greater than -1");
    }
    SweepTable table;
    table.factor = f;
    try {
      const SolveOutcome res = solve_run(instance, shift_mean_water_level(spec, f), run);
      table.ok = true;
      table.objective = res.objective;
      table.rows = res.rows;
    } catch (const InvalidInput&) {
      throw;
    } catch (const std::exception& e) {
      table.error = e.what();
    }
    tables.push_back(std::move(table));
  }
  return tables;
}

std::vector<SweepDelta> sweep_deltas(const std::vector<SweepTable>& tables) {
  const SweepTable* base = nullptr;
  for (const SweepTable& t : tables) {
    if (t.factor == 0.0 && t.ok) base = &t;
  }
  if (base == nullptr) throw InvalidInput("sweep has no successful base case (factor 0)");
  std::vector<SweepDelta> out;
  for (const SweepTable& t : tables) {
    if (!t.ok) continue;
    SweepDelta d;
    d.factor = t.factor;
    d.barge_uses = static_cast<long long>(t.total_barge_uses()) -
                   static_cast<long long>(base->total_barge_uses());
    d.peak_ratio = t.peak_ratio() - base->peak_ratio();
    out.push_back(d);
  }
  return out;
}

void write_csv(std::ostream& out, const std::vector<MetricsRow>& rows) {
  out << kCsvHeader << '\n';
  char buf[512];
  for (const MetricsRow& r : rows) {
    std::snprintf(buf, sizeof buf, "%zu,%zu,%zu,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                  r.period, r.barge_uses, r.tow_uses, r.ratio, r.fixed_cost, r.holding_cost,
                  r.transport_cost, r.procurement_cost, r.shortage_cost);
    out << buf;
  }
}

namespace {

double parse_double(const std::string& cell, std::size_t line) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(cell.c_str(), &end);
  if (cell.empty() || end != cell.c_str() + cell.size() || errno == ERANGE) {
    throw InvalidInput("CSV line " + std::to_string(line) + ": bad number '" + cell + "'");
  }
  return v;
}

std::size_t parse_count(const std::string& cell, std::size_t line) {
  const double v = parse_double(cell, line);
  if (v < 0 || v != std::floor(v)) {
    throw InvalidInput("CSV line " + std::to_string(line) + ": expected a count, got '" + cell + "'");
  }
  return static_cast<std::size_t>(v);
}

}  // namespace

std::vector<MetricsRow> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) {
    throw InvalidInput("CSV line 1: unexpected header");
  }
  std::vector<MetricsRow> rows;
  std::size_t number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 9) {
      throw InvalidInput("CSV line " + std::to_string(number) + ": expected 9 fields");
    }
    MetricsRow r;
    r.period = parse_count(cells[0], number);
    r.barge_uses = parse_count(cells[1], number);
    r.tow_uses = parse_count(cells[2], number);
    r.ratio = parse_double(cells[3], number);
    r.fixed_cost = parse_double(cells[4], number);
    r.holding_cost = parse_double(cells[5], number);
    r.transport_cost = parse_double(cells[6], number);
    r.procurement_cost = parse_double(cells[7], number);
    r.shortage_cost = parse_double(cells[8], number);
    rows.push_back(r);
  }
  return rows;
}

std::vector<MetricsRow> read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return read_csv(in);
}

std::string csv_name(double factor) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "factor_%g.csv", factor == 0.0 ? 0.0 : factor);
  return buf;
}

std::vector<std::filesystem::path> emit_csv(const std::vector<SweepTable>& tables,
                                            const std::filesystem::path& out_dir) {
  if (tables.empty()) throw InvalidInput("no tables to write");
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());
  std::vector<std::filesystem::path> written;
  auto open = [&](const std::filesystem::path& p) {
    std::ofstream f(p);
    if (!f) throw IoError("cannot write " + p.string());
    return f;
  };
  for (const SweepTable& t : tables) {
    if (!t.ok) continue;
    const std::filesystem::path p = out_dir / csv_name(t.factor);
    std::ofstream f = open(p);
    write_csv(f, t.rows);
    if (!f) throw IoError("cannot write " + p.string());
    written.push_back(p);
  }
  const std::filesystem::path summary = out_dir / "summary.csv";
  std::ofstream f = open(summary);
  f << "factor,status,objective,total_barge_uses,total_tow_uses,peak_ratio,peak_period\n";
  char buf[256];
  for (const SweepTable& t : tables) {
    std::snprintf(buf, sizeof buf, "%g,%s,%.17g,%zu,%zu,%.17g,%zu\n", t.factor,
                  t.ok ? "ok" : "failed", t.ok ? t.objective : 0.0, t.total_barge_uses(),
                  t.total_tow_uses(), t.peak_ratio(), t.peak_period());
    f << buf;
  }
  if (!f) throw IoError("cannot write " + summary.string());
  written.push_back(summary);
  return written;
}

}  // namespace bargeflow
