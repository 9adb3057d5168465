#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <regex>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bargeflow/config.hpp"
#include "bargeflow/error.hpp"
#include "bargeflow/extensive_form.hpp"
#include "bargeflow/metrics.hpp"
#include "bargeflow/mps.hpp"

namespace fs = std::filesystem;
using namespace bargeflow;

namespace {

constexpr int kOk = 0;
constexpr int kValidation = 2;
constexpr int kSolver = 3;

struct Flags {
  std::string config;
  std::optional<std::string> solver;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> workers;
  std::optional<std::string> out;
  std::optional<std::string> factors;
};

std::vector<double> parse_factors(const std::string& text) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = std::min(text.find(',', start), text.size());
    const std::string cell = text.substr(start, comma - start);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(cell, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (cell.empty() || used != cell.size()) {
      throw InvalidInput("--factors: bad number '" + cell + "'");
    }
    out.push_back(v);
    start = comma + 1;
  }
  return out;
}

// Config file merged with command-line overrides.
Ingested load(const Flags& flags) {
  Ingested in = ingest(flags.config);
  if (flags.solver) in.run.solver = parse_run_solver(*flags.solver);
  if (flags.seed) {
    in.run.seed = *flags.seed;
    in.spec.seed = *flags.seed;
  }
  if (flags.workers) in.run.workers = *flags.workers;
  if (flags.out) in.run.output_dir = *flags.out;
  if (flags.factors) in.run.factors = parse_factors(*flags.factors);
  const ValidationReport rep = validate(in.run);
  if (!rep.ok()) throw InvalidInput(rep.to_string());
  return in;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot write " + path.string());
  f << text;
  if (!f) throw IoError("cannot write " + path.string());
}

int cmd_solve(const Flags& flags) {
  const Ingested in = load(flags);
  const SolveOutcome out = solve_run(in.instance, in.spec, in.run, nullptr);
  std::error_code ec;
  fs::create_directories(in.run.output_dir, ec);
  if (ec) throw IoError("cannot create " + in.run.output_dir.string());
  const fs::path csv = in.run.output_dir / "metrics.csv";
  {
    std::ofstream f(csv);
    if (!f) throw IoError("cannot write " + csv.string());
    write_csv(f, out.rows);
  }
  std::printf("solver: %s\n", to_string(out.solver));
  std::printf("objective: %.10g\n", out.objective);
  std::printf("towboat_uses: %zu\n", out.extraction.plan.tow_uses());
  std::printf("barge_uses: %zu\n", out.extraction.plan.barge_uses());
  std::printf("scenarios: %zu\n", out.scenarios.size());
  std::printf("metrics: %s\n", csv.string().c_str());
  if (out.saa) {
    std::ostringstream rep;
    write_report(rep, *out.saa);
    const fs::path path = in.run.output_dir / "saa_report.txt";
    write_file(path, rep.str());
    std::fputs(rep.str().c_str(), stdout);
  }
  return kOk;
}

int cmd_sweep(const Flags& flags) {
  const Ingested in = load(flags);
  const std::vector<SweepTable> tables =
      run_sweep(in.instance, in.spec, in.run, in.run.factors);
  const auto files = emit_csv(tables, in.run.output_dir);
  bool failed = false;
  std::printf("factor\tstatus\tobjective\tbarge_uses\ttow_uses\tpeak_ratio\tpeak_period\n");
  for (const SweepTable& t : tables) {
    std::printf("%g\t%s\t%.10g\t%zu\t%zu\t%.6g\t%zu\n", t.factor, t.ok ? "ok" : "failed",
                t.objective, t.total_barge_uses(), t.total_tow_uses(), t.peak_ratio(),
                t.peak_period());
    if (!t.ok) {
      failed = true;
      std::fprintf(stderr, "factor %g failed: %s\n", t.factor, t.error.c_str());
    }
  }
  std::printf("wrote %zu files to %s\n", files.size(), in.run.output_dir.string().c_str());
  return failed ? kSolver : kOk;
}

int cmd_export(const Flags& flags) {
  const Ingested in = load(flags);
  const ScenarioSet scenarios = run_scenarios(in.instance, in.spec, in.run);
  const ExtensiveForm ef = build(in.instance, scenarios);
  fs::path target = in.run.output_dir;
  if (target.extension() != ".mps") {
    std::error_code ec;
    fs::create_directories(target, ec);
    if (ec) throw IoError("cannot create " + target.string());
    target /= "model.mps";
  }
  write_mps(ef.model, target.string());
  std::printf("wrote %s (%zu columns, %zu rows, %zu binaries)\n", target.string().c_str(),
              ef.model.num_vars(), ef.model.lp.num_rows(), ef.index.num_first_stage());
  return kOk;
}

// Summarizes the per-factor CSVs of an earlier sweep.
int cmd_report(const Flags& flags) {
  fs::path dir = "out";
  if (!flags.config.empty()) dir = ingest(flags.config).run.output_dir;
  if (flags.out) dir = *flags.out;
  if (!fs::is_directory(dir)) throw IoError("no such directory " + dir.string());
  const std::regex name(R"(factor_(.+)\.csv)");
  std::vector<SweepTable> tables;
  for (const auto& entry : fs::directory_iterator(dir)) {
    std::smatch m;
    const std::string file = entry.path().filename().string();
    if (!std::regex_match(file, m, name)) continue;
    SweepTable t;
    t.factor = parse_factors(m[1].str()).front();
    t.rows = read_csv(entry.path());
    t.ok = true;
    for (const MetricsRow& r : t.rows) t.objective += r.total_cost();
    tables.push_back(std::move(t));
  }
  if (tables.empty()) throw InvalidInput("no factor_*.csv files in " + dir.string());
  std::sort(tables.begin(), tables.end(),
            [](const SweepTable& a, const SweepTable& b) { return a.factor < b.factor; });
  std::printf("factor\ttotal_cost\tbarge_uses\ttow_uses\tpeak_ratio\tpeak_period\n");
  for (const SweepTable& t : tables) {
    std::printf("%g\t%.10g\t%zu\t%zu\t%.6g\t%zu\n", t.factor, t.objective, t.total_barge_uses(),
                t.total_tow_uses(), t.peak_ratio(), t.peak_period());
  }
  const bool has_base = std::any_of(tables.begin(), tables.end(),
                                    [](const SweepTable& t) { return t.factor == 0.0; });
  if (has_base) {
    std::printf("\nfactor\tdelta_barge_uses\tdelta_peak_ratio\n");
    for (const SweepDelta& d : sweep_deltas(tables)) {
      std::printf("%g\t%+lld\t%+.6g\n", d.factor, d.barge_uses, d.peak_ratio);
    }
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-stage stochastic barge and towboat design solver"};
  app.require_subcommand(1);
  Flags flags;

  auto add_common = [&](CLI::App* sub, bool config_required) {
    auto* opt = sub->add_option("--config", flags.config, "JSON configuration file");
    if (config_required) opt->required();
    sub->add_option("--solver", flags.solver, "extensive, lshaped, pha or saa");
    sub->add_option("--seed", flags.seed, "sampling seed");
    sub->add_option("--workers", flags.workers,
                    "worker threads (0: BARGEFLOW_WORKERS or all cores)");
    sub->add_option("--out", flags.out, "output directory (export-mps: a .mps path also works)");
    sub->add_option("--factors", flags.factors, "comma list of water-level factors, e.g. -0.4,0,0.4");
  };
  CLI::App* solve = app.add_subcommand("solve", "solve the configured instance");
  CLI::App* sweep = app.add_subcommand("sweep", "water-level sensitivity sweep");
  CLI::App* mps = app.add_subcommand("export-mps", "write the extensive form as MPS");
  CLI::App* report = app.add_subcommand("report", "summarize the CSVs of a sweep");
  add_common(solve, true);
  add_common(sweep, true);
  add_common(mps, true);
  add_common(report, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kValidation;
  }

  try {
    if (solve->parsed()) return cmd_solve(flags);
    if (sweep->parsed()) return cmd_sweep(flags);
    if (mps->parsed()) return cmd_export(flags);
    if (report->parsed()) return cmd_report(flags);
  } catch (const InvalidInput& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kValidation;
  } catch (const IoError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kValidation;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "solver failure: %s\n", e.what());
    return kSolver;
  }
  return kValidation;
}
