#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "bargeflow/network.hpp"
#include "bargeflow/saa.hpp"
#include "bargeflow/scenario.hpp"

namespace bargeflow {

enum class RunSolver { kExtensive, kLShaped, kPha, kSaa };

const char* to_string(RunSolver solver);
// Accepts extensive, lshaped, pha and saa.
RunSolver parse_run_solver(const std::string& name);

struct RunConfig {
  std::filesystem::path instance_path;  // empty when the instance is inline
  RunSolver solver = RunSolver::kExtensive;
  std::vector<double> factors{-0.4, 0.0, 0.4};
  std::filesystem::path output_dir = "out";
  std::uint64_t seed = 0;
  std::size_t workers = 0;  // 0: BARGEFLOW_WORKERS or hardware concurrency
  // Truncated-normal specs are solved on this many equiprobable draws;
  // discrete specs use their atoms as the scenario set.
  std::size_t sample_size = 30;
  double tolerance = 1e-6;
  std::size_t replications = 5;
  std::size_t evaluation_size = 200;
};

// Sweep factors must exceed -1; sizes must be positive.
ValidationReport validate(const RunConfig& config);

struct Ingested {
  NetworkInstance instance;
  StochasticSpec spec;
  RunConfig run;
};

// Reads a JSON config. Parse errors carry line and column; schema and
// validation problems name the offending field. All are InvalidInput, except
// an unreadable file, which is IoError. A string "instance" entry is a path
// resolved against the config file's directory.
Ingested ingest(const std::filesystem::path& config_path);
Ingested ingest_text(const std::string& text,
                     const std::filesystem::path& base_dir = {});

// Inverse of ingest for inline configs; ingest_text(to_json(x)) == x.
std::string to_json(const NetworkInstance& instance, const StochasticSpec& spec,
                    const RunConfig& run);

// Scenario set a run uses: the atoms of a discrete spec, or sample_size
// merged draws from a truncated-normal spec.
ScenarioSet run_scenarios(const NetworkInstance& instance,
                          const StochasticSpec& spec, const RunConfig& run);

SaaConfig saa_config(const RunConfig& run);

}  // namespace bargeflow
