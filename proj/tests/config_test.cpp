#include <doctest.h>

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "bargeflow/config.hpp"
#include "bargeflow/error.hpp"
#include "bargeflow/fixtures.hpp"

using namespace bargeflow;
using json = nlohmann::json;

namespace {

const std::filesystem::path kData = BARGEFLOW_DATA_DIR;

json m1_json() {
  std::ifstream in(kData / "m1.json");
  return json::parse(in);
}

std::string error_of(const std::string& text) {
  try {
    ingest_text(text);
  } catch (const InvalidInput& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("micro fixture file matches the built-in fixture") {
  const Ingested in = ingest(kData / "m1.json");
  const Fixture f = micro_instance_m1();
  CHECK(in.instance == f.instance);
  CHECK(in.spec.kind == StochasticSpec::Kind::kDiscrete);
  CHECK(in.spec.atoms == f.scenarios);
  CHECK(in.run.solver == RunSolver::kExtensive);
}

TEST_CASE("serialization round trip") {
  const Fixture f = micro_instance_m1();
  RunConfig run;
  run.solver = RunSolver::kSaa;
  run.seed = 42;
  run.factors = {-0.25, 0.5};
  run.sample_size = 7;
  StochasticSpec spec = make_truncated_normal_spec(f.instance);
  spec.supply(0, 0, 0) = {100, 10, 50, 150};
  spec.waterway(0, 0) = {60, 15, 20, 90};
  spec.origin_channel_multiplier = 1.5;
  const Ingested in = ingest_text(to_json(f.instance, spec, run));
  CHECK(in.instance == f.instance);
  spec.seed = 42;
  CHECK(in.spec == spec);
  CHECK(in.run.solver == RunSolver::kSaa);
  CHECK(in.run.factors == run.factors);
  CHECK(in.run.sample_size == 7);
}

TEST_CASE("scalars broadcast over a grid") {
  json j = m1_json();
  j["instance"]["barge_avail"] = 1;
  j["instance"]["holding_cost_usd_per_ton_period"] = json::array({1});
  const Ingested in = ingest_text(j.dump());
  CHECK(in.instance == micro_instance_m1().instance);
}

TEST_CASE("missing block is named") {
  json j = m1_json();
  j["instance"].erase("demand_tons");
  const std::string err = error_of(j.dump());
  CHECK(err.find("instance.demand_tons: missing") != std::string::npos);
}

TEST_CASE("negative cost is a validation error") {
  json j = m1_json();
  j["instance"]["towboat_fixed_cost_usd"] = -5;
  const std::string err = error_of(j.dump());
  CHECK(err.find("towboat_fixed_cost") != std::string::npos);
}

TEST_CASE("parse errors carry line and column") {
  const std::string err = error_of("{\n  \"run\": {\n    \"seed\": ,\n  }\n}");
  CHECK(err.find("line 3") != std::string::npos);
  CHECK(err.find("column") != std::string::npos);
}

TEST_CASE("schema problems are precise") {
  json j = m1_json();
  j["instance"]["demand_tons"] = json::array({json::array({1, 2})});
  j["instance"]["colour"] = "red";
  j["run"]["solver"] = "gurobi";
  j["run"]["factors"] = json::array({-1.5});
  const std::string err = error_of(j.dump());
  CHECK(err.find("instance.demand_tons[0]: expected 1 entries, found 2") != std::string::npos);
  CHECK(err.find("instance.colour: unknown field") != std::string::npos);
  CHECK(err.find("run.solver") != std::string::npos);

  json k = m1_json();
  k["run"]["factors"] = json::array({-1.5});
  CHECK(error_of(k.dump()).find("run.factors") != std::string::npos);

  json a = m1_json();
  a["instance"]["arcs"] = json::array({json::array({"O1", "D9"})});
  CHECK(error_of(a.dump()).find("unknown destination 'D9'") != std::string::npos);

  json p = m1_json();
  p["stochastic"]["atoms"][0]["probability"] = 0.9;
  CHECK(!error_of(p.dump()).empty());
}

TEST_CASE("instance by path") {
  const std::filesystem::path dir = std::filesystem::temp_directory_path() / "bargeflow_config_test";
  std::filesystem::create_directories(dir);
  json j = m1_json();
  {
    std::ofstream(dir / "net.json") << j["instance"].dump();
  }
  j["instance"] = "net.json";
  {
    std::ofstream(dir / "cfg.json") << j.dump();
  }
  const Ingested in = ingest(dir / "cfg.json");
  CHECK(in.instance == micro_instance_m1().instance);
  CHECK(in.run.instance_path == dir / "net.json");
  CHECK_THROWS_AS(ingest(dir / "absent.json"), IoError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("run scenarios") {
  const Ingested in = ingest(kData / "m1.json");
  CHECK(run_scenarios(in.instance, in.spec, in.run) == micro_instance_m1().scenarios);
  StochasticSpec tn = make_truncated_normal_spec(in.instance);
  tn.supply(0, 0, 0) = {100, 0, 100, 100};
  tn.waterway(0, 0) = {60, 0, 60, 60};
  RunConfig run;
  run.sample_size = 10;
  const ScenarioSet s = run_scenarios(in.instance, tn, run);
  CHECK(s.size() == 1);  // degenerate laws merge to one atom
  CHECK(s.probabilities[0] == 1.0);
  CHECK_THROWS_AS(parse_run_solver("cbc"), InvalidInput);
}
