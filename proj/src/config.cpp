#include "bargeflow/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "bargeflow/error.hpp"

namespace bargeflow {

using json = nlohmann::json;

const char* to_string(RunSolver solver) {
  switch (solver) {
    case RunSolver::kExtensive:
      return "extensive";
    case RunSolver::kLShaped:
      return "lshaped";
    case RunSolver::kPha:
      return "pha";
    case RunSolver::kSaa:
      return "saa";
  }
  return "unknown";
}

RunSolver parse_run_solver(const std::string& name) {
  if (name == "extensive") return RunSolver::kExtensive;
  if (name == "lshaped") return RunSolver::kLShaped;
  if (name == "pha") return RunSolver::kPha;
  if (name == "saa") return RunSolver::kSaa;
  throw InvalidInput("unknown solver '" + name + "' (expected extensive, lshaped, pha or saa)");
}

ValidationReport validate(const RunConfig& config) {
  ValidationReport report;
  for (double f : config.factors) {
    if (!std::isfinite(f) || f <= -1.0) {
      report.violations.push_back({"run.factors", "factor must be finite and greater than -1"});
    }
  }
  if (config.sample_size == 0) report.violations.push_back({"run.sample_size", "must be positive"});
  if (config.replications == 0) report.violations.push_back({"run.replications", "must be positive"});
  if (config.evaluation_size == 0) {
    report.violations.push_back({"run.evaluation_size", "must be positive"});
  }
  if (!(config.tolerance >= 0.0)) report.violations.push_back({"run.tolerance", "must be nonnegative"});
  return report;
}

namespace {

// Collects schema errors so one pass reports all of them.
class Reader {
 public:
  std::vector<std::string> errors;

  void fail(const std::string& path, const std::string& what) {
    errors.push_back(path + ": " + what);
  }

  const json* field(const json& obj, const std::string& path, const char* key,
                    bool required = true) {
    auto it = obj.find(key);
    if (it == obj.end()) {
      if (required) fail(join(path, key), "missing");
      return nullptr;
    }
    return &*it;
  }

  static std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
  }

  void check_keys(const json& obj, const std::string& path,
                  std::initializer_list<const char*> allowed) {
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      if (!ok.count(it.key())) fail(join(path, it.key()), "unknown field");
    }
  }

  bool object(const json* j, const std::string& path) {
    if (j == nullptr) return false;
    if (!j->is_object()) {
      fail(path, "expected an object");
      return false;
    }
    return true;
  }

  double number(const json& j, const std::string& path, double fallback = 0.0) {
    if (!j.is_number()) {
      fail(path, "expected a number");
      return fallback;
    }
    return j.get<double>();
  }

  std::size_t count(const json& j, const std::string& path) {
    if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<std::int64_t>() >= 0)) {
      fail(path, "expected a nonnegative integer");
      return 0;
    }
    return j.get<std::size_t>();
  }

  std::vector<std::string> names(const json* j, const std::string& path) {
    std::vector<std::string> out;
    if (j == nullptr) return out;
    if (!j->is_array()) {
      fail(path, "expected an array of names");
      return out;
    }
    std::set<std::string> seen;
    for (std::size_t k = 0; k < j->size(); ++k) {
      const json& e = (*j)[k];
      if (!e.is_string()) {
        fail(path + "[" + std::to_string(k) + "]", "expected a string");
        continue;
      }
      if (!seen.insert(e.get<std::string>()).second) {
        fail(path + "[" + std::to_string(k) + "]", "duplicate name '" + e.get<std::string>() + "'");
      }
      out.push_back(e.get<std::string>());
    }
    return out;
  }

  // A grid is a nested array of the exact shape; a number at any depth fills
  // the whole sub-block below it.
  template <std::size_t R>
  void grid(const json& j, const std::string& path, Grid<R>& g) {
    fill(j, path, g, 0, 0);
  }

  template <std::size_t R>
  void grid(const json* j, const std::string& path, Grid<R>& g) {
    if (j != nullptr) grid(*j, path, g);
  }

 private:
  template <std::size_t R>
  void fill(const json& j, const std::string& path, Grid<R>& g, std::size_t level,
            std::size_t offset) {
    const auto& dims = g.dims();
    std::size_t block = 1;
    for (std::size_t k = level; k < R; ++k) block *= dims[k];
    if (j.is_number()) {
      const double v = j.get<double>();
      auto values = g.values();
      std::fill(values.begin() + static_cast<std::ptrdiff_t>(offset),
                values.begin() + static_cast<std::ptrdiff_t>(offset + block), v);
      return;
    }
    if (level == R || !j.is_array()) {
      fail(path, level == R ? "expected a number" : "expected a number or an array");
      return;
    }
    if (j.size() != dims[level]) {
      fail(path, "expected " + std::to_string(dims[level]) + " entries, found " +
                     std::to_string(j.size()));
      return;
    }
    const std::size_t sub = block / std::max<std::size_t>(dims[level], 1);
    for (std::size_t k = 0; k < j.size(); ++k) {
      fill(j[k], path + "[" + std::to_string(k) + "]", g, level + 1, offset + k * sub);
    }
  }
};

template <std::size_t R>
json grid_json(const Grid<R>& g, std::size_t level = 0, std::size_t offset = 0) {
  json arr = json::array();
  const auto& dims = g.dims();
  std::size_t sub = 1;
  for (std::size_t k = level + 1; k < R; ++k) sub *= dims[k];
  for (std::size_t k = 0; k < dims[level]; ++k) {
    if (level + 1 == R) {
      arr.push_back(g.values()[offset + k]);
    } else {
      arr.push_back(grid_json(g, level + 1, offset + k * sub));
    }
  }
  return arr;
}

// Parameter grids by config key. Units are part of the key.
template <typename Fn>
void for_each_grid(ParameterSet& p, Fn&& fn) {
  fn("towboat_fixed_cost_usd", p.towboat_fixed_cost, true);
  fn("barge_handling_cost_usd", p.barge_handling_cost, true);
  fn("transport_cost_usd_per_ton", p.transport_cost, true);
  fn("procurement_cost_usd_per_ton", p.procurement_cost, true);
  fn("holding_cost_usd_per_ton_period", p.holding_cost, true);
  fn("shortage_penalty_usd_per_ton", p.shortage_penalty, true);
  fn("demand_tons", p.demand, true);
  fn("storage_cap_tons", p.storage_cap, true);
  fn("deterioration_rate", p.deterioration_rate, false);
  fn("tow_min_barges", p.tow_min_barges, true);
  fn("tow_max_barges", p.tow_max_barges, true);
  fn("barge_weight_cap_tons", p.barge_weight_cap, true);
  fn("barge_volume_cap_cuft", p.barge_volume_cap, true);
  fn("commodity_density_tons_per_cuft", p.commodity_density, true);
  fn("barge_avail", p.barge_avail, true);
  fn("tow_avail", p.tow_avail, true);
  fn("port_barge_limit", p.port_barge_limit, true);
  fn("port_tow_limit", p.port_tow_limit, true);
  fn("distance_miles", p.distance_miles, true);
  fn("lock_count", p.lock_count, true);
  fn("travel_window_hours", p.travel_window_hours, true);
  fn("tow_speed_mph", p.tow_speed_mph, true);
  fn("initial_inventory_tons", p.initial_inventory, false);
}

const char* const kInstanceKeys[] = {
    "origin_ports", "destination_ports", "commodities", "barges", "towboats",
    "num_periods", "arcs", "load_time_hours", "unload_time_hours",
    "mean_lock_delay_hours", "towboat_fixed_cost_usd", "barge_handling_cost_usd",
    "transport_cost_usd_per_ton", "procurement_cost_usd_per_ton",
    "holding_cost_usd_per_ton_period", "shortage_penalty_usd_per_ton",
    "demand_tons", "storage_cap_tons", "deterioration_rate", "tow_min_barges",
    "tow_max_barges", "barge_weight_cap_tons", "barge_volume_cap_cuft",
    "commodity_density_tons_per_cuft", "barge_avail", "tow_avail",
    "port_barge_limit", "port_tow_limit", "distance_miles", "lock_count",
    "travel_window_hours", "tow_speed_mph", "initial_inventory_tons"};

NetworkInstance read_instance(Reader& r, const json& j, const std::string& path) {
  NetworkInstance inst;
  {
    const std::set<std::string> ok(std::begin(kInstanceKeys), std::end(kInstanceKeys));
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (!ok.count(it.key())) r.fail(Reader::join(path, it.key()), "unknown field");
    }
  }
  const std::size_t before = r.errors.size();
  inst.origin_ports = r.names(r.field(j, path, "origin_ports"), Reader::join(path, "origin_ports"));
  inst.destination_ports =
      r.names(r.field(j, path, "destination_ports"), Reader::join(path, "destination_ports"));
  inst.commodities = r.names(r.field(j, path, "commodities"), Reader::join(path, "commodities"));
  inst.barges = r.names(r.field(j, path, "barges"), Reader::join(path, "barges"));
  inst.towboats = r.names(r.field(j, path, "towboats"), Reader::join(path, "towboats"));
  if (const json* n = r.field(j, path, "num_periods")) {
    inst.num_periods = r.count(*n, Reader::join(path, "num_periods"));
  }
  if (const json* arcs = r.field(j, path, "arcs")) {
    const std::string apath = Reader::join(path, "arcs");
    auto find = [](const std::vector<std::string>& v, const std::string& s) {
      return static_cast<std::size_t>(std::find(v.begin(), v.end(), s) - v.begin());
    };
    if (!arcs->is_array()) {
      r.fail(apath, "expected an array of [origin, destination] pairs");
    } else {
      for (std::size_t k = 0; k < arcs->size(); ++k) {
        const json& a = (*arcs)[k];
        const std::string epath = apath + "[" + std::to_string(k) + "]";
        if (!a.is_array() || a.size() != 2 || !a[0].is_string() || !a[1].is_string()) {
          r.fail(epath, "expected [origin, destination]");
          continue;
        }
        const std::size_t i = find(inst.origin_ports, a[0].get<std::string>());
        const std::size_t d = find(inst.destination_ports, a[1].get<std::string>());
        if (i == inst.origin_ports.size()) {
          r.fail(epath, "unknown origin '" + a[0].get<std::string>() + "'");
        } else if (d == inst.destination_ports.size()) {
          r.fail(epath, "unknown destination '" + a[1].get<std::string>() + "'");
        } else {
          inst.arcs.push_back({i, d});
        }
      }
    }
  }
  // Grids cannot be sized until the sets and arcs are known.
  if (r.errors.size() > before) return inst;

  const std::vector<Arc> given = inst.arcs;
  allocate_parameters(inst);
  if (inst.arcs != given) r.fail(Reader::join(path, "arcs"), "must be sorted by origin, then destination, without repeats");

  ParameterSet& p = inst.params;
  for (const char* key : {"load_time_hours", "unload_time_hours", "mean_lock_delay_hours"}) {
    const json* v = r.field(j, path, key);
    if (v == nullptr) continue;
    const double x = r.number(*v, Reader::join(path, key));
    if (std::string(key) == "load_time_hours") p.load_time_hours = x;
    else if (std::string(key) == "unload_time_hours") p.unload_time_hours = x;
    else p.mean_lock_delay_hours = x;
  }
  for_each_grid(p, [&](const char* key, auto& g, bool required) {
    r.grid(r.field(j, path, key, required), Reader::join(path, key), g);
  });
  return inst;
}

json instance_json(const NetworkInstance& inst) {
  json j;
  j["origin_ports"] = inst.origin_ports;
  j["destination_ports"] = inst.destination_ports;
  j["commodities"] = inst.commodities;
  j["barges"] = inst.barges;
  j["towboats"] = inst.towboats;
  j["num_periods"] = inst.num_periods;
  json arcs = json::array();
  for (const Arc& a : inst.arcs) {
    arcs.push_back({inst.origin_ports[a.origin], inst.destination_ports[a.destination]});
  }
  j["arcs"] = arcs;
  j["load_time_hours"] = inst.params.load_time_hours;
  j["unload_time_hours"] = inst.params.unload_time_hours;
  j["mean_lock_delay_hours"] = inst.params.mean_lock_delay_hours;
  ParameterSet p = inst.params;
  for_each_grid(p, [&](const char* key, auto& g, bool) { j[key] = grid_json(g); });
  return j;
}

Scenario read_atom(Reader& r, const NetworkInstance& inst, const json& a,
                   const std::string& path, double& probability) {
  Scenario s = make_scenario(inst);
  r.check_keys(a, path,
               {"probability", "supply_tons", "origin_channel_cap_tons",
                "dest_channel_cap_tons", "waterway_cap_tons"});
  if (const json* p = r.field(a, path, "probability")) {
    probability = r.number(*p, Reader::join(path, "probability"));
  }
  r.grid(r.field(a, path, "supply_tons"), Reader::join(path, "supply_tons"), s.supply);
  r.grid(r.field(a, path, "origin_channel_cap_tons"),
         Reader::join(path, "origin_channel_cap_tons"), s.origin_channel_cap);
  r.grid(r.field(a, path, "dest_channel_cap_tons"),
         Reader::join(path, "dest_channel_cap_tons"), s.dest_channel_cap);
  r.grid(r.field(a, path, "waterway_cap_tons"), Reader::join(path, "waterway_cap_tons"),
         s.waterway_cap);
  return s;
}

template <std::size_t R>
void read_laws(Reader& r, const json* j, const std::string& path,
               Grid<R, TruncatedNormal>& laws) {
  if (!r.object(j, path)) return;
  r.check_keys(*j, path, {"mean", "stdev", "lower", "upper"});
  Grid<R> mean(laws.dims()), stdev(laws.dims()), lower(laws.dims()), upper(laws.dims());
  r.grid(r.field(*j, path, "mean"), Reader::join(path, "mean"), mean);
  r.grid(r.field(*j, path, "stdev"), Reader::join(path, "stdev"), stdev);
  r.grid(r.field(*j, path, "lower"), Reader::join(path, "lower"), lower);
  r.grid(r.field(*j, path, "upper"), Reader::join(path, "upper"), upper);
  for (std::size_t k = 0; k < laws.size(); ++k) {
    laws.values()[k] = {mean.values()[k], stdev.values()[k], lower.values()[k],
                        upper.values()[k]};
  }
}

template <std::size_t R>
json laws_json(const Grid<R, TruncatedNormal>& laws) {
  Grid<R> mean(laws.dims()), stdev(laws.dims()), lower(laws.dims()), upper(laws.dims());
  for (std::size_t k = 0; k < laws.size(); ++k) {
    const TruncatedNormal& l = laws.values()[k];
    mean.values()[k] = l.mean;
    stdev.values()[k] = l.stdev;
    lower.values()[k] = l.lower;
    upper.values()[k] = l.upper;
  }
  return {{"mean", grid_json(mean)},
          {"stdev", grid_json(stdev)},
          {"lower", grid_json(lower)},
          {"upper", grid_json(upper)}};
}

StochasticSpec read_spec(Reader& r, const NetworkInstance& inst, const json& j,
                         const std::string& path) {
  const json* kind = r.field(j, path, "kind");
  if (kind == nullptr) return {};
  if (!kind->is_string()) {
    r.fail(Reader::join(path, "kind"), "expected \"discrete\" or \"truncated_normal\"");
    return {};
  }
  if (kind->get<std::string>() == "discrete") {
    r.check_keys(j, path, {"kind", "atoms"});
    ScenarioSet atoms;
    const json* list = r.field(j, path, "atoms");
    if (list != nullptr && !list->is_array()) r.fail(Reader::join(path, "atoms"), "expected an array");
    if (list != nullptr && list->is_array()) {
      for (std::size_t k = 0; k < list->size(); ++k) {
        const std::string apath = Reader::join(path, "atoms") + "[" + std::to_string(k) + "]";
        if (!(*list)[k].is_object()) {
          r.fail(apath, "expected an object");
          continue;
        }
        double prob = 0.0;
        atoms.scenarios.push_back(read_atom(r, inst, (*list)[k], apath, prob));
        atoms.probabilities.push_back(prob);
      }
    }
    return make_discrete_spec(std::move(atoms));
  }
  if (kind->get<std::string>() == "truncated_normal") {
    r.check_keys(j, path,
                 {"kind", "supply_tons", "waterway_cap_tons", "origin_channel_multiplier",
                  "dest_channel_multiplier"});
    StochasticSpec spec = make_truncated_normal_spec(inst);
    read_laws(r, r.field(j, path, "supply_tons"), Reader::join(path, "supply_tons"), spec.supply);
    read_laws(r, r.field(j, path, "waterway_cap_tons"), Reader::join(path, "waterway_cap_tons"),
              spec.waterway);
    if (const json* m = r.field(j, path, "origin_channel_multiplier", false)) {
      spec.origin_channel_multiplier = r.number(*m, Reader::join(path, "origin_channel_multiplier"));
    }
    if (const json* m = r.field(j, path, "dest_channel_multiplier", false)) {
      spec.dest_channel_multiplier = r.number(*m, Reader::join(path, "dest_channel_multiplier"));
    }
    return spec;
  }
  r.fail(Reader::join(path, "kind"), "expected \"discrete\" or \"truncated_normal\"");
  return {};
}

json spec_json(const StochasticSpec& spec) {
  json j;
  if (spec.kind == StochasticSpec::Kind::kDiscrete) {
    j["kind"] = "discrete";
    json atoms = json::array();
    for (std::size_t k = 0; k < spec.atoms.size(); ++k) {
      const Scenario& s = spec.atoms.scenarios[k];
      atoms.push_back({{"probability", spec.atoms.probabilities[k]},
                       {"supply_tons", grid_json(s.supply)},
                       {"origin_channel_cap_tons", grid_json(s.origin_channel_cap)},
                       {"dest_channel_cap_tons", grid_json(s.dest_channel_cap)},
                       {"waterway_cap_tons", grid_json(s.waterway_cap)}});
    }
    j["atoms"] = atoms;
  } else {
    j["kind"] = "truncated_normal";
    j["supply_tons"] = laws_json(spec.supply);
    j["waterway_cap_tons"] = laws_json(spec.waterway);
    j["origin_channel_multiplier"] = spec.origin_channel_multiplier;
    j["dest_channel_multiplier"] = spec.dest_channel_multiplier;
  }
  return j;
}

RunConfig read_run(Reader& r, const json* j) {
  RunConfig run;
  if (j == nullptr) return run;
  if (!r.object(j, "run")) return run;
  r.check_keys(*j, "run",
               {"solver", "factors", "output_dir", "seed", "workers", "sample_size",
                "tolerance", "replications", "evaluation_size"});
  if (const json* v = r.field(*j, "run", "solver", false)) {
    if (!v->is_string()) {
      r.fail("run.solver", "expected a string");
    } else {
      try {
        run.solver = parse_run_solver(v->get<std::string>());
      } catch (const InvalidInput& e) {
        r.fail("run.solver", e.what());
      }
    }
  }
  if (const json* v = r.field(*j, "run", "factors", false)) {
    run.factors.clear();
    if (!v->is_array()) r.fail("run.factors", "expected an array of numbers");
    else for (const json& f : *v) run.factors.push_back(r.number(f, "run.factors"));
  }
  if (const json* v = r.field(*j, "run", "output_dir", false)) {
    if (v->is_string()) run.output_dir = v->get<std::string>();
    else r.fail("run.output_dir", "expected a string");
  }
  if (const json* v = r.field(*j, "run", "seed", false)) run.seed = r.count(*v, "run.seed");
  if (const json* v = r.field(*j, "run", "workers", false)) run.workers = r.count(*v, "run.workers");
  if (const json* v = r.field(*j, "run", "sample_size", false)) {
    run.sample_size = r.count(*v, "run.sample_size");
  }
  if (const json* v = r.field(*j, "run", "replications", false)) {
    run.replications = r.count(*v, "run.replications");
  }
  if (const json* v = r.field(*j, "run", "evaluation_size", false)) {
    run.evaluation_size = r.count(*v, "run.evaluation_size");
  }
  if (const json* v = r.field(*j, "run", "tolerance", false)) {
    run.tolerance = r.number(*v, "run.tolerance");
  }
  return run;
}

std::string location(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t k = 0; k < byte && k < text.size(); ++k) {
    if (text[k] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

json parse(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // e.byte points one past the offending character.
    const std::size_t at = e.byte > 0 ? e.byte - 1 : 0;
    throw InvalidInput(what + ": parse error at " + location(text, at));
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("cannot read " + path.string());
  return buf.str();
}

std::string joined(const std::vector<std::string>& lines) {
  std::string out;
  for (const std::string& l : lines) out += (out.empty() ? "" : "\n") + l;
  return out;
}

}  // namespace

Ingested ingest_text(const std::string& text, const std::filesystem::path& base_dir) {
  const json root = parse(text, "config");
  if (!root.is_object()) throw InvalidInput("config: expected an object at the top level");
  Reader r;
  r.check_keys(root, "", {"instance", "stochastic", "run"});
  Ingested out;
  out.run = read_run(r, r.field(root, "", "run", false));

  const json* inst = r.field(root, "", "instance");
  json loaded;
  if (inst != nullptr && inst->is_string()) {
    std::filesystem::path p = inst->get<std::string>();
    if (p.is_relative()) p = base_dir / p;
    out.run.instance_path = p;
    loaded = parse(read_file(p), p.string());
    inst = &loaded;
  }
  if (r.object(inst, "instance")) out.instance = read_instance(r, *inst, "instance");
  if (!r.errors.empty()) throw InvalidInput(joined(r.errors));

  const json* sto = r.field(root, "", "stochastic");
  if (r.object(sto, "stochastic")) out.spec = read_spec(r, out.instance, *sto, "stochastic");
  if (!r.errors.empty()) throw InvalidInput(joined(r.errors));
  out.spec.seed = out.run.seed;

  std::vector<std::string> problems;
  for (const ValidationReport& rep :
       {validate(out.instance), validate(out.instance, out.spec), validate(out.run)}) {
    for (const Violation& v : rep.violations) problems.push_back(v.field + ": " + v.message);
  }
  if (!problems.empty()) throw InvalidInput(joined(problems));
  return out;
}

Ingested ingest(const std::filesystem::path& config_path) {
  return ingest_text(read_file(config_path), config_path.parent_path());
}

std::string to_json(const NetworkInstance& instance, const StochasticSpec& spec,
                    const RunConfig& run) {
  json root;
  root["instance"] = instance_json(instance);
  root["stochastic"] = spec_json(spec);
  root["run"] = {{"solver", to_string(run.solver)},
                 {"factors", run.factors},
                 {"output_dir", run.output_dir.string()},
                 {"seed", run.seed},
                 {"workers", run.workers},
                 {"sample_size", run.sample_size},
                 {"tolerance", run.tolerance},
                 {"replications", run.replications},
                 {"evaluation_size", run.evaluation_size}};
  return root.dump(2) + "\n";
}

ScenarioSet run_scenarios(const NetworkInstance& instance, const StochasticSpec& spec,
                          const RunConfig& run) {
  if (spec.kind == StochasticSpec::Kind::kDiscrete) return spec.atoms;
  ScenarioSet merged =
      collapse_duplicates(sample_scenarios(instance, spec, run.sample_size, run.seed));
  const double n = static_cast<double>(run.sample_size);
  for (double& p : merged.probabilities) p = std::round(p * n) / n;
  return merged;
}

SaaConfig saa_config(const RunConfig& run) {
  SaaConfig cfg;
  cfg.replications = run.replications;
  cfg.sample_size = run.sample_size;
  cfg.evaluation_size = run.evaluation_size;
  cfg.seed = run.seed;
  cfg.workers = run.workers;
  cfg.tolerance = run.tolerance;
  return cfg;
}

}  // namespace bargeflow
