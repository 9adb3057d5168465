#include "bargeflow/extensive_form.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "bargeflow/error.hpp"

namespace bargeflow {

VariableIndex::VariableIndex(const NetworkInstance& instance,
                             std::size_t num_scenarios)
    : M_(instance.num_commodities()),
      I_(instance.num_origins()),
      J_(instance.num_destinations()),
      P_(instance.num_ports()),
      B_(instance.num_barges()),
      S_(instance.num_towboats()),
      A_(instance.num_arcs()),
      T_(instance.num_periods),
      num_scenarios_(num_scenarios) {
  num_tow_ = S_ * A_ * T_;
  num_barge_ = M_ * B_ * S_ * A_ * T_;
  num_flow_ = num_barge_;
  num_processed_ = M_ * I_ * T_;
  num_stored_ = M_ * P_ * T_;
  num_shortage_ = M_ * J_ * T_;
  block_size_ = num_flow_ + num_processed_ + num_stored_ + num_shortage_;
  // Guard against size_t overflow in the flat layout.
  const long double total =
      static_cast<long double>(num_tow_ + num_barge_) +
      static_cast<long double>(num_scenarios) * block_size_;
  if (total > static_cast<long double>(std::numeric_limits<std::size_t>::max() / 2)) {
    throw InvalidInput("model index space overflows");
  }
}

std::size_t VariableIndex::check(std::size_t value, std::size_t limit) const {
  if (value >= limit) throw InvalidInput("variable index out of range");
  return value;
}

std::size_t VariableIndex::tow(std::size_t s, std::size_t arc,
                               std::size_t t) const {
  return (check(s, S_) * A_ + check(arc, A_)) * T_ + check(t, T_);
}

std::size_t VariableIndex::barge(std::size_t m, std::size_t b, std::size_t s,
                                 std::size_t arc, std::size_t t) const {
  return num_tow_ +
         (((check(m, M_) * B_ + check(b, B_)) * S_ + check(s, S_)) * A_ +
          check(arc, A_)) * T_ +
         check(t, T_);
}

std::size_t VariableIndex::flow(std::size_t m, std::size_t b, std::size_t s,
                                std::size_t arc, std::size_t t,
                                std::size_t w) const {
  return scenario_offset(check(w, num_scenarios_)) +
         (barge(m, b, s, arc, t) - num_tow_);
}

std::size_t VariableIndex::processed(std::size_t m, std::size_t i,
                                     std::size_t t, std::size_t w) const {
  return scenario_offset(check(w, num_scenarios_)) + num_flow_ +
         (check(m, M_) * I_ + check(i, I_)) * T_ + check(t, T_);
}

std::size_t VariableIndex::stored(std::size_t m, std::size_t port,
                                  std::size_t t, std::size_t w) const {
  return scenario_offset(check(w, num_scenarios_)) + num_flow_ +
         num_processed_ + (check(m, M_) * P_ + check(port, P_)) * T_ +
         check(t, T_);
}

std::size_t VariableIndex::shortage(std::size_t m, std::size_t j,
                                    std::size_t t, std::size_t w) const {
  return scenario_offset(check(w, num_scenarios_)) + num_flow_ +
         num_processed_ + num_stored_ +
         (check(m, M_) * J_ + check(j, J_)) * T_ + check(t, T_);
}

std::size_t VariableIndex::encode(const VarKey& k) const {
  switch (k.kind) {
    case VarKind::kTow:
      return tow(k.towboat, k.arc, k.period);
    case VarKind::kBarge:
      return barge(k.commodity, k.barge, k.towboat, k.arc, k.period);
    case VarKind::kFlow:
      return flow(k.commodity, k.barge, k.towboat, k.arc, k.period,
                  k.scenario);
    case VarKind::kProcessed:
      return processed(k.commodity, k.port, k.period, k.scenario);
    case VarKind::kStored:
      return stored(k.commodity, k.port, k.period, k.scenario);
    case VarKind::kShortage:
      return shortage(k.commodity, k.port, k.period, k.scenario);
  }
  throw InvalidInput("unknown variable kind");
}

VarKey VariableIndex::decode(std::size_t id) const {
  check(id, num_vars());
  VarKey key;
  auto split_barge = [&](std::size_t rest) {
    key.period = rest % T_;
    rest /= T_;
    key.arc = rest % A_;
    rest /= A_;
    key.towboat = rest % S_;
    rest /= S_;
    key.barge = rest % B_;
    key.commodity = rest / B_;
  };
  if (id < num_tow_) {
    key.kind = VarKind::kTow;
    key.period = id % T_;
    key.arc = (id / T_) % A_;
    key.towboat = id / (T_ * A_);
    return key;
  }
  if (id < num_first_stage()) {
    key.kind = VarKind::kBarge;
    split_barge(id - num_tow_);
    return key;
  }
  const std::size_t local = (id - num_first_stage()) % block_size_;
  key.scenario = (id - num_first_stage()) / block_size_;
  if (local < num_flow_) {
    key.kind = VarKind::kFlow;
    split_barge(local);
    return key;
  }
  std::size_t rest = local - num_flow_;
  std::size_t ports = I_;
  if (rest < num_processed_) {
    key.kind = VarKind::kProcessed;
  } else if ((rest -= num_processed_) < num_stored_) {
    key.kind = VarKind::kStored;
    ports = P_;
  } else {
    rest -= num_stored_;
    key.kind = VarKind::kShortage;
    ports = J_;
  }
  key.period = rest % T_;
  key.port = (rest / T_) % ports;
  key.commodity = rest / (T_ * ports);
  return key;
}

namespace {

constexpr double kTimeSlack = 1e-9;

double travel_hours(const NetworkInstance& inst, std::size_t s,
                    std::size_t arc, std::size_t t) {
  const ParameterSet& p = inst.params;
  return p.distance_miles(arc) / p.tow_speed_mph(s, t) +
         p.mean_lock_delay_hours * p.lock_count(arc);
}

// Upper bounds on the binaries implied by the first-stage rows and the data.
double tow_upper(const NetworkInstance& inst, std::size_t s, std::size_t arc,
                 std::size_t t) {
  const ParameterSet& p = inst.params;
  const std::size_t i = inst.arcs[arc].origin;
  if (p.tow_avail(s, i, t) < 1.0) return 0.0;
  if (p.port_tow_limit(i, t) < 1.0) return 0.0;
  if (travel_hours(inst, s, arc, t) > p.travel_window_hours(arc) + kTimeSlack) {
    return 0.0;
  }
  return 1.0;
}

double barge_upper(const NetworkInstance& inst, std::size_t b, std::size_t s,
                   std::size_t arc, std::size_t t) {
  const ParameterSet& p = inst.params;
  const std::size_t i = inst.arcs[arc].origin;
  if (tow_upper(inst, s, arc, t) == 0.0) return 0.0;
  if (p.barge_avail(b, i, t) < 1.0) return 0.0;
  if (p.port_barge_limit(i, t) < 1.0) return 0.0;
  if (p.tow_max_barges(s) < 1.0) return 0.0;
  if (p.load_time_hours + p.unload_time_hours + travel_hours(inst, s, arc, t) >
      p.travel_window_hours(arc) + kTimeSlack) {
    return 0.0;
  }
  return 1.0;
}

// True if destination j still demands commodity m in some period >= t.
bool demanded_later(const NetworkInstance& inst, std::size_t m, std::size_t j,
                    std::size_t t) {
  for (std::size_t u = t; u < inst.num_periods; ++u) {
    if (inst.params.demand(m, j, u) > 0.0) return true;
  }
  return false;
}

// A barge carrying a commodity nobody will ask for at the arc's destination
// only adds cost. Its use can be dropped, or swapped for a demanded commodity
// with no larger handling cost when the towboat needs the barge count.
bool useless_load(const NetworkInstance& inst, std::size_t m, std::size_t b,
                  std::size_t s, std::size_t arc, std::size_t t) {
  const std::size_t j = inst.arcs[arc].destination;
  if (demanded_later(inst, m, j, t)) return false;
  bool any_useful = false;
  for (std::size_t k = 0; k < inst.num_commodities(); ++k) {
    if (!demanded_later(inst, k, j, t)) continue;
    any_useful = true;
    if (inst.params.barge_handling_cost(k, b, t) <= inst.params.barge_handling_cost(m, b, t)) {
      return true;
    }
  }
  return !any_useful || inst.params.tow_min_barges(s) <= 0.0;
}

double load_upper(const NetworkInstance& inst, std::size_t m, std::size_t b,
                  std::size_t s, std::size_t arc, std::size_t t) {
  if (useless_load(inst, m, b, s, arc, t)) return 0.0;
  return barge_upper(inst, b, s, arc, t);
}

}  // namespace

std::vector<double> first_stage_costs(const NetworkInstance& instance,
                                      const VariableIndex& index) {
  const ParameterSet& p = instance.params;
  std::vector<double> cost(index.num_first_stage(), 0.0);
  for (std::size_t s = 0; s < instance.num_towboats(); ++s) {
    for (std::size_t a = 0; a < instance.num_arcs(); ++a) {
      for (std::size_t t = 0; t < instance.num_periods; ++t) {
        cost[index.tow(s, a, t)] = p.towboat_fixed_cost(s, t);
        for (std::size_t m = 0; m < instance.num_commodities(); ++m) {
          for (std::size_t b = 0; b < instance.num_barges(); ++b) {
            cost[index.barge(m, b, s, a, t)] = p.barge_handling_cost(m, b, t);
          }
        }
      }
    }
  }
  return cost;
}

namespace {

void check_buildable(const NetworkInstance& instance) {
  if (const ValidationReport report = validate(instance); !report.ok()) {
    throw InvalidInput("invalid instance: " + report.to_string());
  }
}

void append_first_stage(const NetworkInstance& inst, const VariableIndex& index,
                        const BuildOptions& options, MilpModel& model,
                        std::vector<RowFamily>& family) {
  const ParameterSet& p = inst.params;
  const std::size_t M = inst.num_commodities();
  const std::size_t B = inst.num_barges();
  const std::size_t S = inst.num_towboats();
  const std::size_t A = inst.num_arcs();
  const std::size_t T = inst.num_periods;
  const std::size_t I = inst.num_origins();
  StandardFormLP& lp = model.lp;

  const std::vector<double> cost = first_stage_costs(inst, index);
  for (std::size_t id = 0; id < index.num_first_stage(); ++id) {
    double upper = 1.0;
    if (options.implied_bounds) {
      const VarKey key = index.decode(id);
      upper = key.kind == VarKind::kTow
                  ? tow_upper(inst, key.towboat, key.arc, key.period)
                  : load_upper(inst, key.commodity, key.barge, key.towboat,
                               key.arc, key.period);
    }
    lp.add_col(cost[id], 0.0, upper);
    model.is_integer.push_back(1);
  }

  auto row = [&](RowSense sense, double rhs, RowFamily fam) {
    family.push_back(fam);
    return lp.add_row(sense, rhs);
  };

  for (std::size_t b = 0; b < B; ++b) {
    for (std::size_t s = 0; s < S; ++s) {
      for (std::size_t a = 0; a < A; ++a) {
        for (std::size_t t = 0; t < T; ++t) {
          const std::size_t r = row(RowSense::kLessEqual, 1.0, RowFamily::kOneCommodity);
          for (std::size_t m = 0; m < M; ++m) lp.set(r, index.barge(m, b, s, a, t), 1.0);
        }
      }
    }
  }
  for (std::size_t s = 0; s < S; ++s) {
    for (std::size_t a = 0; a < A; ++a) {
      for (std::size_t t = 0; t < T; ++t) {
        const std::size_t lower = row(RowSense::kGreaterEqual, 0.0, RowFamily::kTowLoad);
        const std::size_t upper = row(RowSense::kLessEqual, 0.0, RowFamily::kTowLoad);
        for (std::size_t m = 0; m < M; ++m) {
          for (std::size_t b = 0; b < B; ++b) {
            lp.set(lower, index.barge(m, b, s, a, t), 1.0);
            lp.set(upper, index.barge(m, b, s, a, t), 1.0);
          }
        }
        lp.set(lower, index.tow(s, a, t), -p.tow_min_barges(s));
        lp.set(upper, index.tow(s, a, t), -p.tow_max_barges(s));
      }
    }
  }
  for (std::size_t i = 0; i < I; ++i) {
    const std::vector<std::size_t> out_arcs = inst.arcs_from(i);
    for (std::size_t t = 0; t < T; ++t) {
      const std::size_t r = row(RowSense::kLessEqual, p.port_barge_limit(i, t), RowFamily::kPortBarges);
      for (std::size_t m = 0; m < M; ++m) {
        for (std::size_t b = 0; b < B; ++b) {
          for (std::size_t s = 0; s < S; ++s) {
            for (std::size_t a : out_arcs) lp.set(r, index.barge(m, b, s, a, t), 1.0);
          }
        }
      }
    }
    for (std::size_t t = 0; t < T; ++t) {
      const std::size_t r = row(RowSense::kLessEqual, p.port_tow_limit(i, t), RowFamily::kPortTows);
      for (std::size_t a : out_arcs) {
        for (std::size_t s = 0; s < S; ++s) lp.set(r, index.tow(s, a, t), 1.0);
      }
    }
  }
  for (std::size_t b = 0; b < B; ++b) {
    for (std::size_t a = 0; a < A; ++a) {
      for (std::size_t t = 0; t < T; ++t) {
        const std::size_t r = row(RowSense::kLessEqual,
                                  p.barge_avail(b, inst.arcs[a].origin, t),
                                  RowFamily::kBargeAvail);
        for (std::size_t m = 0; m < M; ++m) {
          for (std::size_t s = 0; s < S; ++s) lp.set(r, index.barge(m, b, s, a, t), 1.0);
        }
      }
    }
  }
  for (std::size_t s = 0; s < S; ++s) {
    for (std::size_t i = 0; i < I; ++i) {
      const std::vector<std::size_t> out_arcs = inst.arcs_from(i);
      for (std::size_t t = 0; t < T; ++t) {
        const std::size_t r = row(RowSense::kLessEqual, p.tow_avail(s, i, t), RowFamily::kTowAvail);
        for (std::size_t a : out_arcs) lp.set(r, index.tow(s, a, t), 1.0);
      }
    }
  }
  const double handling = p.load_time_hours + p.unload_time_hours;
  for (std::size_t s = 0; s < S; ++s) {
    for (std::size_t a = 0; a < A; ++a) {
      for (std::size_t t = 0; t < T; ++t) {
        const std::size_t r =
            row(RowSense::kLessEqual, p.travel_window_hours(a), RowFamily::kTravelTime);
        for (std::size_t m = 0; m < M; ++m) {
          for (std::size_t b = 0; b < B; ++b) {
            lp.set(r, index.barge(m, b, s, a, t), handling);
          }
        }
        lp.set(r, index.tow(s, a, t), travel_hours(inst, s, a, t));
      }
    }
  }
}

}  // namespace

ExtensiveForm build_first_stage(const NetworkInstance& instance,
                                const BuildOptions& options) {
  check_buildable(instance);
  ExtensiveForm out;
  out.index = VariableIndex(instance, 0);
  append_first_stage(instance, out.index, options, out.model, out.row_family);
  return out;
}

RecourseLp build_recourse(const NetworkInstance& inst,
                          const Scenario& scenario,
                          const BuildOptions& options) {
  const ParameterSet& p = inst.params;
  const std::size_t M = inst.num_commodities();
  const std::size_t B = inst.num_barges();
  const std::size_t S = inst.num_towboats();
  const std::size_t A = inst.num_arcs();
  const std::size_t T = inst.num_periods;
  const std::size_t I = inst.num_origins();
  const std::size_t J = inst.num_destinations();
  const std::size_t P = inst.num_ports();

  // Local layout of one scenario block, scenario 0 of a one-scenario index.
  const VariableIndex index(inst, 1);
  const std::size_t base = index.scenario_offset(0);
  auto local = [base](std::size_t id) { return id - base; };

  RecourseLp out;
  StandardFormLP& lp = out.lp;
  for (std::size_t k = 0; k < index.block_size(); ++k) lp.add_col(0.0, 0.0, kInfinity);

  for (std::size_t m = 0; m < M; ++m) {
    const double density_volume_coef = p.commodity_density(m);
    for (std::size_t b = 0; b < B; ++b) {
      const double volume_cap = density_volume_coef * p.barge_volume_cap(b);
      for (std::size_t s = 0; s < S; ++s) {
        for (std::size_t a = 0; a < A; ++a) {
          for (std::size_t t = 0; t < T; ++t) {
            const std::size_t x = local(index.flow(m, b, s, a, t, 0));
            lp.objective[x] = p.transport_cost(m, b, s, a, t);
            if (options.implied_bounds) {
              const double weight_cap = std::min(
                  effective_cap(inst, scenario, a, t), p.barge_weight_cap(b));
              lp.upper[x] = load_upper(inst, m, b, s, a, t) *
                            std::min(weight_cap, volume_cap);
            }
          }
        }
      }
    }
    for (std::size_t i = 0; i < I; ++i) {
      for (std::size_t t = 0; t < T; ++t) {
        const std::size_t z = local(index.processed(m, i, t, 0));
        lp.objective[z] = p.procurement_cost(m, i, t);
        if (options.implied_bounds) lp.upper[z] = scenario.supply(m, i, t);
      }
    }
    for (std::size_t port = 0; port < P; ++port) {
      for (std::size_t t = 0; t < T; ++t) {
        const std::size_t h = local(index.stored(m, port, t, 0));
        lp.objective[h] = p.holding_cost(m, port, t);
        if (options.implied_bounds) lp.upper[h] = p.storage_cap(port);
      }
    }
    for (std::size_t j = 0; j < J; ++j) {
      for (std::size_t t = 0; t < T; ++t) {
        lp.objective[local(index.shortage(m, j, t, 0))] =
            p.shortage_penalty(m, j, t);
      }
    }
  }

  auto row = [&](RowSense sense, double rhs, RowFamily fam) {
    out.row_family.push_back(fam);
    return lp.add_row(sense, rhs);
  };

  for (std::size_t m = 0; m < M; ++m) {
    for (std::size_t i = 0; i < I; ++i) {
      for (std::size_t t = 0; t < T; ++t) {
        const std::size_t r = row(RowSense::kLessEqual, scenario.supply(m, i, t), RowFamily::kSupply);
        lp.set(r, local(index.processed(m, i, t, 0)), 1.0);
      }
    }
  }
  // Origins: Z + (1-a) H[t-1] - sum X - H[t] = 0.
  for (std::size_t m = 0; m < M; ++m) {
    const double keep = 1.0 - p.deterioration_rate(m);
    for (std::size_t i = 0; i < I; ++i) {
      const std::vector<std::size_t> out_arcs = inst.arcs_from(i);
      for (std::size_t t = 0; t < T; ++t) {
        const double carried = t == 0 ? keep * p.initial_inventory(m, i) : 0.0;
        const std::size_t r = row(RowSense::kEqual, -carried, RowFamily::kOriginBalance);
        lp.set(r, local(index.processed(m, i, t, 0)), 1.0);
        if (t > 0) lp.set(r, local(index.stored(m, i, t - 1, 0)), keep);
        lp.set(r, local(index.stored(m, i, t, 0)), -1.0);
        for (std::size_t b = 0; b < B; ++b) {
          for (std::size_t s = 0; s < S; ++s) {
            for (std::size_t a : out_arcs) {
              lp.set(r, local(index.flow(m, b, s, a, t, 0)), -1.0);
            }
          }
        }
      }
    }
  }
  // Destinations: sum X + (1-a) H[t-1] - H[t] + U = d.
  for (std::size_t m = 0; m < M; ++m) {
    const double keep = 1.0 - p.deterioration_rate(m);
    for (std::size_t j = 0; j < J; ++j) {
      const std::size_t port = inst.destination_port(j);
      const std::vector<std::size_t> in_arcs = inst.arcs_into(j);
      for (std::size_t t = 0; t < T; ++t) {
        const double carried =
            t == 0 ? keep * p.initial_inventory(m, port) : 0.0;
        const std::size_t r = row(RowSense::kEqual, p.demand(m, j, t) - carried,
                                  RowFamily::kDestBalance);
        for (std::size_t b = 0; b < B; ++b) {
          for (std::size_t s = 0; s < S; ++s) {
            for (std::size_t a : in_arcs) {
              lp.set(r, local(index.flow(m, b, s, a, t, 0)), 1.0);
            }
          }
        }
        if (t > 0) lp.set(r, local(index.stored(m, port, t - 1, 0)), keep);
        lp.set(r, local(index.stored(m, port, t, 0)), -1.0);
        lp.set(r, local(index.shortage(m, j, t, 0)), 1.0);
      }
    }
  }
  for (std::size_t port = 0; port < P; ++port) {
    for (std::size_t t = 0; t < T; ++t) {
      const std::size_t r = row(RowSense::kLessEqual, p.storage_cap(port), RowFamily::kStorage);
      for (std::size_t m = 0; m < M; ++m) lp.set(r, local(index.stored(m, port, t, 0)), 1.0);
    }
  }
  for (std::size_t m = 0; m < M; ++m) {
    for (std::size_t b = 0; b < B; ++b) {
      for (std::size_t s = 0; s < S; ++s) {
        for (std::size_t a = 0; a < A; ++a) {
          for (std::size_t t = 0; t < T; ++t) {
            const std::size_t x = local(index.flow(m, b, s, a, t, 0));
            const std::size_t y = index.barge(m, b, s, a, t);
            const double weight_cap = std::min(
                effective_cap(inst, scenario, a, t), p.barge_weight_cap(b));
            const std::size_t r13 = row(RowSense::kLessEqual, 0.0, RowFamily::kWeight);
            lp.set(r13, x, 1.0);
            out.links.push_back({r13, y, -weight_cap});
            const std::size_t r14 = row(RowSense::kLessEqual, 0.0, RowFamily::kVolume);
            lp.set(r14, x, 1.0);
            out.links.push_back(
                {r14, y, -p.commodity_density(m) * p.barge_volume_cap(b)});
          }
        }
      }
    }
  }
  return out;
}

StandardFormLP fix_plan(const RecourseLp& recourse,
                        const std::vector<double>& first_stage) {
  StandardFormLP lp = recourse.lp;
  for (const SparseEntry& link : recourse.links) {
    if (link.col >= first_stage.size()) {
      throw InvalidInput("plan vector shorter than the first stage");
    }
    lp.rhs[link.row] -= link.value * first_stage[link.col];
  }
  return lp;
}

ExtensiveForm build(const NetworkInstance& instance,
                    const ScenarioSet& scenarios,
                    const BuildOptions& options) {
  check_buildable(instance);
  if (const ValidationReport report = validate(instance, scenarios);
      !report.ok()) {
    throw InvalidInput("invalid scenarios: " + report.to_string());
  }
  ExtensiveForm out;
  out.index = VariableIndex(instance, scenarios.size());
  append_first_stage(instance, out.index, options, out.model, out.row_family);

  StandardFormLP& lp = out.model.lp;
  for (std::size_t w = 0; w < scenarios.size(); ++w) {
    const double weight = scenarios.probabilities[w];
    const RecourseLp block =
        build_recourse(instance, scenarios.scenarios[w], options);
    const std::size_t col_base = out.index.scenario_offset(w);
    const std::size_t row_base = lp.num_rows();
    for (std::size_t k = 0; k < block.lp.num_cols(); ++k) {
      lp.add_col(weight * block.lp.objective[k], block.lp.lower[k],
                 block.lp.upper[k]);
      out.model.is_integer.push_back(0);
    }
    for (std::size_t r = 0; r < block.lp.num_rows(); ++r) {
      lp.add_row(block.lp.sense[r], block.lp.rhs[r]);
      out.row_family.push_back(block.row_family[r]);
    }
    for (const SparseEntry& e : block.lp.entries) {
      lp.set(row_base + e.row, col_base + e.col, e.value);
    }
    for (const SparseEntry& e : block.links) {
      lp.set(row_base + e.row, e.col, e.value);
    }
  }
  return out;
}

std::size_t FirstStagePlan::tow_uses() const {
  std::size_t n = 0;
  for (std::uint8_t v : tow.values()) n += v;
  return n;
}

std::size_t FirstStagePlan::barge_uses() const {
  std::size_t n = 0;
  for (std::uint8_t v : barge.values()) n += v;
  return n;
}

FirstStagePlan empty_plan(const NetworkInstance& inst) {
  FirstStagePlan plan;
  plan.tow = Grid<3, std::uint8_t>(
      {inst.num_towboats(), inst.num_arcs(), inst.num_periods});
  plan.barge = Grid<5, std::uint8_t>({inst.num_commodities(), inst.num_barges(),
                                      inst.num_towboats(), inst.num_arcs(),
                                      inst.num_periods});
  return plan;
}

std::vector<double> to_vector(const FirstStagePlan& plan,
                              const VariableIndex& index) {
  std::vector<double> y(index.num_first_stage(), 0.0);
  const std::size_t tows = index.num_towboat_vars();
  if (plan.tow.size() != tows ||
      plan.barge.size() != index.num_first_stage() - tows) {
    throw InvalidInput("plan does not match the variable index");
  }
  for (std::size_t k = 0; k < tows; ++k) y[k] = plan.tow.values()[k];
  for (std::size_t k = 0; k < plan.barge.size(); ++k) {
    y[tows + k] = plan.barge.values()[k];
  }
  return y;
}

FirstStagePlan plan_from_vector(const NetworkInstance& instance,
                                const VariableIndex& index,
                                const std::vector<double>& values) {
  if (values.size() < index.num_first_stage()) {
    throw InvalidInput("solution vector shorter than the first stage");
  }
  FirstStagePlan plan = empty_plan(instance);
  const std::size_t tows = index.num_towboat_vars();
  for (std::size_t id = 0; id < index.num_first_stage(); ++id) {
    const double v = values[id];
    std::uint8_t bit = 0;
    if (std::abs(v - 1.0) <= 1e-6) {
      bit = 1;
    } else if (std::abs(v) > 1e-6) {
      throw InvalidInput("binary variable " + std::to_string(id) +
                         " is not integral: " + std::to_string(v));
    }
    if (id < tows) {
      plan.tow.values()[id] = bit;
    } else {
      plan.barge.values()[id - tows] = bit;
    }
  }
  return plan;
}

RecourseSolution recourse_from_block(const NetworkInstance& inst,
                                     const std::vector<double>& block) {
  const VariableIndex index(inst, 1);
  if (block.size() != index.block_size()) {
    throw InvalidInput("recourse block has the wrong length");
  }
  const std::size_t M = inst.num_commodities();
  const std::size_t T = inst.num_periods;
  RecourseSolution sol;
  sol.flow = Grid<5>({M, inst.num_barges(), inst.num_towboats(),
                      inst.num_arcs(), T});
  sol.processed = Grid<3>({M, inst.num_origins(), T});
  sol.stored = Grid<3>({M, inst.num_ports(), T});
  sol.shortage = Grid<3>({M, inst.num_destinations(), T});
  std::size_t k = 0;
  for (double& v : sol.flow.values()) v = block[k++];
  for (double& v : sol.processed.values()) v = block[k++];
  for (double& v : sol.stored.values()) v = block[k++];
  for (double& v : sol.shortage.values()) v = block[k++];
  return sol;
}

Extraction extract(const NetworkInstance& instance, const VariableIndex& index,
                   const std::vector<double>& values) {
  if (values.size() != index.num_vars()) {
    throw InvalidInput("solution vector length " + std::to_string(values.size()) +
                       " does not match " + std::to_string(index.num_vars()) +
                       " variables");
  }
  Extraction out;
  out.plan = plan_from_vector(instance, index, values);
  for (std::size_t w = 0; w < index.num_scenarios(); ++w) {
    const auto first = values.begin() +
                       static_cast<std::ptrdiff_t>(index.scenario_offset(w));
    out.recourse.push_back(recourse_from_block(
        instance,
        std::vector<double>(first, first + static_cast<std::ptrdiff_t>(
                                               index.block_size()))));
  }
  return out;
}

CostBreakdown& CostBreakdown::operator+=(const CostBreakdown& o) {
  fixed += o.fixed;
  holding += o.holding;
  transport += o.transport;
  procurement += o.procurement;
  shortage += o.shortage;
  return *this;
}

std::vector<CostBreakdown> period_costs(
    const NetworkInstance& inst, const ScenarioSet& scenarios,
    const FirstStagePlan& plan, const std::vector<RecourseSolution>& recourse) {
  if (recourse.size() != scenarios.size()) {
    throw InvalidInput("one recourse solution per scenario is required");
  }
  const ParameterSet& p = inst.params;
  const std::size_t T = inst.num_periods;
  std::vector<CostBreakdown> out(T);
  for (std::size_t t = 0; t < T; ++t) {
    CostBreakdown& c = out[t];
    for (std::size_t s = 0; s < inst.num_towboats(); ++s) {
      for (std::size_t a = 0; a < inst.num_arcs(); ++a) {
        c.fixed += p.towboat_fixed_cost(s, t) * plan.tow(s, a, t);
        for (std::size_t m = 0; m < inst.num_commodities(); ++m) {
          for (std::size_t b = 0; b < inst.num_barges(); ++b) {
            c.fixed += p.barge_handling_cost(m, b, t) * plan.barge(m, b, s, a, t);
          }
        }
      }
    }
    for (std::size_t w = 0; w < scenarios.size(); ++w) {
      const double rho = scenarios.probabilities[w];
      const RecourseSolution& r = recourse[w];
      for (std::size_t m = 0; m < inst.num_commodities(); ++m) {
        for (std::size_t port = 0; port < inst.num_ports(); ++port) {
          c.holding += rho * p.holding_cost(m, port, t) * r.stored(m, port, t);
        }
        for (std::size_t b = 0; b < inst.num_barges(); ++b) {
          for (std::size_t s = 0; s < inst.num_towboats(); ++s) {
            for (std::size_t a = 0; a < inst.num_arcs(); ++a) {
              c.transport +=
                  rho * p.transport_cost(m, b, s, a, t) * r.flow(m, b, s, a, t);
            }
          }
        }
        for (std::size_t i = 0; i < inst.num_origins(); ++i) {
          c.procurement +=
              rho * p.procurement_cost(m, i, t) * r.processed(m, i, t);
        }
        for (std::size_t j = 0; j < inst.num_destinations(); ++j) {
          c.shortage += rho * p.shortage_penalty(m, j, t) * r.shortage(m, j, t);
        }
      }
    }
  }
  return out;
}

CostBreakdown total_costs(const std::vector<CostBreakdown>& per_period) {
  CostBreakdown sum;
  for (const CostBreakdown& c : per_period) sum += c;
  return sum;
}

}  // namespace bargeflow
