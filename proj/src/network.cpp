#include "bargeflow/network.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <tuple>

namespace bargeflow {

std::optional<std::size_t> NetworkInstance::arc_index(
    std::size_t origin, std::size_t destination) const {
  for (std::size_t a = 0; a < arcs.size(); ++a) {
    if (arcs[a].origin == origin && arcs[a].destination == destination) {
      return a;
    }
  }
  return std::nullopt;
}

std::vector<std::size_t> NetworkInstance::arcs_from(std::size_t origin) const {
  std::vector<std::size_t> out;
  for (std::size_t a = 0; a < arcs.size(); ++a) {
    if (arcs[a].origin == origin) out.push_back(a);
  }
  return out;
}

std::vector<std::size_t> NetworkInstance::arcs_into(
    std::size_t destination) const {
  std::vector<std::size_t> out;
  for (std::size_t a = 0; a < arcs.size(); ++a) {
    if (arcs[a].destination == destination) out.push_back(a);
  }
  return out;
}

void allocate_parameters(NetworkInstance& instance) {
  std::sort(instance.arcs.begin(), instance.arcs.end(),
            [](const Arc& x, const Arc& y) {
              return std::tie(x.origin, x.destination) <
                     std::tie(y.origin, y.destination);
            });
  const std::size_t M = instance.num_commodities();
  const std::size_t I = instance.num_origins();
  const std::size_t J = instance.num_destinations();
  const std::size_t P = instance.num_ports();
  const std::size_t B = instance.num_barges();
  const std::size_t S = instance.num_towboats();
  const std::size_t A = instance.num_arcs();
  const std::size_t T = instance.num_periods;

  ParameterSet& p = instance.params;
  p.towboat_fixed_cost = Grid<2>({S, T});
  p.barge_handling_cost = Grid<3>({M, B, T});
  p.transport_cost = Grid<5>({M, B, S, A, T});
  p.procurement_cost = Grid<3>({M, I, T});
  p.holding_cost = Grid<3>({M, P, T});
  p.shortage_penalty = Grid<3>({M, J, T});
  p.demand = Grid<3>({M, J, T});
  p.storage_cap = Grid<1>({P});
  p.deterioration_rate = Grid<1>({M});
  p.tow_min_barges = Grid<1>({S});
  p.tow_max_barges = Grid<1>({S});
  p.barge_weight_cap = Grid<1>({B});
  p.barge_volume_cap = Grid<1>({B});
  p.commodity_density = Grid<1>({M});
  p.barge_avail = Grid<3>({B, I, T});
  p.tow_avail = Grid<3>({S, I, T});
  p.port_barge_limit = Grid<2>({I, T});
  p.port_tow_limit = Grid<2>({I, T});
  p.distance_miles = Grid<1>({A});
  p.lock_count = Grid<1>({A});
  p.travel_window_hours = Grid<1>({A});
  p.tow_speed_mph = Grid<2>({S, T});
  p.initial_inventory = Grid<2>({M, P});
}

std::string ValidationReport::to_string() const {
  std::ostringstream out;
  for (const Violation& v : violations) {
    out << v.field << ": " << v.message << "\n";
  }
  return out.str();
}

namespace {

class Checker {
 public:
  explicit Checker(ValidationReport& report) : report_(report) {}

  void fail(const std::string& field, const std::string& message) {
    report_.violations.push_back({field, message});
  }

  template <std::size_t Rank>
  bool shape(const std::string& field, const Grid<Rank>& grid,
             const std::array<std::size_t, Rank>& dims) {
    if (grid.dims() != dims) {
      fail(field, "dimensions do not match the instance sets");
      return false;
    }
    return true;
  }

  template <std::size_t Rank>
  void nonnegative(const std::string& field, const Grid<Rank>& grid) {
    for (double v : grid.values()) {
      if (!std::isfinite(v)) {
        fail(field, "value must be finite");
        return;
      }
      if (v < 0.0) {
        fail(field, "value must be nonnegative");
        return;
      }
    }
  }

  template <std::size_t Rank>
  void binary(const std::string& field, const Grid<Rank>& grid) {
    for (double v : grid.values()) {
      if (v != 0.0 && v != 1.0) {
        fail(field, "availability must be 0 or 1");
        return;
      }
    }
  }

 private:
  ValidationReport& report_;
};

}  // namespace

ValidationReport validate(const NetworkInstance& instance) {
  ValidationReport report;
  Checker check(report);

  const std::size_t M = instance.num_commodities();
  const std::size_t I = instance.num_origins();
  const std::size_t J = instance.num_destinations();
  const std::size_t P = instance.num_ports();
  const std::size_t B = instance.num_barges();
  const std::size_t S = instance.num_towboats();
  const std::size_t A = instance.num_arcs();
  const std::size_t T = instance.num_periods;

  if (I == 0) check.fail("origin_ports", "set must be non-empty");
  if (J == 0) check.fail("destination_ports", "set must be non-empty");
  if (M == 0) check.fail("commodities", "set must be non-empty");
  if (B == 0) check.fail("barges", "set must be non-empty");
  if (S == 0) check.fail("towboats", "set must be non-empty");
  if (T == 0) check.fail("periods", "set must be non-empty");
  if (A == 0) check.fail("arcs", "set must be non-empty");
  if (!report.ok()) return report;

  for (std::size_t a = 0; a < A; ++a) {
    const Arc& arc = instance.arcs[a];
    if (arc.origin >= I || arc.destination >= J) {
      check.fail("arcs", "arc references an unknown port");
      return report;
    }
    if (a > 0 && !(std::tie(instance.arcs[a - 1].origin,
                            instance.arcs[a - 1].destination) <
                   std::tie(arc.origin, arc.destination))) {
      check.fail("arcs", "arcs must be unique and sorted by (origin, destination)");
      return report;
    }
  }

  const ParameterSet& p = instance.params;
  bool shaped = true;
  shaped &= check.shape("towboat_fixed_cost", p.towboat_fixed_cost, {S, T});
  shaped &= check.shape("barge_handling_cost", p.barge_handling_cost, {M, B, T});
  shaped &= check.shape("transport_cost", p.transport_cost, {M, B, S, A, T});
  shaped &= check.shape("procurement_cost", p.procurement_cost, {M, I, T});
  shaped &= check.shape("holding_cost", p.holding_cost, {M, P, T});
  shaped &= check.shape("shortage_penalty", p.shortage_penalty, {M, J, T});
  shaped &= check.shape("demand", p.demand, {M, J, T});
  shaped &= check.shape("storage_cap", p.storage_cap, {P});
  shaped &= check.shape("deterioration_rate", p.deterioration_rate, {M});
  shaped &= check.shape("tow_min_barges", p.tow_min_barges, {S});
  shaped &= check.shape("tow_max_barges", p.tow_max_barges, {S});
  shaped &= check.shape("barge_weight_cap", p.barge_weight_cap, {B});
  shaped &= check.shape("barge_volume_cap", p.barge_volume_cap, {B});
  shaped &= check.shape("commodity_density", p.commodity_density, {M});
  shaped &= check.shape("barge_avail", p.barge_avail, {B, I, T});
  shaped &= check.shape("tow_avail", p.tow_avail, {S, I, T});
  shaped &= check.shape("port_barge_limit", p.port_barge_limit, {I, T});
  shaped &= check.shape("port_tow_limit", p.port_tow_limit, {I, T});
  shaped &= check.shape("distance_miles", p.distance_miles, {A});
  shaped &= check.shape("lock_count", p.lock_count, {A});
  shaped &= check.shape("travel_window_hours", p.travel_window_hours, {A});
  shaped &= check.shape("tow_speed_mph", p.tow_speed_mph, {S, T});
  shaped &= check.shape("initial_inventory", p.initial_inventory, {M, P});
  if (!shaped) return report;

  check.nonnegative("towboat_fixed_cost", p.towboat_fixed_cost);
  check.nonnegative("barge_handling_cost", p.barge_handling_cost);
  check.nonnegative("transport_cost", p.transport_cost);
  check.nonnegative("procurement_cost", p.procurement_cost);
  check.nonnegative("holding_cost", p.holding_cost);
  check.nonnegative("shortage_penalty", p.shortage_penalty);
  check.nonnegative("demand", p.demand);
  check.nonnegative("storage_cap", p.storage_cap);
  check.nonnegative("deterioration_rate", p.deterioration_rate);
  check.nonnegative("tow_min_barges", p.tow_min_barges);
  check.nonnegative("tow_max_barges", p.tow_max_barges);
  check.nonnegative("barge_weight_cap", p.barge_weight_cap);
  check.nonnegative("barge_volume_cap", p.barge_volume_cap);
  check.nonnegative("commodity_density", p.commodity_density);
  check.nonnegative("port_barge_limit", p.port_barge_limit);
  check.nonnegative("port_tow_limit", p.port_tow_limit);
  check.nonnegative("distance_miles", p.distance_miles);
  check.nonnegative("lock_count", p.lock_count);
  check.nonnegative("travel_window_hours", p.travel_window_hours);
  check.nonnegative("tow_speed_mph", p.tow_speed_mph);
  check.nonnegative("initial_inventory", p.initial_inventory);
  check.binary("barge_avail", p.barge_avail);
  check.binary("tow_avail", p.tow_avail);

  const double scalars[] = {p.load_time_hours, p.unload_time_hours,
                            p.mean_lock_delay_hours};
  for (double v : scalars) {
    if (!std::isfinite(v) || v < 0.0) {
      check.fail("times", "load, unload and lock delay times must be >= 0");
      break;
    }
  }

  for (std::size_t s = 0; s < S; ++s) {
    if (p.tow_min_barges(s) > p.tow_max_barges(s)) {
      check.fail("towboats." + instance.towboats[s],
                 "tow barge bounds inverted");
    }
    for (std::size_t t = 0; t < T; ++t) {
      if (!(p.tow_speed_mph(s, t) > 0.0)) {
        check.fail("towboats." + instance.towboats[s],
                   "tow speed must be positive");
        break;
      }
    }
  }
  for (std::size_t m = 0; m < M; ++m) {
    if (p.deterioration_rate(m) >= 1.0) {
      check.fail("commodities." + instance.commodities[m],
                 "deterioration rate must be < 1");
    }
  }
  // Keeps the empty recourse feasible: stock on hand must fit in storage.
  const std::string port_names[] = {"origin", "destination"};
  for (std::size_t q = 0; q < instance.num_ports(); ++q) {
    double stock = 0.0;
    for (std::size_t m = 0; m < M; ++m) stock += p.initial_inventory(m, q);
    if (stock > p.storage_cap(q)) {
      const bool origin = q < I;
      check.fail(port_names[origin ? 0 : 1] + "_ports." +
                     (origin ? instance.origin_ports[q]
                             : instance.destination_ports[q - I]),
                 "initial inventory exceeds storage capacity");
    }
  }
  bool any_barge_available = false;
  for (std::size_t b = 0; b < B; ++b) {
    bool ever_available = false;
    for (std::size_t i = 0; i < I; ++i) {
      for (std::size_t t = 0; t < T; ++t) {
        ever_available |= p.barge_avail(b, i, t) == 1.0;
      }
    }
    any_barge_available |= ever_available;
    if (ever_available && !(p.barge_volume_cap(b) > 0.0)) {
      check.fail("barges." + instance.barges[b],
                 "volume capacity must be positive");
    }
  }
  if (any_barge_available) {
    for (std::size_t m = 0; m < M; ++m) {
      if (!(p.commodity_density(m) > 0.0)) {
        check.fail("commodities." + instance.commodities[m],
                   "density must be positive");
      }
    }
  }
  return report;
}

}  // namespace bargeflow
