#include "bargeflow/fixtures.hpp"

namespace bargeflow {

Fixture micro_instance_m1() {
  Fixture f;
  NetworkInstance& inst = f.instance;
  inst.origin_ports = {"O1"};
  inst.destination_ports = {"D1"};
  inst.commodities = {"grain"};
  inst.barges = {"B1", "B2"};
  inst.towboats = {"S1"};
  inst.num_periods = 1;
  inst.arcs = {{0, 0}};
  allocate_parameters(inst);

  ParameterSet& p = inst.params;
  p.towboat_fixed_cost(0, 0) = 50.0;
  for (std::size_t b = 0; b < 2; ++b) {
    p.barge_handling_cost(0, b, 0) = 10.0;
    p.transport_cost(0, b, 0, 0, 0) = 1.0;
    p.barge_weight_cap(b) = 60.0;
    p.barge_volume_cap(b) = 120.0;
    p.barge_avail(b, 0, 0) = 1.0;
  }
  p.procurement_cost(0, 0, 0) = 2.0;
  p.holding_cost(0, 0, 0) = 1.0;
  p.holding_cost(0, 1, 0) = 1.0;
  p.shortage_penalty(0, 0, 0) = 20.0;
  p.demand(0, 0, 0) = 80.0;
  p.storage_cap(0) = 1000.0;
  p.storage_cap(1) = 1000.0;
  p.deterioration_rate(0) = 0.0;
  p.tow_min_barges(0) = 1.0;
  p.tow_max_barges(0) = 2.0;
  p.commodity_density(0) = 1.0;
  p.tow_avail(0, 0, 0) = 1.0;
  p.port_barge_limit(0, 0) = 2.0;
  p.port_tow_limit(0, 0) = 1.0;
  p.load_time_hours = 4.0;
  p.unload_time_hours = 4.0;
  p.mean_lock_delay_hours = 1.0;
  p.distance_miles(0) = 100.0;
  p.lock_count(0) = 2.0;
  p.travel_window_hours(0) = 1000.0;
  p.tow_speed_mph(0, 0) = 5.0;

  for (double waterway : {60.0, 30.0}) {
    Scenario s = make_scenario(inst);
    s.supply(0, 0, 0) = 100.0;
    s.origin_channel_cap(0, 0) = 1000.0;
    s.dest_channel_cap(0, 0) = 1000.0;
    s.waterway_cap(0, 0) = waterway;
    f.scenarios.scenarios.push_back(s);
    f.scenarios.probabilities.push_back(0.5);
  }
  return f;
}

}  // namespace bargeflow
