#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "bargeflow/grid.hpp"

namespace bargeflow {

// Directed origin -> destination waterway link. Indices are dense and 0-based.
struct Arc {
  std::size_t origin = 0;
  std::size_t destination = 0;
  bool operator==(const Arc&) const = default;
};

// Deterministic data of the transportation design model. Port-indexed grids
// (holding cost, storage capacity, initial inventory) use the combined port
// index: origins first, then destinations.
struct ParameterSet {
  Grid<2> towboat_fixed_cost;    // [s][t] currency per use
  Grid<3> barge_handling_cost;   // [m][b][t] currency per use
  Grid<5> transport_cost;        // [m][b][s][arc][t] currency per ton
  Grid<3> procurement_cost;      // [m][i][t] currency per ton
  Grid<3> holding_cost;          // [m][port][t] currency per ton-period
  Grid<3> shortage_penalty;      // [m][j][t] currency per ton
  Grid<3> demand;                // [m][j][t] tons
  Grid<1> storage_cap;           // [port] tons
  Grid<1> deterioration_rate;    // [m] in [0, 1)
  Grid<1> tow_min_barges;        // [s]
  Grid<1> tow_max_barges;        // [s]
  Grid<1> barge_weight_cap;      // [b] tons
  Grid<1> barge_volume_cap;      // [b] volume
  Grid<1> commodity_density;     // [m] tons per volume
  Grid<3> barge_avail;           // [b][i][t] 0/1
  Grid<3> tow_avail;             // [s][i][t] 0/1
  Grid<2> port_barge_limit;      // [i][t]
  Grid<2> port_tow_limit;        // [i][t]
  double load_time_hours = 0.0;
  double unload_time_hours = 0.0;
  double mean_lock_delay_hours = 0.0;
  Grid<1> distance_miles;        // [arc]
  Grid<1> lock_count;            // [arc]
  Grid<1> travel_window_hours;   // [arc]
  Grid<2> tow_speed_mph;         // [s][t]
  Grid<2> initial_inventory;     // [m][port] tons at the start of period 1

  bool operator==(const ParameterSet&) const = default;
};

struct NetworkInstance {
  std::vector<std::string> origin_ports;
  std::vector<std::string> destination_ports;
  std::vector<std::string> commodities;
  std::vector<std::string> barges;
  std::vector<std::string> towboats;
  std::size_t num_periods = 0;
  // Sorted by (origin, destination); the adjacency sets J_i and I_j are read
  // off this list.
  std::vector<Arc> arcs;
  ParameterSet params;

  std::size_t num_origins() const { return origin_ports.size(); }
  std::size_t num_destinations() const { return destination_ports.size(); }
  std::size_t num_ports() const { return num_origins() + num_destinations(); }
  std::size_t num_commodities() const { return commodities.size(); }
  std::size_t num_barges() const { return barges.size(); }
  std::size_t num_towboats() const { return towboats.size(); }
  std::size_t num_arcs() const { return arcs.size(); }

  std::size_t destination_port(std::size_t j) const {
    return num_origins() + j;
  }
  std::optional<std::size_t> arc_index(std::size_t origin,
                                       std::size_t destination) const;
  std::vector<std::size_t> arcs_from(std::size_t origin) const;
  std::vector<std::size_t> arcs_into(std::size_t destination) const;

  bool operator==(const NetworkInstance&) const = default;
};

// Allocates every parameter grid for the instance's current set sizes, zero
// filled. Arc order is normalized first.
void allocate_parameters(NetworkInstance& instance);

struct Violation {
  std::string field;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  std::string to_string() const;
};

ValidationReport validate(const NetworkInstance& instance);

}  // namespace bargeflow
