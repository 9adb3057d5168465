#pragma once

#include "bargeflow/network.hpp"
#include "bargeflow/scenario.hpp"

namespace bargeflow {

struct Fixture {
  NetworkInstance instance;
  ScenarioSet scenarios;
};

// Smallest complete instance: one origin, one destination, one commodity, one
// period, two barges, one towboat and two equiprobable scenarios whose
// waterway limits are 60 t and 30 t. Its optimum is 480.
Fixture micro_instance_m1();

}  // namespace bargeflow
