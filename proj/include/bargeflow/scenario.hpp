#pragma once

#include <cstdint>
#include <vector>

#include "bargeflow/grid.hpp"
#include "bargeflow/network.hpp"

namespace bargeflow {

// One joint realization of commodity supply and water-level weight limits.
struct Scenario {
  Grid<3> supply;               // [m][i][t] tons
  Grid<2> origin_channel_cap;   // [i][t] tons
  Grid<2> dest_channel_cap;     // [j][t] tons
  Grid<2> waterway_cap;         // [arc][t] tons

  bool operator==(const Scenario&) const = default;
};

struct ScenarioSet {
  std::vector<Scenario> scenarios;
  std::vector<double> probabilities;

  std::size_t size() const { return scenarios.size(); }
  bool operator==(const ScenarioSet&) const = default;
};

// Scenario sized for the instance, all values zero.
Scenario make_scenario(const NetworkInstance& instance);

// Checks dimensions, nonnegativity, and that probabilities sum to one within
// 1e-12. Returns an empty report when usable.
ValidationReport validate(const NetworkInstance& instance,
                          const ScenarioSet& scenarios);

// Draft-limited load of a barge on arc (i, j) in period t: the smallest of the
// origin channel, waterway and destination channel limits.
double effective_cap(const NetworkInstance& instance, const Scenario& scenario,
                     std::size_t origin, std::size_t destination,
                     std::size_t period);
double effective_cap(const NetworkInstance& instance, const Scenario& scenario,
                     std::size_t arc, std::size_t period);

// Merges identical scenarios (bitwise equal data) and sums their
// probabilities, keeping first-occurrence order.
ScenarioSet collapse_duplicates(const ScenarioSet& scenarios);

struct TruncatedNormal {
  double mean = 0.0;
  double stdev = 0.0;
  double lower = 0.0;
  double upper = 0.0;

  bool operator==(const TruncatedNormal&) const = default;
};

// Mean of the normal(mean, stdev) law conditioned on [lower, upper].
double truncated_normal_mean(const TruncatedNormal& law);

// Distribution of the stochastic data. Either independent truncated normals
// per supply entry and per (arc, period) waterway limit, with port channel
// limits derived from the sampled arc limits, or a discrete law over explicit
// atoms.
struct StochasticSpec {
  enum class Kind { kTruncatedNormal, kDiscrete };
  Kind kind = Kind::kTruncatedNormal;

  Grid<3, TruncatedNormal> supply;     // [m][i][t]
  Grid<2, TruncatedNormal> waterway;   // [arc][t]
  // Channel limit of a port = multiplier * largest sampled limit over the
  // arcs incident to the port.
  double origin_channel_multiplier = 1.25;
  double dest_channel_multiplier = 1.25;

  ScenarioSet atoms;
  std::uint64_t seed = 0;

  bool operator==(const StochasticSpec&) const = default;
};

// Spec sized for the instance with all laws degenerate at zero.
StochasticSpec make_truncated_normal_spec(const NetworkInstance& instance);
StochasticSpec make_discrete_spec(ScenarioSet atoms);

ValidationReport validate(const NetworkInstance& instance,
                          const StochasticSpec& spec);

// Draws n equiprobable i.i.d. scenarios. Output depends only on
// (spec, n, seed).
ScenarioSet sample_scenarios(const NetworkInstance& instance,
                             const StochasticSpec& spec, std::size_t n,
                             std::uint64_t seed);

// Scales every water-capacity law (mean, stdev and truncation bounds, or the
// atoms' channel and waterway limits) by 1 + factor. Supply is untouched.
StochasticSpec shift_mean_water_level(const StochasticSpec& spec,
                                      double factor);

}  // namespace bargeflow
