#include <doctest.h>

#include <cmath>

#include "bargeflow/error.hpp"
#include "bargeflow/fixtures.hpp"
#include "bargeflow/scenario.hpp"

using namespace bargeflow;

namespace {

Scenario with_caps(const NetworkInstance& inst, double origin, double waterway,
                   double dest) {
  Scenario s = make_scenario(inst);
  s.origin_channel_cap(0, 0) = origin;
  s.waterway_cap(0, 0) = waterway;
  s.dest_channel_cap(0, 0) = dest;
  return s;
}

StochasticSpec single_law_spec(const NetworkInstance& inst,
                               const TruncatedNormal& law) {
  StochasticSpec spec = make_truncated_normal_spec(inst);
  for (TruncatedNormal& v : spec.supply.values()) v = law;
  for (TruncatedNormal& v : spec.waterway.values()) v = law;
  return spec;
}

}  // namespace

TEST_CASE("effective capacity is the smallest of the three limits") {
  const NetworkInstance inst = micro_instance_m1().instance;
  CHECK(effective_cap(inst, with_caps(inst, 60, 45, 50), 0, 0, 0) == 45.0);
  CHECK(effective_cap(inst, with_caps(inst, 30, 30, 30), 0, 0, 0) == 30.0);
  const Fixture f = micro_instance_m1();
  CHECK(effective_cap(f.instance, f.scenarios.scenarios[1], 0, 0, 0) == 30.0);
  CHECK_THROWS_AS(effective_cap(inst, with_caps(inst, 1, 1, 1), 0, 1, 0),
                  InvalidInput);
}

TEST_CASE("effective capacity is monotone in each input") {
  const NetworkInstance inst = micro_instance_m1().instance;
  for (double a : {10.0, 40.0, 70.0}) {
    for (double b : {10.0, 40.0, 70.0}) {
      for (double c : {10.0, 40.0, 70.0}) {
        const double base = effective_cap(inst, with_caps(inst, a, b, c), 0, 0, 0);
        CHECK(base <= a);
        CHECK(base <= b);
        CHECK(base <= c);
        CHECK(effective_cap(inst, with_caps(inst, a + 5, b, c), 0, 0, 0) >= base);
        CHECK(effective_cap(inst, with_caps(inst, a, b + 5, c), 0, 0, 0) >= base);
        CHECK(effective_cap(inst, with_caps(inst, a, b, c + 5), 0, 0, 0) >= base);
      }
    }
  }
}

TEST_CASE("degenerate law samples its mean") {
  const NetworkInstance inst = micro_instance_m1().instance;
  const StochasticSpec spec = single_law_spec(inst, {50, 0, 20, 80});
  const ScenarioSet set = sample_scenarios(inst, spec, 1, 7);
  REQUIRE(set.size() == 1);
  CHECK(set.probabilities[0] == 1.0);
  CHECK(set.scenarios[0].supply(0, 0, 0) == 50.0);
  CHECK(set.scenarios[0].waterway_cap(0, 0) == 50.0);
  CHECK(set.scenarios[0].origin_channel_cap(0, 0) == 62.5);
}

TEST_CASE("samples are equiprobable, bounded and reproducible") {
  const NetworkInstance inst = micro_instance_m1().instance;
  const StochasticSpec spec = single_law_spec(inst, {50, 10, 20, 80});
  const ScenarioSet four = sample_scenarios(inst, spec, 4, 11);
  CHECK(four.probabilities == std::vector<double>(4, 0.25));
  CHECK(validate(inst, four).ok());
  CHECK(sample_scenarios(inst, spec, 4, 11) == four);
  CHECK_FALSE(sample_scenarios(inst, spec, 4, 12) == four);
  const ScenarioSet many = sample_scenarios(inst, spec, 500, 3);
  for (const Scenario& s : many.scenarios) {
    CHECK(s.supply(0, 0, 0) >= 20.0);
    CHECK(s.supply(0, 0, 0) <= 80.0);
  }
  CHECK_THROWS_AS(sample_scenarios(inst, spec, 0, 1), InvalidInput);
}

TEST_CASE("sample mean matches the truncated normal mean") {
  const NetworkInstance inst = micro_instance_m1().instance;
  for (const TruncatedNormal law :
       {TruncatedNormal{50, 10, 20, 80}, TruncatedNormal{50, 10, 45, 80},
        TruncatedNormal{30, 20, 0, 100}}) {
    const ScenarioSet set =
        sample_scenarios(inst, single_law_spec(inst, law), 1000, 2024);
    double sum = 0.0;
    for (const Scenario& s : set.scenarios) sum += s.waterway_cap(0, 0);
    const double mean = sum / 1000.0;
    CHECK(std::abs(mean - truncated_normal_mean(law)) <=
          3.0 * law.stdev / std::sqrt(1000.0));
  }
  CHECK(truncated_normal_mean({50, 10, 20, 80}) == doctest::Approx(50.0));
  CHECK(truncated_normal_mean({50, 10, 50, 1e9}) ==
        doctest::Approx(50.0 + 10.0 * std::sqrt(2.0 / M_PI)));
}

TEST_CASE("invalid spec is rejected") {
  const NetworkInstance inst = micro_instance_m1().instance;
  CHECK_THROWS_AS(sample_scenarios(inst, single_law_spec(inst, {10, 1, 20, 80}), 3, 1),
                  InvalidInput);
  CHECK_FALSE(validate(inst, single_law_spec(inst, {50, -1, 20, 80})).ok());
}

TEST_CASE("water level shift scales capacities and leaves supply alone") {
  const NetworkInstance inst = micro_instance_m1().instance;
  const StochasticSpec spec = single_law_spec(inst, {50, 10, 20, 80});
  CHECK(shift_mean_water_level(spec, 0.0) == spec);
  const StochasticSpec up = shift_mean_water_level(spec, 0.4);
  CHECK(up.waterway(0, 0).mean == doctest::Approx(70.0));
  CHECK(up.waterway(0, 0).lower == doctest::Approx(28.0));
  CHECK(up.waterway(0, 0).upper == doctest::Approx(112.0));
  CHECK(up.supply == spec.supply);
  CHECK(shift_mean_water_level(spec, -0.4).waterway(0, 0).mean ==
        doctest::Approx(30.0));
  CHECK_THROWS_AS(shift_mean_water_level(spec, -1.0), InvalidInput);

  const Fixture f = micro_instance_m1();
  const StochasticSpec atoms = make_discrete_spec(f.scenarios);
  const StochasticSpec low = shift_mean_water_level(atoms, -0.5);
  CHECK(low.atoms.scenarios[0].waterway_cap(0, 0) == 30.0);
  CHECK(low.atoms.scenarios[1].supply == f.scenarios.scenarios[1].supply);
}

TEST_CASE("discrete law draws atoms with their probabilities") {
  const Fixture f = micro_instance_m1();
  const StochasticSpec spec = make_discrete_spec(f.scenarios);
  const ScenarioSet draws = sample_scenarios(f.instance, spec, 2000, 5);
  const ScenarioSet merged = collapse_duplicates(draws);
  REQUIRE(merged.size() == 2);
  CHECK(merged.probabilities[0] + merged.probabilities[1] == doctest::Approx(1.0));
  CHECK(std::abs(merged.probabilities[0] - 0.5) < 3.0 * 0.5 / std::sqrt(2000.0));
}

TEST_CASE("scenario set validation") {
  Fixture f = micro_instance_m1();
  CHECK(validate(f.instance, f.scenarios).ok());
  f.scenarios.probabilities[0] = 0.6;
  CHECK_FALSE(validate(f.instance, f.scenarios).ok());
  f.scenarios.probabilities[0] = 0.5;
  f.scenarios.scenarios[0].supply(0, 0, 0) = -1.0;
  CHECK_FALSE(validate(f.instance, f.scenarios).ok());
}
