#include "bargeflow/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include <boost/math/distributions/normal.hpp>

#include "bargeflow/error.hpp"

namespace bargeflow {

Scenario make_scenario(const NetworkInstance& instance) {
  const std::size_t T = instance.num_periods;
  Scenario s;
  s.supply = Grid<3>({instance.num_commodities(), instance.num_origins(), T});
  s.origin_channel_cap = Grid<2>({instance.num_origins(), T});
  s.dest_channel_cap = Grid<2>({instance.num_destinations(), T});
  s.waterway_cap = Grid<2>({instance.num_arcs(), T});
  return s;
}

namespace {

template <std::size_t Rank>
bool all_nonnegative(const Grid<Rank>& grid) {
  return std::all_of(grid.values().begin(), grid.values().end(),
                     [](double v) { return std::isfinite(v) && v >= 0.0; });
}

}  // namespace

ValidationReport validate(const NetworkInstance& instance,
                          const ScenarioSet& scenarios) {
  ValidationReport report;
  if (scenarios.scenarios.empty()) {
    report.violations.push_back({"scenarios", "scenario set is empty"});
    return report;
  }
  if (scenarios.probabilities.size() != scenarios.scenarios.size()) {
    report.violations.push_back(
        {"scenarios", "one probability per scenario is required"});
    return report;
  }
  double total = 0.0;
  for (double p : scenarios.probabilities) {
    if (!(p >= 0.0)) {
      report.violations.push_back(
          {"scenarios", "probabilities must be nonnegative"});
    }
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    report.violations.push_back(
        {"scenarios", "probabilities must sum to 1, got " + std::to_string(total)});
  }
  const Scenario shape = make_scenario(instance);
  for (std::size_t k = 0; k < scenarios.size(); ++k) {
    const Scenario& s = scenarios.scenarios[k];
    const std::string field = "scenarios[" + std::to_string(k) + "]";
    if (s.supply.dims() != shape.supply.dims() ||
        s.origin_channel_cap.dims() != shape.origin_channel_cap.dims() ||
        s.dest_channel_cap.dims() != shape.dest_channel_cap.dims() ||
        s.waterway_cap.dims() != shape.waterway_cap.dims()) {
      report.violations.push_back(
          {field, "dimensions do not match the instance sets"});
      continue;
    }
    if (!all_nonnegative(s.supply) || !all_nonnegative(s.origin_channel_cap) ||
        !all_nonnegative(s.dest_channel_cap) ||
        !all_nonnegative(s.waterway_cap)) {
      report.violations.push_back({field, "values must be nonnegative"});
    }
  }
  return report;
}

double effective_cap(const NetworkInstance& instance, const Scenario& scenario,
                     std::size_t arc, std::size_t period) {
  if (arc >= instance.num_arcs()) throw InvalidInput("unknown arc");
  const Arc& link = instance.arcs[arc];
  return std::min({scenario.origin_channel_cap(link.origin, period),
                   scenario.waterway_cap(arc, period),
                   scenario.dest_channel_cap(link.destination, period)});
}

double effective_cap(const NetworkInstance& instance, const Scenario& scenario,
                     std::size_t origin, std::size_t destination,
                     std::size_t period) {
  const auto arc = instance.arc_index(origin, destination);
  if (!arc) {
    throw InvalidInput("unknown arc (" + std::to_string(origin) + ", " +
                       std::to_string(destination) + ")");
  }
  return effective_cap(instance, scenario, *arc, period);
}

ScenarioSet collapse_duplicates(const ScenarioSet& scenarios) {
  ScenarioSet out;
  for (std::size_t k = 0; k < scenarios.size(); ++k) {
    const Scenario& s = scenarios.scenarios[k];
    auto it = std::find(out.scenarios.begin(), out.scenarios.end(), s);
    if (it == out.scenarios.end()) {
      out.scenarios.push_back(s);
      out.probabilities.push_back(scenarios.probabilities[k]);
    } else {
      out.probabilities[it - out.scenarios.begin()] +=
          scenarios.probabilities[k];
    }
  }
  return out;
}

double truncated_normal_mean(const TruncatedNormal& law) {
  if (law.stdev == 0.0) return std::clamp(law.mean, law.lower, law.upper);
  const boost::math::normal_distribution<double> unit;
  const double alpha = (law.lower - law.mean) / law.stdev;
  const double beta = (law.upper - law.mean) / law.stdev;
  const double mass = boost::math::cdf(unit, beta) - boost::math::cdf(unit, alpha);
  return law.mean + law.stdev *
                        (boost::math::pdf(unit, alpha) -
                         boost::math::pdf(unit, beta)) /
                        mass;
}

StochasticSpec make_truncated_normal_spec(const NetworkInstance& instance) {
  StochasticSpec spec;
  spec.kind = StochasticSpec::Kind::kTruncatedNormal;
  spec.supply = Grid<3, TruncatedNormal>(
      {instance.num_commodities(), instance.num_origins(), instance.num_periods});
  spec.waterway =
      Grid<2, TruncatedNormal>({instance.num_arcs(), instance.num_periods});
  return spec;
}

StochasticSpec make_discrete_spec(ScenarioSet atoms) {
  StochasticSpec spec;
  spec.kind = StochasticSpec::Kind::kDiscrete;
  spec.atoms = std::move(atoms);
  return spec;
}

namespace {

void check_law(const TruncatedNormal& law, const std::string& field,
               ValidationReport& report) {
  if (!std::isfinite(law.mean) || !std::isfinite(law.stdev) ||
      !std::isfinite(law.lower) || !std::isfinite(law.upper)) {
    report.violations.push_back({field, "law parameters must be finite"});
  } else if (!(law.lower <= law.mean && law.mean <= law.upper)) {
    report.violations.push_back({field, "requires lower <= mean <= upper"});
  } else if (law.stdev < 0.0) {
    report.violations.push_back({field, "stdev must be >= 0"});
  } else if (law.lower < 0.0) {
    report.violations.push_back({field, "lower bound must be >= 0"});
  }
}

}  // namespace

ValidationReport validate(const NetworkInstance& instance,
                          const StochasticSpec& spec) {
  if (spec.kind == StochasticSpec::Kind::kDiscrete) {
    return validate(instance, spec.atoms);
  }
  ValidationReport report;
  const StochasticSpec shape = make_truncated_normal_spec(instance);
  if (spec.supply.dims() != shape.supply.dims()) {
    report.violations.push_back(
        {"stochastic.supply", "dimensions do not match the instance sets"});
  }
  if (spec.waterway.dims() != shape.waterway.dims()) {
    report.violations.push_back(
        {"stochastic.waterway", "dimensions do not match the instance sets"});
  }
  if (!report.ok()) return report;
  for (const TruncatedNormal& law : spec.supply.values()) {
    check_law(law, "stochastic.supply", report);
  }
  for (const TruncatedNormal& law : spec.waterway.values()) {
    check_law(law, "stochastic.waterway", report);
  }
  if (!(spec.origin_channel_multiplier >= 0.0) ||
      !(spec.dest_channel_multiplier >= 0.0)) {
    report.violations.push_back(
        {"stochastic", "channel multipliers must be >= 0"});
  }
  return report;
}

namespace {

// Open-interval uniform from the raw 64-bit engine output; avoids the
// implementation-defined std::uniform_real_distribution.
double next_uniform(std::mt19937_64& engine) {
  return (static_cast<double>(engine() >> 11) + 0.5) * 0x1.0p-53;
}

double draw(const TruncatedNormal& law, std::mt19937_64& engine) {
  const double u = next_uniform(engine);
  if (law.stdev == 0.0 || law.lower == law.upper) {
    return std::clamp(law.mean, law.lower, law.upper);
  }
  const boost::math::normal_distribution<double> unit;
  const double lo = boost::math::cdf(unit, (law.lower - law.mean) / law.stdev);
  const double hi = boost::math::cdf(unit, (law.upper - law.mean) / law.stdev);
  const double p = std::clamp(lo + u * (hi - lo), 1e-300, 1.0 - 1e-16);
  const double value = law.mean + law.stdev * boost::math::quantile(unit, p);
  return std::clamp(value, law.lower, law.upper);
}

}  // namespace

ScenarioSet sample_scenarios(const NetworkInstance& instance,
                             const StochasticSpec& spec, std::size_t n,
                             std::uint64_t seed) {
  if (n == 0) throw InvalidInput("sample size must be >= 1");
  if (const ValidationReport report = validate(instance, spec); !report.ok()) {
    throw InvalidInput("invalid stochastic spec: " + report.to_string());
  }
  std::mt19937_64 engine(seed);
  ScenarioSet out;
  out.probabilities.assign(n, 1.0 / static_cast<double>(n));
  out.scenarios.reserve(n);

  if (spec.kind == StochasticSpec::Kind::kDiscrete) {
    const ScenarioSet& atoms = spec.atoms;
    for (std::size_t k = 0; k < n; ++k) {
      const double u = next_uniform(engine);
      double cumulative = 0.0;
      std::size_t pick = atoms.size() - 1;
      for (std::size_t a = 0; a < atoms.size(); ++a) {
        cumulative += atoms.probabilities[a];
        if (u < cumulative) {
          pick = a;
          break;
        }
      }
      out.scenarios.push_back(atoms.scenarios[pick]);
    }
    return out;
  }

  const std::size_t T = instance.num_periods;
  for (std::size_t k = 0; k < n; ++k) {
    Scenario s = make_scenario(instance);
    for (std::size_t e = 0; e < s.supply.size(); ++e) {
      s.supply.values()[e] = draw(spec.supply.values()[e], engine);
    }
    for (std::size_t e = 0; e < s.waterway_cap.size(); ++e) {
      s.waterway_cap.values()[e] = draw(spec.waterway.values()[e], engine);
    }
    for (std::size_t a = 0; a < instance.num_arcs(); ++a) {
      const Arc& arc = instance.arcs[a];
      for (std::size_t t = 0; t < T; ++t) {
        const double cap = s.waterway_cap(a, t);
        s.origin_channel_cap(arc.origin, t) =
            std::max(s.origin_channel_cap(arc.origin, t),
                     spec.origin_channel_multiplier * cap);
        s.dest_channel_cap(arc.destination, t) =
            std::max(s.dest_channel_cap(arc.destination, t),
                     spec.dest_channel_multiplier * cap);
      }
    }
    out.scenarios.push_back(std::move(s));
  }
  return out;
}

StochasticSpec shift_mean_water_level(const StochasticSpec& spec,
                                      double factor) {
  if (!(factor > -1.0)) {
    throw InvalidInput("water level factor must be > -1");
  }
  StochasticSpec out = spec;
  const double scale = 1.0 + factor;
  if (factor == 0.0) return out;
  for (TruncatedNormal& law : out.waterway.values()) {
    law.mean *= scale;
    law.stdev *= scale;
    law.lower *= scale;
    law.upper *= scale;
  }
  for (Scenario& atom : out.atoms.scenarios) {
    for (double& v : atom.origin_channel_cap.values()) v *= scale;
    for (double& v : atom.dest_channel_cap.values()) v *= scale;
    for (double& v : atom.waterway_cap.values()) v *= scale;
  }
  return out;
}

}  // namespace bargeflow
