#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "bargeflow/grid.hpp"
#include "bargeflow/lp.hpp"
#include "bargeflow/network.hpp"
#include "bargeflow/scenario.hpp"

namespace bargeflow {

enum class VarKind : std::uint8_t {
  kTow,        // Y_sijt
  kBarge,      // Y_mbsijt
  kFlow,       // X_mbsijtw
  kProcessed,  // Z_mitw
  kStored,     // H_mptw, p over origins then destinations
  kShortage,   // U_mjtw
};

struct VarKey {
  VarKind kind = VarKind::kTow;
  std::size_t commodity = 0;
  std::size_t barge = 0;
  std::size_t towboat = 0;
  std::size_t arc = 0;
  std::size_t port = 0;  // origin i, combined port p, or destination j by kind
  std::size_t period = 0;
  std::size_t scenario = 0;
  bool operator==(const VarKey&) const = default;
};

// Flat column layout: all first-stage binaries (towboats, then barges), then
// one block per scenario holding X, Z, H and U in that order.
class VariableIndex {
 public:
  VariableIndex() = default;
  VariableIndex(const NetworkInstance& instance, std::size_t num_scenarios);

  std::size_t tow(std::size_t s, std::size_t arc, std::size_t t) const;
  std::size_t barge(std::size_t m, std::size_t b, std::size_t s,
                    std::size_t arc, std::size_t t) const;
  std::size_t flow(std::size_t m, std::size_t b, std::size_t s,
                   std::size_t arc, std::size_t t, std::size_t w) const;
  std::size_t processed(std::size_t m, std::size_t i, std::size_t t,
                        std::size_t w) const;
  std::size_t stored(std::size_t m, std::size_t port, std::size_t t,
                     std::size_t w) const;
  std::size_t shortage(std::size_t m, std::size_t j, std::size_t t,
                       std::size_t w) const;

  std::size_t encode(const VarKey& key) const;
  VarKey decode(std::size_t id) const;

  std::size_t num_first_stage() const { return num_tow_ + num_barge_; }
  std::size_t num_towboat_vars() const { return num_tow_; }
  std::size_t block_size() const { return block_size_; }
  std::size_t scenario_offset(std::size_t w) const {
    return num_first_stage() + w * block_size_;
  }
  std::size_t num_scenarios() const { return num_scenarios_; }
  std::size_t num_vars() const {
    return num_first_stage() + num_scenarios_ * block_size_;
  }

 private:
  std::size_t check(std::size_t value, std::size_t limit) const;

  std::size_t M_ = 0, I_ = 0, J_ = 0, P_ = 0, B_ = 0, S_ = 0, A_ = 0, T_ = 0;
  std::size_t num_scenarios_ = 0;
  std::size_t num_tow_ = 0;
  std::size_t num_barge_ = 0;
  std::size_t num_flow_ = 0;
  std::size_t num_processed_ = 0;
  std::size_t num_stored_ = 0;
  std::size_t num_shortage_ = 0;
  std::size_t block_size_ = 0;
};

// Linear model with binary flags; rows and bounds live in the LP part.
struct MilpModel {
  StandardFormLP lp;
  std::vector<std::uint8_t> is_integer;

  std::size_t num_vars() const { return lp.num_cols(); }
  std::size_t num_rows() const { return lp.num_rows(); }
  bool operator==(const MilpModel&) const = default;
};

struct BuildOptions {
  // Adds variable bounds implied by availability, travel-time and capacity
  // rows, and closes barge loads of commodities the arc's destination never
  // demands again (this keeps every optimum). The rows are always emitted.
  bool implied_bounds = true;
};

enum class RowFamily : std::uint8_t {
  kOneCommodity,    // one commodity per barge, towboat, arc and period
  kTowLoad,         // barges per active towboat within [min, max]; two rows
  kPortBarges,      // barge departures per origin and period
  kPortTows,        // towboat departures per origin and period
  kBargeAvail,      // barge availability
  kTowAvail,        // towboat availability
  kTravelTime,      // handling, sailing and lock time within the window
  kSupply,          // processing limited by realized supply
  kOriginBalance,   // inventory balance at origins
  kDestBalance,     // inventory balance at destinations
  kStorage,         // storage capacity per port
  kWeight,          // draft-limited load of a used barge
  kVolume,          // volumetric load of a used barge
};

struct ExtensiveForm {
  MilpModel model;
  VariableIndex index;
  std::vector<RowFamily> row_family;
};

// First-stage rows over the binaries with their fixed costs; the master
// problem skeleton of the decomposition methods.
ExtensiveForm build_first_stage(const NetworkInstance& instance,
                                const BuildOptions& options = {});

ExtensiveForm build(const NetworkInstance& instance,
                    const ScenarioSet& scenarios,
                    const BuildOptions& options = {});

// Second stage of one scenario with unit weight. Columns follow the scenario
// block of VariableIndex. For a plan y the right-hand side of row r is
// lp.rhs[r] - sum(links with row r: value * y[col]).
struct RecourseLp {
  StandardFormLP lp;
  std::vector<SparseEntry> links;  // col = first-stage flat id
  std::vector<RowFamily> row_family;
};

RecourseLp build_recourse(const NetworkInstance& instance,
                          const Scenario& scenario,
                          const BuildOptions& options = {});

// Recourse LP with the plan substituted into the right-hand side.
StandardFormLP fix_plan(const RecourseLp& recourse,
                        const std::vector<double>& first_stage);

struct FirstStagePlan {
  Grid<3, std::uint8_t> tow;    // [s][arc][t]
  Grid<5, std::uint8_t> barge;  // [m][b][s][arc][t]

  std::size_t tow_uses() const;
  std::size_t barge_uses() const;
  bool operator==(const FirstStagePlan&) const = default;
};

FirstStagePlan empty_plan(const NetworkInstance& instance);
std::vector<double> to_vector(const FirstStagePlan& plan,
                              const VariableIndex& index);
// Values must lie within 1e-6 of 0 or 1; throws InvalidInput otherwise.
FirstStagePlan plan_from_vector(const NetworkInstance& instance,
                                const VariableIndex& index,
                                const std::vector<double>& values);

struct RecourseSolution {
  Grid<5> flow;       // [m][b][s][arc][t]
  Grid<3> processed;  // [m][i][t]
  Grid<3> stored;     // [m][port][t]
  Grid<3> shortage;   // [m][j][t]
};

RecourseSolution recourse_from_block(const NetworkInstance& instance,
                                     const std::vector<double>& block);

struct Extraction {
  FirstStagePlan plan;
  std::vector<RecourseSolution> recourse;
};

// Splits a full solution vector into its structured parts. Throws
// InvalidInput on a length mismatch or a non-integral binary.
Extraction extract(const NetworkInstance& instance, const VariableIndex& index,
                   const std::vector<double>& values);

struct CostBreakdown {
  double fixed = 0.0;
  double holding = 0.0;
  double transport = 0.0;
  double procurement = 0.0;
  double shortage = 0.0;

  double total() const {
    return fixed + holding + transport + procurement + shortage;
  }
  CostBreakdown& operator+=(const CostBreakdown& other);
};

// Objective terms per period, evaluated directly from the parameters on a
// structured solution: fixed costs of the plan plus probability-weighted
// recourse costs.
std::vector<CostBreakdown> period_costs(
    const NetworkInstance& instance, const ScenarioSet& scenarios,
    const FirstStagePlan& plan, const std::vector<RecourseSolution>& recourse);

CostBreakdown total_costs(const std::vector<CostBreakdown>& per_period);

// First-stage objective coefficients (fixed towboat and barge costs) by flat
// id.
std::vector<double> first_stage_costs(const NetworkInstance& instance,
                                      const VariableIndex& index);

}  // namespace bargeflow
