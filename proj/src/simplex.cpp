#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "bargeflow/error.hpp"
#include "bargeflow/lp.hpp"

namespace bargeflow {

std::size_t StandardFormLP::add_col(double cost, double lo, double hi) {
  objective.push_back(cost);
  lower.push_back(lo);
  upper.push_back(hi);
  return objective.size() - 1;
}

std::size_t StandardFormLP::add_row(RowSense row_sense, double row_rhs) {
  sense.push_back(row_sense);
  rhs.push_back(row_rhs);
  return rhs.size() - 1;
}

void StandardFormLP::set(std::size_t row, std::size_t col, double value) {
  entries.push_back({row, col, value});
}

StandardFormLP canonicalize(const StandardFormLP& lp) {
  StandardFormLP out = lp;
  std::map<std::pair<std::size_t, std::size_t>, double> merged;
  for (const SparseEntry& e : lp.entries) merged[{e.row, e.col}] += e.value;
  out.entries.clear();
  for (const auto& [key, value] : merged) {
    if (value != 0.0) out.entries.push_back({key.first, key.second, value});
  }
  return out;
}

const char* to_string(LpStatus status) {
  switch (status) {
    case LpStatus::kOptimal:
      return "optimal";
    case LpStatus::kInfeasible:
      return "infeasible";
    case LpStatus::kUnbounded:
      return "unbounded";
  }
  return "unknown";
}

double max_violation(const StandardFormLP& lp, const std::vector<double>& x) {
  double worst = 0.0;
  std::vector<double> activity(lp.num_rows(), 0.0);
  for (const SparseEntry& e : lp.entries) activity[e.row] += e.value * x[e.col];
  for (std::size_t i = 0; i < lp.num_rows(); ++i) {
    const double gap = activity[i] - lp.rhs[i];
    switch (lp.sense[i]) {
      case RowSense::kLessEqual:
        worst = std::max(worst, gap);
        break;
      case RowSense::kGreaterEqual:
        worst = std::max(worst, -gap);
        break;
      case RowSense::kEqual:
        worst = std::max(worst, std::abs(gap));
        break;
    }
  }
  for (std::size_t j = 0; j < lp.num_cols(); ++j) {
    worst = std::max({worst, lp.lower[j] - x[j], x[j] - lp.upper[j]});
  }
  return worst;
}

namespace {

using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class VarState : std::uint8_t { kBasic, kAtLower, kAtUpper, kFree };

// Bases whose 1-norm condition number exceeds the inverse of this count as
// singular.
constexpr double kSingularRcond = 1e-12;
// Relative pivot size below which full pivoting reports a dependent column.
constexpr double kRankThreshold = 1e-9;

void check_input(const StandardFormLP& lp) {
  const std::size_t n = lp.num_cols();
  const std::size_t m = lp.num_rows();
  if (lp.lower.size() != n || lp.upper.size() != n || lp.sense.size() != m) {
    throw InvalidInput("LP dimension mismatch");
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (std::isnan(lp.lower[j]) || std::isnan(lp.upper[j]) ||
        !std::isfinite(lp.objective[j])) {
      throw InvalidInput("LP column " + std::to_string(j) + " has NaN data");
    }
    if (lp.lower[j] > lp.upper[j] || lp.lower[j] == kInfinity ||
        lp.upper[j] == -kInfinity) {
      throw InvalidInput("LP column " + std::to_string(j) +
                         " has inconsistent bounds");
    }
  }
  for (double b : lp.rhs) {
    if (!std::isfinite(b)) throw InvalidInput("LP right-hand side not finite");
  }
  for (const SparseEntry& e : lp.entries) {
    if (e.row >= m || e.col >= n) throw InvalidInput("LP entry out of range");
    if (!std::isfinite(e.value)) throw InvalidInput("LP entry not finite");
  }
}

// Removes fixed columns (lower == upper) unless `keep_fixed`, and rows left
// without entries.
struct Reduction {
  StandardFormLP lp;
  std::vector<std::size_t> col_map;
  std::vector<std::size_t> row_map;
  double objective_offset = 0.0;
  // Set when a removed row cannot be satisfied.
  bool infeasible = false;
  std::size_t bad_row = 0;
  double bad_multiplier = 0.0;
};

Reduction reduce(const StandardFormLP& lp, double tol, bool keep_fixed) {
  Reduction red;
  const std::size_t n = lp.num_cols();
  const std::size_t m = lp.num_rows();
  std::vector<std::ptrdiff_t> new_col(n, -1);
  for (std::size_t j = 0; j < n; ++j) {
    if (lp.lower[j] == lp.upper[j] && !keep_fixed) {
      red.objective_offset += lp.objective[j] * lp.lower[j];
      continue;
    }
    new_col[j] = static_cast<std::ptrdiff_t>(red.col_map.size());
    red.col_map.push_back(j);
    red.lp.add_col(lp.objective[j], lp.lower[j], lp.upper[j]);
  }
  std::vector<double> rhs = lp.rhs;
  std::vector<std::size_t> live(m, 0);
  for (const SparseEntry& e : lp.entries) {
    if (e.value == 0.0) continue;
    if (new_col[e.col] < 0) {
      rhs[e.row] -= e.value * lp.lower[e.col];
    } else {
      ++live[e.row];
    }
  }
  std::vector<std::ptrdiff_t> new_row(m, -1);
  for (std::size_t i = 0; i < m; ++i) {
    if (live[i] > 0) {
      new_row[i] = static_cast<std::ptrdiff_t>(red.row_map.size());
      red.row_map.push_back(i);
      red.lp.add_row(lp.sense[i], rhs[i]);
      continue;
    }
    double multiplier = 0.0;
    switch (lp.sense[i]) {
      case RowSense::kLessEqual:
        if (rhs[i] < -tol) multiplier = -1.0;
        break;
      case RowSense::kGreaterEqual:
        if (rhs[i] > tol) multiplier = 1.0;
        break;
      case RowSense::kEqual:
        if (std::abs(rhs[i]) > tol) multiplier = rhs[i] > 0.0 ? 1.0 : -1.0;
        break;
    }
    if (multiplier != 0.0 && !red.infeasible) {
      red.infeasible = true;
      red.bad_row = i;
      red.bad_multiplier = multiplier;
    }
  }
  for (const SparseEntry& e : lp.entries) {
    if (e.value == 0.0 || new_col[e.col] < 0) continue;
    red.lp.set(static_cast<std::size_t>(new_row[e.row]),
               static_cast<std::size_t>(new_col[e.col]), e.value);
  }
  return red;
}

struct CoreResult {
  LpStatus status = LpStatus::kInfeasible;
  std::vector<double> x;         // structurals
  std::vector<double> y;         // row duals (phase 2) or phase-1 multipliers
  std::vector<double> ray;       // structurals
  std::vector<std::size_t> basis;
  std::size_t iterations = 0;
};

class RevisedSimplex {
 public:
  RevisedSimplex(const StandardFormLP& lp, const SimplexOptions& options)
      : options_(options), m_(lp.num_rows()), n_(lp.num_cols()) {
    const std::size_t total = n_ + m_;
    // Column-compressed structural matrix, duplicates summed.
    std::vector<std::vector<std::pair<std::size_t, double>>> cols(n_);
    for (const SparseEntry& e : lp.entries) cols[e.col].push_back({e.row, e.value});
    col_start_.assign(n_ + 1, 0);
    for (std::size_t j = 0; j < n_; ++j) {
      auto& col = cols[j];
      std::sort(col.begin(), col.end());
      for (std::size_t k = 0; k < col.size(); ++k) {
        if (!col_row_.empty() && col_start_[j] < col_row_.size() &&
            col_row_.back() == col[k].first) {
          col_val_.back() += col[k].second;
        } else {
          col_row_.push_back(col[k].first);
          col_val_.push_back(col[k].second);
        }
      }
      col_start_[j + 1] = col_row_.size();
    }
    cost_.assign(total, 0.0);
    lo_.assign(total, 0.0);
    hi_.assign(total, 0.0);
    for (std::size_t j = 0; j < n_; ++j) {
      cost_[j] = lp.objective[j];
      lo_[j] = lp.lower[j];
      hi_[j] = lp.upper[j];
    }
    for (std::size_t i = 0; i < m_; ++i) {
      switch (lp.sense[i]) {
        case RowSense::kLessEqual:
          lo_[n_ + i] = 0.0;
          hi_[n_ + i] = kInfinity;
          break;
        case RowSense::kGreaterEqual:
          lo_[n_ + i] = -kInfinity;
          hi_[n_ + i] = 0.0;
          break;
        case RowSense::kEqual:
          lo_[n_ + i] = 0.0;
          hi_[n_ + i] = 0.0;
          break;
      }
    }
    b_ = lp.rhs;
    x_.assign(total, 0.0);
    state_.assign(total, VarState::kAtLower);
    for (std::size_t j = 0; j < n_; ++j) x_[j] = initial_value(j, 0.0);
    slack_basis();
  }

  // Installs a starting basis given in this LP's indices.
  void warm_start(const std::vector<std::size_t>& basic, const std::vector<double>& near) {
    for (std::size_t j = 0; j < n_; ++j) x_[j] = initial_value(j, near[j]);
    if (m_ == 0) return;
    for (std::size_t i = 0; i < m_; ++i) x_[n_ + i] = initial_value(n_ + i, 0.0);
    std::vector<bool> taken(n_ + m_, false);
    head_.clear();
    for (std::size_t j : basic) {
      if (j >= n_ + m_ || taken[j] || head_.size() == m_) continue;
      taken[j] = true;
      head_.push_back(j);
    }
    for (std::size_t i = 0; i < m_ && head_.size() < m_; ++i) {
      if (!taken[n_ + i]) {
        taken[n_ + i] = true;
        head_.push_back(n_ + i);
      }
    }
    for (std::size_t j : head_) state_[j] = VarState::kBasic;
    refactor();
    refactor_failures_ = 0;
  }

  CoreResult run();

 private:
  double initial_value(std::size_t j, double near) {
    if (std::isfinite(lo_[j]) && std::isfinite(hi_[j])) {
      const bool upper = std::abs(hi_[j] - near) < std::abs(near - lo_[j]);
      state_[j] = upper ? VarState::kAtUpper : VarState::kAtLower;
      return upper ? hi_[j] : lo_[j];
    }
    if (std::isfinite(lo_[j])) {
      state_[j] = VarState::kAtLower;
      return lo_[j];
    }
    if (std::isfinite(hi_[j])) {
      state_[j] = VarState::kAtUpper;
      return hi_[j];
    }
    state_[j] = VarState::kFree;
    return 0.0;
  }

  void slack_basis() {
    head_.resize(m_);
    for (std::size_t i = 0; i < m_; ++i) {
      head_[i] = n_ + i;
      state_[n_ + i] = VarState::kBasic;
    }
    binv_ = RowMatrix::Identity(m_, m_);
    pivots_since_refactor_ = 0;
    compute_basic_values();
  }

  double dot_column(const Eigen::VectorXd& y, std::size_t j) const {
    if (j >= n_) return y[static_cast<Eigen::Index>(j - n_)];
    double sum = 0.0;
    for (std::size_t k = col_start_[j]; k < col_start_[j + 1]; ++k) {
      sum += y[static_cast<Eigen::Index>(col_row_[k])] * col_val_[k];
    }
    return sum;
  }

  Eigen::VectorXd column(std::size_t j) const {
    Eigen::VectorXd a = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m_));
    if (j >= n_) {
      a[static_cast<Eigen::Index>(j - n_)] = 1.0;
    } else {
      for (std::size_t k = col_start_[j]; k < col_start_[j + 1]; ++k) {
        a[static_cast<Eigen::Index>(col_row_[k])] = col_val_[k];
      }
    }
    return a;
  }

  void compute_basic_values() {
    Eigen::VectorXd residual(static_cast<Eigen::Index>(m_));
    for (std::size_t i = 0; i < m_; ++i) residual[static_cast<Eigen::Index>(i)] = b_[i];
    for (std::size_t j = 0; j < n_ + m_; ++j) {
      if (state_[j] == VarState::kBasic || x_[j] == 0.0) continue;
      if (j >= n_) {
        residual[static_cast<Eigen::Index>(j - n_)] -= x_[j];
      } else {
        for (std::size_t k = col_start_[j]; k < col_start_[j + 1]; ++k) {
          residual[static_cast<Eigen::Index>(col_row_[k])] -= col_val_[k] * x_[j];
        }
      }
    }
    const Eigen::VectorXd xb = binv_ * residual;
    for (std::size_t i = 0; i < m_; ++i) x_[head_[i]] = xb[static_cast<Eigen::Index>(i)];
  }

  // Rebuilds the basis inverse from scratch. An ill-conditioned basis is
  // refactored with full pivoting; a rank-deficient one is repaired by
  // swapping its dependent columns for the slacks of the rows they leave
  // uncovered, with the slack basis as the last resort.
  void refactor() {
    pivots_since_refactor_ = 0;
    if (m_ == 0) return;
    if (sparse_inverse()) {
      compute_basic_values();
      return;
    }
    const Eigen::MatrixXd basis = basis_matrix();
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(basis);
    if (accept_inverse(lu.inverse(), basis.cwiseAbs().colwise().sum().maxCoeff())) {
      compute_basic_values();
      return;
    }
    Eigen::FullPivLU<Eigen::MatrixXd> full(basis);
    full.setThreshold(kRankThreshold);
    if (full.isInvertible()) {
      binv_ = full.inverse();
      compute_basic_values();
      return;
    }
    if (++refactor_failures_ > options_.max_refactor_retries) {
      throw NumericalFailure("singular basis after repeated recovery");
    }
    weights_.assign(n_ + m_, 1.0);
    repair_basis(full);
    full.compute(basis_matrix());
    if (!full.isInvertible()) {
      for (std::size_t i = 0; i < m_; ++i) {
        const std::size_t j = head_[i];
        if (j < n_) x_[j] = initial_value(j, x_[j]);
      }
      slack_basis();
      return;
    }
    binv_ = full.inverse();
    compute_basic_values();
  }

  // Keeps `inverse` as the basis inverse if it is finite and the exact
  // 1-norm condition number is acceptable.
  bool accept_inverse(Eigen::MatrixXd inverse, double basis_norm) {
    if (!inverse.allFinite()) return false;
    const double inverse_norm = inverse.cwiseAbs().colwise().sum().maxCoeff();
    if (!(basis_norm * inverse_norm * kSingularRcond < 1.0)) return false;
    binv_ = std::move(inverse);
    return true;
  }

  // Bases are mostly slack columns, so a sparse factorization followed by
  // one solve per unit vector is far cheaper than a dense LU.
  bool sparse_inverse() {
    std::vector<Eigen::Triplet<double>> entries;
    std::vector<double> col_norm(m_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) {
      const std::size_t j = head_[i];
      const auto c = static_cast<int>(i);
      if (j >= n_) {
        entries.emplace_back(static_cast<int>(j - n_), c, 1.0);
        col_norm[i] = 1.0;
        continue;
      }
      for (std::size_t k = col_start_[j]; k < col_start_[j + 1]; ++k) {
        entries.emplace_back(static_cast<int>(col_row_[k]), c, col_val_[k]);
        col_norm[i] += std::abs(col_val_[k]);
      }
    }
    const auto dim = static_cast<Eigen::Index>(m_);
    Eigen::SparseMatrix<double> basis(dim, dim);
    basis.setFromTriplets(entries.begin(), entries.end());
    basis.makeCompressed();
    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
    lu.compute(basis);
    if (lu.info() != Eigen::Success) return false;
    Eigen::MatrixXd inverse = lu.solve(Eigen::MatrixXd::Identity(dim, dim));
    if (lu.info() != Eigen::Success) return false;
    return accept_inverse(std::move(inverse), *std::max_element(col_norm.begin(), col_norm.end()));
  }

  Eigen::MatrixXd basis_matrix() const {
    Eigen::MatrixXd basis(static_cast<Eigen::Index>(m_), static_cast<Eigen::Index>(m_));
    for (std::size_t i = 0; i < m_; ++i) basis.col(static_cast<Eigen::Index>(i)) = column(head_[i]);
    return basis;
  }

  // P B Q = L U with full pivoting: basis positions Q(0..r) are independent
  // and rows P^-1(r..m) are left uncovered, so their slacks complete a
  // nonsingular basis.
  void repair_basis(const Eigen::FullPivLU<Eigen::MatrixXd>& full) {
    const auto r = static_cast<std::size_t>(full.rank());
    const auto& q = full.permutationQ().indices();
    const auto& p = full.permutationP().indices();
    std::vector<std::size_t> dependent;
    for (std::size_t k = r; k < m_; ++k) dependent.push_back(static_cast<std::size_t>(q[static_cast<Eigen::Index>(k)]));
    std::vector<std::size_t> uncovered;
    for (std::size_t i = 0; i < m_; ++i) {
      if (static_cast<std::size_t>(p[static_cast<Eigen::Index>(i)]) >= r) uncovered.push_back(i);
    }
    for (std::size_t pos : dependent) x_[head_[pos]] = initial_value(head_[pos], x_[head_[pos]]);
    for (std::size_t k = 0; k < dependent.size(); ++k) {
      head_[dependent[k]] = n_ + uncovered[k];
      state_[n_ + uncovered[k]] = VarState::kBasic;
    }
  }

  bool eligible(std::size_t j, double d) const {
    switch (state_[j]) {
      case VarState::kBasic:
        return false;
      case VarState::kAtLower:
        return lo_[j] < hi_[j] && d < -options_.optimality_tol;
      case VarState::kAtUpper:
        return lo_[j] < hi_[j] && d > options_.optimality_tol;
      case VarState::kFree:
        return std::abs(d) > options_.optimality_tol;
    }
    return false;
  }

  void pivot_inverse(std::size_t r, const Eigen::VectorXd& alpha) {
    const auto ri = static_cast<Eigen::Index>(r);
    const double pivot = alpha[ri];
    binv_.row(ri) /= pivot;
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == r) continue;
      const double factor = alpha[static_cast<Eigen::Index>(i)];
      if (factor == 0.0) continue;
      binv_.row(static_cast<Eigen::Index>(i)) -= factor * binv_.row(ri);
    }
  }

  const SimplexOptions options_;
  std::size_t m_;
  std::size_t n_;
  std::vector<std::size_t> col_start_;
  std::vector<std::size_t> col_row_;
  std::vector<double> col_val_;
  std::vector<double> cost_;
  std::vector<double> lo_;
  std::vector<double> hi_;
  std::vector<double> b_;
  std::vector<double> x_;
  std::vector<VarState> state_;
  std::vector<std::size_t> head_;
  RowMatrix binv_;
  std::vector<double> weights_;
  std::size_t pivots_since_refactor_ = 0;
  std::size_t refactor_failures_ = 0;
};

CoreResult RevisedSimplex::run() {
  const std::size_t total = n_ + m_;
  const double ftol = options_.feasibility_tol;
  weights_.assign(total, 1.0);
  bool bland = false;
  bool last_phase1 = true;
  std::size_t degenerate_streak = 0;
  CoreResult result;
  Eigen::VectorXd basic_cost(static_cast<Eigen::Index>(m_));

  for (std::size_t iter = 0;; ++iter) {
    if (iter >= options_.max_iterations) {
      throw NumericalFailure("simplex iteration limit reached");
    }
    result.iterations = iter;
    if (pivots_since_refactor_ >= options_.refactor_interval) refactor();

    bool phase1 = false;
    for (std::size_t i = 0; i < m_; ++i) {
      const std::size_t j = head_[i];
      if (x_[j] < lo_[j] - ftol || x_[j] > hi_[j] + ftol) {
        phase1 = true;
        break;
      }
    }
    for (std::size_t i = 0; i < m_; ++i) {
      const std::size_t j = head_[i];
      double c = 0.0;
      if (phase1) {
        if (x_[j] < lo_[j] - ftol) c = -1.0;
        if (x_[j] > hi_[j] + ftol) c = 1.0;
      } else {
        c = cost_[j];
      }
      basic_cost[static_cast<Eigen::Index>(i)] = c;
    }
    if (phase1 != last_phase1) {
      weights_.assign(total, 1.0);
      last_phase1 = phase1;
    }
    const Eigen::VectorXd y = binv_.transpose() * basic_cost;

    // Pricing.
    std::size_t entering = total;
    double entering_d = 0.0;
    double best_score = 0.0;
    for (std::size_t j = 0; j < total; ++j) {
      if (state_[j] == VarState::kBasic) continue;
      const double d = (phase1 ? 0.0 : cost_[j]) - dot_column(y, j);
      if (!eligible(j, d)) continue;
      if (bland) {
        entering = j;
        entering_d = d;
        break;
      }
      const double score = d * d / weights_[j];
      if (score > best_score) {
        best_score = score;
        entering = j;
        entering_d = d;
      }
    }

    if (entering == total) {
      if (pivots_since_refactor_ > 0) {
        refactor();
        continue;
      }
      result.y.resize(m_);
      for (std::size_t i = 0; i < m_; ++i) result.y[i] = y[static_cast<Eigen::Index>(i)];
      result.x.assign(x_.begin(), x_.begin() + static_cast<std::ptrdiff_t>(n_));
      result.status = phase1 ? LpStatus::kInfeasible : LpStatus::kOptimal;
      result.basis = head_;
      return result;
    }

    const double sigma = entering_d < 0.0 ? 1.0 : -1.0;
    const Eigen::VectorXd alpha = binv_ * column(entering);

    // Ratio test.
    double flip_step = kInfinity;
    if (std::isfinite(lo_[entering]) && std::isfinite(hi_[entering])) {
      flip_step = hi_[entering] - lo_[entering];
    }
    std::size_t leave = m_;
    double best_step = kInfinity;
    double leave_bound = 0.0;
    for (std::size_t i = 0; i < m_; ++i) {
      const double a = alpha[static_cast<Eigen::Index>(i)];
      if (std::abs(a) < options_.pivot_tol) continue;
      const double rate = -sigma * a;
      const std::size_t j = head_[i];
      const double v = x_[j];
      double step = kInfinity;
      double bound = 0.0;
      if (phase1 && v < lo_[j] - ftol) {
        if (rate > 0.0) {
          step = (lo_[j] - v) / rate;
          bound = lo_[j];
        }
      } else if (phase1 && v > hi_[j] + ftol) {
        if (rate < 0.0) {
          step = (v - hi_[j]) / -rate;
          bound = hi_[j];
        }
      } else if (rate < 0.0 && std::isfinite(lo_[j])) {
        step = std::max(0.0, v - lo_[j]) / -rate;
        bound = lo_[j];
      } else if (rate > 0.0 && std::isfinite(hi_[j])) {
        step = std::max(0.0, hi_[j] - v) / rate;
        bound = hi_[j];
      }
      if (!std::isfinite(step)) continue;
      bool take = false;
      if (leave == m_ || step < best_step - options_.zero_tol) {
        take = true;
      } else if (step <= best_step + options_.zero_tol) {
        if (bland) {
          take = j < head_[leave];
        } else {
          take = std::abs(a) > std::abs(alpha[static_cast<Eigen::Index>(leave)]);
        }
      }
      if (take) {
        leave = i;
        best_step = step;
        leave_bound = bound;
      }
    }

    if (leave == m_ && !std::isfinite(flip_step)) {
      if (phase1) {
        // Cannot happen in exact arithmetic; the phase-1 objective is
        // bounded below. Treat as loss of accuracy.
        if (++refactor_failures_ > options_.max_refactor_retries) {
          throw NumericalFailure("unbounded phase-1 direction");
        }
        refactor();
        continue;
      }
      result.status = LpStatus::kUnbounded;
      result.x.assign(x_.begin(), x_.begin() + static_cast<std::ptrdiff_t>(n_));
      result.ray.assign(n_, 0.0);
      if (entering < n_) result.ray[entering] = sigma;
      for (std::size_t i = 0; i < m_; ++i) {
        if (head_[i] < n_) {
          result.ray[head_[i]] = -sigma * alpha[static_cast<Eigen::Index>(i)];
        }
      }
      return result;
    }

    double step = 0.0;
    if (flip_step <= best_step) {
      step = flip_step;
      x_[entering] = sigma > 0.0 ? hi_[entering] : lo_[entering];
      state_[entering] = sigma > 0.0 ? VarState::kAtUpper : VarState::kAtLower;
      for (std::size_t i = 0; i < m_; ++i) {
        x_[head_[i]] -= sigma * step * alpha[static_cast<Eigen::Index>(i)];
      }
    } else {
      step = best_step;
      const std::size_t leaving = head_[leave];
      const double pivot = alpha[static_cast<Eigen::Index>(leave)];

      // Devex reference weights, from the pivot row before the update.
      if (!bland) {
        const Eigen::VectorXd pivot_row = binv_.row(static_cast<Eigen::Index>(leave)).transpose();
        const double wq = weights_[entering];
        for (std::size_t j = 0; j < total; ++j) {
          if (state_[j] == VarState::kBasic || j == entering) continue;
          const double ratio = dot_column(pivot_row, j) / pivot;
          weights_[j] = std::max(weights_[j], ratio * ratio * wq);
        }
        weights_[leaving] = std::max(wq / (pivot * pivot), 1.0);
      }

      x_[entering] += sigma * step;
      for (std::size_t i = 0; i < m_; ++i) {
        x_[head_[i]] -= sigma * step * alpha[static_cast<Eigen::Index>(i)];
      }
      x_[leaving] = leave_bound;
      state_[leaving] = leave_bound == lo_[leaving] ? VarState::kAtLower
                                                    : VarState::kAtUpper;
      state_[entering] = VarState::kBasic;
      head_[leave] = entering;
      pivot_inverse(leave, alpha);
      ++pivots_since_refactor_;
    }

    if (step <= options_.zero_tol) {
      if (++degenerate_streak >= options_.bland_after_degenerate) bland = true;
    } else {
      degenerate_streak = 0;
      bland = false;
    }
  }
}

}  // namespace

LpResult solve_lp(const StandardFormLP& lp, const SimplexOptions& options,
                  const WarmStart* warm) {
  check_input(lp);
  const std::size_t n = lp.num_cols();
  const std::size_t m = lp.num_rows();
  // A warm start keeps fixed columns so the given basis still fits.
  const bool warm_ok = warm != nullptr && warm->primal.size() == n;
  const Reduction red = reduce(lp, options.feasibility_tol, warm_ok);

  LpResult out;
  out.primal.assign(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    if (lp.lower[j] == lp.upper[j]) out.primal[j] = lp.lower[j];
  }
  out.duals.assign(m, 0.0);
  out.reduced_costs.assign(n, 0.0);

  if (red.infeasible) {
    out.status = LpStatus::kInfeasible;
    out.farkas.assign(m, 0.0);
    out.farkas[red.bad_row] = red.bad_multiplier;
    return out;
  }

  RevisedSimplex simplex(red.lp, options);
  const std::size_t rn = red.col_map.size();
  if (warm_ok) {
    std::vector<std::ptrdiff_t> col_of(n, -1), row_of(m, -1);
    for (std::size_t k = 0; k < rn; ++k) col_of[red.col_map[k]] = static_cast<std::ptrdiff_t>(k);
    for (std::size_t k = 0; k < red.row_map.size(); ++k) {
      row_of[red.row_map[k]] = static_cast<std::ptrdiff_t>(k);
    }
    std::vector<std::size_t> basic;
    for (std::size_t j : warm->basis) {
      if (j < n && col_of[j] >= 0) basic.push_back(static_cast<std::size_t>(col_of[j]));
      if (j >= n && j < n + m && row_of[j - n] >= 0) {
        basic.push_back(rn + static_cast<std::size_t>(row_of[j - n]));
      }
    }
    std::vector<double> near(rn);
    for (std::size_t k = 0; k < rn; ++k) near[k] = warm->primal[red.col_map[k]];
    simplex.warm_start(basic, near);
  }
  const CoreResult core = simplex.run();
  out.iterations = core.iterations;
  out.status = core.status;
  for (std::size_t k = 0; k < red.col_map.size(); ++k) {
    out.primal[red.col_map[k]] = core.x[k];
  }

  if (core.status == LpStatus::kInfeasible) {
    out.farkas.assign(m, 0.0);
    for (std::size_t k = 0; k < red.row_map.size(); ++k) {
      out.farkas[red.row_map[k]] = core.y[k];
    }
    return out;
  }
  if (core.status == LpStatus::kUnbounded) {
    out.ray.assign(n, 0.0);
    for (std::size_t k = 0; k < red.col_map.size(); ++k) {
      out.ray[red.col_map[k]] = core.ray[k];
    }
    out.objective = -kInfinity;
    return out;
  }

  for (std::size_t k = 0; k < red.row_map.size(); ++k) {
    out.duals[red.row_map[k]] = core.y[k];
  }
  // Slacks of removed rows complete the basis of the original LP.
  std::vector<bool> kept_row(m, false);
  for (std::size_t i : red.row_map) kept_row[i] = true;
  for (std::size_t j : core.basis) {
    out.basis.push_back(j < rn ? red.col_map[j] : n + red.row_map[j - rn]);
  }
  for (std::size_t i = 0; i < m; ++i) {
    if (!kept_row[i]) out.basis.push_back(n + i);
  }
  out.reduced_costs = lp.objective;
  for (const SparseEntry& e : lp.entries) {
    out.reduced_costs[e.col] -= out.duals[e.row] * e.value;
  }
  double objective = 0.0;
  for (std::size_t j = 0; j < n; ++j) objective += lp.objective[j] * out.primal[j];
  out.objective = objective;
  return out;
}

}  // namespace bargeflow
