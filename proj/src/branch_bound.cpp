#include "bargeflow/branch_bound.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>

#include "bargeflow/error.hpp"

namespace bargeflow {

const char* to_string(MilpStatus status) {
  switch (status) {
    case MilpStatus::kOptimal:
      return "optimal";
    case MilpStatus::kInfeasible:
      return "infeasible";
    case MilpStatus::kUnbounded:
      return "unbounded";
    case MilpStatus::kNodeLimit:
      return "node_limit";
  }
  return "unknown";
}

namespace {

struct Block {
  MilpModel model;
  std::vector<std::size_t> cols;  // original column of each block column
};

struct Split {
  std::vector<Block> blocks;
  double offset = 0.0;
  bool infeasible = false;
};

std::size_t find_root(std::vector<std::size_t>& parent, std::size_t v) {
  while (parent[v] != v) {
    parent[v] = parent[parent[v]];
    v = parent[v];
  }
  return v;
}

Split split_model(const MilpModel& model, bool decompose, double tol) {
  const StandardFormLP& lp = model.lp;
  const std::size_t n = lp.num_cols();
  const std::size_t m = lp.num_rows();
  Split out;
  if (!decompose) {
    Block all;
    all.model = model;
    all.cols.resize(n);
    std::iota(all.cols.begin(), all.cols.end(), std::size_t{0});
    out.blocks.push_back(std::move(all));
    return out;
  }

  std::vector<bool> fixed(n);
  for (std::size_t j = 0; j < n; ++j) {
    fixed[j] = lp.lower[j] == lp.upper[j];
    if (fixed[j]) out.offset += lp.objective[j] * lp.lower[j];
  }
  std::vector<double> rhs = lp.rhs;
  std::vector<std::ptrdiff_t> row_anchor(m, -1);
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  for (const SparseEntry& e : lp.entries) {
    if (e.value == 0.0) continue;
    if (fixed[e.col]) {
      rhs[e.row] -= e.value * lp.lower[e.col];
      continue;
    }
    if (row_anchor[e.row] < 0) {
      row_anchor[e.row] = static_cast<std::ptrdiff_t>(e.col);
    } else {
      const std::size_t a = find_root(parent, static_cast<std::size_t>(row_anchor[e.row]));
      const std::size_t b = find_root(parent, e.col);
      if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
  }
  for (std::size_t i = 0; i < m; ++i) {
    if (row_anchor[i] >= 0) continue;
    const double slack = std::max(tol, tol * std::abs(lp.rhs[i]));
    const bool ok = lp.sense[i] == RowSense::kLessEqual      ? rhs[i] >= -slack
                    : lp.sense[i] == RowSense::kGreaterEqual ? rhs[i] <= slack
                                                             : std::abs(rhs[i]) <= slack;
    if (!ok) out.infeasible = true;
  }

  std::vector<std::ptrdiff_t> block_of(n, -1);
  std::vector<std::size_t> local(n, 0);
  for (std::size_t j = 0; j < n; ++j) {
    if (fixed[j]) continue;
    const std::size_t r = find_root(parent, j);
    if (block_of[r] < 0) {
      block_of[r] = static_cast<std::ptrdiff_t>(out.blocks.size());
      out.blocks.emplace_back();
    }
    Block& blk = out.blocks[static_cast<std::size_t>(block_of[r])];
    block_of[j] = block_of[r];
    local[j] = blk.model.lp.add_col(lp.objective[j], lp.lower[j], lp.upper[j]);
    blk.model.is_integer.push_back(model.is_integer[j]);
    blk.cols.push_back(j);
  }
  std::vector<std::size_t> local_row(m, 0);
  for (std::size_t i = 0; i < m; ++i) {
    if (row_anchor[i] < 0) continue;
    Block& blk = out.blocks[static_cast<std::size_t>(
        block_of[static_cast<std::size_t>(row_anchor[i])])];
    local_row[i] = blk.model.lp.add_row(lp.sense[i], rhs[i]);
  }
  for (const SparseEntry& e : lp.entries) {
    if (e.value == 0.0 || fixed[e.col]) continue;
    Block& blk = out.blocks[static_cast<std::size_t>(block_of[e.col])];
    blk.model.lp.set(local_row[e.row], local[e.col], e.value);
  }
  return out;
}

struct Node {
  double bound = 0.0;
  std::size_t id = 0;
  std::vector<std::pair<std::size_t, double>> fixes;
  std::vector<double> x;
  std::vector<std::size_t> basis;  // optimal LP basis, reused by children
};

struct NodeOrder {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;
    return a.id > b.id;
  }
};

// Tree search on one independent block.
class Tree {
 public:
  Tree(const MilpModel& model, const MilpOptions& options)
      : model_(model), options_(options) {}

  // Solves the root relaxation; returns false when the search is over.
  bool start(const std::vector<double>* warm) {
    if (warm != nullptr) try_plan(*warm);
    Node root;
    root.id = next_id_++;
    const LpResult res = solve(root.fixes);
    if (res.status == LpStatus::kUnbounded) {
      unbounded_ = true;
      return false;
    }
    if (res.status == LpStatus::kInfeasible) return false;
    root.bound = res.objective;
    root.x = res.primal;
    root.basis = res.basis;
    bound_ = root.bound;
    if (options_.rounding_interval > 0) round_probe(root.x);
    admit(std::move(root));
    return !open_.empty();
  }

  // Processes one open node; returns false when the search is over.
  bool step() {
    if (finished()) return false;
    Node node = open_.top();
    open_.pop();
    ++nodes_;
    const std::size_t var = branching_variable(node.x);
    ++branchings_;
    for (double value : {0.0, 1.0}) {
      Node child;
      child.id = next_id_++;
      child.fixes = node.fixes;
      child.fixes.push_back({var, value});
      const WarmStart warm{node.basis, node.x};
      const LpResult res = solve(child.fixes, &warm);
      if (res.status != LpStatus::kOptimal) continue;
      child.bound = std::max(res.objective, node.bound);
      child.x = res.primal;
      child.basis = res.basis;
      admit(std::move(child));
    }
    if (options_.rounding_interval > 0 && nodes_ % options_.rounding_interval == 0) {
      round_probe(node.x);
    }
    refresh_bound();
    return !finished();
  }

  bool finished() const {
    return open_.empty() || open_.top().bound >= incumbent_ - tolerance();
  }

  double bound() const { return bound_; }
  bool has_incumbent() const { return !best_.empty(); }
  bool unbounded() const { return unbounded_; }
  std::size_t nodes() const { return nodes_; }
  std::size_t branchings() const { return branchings_; }
  std::size_t open_nodes() const { return open_.size(); }

  // Snaps the incumbent's binaries and re-solves the continuous part.
  void polish() {
    if (best_.empty()) return;
    std::vector<std::pair<std::size_t, double>> fixes;
    for (std::size_t j = 0; j < best_.size(); ++j) {
      if (model_.is_integer[j]) fixes.push_back({j, std::round(best_[j])});
    }
    const LpResult res = solve(fixes);
    if (res.status == LpStatus::kOptimal) {
      best_ = res.primal;
      incumbent_ = res.objective;
    }
  }

  double incumbent() const { return incumbent_; }
  const std::vector<double>& solution() const { return best_; }

 private:
  double tolerance() const {
    return std::isfinite(incumbent_)
               ? options_.relative_gap * (1.0 + std::abs(incumbent_))
               : 0.0;
  }

  LpResult solve(const std::vector<std::pair<std::size_t, double>>& fixes,
                 const WarmStart* warm = nullptr) const {
    StandardFormLP lp = model_.lp;
    for (const auto& [j, v] : fixes) lp.lower[j] = lp.upper[j] = v;
    return solve_lp(lp, options_.lp, warm);
  }

  std::ptrdiff_t fractional(const std::vector<double>& x) const {
    std::ptrdiff_t pick = -1;
    double best = options_.integrality_tol;
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (!model_.is_integer[j]) continue;
      const double dist = std::min(x[j] - std::floor(x[j]), std::ceil(x[j]) - x[j]);
      if (dist > best) {
        best = dist;
        pick = static_cast<std::ptrdiff_t>(j);
      }
    }
    return pick;
  }

  std::size_t branching_variable(const std::vector<double>& x) const {
    const std::ptrdiff_t j = fractional(x);
    if (j < 0) throw InternalError("branching on an integral node");
    return static_cast<std::size_t>(j);
  }

  void offer(double objective, const std::vector<double>& x) {
    if (objective < incumbent_) {
      incumbent_ = objective;
      best_ = x;
    }
  }

  void admit(Node node) {
    if (fractional(node.x) < 0) {
      offer(node.bound, node.x);
      return;
    }
    if (node.bound >= incumbent_ - tolerance()) return;
    open_.push(std::move(node));
  }

  void round_probe(const std::vector<double>& x) {
    std::vector<std::pair<std::size_t, double>> fixes;
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (model_.is_integer[j]) fixes.push_back({j, std::round(x[j])});
    }
    const LpResult res = solve(fixes);
    if (res.status == LpStatus::kOptimal) offer(res.objective, res.primal);
  }

  void try_plan(const std::vector<double>& x) {
    if (x.size() != model_.num_vars()) return;
    std::vector<std::pair<std::size_t, double>> fixes;
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (!model_.is_integer[j]) continue;
      if (std::abs(x[j] - std::round(x[j])) > options_.integrality_tol) return;
      fixes.push_back({j, std::round(x[j])});
    }
    const LpResult res = solve(fixes);
    if (res.status == LpStatus::kOptimal) offer(res.objective, res.primal);
  }

  void refresh_bound() {
    const double open_bound = open_.empty() ? incumbent_ : open_.top().bound;
    bound_ = std::max(bound_, std::min(open_bound, incumbent_));
  }

  const MilpModel& model_;
  const MilpOptions& options_;
  std::priority_queue<Node, std::vector<Node>, NodeOrder> open_;
  std::size_t next_id_ = 0;
  std::size_t nodes_ = 0;
  std::size_t branchings_ = 0;
  double incumbent_ = kInfinity;
  double bound_ = -kInfinity;
  std::vector<double> best_;
  bool unbounded_ = false;
};

}  // namespace

MilpResult solve_milp(const MilpModel& model, const MilpOptions& options) {
  const std::size_t n = model.num_vars();
  if (model.is_integer.size() != n) {
    throw InvalidInput("integrality flags do not match the column count");
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (model.is_integer[j] &&
        (model.lp.lower[j] < 0.0 || model.lp.upper[j] > 1.0)) {
      throw InvalidInput("integer column " + std::to_string(j) + " is not binary");
    }
  }
  if (!(options.relative_gap >= 0.0)) throw InvalidInput("gap must be >= 0");

  MilpResult result;
  const Split split = split_model(model, options.decompose, options.lp.feasibility_tol);
  result.components = split.blocks.size();
  if (split.infeasible) {
    result.status = MilpStatus::kInfeasible;
    return result;
  }

  std::vector<std::vector<double>> warm(split.blocks.size());
  if (options.incumbent && options.incumbent->size() == n) {
    for (std::size_t k = 0; k < split.blocks.size(); ++k) {
      for (std::size_t j : split.blocks[k].cols) warm[k].push_back((*options.incumbent)[j]);
    }
  }

  std::vector<Tree> trees;
  trees.reserve(split.blocks.size());
  std::vector<bool> open(split.blocks.size(), false);
  for (std::size_t k = 0; k < split.blocks.size(); ++k) {
    trees.emplace_back(split.blocks[k].model, options);
    open[k] = trees[k].start(warm[k].empty() ? nullptr : &warm[k]);
    if (trees[k].unbounded()) {
      result.status = MilpStatus::kUnbounded;
      result.objective = -kInfinity;
      return result;
    }
    if (!open[k] && !trees[k].has_incumbent()) {
      result.status = MilpStatus::kInfeasible;
      return result;
    }
  }

  auto global_bound = [&] {
    double sum = split.offset;
    for (const Tree& t : trees) sum += t.bound();
    return sum;
  };
  result.bound_trace.push_back(global_bound());

  std::size_t nodes = 0;
  bool limited = false;
  for (std::size_t k = 0; k < trees.size(); ++k) {
    while (open[k]) {
      if (nodes >= options.node_limit) {
        limited = true;
        break;
      }
      open[k] = trees[k].step();
      ++nodes;
      result.bound_trace.push_back(
          std::max(result.bound_trace.back(), global_bound()));
    }
    if (!trees[k].has_incumbent()) {
      if (limited) break;
      result.status = MilpStatus::kInfeasible;
      return result;
    }
  }

  result.nodes = nodes;
  for (const Tree& t : trees) result.branchings += t.branchings();
  bool complete = !limited;
  for (const Tree& t : trees) complete &= t.has_incumbent();
  result.lower_bound = std::max(result.bound_trace.back(), global_bound());
  if (!complete) {
    result.status = MilpStatus::kNodeLimit;
    result.objective = kInfinity;
    result.gap = kInfinity;
    return result;
  }

  result.solution.assign(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    if (model.lp.lower[j] == model.lp.upper[j]) result.solution[j] = model.lp.lower[j];
  }
  double objective = split.offset;
  for (std::size_t k = 0; k < trees.size(); ++k) {
    trees[k].polish();
    objective += trees[k].incumbent();
    const std::vector<double>& x = trees[k].solution();
    for (std::size_t c = 0; c < x.size(); ++c) result.solution[split.blocks[k].cols[c]] = x[c];
  }
  result.objective = objective;
  result.lower_bound = std::min(result.lower_bound, objective);
  result.gap = (objective - result.lower_bound) / (1.0 + std::abs(objective));
  result.status = limited ? MilpStatus::kNodeLimit : MilpStatus::kOptimal;
  return result;
}

}  // namespace bargeflow
