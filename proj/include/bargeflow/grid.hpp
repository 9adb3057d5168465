#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <numeric>
#include <span>
#include <vector>

#include "bargeflow/error.hpp"

namespace bargeflow {

// Dense row-major array with a fixed rank, used for every indexed parameter
// of the network model.
template <std::size_t Rank, typename T = double>
class Grid {
 public:
  Grid() { dims_.fill(0); }
  explicit Grid(const std::array<std::size_t, Rank>& dims, T fill = T{})
      : dims_(dims),
        values_(std::accumulate(dims.begin(), dims.end(), std::size_t{1},
                                std::multiplies<>()),
                fill) {}

  template <typename... Idx>
  T& operator()(Idx... idx) {
    return values_[offset({static_cast<std::size_t>(idx)...})];
  }
  template <typename... Idx>
  const T& operator()(Idx... idx) const {
    return values_[offset({static_cast<std::size_t>(idx)...})];
  }

  const std::array<std::size_t, Rank>& dims() const { return dims_; }
  std::size_t size() const { return values_.size(); }
  std::span<T> values() { return values_; }
  std::span<const T> values() const { return values_; }

  bool operator==(const Grid&) const = default;

 private:
  std::size_t offset(const std::array<std::size_t, Rank>& idx) const {
    std::size_t flat = 0;
    for (std::size_t k = 0; k < Rank; ++k) {
      if (idx[k] >= dims_[k]) throw InvalidInput("grid index out of range");
      flat = flat * dims_[k] + idx[k];
    }
    return flat;
  }

  std::array<std::size_t, Rank> dims_;
  std::vector<T> values_;
};

}  // namespace bargeflow
