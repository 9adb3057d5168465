#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace bargeflow {

// Worker count from BARGEFLOW_WORKERS, else the hardware concurrency, at
// least 1.
std::size_t default_workers();

// Result slot of one task: a value, or the error it raised.
template <typename T>
struct Outcome {
  std::optional<T> value;
  std::exception_ptr error;
  std::string message;

  bool ok() const { return value.has_value(); }
  const T& get() const {
    if (!value) std::rethrow_exception(error);
    return *value;
  }
};

// Runs fn(0) .. fn(count - 1) on up to `workers` threads (0 means
// default_workers()). Results are stored by index, so the output does not
// depend on scheduling. A throwing task fills its own slot only.
template <typename T, typename Fn>
std::vector<Outcome<T>> parallel_map_index(std::size_t count, Fn&& fn,
                                           std::size_t workers) {
  std::vector<Outcome<T>> out(count);
  auto run_one = [&](std::size_t k) {
    try {
      out[k].value.emplace(fn(k));
    } catch (const std::exception& e) {
      out[k].error = std::current_exception();
      out[k].message = e.what();
    } catch (...) {
      out[k].error = std::current_exception();
      out[k].message = "unknown error";
    }
  };
  if (workers == 0) workers = default_workers();
  const std::size_t threads = std::min(workers, count);
  if (threads <= 1) {
    for (std::size_t k = 0; k < count; ++k) run_one(k);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (std::size_t k = next++; k < count; k = next++) run_one(k);
    });
  }
  for (std::thread& t : pool) t.join();
  return out;
}

template <typename T>
std::vector<Outcome<T>> parallel_map(const std::vector<std::function<T()>>& tasks,
                                     std::size_t workers) {
  return parallel_map_index<T>(
      tasks.size(), [&](std::size_t k) { return tasks[k](); }, workers);
}

}  // namespace bargeflow
