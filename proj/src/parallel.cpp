#include "bargeflow/parallel.hpp"

#include <cstdlib>
#include <string>

namespace bargeflow {

std::size_t default_workers() {
  if (const char* env = std::getenv("BARGEFLOW_WORKERS")) {
    try {
      const long value = std::stol(env);
      if (value > 0) return static_cast<std::size_t>(value);
    } catch (const std::exception&) {
      // Fall through to the hardware default.
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

}  // namespace bargeflow
