#pragma once

#include <cstddef>
#include <exception>
#include <functional>

namespace rydress {

/// Caps the worker count used by parallel_for. 0 restores the hardware
/// default.
void set_max_threads(unsigned n);
unsigned max_threads();

/// Calls body(i) for i in [0, n) across worker threads. Results must be
/// written to per-index slots so output never depends on scheduling. The
/// exception from the lowest failing index is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace rydress
