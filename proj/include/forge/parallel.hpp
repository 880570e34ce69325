#pragma once

// Kernels come in two flavours: a plain loop kept as the reference, and an
// OpenMP loop. Both write to disjoint slots, so results are bit-identical.

#include <cstddef>
#include <exception>
#include <vector>

namespace forge {

enum class Exec { Serial, Parallel };

// Runs body(i) for i in [0, n). Exceptions thrown inside the OpenMP region are
// captured and the one with the lowest index is rethrown afterwards.
template <class Body>
void parallel_for(std::ptrdiff_t n, Exec exec, Body&& body) {
  if (exec == Exec::Serial || n < 2) {
    for (std::ptrdiff_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));
  bool failed = false;
#pragma omp parallel for schedule(static) reduction(|| : failed)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      body(i);
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
      failed = true;
    }
  }
  if (failed) {
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }
}

}  // namespace forge
