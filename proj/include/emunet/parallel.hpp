#pragma once

#include <cstdint>

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace emunet {

inline int hardware_threads() {
#if defined(_OPENMP)
  return omp_get_max_threads();
#else
  return 1;
#endif
}

// OpenMP loop over [0, n). Iteration bodies must write disjoint state and the
// combined result must not depend on iteration order.
template <class F>
void parallel_for(std::int64_t n, F&& body) {
#if defined(_OPENMP)
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) body(i);
#else
  for (std::int64_t i = 0; i < n; ++i) body(i);
#endif
}

// Serial reference loop, kept alongside the parallel one so kernels can be
// checked for bitwise-identical results under both execution modes.
template <class F>
void serial_for(std::int64_t n, F&& body) {
  for (std::int64_t i = 0; i < n; ++i) body(i);
}

}  // namespace emunet
