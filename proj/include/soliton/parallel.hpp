#pragma once

#include <cstddef>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace soliton {

// Runtime switch between the OpenMP kernels and the serial reference path.
// All parallel loops write disjoint per-index outputs; reductions are folded
// serially afterwards, so results are identical (bitwise) in both modes.
void set_parallel(bool enabled);
bool parallel_enabled();

template <class F>
void parallel_for(std::ptrdiff_t n, F&& body) {
#ifdef _OPENMP
    if (parallel_enabled() && n > 2048) {
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = 0; i < n; ++i) body(i);
        return;
    }
#endif
    for (std::ptrdiff_t i = 0; i < n; ++i) body(i);
}

} // namespace soliton
