#ifndef MELKIT_PARALLEL_HPP
#define MELKIT_PARALLEL_HPP

#include <cstddef>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace melkit {

/// Execution policy for grid kernels.  Every kernel computes each output
/// element independently with a fixed-order inner summation, so both paths
/// produce bitwise-identical results; the serial path is the reference the
/// tests compare against.
enum class Exec { serial, omp };

/// Apply fn(i) for i in [0, n).  Exec::omp distributes iterations over
/// OpenMP threads when compiled with OpenMP, otherwise falls back to serial.
template <typename Fn>
void parallel_for(Exec exec, std::ptrdiff_t n, Fn&& fn) {
    if (exec == Exec::omp) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = 0; i < n; ++i) fn(i);
        return;
#endif
    }
    for (std::ptrdiff_t i = 0; i < n; ++i) fn(i);
}

inline int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

} // namespace melkit

#endif
