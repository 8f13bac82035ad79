#pragma once

#include <cstddef>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace irsmec::par {

enum class Mode { serial, openmp };

// Process-wide execution mode for the data-parallel kernels. The serial mode
// runs the identical loop bodies in index order and is the reference the
// tests compare against; both modes must produce bitwise-equal results
// because every kernel writes disjoint slots.
Mode mode();
void set_mode(Mode m);
int max_threads();

template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
#ifdef _OPENMP
    if (mode() == Mode::openmp && n > 1) {
#pragma omp parallel for schedule(static)
        for (long long i = 0; i < static_cast<long long>(n); ++i) {
            fn(static_cast<std::size_t>(i));
        }
        return;
    }
#endif
    for (std::size_t i = 0; i < n; ++i) fn(i);
}

}  // namespace irsmec::par
