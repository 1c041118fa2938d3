#pragma once

#ifdef _OPENMP
#include <omp.h>
#endif

namespace tjflow::par {

inline int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

/// jobs semantics used across the library: 0 = library default (all
/// available threads), 1 = serial reference path, n = exactly n workers.
inline int resolve_jobs(int jobs) { return jobs > 0 ? jobs : max_threads(); }

inline void set_max_threads(int n) {
#ifdef _OPENMP
    if (n > 0) omp_set_num_threads(n);
#else
    (void)n;
#endif
}

} // namespace tjflow::par
