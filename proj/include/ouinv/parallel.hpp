#pragma once

#include <cstdlib>
#include <functional>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ouinv {

/// Worker count: hardware threads, capped by the OUKL_THREADS env var.
inline int worker_count() {
#ifdef _OPENMP
    int n = omp_get_max_threads();
#else
    int n = 1;
#endif
    if (const char* env = std::getenv("OUKL_THREADS")) {
        int cap = std::atoi(env);
        if (cap >= 1 && cap < n) n = cap;
    }
    return n;
}

/// Parallel loop over [0, count). Each index writes only its own outputs,
/// so results are identical for any worker count.
template <typename F>
void parallel_for(long count, F&& body) {
#ifdef _OPENMP
    const int nw = worker_count();
#pragma omp parallel for schedule(dynamic, 16) num_threads(nw)
    for (long i = 0; i < count; ++i) body(i);
#else
    for (long i = 0; i < count; ++i) body(i);
#endif
}

} // namespace ouinv
