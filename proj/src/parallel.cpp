#include "pcot/parallel.hpp"

#include <chrono>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace pcot::parallel {

namespace {
int g_threads = 0;
}

void set_threads(int n) {
    g_threads = n < 0 ? 0 : n;
#ifdef _OPENMP
    if (g_threads > 0) omp_set_num_threads(g_threads);
#endif
}

int threads() { return g_threads; }

bool enabled() {
#ifdef _OPENMP
    return g_threads != 1;
#else
    return false;
#endif
}

double wtime() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

} // namespace pcot::parallel
