#include "ozadp/threads.hpp"

#include <cstdlib>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ozadp {

void set_thread_cap(int n) {
#ifdef _OPENMP
    if (n > 0) omp_set_num_threads(n);
#else
    (void)n;
#endif
}

int thread_cap() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

void apply_thread_env() {
    const char* env = std::getenv("OZADP_THREADS");
    if (!env) return;
    int n = std::atoi(env);
    if (n > 0) set_thread_cap(n);
}

}  // namespace ozadp
