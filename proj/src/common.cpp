#include "rectikit/common.hpp"

#include <cmath>
#include <cstdlib>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace rectikit {

namespace {

int env_cap() {
    const char* s = std::getenv("RECTIKIT_THREADS");
    if (s == nullptr) return 0;
    char* end = nullptr;
    long v = std::strtol(s, &end, 10);
    if (end == s || v < 1) return 0;
    return static_cast<int>(v);
}

int& cap_slot() {
    static int cap = env_cap();
    return cap;
}

}  // namespace

int worker_count() {
#ifdef _OPENMP
    int hw = omp_get_max_threads();
#else
    int hw = 1;
#endif
    int cap = cap_slot();
    if (cap > 0 && cap < hw) hw = cap;
    return hw < 1 ? 1 : hw;
}

void set_worker_cap(int n) {
    cap_slot() = n;
}

bool all_finite(std::span<const double> v) {
    for (double x : v) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

}  // namespace rectikit
