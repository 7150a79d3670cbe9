#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace rectikit {

using Vec = std::vector<double>;

// Bad configuration or command-line usage. The CLI maps this to exit code 1.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Filesystem or serialization failure. Exit code 2.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Non-finite losses, diverged training, rejected generations. Exit code 3.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Serial runs reduce in batch order and are bit-reproducible; Parallel runs
// fan out over OpenMP workers and reduce per-thread partials in thread order.
enum class ExecMode { Serial, Parallel };

// Number of workers parallel kernels may use: hardware threads capped by the
// RECTIKIT_THREADS environment variable (read once) or set_worker_cap().
int worker_count();
void set_worker_cap(int n);

bool all_finite(std::span<const double> v);

}  // namespace rectikit
