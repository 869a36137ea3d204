#pragma once

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>

namespace torus {

// Bad user input (missing files, file-grammar violations); the CLI maps
// this to exit code 2, everything else unexpected to 3.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr double two_pi = 6.283185307179586476925286766559;
inline constexpr double pi = 3.1415926535897932384626433832795;

// Smallest power of two >= n (n >= 1).
std::size_t next_pow2(std::size_t n);

bool is_pow2(std::size_t n);

// Wraps x into [0, 2*pi).
double wrap_angle(double x);

// Distance on the circle between two angles, in [0, pi].
double torus_distance(double a, double b);

// Number of worker threads: hardware concurrency capped by the
// TORUS_SPLINES_THREADS environment variable when set.
int worker_threads();

// Runs fn(i) for i in [0, n). Chunks are distributed statically over
// worker_threads() threads; fn must only write to disjoint state per i,
// which keeps results independent of the schedule.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

// Locale-independent fixed formatting used by every emitted file.
std::string format_real(double v);

}  // namespace torus
