#pragma once

#include <cstddef>

#ifdef SECJAM_HAVE_OPENMP
#include <omp.h>
#endif

namespace secjam {

/// Execution policy for the per-slot and per-term kernels.
///
/// Every kernel writes into disjoint per-index slots and reductions are done
/// serially afterwards, so `serial` and `parallel` produce bit-identical results.
/// `serial` is the reference path the tests compare against.
enum class Exec { serial, parallel, automatic };

/// Below this many work items `automatic` stays serial.
inline constexpr std::size_t kParallelGrain = 4096;

inline int max_threads() {
#ifdef SECJAM_HAVE_OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

inline Exec resolve(Exec exec, std::size_t n) {
  if (exec != Exec::automatic) return exec;
  return (n >= kParallelGrain && max_threads() > 1) ? Exec::parallel : Exec::serial;
}

/// Calls f(i) for i in [0, n). `f` must not throw and must only write state owned by index i.
template <class F>
void parallel_for(std::size_t n, Exec exec, F&& f) {
#ifdef SECJAM_HAVE_OPENMP
  if (resolve(exec, n) == Exec::parallel) {
    const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < count; ++i) f(static_cast<std::size_t>(i));
    return;
  }
#else
  (void)exec;
#endif
  for (std::size_t i = 0; i < n; ++i) f(i);
}

}  // namespace secjam
