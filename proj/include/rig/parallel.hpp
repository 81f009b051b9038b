#pragma once

#include <cstdint>
#include <exception>
#include <mutex>
#include <utility>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace rig {

// Runs body(r) for every r in [0, count). Each replicate derives its own RNG
// stream from its index and writes only its own result slot, so the output is
// identical for any thread count.
template <class F>
void for_each_replicate_serial(std::uint32_t count, F&& body) {
  for (std::uint32_t r = 0; r < count; ++r) body(r);
}

// OpenMP twin of for_each_replicate_serial. threads == 0 means "library
// default". The first exception thrown by any replicate is rethrown once the
// loop has drained; later ones are dropped.
template <class F>
void for_each_replicate(std::uint32_t count, std::uint32_t threads, F&& body) {
#ifdef _OPENMP
  if (count == 0) return;
  std::exception_ptr first;
  std::mutex mu;
  const int nt = threads > 0 ? static_cast<int>(threads) : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(nt)
  for (std::int64_t r = 0; r < static_cast<std::int64_t>(count); ++r) {
    try {
      body(static_cast<std::uint32_t>(r));
    } catch (...) {
      std::lock_guard<std::mutex> lock(mu);
      if (!first) first = std::current_exception();
    }
  }
  if (first) std::rethrow_exception(first);
#else
  (void)threads;
  for_each_replicate_serial(count, std::forward<F>(body));
#endif
}

}  // namespace rig
