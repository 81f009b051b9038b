// Times the replicate loop twice: once through the serial reference, once
// through the OpenMP path, on the same sampling + exploration workload, and
// checks that both fill identical result slots.
//
// Usage: rig_bench [n] [replicates] [threads]   (defaults 20000 64 0)

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <vector>

#include "rig/exploration.hpp"
#include "rig/parallel.hpp"
#include "rig/regimes.hpp"
#include "rig/rng.hpp"
#include "rig/sampler.hpp"
#include "rig/surplus_triangles.hpp"

namespace {

struct Slot {
  std::int64_t s_end = 0;
  std::uint64_t triangles = 0;
  std::uint64_t edges = 0;
};

double run(bool parallel, std::uint32_t n, std::uint32_t reps,
           std::uint32_t threads, std::vector<Slot>& slots) {
  const auto cfg = rig::build_config(rig::Regime::Moderate, 0.0, 1.0, n);
  slots.assign(reps, Slot{});
  auto body = [&](std::uint32_t r) {
    const std::uint64_t seed = rig::stream_seed(17, r);
    const auto b = rig::sample_bipartite(cfg, seed);
    const rig::RootRule rule{rig::RootRule::Mode::UniformRandom,
                             rig::stream_seed(seed, 1)};
    const auto t = rig::explore(b, rule);
    slots[r] = {t.S.back(), rig::triangle_process(t).T.back(), b.edge_count()};
  };
  const auto t0 = std::chrono::steady_clock::now();
  if (parallel) rig::for_each_replicate(reps, threads, body);
  else rig::for_each_replicate_serial(reps, body);
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

}  // namespace

int main(int argc, char** argv) {
  const std::uint32_t n = argc > 1 ? std::strtoul(argv[1], nullptr, 10) : 20000;
  const std::uint32_t reps = argc > 2 ? std::strtoul(argv[2], nullptr, 10) : 64;
  const std::uint32_t threads = argc > 3 ? std::strtoul(argv[3], nullptr, 10) : 0;
  if (n == 0 || reps == 0) {
    std::fprintf(stderr, "usage: rig_bench [n] [replicates] [threads]\n");
    return 2;
  }

  std::vector<Slot> serial, omp;
  const double ts = run(false, n, reps, threads, serial);
  const double tp = run(true, n, reps, threads, omp);

  std::uint64_t mismatches = 0;
  for (std::uint32_t r = 0; r < reps; ++r)
    mismatches += serial[r].s_end != omp[r].s_end ||
                  serial[r].triangles != omp[r].triangles ||
                  serial[r].edges != omp[r].edges;

  std::printf("workload: n=%u, %u replicates (sample + explore + triangles)\n",
              n, reps);
  std::printf("serial reference: %8.3f s  (%.2f ms/replicate)\n", ts,
              1000.0 * ts / reps);
  std::printf("parallel loop:    %8.3f s  (%.2f ms/replicate)\n", tp,
              1000.0 * tp / reps);
  std::printf("speedup: %.2fx, result mismatches: %llu\n", ts / tp,
              (unsigned long long)mismatches);
  return mismatches == 0 ? 0 : 1;
}
