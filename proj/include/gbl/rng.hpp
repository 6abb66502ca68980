#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <thread>
#include <vector>

namespace gbl {

using Engine = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x) noexcept;

// Deterministic substream `index` of the root seed. Streams are derived by
// hashing (seed, index), so chunk k always sees the same numbers no matter
// which thread runs it or how many threads there are.
Engine substream(std::uint64_t seed, std::uint64_t index);

double uniform(Engine& rng, double lo = 0.0, double hi = 1.0);
double gaussian(Engine& rng);

// Worker count: GBL_THREADS if set and positive, else hardware concurrency.
unsigned thread_budget();

// Fixed chunk size for sampling sweeps. Independent of the thread count.
inline constexpr std::size_t kSampleChunk = 4096;

// Runs body(chunk_index, begin, end) over [0, total) split into fixed-size
// chunks on up to thread_budget() threads, then folds the per-chunk results
// in chunk order.
template <class T, class Body, class Merge>
T parallel_chunks(std::size_t total, T init, Body body, Merge merge,
                  std::size_t chunk = kSampleChunk) {
  const std::size_t n_chunks = (total + chunk - 1) / chunk;
  std::vector<T> partial(n_chunks, init);
  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(thread_budget(), std::max<std::size_t>(n_chunks, 1)));
  auto run = [&](unsigned worker) {
    for (std::size_t c = worker; c < n_chunks; c += workers) {
      const std::size_t begin = c * chunk;
      const std::size_t end = std::min(total, begin + chunk);
      partial[c] = body(c, begin, end);
    }
  };
  if (workers <= 1) {
    run(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run, w);
    for (auto& t : pool) t.join();
  }
  T acc = init;
  for (auto& p : partial) acc = merge(acc, p);
  return acc;
}

}  // namespace gbl
