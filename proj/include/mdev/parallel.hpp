#pragma once

#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace mdev {

// --workers fallback: MDL_WORKERS env var, then hardware concurrency.
inline int default_workers() {
  if (const char* env = std::getenv("MDL_WORKERS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<int>(v);
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc ? static_cast<int>(hc) : 1;
}

// Runs chunk_fn(begin, end) over fixed-size chunks of [0, total) and folds the
// per-chunk partials in chunk order. Chunk boundaries depend only on `total`
// and `chunk_size`, never on the worker count, so floating-point reductions
// and counts come out identical for any scheduling.
template <typename Partial, typename ChunkFn, typename CombineFn>
Partial parallel_chunked(std::uint64_t total, std::uint64_t chunk_size, int workers,
                         ChunkFn chunk_fn, Partial init, CombineFn combine) {
  if (total == 0) return init;
  if (chunk_size == 0) chunk_size = 1;
  const std::uint64_t nchunks = (total + chunk_size - 1) / chunk_size;
  if (workers < 1) workers = 1;

  std::vector<Partial> partials(static_cast<std::size_t>(nchunks), init);
  if (workers == 1 || nchunks == 1) {
    for (std::uint64_t c = 0; c < nchunks; ++c) {
      const std::uint64_t b = c * chunk_size;
      const std::uint64_t e = std::min(total, b + chunk_size);
      partials[static_cast<std::size_t>(c)] = chunk_fn(b, e);
    }
  } else {
    std::atomic<std::uint64_t> next{0};
    std::exception_ptr error;
    std::atomic<bool> failed{false};
    auto work = [&] {
      for (;;) {
        const std::uint64_t c = next.fetch_add(1);
        if (c >= nchunks || failed.load()) return;
        const std::uint64_t b = c * chunk_size;
        const std::uint64_t e = std::min(total, b + chunk_size);
        try {
          partials[static_cast<std::size_t>(c)] = chunk_fn(b, e);
        } catch (...) {
          if (!failed.exchange(true)) error = std::current_exception();
          return;
        }
      }
    };
    std::vector<std::thread> pool;
    const int nthreads = static_cast<int>(std::min<std::uint64_t>(workers, nchunks));
    pool.reserve(static_cast<std::size_t>(nthreads));
    for (int i = 0; i < nthreads; ++i) pool.emplace_back(work);
    for (auto& t : pool) t.join();
    if (failed.load()) std::rethrow_exception(error);
  }

  Partial acc = init;
  for (const auto& p : partials) acc = combine(acc, p);
  return acc;
}

}  // namespace mdev
