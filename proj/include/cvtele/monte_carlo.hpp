#pragma once

// Chunked Monte Carlo with deterministic substreams. Samples are split into
// fixed-size chunks; chunk c always draws from the engine seeded by
// (seed, stream, c) and partial statistics are merged in chunk order, so the
// result does not depend on how many worker threads ran.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <random>
#include <thread>
#include <vector>

#include "cvtele/error.hpp"

namespace cvtele {

struct Estimate {
  double mean = 0;
  double std_error = 0;
  std::int64_t n = 0;
};

using Engine = std::mt19937_64;

/// A seed plus a stream id; distinct streams of one seed are independent.
struct SeedStream {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;

  SeedStream substream(std::uint64_t id) const;
  Engine engine(std::uint64_t chunk) const;
};

inline constexpr std::int64_t kChunkSize = 1 << 14;

/// Running count/mean/sum of squared deviations; merge() is Chan's update.
struct Moments {
  std::int64_t n = 0;
  double mean = 0;
  double m2 = 0;

  void add(double x) {
    ++n;
    const double delta = x - mean;
    mean += delta / double(n);
    m2 += delta * (x - mean);
  }

  void merge(const Moments& other);
  Estimate estimate() const;
};

/// Mean of sample(engine) over n draws, spread over `threads` workers.
template <typename Sampler>
Estimate parallel_mean(std::int64_t n, const SeedStream& seeds, int threads, Sampler&& sample) {
  if (n < 1) throw Error(Errc::invalid_argument, "sample count must be positive");
  const std::int64_t chunks = (n + kChunkSize - 1) / kChunkSize;
  std::vector<Moments> partial(static_cast<std::size_t>(chunks));
  std::atomic<std::int64_t> next{0};
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(std::max(threads, 1)));

  auto work = [&](int worker) {
    try {
      for (std::int64_t c = next++; c < chunks; c = next++) {
        Engine eng = seeds.engine(static_cast<std::uint64_t>(c));
        const std::int64_t count = std::min(kChunkSize, n - c * kChunkSize);
        Moments& m = partial[static_cast<std::size_t>(c)];
        for (std::int64_t i = 0; i < count; ++i) m.add(sample(eng));
      }
    } catch (...) {
      errors[static_cast<std::size_t>(worker)] = std::current_exception();
      next = chunks;
    }
  };

  const int workers = static_cast<int>(std::clamp<std::int64_t>(threads, 1, chunks));
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  Moments total;
  for (const auto& m : partial) total.merge(m);
  return total.estimate();
}

}  // namespace cvtele
