#include "cvtele/monte_carlo.hpp"

namespace cvtele {

namespace {

std::uint32_t lo32(std::uint64_t v) { return static_cast<std::uint32_t>(v & 0xffffffffu); }
std::uint32_t hi32(std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); }

// splitmix64 finalizer
std::uint64_t mix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace

SeedStream SeedStream::substream(std::uint64_t id) const {
  return {seed, mix(stream ^ mix(id + 1))};
}

Engine SeedStream::engine(std::uint64_t chunk) const {
  std::seed_seq seq{lo32(seed), hi32(seed), lo32(stream), hi32(stream), lo32(chunk), hi32(chunk)};
  return Engine(seq);
}

void Moments::merge(const Moments& other) {
  if (other.n == 0) return;
  if (n == 0) {
    *this = other;
    return;
  }
  const double total = double(n + other.n);
  const double delta = other.mean - mean;
  mean += delta * double(other.n) / total;
  m2 += other.m2 + delta * delta * double(n) * double(other.n) / total;
  n += other.n;
}

Estimate Moments::estimate() const {
  Estimate e;
  e.n = n;
  e.mean = mean;
  e.std_error = n > 1 ? std::sqrt(m2 / double(n - 1) / double(n)) : 0.0;
  return e;
}

}  // namespace cvtele
