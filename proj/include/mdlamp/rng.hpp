#pragma once

#include <cstdint>

namespace mdlamp {

/// Counter-based splittable generator. Every draw is a pure function of
/// (seed, stream, counter), so parallel shards never share mutable state and
/// any draw can be reproduced from its coordinates alone.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t word(std::uint64_t stream, std::uint64_t counter) const {
    std::uint64_t h = mix(seed_ ^ 0x9e3779b97f4a7c15ull);
    h = mix(h ^ stream);
    h = mix(h ^ counter);
    return h;
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform(std::uint64_t stream, std::uint64_t counter) const {
    return static_cast<double>(word(stream, counter) >> 11) * 0x1.0p-53;
  }

  std::uint64_t seed() const { return seed_; }

 private:
  // splitmix64 finalizer
  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  std::uint64_t seed_;
};

/// Stateful view over one stream of a CounterRng; hands out consecutive
/// counters. Cheap to construct, one per logical consumer (round, trial, ...).
class RandomStream {
 public:
  RandomStream(const CounterRng& gen, std::uint64_t stream)
      : gen_(&gen), stream_(stream) {}

  double next_uniform() { return gen_->uniform(stream_, counter_++); }
  std::uint64_t next_word() { return gen_->word(stream_, counter_++); }

  std::uint64_t stream() const { return stream_; }

 private:
  const CounterRng* gen_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
};

}  // namespace mdlamp
