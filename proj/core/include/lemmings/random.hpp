#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>

namespace lemmings {

// Seeded pseudo-random source shared by every stochastic routine.
//
// The engine is std::mt19937_64, whose output sequence is fixed by the C++
// standard. Bounded integers are drawn by rejection on the raw 64-bit output
// (not std::uniform_int_distribution, whose algorithm is library-specific), so
// a given seed yields the same index stream on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform integer in [0, n). Requires n > 0.
  std::size_t uniform_index(std::size_t n);

  // Uniform double in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Fisher-Yates, back to front.
  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const std::size_t j = uniform_index(i);
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

// Derives an independent child seed: SplitMix64 finalizer applied to
// seed ^ SplitMix64(stream + golden-ratio increment).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace lemmings
