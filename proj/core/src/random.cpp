#include "lemmings/random.hpp"

#include "lemmings/errors.hpp"

namespace lemmings {
namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

std::uint64_t splitmix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

std::size_t Rng::uniform_index(std::size_t n) {
  if (n == 0) throw ParameterError("uniform_index: empty range");
  const auto bound = static_cast<std::uint64_t>(n);
  // 2^64 mod bound; outputs below it would bias the modulo.
  const std::uint64_t reject_below = (0 - bound) % bound;
  std::uint64_t r = 0;
  do {
    r = next();
  } while (r < reject_below);
  return static_cast<std::size_t>(r % bound);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(seed ^ splitmix64(stream + kGolden));
}

}  // namespace lemmings
