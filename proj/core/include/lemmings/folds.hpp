#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "lemmings/types.hpp"

namespace lemmings {

// Bag-level fold assignment; all instances of a bag stay together.
struct FoldPlan {
  std::size_t k = 0;
  std::vector<std::size_t> fold_of;  // indexed like dataset.bags()
  bool stratified = false;
  std::uint64_t seed = 0;

  std::vector<std::size_t> test_indices(std::size_t fold) const;
  std::vector<std::size_t> train_indices(std::size_t fold) const;
  bool operator==(const FoldPlan&) const = default;
};

// Shuffles bag indices with `seed` and deals them round-robin into k folds.
// When stratified, each label value is dealt separately, continuing the fold
// cursor from the previous label, so per-label fold sizes differ by at most
// one. Requires k >= 2, k <= N, and (stratified) at least k bags per label.
FoldPlan make_folds(const Dataset& dataset, std::size_t k, bool stratified, std::uint64_t seed);

}  // namespace lemmings
