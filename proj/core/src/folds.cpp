#include "lemmings/folds.hpp"

#include <map>
#include <numeric>
#include <string>

#include "lemmings/errors.hpp"
#include "lemmings/random.hpp"

namespace lemmings {

std::vector<std::size_t> FoldPlan::test_indices(std::size_t fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fold_of.size(); ++i) {
    if (fold_of[i] == fold) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> FoldPlan::train_indices(std::size_t fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fold_of.size(); ++i) {
    if (fold_of[i] != fold) out.push_back(i);
  }
  return out;
}

FoldPlan make_folds(const Dataset& dataset, std::size_t k, bool stratified, std::uint64_t seed) {
  const std::size_t n = dataset.size();
  if (k < 2) throw ParameterError("fold count must be >= 2");
  if (k > n) {
    throw ParameterError("fold count " + std::to_string(k) + " exceeds the " + std::to_string(n) +
                         " bags");
  }
  std::map<int, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < n; ++i) {
    const int key = stratified ? dataset.bags()[i].label() : 0;
    groups[key].push_back(i);
  }
  if (stratified) {
    for (const auto& [label, members] : groups) {
      if (members.size() < k) {
        throw ParameterError("label " + std::to_string(label) + " has " +
                             std::to_string(members.size()) + " bags, fewer than k=" +
                             std::to_string(k));
      }
    }
  }

  FoldPlan plan{k, std::vector<std::size_t>(n, 0), stratified, seed};
  Rng rng(seed);
  std::size_t cursor = 0;
  for (auto& [label, members] : groups) {
    rng.shuffle(std::span(members));
    for (std::size_t idx : members) plan.fold_of[idx] = cursor++ % k;
  }
  return plan;
}

}  // namespace lemmings
