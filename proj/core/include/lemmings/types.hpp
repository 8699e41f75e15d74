#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lemmings/scaler.hpp"

namespace lemmings {

enum class Task { kClassification, kRanking };

std::string_view to_string(Task task);

// A labeled group of instances. Instances are stored row-major in one
// contiguous buffer and owned by exactly one bag.
//
// For classification the label is -1 or +1; for ranking it is an integer rank.
class Bag {
 public:
  // Throws ParameterError for dim 0 or an empty buffer, DimensionError for a
  // partial row, NumericError for a non-finite value.
  Bag(std::string id, int label, std::size_t dim, std::vector<double> features);

  const std::string& id() const { return id_; }
  int label() const { return label_; }
  std::size_t dim() const { return dim_; }
  std::size_t size() const { return features_.size() / dim_; }

  std::span<const double> instance(std::size_t i) const {
    return {features_.data() + i * dim_, dim_};
  }
  std::span<const double> features() const { return features_; }

  bool operator==(const Bag&) const = default;

 private:
  std::string id_;
  int label_;
  std::size_t dim_;
  std::vector<double> features_;
};

// Immutable collection of bags sharing one dimensionality.
//
// Classification datasets carry labels in {-1,+1} (a training split may hold
// only one class);
// ranking datasets need at least two distinct rank values.
class Dataset {
 public:
  Dataset(std::vector<Bag> bags, Task task);

  const std::vector<Bag>& bags() const { return bags_; }
  std::size_t size() const { return bags_.size(); }
  std::size_t dim() const { return dim_; }
  Task task() const { return task_; }
  std::size_t instance_count() const;

  // Bags at `indices`, in that order, re-validated as a dataset.
  Dataset subset(std::span<const std::size_t> indices) const;

  bool operator==(const Dataset&) const = default;

 private:
  std::vector<Bag> bags_;
  Task task_;
  std::size_t dim_ = 0;
};

// Rank used by the ranking solvers. Classification labels map -1 -> 1 and
// +1 -> 2 so every positive/negative pair carries unit weight.
int rank_of(const Dataset& dataset, const Bag& bag);

// Highest-scoring instance of a bag. Ties go to the lowest index.
struct WitnessResult {
  double score = 0.0;
  std::size_t index = 0;

  bool operator==(const WitnessResult&) const = default;
};

struct ModelMeta {
  double lambda = 0.0;
  std::size_t iterations = 0;
  std::uint64_t seed = 0;
  Task task = Task::kClassification;
  // Score cut-off separating the classes: 0 for classifiers, tuned on the
  // training bags for rankers.
  double threshold = 0.0;

  bool operator==(const ModelMeta&) const = default;
};

// f(B; w) = max over x in B of <w, x>. No bias term.
struct LinearModel {
  std::vector<double> weights;
  std::optional<FeatureScaler> scaler;
  ModelMeta meta;

  std::size_t dim() const { return weights.size(); }
  bool operator==(const LinearModel&) const = default;
};

}  // namespace lemmings
