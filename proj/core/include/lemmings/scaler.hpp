#pragma once

#include <span>
#include <vector>

namespace lemmings {

class Bag;
class Dataset;

// Per-feature z-score transform. Fitted on training instances only; features
// that are constant on the training data get stddev 1 and map to 0.
struct FeatureScaler {
  std::vector<double> mean;
  std::vector<double> stddev;

  std::size_t dim() const { return mean.size(); }
  bool operator==(const FeatureScaler&) const = default;
};

// Population mean and standard deviation over every instance of `bags`.
// Requires at least two instances in total.
FeatureScaler fit_scaler(std::span<const Bag> bags);
FeatureScaler fit_scaler(const Dataset& train);

Bag apply_scaler(const Bag& bag, const FeatureScaler& scaler);
std::vector<Bag> apply_scaler(std::span<const Bag> bags, const FeatureScaler& scaler);
Dataset apply_scaler(const Dataset& dataset, const FeatureScaler& scaler);

}  // namespace lemmings
