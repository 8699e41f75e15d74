#include "lemmings/scaler.hpp"

#include <cmath>

#include "lemmings/errors.hpp"
#include "lemmings/types.hpp"

namespace lemmings {

FeatureScaler fit_scaler(std::span<const Bag> bags) {
  if (bags.empty()) throw DatasetError("fit_scaler: no training bags");
  const std::size_t d = bags.front().dim();
  std::size_t n = 0;
  FeatureScaler s{std::vector<double>(d, 0.0), std::vector<double>(d, 0.0)};
  for (const Bag& bag : bags) {
    if (bag.dim() != d) throw DimensionError("fit_scaler: mixed dimensions");
    for (std::size_t i = 0; i < bag.size(); ++i) {
      const auto x = bag.instance(i);
      for (std::size_t j = 0; j < d; ++j) s.mean[j] += x[j];
    }
    n += bag.size();
  }
  if (n < 2) throw DatasetError("fit_scaler: needs at least two training instances");
  for (double& m : s.mean) m /= static_cast<double>(n);
  for (const Bag& bag : bags) {
    for (std::size_t i = 0; i < bag.size(); ++i) {
      const auto x = bag.instance(i);
      for (std::size_t j = 0; j < d; ++j) {
        const double c = x[j] - s.mean[j];
        s.stddev[j] += c * c;
      }
    }
  }
  for (double& v : s.stddev) {
    v = std::sqrt(v / static_cast<double>(n));
    if (v == 0.0) v = 1.0;  // inert feature
  }
  return s;
}

FeatureScaler fit_scaler(const Dataset& train) { return fit_scaler(std::span(train.bags())); }

Bag apply_scaler(const Bag& bag, const FeatureScaler& scaler) {
  const std::size_t d = bag.dim();
  if (scaler.dim() != d) {
    throw DimensionError("scaler has dimension " + std::to_string(scaler.dim()) + ", bag '" +
                         bag.id() + "' has " + std::to_string(d));
  }
  std::vector<double> out(bag.features().begin(), bag.features().end());
  for (std::size_t k = 0; k < out.size(); ++k) {
    const std::size_t j = k % d;
    out[k] = (out[k] - scaler.mean[j]) / scaler.stddev[j];
  }
  return Bag(bag.id(), bag.label(), d, std::move(out));
}

std::vector<Bag> apply_scaler(std::span<const Bag> bags, const FeatureScaler& scaler) {
  std::vector<Bag> out;
  out.reserve(bags.size());
  for (const Bag& bag : bags) out.push_back(apply_scaler(bag, scaler));
  return out;
}

Dataset apply_scaler(const Dataset& dataset, const FeatureScaler& scaler) {
  return Dataset(apply_scaler(std::span(dataset.bags()), scaler), dataset.task());
}

}  // namespace lemmings
