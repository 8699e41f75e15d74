#include "lemmings/types.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "lemmings/errors.hpp"

namespace lemmings {

std::string_view to_string(Task task) {
  return task == Task::kClassification ? "classification" : "ranking";
}

Bag::Bag(std::string id, int label, std::size_t dim, std::vector<double> features)
    : id_(std::move(id)), label_(label), dim_(dim), features_(std::move(features)) {
  if (dim_ == 0) throw ParameterError("bag '" + id_ + "': dimension must be >= 1");
  if (features_.empty()) throw ParameterError("bag '" + id_ + "' has no instances");
  if (features_.size() % dim_ != 0) {
    throw DimensionError("bag '" + id_ + "': feature buffer of " +
                         std::to_string(features_.size()) +
                         " values is not a multiple of dimension " + std::to_string(dim_));
  }
  for (double v : features_) {
    if (!std::isfinite(v)) throw NumericError("bag '" + id_ + "' has a non-finite feature");
  }
}

Dataset::Dataset(std::vector<Bag> bags, Task task) : bags_(std::move(bags)), task_(task) {
  if (bags_.empty()) throw DatasetError("dataset has no bags");
  dim_ = bags_.front().dim();
  for (const Bag& bag : bags_) {
    if (bag.dim() != dim_) {
      throw DimensionError("bag '" + bag.id() + "' has dimension " + std::to_string(bag.dim()) +
                           ", expected " + std::to_string(dim_));
    }
  }
  if (task_ == Task::kClassification) {
    for (const Bag& bag : bags_) {
      if (bag.label() != 1 && bag.label() != -1) {
        throw DatasetError("bag '" + bag.id() + "' has label " + std::to_string(bag.label()) +
                           "; classification labels must be -1 or +1");
      }
    }
  } else {
    const int first = bags_.front().label();
    const bool varied = std::any_of(bags_.begin(), bags_.end(),
                                    [first](const Bag& b) { return b.label() != first; });
    if (!varied) throw DatasetError("ranking dataset needs at least two distinct ranks");
  }
}

std::size_t Dataset::instance_count() const {
  std::size_t n = 0;
  for (const Bag& bag : bags_) n += bag.size();
  return n;
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
  std::vector<Bag> picked;
  picked.reserve(indices.size());
  for (std::size_t i : indices) {
    if (i >= bags_.size()) throw ParameterError("subset index out of range");
    picked.push_back(bags_[i]);
  }
  return Dataset(std::move(picked), task_);
}

int rank_of(const Dataset& dataset, const Bag& bag) {
  if (dataset.task() == Task::kClassification) return bag.label() > 0 ? 2 : 1;
  return bag.label();
}

}  // namespace lemmings
