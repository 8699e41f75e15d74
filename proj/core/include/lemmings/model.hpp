#pragma once

#include <span>
#include <variant>
#include <vector>

#include "lemmings/local_coding.hpp"
#include "lemmings/types.hpp"

namespace lemmings {

using Model = std::variant<LinearModel, LocalModel>;

const ModelMeta& meta_of(const Model& model);
std::size_t dim_of(const Model& model);

// Scores raw (unscaled) bags: the model's scaler, when present, is applied
// first. Throws DimensionError naming both dimensions on mismatch.
std::vector<WitnessResult> predict(const Model& model, std::span<const Bag> raw_bags);

}  // namespace lemmings
