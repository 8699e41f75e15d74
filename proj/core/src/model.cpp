#include "lemmings/model.hpp"

#include "lemmings/decision.hpp"
#include "lemmings/errors.hpp"
#include "lemmings/linear_solver.hpp"
#include "lemmings/local_solver.hpp"
#include "lemmings/scaler.hpp"

namespace lemmings {

const ModelMeta& meta_of(const Model& model) {
  return std::visit([](const auto& m) -> const ModelMeta& { return m.meta; }, model);
}

std::size_t dim_of(const Model& model) {
  return std::visit([](const auto& m) { return m.dim(); }, model);
}

std::vector<WitnessResult> predict(const Model& model, std::span<const Bag> raw_bags) {
  const std::size_t d = dim_of(model);
  for (const Bag& b : raw_bags) {
    if (b.dim() != d) {
      throw DimensionError("dimension mismatch: bag '" + b.id() + "' has d=" +
                           std::to_string(b.dim()) + ", model has d=" + std::to_string(d));
    }
  }
  return std::visit(
      [&](const auto& m) {
        if (!m.scaler) return predict_bags(m, raw_bags);
        const std::vector<Bag> scaled = apply_scaler(raw_bags, *m.scaler);
        return predict_bags(m, std::span<const Bag>(scaled));
      },
      model);
}

}  // namespace lemmings
