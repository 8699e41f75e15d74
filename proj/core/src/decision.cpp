#include "lemmings/decision.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lemmings/errors.hpp"

namespace lemmings {
namespace {

void check_dims(const Bag& bag, std::size_t model_dim) {
  if (bag.dim() != model_dim) {
    throw DimensionError("dimension mismatch: bag '" + bag.id() + "' has d=" +
                         std::to_string(bag.dim()) + ", model has d=" + std::to_string(model_dim));
  }
}

double half_squared_norm(std::span<const double> w) { return 0.5 * dot(w, w); }

}  // namespace

WitnessResult bag_score_linear(const Bag& bag, std::span<const double> weights) {
  check_dims(bag, weights.size());
  WitnessResult best{dot(weights, bag.instance(0)), 0};
  for (std::size_t i = 1; i < bag.size(); ++i) {
    const double s = dot(weights, bag.instance(i));
    if (s > best.score) best = {s, i};
  }
  return best;
}

WitnessResult bag_score_linear(const Bag& bag, const LinearModel& model) {
  return bag_score_linear(bag, std::span<const double>(model.weights));
}

double hinge_loss_classification(const Bag& bag, const LinearModel& model) {
  const double f = bag_score_linear(bag, model).score;
  return std::max(0.0, 1.0 - bag.label() * f);
}

double pair_hinge(double score_higher, double score_lower, int rank_gap) {
  return std::max(0.0, 1.0 - score_higher + score_lower) * rank_gap;
}

double hinge_loss_ranking(const Bag& higher, const Bag& lower, const LinearModel& model) {
  if (higher.label() <= lower.label()) {
    throw ParameterError("hinge_loss_ranking requires Y_I > Y_J, got " +
                         std::to_string(higher.label()) + " and " + std::to_string(lower.label()));
  }
  return pair_hinge(bag_score_linear(higher, model).score, bag_score_linear(lower, model).score,
                    higher.label() - lower.label());
}

std::vector<BagPair> ranked_pairs(const Dataset& dataset) {
  const auto& bags = dataset.bags();
  std::vector<BagPair> pairs;
  for (std::size_t i = 0; i < bags.size(); ++i) {
    const int ri = rank_of(dataset, bags[i]);
    for (std::size_t j = 0; j < bags.size(); ++j) {
      const int rj = rank_of(dataset, bags[j]);
      if (ri > rj) {
        pairs.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j), ri - rj});
      }
    }
  }
  if (pairs.empty()) throw DatasetError("dataset has no ranked bag pair");
  return pairs;
}

double objective_classification(const Dataset& dataset, std::span<const double> weights,
                                double lambda) {
  if (!(lambda > 0.0)) throw ParameterError("lambda must be positive");
  double loss = 0.0;
  for (const Bag& bag : dataset.bags()) {
    loss += std::max(0.0, 1.0 - bag.label() * bag_score_linear(bag, weights).score);
  }
  return lambda * half_squared_norm(weights) + loss / static_cast<double>(dataset.size());
}

double objective_classification(const Dataset& dataset, const LinearModel& model, double lambda) {
  return objective_classification(dataset, std::span<const double>(model.weights), lambda);
}

double objective_ranking(const Dataset& dataset, std::span<const double> weights, double lambda) {
  if (!(lambda >= 0.0)) throw ParameterError("lambda must be non-negative");
  const auto pairs = ranked_pairs(dataset);
  std::vector<double> scores;
  scores.reserve(dataset.size());
  for (const Bag& bag : dataset.bags()) scores.push_back(bag_score_linear(bag, weights).score);
  double loss = 0.0;
  for (const BagPair& p : pairs) loss += pair_hinge(scores[p.higher], scores[p.lower], p.weight);
  return lambda * half_squared_norm(weights) + loss / static_cast<double>(pairs.size());
}

double objective_ranking(const Dataset& dataset, const LinearModel& model, double lambda) {
  return objective_ranking(dataset, std::span<const double>(model.weights), lambda);
}

}  // namespace lemmings
