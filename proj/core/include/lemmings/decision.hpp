#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lemmings/types.hpp"

namespace lemmings {

// Sequential left-to-right dot product. The summation order is fixed so that
// solver trajectories are reproducible bit for bit.
inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// max over instances of <w, x>; lowest index wins ties.
// Throws DimensionError naming both dimensions on mismatch.
WitnessResult bag_score_linear(const Bag& bag, std::span<const double> weights);
WitnessResult bag_score_linear(const Bag& bag, const LinearModel& model);

// max(0, 1 - Y f(B; w)).
double hinge_loss_classification(const Bag& bag, const LinearModel& model);

// max(0, 1 - f_I + f_J) * (Y_I - Y_J) using the bags' own labels as ranks.
// Throws ParameterError unless Y_I > Y_J.
double hinge_loss_ranking(const Bag& higher, const Bag& lower, const LinearModel& model);

// Pairwise hinge from precomputed bag scores.
double pair_hinge(double score_higher, double score_lower, int rank_gap);

// Ordered bag pair (higher, lower) with rank(higher) > rank(lower).
struct BagPair {
  std::uint32_t higher = 0;
  std::uint32_t lower = 0;
  int weight = 1;  // rank difference
};

// Every ordered pair of the dataset under rank_of(). Throws DatasetError when
// no pair exists.
std::vector<BagPair> ranked_pairs(const Dataset& dataset);

// lambda/2 ||w||^2 + (1/N) sum_I max(0, 1 - Y_I f(B_I; w)).
double objective_classification(const Dataset& dataset, std::span<const double> weights,
                                double lambda);
double objective_classification(const Dataset& dataset, const LinearModel& model, double lambda);

// lambda/2 ||w||^2 + (1/M) sum over ranked pairs of the pairwise hinge.
// lambda = 0 is accepted so the bare loss can be inspected.
double objective_ranking(const Dataset& dataset, std::span<const double> weights, double lambda);
double objective_ranking(const Dataset& dataset, const LinearModel& model, double lambda);

}  // namespace lemmings
