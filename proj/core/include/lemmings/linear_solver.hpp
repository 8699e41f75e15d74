#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "lemmings/types.hpp"

namespace lemmings {

struct TrainConfig {
  double lambda = 1e-3;
  std::size_t iterations = 1000;
  std::uint64_t seed = 0;
  // Objective sampling period for TrainTrace; 0 disables sampling.
  std::size_t record_objective_every = 0;

  // Throws ParameterError unless lambda > 0 (finite) and iterations >= 1.
  void validate() const;
};

struct ObjectiveSample {
  std::size_t iteration = 0;  // t: the sample is the objective at w_t
  double objective = 0.0;
};

struct TrainTrace {
  // Samples at t = 1, 1 + p, 1 + 2p, ... and always at t = T + 1 (the output
  // weights), strictly increasing in t.
  std::vector<ObjectiveSample> objective_samples;
  // Bags (classification) or ranked pairs (ranking) with margin below 1 under
  // the returned weights.
  std::size_t final_violations = 0;
  double final_objective = 0.0;
};

namespace detail {
// Sign of the pairwise step. kMirrored reproduces the printed update
// w += eta (x_J - x_I)(Y_I - Y_J), which ascends the pairwise loss; it exists
// only so tests can demonstrate the difference.
enum class RankStepSign { kDescent, kMirrored };
}  // namespace detail

struct LinearTrainHooks {
  // Called after every update with t and w_{t+1}.
  std::function<void(std::size_t, std::span<const double>)> on_iteration;
  detail::RankStepSign rank_sign = detail::RankStepSign::kDescent;
};

// Stochastic sub-gradient MIL classifier. w_1 = 0; at each t a bag is drawn
// uniformly, its witness found under w_t, eta_t = 1/(lambda t), and
//   w_{t+1} = (1 - eta_t lambda) w_t + [Y <w_t, x*> < 1] eta_t Y x*.
// Returns w_{T+1} unaveraged and unprojected.
std::pair<LinearModel, TrainTrace> train_linear_classifier(const Dataset& dataset,
                                                           const TrainConfig& cfg,
                                                           const LinearTrainHooks& hooks = {});

// Pairwise MIL ranker. Pairs (I, J) with rank_I > rank_J are drawn uniformly
// from the full materialized pair list; on a margin violation
//   w_{t+1} = (1 - eta_t lambda) w_t + eta_t (x*_I - x*_J)(Y_I - Y_J).
std::pair<LinearModel, TrainTrace> train_linear_ranker(const Dataset& dataset,
                                                       const TrainConfig& cfg,
                                                       const LinearTrainHooks& hooks = {});

// Element-wise bag_score_linear, preserving order.
std::vector<WitnessResult> predict_bags(const LinearModel& model, std::span<const Bag> bags);

}  // namespace lemmings
