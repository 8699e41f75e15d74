#include "lemmings/linear_solver.hpp"

#include <cmath>
#include <string>

#include "lemmings/decision.hpp"
#include "lemmings/errors.hpp"
#include "lemmings/random.hpp"

namespace lemmings {

void TrainConfig::validate() const {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw ParameterError("lambda must be a positive finite number");
  }
  if (iterations < 1) throw ParameterError("iterations must be >= 1");
}

namespace {

bool should_sample(const TrainConfig& cfg, std::size_t t) {
  return cfg.record_objective_every > 0 && (t - 1) % cfg.record_objective_every == 0;
}

void decay(std::vector<double>& w, double factor) {
  for (double& v : w) v *= factor;
}

void axpy(std::vector<double>& w, double a, std::span<const double> x) {
  for (std::size_t j = 0; j < w.size(); ++j) w[j] += a * x[j];
}

void require_finite(const std::vector<double>& w, std::size_t t) {
  for (double v : w) {
    if (!std::isfinite(v)) {
      throw NumericError("non-finite weight after iteration " + std::to_string(t));
    }
  }
}

void require_finite(double score, std::size_t t) {
  if (!std::isfinite(score)) {
    throw NumericError("non-finite bag score at iteration " + std::to_string(t));
  }
}

}  // namespace

std::pair<LinearModel, TrainTrace> train_linear_classifier(const Dataset& dataset,
                                                           const TrainConfig& cfg,
                                                           const LinearTrainHooks& hooks) {
  cfg.validate();
  if (dataset.task() != Task::kClassification) {
    throw DatasetError("linear classifier needs a classification dataset");
  }
  const auto& bags = dataset.bags();
  std::vector<double> w(dataset.dim(), 0.0);
  Rng rng(cfg.seed);
  TrainTrace trace;

  for (std::size_t t = 1; t <= cfg.iterations; ++t) {
    if (should_sample(cfg, t)) {
      trace.objective_samples.push_back({t, objective_classification(dataset, w, cfg.lambda)});
    }
    const Bag& bag = bags[rng.uniform_index(bags.size())];
    const WitnessResult witness = bag_score_linear(bag, w);
    require_finite(witness.score, t);
    const double eta = 1.0 / (cfg.lambda * static_cast<double>(t));
    const double y = bag.label();
    const bool violated = y * witness.score < 1.0;
    decay(w, 1.0 - eta * cfg.lambda);
    if (violated) axpy(w, eta * y, bag.instance(witness.index));
    if (hooks.on_iteration) hooks.on_iteration(t, w);
  }
  require_finite(w, cfg.iterations);

  trace.final_objective = objective_classification(dataset, w, cfg.lambda);
  if (cfg.record_objective_every > 0) {
    trace.objective_samples.push_back({cfg.iterations + 1, trace.final_objective});
  }
  for (const Bag& bag : bags) {
    if (bag.label() * bag_score_linear(bag, w).score < 1.0) ++trace.final_violations;
  }

  LinearModel model;
  model.weights = std::move(w);
  model.meta = {cfg.lambda, cfg.iterations, cfg.seed, Task::kClassification, 0.0};
  return {std::move(model), std::move(trace)};
}

std::pair<LinearModel, TrainTrace> train_linear_ranker(const Dataset& dataset,
                                                       const TrainConfig& cfg,
                                                       const LinearTrainHooks& hooks) {
  cfg.validate();
  const auto& bags = dataset.bags();
  const std::vector<BagPair> pairs = ranked_pairs(dataset);
  std::vector<double> w(dataset.dim(), 0.0);
  Rng rng(cfg.seed);
  TrainTrace trace;
  const double sign = hooks.rank_sign == detail::RankStepSign::kDescent ? 1.0 : -1.0;

  for (std::size_t t = 1; t <= cfg.iterations; ++t) {
    if (should_sample(cfg, t)) {
      trace.objective_samples.push_back({t, objective_ranking(dataset, w, cfg.lambda)});
    }
    const BagPair& pair = pairs[rng.uniform_index(pairs.size())];
    const Bag& hi = bags[pair.higher];
    const Bag& lo = bags[pair.lower];
    const WitnessResult wi = bag_score_linear(hi, w);
    const WitnessResult wj = bag_score_linear(lo, w);
    require_finite(wi.score, t);
    require_finite(wj.score, t);
    const double eta = 1.0 / (cfg.lambda * static_cast<double>(t));
    const bool violated = wi.score - wj.score < 1.0;
    decay(w, 1.0 - eta * cfg.lambda);
    if (violated) {
      const double step = sign * eta * pair.weight;
      axpy(w, step, hi.instance(wi.index));
      axpy(w, -step, lo.instance(wj.index));
    }
    if (hooks.on_iteration) hooks.on_iteration(t, w);
  }
  require_finite(w, cfg.iterations);

  trace.final_objective = objective_ranking(dataset, w, cfg.lambda);
  if (cfg.record_objective_every > 0) {
    trace.objective_samples.push_back({cfg.iterations + 1, trace.final_objective});
  }
  std::vector<double> scores;
  scores.reserve(bags.size());
  for (const Bag& bag : bags) scores.push_back(bag_score_linear(bag, w).score);
  for (const BagPair& p : pairs) {
    if (scores[p.higher] - scores[p.lower] < 1.0) ++trace.final_violations;
  }

  LinearModel model;
  model.weights = std::move(w);
  model.meta = {cfg.lambda, cfg.iterations, cfg.seed, Task::kRanking, 0.0};
  return {std::move(model), std::move(trace)};
}

std::vector<WitnessResult> predict_bags(const LinearModel& model, std::span<const Bag> bags) {
  std::vector<WitnessResult> out;
  out.reserve(bags.size());
  for (const Bag& bag : bags) out.push_back(bag_score_linear(bag, model));
  return out;
}

}  // namespace lemmings
