#include "lemmings/local_solver.hpp"

#include <cmath>
#include <string>

#include "lemmings/decision.hpp"
#include "lemmings/errors.hpp"
#include "lemmings/random.hpp"

namespace lemmings {
namespace {

Eigen::Map<const Eigen::VectorXd> as_vector(std::span<const double> x) {
  return {x.data(), static_cast<Eigen::Index>(x.size())};
}

std::vector<double> bag_scores(const CodedDataset& data, const Eigen::MatrixXd& w) {
  const auto& bags = data.dataset().bags();
  std::vector<double> scores;
  scores.reserve(bags.size());
  for (std::size_t i = 0; i < bags.size(); ++i) {
    scores.push_back(bag_score_coded(bags[i], data.codes(i), w).score);
  }
  return scores;
}

void require_finite(double score, std::size_t t) {
  if (!std::isfinite(score)) {
    throw NumericError("non-finite bag score at iteration " + std::to_string(t));
  }
}

bool should_sample(const TrainConfig& cfg, std::size_t t) {
  return cfg.record_objective_every > 0 && (t - 1) % cfg.record_objective_every == 0;
}

LocalModel make_model(Eigen::MatrixXd w, const CodedDataset& data, const TrainConfig& cfg,
                      Task task) {
  if (!w.allFinite()) throw NumericError("non-finite weight after training");
  LocalModel model;
  model.weights = std::move(w);
  model.anchors = data.anchors();
  model.meta = {cfg.lambda, cfg.iterations, cfg.seed, task, 0.0};
  return model;
}

}  // namespace

CodedDataset::CodedDataset(const Dataset& dataset, const AnchorSet& anchors)
    : dataset_(&dataset), anchors_(anchors) {
  if (anchors.dim() != dataset.dim()) {
    throw DimensionError("anchors have d=" + std::to_string(anchors.dim()) + ", dataset has d=" +
                         std::to_string(dataset.dim()));
  }
  const LocalCoder coder(anchors_);
  codes_.reserve(dataset.size());
  for (const Bag& bag : dataset.bags()) codes_.push_back(coder.encode(bag));
}

double objective_local_classification(const CodedDataset& data, const Eigen::MatrixXd& weights,
                                      double lambda) {
  if (!(lambda > 0.0)) throw ParameterError("lambda must be positive");
  const auto& bags = data.dataset().bags();
  const auto scores = bag_scores(data, weights);
  double loss = 0.0;
  for (std::size_t i = 0; i < bags.size(); ++i) {
    loss += std::max(0.0, 1.0 - bags[i].label() * scores[i]);
  }
  return 0.5 * lambda * weights.squaredNorm() + loss / static_cast<double>(bags.size());
}

double objective_local_ranking(const CodedDataset& data, const Eigen::MatrixXd& weights,
                               double lambda) {
  if (!(lambda >= 0.0)) throw ParameterError("lambda must be non-negative");
  const auto pairs = ranked_pairs(data.dataset());
  const auto scores = bag_scores(data, weights);
  double loss = 0.0;
  for (const BagPair& p : pairs) loss += pair_hinge(scores[p.higher], scores[p.lower], p.weight);
  return 0.5 * lambda * weights.squaredNorm() + loss / static_cast<double>(pairs.size());
}

std::pair<LocalModel, TrainTrace> train_local_classifier(const CodedDataset& data,
                                                         const TrainConfig& cfg,
                                                         const LocalTrainHooks& hooks) {
  cfg.validate();
  const Dataset& dataset = data.dataset();
  if (dataset.task() != Task::kClassification) {
    throw DatasetError("local classifier needs a classification dataset");
  }
  const auto& bags = dataset.bags();
  const auto d = static_cast<Eigen::Index>(dataset.dim());
  const auto k = static_cast<Eigen::Index>(data.anchors().count());
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(d, k);
  Rng rng(cfg.seed);
  TrainTrace trace;

  for (std::size_t t = 1; t <= cfg.iterations; ++t) {
    if (should_sample(cfg, t)) {
      trace.objective_samples.push_back({t, objective_local_classification(data, w, cfg.lambda)});
    }
    const std::size_t b = rng.uniform_index(bags.size());
    const Bag& bag = bags[b];
    const WitnessResult witness = bag_score_coded(bag, data.codes(b), w);
    require_finite(witness.score, t);
    const double eta = 1.0 / (cfg.lambda * static_cast<double>(t));
    const double y = bag.label();
    const bool violated = y * witness.score < 1.0;
    w *= 1.0 - eta * cfg.lambda;
    if (violated) {
      const auto row = static_cast<Eigen::Index>(witness.index);
      w.noalias() += (eta * y) * as_vector(bag.instance(witness.index)) * data.codes(b).row(row);
    }
    if (hooks.on_iteration) hooks.on_iteration(t, w);
  }

  trace.final_objective = objective_local_classification(data, w, cfg.lambda);
  if (cfg.record_objective_every > 0) {
    trace.objective_samples.push_back({cfg.iterations + 1, trace.final_objective});
  }
  const auto scores = bag_scores(data, w);
  for (std::size_t i = 0; i < bags.size(); ++i) {
    if (bags[i].label() * scores[i] < 1.0) ++trace.final_violations;
  }
  return {make_model(std::move(w), data, cfg, Task::kClassification), std::move(trace)};
}

std::pair<LocalModel, TrainTrace> train_local_classifier(const Dataset& dataset,
                                                         const AnchorSet& anchors,
                                                         const TrainConfig& cfg) {
  const CodedDataset data(dataset, anchors);
  return train_local_classifier(data, cfg);
}

std::pair<LocalModel, TrainTrace> train_local_ranker(const CodedDataset& data,
                                                     const TrainConfig& cfg,
                                                     const LocalTrainHooks& hooks) {
  cfg.validate();
  const Dataset& dataset = data.dataset();
  const auto& bags = dataset.bags();
  const std::vector<BagPair> pairs = ranked_pairs(dataset);
  const auto d = static_cast<Eigen::Index>(dataset.dim());
  const auto k = static_cast<Eigen::Index>(data.anchors().count());
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(d, k);
  Rng rng(cfg.seed);
  TrainTrace trace;
  const double sign = hooks.rank_sign == detail::RankStepSign::kDescent ? 1.0 : -1.0;

  for (std::size_t t = 1; t <= cfg.iterations; ++t) {
    if (should_sample(cfg, t)) {
      trace.objective_samples.push_back({t, objective_local_ranking(data, w, cfg.lambda)});
    }
    const BagPair& pair = pairs[rng.uniform_index(pairs.size())];
    const Bag& hi = bags[pair.higher];
    const Bag& lo = bags[pair.lower];
    const WitnessResult wi = bag_score_coded(hi, data.codes(pair.higher), w);
    const WitnessResult wj = bag_score_coded(lo, data.codes(pair.lower), w);
    require_finite(wi.score, t);
    require_finite(wj.score, t);
    const double eta = 1.0 / (cfg.lambda * static_cast<double>(t));
    const bool violated = wi.score - wj.score < 1.0;
    w *= 1.0 - eta * cfg.lambda;
    if (violated) {
      const double step = sign * eta * pair.weight;
      w.noalias() += step * as_vector(hi.instance(wi.index)) *
                     data.codes(pair.higher).row(static_cast<Eigen::Index>(wi.index));
      w.noalias() -= step * as_vector(lo.instance(wj.index)) *
                     data.codes(pair.lower).row(static_cast<Eigen::Index>(wj.index));
    }
    if (hooks.on_iteration) hooks.on_iteration(t, w);
  }

  trace.final_objective = objective_local_ranking(data, w, cfg.lambda);
  if (cfg.record_objective_every > 0) {
    trace.objective_samples.push_back({cfg.iterations + 1, trace.final_objective});
  }
  const auto scores = bag_scores(data, w);
  for (const BagPair& p : pairs) {
    if (scores[p.higher] - scores[p.lower] < 1.0) ++trace.final_violations;
  }
  return {make_model(std::move(w), data, cfg, Task::kRanking), std::move(trace)};
}

std::pair<LocalModel, TrainTrace> train_local_ranker(const Dataset& dataset,
                                                     const AnchorSet& anchors,
                                                     const TrainConfig& cfg) {
  const CodedDataset data(dataset, anchors);
  return train_local_ranker(data, cfg);
}

std::vector<WitnessResult> predict_bags(const LocalModel& model, std::span<const Bag> bags) {
  const LocalCoder coder(model.anchors);
  std::vector<WitnessResult> out;
  out.reserve(bags.size());
  for (const Bag& bag : bags) out.push_back(bag_score_local(bag, model, coder));
  return out;
}

}  // namespace lemmings
