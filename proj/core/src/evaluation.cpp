#include "lemmings/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <set>
#include <thread>
#include <tuple>

#include "lemmings/decision.hpp"
#include "lemmings/errors.hpp"
#include "lemmings/folds.hpp"
#include "lemmings/local_solver.hpp"
#include "lemmings/random.hpp"
#include "lemmings/scaler.hpp"

namespace lemmings {
namespace {

constexpr std::uint64_t kAnchorStream = 1;
constexpr std::uint64_t kInnerGridStream = 0x6A1D;

// Runs fn(0..count-1) on up to `jobs` threads. The exception of the lowest
// failing index is rethrown after all workers finish.
template <typename Fn>
void parallel_for(std::size_t count, std::size_t jobs, Fn&& fn) {
  std::vector<std::exception_ptr> errors(count);
  auto guarded = [&](std::size_t i) {
    try {
      fn(i);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  const std::size_t workers = std::min(std::max<std::size_t>(jobs, 1), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) guarded(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < count; i = next++) guarded(i);
      });
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

GridPoint point_of(const SolverSpec& spec) {
  return {spec.lambda, spec.solver == SolverKind::kLocal ? spec.anchors : 0,
          spec.solver == SolverKind::kLocal ? spec.sigma : 0.0, spec.anchor_method};
}

bool binary_ranks(const Dataset& dataset) {
  std::set<int> ranks;
  for (const Bag& b : dataset.bags()) ranks.insert(rank_of(dataset, b));
  return ranks.size() == 2;
}

double fit_threshold(const SolverSpec& spec, const Dataset& train,
                     std::span<const double> train_scores) {
  if (spec.mode == Task::kClassification || !binary_ranks(train)) return 0.0;
  const auto labels = binary_labels(train);
  std::vector<ScoredBag> scored;
  scored.reserve(train.size());
  for (std::size_t i = 0; i < train.size(); ++i) {
    scored.push_back({train.bags()[i].id(), labels[i], train_scores[i]});
  }
  return pick_threshold(scored);
}

struct PointOutcome {
  std::vector<double> test_scores;
  double threshold = 0.0;
  std::size_t anchors = 0;
  std::size_t iterations = 0;
};

TrainConfig config_for(double lambda, std::size_t iterations, std::uint64_t seed) {
  TrainConfig cfg;
  cfg.lambda = lambda;
  cfg.iterations = iterations;
  cfg.seed = seed;
  return cfg;
}

// Trains every grid point on one split and scores the held-out bags. Anchor
// sets and local codes are shared between points that agree on them.
std::vector<PointOutcome> evaluate_split(const Dataset& train_raw, std::span<const Bag> test_raw,
                                         const SolverSpec& base,
                                         std::span<const GridPoint> points, std::uint64_t seed) {
  std::optional<Dataset> scaled_train;
  std::vector<Bag> scaled_test;
  if (base.scale) {
    const FeatureScaler scaler = fit_scaler(train_raw);
    scaled_train.emplace(apply_scaler(train_raw, scaler));
    scaled_test = apply_scaler(test_raw, scaler);
  }
  const Dataset& train = scaled_train ? *scaled_train : train_raw;
  const std::span<const Bag> test = base.scale ? std::span<const Bag>(scaled_test) : test_raw;
  const std::size_t iterations = resolve_iterations(base, train);

  std::vector<PointOutcome> out(points.size());
  if (base.solver == SolverKind::kLinear) {
    for (std::size_t p = 0; p < points.size(); ++p) {
      const TrainConfig cfg = config_for(points[p].lambda, iterations, seed);
      LinearModel model = base.mode == Task::kClassification
                              ? train_linear_classifier(train, cfg).first
                              : train_linear_ranker(train, cfg).first;
      std::vector<double> train_scores;
      for (const Bag& b : train.bags()) train_scores.push_back(bag_score_linear(b, model).score);
      out[p].threshold = fit_threshold(base, train, train_scores);
      for (const Bag& b : test) out[p].test_scores.push_back(bag_score_linear(b, model).score);
      out[p].iterations = iterations;
    }
    return out;
  }

  // Local: group by (method, K), then sigma.
  std::map<std::tuple<int, std::size_t, double>, std::vector<std::size_t>> groups;
  for (std::size_t p = 0; p < points.size(); ++p) {
    SolverSpec s = base;
    s.anchors = points[p].anchors;
    groups[{static_cast<int>(points[p].method), resolve_anchor_count(s, train), points[p].sigma}]
        .push_back(p);
  }
  std::map<std::pair<int, std::size_t>, AnchorSet> anchor_cache;
  for (const auto& [key, members] : groups) {
    const auto [method, k, sigma] = key;
    auto it = anchor_cache.find({method, k});
    if (it == anchor_cache.end()) {
      it = anchor_cache
               .emplace(std::pair{method, k},
                        select_anchors(std::span(train.bags()), k,
                                       static_cast<AnchorMethod>(method),
                                       derive_seed(seed, kAnchorStream)))
               .first;
    }
    AnchorSet anchors = it->second;
    anchors.sigma = sigma;
    const CodedDataset coded(train, anchors);
    const LocalCoder coder(anchors);
    std::vector<RowMatrixXd> test_codes;
    for (const Bag& b : test) test_codes.push_back(coder.encode(b));
    for (std::size_t p : members) {
      const TrainConfig cfg = config_for(points[p].lambda, iterations, seed);
      LocalModel model = base.mode == Task::kClassification ? train_local_classifier(coded, cfg).first
                                                           : train_local_ranker(coded, cfg).first;
      std::vector<double> train_scores;
      for (std::size_t i = 0; i < train.size(); ++i) {
        train_scores.push_back(bag_score_coded(train.bags()[i], coded.codes(i), model.weights).score);
      }
      out[p].threshold = fit_threshold(base, train, train_scores);
      for (std::size_t i = 0; i < test.size(); ++i) {
        out[p].test_scores.push_back(bag_score_coded(test[i], test_codes[i], model.weights).score);
      }
      out[p].anchors = k;
      out[p].iterations = iterations;
    }
  }
  return out;
}

struct FoldOutcome {
  std::vector<std::size_t> test_indices;
  PointOutcome result;
  GridPoint point;
  double seconds = 0.0;
};

// Fills fold/run results and the summaries from per-(run, fold) outcomes
// ordered by run then fold.
void assemble(EvalReport& report, const Dataset& dataset, const std::vector<int>& labels,
              const std::vector<FoldOutcome>& outcomes) {
  const std::size_t k = report.folds;
  report.fold_results.clear();
  report.run_results.assign(report.runs, RunResult{});
  for (std::size_t r = 0; r < report.runs; ++r) {
    RunResult& run = report.run_results[r];
    std::vector<std::optional<ScoredBag>> pooled(dataset.size());
    std::size_t correct = 0;
    for (std::size_t f = 0; f < k; ++f) {
      const FoldOutcome& o = outcomes[r * k + f];
      FoldResult fr;
      fr.run = r;
      fr.fold = f;
      fr.test_bags = o.test_indices.size();
      fr.threshold = o.result.threshold;
      fr.lambda = o.point.lambda;
      fr.anchors = o.result.anchors;
      fr.sigma = o.point.sigma;
      fr.iterations = o.result.iterations;
      fr.seconds = o.seconds;
      std::vector<ScoredBag> fold_scored;
      for (std::size_t j = 0; j < o.test_indices.size(); ++j) {
        const std::size_t idx = o.test_indices[j];
        ScoredBag s{dataset.bags()[idx].id(), labels[idx], o.result.test_scores[j]};
        if ((s.score >= fr.threshold ? 1 : -1) == s.true_label) ++fr.correct;
        fold_scored.push_back(s);
        pooled[idx] = std::move(s);
      }
      fr.accuracy = fr.test_bags ? static_cast<double>(fr.correct) / fr.test_bags : 0.0;
      const bool both = std::any_of(fold_scored.begin(), fold_scored.end(),
                                    [](const ScoredBag& s) { return s.true_label > 0; }) &&
                        std::any_of(fold_scored.begin(), fold_scored.end(),
                                    [](const ScoredBag& s) { return s.true_label < 0; });
      if (both) fr.auc_roc = auc_roc(fold_scored);
      correct += fr.correct;
      run.seconds += fr.seconds;
      report.fold_results.push_back(std::move(fr));
    }
    for (auto& s : pooled) {
      if (!s) throw Error("internal: a bag was not held out in run " + std::to_string(r));
      run.pooled.push_back(std::move(*s));
    }
    run.accuracy = static_cast<double>(correct) / static_cast<double>(dataset.size());
    run.auc_roc = auc_roc(run.pooled);
    run.auc_roc_01 = auc_roc_partial(run.pooled, 0.1);
    run.auc_pr = auc_pr(run.pooled);
  }
  auto collect = [&](auto member) {
    std::vector<double> v;
    for (const RunResult& r : report.run_results) v.push_back(r.*member);
    return summarize(v);
  };
  report.accuracy = collect(&RunResult::accuracy);
  report.auc_roc = collect(&RunResult::auc_roc);
  report.auc_roc_01 = collect(&RunResult::auc_roc_01);
  report.auc_pr = collect(&RunResult::auc_pr);
}

std::vector<GridPoint> enumerate_grid(const SolverSpec& base, const HyperGrid& grid) {
  if (grid.empty()) throw ParameterError("hyperparameter grid is empty");
  if (base.solver == SolverKind::kLinear &&
      (!grid.anchors.empty() || !grid.sigmas.empty() || !grid.methods.empty())) {
    throw ParameterError("grid axes anchors/sigma/anchor-method apply only to the local solver");
  }
  const GridPoint b = point_of(base);
  const auto lambdas = grid.lambdas.empty() ? std::vector<double>{b.lambda} : grid.lambdas;
  const auto anchors = grid.anchors.empty() ? std::vector<std::size_t>{b.anchors} : grid.anchors;
  const auto sigmas = grid.sigmas.empty() ? std::vector<double>{b.sigma} : grid.sigmas;
  const auto methods = grid.methods.empty() ? std::vector<AnchorMethod>{b.method} : grid.methods;
  for (double l : lambdas) {
    if (!(l > 0.0) || !std::isfinite(l)) throw ParameterError("grid lambda must be positive");
  }
  for (double s : sigmas) {
    if (!(s >= 0.0) || !std::isfinite(s)) throw ParameterError("grid sigma must be >= 0");
  }
  if (base.solver == SolverKind::kLocal) {
    for (std::size_t k : anchors) {
      if (k == 0 && !grid.anchors.empty()) throw ParameterError("grid anchor count must be >= 1");
    }
  }
  std::vector<GridPoint> points;
  for (AnchorMethod m : methods) {
    for (std::size_t k : anchors) {
      for (double s : sigmas) {
        for (double l : lambdas) points.push_back({l, k, s, m});
      }
    }
  }
  return points;
}

}  // namespace

std::string_view to_string(SolverKind kind) {
  return kind == SolverKind::kLinear ? "linear" : "local";
}

void SolverSpec::validate() const {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ParameterError("lambda must be positive");
  if (iterations && *iterations < 1) throw ParameterError("iterations must be >= 1");
  if (solver == SolverKind::kLocal && (!(sigma >= 0.0) || !std::isfinite(sigma))) {
    throw ParameterError("sigma must be >= 0");
  }
}

std::size_t resolve_iterations(const SolverSpec& spec, const Dataset& train) {
  return spec.iterations.value_or(kDefaultIterationsPerBag * train.size());
}

std::size_t resolve_anchor_count(const SolverSpec& spec, const Dataset& train) {
  if (spec.anchors > 0) return spec.anchors;
  return std::min(kDefaultMaxAnchors, train.instance_count());
}

std::vector<int> binary_labels(const Dataset& dataset) {
  std::set<int> ranks;
  for (const Bag& b : dataset.bags()) ranks.insert(rank_of(dataset, b));
  if (ranks.size() != 2) {
    throw DatasetError("binary metrics need exactly two label values, found " +
                       std::to_string(ranks.size()));
  }
  const int high = *ranks.rbegin();
  std::vector<int> out;
  out.reserve(dataset.size());
  for (const Bag& b : dataset.bags()) out.push_back(rank_of(dataset, b) == high ? 1 : -1);
  return out;
}

TrainedModel train_model(const Dataset& train_raw, const SolverSpec& spec, std::uint64_t seed) {
  spec.validate();
  std::optional<FeatureScaler> scaler;
  std::optional<Dataset> scaled;
  if (spec.scale) {
    scaler = fit_scaler(train_raw);
    scaled.emplace(apply_scaler(train_raw, *scaler));
  }
  const Dataset& train = scaled ? *scaled : train_raw;
  const TrainConfig cfg = config_for(spec.lambda, resolve_iterations(spec, train), seed);

  if (spec.solver == SolverKind::kLinear) {
    auto [model, trace] = spec.mode == Task::kClassification ? train_linear_classifier(train, cfg)
                                                             : train_linear_ranker(train, cfg);
    std::vector<double> scores;
    for (const Bag& b : train.bags()) scores.push_back(bag_score_linear(b, model).score);
    model.meta.threshold = fit_threshold(spec, train, scores);
    model.scaler = scaler;
    return {std::move(model), std::move(trace)};
  }

  AnchorSet anchors =
      select_anchors(std::span(train.bags()), resolve_anchor_count(spec, train),
                     spec.anchor_method, derive_seed(seed, kAnchorStream), spec.sigma);
  const CodedDataset coded(train, anchors);
  auto [model, trace] = spec.mode == Task::kClassification ? train_local_classifier(coded, cfg)
                                                           : train_local_ranker(coded, cfg);
  std::vector<double> scores;
  for (std::size_t i = 0; i < train.size(); ++i) {
    scores.push_back(bag_score_coded(train.bags()[i], coded.codes(i), model.weights).score);
  }
  model.meta.threshold = fit_threshold(spec, train, scores);
  model.scaler = scaler;
  return {std::move(model), std::move(trace)};
}

namespace {

// Rethrows the in-flight exception with `where` prefixed, keeping its type.
[[noreturn]] void rethrow_in_context(const std::string& where) {
  try {
    throw;
  } catch (const DimensionError& e) {
    throw DimensionError(where + ": " + e.what());
  } catch (const DatasetError& e) {
    throw DatasetError(where + ": " + e.what());
  } catch (const ParameterError& e) {
    throw ParameterError(where + ": " + e.what());
  } catch (const FormatError& e) {
    throw FormatError(where + ": " + e.what());
  } catch (const NumericError& e) {
    throw NumericError(where + ": " + e.what());
  } catch (const std::exception& e) {
    throw Error(where + ": " + e.what());
  }
}

}  // namespace

MetricSummary summarize(std::span<const double> values) {
  if (values.empty()) return {};
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  var /= static_cast<double>(values.size());
  return {mean, std::sqrt(var)};
}

SolverSpec with_point(SolverSpec spec, const GridPoint& point) {
  spec.lambda = point.lambda;
  if (spec.solver == SolverKind::kLocal) {
    spec.anchors = point.anchors;
    spec.sigma = point.sigma;
    spec.anchor_method = point.method;
  }
  return spec;
}

EvalReport cross_validate(const Dataset& dataset, const SolverSpec& spec, const CvOptions& opts) {
  spec.validate();
  if (opts.runs < 1) throw ParameterError("runs must be >= 1");
  const std::vector<int> labels = binary_labels(dataset);
  if (opts.grid) enumerate_grid(spec, *opts.grid);  // validate before spending time

  std::vector<FoldPlan> plans;
  for (std::size_t r = 0; r < opts.runs; ++r) {
    plans.push_back(make_folds(dataset, opts.folds, opts.stratified, derive_seed(opts.seed, r)));
  }

  const std::size_t k = opts.folds;
  std::vector<FoldOutcome> outcomes(opts.runs * k);
  parallel_for(outcomes.size(), opts.jobs, [&](std::size_t item) {
    const std::size_t r = item / k;
    const std::size_t f = item % k;
    const auto start = std::chrono::steady_clock::now();
    try {
      const FoldPlan& plan = plans[r];
      const auto train_idx = plan.train_indices(f);
      FoldOutcome& o = outcomes[item];
      o.test_indices = plan.test_indices(f);
      const Dataset train = dataset.subset(train_idx);
      std::vector<Bag> test;
      for (std::size_t i : o.test_indices) test.push_back(dataset.bags()[i]);
      const std::uint64_t fold_seed = derive_seed(plan.seed, f + 1);

      SolverSpec used = spec;
      if (opts.grid) {
        const GridResult g = grid_search(train, spec, *opts.grid, opts.inner_folds,
                                         derive_seed(fold_seed, kInnerGridStream), 1,
                                         opts.stratified);
        used = with_point(spec, g.best);
      }
      o.point = point_of(used);
      const GridPoint one[] = {o.point};
      o.result = std::move(evaluate_split(train, test, used, one, fold_seed).front());
    } catch (...) {
      rethrow_in_context("run " + std::to_string(r + 1) + ", fold " + std::to_string(f + 1));
    }
    outcomes[item].seconds = seconds_since(start);
  });

  EvalReport report;
  report.protocol = "k-fold";
  report.spec = spec;
  report.folds = k;
  report.runs = opts.runs;
  report.seed = opts.seed;
  report.stratified = opts.stratified;
  report.tuned = opts.grid.has_value();
  report.models_trained = opts.runs * k;
  assemble(report, dataset, labels, outcomes);
  return report;
}

EvalReport leave_one_bag_out(const Dataset& dataset, const SolverSpec& spec, std::uint64_t seed,
                             std::size_t jobs) {
  if (dataset.size() < 3) throw DatasetError("leave-one-bag-out needs at least three bags");
  CvOptions opts;
  opts.folds = dataset.size();
  opts.runs = 1;
  opts.stratified = false;
  opts.seed = seed;
  opts.jobs = jobs;
  EvalReport report = cross_validate(dataset, spec, opts);
  report.protocol = "leave-one-bag-out";
  return report;
}

GridResult grid_search(const Dataset& dataset, const SolverSpec& base, const HyperGrid& grid,
                       std::size_t inner_k, std::uint64_t seed, std::size_t jobs,
                       bool stratified) {
  base.validate();
  const std::vector<GridPoint> points = enumerate_grid(base, grid);
  const std::vector<int> labels = binary_labels(dataset);
  const FoldPlan plan = make_folds(dataset, inner_k, stratified, seed);

  // per_fold[f][p]
  std::vector<std::vector<PointOutcome>> per_fold(inner_k);
  std::vector<std::vector<std::size_t>> test_idx(inner_k);
  std::vector<double> fold_seconds(inner_k, 0.0);
  parallel_for(inner_k, jobs, [&](std::size_t f) {
    const auto start = std::chrono::steady_clock::now();
    test_idx[f] = plan.test_indices(f);
    const auto train_idx = plan.train_indices(f);
    const Dataset train = dataset.subset(train_idx);
    std::vector<Bag> test;
    for (std::size_t i : test_idx[f]) test.push_back(dataset.bags()[i]);
    per_fold[f] = evaluate_split(train, test, base, points, derive_seed(seed, f + 1));
    fold_seconds[f] = seconds_since(start);
  });

  GridResult result;
  std::size_t best = 0;
  std::vector<EvalReport> reports;
  for (std::size_t p = 0; p < points.size(); ++p) {
    std::vector<FoldOutcome> outcomes(inner_k);
    for (std::size_t f = 0; f < inner_k; ++f) {
      outcomes[f] = {test_idx[f], per_fold[f][p], points[p], fold_seconds[f]};
    }
    EvalReport rep;
    rep.protocol = "k-fold";
    rep.spec = with_point(base, points[p]);
    rep.folds = inner_k;
    rep.runs = 1;
    rep.seed = seed;
    rep.stratified = stratified;
    rep.models_trained = inner_k;
    assemble(rep, dataset, labels, outcomes);
    result.entries.push_back({points[p], rep.auc_roc.mean, rep.accuracy.mean});
    reports.push_back(std::move(rep));

    if (p == 0) continue;
    const GridEntry& cur = result.entries[p];
    const GridEntry& inc = result.entries[best];
    const bool better =
        cur.mean_auc_roc > inc.mean_auc_roc ||
        (cur.mean_auc_roc == inc.mean_auc_roc &&
         (cur.point.lambda > inc.point.lambda ||
          (cur.point.lambda == inc.point.lambda && cur.point.anchors < inc.point.anchors)));
    if (better) best = p;
  }
  result.best = points[best];
  result.inner = std::move(reports[best]);
  return result;
}

}  // namespace lemmings
