#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lemmings/anchors.hpp"
#include "lemmings/linear_solver.hpp"
#include "lemmings/metrics.hpp"
#include "lemmings/model.hpp"
#include "lemmings/types.hpp"

namespace lemmings {

enum class SolverKind { kLinear, kLocal };

std::string_view to_string(SolverKind kind);

// Which of the four solvers to run, and with which hyperparameters.
struct SolverSpec {
  SolverKind solver = SolverKind::kLinear;
  Task mode = Task::kClassification;
  double lambda = 1e-3;
  // Unset means 50 * (number of training bags).
  std::optional<std::size_t> iterations;
  // Local solvers only. 0 means min(50, number of training instances).
  std::size_t anchors = 0;
  double sigma = 1.0;
  AnchorMethod anchor_method = AnchorMethod::kKMeans;
  // z-score features using statistics of the training bags only.
  bool scale = true;

  void validate() const;
};

inline constexpr std::size_t kDefaultIterationsPerBag = 50;
inline constexpr std::size_t kDefaultMaxAnchors = 50;

std::size_t resolve_iterations(const SolverSpec& spec, const Dataset& train);
std::size_t resolve_anchor_count(const SolverSpec& spec, const Dataset& train);

struct TrainedModel {
  Model model;
  TrainTrace trace;
};

// Fit scaler (optional), choose anchors (local), run the solver, and set the
// decision threshold: 0 for classifiers, pick_threshold() on the training
// bags for rankers. Anchors use derive_seed(seed, 1); the solver uses `seed`.
TrainedModel train_model(const Dataset& train, const SolverSpec& spec, std::uint64_t seed);

// Bag labels as +/-1 for the binary metrics: classification labels as they
// are; a ranking dataset with exactly two ranks maps the higher one to +1.
// Throws DatasetError for more than two ranks.
std::vector<int> binary_labels(const Dataset& dataset);

// ---------------------------------------------------------------------------
// Cross-validation

struct MetricSummary {
  double mean = 0.0;
  double stddev = 0.0;  // population formula, over runs
};

struct FoldResult {
  std::size_t run = 0;
  std::size_t fold = 0;
  std::size_t test_bags = 0;
  std::size_t correct = 0;
  double accuracy = 0.0;
  std::optional<double> auc_roc;  // only when the fold holds both classes
  double threshold = 0.0;
  double lambda = 0.0;       // hyperparameters actually used
  std::size_t anchors = 0;   // 0 for linear solvers
  double sigma = 0.0;
  std::size_t iterations = 0;
  double seconds = 0.0;
};

struct RunResult {
  double accuracy = 0.0;
  double auc_roc = 0.0;
  double auc_roc_01 = 0.0;  // partial AUC up to 10% FPR, normalized
  double auc_pr = 0.0;
  double seconds = 0.0;     // summed fold work time
  std::vector<ScoredBag> pooled;  // held-out scores, dataset order
};

struct EvalReport {
  std::string protocol;  // "k-fold" or "leave-one-bag-out"
  SolverSpec spec;
  std::size_t folds = 0;
  std::size_t runs = 0;
  std::uint64_t seed = 0;
  bool stratified = false;
  bool tuned = false;
  std::vector<FoldResult> fold_results;  // ordered by (run, fold)
  std::vector<RunResult> run_results;
  MetricSummary accuracy, auc_roc, auc_roc_01, auc_pr;
  std::size_t models_trained = 0;  // outer models only
};

struct HyperGrid {
  std::vector<double> lambdas;
  std::vector<std::size_t> anchors;
  std::vector<double> sigmas;
  std::vector<AnchorMethod> methods;

  bool empty() const {
    return lambdas.empty() && anchors.empty() && sigmas.empty() && methods.empty();
  }
};

struct CvOptions {
  std::size_t folds = 10;
  std::size_t runs = 5;
  bool stratified = true;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
  // When set, hyperparameters are tuned per outer fold by an inner grid search.
  std::optional<HyperGrid> grid;
  std::size_t inner_folds = 3;
};

// Repeated k-fold cross-validation. Run r uses folds from
// derive_seed(seed, r); fold f of that run trains with
// derive_seed(run_seed, f + 1). Results are merged by (run, fold) index, so
// any `jobs` value gives identical output.
EvalReport cross_validate(const Dataset& dataset, const SolverSpec& spec, const CvOptions& opts);

// N splits each holding out one bag; same as cross_validate with k = N,
// unstratified, one run. Requires at least three bags.
EvalReport leave_one_bag_out(const Dataset& dataset, const SolverSpec& spec, std::uint64_t seed,
                             std::size_t jobs = 1);

// Summary of pooled held-out scores: population mean and stddev.
MetricSummary summarize(std::span<const double> values);

// ---------------------------------------------------------------------------
// Grid search

struct GridPoint {
  double lambda = 0.0;
  std::size_t anchors = 0;
  double sigma = 0.0;
  AnchorMethod method = AnchorMethod::kKMeans;

  bool operator==(const GridPoint&) const = default;
};

struct GridEntry {
  GridPoint point;
  double mean_auc_roc = 0.0;
  double accuracy = 0.0;
};

struct GridResult {
  GridPoint best;
  std::vector<GridEntry> entries;  // enumeration order
  EvalReport inner;                // inner CV report of the best point
};

// Exhaustive search; unlisted axes keep the base spec's value. Selects the
// highest inner-CV AUC-ROC; ties go to larger lambda, then smaller K, then
// enumeration order (methods, K, sigma, lambda as listed).
GridResult grid_search(const Dataset& dataset, const SolverSpec& base, const HyperGrid& grid,
                       std::size_t inner_k, std::uint64_t seed, std::size_t jobs = 1,
                       bool stratified = true);

SolverSpec with_point(SolverSpec spec, const GridPoint& point);

}  // namespace lemmings
