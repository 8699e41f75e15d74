#pragma once

#include <span>
#include <string>
#include <vector>

namespace lemmings {

struct ScoredBag {
  std::string bag_id;
  int true_label = 0;  // -1 or +1 for the binary metrics
  double score = 0.0;
};

// Fraction of bags whose predicted class matches the label. A bag is
// predicted positive when score >= threshold.
double accuracy(std::span<const ScoredBag> scored, double threshold);

// P(score_pos > score_neg) + 0.5 P(tie), from one sorted sweep. Exact: the
// numerator is accumulated in integers.
double auc_roc(std::span<const ScoredBag> scored);

// Area under the empirical ROC polyline for FPR in [0, fpr_cap], divided by
// fpr_cap. Tied scores form diagonal segments; the last segment is cut by
// linear interpolation. fpr_cap = 1 reproduces auc_roc bit for bit.
double auc_roc_partial(std::span<const ScoredBag> scored, double fpr_cap = 0.1);

// Precision-recall staircase: for each distinct score level (descending) the
// recall gained since the previous level is weighted by the precision at this
// level. No interpolation between levels.
double auc_pr(std::span<const ScoredBag> scored);

// Threshold maximizing training accuracy among -inf, +inf and the midpoints of
// consecutive distinct scores. Ties go to the candidate closest to 0, then the
// lower one.
double pick_threshold(std::span<const ScoredBag> train_scored);

}  // namespace lemmings
