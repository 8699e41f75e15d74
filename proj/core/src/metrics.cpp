#include "lemmings/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include "lemmings/errors.hpp"

namespace lemmings {
namespace {

struct Level {
  std::uint64_t pos = 0;
  std::uint64_t neg = 0;
};

void require_binary(std::span<const ScoredBag> scored) {
  for (const ScoredBag& s : scored) {
    if (s.true_label != 1 && s.true_label != -1) {
      throw ParameterError("bag '" + s.bag_id + "' has non-binary label " +
                           std::to_string(s.true_label));
    }
    if (!std::isfinite(s.score)) throw NumericError("bag '" + s.bag_id + "' has a non-finite score");
  }
}

// Positive/negative counts per distinct score, highest score first.
std::vector<Level> levels_descending(std::span<const ScoredBag> scored) {
  require_binary(scored);
  std::vector<const ScoredBag*> order;
  order.reserve(scored.size());
  for (const ScoredBag& s : scored) order.push_back(&s);
  std::sort(order.begin(), order.end(),
            [](const ScoredBag* a, const ScoredBag* b) { return a->score > b->score; });
  std::vector<Level> levels;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (i == 0 || order[i]->score != order[i - 1]->score) levels.emplace_back();
    (order[i]->true_label > 0 ? levels.back().pos : levels.back().neg) += 1;
  }
  return levels;
}

void class_totals(const std::vector<Level>& levels, std::uint64_t& pos, std::uint64_t& neg) {
  pos = neg = 0;
  for (const Level& l : levels) {
    pos += l.pos;
    neg += l.neg;
  }
}

}  // namespace

double accuracy(std::span<const ScoredBag> scored, double threshold) {
  if (scored.empty()) throw ParameterError("accuracy of an empty list");
  require_binary(scored);
  std::size_t correct = 0;
  for (const ScoredBag& s : scored) {
    const int predicted = s.score >= threshold ? 1 : -1;
    if (predicted == s.true_label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(scored.size());
}

double auc_roc(std::span<const ScoredBag> scored) { return auc_roc_partial(scored, 1.0); }

double auc_roc_partial(std::span<const ScoredBag> scored, double fpr_cap) {
  if (!(fpr_cap > 0.0 && fpr_cap <= 1.0)) throw ParameterError("fpr_cap must lie in (0, 1]");
  const auto levels = levels_descending(scored);
  std::uint64_t total_pos = 0, total_neg = 0;
  class_totals(levels, total_pos, total_neg);
  if (total_pos == 0 || total_neg == 0) {
    throw ParameterError("AUC needs at least one positive and one negative bag");
  }

  // Work in count units: x = negatives passed, y = positives passed. Twice the
  // area of each full trapezoid is an integer.
  const double neg_cap = fpr_cap * static_cast<double>(total_neg);
  std::uint64_t twice_area = 0;
  double partial = 0.0;
  std::uint64_t tp = 0, fp = 0;
  for (const Level& l : levels) {
    if (l.neg > 0) {
      if (static_cast<double>(fp + l.neg) <= neg_cap) {
        twice_area += l.neg * (2 * tp + l.pos);
      } else {
        const double dx = neg_cap - static_cast<double>(fp);
        if (dx > 0.0) {
          const double slope = static_cast<double>(l.pos) / static_cast<double>(l.neg);
          partial = dx * (2.0 * static_cast<double>(tp) + slope * dx);
        }
        break;
      }
    }
    tp += l.pos;
    fp += l.neg;
  }
  const double denom = 2.0 * static_cast<double>(total_pos) * static_cast<double>(total_neg);
  return (static_cast<double>(twice_area) + partial) / denom / fpr_cap;
}

double auc_pr(std::span<const ScoredBag> scored) {
  const auto levels = levels_descending(scored);
  std::uint64_t total_pos = 0, total_neg = 0;
  class_totals(levels, total_pos, total_neg);
  if (total_pos == 0) throw ParameterError("AUC-PR needs at least one positive bag");
  double area = 0.0;
  std::uint64_t tp = 0, seen = 0;
  for (const Level& l : levels) {
    tp += l.pos;
    seen += l.pos + l.neg;
    if (l.pos == 0) continue;
    const double recall_gain = static_cast<double>(l.pos) / static_cast<double>(total_pos);
    const double precision = static_cast<double>(tp) / static_cast<double>(seen);
    area += recall_gain * precision;
  }
  return area;
}

double pick_threshold(std::span<const ScoredBag> train_scored) {
  auto levels_desc = levels_descending(train_scored);
  std::uint64_t total_pos = 0, total_neg = 0;
  class_totals(levels_desc, total_pos, total_neg);
  if (total_pos == 0 || total_neg == 0) {
    throw ParameterError("pick_threshold needs both classes");
  }
  // Distinct scores ascending, to walk thresholds from -inf upwards.
  std::vector<double> values;
  for (const ScoredBag& s : train_scored) values.push_back(s.score);
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  std::reverse(levels_desc.begin(), levels_desc.end());
  const auto& levels = levels_desc;  // now ascending, aligned with `values`

  // Threshold below every score: all predicted positive.
  std::uint64_t correct = total_pos;
  double best_t = -std::numeric_limits<double>::infinity();
  std::uint64_t best_correct = correct;
  auto consider = [&](double t, std::uint64_t c) {
    if (c > best_correct ||
        (c == best_correct && (std::abs(t) < std::abs(best_t) ||
                               (std::abs(t) == std::abs(best_t) && t < best_t)))) {
      best_correct = c;
      best_t = t;
    }
  };
  for (std::size_t i = 0; i < values.size(); ++i) {
    // Level i drops below the threshold: its negatives become correct, its
    // positives wrong.
    correct = correct + levels[i].neg - levels[i].pos;
    const double t = i + 1 < values.size() ? values[i] + (values[i + 1] - values[i]) / 2.0
                                           : std::numeric_limits<double>::infinity();
    consider(t, correct);
  }
  return best_t;
}

}  // namespace lemmings
