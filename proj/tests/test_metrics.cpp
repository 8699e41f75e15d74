#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "lemmings/errors.hpp"
#include "lemmings/metrics.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace lemmings;
using lemmings::testing::Gen;

namespace {

std::vector<ScoredBag> scored(const std::vector<double>& scores, const std::vector<int>& labels) {
  std::vector<ScoredBag> out;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    out.push_back({"b" + std::to_string(i), labels[i], scores[i]});
  }
  return out;
}

// ROC polyline: one vertex per distinct threshold, from (0,0) to (1,1).
std::vector<std::pair<double, double>> roc_points(const std::vector<double>& s, const std::vector<int>& y) {
  std::vector<double> levels(s.begin(), s.end());
  std::sort(levels.rbegin(), levels.rend());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  const double p = static_cast<double>(std::count(y.begin(), y.end(), 1));
  const double n = static_cast<double>(y.size()) - p;
  std::vector<std::pair<double, double>> pts{{0.0, 0.0}};
  for (double t : levels) {
    double tp = 0;
    double fp = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] >= t) (y[i] == 1 ? tp : fp) += 1;
    }
    pts.push_back({fp / n, tp / p});
  }
  return pts;
}

// Trapezoid area of the polyline over [0, cap], cut by interpolation,
// divided by cap.
double partial_area(const std::vector<std::pair<double, double>>& pts, double cap) {
  double area = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    auto [x0, y0] = pts[i - 1];
    auto [x1, y1] = pts[i];
    if (x0 >= cap) break;
    if (x1 > cap) {
      y1 = y0 + (y1 - y0) * (cap - x0) / (x1 - x0);
      x1 = cap;
    }
    area += (x1 - x0) * (y0 + y1) / 2.0;
  }
  return area / cap;
}

// Staircase: sum over distinct score levels of (recall gain) * precision.
double pr_staircase(const std::vector<double>& s, const std::vector<int>& y) {
  std::map<double, std::pair<int, int>, std::greater<>> level;  // score -> (pos, total)
  for (std::size_t i = 0; i < s.size(); ++i) {
    level[s[i]].first += y[i] == 1;
    level[s[i]].second += 1;
  }
  const double p = static_cast<double>(std::count(y.begin(), y.end(), 1));
  double tp = 0;
  double seen = 0;
  double area = 0;
  for (const auto& [score, counts] : level) {
    tp += counts.first;
    seen += counts.second;
    area += (counts.first / p) * (tp / seen);
  }
  return area;
}

double accuracy_at(const std::vector<double>& s, const std::vector<int>& y, double t) {
  double good = 0;
  for (std::size_t i = 0; i < s.size(); ++i) good += (s[i] >= t) == (y[i] == 1);
  return good / static_cast<double>(s.size());
}

void random_case(Gen& gen, std::vector<double>& s, std::vector<int>& y, bool ties) {
  const std::size_t n = 2 + gen.index(199);
  s.clear();
  y.clear();
  for (std::size_t i = 0; i < n; ++i) {
    s.push_back(ties ? static_cast<double>(gen.integer(-5, 5)) : gen.uniform(-3, 3));
    y.push_back(i == 0 ? 1 : i == 1 ? -1 : (gen.coin() ? 1 : -1));
  }
}

}  // namespace

TEST_CASE("accuracy examples") {
  CHECK(accuracy(scored({1, -1}, {1, -1}), 0.0) == 1.0);
  CHECK(accuracy(scored({-1, 1}, {1, -1}), 0.0) == 0.0);
  CHECK(accuracy(scored({2, -1, 0.5, -3}, {1, -1, -1, 1}), 0.0) == 0.5);
  CHECK(accuracy(scored({0.0}, {1}), 0.0) == 1.0);
  CHECK(accuracy(scored({0.0}, {-1}), 0.0) == 0.0);
  CHECK_THROWS_AS(accuracy({}, 0.0), ParameterError);
}

TEST_CASE("auc examples") {
  CHECK(auc_roc(scored({0.9, 0.8, 0.3, 0.1}, {1, 1, -1, -1})) == 1.0);
  CHECK(auc_roc(scored({0.9, 0.7, 0.5, 0.3}, {1, -1, -1, 1})) == 0.5);
  CHECK(auc_roc(scored({1, 1, 1, 1}, {1, -1, 1, -1})) == 0.5);
  CHECK_THROWS_AS(auc_roc(scored({1, 2}, {1, 1})), ParameterError);
  CHECK_THROWS_AS(auc_roc_partial(scored({1, 2}, {-1, -1})), ParameterError);
  CHECK_THROWS_AS(auc_roc_partial(scored({1, 2}, {1, -1}), 0.0), ParameterError);
  CHECK_THROWS_AS(auc_roc_partial(scored({1, 2}, {1, -1}), 1.5), ParameterError);
}

TEST_CASE("property: auc equals pair counting exactly; cap 1 equals auc") {
  Gen gen(41);
  std::vector<double> s;
  std::vector<int> y;
  for (int trial = 0; trial < 1000; ++trial) {
    random_case(gen, s, y, trial % 2 == 0);
    const auto sc = scored(s, y);
    const double a = auc_roc(sc);
    CHECK(a == oracle::auc_pairs(s, y));
    CHECK(auc_roc_partial(sc, 1.0) == a);
  }
}

TEST_CASE("property: auc is invariant under strictly monotone transforms") {
  Gen gen(42);
  std::vector<double> s;
  std::vector<int> y;
  for (int trial = 0; trial < 200; ++trial) {
    random_case(gen, s, y, true);
    std::vector<double> t;
    for (double v : s) t.push_back(v * v * v + 2.0 * v - 7.0);
    CHECK(auc_roc(scored(s, y)) == auc_roc(scored(t, y)));
    std::vector<double> e;
    for (double v : s) e.push_back(std::exp(v));
    CHECK(auc_roc(scored(s, y)) == auc_roc(scored(e, y)));
  }
}

TEST_CASE("partial auc against the ROC polyline") {
  std::vector<double> s{0.9, 0.2};
  std::vector<int> y{1, 1};
  for (int i = 0; i < 10; ++i) {
    s.push_back(0.84 - 0.08 * i);
    y.push_back(-1);
  }
  const auto pts = roc_points(s, y);
  CHECK(pts.size() == 13);
  const double expected = partial_area(pts, 0.1);
  CHECK(auc_roc_partial(scored(s, y), 0.1) == doctest::Approx(expected).epsilon(1e-12));
  // By hand: TPR is 0.5 from FPR 0 to 0.1.
  CHECK(expected == doctest::Approx(0.5));

  CHECK(auc_roc_partial(scored({3, 2, 1, 0}, {1, 1, -1, -1}), 0.1) == 1.0);

  Gen gen(43);
  for (int trial = 0; trial < 300; ++trial) {
    random_case(gen, s, y, trial % 2 == 0);
    const double cap = gen.uniform(0.01, 1.0);
    CHECK(auc_roc_partial(scored(s, y), cap) ==
          doctest::Approx(partial_area(roc_points(s, y), cap)).epsilon(1e-9));
  }
}

TEST_CASE("auc_pr examples and staircase oracle") {
  CHECK(auc_pr(scored({4, 3, 2, 1}, {1, 1, -1, -1})) == 1.0);
  CHECK(auc_pr(scored({4, 3, 2, 1}, {-1, -1, -1, 1})) == 0.25);
  CHECK(auc_pr(scored({4, 3, 2}, {1, 1, 1})) == 1.0);
  CHECK_THROWS_AS(auc_pr(scored({4, 3}, {-1, -1})), ParameterError);

  Gen gen(44);
  std::vector<double> s;
  std::vector<int> y;
  for (int trial = 0; trial < 300; ++trial) {
    random_case(gen, s, y, trial % 2 == 0);
    CHECK(auc_pr(scored(s, y)) == doctest::Approx(pr_staircase(s, y)).epsilon(1e-12));
  }
}

TEST_CASE("pick_threshold") {
  // Candidates: -inf (2/3), 1.5 (1/3), 2.5 (2/3), +inf (1/3). The finite
  // maximizer is closer to 0 than -inf.
  const auto inter = scored({3, 2, 1}, {1, -1, 1});
  const double t = pick_threshold(inter);
  CHECK(t == 2.5);
  CHECK(accuracy(inter, t) == doctest::Approx(2.0 / 3.0));

  const auto sep = scored({5, 4, -1, -2}, {1, 1, -1, -1});
  const double ts = pick_threshold(sep);
  CHECK(ts > -1.0);
  CHECK(ts <= 4.0);
  CHECK(accuracy(sep, ts) == 1.0);
  CHECK_THROWS_AS(pick_threshold(scored({1, 2}, {1, 1})), ParameterError);

  Gen gen(45);
  std::vector<double> s;
  std::vector<int> y;
  for (int trial = 0; trial < 300; ++trial) {
    random_case(gen, s, y, trial % 2 == 0);
    std::vector<double> sorted = s;
    std::sort(sorted.begin(), sorted.end());
    double best = std::max(accuracy_at(s, y, -INFINITY), accuracy_at(s, y, INFINITY));
    for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
      best = std::max(best, accuracy_at(s, y, (sorted[i] + sorted[i + 1]) / 2));
    }
    // Any threshold at all cannot do better than the candidate set.
    for (double v : sorted) best = std::max(best, accuracy_at(s, y, v));
    CHECK(accuracy(scored(s, y), pick_threshold(scored(s, y))) == best);
  }
}

TEST_CASE("property: accuracy of flipped labels is the complement") {
  Gen gen(46);
  std::vector<double> s;
  std::vector<int> y;
  for (int trial = 0; trial < 300; ++trial) {
    random_case(gen, s, y, false);
    const double t = gen.uniform(-3, 3);
    std::vector<int> flipped;
    for (int v : y) flipped.push_back(-v);
    CHECK(accuracy(scored(s, y), t) + accuracy(scored(s, flipped), t) == doctest::Approx(1.0));
  }
}
