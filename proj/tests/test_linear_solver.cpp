#include <doctest.h>

#include <cmath>

#include "lemmings/decision.hpp"
#include "lemmings/errors.hpp"
#include "lemmings/linear_solver.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace lemmings;
using lemmings::testing::Gen;
using lemmings::testing::make_bag;

namespace {

// Positive bags: one point with x1 >= 2 plus distractors at x1 <= -1.
// Negative bags: every point at x1 <= -1.
Dataset separable_toy() {
  std::vector<Bag> bags;
  Gen gen(21);
  for (int i = 0; i < 8; ++i) {
    const bool pos = i % 2 == 0;
    testing::Rows rows;
    for (int k = 0; k < 3; ++k) rows.push_back({gen.uniform(-3.0, -1.0), gen.uniform(-1.0, 1.0)});
    if (pos) rows.insert(rows.begin() + i % 3, {gen.uniform(2.0, 3.0), gen.uniform(-1.0, 1.0)});
    bags.push_back(make_bag("t" + std::to_string(i), pos ? 1 : -1, rows));
  }
  return Dataset(std::move(bags), Task::kClassification);
}

Dataset monotone_toy() { return fixtures::monotone_toy(); }

double pairwise_order_accuracy(const Dataset& data, const LinearModel& model) {
  std::vector<double> scores;
  for (const Bag& b : data.bags()) scores.push_back(bag_score_linear(b, model).score);
  return fixtures::pairwise_order_accuracy(data, scores);
}

}  // namespace

TEST_CASE("config validation") {
  const Dataset data = separable_toy();
  CHECK_THROWS_AS(train_linear_classifier(data, {0.0, 10, 1, 0}), ParameterError);
  CHECK_THROWS_AS(train_linear_classifier(data, {-1.0, 10, 1, 0}), ParameterError);
  CHECK_THROWS_AS(train_linear_classifier(data, {INFINITY, 10, 1, 0}), ParameterError);
  CHECK_THROWS_AS(train_linear_classifier(data, {0.1, 0, 1, 0}), ParameterError);
  CHECK_THROWS_AS(train_linear_classifier(monotone_toy(), {0.1, 10, 1, 0}), DatasetError);
}

TEST_CASE("first step overwrites the zero vector with Y x / lambda") {
  Gen gen(1);
  for (int trial = 0; trial < 50; ++trial) {
    const Dataset data = gen.classification(6, 3, 4);
    const double lambda = gen.uniform(0.01, 5.0);
    std::vector<double> w2;
    LinearTrainHooks hooks;
    hooks.on_iteration = [&](std::size_t t, std::span<const double> w) {
      if (t == 1) w2.assign(w.begin(), w.end());
    };
    train_linear_classifier(data, {lambda, 1, static_cast<std::uint64_t>(trial), 0}, hooks);
    oracle::IndexStream stream(static_cast<std::uint64_t>(trial));
    const Bag& bag = data.bags()[stream.next(data.size())];
    // At w = 0 every instance ties at 0, so the witness is instance 0.
    const auto x = bag.instance(0);
    for (std::size_t j = 0; j < x.size(); ++j) {
      CHECK(w2[j] == doctest::Approx(bag.label() * x[j] / lambda).epsilon(1e-15));
    }
  }
}

TEST_CASE("decay identity on non-violating iterations") {
  Gen gen(2);
  const Dataset data = gen.classification(12, 3, 5);
  const double lambda = 0.05;
  std::vector<double> prev(3, 0.0);
  std::size_t decays = 0;
  LinearTrainHooks hooks;
  hooks.on_iteration = [&](std::size_t t, std::span<const double> w) {
    std::vector<double> cur(w.begin(), w.end());
    // Which bag was drawn is not visible here; a pure decay step is
    // recognized by every coordinate matching the scaled previous vector.
    const double eta = 1.0 / (lambda * static_cast<double>(t));
    const double keep = 1.0 - eta * lambda;
    bool pure = true;
    for (std::size_t j = 0; j < cur.size(); ++j) pure = pure && cur[j] == prev[j] * keep;
    if (pure && t > 1) {
      ++decays;
      double np = 0.0;
      double nc = 0.0;
      for (std::size_t j = 0; j < cur.size(); ++j) {
        np += prev[j] * prev[j];
        nc += cur[j] * cur[j];
      }
      CHECK(std::sqrt(nc) == doctest::Approx(keep * std::sqrt(np)).epsilon(1e-14));
    }
    prev = std::move(cur);
  };
  train_linear_classifier(data, {lambda, 3000, 5, 0}, hooks);

  // Cross-check the classification of steps against the oracle witness.
  oracle::IndexStream stream(5);
  std::vector<double> w(3, 0.0);
  std::size_t expected_decays = 0;
  for (std::size_t t = 1; t <= 3000; ++t) {
    const Bag& bag = data.bags()[stream.next(data.size())];
    const auto [score, idx] = oracle::witness(bag, w);
    const double eta = 1.0 / (lambda * static_cast<double>(t));
    for (double& v : w) v *= 1.0 - eta * lambda;
    if (bag.label() * score < 1.0) {
      const auto x = bag.instance(idx);
      for (std::size_t j = 0; j < 3; ++j) w[j] += eta * bag.label() * x[j];
    } else if (t > 1) {
      ++expected_decays;
    }
  }
  CHECK(decays >= expected_decays);
  CHECK(expected_decays > 0);
}

TEST_CASE("singleton bags reproduce the single-instance SVM trajectory") {
  Gen gen(3);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::vector<std::vector<double>> xs;
    std::vector<int> ys;
    std::vector<Bag> bags;
    for (int i = 0; i < 15; ++i) {
      xs.push_back(gen.vec(5));
      ys.push_back(i == 0 ? 1 : i == 1 ? -1 : (gen.coin() ? 1 : -1));
      bags.push_back(Bag("s" + std::to_string(i), ys.back(), 5, xs.back()));
    }
    const Dataset data(std::move(bags), Task::kClassification);
    const auto expected = oracle::svm_trajectory(xs, ys, 0.1, 400, seed);
    std::size_t mismatches = 0;
    LinearTrainHooks hooks;
    hooks.on_iteration = [&](std::size_t t, std::span<const double> w) {
      if (!std::equal(w.begin(), w.end(), expected[t - 1].begin())) ++mismatches;
    };
    const auto [model, trace] = train_linear_classifier(data, {0.1, 400, seed, 0}, hooks);
    CHECK(mismatches == 0);
    CHECK(model.weights == expected.back());
  }
}

TEST_CASE("separable toy reaches zero training errors and lowers the objective") {
  const Dataset data = separable_toy();
  const auto [model, trace] = train_linear_classifier(data, {0.01, 10000, 7, 1000});
  for (const Bag& bag : data.bags()) {
    const double s = bag_score_linear(bag, model).score;
    CHECK((s >= 0.0) == (bag.label() == 1));
  }
  REQUIRE(trace.objective_samples.size() >= 2);
  CHECK(trace.objective_samples.front().iteration == 1);
  CHECK(trace.objective_samples.back().iteration == 10001);
  CHECK(trace.objective_samples.back().objective < trace.objective_samples.front().objective);
  for (std::size_t i = 1; i < trace.objective_samples.size(); ++i) {
    CHECK(trace.objective_samples[i].iteration > trace.objective_samples[i - 1].iteration);
  }
  CHECK(trace.final_objective == trace.objective_samples.back().objective);
}

TEST_CASE("training is deterministic per seed") {
  Gen gen(4);
  const Dataset data = gen.classification(20, 4, 6);
  const auto a = train_linear_classifier(data, {0.01, 2000, 99, 0}).first;
  const auto b = train_linear_classifier(data, {0.01, 2000, 99, 0}).first;
  const auto c = train_linear_classifier(data, {0.01, 2000, 100, 0}).first;
  CHECK(a == b);
  CHECK(a.weights != c.weights);
  const Dataset ranked = gen.ranking(15, 3, 4, 4);
  CHECK(train_linear_ranker(ranked, {0.01, 2000, 5, 0}).first ==
        train_linear_ranker(ranked, {0.01, 2000, 5, 0}).first);
}

TEST_CASE("non-finite weights are reported") {
  const Dataset data({make_bag("p", 1, {{1e300}}), make_bag("n", -1, {{-1e300}})},
                     Task::kClassification);
  CHECK_THROWS_AS(train_linear_classifier(data, {1e-300, 5, 1, 0}), NumericError);
}

TEST_CASE("two-bag ranker orders the bags") {
  const Dataset data({make_bag("hi", 2, {{1}}), make_bag("lo", 1, {{-1}})}, Task::kRanking);
  const auto [model, trace] = train_linear_ranker(data, {0.1, 1000, 3, 0});
  CHECK(bag_score_linear(data.bags()[0], model).score > bag_score_linear(data.bags()[1], model).score);
}

TEST_CASE("monotone toy: scores increase with rank; mirrored sign does not") {
  const Dataset data = monotone_toy();
  const auto [model, trace] = train_linear_ranker(data, {0.01, 5000, 11, 500});
  CHECK(pairwise_order_accuracy(data, model) == 1.0);
  CHECK(trace.objective_samples.back().objective < trace.objective_samples.front().objective);

  LinearTrainHooks mirrored;
  mirrored.rank_sign = detail::RankStepSign::kMirrored;
  const auto [bad, bad_trace] = train_linear_ranker(data, {0.01, 5000, 11, 500}, mirrored);
  CHECK(pairwise_order_accuracy(data, bad) < 1.0);
  CHECK_FALSE(bad_trace.objective_samples.back().objective <
              bad_trace.objective_samples.front().objective);
}

TEST_CASE("ranker on a classification dataset uses positive/negative pairs") {
  const Dataset data = separable_toy();
  const auto [model, trace] = train_linear_ranker(data, {0.01, 5000, 2, 0});
  double min_pos = INFINITY;
  double max_neg = -INFINITY;
  for (const Bag& b : data.bags()) {
    const double s = bag_score_linear(b, model).score;
    if (b.label() == 1) min_pos = std::min(min_pos, s);
    else max_neg = std::max(max_neg, s);
  }
  CHECK(min_pos > max_neg);
  CHECK(model.meta.task == Task::kRanking);
}

TEST_CASE("predict_bags preserves order") {
  LinearModel m;
  m.weights = {1.0, -1.0};
  CHECK(predict_bags(m, std::span<const Bag>{}).empty());
  const std::vector<Bag> bags{make_bag("a", 1, {{1, 0}}), make_bag("b", 1, {{0, 1}, {3, 1}}),
                              make_bag("c", 1, {{-2, 2}})};
  const auto r = predict_bags(m, bags);
  REQUIRE(r.size() == 3);
  CHECK(r[0].score == 1.0);
  CHECK(r[1].score == 2.0);
  CHECK(r[1].index == 1);
  CHECK(r[2].score == -4.0);
  const auto single = predict_bags(m, std::span(bags).subspan(1, 1));
  CHECK(single.front() == bag_score_linear(bags[1], m));
}
