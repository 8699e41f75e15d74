#include <doctest.h>

#include <cmath>
#include <numeric>

#include "lemmings/decision.hpp"
#include "lemmings/errors.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace lemmings;
using lemmings::testing::Gen;
using lemmings::testing::make_bag;

namespace {

LinearModel model_of(std::vector<double> w) {
  LinearModel m;
  m.weights = std::move(w);
  return m;
}

}  // namespace

TEST_CASE("bag construction validates shape and values") {
  CHECK_THROWS_AS(Bag("a", 1, 2, {}), ParameterError);
  CHECK_THROWS_AS(Bag("a", 1, 0, {1.0}), ParameterError);
  CHECK_THROWS_AS(Bag("a", 1, 2, {1.0, 2.0, 3.0}), DimensionError);
  CHECK_THROWS_AS(Bag("a", 1, 1, {NAN}), NumericError);
  CHECK_THROWS_AS(Bag("a", 1, 1, {INFINITY}), NumericError);
  const Bag b("a", 1, 2, {1, 2, 3, 4});
  CHECK(b.size() == 2);
  CHECK(b.instance(1)[0] == 3.0);
}

TEST_CASE("dataset invariants") {
  const Bag pos = make_bag("p", 1, {{1.0, 0.0}});
  const Bag neg = make_bag("n", -1, {{0.0, 1.0}});
  CHECK_NOTHROW(Dataset({pos, neg}, Task::kClassification));
  CHECK_NOTHROW(Dataset({pos}, Task::kClassification));
  CHECK_THROWS_AS(Dataset({}, Task::kClassification), DatasetError);
  CHECK_THROWS_AS(Dataset({pos, make_bag("x", 2, {{0.0, 0.0}})}, Task::kClassification),
                  DatasetError);
  CHECK_THROWS_AS(Dataset({pos, make_bag("n3", -1, {{0.0, 1.0, 2.0}})}, Task::kClassification),
                  DimensionError);
  CHECK_THROWS_AS(Dataset({make_bag("a", 3, {{1.0}}), make_bag("b", 3, {{2.0}})}, Task::kRanking),
                  DatasetError);
  const Dataset d({pos, neg, make_bag("n2", -1, {{1.0, 1.0}, {2.0, 2.0}})},
                  Task::kClassification);
  CHECK(d.instance_count() == 4);
  CHECK(rank_of(d, pos) == 2);
  CHECK(rank_of(d, neg) == 1);
}

TEST_CASE("bag_score_linear examples") {
  const auto r1 = bag_score_linear(make_bag("a", 1, {{2, 5}, {3, -1}}), model_of({1, 0}));
  CHECK(r1.score == 3.0);
  CHECK(r1.index == 1);
  const auto r2 = bag_score_linear(make_bag("a", 1, {{2, 5}, {3, -1}}), model_of({0, 0}));
  CHECK(r2.score == 0.0);
  CHECK(r2.index == 0);
  // <w,x> = -1, 0, 6
  const auto r3 = bag_score_linear(make_bag("a", 1, {{1, 1}, {4, 2}, {0, -3}}), model_of({1, -2}));
  CHECK(r3.score == 6.0);
  CHECK(r3.index == 2);
}

TEST_CASE("dimension mismatch names both dimensions") {
  try {
    bag_score_linear(make_bag("a", 1, {{1, 2, 3}}), model_of({1, 2}));
    FAIL("expected DimensionError");
  } catch (const DimensionError& e) {
    const std::string msg = e.what();
    CHECK(msg.find('3') != std::string::npos);
    CHECK(msg.find('2') != std::string::npos);
  }
}

TEST_CASE("hinge loss examples") {
  CHECK(hinge_loss_classification(make_bag("a", -1, {{3, 4}}), model_of({0, 0})) == 1.0);
  CHECK(hinge_loss_classification(make_bag("a", 1, {{5}}), model_of({1})) == 0.0);
  CHECK(hinge_loss_classification(make_bag("a", 1, {{0.25}}), model_of({1})) == 0.75);

  CHECK(hinge_loss_ranking(make_bag("i", 2, {{1}}), make_bag("j", 1, {{-1}}), model_of({0})) == 1.0);
  CHECK(hinge_loss_ranking(make_bag("i", 2, {{3}}), make_bag("j", 1, {{1}}), model_of({1})) == 0.0);
  CHECK(hinge_loss_ranking(make_bag("i", 4, {{1}}), make_bag("j", 1, {{0.5}}), model_of({1})) == 1.5);
  CHECK_THROWS_AS(hinge_loss_ranking(make_bag("i", 1, {{1}}), make_bag("j", 1, {{0}}), model_of({1})),
                  ParameterError);
  CHECK_THROWS_AS(hinge_loss_ranking(make_bag("i", 1, {{1}}), make_bag("j", 2, {{0}}), model_of({1})),
                  ParameterError);
}

TEST_CASE("classification objective examples") {
  Gen gen(3);
  const Dataset any = gen.classification(7, 3, 4);
  CHECK(objective_classification(any, std::vector<double>{0, 0, 0}, 1.0) == 1.0);

  // Second bag contributes zero loss under w = [1], so the totals are
  // lambda/2 + (loss of the first bag)/2.
  const Dataset a({make_bag("p", 1, {{2}}), make_bag("n", -1, {{-2}})}, Task::kClassification);
  CHECK(objective_classification(a, std::vector<double>{1}, 2.0) == doctest::Approx(1.0));
  const Dataset b({make_bag("p", 1, {{0.5}}), make_bag("n", -1, {{-2}})}, Task::kClassification);
  CHECK(objective_classification(b, std::vector<double>{1}, 0.1) == doctest::Approx(0.05 + 0.5 / 2));
  CHECK(hinge_loss_classification(b.bags()[0], model_of({1})) + 0.1 / 2 == doctest::Approx(0.55));

  CHECK_THROWS_AS(objective_classification(a, std::vector<double>{1}, 0.0), ParameterError);
  CHECK_THROWS_AS(objective_classification(a, std::vector<double>{1}, -1.0), ParameterError);
}

TEST_CASE("ranking objective examples") {
  const Dataset two({make_bag("i", 2, {{1}}), make_bag("j", 1, {{-1}})}, Task::kRanking);
  CHECK(objective_ranking(two, std::vector<double>{0}, 1.0) == 1.0);
  const Dataset two_b({make_bag("i", 2, {{2}}), make_bag("j", 1, {{0}})}, Task::kRanking);
  CHECK(objective_ranking(two_b, std::vector<double>{1}, 0.0) == 0.0);
  const Dataset three({make_bag("a", 3, {{1}}), make_bag("b", 2, {{0}}), make_bag("c", 1, {{-1}})},
                      Task::kRanking);
  CHECK(objective_ranking(three, std::vector<double>{0}, 0.0) == doctest::Approx(4.0 / 3.0));

  const auto pairs = ranked_pairs(three);
  CHECK(pairs.size() == 3);
  int total = 0;
  for (const auto& p : pairs) total += p.weight;
  CHECK(total == 4);
}

TEST_CASE("binary labels act as unit-gap ranks") {
  const Dataset d({make_bag("p", 1, {{1}}), make_bag("n", -1, {{0}}), make_bag("n2", -1, {{2}})},
                  Task::kClassification);
  const auto pairs = ranked_pairs(d);
  CHECK(pairs.size() == 2);
  for (const auto& p : pairs) {
    CHECK(p.weight == 1);
    CHECK(p.higher == 0);
  }
}

TEST_CASE("property: permutation invariance and scale covariance") {
  Gen gen(11);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t d = 1 + gen.index(5);
    const Bag bag = gen.bag("b", 1, d, 8);
    const std::vector<double> w = gen.vec(d);
    const WitnessResult base = bag_score_linear(bag, w);

    std::vector<std::size_t> perm(bag.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), gen.engine());
    std::vector<double> shuffled;
    for (std::size_t i : perm) {
      const auto x = bag.instance(i);
      shuffled.insert(shuffled.end(), x.begin(), x.end());
    }
    const WitnessResult moved = bag_score_linear(Bag("b", 1, d, shuffled), w);
    CHECK(moved.score == base.score);
    CHECK(perm[moved.index] == base.index);

    const double c = gen.uniform(0.1, 10.0);
    std::vector<double> cw = w;
    for (double& v : cw) v *= c;
    const WitnessResult scaled = bag_score_linear(bag, cw);
    CHECK(scaled.score == doctest::Approx(c * base.score).epsilon(1e-12));
    CHECK(scaled.index == base.index);
  }
}

TEST_CASE("property: hinge zero iff margin met; objective bounds") {
  Gen gen(12);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t d = 1 + gen.index(4);
    const Dataset data = gen.classification(2 + gen.index(8), d, 5);
    const std::vector<double> w = gen.vec(d, -3.0, 3.0);
    const double lambda = gen.uniform(1e-3, 2.0);
    double mean_loss = 0.0;
    for (const Bag& bag : data.bags()) {
      const double loss = hinge_loss_classification(bag, model_of(w));
      const double margin = bag.label() * bag_score_linear(bag, w).score;
      CHECK(loss >= 0.0);
      CHECK((loss == 0.0) == (margin >= 1.0));
      mean_loss += loss;
    }
    mean_loss /= static_cast<double>(data.size());
    const double reg = 0.5 * lambda * std::inner_product(w.begin(), w.end(), w.begin(), 0.0);
    const double obj = objective_classification(data, w, lambda);
    CHECK(obj >= reg);
    CHECK(obj >= mean_loss);
    CHECK(obj == doctest::Approx(reg + mean_loss).epsilon(1e-12));
  }
}

TEST_CASE("property: classification sub-gradient matches finite differences") {
  const auto errors = fixtures::linear_gradient_errors(13, 100);
  CHECK(errors.size() == 100);
  for (double e : errors) CHECK(e <= 1e-4);
}
