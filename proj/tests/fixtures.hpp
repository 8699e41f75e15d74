#pragma once

// Toy datasets and check loops shared by the unit tests and the acceptance
// binary.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "lemmings/anchors.hpp"
#include "lemmings/decision.hpp"
#include "lemmings/local_solver.hpp"
#include "oracles.hpp"
#include "support.hpp"

namespace lemmings::fixtures {

// Four singleton bags at (+-1, +-1) labeled by the product of the signs.
inline Dataset xor_bags() {
  std::vector<Bag> bags;
  for (int a : {-1, 1}) {
    for (int b : {-1, 1}) {
      bags.push_back(testing::make_bag("x" + std::to_string(a) + std::to_string(b), a * b,
                                       {{static_cast<double>(a), static_cast<double>(b)}}));
    }
  }
  return Dataset(std::move(bags), Task::kClassification);
}

// One anchor on each bag's first instance.
inline AnchorSet anchors_at_instances(const Dataset& data, double sigma) {
  AnchorSet a;
  a.points.resize(static_cast<Eigen::Index>(data.dim()), static_cast<Eigen::Index>(data.size()));
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (std::size_t j = 0; j < data.dim(); ++j) {
      a.points(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = data.bags()[i].instance(0)[j];
    }
  }
  a.sigma = sigma;
  return a;
}

inline std::size_t sign_errors(const Dataset& data, const std::vector<double>& scores) {
  std::size_t errors = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if ((scores[i] >= 0.0) != (data.bags()[i].label() == 1)) ++errors;
  }
  return errors;
}

// Fewest sign errors any bias-free linear model makes on 2-D data. Signs of
// <w,x> depend only on the direction of w, so the circle (plus w = 0) is
// exhaustive up to directions lying exactly on a decision boundary, which the
// fine angular grid brackets from both sides.
inline std::size_t best_linear_errors(const Dataset& data) {
  std::size_t best = sign_errors(data, std::vector<double>(data.size(), 0.0));
  const int steps = 36000;
  for (int s = 0; s < steps; ++s) {
    const double th = 2.0 * std::numbers::pi * s / steps;
    const std::vector<double> w{std::cos(th), std::sin(th)};
    std::vector<double> scores;
    for (const Bag& b : data.bags()) scores.push_back(oracle::witness(b, w).first);
    best = std::min(best, sign_errors(data, scores));
  }
  return best;
}

// Ranks 1..3 (two bags each). The witness of a rank-r bag sits at x1 = r - 2;
// distractors sit at x1 <= -2.
inline Dataset monotone_toy() {
  std::vector<Bag> bags;
  testing::Gen gen(22);
  for (int r = 1; r <= 3; ++r) {
    for (int copy = 0; copy < 2; ++copy) {
      testing::Rows rows{{static_cast<double>(r - 2), gen.uniform(-0.1, 0.1)}};
      for (int k = 0; k < 2; ++k) rows.push_back({gen.uniform(-4.0, -2.0), gen.uniform(-0.1, 0.1)});
      bags.push_back(testing::make_bag("r" + std::to_string(r) + "_" + std::to_string(copy), r, rows));
    }
  }
  return Dataset(std::move(bags), Task::kRanking);
}

// Fraction of rank-ordered bag pairs whose scores are strictly ordered.
inline double pairwise_order_accuracy(const Dataset& data, const std::vector<double>& scores) {
  std::size_t good = 0;
  std::size_t total = 0;
  for (std::size_t a = 0; a < data.size(); ++a) {
    for (std::size_t b = 0; b < data.size(); ++b) {
      if (data.bags()[a].label() <= data.bags()[b].label()) continue;
      ++total;
      if (scores[a] > scores[b]) ++good;
    }
  }
  return static_cast<double>(good) / static_cast<double>(total);
}

// Relative error ||fd - g|| / max(1, ||g||) of the linear classification
// objective at `count` random points away from kinks and ties.
inline std::vector<double> linear_gradient_errors(std::uint64_t seed, int count) {
  testing::Gen gen(seed);
  const double h = 1e-5;
  std::vector<double> errors;
  for (int trial = 0; static_cast<int>(errors.size()) < count && trial < 50 * count; ++trial) {
    const std::size_t d = 1 + gen.index(5);
    const Dataset data = gen.classification(3 + gen.index(6), d, 4);
    const std::vector<double> w = gen.vec(d, -2.0, 2.0);
    const double lambda = gen.uniform(0.01, 1.0);
    if (oracle::kink_distance(data.bags(), w) < 1e-3) continue;
    const auto g = oracle::classification_subgradient(data.bags(), w, lambda);
    double err = 0.0;
    double norm = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      std::vector<double> wp = w;
      std::vector<double> wm = w;
      wp[j] += h;
      wm[j] -= h;
      const double fd = (objective_classification(data, wp, lambda) -
                         objective_classification(data, wm, lambda)) / (2 * h);
      err += (fd - g[j]) * (fd - g[j]);
      norm += g[j] * g[j];
    }
    errors.push_back(std::sqrt(err) / std::max(1.0, std::sqrt(norm)));
  }
  return errors;
}

// Same for the locally linear objective, with random anchors.
inline std::vector<double> local_gradient_errors(std::uint64_t seed, int count) {
  testing::Gen gen(seed);
  const double h = 1e-5;
  std::vector<double> errors;
  for (int trial = 0; static_cast<int>(errors.size()) < count && trial < 50 * count; ++trial) {
    const std::size_t d = 1 + gen.index(3);
    const std::size_t k = 1 + gen.index(3);
    const Dataset data = gen.classification(3 + gen.index(5), d, 3);
    AnchorSet anchors;
    anchors.points.resize(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(k));
    for (Eigen::Index r = 0; r < anchors.points.rows(); ++r) {
      for (Eigen::Index c = 0; c < anchors.points.cols(); ++c) anchors.points(r, c) = gen.uniform(-1, 1);
    }
    anchors.sigma = gen.uniform(0.1, 2.0);
    const CodedDataset coded(data, anchors);
    const double lambda = gen.uniform(0.01, 1.0);
    Eigen::MatrixXd w(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(k));
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = gen.uniform(-2, 2);
    }

    // Skip points near a hinge kink or an argmax tie.
    bool near_kink = false;
    Eigen::MatrixXd g = lambda * w;
    for (std::size_t b = 0; b < data.size(); ++b) {
      const Bag& bag = data.bags()[b];
      const Eigen::MatrixXd& codes = coded.codes(b);
      std::vector<double> s;
      for (std::size_t i = 0; i < bag.size(); ++i) {
        const Eigen::Index row = static_cast<Eigen::Index>(i);
        const Eigen::VectorXd x =
            Eigen::Map<const Eigen::VectorXd>(bag.instance(i).data(), static_cast<Eigen::Index>(d));
        s.push_back(x.dot(w * codes.row(row).transpose()));
      }
      const auto [score, idx] = oracle::local_witness(bag, codes, w);
      std::sort(s.rbegin(), s.rend());
      if (s.size() > 1 && s[0] - s[1] < 1e-3) near_kink = true;
      if (std::abs(1.0 - bag.label() * score) < 1e-3) near_kink = true;
      if (bag.label() * score < 1.0) {
        const auto x = bag.instance(idx);
        for (std::size_t r = 0; r < d; ++r) {
          for (std::size_t c = 0; c < k; ++c) {
            g(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) -=
                bag.label() * x[r] * codes(static_cast<Eigen::Index>(idx), static_cast<Eigen::Index>(c)) /
                static_cast<double>(data.size());
          }
        }
      }
    }
    if (near_kink) continue;
    Eigen::MatrixXd fd(w.rows(), w.cols());
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) {
        Eigen::MatrixXd wp = w;
        Eigen::MatrixXd wm = w;
        wp(r, c) += h;
        wm(r, c) -= h;
        fd(r, c) = (objective_local_classification(coded, wp, lambda) -
                    objective_local_classification(coded, wm, lambda)) / (2 * h);
      }
    }
    errors.push_back((fd - g).norm() / std::max(1.0, g.norm()));
  }
  return errors;
}

}  // namespace lemmings::fixtures
