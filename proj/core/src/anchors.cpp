#include "lemmings/anchors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "lemmings/errors.hpp"
#include "lemmings/random.hpp"

namespace lemmings {
namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

constexpr int kMaxLloydIterations = 100;
constexpr double kMovementTolerance = 1e-6;

RowMatrix stack_instances(std::span<const Bag> bags) {
  if (bags.empty()) throw ParameterError("select_anchors: no instances");
  const std::size_t d = bags.front().dim();
  std::size_t n = 0;
  for (const Bag& b : bags) {
    if (b.dim() != d) throw DimensionError("select_anchors: mixed dimensions");
    n += b.size();
  }
  RowMatrix x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  Eigen::Index row = 0;
  for (const Bag& b : bags) {
    const auto f = b.features();
    x.middleRows(row, static_cast<Eigen::Index>(b.size())) =
        Eigen::Map<const RowMatrix>(f.data(), static_cast<Eigen::Index>(b.size()),
                                    static_cast<Eigen::Index>(d));
    row += static_cast<Eigen::Index>(b.size());
  }
  return x;
}

// Row indices of the first occurrence of every distinct row, in row order.
std::vector<Eigen::Index> distinct_rows(const RowMatrix& x) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(x.rows()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  auto less = [&x](Eigen::Index a, Eigen::Index b) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      if (x(a, j) != x(b, j)) return x(a, j) < x(b, j);
    }
    return false;
  };
  std::stable_sort(order.begin(), order.end(), less);
  std::vector<Eigen::Index> firsts;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (i == 0 || less(order[i - 1], order[i])) firsts.push_back(order[i]);
  }
  std::sort(firsts.begin(), firsts.end());
  return firsts;
}

double squared_distance(const RowMatrix& x, Eigen::Index row, const Eigen::MatrixXd& centers,
                        Eigen::Index col) {
  return (x.row(row).transpose() - centers.col(col)).squaredNorm();
}

Eigen::MatrixXd kmeans_plus_plus(const RowMatrix& x, std::size_t k, Rng& rng) {
  const Eigen::Index n = x.rows();
  Eigen::MatrixXd centers(x.cols(), static_cast<Eigen::Index>(k));
  centers.col(0) = x.row(static_cast<Eigen::Index>(rng.uniform_index(static_cast<std::size_t>(n))))
                       .transpose();
  Eigen::VectorXd nearest(n);
  for (Eigen::Index i = 0; i < n; ++i) nearest(i) = squared_distance(x, i, centers, 0);
  for (std::size_t c = 1; c < k; ++c) {
    const double total = nearest.sum();
    const double target = rng.uniform01() * total;
    Eigen::Index pick = -1;
    double acc = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (nearest(i) <= 0.0) continue;
      acc += nearest(i);
      pick = i;
      if (acc > target) break;
    }
    const auto col = static_cast<Eigen::Index>(c);
    centers.col(col) = x.row(pick).transpose();
    for (Eigen::Index i = 0; i < n; ++i) {
      nearest(i) = std::min(nearest(i), squared_distance(x, i, centers, col));
    }
  }
  return centers;
}

Eigen::MatrixXd lloyd(const RowMatrix& x, Eigen::MatrixXd centers) {
  const Eigen::Index n = x.rows();
  const Eigen::Index k = centers.cols();
  const Eigen::VectorXd row_norms = x.rowwise().squaredNorm();
  std::vector<Eigen::Index> assign(static_cast<std::size_t>(n), 0);

  for (int iter = 0; iter < kMaxLloydIterations; ++iter) {
    // ||x||^2 - 2 x.c + ||c||^2, evaluated as one matrix product.
    const Eigen::MatrixXd cross = x * centers;
    const Eigen::RowVectorXd center_norms = centers.colwise().squaredNorm();
    for (Eigen::Index i = 0; i < n; ++i) {
      Eigen::Index best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (Eigen::Index c = 0; c < k; ++c) {
        const double d2 = row_norms(i) - 2.0 * cross(i, c) + center_norms(c);
        if (d2 < best_d) {
          best_d = d2;
          best = c;
        }
      }
      assign[static_cast<std::size_t>(i)] = best;
    }

    Eigen::MatrixXd next = Eigen::MatrixXd::Zero(x.cols(), k);
    std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      const Eigen::Index c = assign[static_cast<std::size_t>(i)];
      next.col(c) += x.row(i).transpose();
      ++counts[static_cast<std::size_t>(c)];
    }
    std::vector<Eigen::Index> empty;
    for (Eigen::Index c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] == 0) {
        empty.push_back(c);
      } else {
        next.col(c) /= static_cast<double>(counts[static_cast<std::size_t>(c)]);
      }
    }
    if (!empty.empty()) {
      std::vector<bool> taken(static_cast<std::size_t>(n), false);
      for (Eigen::Index c : empty) {
        Eigen::Index far = -1;
        double far_d = -1.0;
        for (Eigen::Index i = 0; i < n; ++i) {
          if (taken[static_cast<std::size_t>(i)]) continue;
          const Eigen::Index own = assign[static_cast<std::size_t>(i)];
          if (counts[static_cast<std::size_t>(own)] == 0) continue;
          const double d2 = squared_distance(x, i, next, own);
          if (d2 > far_d) {
            far_d = d2;
            far = i;
          }
        }
        if (far < 0) throw Error("k-means: no instance available to re-seed an empty cluster");
        taken[static_cast<std::size_t>(far)] = true;
        next.col(c) = x.row(far).transpose();
      }
    }

    const double movement = (next - centers).colwise().norm().maxCoeff();
    centers = std::move(next);
    if (empty.empty() && movement < kMovementTolerance) break;
  }
  return centers;
}

}  // namespace

std::string_view to_string(AnchorMethod method) {
  return method == AnchorMethod::kKMeans ? "kmeans" : "random";
}

AnchorMethod parse_anchor_method(std::string_view text) {
  if (text == "kmeans") return AnchorMethod::kKMeans;
  if (text == "random") return AnchorMethod::kRandom;
  throw ParameterError("unknown anchor method '" + std::string(text) +
                       "' (expected kmeans or random)");
}

void validate_anchors(const AnchorSet& anchors) {
  if (anchors.count() < 1 || anchors.dim() < 1) throw ParameterError("anchor set is empty");
  if (!anchors.points.allFinite()) throw ParameterError("anchor set has non-finite entries");
  if (!(anchors.sigma >= 0.0) || !std::isfinite(anchors.sigma)) {
    throw ParameterError("sigma must be a finite non-negative number");
  }
  for (Eigen::Index a = 0; a < anchors.points.cols(); ++a) {
    for (Eigen::Index b = a + 1; b < anchors.points.cols(); ++b) {
      if (anchors.points.col(a) == anchors.points.col(b)) {
        throw ParameterError("anchors " + std::to_string(a) + " and " + std::to_string(b) +
                             " coincide");
      }
    }
  }
}

AnchorSet select_anchors(std::span<const Bag> bags, std::size_t k, AnchorMethod method,
                         std::uint64_t seed, double sigma) {
  if (k < 1) throw ParameterError("anchor count K must be >= 1");
  const RowMatrix x = stack_instances(bags);
  const std::vector<Eigen::Index> distinct = distinct_rows(x);
  if (distinct.size() < k) {
    throw ParameterError("K=" + std::to_string(k) + " exceeds the " +
                         std::to_string(distinct.size()) + " distinct instances");
  }

  Rng rng(seed);
  AnchorSet out;
  out.sigma = sigma;
  out.method = method;
  out.seed = seed;
  if (method == AnchorMethod::kRandom) {
    std::vector<Eigen::Index> pool = distinct;
    out.points.resize(x.cols(), static_cast<Eigen::Index>(k));
    // Partial Fisher-Yates: the first k slots become the sample.
    for (std::size_t i = 0; i < k; ++i) {
      const std::size_t j = i + rng.uniform_index(pool.size() - i);
      std::swap(pool[i], pool[j]);
      out.points.col(static_cast<Eigen::Index>(i)) = x.row(pool[i]).transpose();
    }
  } else {
    out.points = lloyd(x, kmeans_plus_plus(x, k, rng));
  }
  validate_anchors(out);
  return out;
}

}  // namespace lemmings
