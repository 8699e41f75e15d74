#include "lemmings/local_coding.hpp"

#include <cmath>
#include <string>

#include "lemmings/errors.hpp"

namespace lemmings {
namespace {

Eigen::Map<const Eigen::VectorXd> as_vector(std::span<const double> x) {
  return {x.data(), static_cast<Eigen::Index>(x.size())};
}

}  // namespace

LocalCoder::LocalCoder(const AnchorSet& anchors)
    : points_(anchors.points), gram_(anchors.points.transpose() * anchors.points),
      sigma_(anchors.sigma) {
  validate_anchors(anchors);
}

Eigen::MatrixXd LocalCoder::system(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  Eigen::MatrixXd a = gram_;
  for (Eigen::Index k = 0; k < points_.cols(); ++k) {
    a(k, k) += sigma_ * (points_.col(k) - x).squaredNorm() + kCodingRidge;
  }
  return a;
}

Eigen::VectorXd LocalCoder::encode(std::span<const double> x) const {
  if (x.size() != dim()) {
    throw DimensionError("instance has d=" + std::to_string(x.size()) + ", anchors have d=" +
                         std::to_string(dim()));
  }
  const auto xv = as_vector(x);
  if (!xv.allFinite()) throw NumericError("cannot code a non-finite instance");
  const Eigen::MatrixXd a = system(xv);
  const Eigen::VectorXd rhs = points_.transpose() * xv;
  const Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() != Eigen::Success) throw NumericError("coding system is not positive definite");
  Eigen::VectorXd gamma = llt.solve(rhs);
  // One refinement step keeps the residual near machine precision when the
  // system is ill-conditioned.
  gamma += llt.solve(rhs - a * gamma);
  return gamma;
}

RowMatrixXd LocalCoder::encode(const Bag& bag) const {
  RowMatrixXd codes(static_cast<Eigen::Index>(bag.size()), points_.cols());
  for (std::size_t i = 0; i < bag.size(); ++i) {
    codes.row(static_cast<Eigen::Index>(i)) = encode(bag.instance(i)).transpose();
  }
  return codes;
}

double LocalCoder::residual(std::span<const double> x, const Eigen::VectorXd& gamma) const {
  const auto xv = as_vector(x);
  return (system(xv) * gamma - points_.transpose() * xv).norm();
}

Eigen::VectorXd local_coordinates(std::span<const double> x, const AnchorSet& anchors) {
  return LocalCoder(anchors).encode(x);
}

WitnessResult bag_score_coded(const Bag& bag, const RowMatrixXd& codes,
                              const Eigen::MatrixXd& weights) {
  if (bag.dim() != static_cast<std::size_t>(weights.rows())) {
    throw DimensionError("dimension mismatch: bag '" + bag.id() + "' has d=" +
                         std::to_string(bag.dim()) + ", model has d=" +
                         std::to_string(weights.rows()));
  }
  const auto n = static_cast<Eigen::Index>(bag.size());
  const Eigen::Map<const RowMatrixXd> x(bag.features().data(), n, weights.rows());
  // Row i of (X W) holds (W' x_i)'; its dot with gamma(x_i) is the score.
  const Eigen::VectorXd scores = (x * weights).cwiseProduct(codes).rowwise().sum();
  WitnessResult best{scores(0), 0};
  for (Eigen::Index i = 1; i < n; ++i) {
    if (scores(i) > best.score) best = {scores(i), static_cast<std::size_t>(i)};
  }
  return best;
}

WitnessResult bag_score_local(const Bag& bag, const LocalModel& model, const LocalCoder& coder) {
  if (bag.dim() != model.dim()) {
    throw DimensionError("dimension mismatch: bag '" + bag.id() + "' has d=" +
                         std::to_string(bag.dim()) + ", model has d=" +
                         std::to_string(model.dim()));
  }
  return bag_score_coded(bag, coder.encode(bag), model.weights);
}

WitnessResult bag_score_local(const Bag& bag, const LocalModel& model) {
  return bag_score_local(bag, model, LocalCoder(model.anchors));
}

}  // namespace lemmings
