#pragma once

#include <optional>
#include <span>

#include <Eigen/Dense>

#include "lemmings/anchors.hpp"
#include "lemmings/types.hpp"

namespace lemmings {

using RowMatrixXd = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Ridge added to the K x K coding system so it stays positive definite when
// V'V is singular (sigma = 0 with K > rank V).
inline constexpr double kCodingRidge = 1e-8;

// Local coordinates gamma(x) minimizing
//   ||x - V gamma||^2 + sigma * sum_k gamma_k^2 ||v_k - x||^2,
// i.e. the solution of (V'V + sigma D_x + eps I) gamma = V'x with
// D_x = diag(||v_k - x||^2). No sum-to-one constraint is imposed.
class LocalCoder {
 public:
  explicit LocalCoder(const AnchorSet& anchors);

  std::size_t dim() const { return static_cast<std::size_t>(points_.rows()); }
  std::size_t count() const { return static_cast<std::size_t>(points_.cols()); }

  Eigen::VectorXd encode(std::span<const double> x) const;

  // One row of codes per instance of the bag (n x K).
  RowMatrixXd encode(const Bag& bag) const;

  // ||(V'V + sigma D_x + eps I) gamma - V'x||.
  double residual(std::span<const double> x, const Eigen::VectorXd& gamma) const;

 private:
  Eigen::MatrixXd system(const Eigen::Ref<const Eigen::VectorXd>& x) const;

  Eigen::MatrixXd points_;  // d x K
  Eigen::MatrixXd gram_;    // V'V
  double sigma_;
};

Eigen::VectorXd local_coordinates(std::span<const double> x, const AnchorSet& anchors);

// f(B; W) = max over x in B of <W gamma(x), x>.
struct LocalModel {
  Eigen::MatrixXd weights;  // d x K
  AnchorSet anchors;
  std::optional<FeatureScaler> scaler;
  ModelMeta meta;

  std::size_t dim() const { return static_cast<std::size_t>(weights.rows()); }
  bool operator==(const LocalModel& o) const {
    return weights == o.weights && anchors == o.anchors && scaler == o.scaler && meta == o.meta;
  }
};

// Witness of a bag whose instance codes are already known (`codes` is n x K).
WitnessResult bag_score_coded(const Bag& bag, const RowMatrixXd& codes,
                              const Eigen::MatrixXd& weights);

// Codes the bag on demand, then scores it. Lowest index wins ties.
WitnessResult bag_score_local(const Bag& bag, const LocalModel& model);
WitnessResult bag_score_local(const Bag& bag, const LocalModel& model, const LocalCoder& coder);

}  // namespace lemmings
