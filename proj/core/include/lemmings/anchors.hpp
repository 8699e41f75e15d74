#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

#include <Eigen/Dense>

#include "lemmings/types.hpp"

namespace lemmings {

enum class AnchorMethod { kKMeans, kRandom };

std::string_view to_string(AnchorMethod method);
// Accepts "kmeans" or "random"; throws ParameterError otherwise.
AnchorMethod parse_anchor_method(std::string_view text);

// K anchor points as the columns of a d x K matrix, plus the locality weight
// sigma used when coding instances against them.
struct AnchorSet {
  Eigen::MatrixXd points;  // d x K
  double sigma = 1.0;
  AnchorMethod method = AnchorMethod::kKMeans;
  std::uint64_t seed = 0;

  std::size_t dim() const { return static_cast<std::size_t>(points.rows()); }
  std::size_t count() const { return static_cast<std::size_t>(points.cols()); }
  bool operator==(const AnchorSet& o) const {
    return points == o.points && sigma == o.sigma && method == o.method && seed == o.seed;
  }
};

// Chooses K anchors from the instances of `bags`.
//
// kRandom takes K distinct instances without replacement. kKMeans seeds with
// k-means++ and runs Lloyd's algorithm for at most 100 iterations or until no
// centroid moves by 1e-6; a cluster that empties is re-seeded at the instance
// farthest from its assigned centroid. Throws ParameterError when fewer than
// K distinct instances exist or sigma < 0.
AnchorSet select_anchors(std::span<const Bag> bags, std::size_t k, AnchorMethod method,
                         std::uint64_t seed, double sigma = 1.0);

// Throws ParameterError unless K >= 1, entries are finite, sigma >= 0 and no
// two anchors coincide.
void validate_anchors(const AnchorSet& anchors);

}  // namespace lemmings
