#pragma once

#include <functional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "lemmings/linear_solver.hpp"
#include "lemmings/local_coding.hpp"

namespace lemmings {

// A dataset together with the local coordinates of every training instance,
// computed once against a fixed anchor set. Holds a reference to `dataset`,
// which must outlive it.
class CodedDataset {
 public:
  CodedDataset(const Dataset& dataset, const AnchorSet& anchors);

  const Dataset& dataset() const { return *dataset_; }
  const AnchorSet& anchors() const { return anchors_; }
  const RowMatrixXd& codes(std::size_t bag) const { return codes_[bag]; }

 private:
  const Dataset* dataset_;
  AnchorSet anchors_;
  std::vector<RowMatrixXd> codes_;
};

double objective_local_classification(const CodedDataset& data, const Eigen::MatrixXd& weights,
                                      double lambda);
double objective_local_ranking(const CodedDataset& data, const Eigen::MatrixXd& weights,
                               double lambda);

struct LocalTrainHooks {
  // Called after every update with t and W_{t+1}.
  std::function<void(std::size_t, const Eigen::MatrixXd&)> on_iteration;
  detail::RankStepSign rank_sign = detail::RankStepSign::kDescent;
};

// Locally-linear MIL classifier: W_1 = 0 and on a violated bag
//   W_{t+1} = (1 - eta_t lambda) W_t + eta_t Y x* gamma(x*)'.
std::pair<LocalModel, TrainTrace> train_local_classifier(const CodedDataset& data,
                                                         const TrainConfig& cfg,
                                                         const LocalTrainHooks& hooks = {});
std::pair<LocalModel, TrainTrace> train_local_classifier(const Dataset& dataset,
                                                         const AnchorSet& anchors,
                                                         const TrainConfig& cfg);

// Locally-linear MIL ranker; on a violated pair
//   W_{t+1} = (1 - eta_t lambda) W_t + eta_t (x*_I g_I' - x*_J g_J')(Y_I - Y_J).
std::pair<LocalModel, TrainTrace> train_local_ranker(const CodedDataset& data,
                                                     const TrainConfig& cfg,
                                                     const LocalTrainHooks& hooks = {});
std::pair<LocalModel, TrainTrace> train_local_ranker(const Dataset& dataset,
                                                     const AnchorSet& anchors,
                                                     const TrainConfig& cfg);

std::vector<WitnessResult> predict_bags(const LocalModel& model, std::span<const Bag> bags);

}  // namespace lemmings
