/*
 * Copyright 2026 The AdaMEL Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef ADAMEL_LOSSES_HPP
#define ADAMEL_LOSSES_HPP

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "adamel/model.hpp"

namespace adamel {

inline constexpr double kLogClamp = 1e-12;    // floor for probabilities inside logs
inline constexpr double kDistFloor = 1e-12;   // floor for mean centroid distances

/// A composed loss and its parts. Parts not active in the variant stay 0.
struct LossValue {
  double total = 0.0;
  double base = 0.0;
  double target = 0.0;
  double support = 0.0;
};

/// Class centroids of source-domain attention vectors and the mean member
/// distance to each, used to weight support-set pairs.
struct Centroids {
  Eigen::VectorXd c_pos;
  Eigen::VectorXd c_neg;
  double dbar_pos = kDistFloor;
  double dbar_neg = kDistFloor;
};

/// Mean binary cross-entropy with probabilities clamped to [1e-12, 1-1e-12].
double loss_base(const std::vector<double>& predictions, const std::vector<int>& labels);

/// Elementwise mean of attention vectors over target pairs.
Eigen::VectorXd mean_target_attention(const std::vector<Eigen::VectorXd>& target_attentions);
Eigen::VectorXd mean_target_attention(const std::vector<PairFeatures>& target_features,
                                      const ModelParams& params);

/// Batch-mean KL(fbar || g_i): how far each source attention vector sits from
/// the mean target attention.
double loss_target(const std::vector<Eigen::VectorXd>& source_attentions,
                   const Eigen::VectorXd& fbar);

/// (1-lambda)*base + lambda*target. lambda must lie in [0,1].
double loss_un(double base, double target, double lambda);

Centroids compute_centroids(const std::vector<std::pair<Eigen::VectorXd, int>>& labeled_attentions);

struct SupportPoint {
  Eigen::VectorXd g;
  double y_hat = 0.5;
  int label = 0;
};

/// Distance-weighted negative log-likelihood over the support set. Pairs
/// whose attention vector deviates from its class centroid weigh more.
double loss_support(const std::vector<SupportPoint>& support, const Centroids& centroids);

/// base + phi*support. phi in [0,1]; phi == 0 switches the support term off
/// exactly (the limit case used by the variant-reduction contracts).
double loss_ssl(double base, double support, double phi);

/// (1-lambda)*base + lambda*target + phi*support.
double loss_hybrid(double base, double target, double support, double lambda, double phi);

/// Gradient container mirroring ModelParams tensor-for-tensor.
struct Gradients {
  ModelDims dims;
  std::vector<Eigen::MatrixXd> V;
  std::vector<Eigen::VectorXd> b;
  Eigen::MatrixXd W;
  Eigen::VectorXd a;
  Eigen::MatrixXd theta1_w;
  Eigen::VectorXd theta1_b;
  Eigen::VectorXd theta2_w;
  double theta2_b = 0.0;

  static Gradients zero_like(const ModelParams& params);
  /// Throws naming the first tensor holding a non-finite entry.
  void check_finite() const;
};

void visit_tensors(Gradients& grads,
                   const std::function<void(const std::string&, double*, std::int64_t)>& fn);
void visit_tensors(const Gradients& grads,
                   const std::function<void(const std::string&, const double*, std::int64_t)>& fn);

/// Everything one optimizer step is evaluated over. fbar and centroids are
/// population statistics computed beforehand and held constant: no gradient
/// flows through them.
struct StepData {
  std::vector<const PairFeatures*> batch_features;
  std::vector<int> batch_labels;
  std::vector<const PairFeatures*> support_features;
  std::vector<int> support_labels;
  Eigen::VectorXd fbar;
  Centroids centroids;
  double lambda = 0.0;
  double phi = 0.0;
  bool use_target = false;
  bool use_support = false;
};

/// Loss value only, recomputing all forwards. The finite-difference oracle
/// differentiates exactly this function.
LossValue evaluate_step_loss(const StepData& step, const ModelParams& params);

struct StepResult {
  LossValue loss;
  Gradients grads;
  std::vector<double> batch_predictions;
};

/// Loss and analytic gradients of the composed variant loss in one pass.
StepResult loss_and_gradients(const StepData& step, const ModelParams& params);

/// Reverse pass for a single pair. dloss_dyhat flows in through the
/// prediction; dloss_dg (optional) flows in directly through the attention
/// vector. Accumulates into `out`.
void backward_pair(const PairFeatures& features, const ForwardCache& cache,
                   const ModelParams& params, double dloss_dyhat,
                   const Eigen::VectorXd* dloss_dg, Gradients& out);

}  // namespace adamel

#endif  // ADAMEL_LOSSES_HPP
