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

#ifndef ADAMEL_MODEL_HPP
#define ADAMEL_MODEL_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "adamel/features.hpp"

namespace adamel {

/// What feeds the classifier: the attention-gated latent rows (g_j * x_j,
/// H each) or the attention-gated projected rows (g_j * tanh(W x_j), H' each).
enum class ThetaInput { latent, projected };

ThetaInput parse_theta_input(const std::string& name);
const char* theta_input_name(ThetaInput t);

struct ModelDims {
  int feature_count = 0;   // F
  int embed_dim = 0;       // D
  int latent_dim = 64;     // H
  int attention_dim = 256; // H'
  int hidden_dim = 256;    // classifier hidden layer
  ThetaInput theta_input = ThetaInput::latent;

  int classifier_input() const {
    return feature_count * (theta_input == ThetaInput::latent ? latent_dim : attention_dim);
  }
  void validate() const;
  bool operator==(const ModelDims&) const = default;
};

/// All learnable tensors. V/b are per-feature; W/a are shared across
/// features; theta_* is the two-layer classifier.
struct ModelParams {
  ModelDims dims;
  std::vector<Eigen::MatrixXd> V;  // F matrices, H x D
  std::vector<Eigen::VectorXd> b;  // F vectors, H
  Eigen::MatrixXd W;               // H' x H
  Eigen::VectorXd a;               // H'
  Eigen::MatrixXd theta1_w;        // hidden_dim x classifier_input
  Eigen::VectorXd theta1_b;        // hidden_dim
  Eigen::VectorXd theta2_w;        // hidden_dim
  double theta2_b = 0.0;

  bool all_finite() const;
};

/// Per-feature latents x_j = relu(V_j h_j + b_j), with pre-activations kept
/// for the backward pass.
struct LatentFeatures {
  Eigen::MatrixXd pre;  // F x H
  Eigen::MatrixXd x;    // F x H
};

struct AttentionResult {
  Eigen::MatrixXd pre_tanh;  // F x H', rows are W x_j
  Eigen::MatrixXd t;         // F x H', rows are tanh(W x_j)
  Eigen::VectorXd energies;  // F, e_j = a . t_j
  Eigen::VectorXd g;         // F, softmax of energies
};

struct ClassifierResult {
  Eigen::VectorXd gated_pre;  // concat of g_j * (x_j or t_j)
  Eigen::VectorXd gated;      // relu of gated_pre
  Eigen::VectorXd hidden_pre;
  Eigen::VectorXd hidden;
  double logit = 0.0;
  double y_hat = 0.5;
};

struct ForwardCache {
  LatentFeatures latent;
  AttentionResult attention;
  ClassifierResult classifier;
};

LatentFeatures affine_forward(const Eigen::MatrixXd& h, const ModelParams& params);
AttentionResult attention_forward(const LatentFeatures& latent, const ModelParams& params);
ClassifierResult classifier_forward(const LatentFeatures& latent, const AttentionResult& attention,
                                    const ModelParams& params);
ForwardCache forward_pair(const PairFeatures& features, const ModelParams& params);

/// Weights-only parameter accounting: F*D*H + H*H' + F*H'*hidden. Biases,
/// the attention vector a, and the classifier output layer are not counted.
std::int64_t parameter_count_formula(int feature_count, int embed_dim, int latent_dim,
                                     int attention_dim, int hidden_dim);

/// Glorot-uniform weights, zero biases, deterministic under seed.
ModelParams init_params(const ModelDims& dims, std::uint64_t seed);

/// Visits every learnable tensor as a flat double span, in a fixed order
/// shared by the optimizer, the gradient container, and serialization.
void visit_tensors(ModelParams& params,
                   const std::function<void(const std::string&, double*, std::int64_t)>& fn);
void visit_tensors(const ModelParams& params,
                   const std::function<void(const std::string&, const double*, std::int64_t)>& fn);

/// Model checkpoint: dims, tensors, and everything needed to featurize new
/// pairs the same way (schema, channels, crop, provider identity).
struct Checkpoint {
  ModelParams params;
  std::vector<std::string> schema_attributes;
  FeatureChannels channels = FeatureChannels::both;
  int crop = 20;
  std::string provider_kind;       // hashing | vector_file
  int provider_dim = 0;
  std::uint64_t provider_seed = 0; // hashing only
  std::string provider_path;       // vector_file only
  std::uint64_t provider_hash = 0;
};

void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace adamel

#endif  // ADAMEL_MODEL_HPP
