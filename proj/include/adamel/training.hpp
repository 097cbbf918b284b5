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

#ifndef ADAMEL_TRAINING_HPP
#define ADAMEL_TRAINING_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "adamel/losses.hpp"

namespace adamel {

enum class Variant { base, zero, few, hyb };

Variant parse_variant(const std::string& name);
const char* variant_name(Variant v);

struct TrainConfig {
  Variant variant = Variant::base;
  double lambda = 0.98;
  double phi = 1.0;
  double learning_rate = 1e-4;
  int batch_size = 16;
  int epochs = 100;
  std::uint64_t seed = 0;
  int latent_dim = 64;
  int attention_dim = 256;
  int hidden_dim = 256;
  int crop = 20;
  ThetaInput theta_input = ThetaInput::latent;
  FeatureChannels channels = FeatureChannels::both;
  // When set, the mean target attention is taken over a random sample of
  // this many target pairs per epoch instead of the whole target domain.
  std::optional<int> target_batch;

  void validate() const;
};

struct EpochTrace {
  int epoch = 0;
  double base = 0.0;
  double target = 0.0;
  double support = 0.0;
  double total = 0.0;
  double wall_seconds = 0.0;
};

using LossTrace = std::vector<EpochTrace>;

void write_loss_trace(const std::string& path, const LossTrace& trace);

/// Adam accumulators, shaped like the parameters they update.
struct AdamState {
  Gradients m;
  Gradients v;
  std::int64_t t = 0;
  bool initialized = false;
};

/// One Adam update: beta1=0.9, beta2=0.999, eps=1e-8, bias-corrected.
void adam_step(ModelParams& params, const Gradients& grads, AdamState& state, double lr);

struct TrainResult {
  ModelParams params;
  LossTrace trace;
};

/// Test hook: called after every optimizer step with the just-applied
/// gradients and the updated parameters.
using StepObserver =
    std::function<void(int step, const ModelParams& params, const Gradients& grads)>;

TrainResult train_base(const std::vector<PairRecord>& source, const AlignedSchema& schema,
                       const EmbeddingProvider& provider, const TrainConfig& config,
                       const StepObserver& observer = nullptr);

TrainResult train_zero(const std::vector<PairRecord>& source,
                       const std::vector<PairRecord>& target, const AlignedSchema& schema,
                       const EmbeddingProvider& provider, const TrainConfig& config,
                       const StepObserver& observer = nullptr);

TrainResult train_few(const std::vector<PairRecord>& source,
                      const std::vector<PairRecord>& support,
                      const std::vector<PairRecord>& target, const AlignedSchema& schema,
                      const EmbeddingProvider& provider, const TrainConfig& config,
                      const StepObserver& observer = nullptr);

TrainResult train_hyb(const std::vector<PairRecord>& source,
                      const std::vector<PairRecord>& support,
                      const std::vector<PairRecord>& target, const AlignedSchema& schema,
                      const EmbeddingProvider& provider, const TrainConfig& config,
                      const StepObserver& observer = nullptr);

/// Dispatches on config.variant; unused partitions may be empty.
TrainResult train(const DatasetPartitions& parts, const AlignedSchema& schema,
                  const EmbeddingProvider& provider, const TrainConfig& config,
                  const StepObserver& observer = nullptr);

struct Prediction {
  std::string pair_id;
  double score = 0.5;
  Eigen::VectorXd attention;
};

/// Scores pairs with fixed parameters. Pure: same inputs, same outputs.
std::vector<Prediction> predict(const ModelParams& params, const std::vector<PairRecord>& pairs,
                                const AlignedSchema& schema, const EmbeddingProvider& provider,
                                int crop, FeatureChannels channels = FeatureChannels::both);

}  // namespace adamel

#endif  // ADAMEL_TRAINING_HPP
