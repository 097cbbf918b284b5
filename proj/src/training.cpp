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

#include "adamel/training.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "adamel/rng.hpp"

namespace adamel {

Variant parse_variant(const std::string& name) {
  if (name == "base") return Variant::base;
  if (name == "zero") return Variant::zero;
  if (name == "few") return Variant::few;
  if (name == "hyb") return Variant::hyb;
  throw std::invalid_argument("unknown variant '" + name + "' (base|zero|few|hyb)");
}

const char* variant_name(Variant v) {
  switch (v) {
    case Variant::base: return "base";
    case Variant::zero: return "zero";
    case Variant::few: return "few";
    case Variant::hyb: return "hyb";
  }
  return "?";
}

void TrainConfig::validate() const {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw std::invalid_argument("lambda must lie in [0,1]");
  if (!(phi >= 0.0 && phi <= 1.0)) throw std::invalid_argument("phi must lie in [0,1]");
  if (learning_rate <= 0.0) throw std::invalid_argument("learning_rate must be positive");
  if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
  if (epochs < 0) throw std::invalid_argument("epochs must be >= 0");
  if (crop < 1) throw std::invalid_argument("crop must be >= 1");
  if (latent_dim < 1 || attention_dim < 1 || hidden_dim < 1)
    throw std::invalid_argument("model dimensions must be >= 1");
  if (target_batch && *target_batch < 1)
    throw std::invalid_argument("target_batch must be >= 1 when set");
}

void write_loss_trace(const std::string& path, const LossTrace& trace) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write loss trace: " + path);
  out << "epoch,base,target,support,total,wall_seconds\n";
  char buf[256];
  for (const auto& e : trace) {
    std::snprintf(buf, sizeof(buf), "%d,%.9g,%.9g,%.9g,%.9g,%.3f\n", e.epoch, e.base, e.target,
                  e.support, e.total, e.wall_seconds);
    out << buf;
  }
  if (!out) throw std::runtime_error("loss trace write failed: " + path);
}

namespace {

std::vector<std::pair<double*, std::int64_t>> mutable_spans(ModelParams& p) {
  std::vector<std::pair<double*, std::int64_t>> out;
  visit_tensors(p, [&out](const std::string&, double* d, std::int64_t n) { out.push_back({d, n}); });
  return out;
}

std::vector<std::pair<double*, std::int64_t>> mutable_spans(Gradients& g) {
  std::vector<std::pair<double*, std::int64_t>> out;
  visit_tensors(g, [&out](const std::string&, double* d, std::int64_t n) { out.push_back({d, n}); });
  return out;
}

std::vector<std::pair<const double*, std::int64_t>> const_spans(const Gradients& g) {
  std::vector<std::pair<const double*, std::int64_t>> out;
  visit_tensors(g,
                [&out](const std::string&, const double* d, std::int64_t n) { out.push_back({d, n}); });
  return out;
}

}  // namespace

void adam_step(ModelParams& params, const Gradients& grads, AdamState& state, double lr) {
  grads.check_finite();
  if (!state.initialized) {
    state.m = Gradients::zero_like(params);
    state.v = Gradients::zero_like(params);
    state.t = 0;
    state.initialized = true;
  }
  state.t += 1;

  constexpr double beta1 = 0.9;
  constexpr double beta2 = 0.999;
  constexpr double eps = 1e-8;
  const double c1 = 1.0 - std::pow(beta1, static_cast<double>(state.t));
  const double c2 = 1.0 - std::pow(beta2, static_cast<double>(state.t));

  auto ps = mutable_spans(params);
  auto gs = const_spans(grads);
  auto ms = mutable_spans(state.m);
  auto vs = mutable_spans(state.v);
  if (ps.size() != gs.size()) throw std::invalid_argument("adam_step: shape mismatch");

  for (std::size_t k = 0; k < ps.size(); ++k) {
    auto [p, n] = ps[k];
    auto [g, gn] = gs[k];
    auto [m, mn] = ms[k];
    auto [v, vn] = vs[k];
    if (gn != n || mn != n || vn != n) throw std::invalid_argument("adam_step: shape mismatch");
    for (std::int64_t i = 0; i < n; ++i) {
      m[i] = beta1 * m[i] + (1.0 - beta1) * g[i];
      v[i] = beta2 * v[i] + (1.0 - beta2) * g[i] * g[i];
      const double m_hat = m[i] / c1;
      const double v_hat = v[i] / c2;
      p[i] -= lr * m_hat / (std::sqrt(v_hat) + eps);
    }
  }
}

namespace {

struct VariantNeeds {
  bool target = false;
  bool support = false;
};

VariantNeeds needs(Variant v) {
  switch (v) {
    case Variant::base: return {false, false};
    case Variant::zero: return {true, false};
    case Variant::few: return {false, true};
    case Variant::hyb: return {true, true};
  }
  return {};
}

std::vector<int> extract_labels(const std::vector<PairRecord>& pairs, const char* partition) {
  std::vector<int> labels;
  labels.reserve(pairs.size());
  for (const auto& p : pairs) {
    if (!p.label)
      throw std::invalid_argument(std::string("unlabeled pair '") + p.pair_id + "' in " +
                                  partition + " partition");
    labels.push_back(*p.label);
  }
  return labels;
}

TrainResult run_training(Variant variant, const std::vector<PairRecord>& source,
                         const std::vector<PairRecord>& target,
                         const std::vector<PairRecord>& support, const AlignedSchema& schema,
                         const EmbeddingProvider& provider, const TrainConfig& config,
                         const StepObserver& observer) {
  config.validate();
  const VariantNeeds need = needs(variant);

  if (source.empty()) throw std::invalid_argument("training requires a non-empty source domain");
  if (need.target && target.empty())
    throw std::invalid_argument(std::string("variant '") + variant_name(variant) +
                                "' requires a non-empty target domain; use train_base without one");
  if (need.support && support.empty())
    throw std::invalid_argument(std::string("variant '") + variant_name(variant) +
                                "' requires a non-empty support set; use train_zero without one");
  if (need.target && config.lambda == 1.0)
    std::fprintf(stderr,
                 "warning: lambda=1 drops the labeled classification term; training is driven "
                 "only by attention alignment and predictions are usually not meaningful\n");

  const std::vector<int> source_labels = extract_labels(source, "source");
  const std::vector<int> support_labels =
      need.support ? extract_labels(support, "support") : std::vector<int>{};

  // Target labels are never consumed: featurization reads attribute values only.
  const auto source_feat = featurize_all(source, schema, provider, config.crop, config.channels);
  const auto target_feat = need.target
                               ? featurize_all(target, schema, provider, config.crop, config.channels)
                               : std::vector<PairFeatures>{};
  const auto support_feat =
      need.support ? featurize_all(support, schema, provider, config.crop, config.channels)
                   : std::vector<PairFeatures>{};

  ModelDims dims;
  dims.feature_count = schema.feature_count();
  dims.embed_dim = provider.dimension();
  dims.latent_dim = config.latent_dim;
  dims.attention_dim = config.attention_dim;
  dims.hidden_dim = config.hidden_dim;
  dims.theta_input = config.theta_input;

  TrainResult result;
  result.params = init_params(dims, config.seed);

  AdamState adam;
  Rng shuffle_rng = Rng::stream(config.seed, "shuffle");
  Rng target_rng = Rng::stream(config.seed, "target_batch");

  std::vector<const PairFeatures*> support_ptrs;
  for (const auto& f : support_feat) support_ptrs.push_back(&f);

  const auto t0 = std::chrono::steady_clock::now();
  int step_index = 0;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    StepData step;
    step.lambda = config.lambda;
    step.phi = config.phi;
    step.use_target = need.target;
    step.use_support = need.support;
    step.support_features = support_ptrs;
    step.support_labels = support_labels;

    if (need.target) {
      if (config.target_batch && *config.target_batch < static_cast<int>(target_feat.size())) {
        std::vector<std::size_t> idx(target_feat.size());
        std::iota(idx.begin(), idx.end(), 0);
        target_rng.shuffle(idx);
        std::vector<Eigen::VectorXd> gs;
        for (int i = 0; i < *config.target_batch; ++i) {
          const LatentFeatures latent = affine_forward(target_feat[idx[static_cast<std::size_t>(i)]].h,
                                                       result.params);
          gs.push_back(attention_forward(latent, result.params).g);
        }
        step.fbar = mean_target_attention(gs);
      } else {
        step.fbar = mean_target_attention(target_feat, result.params);
      }
    }
    if (need.support) {
      std::vector<std::pair<Eigen::VectorXd, int>> labeled;
      labeled.reserve(source_feat.size());
      for (std::size_t i = 0; i < source_feat.size(); ++i) {
        const LatentFeatures latent = affine_forward(source_feat[i].h, result.params);
        labeled.emplace_back(attention_forward(latent, result.params).g, source_labels[i]);
      }
      step.centroids = compute_centroids(labeled);
    }

    std::vector<std::size_t> order(source_feat.size());
    std::iota(order.begin(), order.end(), 0);
    shuffle_rng.shuffle(order);

    EpochTrace trace{};
    trace.epoch = epoch;
    int n_batches = 0;

    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(config.batch_size)) {
      const std::size_t end =
          std::min(order.size(), start + static_cast<std::size_t>(config.batch_size));
      step.batch_features.clear();
      step.batch_labels.clear();
      for (std::size_t i = start; i < end; ++i) {
        step.batch_features.push_back(&source_feat[order[i]]);
        step.batch_labels.push_back(source_labels[order[i]]);
      }

      StepResult res = loss_and_gradients(step, result.params);
      adam_step(result.params, res.grads, adam, config.learning_rate);
      ++step_index;
      if (observer) observer(step_index, result.params, res.grads);

      trace.base += res.loss.base;
      trace.target += res.loss.target;
      trace.support += res.loss.support;
      trace.total += res.loss.total;
      ++n_batches;
    }

    if (n_batches > 0) {
      trace.base /= n_batches;
      trace.target /= n_batches;
      trace.support /= n_batches;
      trace.total /= n_batches;
    }
    trace.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    result.trace.push_back(trace);
  }
  return result;
}

}  // namespace

TrainResult train_base(const std::vector<PairRecord>& source, const AlignedSchema& schema,
                       const EmbeddingProvider& provider, const TrainConfig& config,
                       const StepObserver& observer) {
  return run_training(Variant::base, source, {}, {}, schema, provider, config, observer);
}

TrainResult train_zero(const std::vector<PairRecord>& source,
                       const std::vector<PairRecord>& target, const AlignedSchema& schema,
                       const EmbeddingProvider& provider, const TrainConfig& config,
                       const StepObserver& observer) {
  return run_training(Variant::zero, source, target, {}, schema, provider, config, observer);
}

TrainResult train_few(const std::vector<PairRecord>& source,
                      const std::vector<PairRecord>& support,
                      const std::vector<PairRecord>& target, const AlignedSchema& schema,
                      const EmbeddingProvider& provider, const TrainConfig& config,
                      const StepObserver& observer) {
  (void)target;  // unlabeled target pairs play no role in the few-shot loss
  return run_training(Variant::few, source, {}, support, schema, provider, config, observer);
}

TrainResult train_hyb(const std::vector<PairRecord>& source,
                      const std::vector<PairRecord>& support,
                      const std::vector<PairRecord>& target, const AlignedSchema& schema,
                      const EmbeddingProvider& provider, const TrainConfig& config,
                      const StepObserver& observer) {
  return run_training(Variant::hyb, source, target, support, schema, provider, config, observer);
}

TrainResult train(const DatasetPartitions& parts, const AlignedSchema& schema,
                  const EmbeddingProvider& provider, const TrainConfig& config,
                  const StepObserver& observer) {
  return run_training(config.variant, parts.source_domain, parts.target_domain, parts.support_set,
                      schema, provider, config, observer);
}

std::vector<Prediction> predict(const ModelParams& params, const std::vector<PairRecord>& pairs,
                                const AlignedSchema& schema, const EmbeddingProvider& provider,
                                int crop, FeatureChannels channels) {
  if (schema.feature_count() != params.dims.feature_count)
    throw std::invalid_argument("predict: schema feature count does not match model");
  if (provider.dimension() != params.dims.embed_dim)
    throw std::invalid_argument("predict: provider dimension does not match model");

  std::vector<Prediction> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) {
    PairFeatures f = featurize_pair(p, schema, provider, crop);
    apply_channel_filter(f, channels, provider.dimension());
    const ForwardCache cache = forward_pair(f, params);
    out.push_back({p.pair_id, cache.classifier.y_hat, cache.attention.g});
  }
  return out;
}

}  // namespace adamel
