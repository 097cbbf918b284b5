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

#include "adamel/model.hpp"

#include <cmath>
#include <limits>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "adamel/rng.hpp"

namespace adamel {

using nlohmann::json;

ThetaInput parse_theta_input(const std::string& name) {
  if (name == "latent") return ThetaInput::latent;
  if (name == "projected") return ThetaInput::projected;
  throw std::invalid_argument("unknown theta_input '" + name + "' (latent|projected)");
}

const char* theta_input_name(ThetaInput t) {
  return t == ThetaInput::latent ? "latent" : "projected";
}

void ModelDims::validate() const {
  if (feature_count < 2 || feature_count % 2 != 0)
    throw std::invalid_argument("feature_count must be even and >= 2");
  if (embed_dim < 1 || latent_dim < 1 || attention_dim < 1 || hidden_dim < 1)
    throw std::invalid_argument("model dimensions must be >= 1");
}

bool ModelParams::all_finite() const {
  bool ok = true;
  visit_tensors(*this, [&ok](const std::string&, const double* p, std::int64_t n) {
    for (std::int64_t i = 0; i < n; ++i)
      if (!std::isfinite(p[i])) ok = false;
  });
  return ok;
}

LatentFeatures affine_forward(const Eigen::MatrixXd& h, const ModelParams& params) {
  const int F = params.dims.feature_count;
  const int H = params.dims.latent_dim;
  if (h.rows() != F || h.cols() != params.dims.embed_dim)
    throw std::invalid_argument("affine_forward: feature matrix shape mismatch");

  LatentFeatures out;
  out.pre.resize(F, H);
  out.x.resize(F, H);
  for (int j = 0; j < F; ++j) {
    out.pre.row(j) =
        (params.V[static_cast<std::size_t>(j)] * h.row(j).transpose() +
         params.b[static_cast<std::size_t>(j)])
            .transpose();
    out.x.row(j) = out.pre.row(j).cwiseMax(0.0);
  }
  return out;
}

AttentionResult attention_forward(const LatentFeatures& latent, const ModelParams& params) {
  const int F = params.dims.feature_count;
  if (latent.x.rows() != F || latent.x.cols() != params.dims.latent_dim)
    throw std::invalid_argument("attention_forward: latent shape mismatch");

  AttentionResult out;
  out.pre_tanh = latent.x * params.W.transpose();  // F x H'
  out.t = out.pre_tanh.array().tanh();
  out.energies = out.t * params.a;  // F

  const double mx = out.energies.maxCoeff();
  Eigen::VectorXd ex = (out.energies.array() - mx).exp();
  out.g = ex / ex.sum();
  return out;
}

ClassifierResult classifier_forward(const LatentFeatures& latent, const AttentionResult& attention,
                                    const ModelParams& params) {
  const int F = params.dims.feature_count;
  const bool latent_mode = params.dims.theta_input == ThetaInput::latent;
  const int per = latent_mode ? params.dims.latent_dim : params.dims.attention_dim;

  ClassifierResult out;
  out.gated_pre.resize(static_cast<Eigen::Index>(F) * per);
  for (int j = 0; j < F; ++j) {
    const auto row = latent_mode ? latent.x.row(j) : attention.t.row(j);
    out.gated_pre.segment(static_cast<Eigen::Index>(j) * per, per) =
        attention.g[j] * row.transpose();
  }
  out.gated = out.gated_pre.cwiseMax(0.0);
  out.hidden_pre = params.theta1_w * out.gated + params.theta1_b;
  out.hidden = out.hidden_pre.cwiseMax(0.0);
  out.logit = params.theta2_w.dot(out.hidden) + params.theta2_b;
  out.y_hat = 1.0 / (1.0 + std::exp(-out.logit));
  // Saturated logits round to exactly 0 or 1 in doubles; keep the output
  // strictly inside the open interval.
  if (out.y_hat <= 0.0) out.y_hat = std::numeric_limits<double>::min();
  if (out.y_hat >= 1.0) out.y_hat = std::nextafter(1.0, 0.0);
  return out;
}

ForwardCache forward_pair(const PairFeatures& features, const ModelParams& params) {
  ForwardCache cache;
  cache.latent = affine_forward(features.h, params);
  cache.attention = attention_forward(cache.latent, params);
  cache.classifier = classifier_forward(cache.latent, cache.attention, params);
  return cache;
}

std::int64_t parameter_count_formula(int feature_count, int embed_dim, int latent_dim,
                                     int attention_dim, int hidden_dim) {
  if (feature_count < 1 || embed_dim < 1 || latent_dim < 1 || attention_dim < 1 || hidden_dim < 1)
    throw std::invalid_argument("parameter_count_formula: dimensions must be >= 1");
  const auto F = static_cast<std::int64_t>(feature_count);
  const auto D = static_cast<std::int64_t>(embed_dim);
  const auto H = static_cast<std::int64_t>(latent_dim);
  const auto Hp = static_cast<std::int64_t>(attention_dim);
  const auto Hh = static_cast<std::int64_t>(hidden_dim);
  return F * D * H + H * Hp + F * Hp * Hh;
}

namespace {

void glorot_fill(Eigen::Ref<Eigen::MatrixXd> m, std::int64_t fan_in, std::int64_t fan_out,
                 Rng& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = rng.uniform(-bound, bound);
}

}  // namespace

ModelParams init_params(const ModelDims& dims, std::uint64_t seed) {
  dims.validate();
  Rng rng = Rng::stream(seed, "init");

  ModelParams p;
  p.dims = dims;
  const int F = dims.feature_count;
  p.V.resize(static_cast<std::size_t>(F));
  p.b.resize(static_cast<std::size_t>(F));
  for (int j = 0; j < F; ++j) {
    p.V[static_cast<std::size_t>(j)].resize(dims.latent_dim, dims.embed_dim);
    glorot_fill(p.V[static_cast<std::size_t>(j)], dims.embed_dim, dims.latent_dim, rng);
    p.b[static_cast<std::size_t>(j)] = Eigen::VectorXd::Zero(dims.latent_dim);
  }
  p.W.resize(dims.attention_dim, dims.latent_dim);
  glorot_fill(p.W, dims.latent_dim, dims.attention_dim, rng);
  p.a.resize(dims.attention_dim);
  glorot_fill(p.a, dims.attention_dim, 1, rng);
  p.theta1_w.resize(dims.hidden_dim, dims.classifier_input());
  glorot_fill(p.theta1_w, dims.classifier_input(), dims.hidden_dim, rng);
  p.theta1_b = Eigen::VectorXd::Zero(dims.hidden_dim);
  p.theta2_w.resize(dims.hidden_dim);
  glorot_fill(p.theta2_w, dims.hidden_dim, 1, rng);
  p.theta2_b = 0.0;
  return p;
}

namespace {

template <typename Params, typename Fn>
void visit_impl(Params& p, const Fn& fn) {
  const int F = p.dims.feature_count;
  for (int j = 0; j < F; ++j) {
    fn("V" + std::to_string(j), p.V[static_cast<std::size_t>(j)].data(),
       p.V[static_cast<std::size_t>(j)].size());
    fn("b" + std::to_string(j), p.b[static_cast<std::size_t>(j)].data(),
       p.b[static_cast<std::size_t>(j)].size());
  }
  fn("W", p.W.data(), p.W.size());
  fn("a", p.a.data(), p.a.size());
  fn("theta1_w", p.theta1_w.data(), p.theta1_w.size());
  fn("theta1_b", p.theta1_b.data(), p.theta1_b.size());
  fn("theta2_w", p.theta2_w.data(), p.theta2_w.size());
  fn("theta2_b", &p.theta2_b, 1);
}

}  // namespace

void visit_tensors(ModelParams& params,
                   const std::function<void(const std::string&, double*, std::int64_t)>& fn) {
  visit_impl(params, fn);
}

void visit_tensors(const ModelParams& params,
                   const std::function<void(const std::string&, const double*, std::int64_t)>& fn) {
  visit_impl(params, fn);
}

namespace {

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j, Eigen::Index rows, Eigen::Index cols,
                                 const std::string& name) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows)
    throw std::runtime_error("checkpoint: tensor '" + name + "' has wrong row count");
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& row = j[static_cast<std::size_t>(r)];
    if (static_cast<Eigen::Index>(row.size()) != cols)
      throw std::runtime_error("checkpoint: tensor '" + name + "' has wrong column count");
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = row[static_cast<std::size_t>(c)].get<double>();
  }
  return m;
}

json vector_to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Eigen::VectorXd vector_from_json(const json& j, Eigen::Index n, const std::string& name) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != n)
    throw std::runtime_error("checkpoint: tensor '" + name + "' has wrong length");
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = j[static_cast<std::size_t>(i)].get<double>();
  return v;
}

}  // namespace

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  const auto& d = ckpt.params.dims;
  json j;
  j["format"] = "adamel-checkpoint";
  j["version"] = 1;
  j["dims"] = {{"feature_count", d.feature_count}, {"embed_dim", d.embed_dim},
               {"latent_dim", d.latent_dim},       {"attention_dim", d.attention_dim},
               {"hidden_dim", d.hidden_dim}};
  j["theta_input"] = theta_input_name(d.theta_input);
  j["schema"] = ckpt.schema_attributes;
  j["channels"] = channels_name(ckpt.channels);
  j["crop"] = ckpt.crop;
  j["provider"] = {{"kind", ckpt.provider_kind},
                   {"dim", ckpt.provider_dim},
                   {"seed", ckpt.provider_seed},
                   {"path", ckpt.provider_path},
                   {"config_hash", ckpt.provider_hash}};

  json tensors;
  json V = json::array();
  json b = json::array();
  for (int f = 0; f < d.feature_count; ++f) {
    V.push_back(matrix_to_json(ckpt.params.V[static_cast<std::size_t>(f)]));
    b.push_back(vector_to_json(ckpt.params.b[static_cast<std::size_t>(f)]));
  }
  tensors["V"] = std::move(V);
  tensors["b"] = std::move(b);
  tensors["W"] = matrix_to_json(ckpt.params.W);
  tensors["a"] = vector_to_json(ckpt.params.a);
  tensors["theta1_w"] = matrix_to_json(ckpt.params.theta1_w);
  tensors["theta1_b"] = vector_to_json(ckpt.params.theta1_b);
  tensors["theta2_w"] = vector_to_json(ckpt.params.theta2_w);
  tensors["theta2_b"] = ckpt.params.theta2_b;
  j["params"] = std::move(tensors);

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
  out << j.dump(1) << '\n';
  if (!out) throw std::runtime_error("checkpoint write failed: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
  json j;
  in >> j;
  if (j.value("format", "") != "adamel-checkpoint")
    throw std::runtime_error(path + ": not an adamel checkpoint");

  Checkpoint ckpt;
  ModelDims d;
  const auto& jd = j.at("dims");
  d.feature_count = jd.at("feature_count").get<int>();
  d.embed_dim = jd.at("embed_dim").get<int>();
  d.latent_dim = jd.at("latent_dim").get<int>();
  d.attention_dim = jd.at("attention_dim").get<int>();
  d.hidden_dim = jd.at("hidden_dim").get<int>();
  d.theta_input = parse_theta_input(j.at("theta_input").get<std::string>());
  d.validate();

  ckpt.schema_attributes = j.at("schema").get<std::vector<std::string>>();
  if (static_cast<int>(ckpt.schema_attributes.size()) * 2 != d.feature_count)
    throw std::runtime_error(path + ": schema size does not match feature_count");
  ckpt.channels = parse_channels(j.value("channels", "both"));
  ckpt.crop = j.value("crop", 20);
  const auto& jp = j.at("provider");
  ckpt.provider_kind = jp.at("kind").get<std::string>();
  ckpt.provider_dim = jp.at("dim").get<int>();
  ckpt.provider_seed = jp.at("seed").get<std::uint64_t>();
  ckpt.provider_path = jp.value("path", "");
  ckpt.provider_hash = jp.at("config_hash").get<std::uint64_t>();
  if (ckpt.provider_dim != d.embed_dim)
    throw std::runtime_error(path + ": provider dimension does not match embed_dim");

  ModelParams& p = ckpt.params;
  p.dims = d;
  const auto& t = j.at("params");
  p.V.resize(static_cast<std::size_t>(d.feature_count));
  p.b.resize(static_cast<std::size_t>(d.feature_count));
  for (int f = 0; f < d.feature_count; ++f) {
    p.V[static_cast<std::size_t>(f)] = matrix_from_json(t.at("V").at(static_cast<std::size_t>(f)),
                                                        d.latent_dim, d.embed_dim, "V");
    p.b[static_cast<std::size_t>(f)] =
        vector_from_json(t.at("b").at(static_cast<std::size_t>(f)), d.latent_dim, "b");
  }
  p.W = matrix_from_json(t.at("W"), d.attention_dim, d.latent_dim, "W");
  p.a = vector_from_json(t.at("a"), d.attention_dim, "a");
  p.theta1_w = matrix_from_json(t.at("theta1_w"), d.hidden_dim, d.classifier_input(), "theta1_w");
  p.theta1_b = vector_from_json(t.at("theta1_b"), d.hidden_dim, "theta1_b");
  p.theta2_w = vector_from_json(t.at("theta2_w"), d.hidden_dim, "theta2_w");
  p.theta2_b = t.at("theta2_b").get<double>();
  if (!p.all_finite()) throw std::runtime_error(path + ": non-finite parameters");
  return ckpt;
}

}  // namespace adamel
