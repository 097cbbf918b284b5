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

#include "adamel/losses.hpp"

#include <cmath>
#include <stdexcept>

namespace adamel {

namespace {

double clamp_prob(double p) {
  if (p < kLogClamp) return kLogClamp;
  if (p > 1.0 - kLogClamp) return 1.0 - kLogClamp;
  return p;
}

bool in_clamp_range(double p) { return p > kLogClamp && p < 1.0 - kLogClamp; }

void check_label(int y) {
  if (y != 0 && y != 1) throw std::invalid_argument("label outside {0,1}");
}

void check_lambda(double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0))
    throw std::invalid_argument("lambda must lie in [0,1]");
}

void check_phi(double phi) {
  if (!(phi >= 0.0 && phi <= 1.0)) throw std::invalid_argument("phi must lie in [0,1]");
}

}  // namespace

double loss_base(const std::vector<double>& predictions, const std::vector<int>& labels) {
  if (predictions.empty()) throw std::invalid_argument("loss_base: empty batch");
  if (predictions.size() != labels.size())
    throw std::invalid_argument("loss_base: predictions/labels size mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    check_label(labels[i]);
    const double p = clamp_prob(predictions[i]);
    sum += labels[i] == 1 ? std::log(p) : std::log(1.0 - p);
  }
  return -sum / static_cast<double>(predictions.size());
}

Eigen::VectorXd mean_target_attention(const std::vector<Eigen::VectorXd>& target_attentions) {
  if (target_attentions.empty())
    throw std::invalid_argument("mean_target_attention: empty target batch");
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(target_attentions.front().size());
  for (const auto& g : target_attentions) {
    if (g.size() != mean.size())
      throw std::invalid_argument("mean_target_attention: inconsistent attention size");
    mean += g;
  }
  return mean / static_cast<double>(target_attentions.size());
}

Eigen::VectorXd mean_target_attention(const std::vector<PairFeatures>& target_features,
                                      const ModelParams& params) {
  std::vector<Eigen::VectorXd> gs;
  gs.reserve(target_features.size());
  for (const auto& f : target_features) {
    const LatentFeatures latent = affine_forward(f.h, params);
    gs.push_back(attention_forward(latent, params).g);
  }
  return mean_target_attention(gs);
}

double loss_target(const std::vector<Eigen::VectorXd>& source_attentions,
                   const Eigen::VectorXd& fbar) {
  if (source_attentions.empty()) throw std::invalid_argument("loss_target: empty source batch");
  double sum = 0.0;
  for (const auto& g : source_attentions) {
    if (g.size() != fbar.size()) throw std::invalid_argument("loss_target: size mismatch");
    for (Eigen::Index j = 0; j < fbar.size(); ++j) {
      if (fbar[j] <= 0.0) continue;
      const double gj = std::max(g[j], kLogClamp);
      sum += fbar[j] * std::log(fbar[j] / gj);
    }
  }
  return sum / static_cast<double>(source_attentions.size());
}

double loss_un(double base, double target, double lambda) {
  check_lambda(lambda);
  return (1.0 - lambda) * base + lambda * target;
}

Centroids compute_centroids(
    const std::vector<std::pair<Eigen::VectorXd, int>>& labeled_attentions) {
  Eigen::Index dim = -1;
  std::size_t n_pos = 0, n_neg = 0;
  for (const auto& [g, y] : labeled_attentions) {
    check_label(y);
    if (dim < 0) dim = g.size();
    if (g.size() != dim) throw std::invalid_argument("compute_centroids: size mismatch");
    (y == 1 ? n_pos : n_neg)++;
  }
  if (n_pos == 0 || n_neg == 0)
    throw std::invalid_argument("compute_centroids: need at least one pair of each class");

  Centroids c;
  c.c_pos = Eigen::VectorXd::Zero(dim);
  c.c_neg = Eigen::VectorXd::Zero(dim);
  for (const auto& [g, y] : labeled_attentions) (y == 1 ? c.c_pos : c.c_neg) += g;
  c.c_pos /= static_cast<double>(n_pos);
  c.c_neg /= static_cast<double>(n_neg);

  double dist_pos = 0.0, dist_neg = 0.0;
  for (const auto& [g, y] : labeled_attentions) {
    if (y == 1)
      dist_pos += (g - c.c_pos).norm();
    else
      dist_neg += (g - c.c_neg).norm();
  }
  c.dbar_pos = std::max(dist_pos / static_cast<double>(n_pos), kDistFloor);
  c.dbar_neg = std::max(dist_neg / static_cast<double>(n_neg), kDistFloor);
  return c;
}

double loss_support(const std::vector<SupportPoint>& support, const Centroids& centroids) {
  if (support.empty()) throw std::invalid_argument("loss_support: empty support set");
  double sum = 0.0;
  for (const auto& pt : support) {
    check_label(pt.label);
    const bool pos = pt.label == 1;
    const Eigen::VectorXd& c = pos ? centroids.c_pos : centroids.c_neg;
    const double dbar = pos ? centroids.dbar_pos : centroids.dbar_neg;
    const double weight = (pt.g - c).norm() / dbar;
    const double p = clamp_prob(pt.y_hat);
    sum += weight * (pos ? std::log(p) : std::log(1.0 - p));
  }
  return -sum / static_cast<double>(support.size());
}

double loss_ssl(double base, double support, double phi) {
  check_phi(phi);
  return phi == 0.0 ? base : base + phi * support;
}

double loss_hybrid(double base, double target, double support, double lambda, double phi) {
  check_lambda(lambda);
  check_phi(phi);
  double total = (1.0 - lambda) * base + lambda * target;
  if (phi != 0.0) total += phi * support;
  return total;
}

Gradients Gradients::zero_like(const ModelParams& params) {
  Gradients g;
  g.dims = params.dims;
  const std::size_t F = params.V.size();
  g.V.resize(F);
  g.b.resize(F);
  for (std::size_t j = 0; j < F; ++j) {
    g.V[j] = Eigen::MatrixXd::Zero(params.V[j].rows(), params.V[j].cols());
    g.b[j] = Eigen::VectorXd::Zero(params.b[j].size());
  }
  g.W = Eigen::MatrixXd::Zero(params.W.rows(), params.W.cols());
  g.a = Eigen::VectorXd::Zero(params.a.size());
  g.theta1_w = Eigen::MatrixXd::Zero(params.theta1_w.rows(), params.theta1_w.cols());
  g.theta1_b = Eigen::VectorXd::Zero(params.theta1_b.size());
  g.theta2_w = Eigen::VectorXd::Zero(params.theta2_w.size());
  g.theta2_b = 0.0;
  return g;
}

namespace {

template <typename G, typename Fn>
void visit_grads_impl(G& g, const Fn& fn) {
  for (std::size_t j = 0; j < g.V.size(); ++j) {
    fn("V" + std::to_string(j), g.V[j].data(), g.V[j].size());
    fn("b" + std::to_string(j), g.b[j].data(), g.b[j].size());
  }
  fn("W", g.W.data(), g.W.size());
  fn("a", g.a.data(), g.a.size());
  fn("theta1_w", g.theta1_w.data(), g.theta1_w.size());
  fn("theta1_b", g.theta1_b.data(), g.theta1_b.size());
  fn("theta2_w", g.theta2_w.data(), g.theta2_w.size());
  fn("theta2_b", &g.theta2_b, 1);
}

}  // namespace

void visit_tensors(Gradients& grads,
                   const std::function<void(const std::string&, double*, std::int64_t)>& fn) {
  visit_grads_impl(grads, fn);
}

void visit_tensors(const Gradients& grads,
                   const std::function<void(const std::string&, const double*, std::int64_t)>& fn) {
  visit_grads_impl(grads, fn);
}

void Gradients::check_finite() const {
  std::string bad;
  visit_tensors(*this, [&bad](const std::string& name, const double* p, std::int64_t n) {
    if (!bad.empty()) return;
    for (std::int64_t i = 0; i < n; ++i)
      if (!std::isfinite(p[i])) {
        bad = name;
        return;
      }
  });
  if (!bad.empty()) throw std::runtime_error("non-finite gradient in tensor '" + bad + "'");
}

void backward_pair(const PairFeatures& features, const ForwardCache& cache,
                   const ModelParams& params, double dloss_dyhat,
                   const Eigen::VectorXd* dloss_dg, Gradients& out) {
  const int F = params.dims.feature_count;
  const bool latent_mode = params.dims.theta_input == ThetaInput::latent;
  const int per = latent_mode ? params.dims.latent_dim : params.dims.attention_dim;

  const auto& lat = cache.latent;
  const auto& att = cache.attention;
  const auto& cls = cache.classifier;

  Eigen::MatrixXd dx = Eigen::MatrixXd::Zero(F, params.dims.latent_dim);
  Eigen::MatrixXd dt = Eigen::MatrixXd::Zero(F, params.dims.attention_dim);
  Eigen::VectorXd dg = Eigen::VectorXd::Zero(F);
  if (dloss_dg) dg = *dloss_dg;

  if (dloss_dyhat != 0.0) {
    const double ds = dloss_dyhat * cls.y_hat * (1.0 - cls.y_hat);
    out.theta2_w += ds * cls.hidden;
    out.theta2_b += ds;
    Eigen::VectorXd dn = ds * params.theta2_w;
    Eigen::VectorXd dm =
        (cls.hidden_pre.array() > 0.0).select(dn.array(), 0.0).matrix();
    out.theta1_w += dm * cls.gated.transpose();
    out.theta1_b += dm;
    Eigen::VectorXd dz = params.theta1_w.transpose() * dm;
    Eigen::VectorXd dp = (cls.gated_pre.array() > 0.0).select(dz.array(), 0.0).matrix();
    for (int j = 0; j < F; ++j) {
      const auto seg = dp.segment(static_cast<Eigen::Index>(j) * per, per);
      if (latent_mode) {
        dg[j] += seg.dot(lat.x.row(j));
        dx.row(j) += att.g[j] * seg.transpose();
      } else {
        dg[j] += seg.dot(att.t.row(j));
        dt.row(j) += att.g[j] * seg.transpose();
      }
    }
  }

  // Softmax: de_j = g_j (dg_j - sum_k dg_k g_k).
  const double pull = dg.dot(att.g);
  const Eigen::VectorXd de = (att.g.array() * (dg.array() - pull)).matrix();

  out.a += att.t.transpose() * de;
  dt += de * params.a.transpose();

  const Eigen::MatrixXd du = (dt.array() * (1.0 - att.t.array().square())).matrix();
  out.W += du.transpose() * lat.x;
  dx += du * params.W;

  const Eigen::MatrixXd dz_lat =
      (lat.pre.array() > 0.0).select(dx.array(), 0.0).matrix();
  for (int j = 0; j < F; ++j) {
    out.V[static_cast<std::size_t>(j)] +=
        dz_lat.row(j).transpose() * features.h.row(j);
    out.b[static_cast<std::size_t>(j)] += dz_lat.row(j).transpose();
  }
}

namespace {

struct TermCoefficients {
  double base = 1.0;
  double target = 0.0;
  double support = 0.0;
};

TermCoefficients coefficients(const StepData& step) {
  check_lambda(step.lambda);
  check_phi(step.phi);
  TermCoefficients c;
  if (step.use_target) {
    c.base = 1.0 - step.lambda;
    c.target = step.lambda;
  }
  if (step.use_support) c.support = step.phi;
  return c;
}

void validate_step(const StepData& step) {
  if (step.batch_features.empty()) throw std::invalid_argument("step: empty batch");
  if (step.batch_features.size() != step.batch_labels.size())
    throw std::invalid_argument("step: batch features/labels size mismatch");
  if (step.use_target && step.fbar.size() == 0)
    throw std::invalid_argument("step: target term requires fbar");
  if (step.use_support) {
    if (step.support_features.empty())
      throw std::invalid_argument("step: support term requires support pairs");
    if (step.support_features.size() != step.support_labels.size())
      throw std::invalid_argument("step: support features/labels size mismatch");
  }
}

double compose_total(const LossValue& v, const TermCoefficients& c, const StepData& step) {
  double total = c.base * v.base;
  if (step.use_target) total += c.target * v.target;
  if (step.use_support && c.support != 0.0) total += c.support * v.support;
  return total;
}

}  // namespace

LossValue evaluate_step_loss(const StepData& step, const ModelParams& params) {
  validate_step(step);
  const TermCoefficients coeff = coefficients(step);

  LossValue v;
  std::vector<double> preds;
  std::vector<Eigen::VectorXd> gs;
  preds.reserve(step.batch_features.size());
  for (const auto* f : step.batch_features) {
    const ForwardCache cache = forward_pair(*f, params);
    preds.push_back(cache.classifier.y_hat);
    gs.push_back(cache.attention.g);
  }
  v.base = loss_base(preds, step.batch_labels);
  if (step.use_target) v.target = loss_target(gs, step.fbar);
  if (step.use_support) {
    std::vector<SupportPoint> pts;
    pts.reserve(step.support_features.size());
    for (std::size_t i = 0; i < step.support_features.size(); ++i) {
      const ForwardCache cache = forward_pair(*step.support_features[i], params);
      pts.push_back({cache.attention.g, cache.classifier.y_hat, step.support_labels[i]});
    }
    v.support = loss_support(pts, step.centroids);
  }
  v.total = compose_total(v, coeff, step);
  return v;
}

StepResult loss_and_gradients(const StepData& step, const ModelParams& params) {
  validate_step(step);
  const TermCoefficients coeff = coefficients(step);
  const double B = static_cast<double>(step.batch_features.size());

  StepResult res;
  res.grads = Gradients::zero_like(params);

  std::vector<double> preds;
  std::vector<Eigen::VectorXd> gs;
  preds.reserve(step.batch_features.size());
  for (std::size_t i = 0; i < step.batch_features.size(); ++i) {
    const PairFeatures& f = *step.batch_features[i];
    const ForwardCache cache = forward_pair(f, params);
    const double y_hat = cache.classifier.y_hat;
    const int y = step.batch_labels[i];
    check_label(y);
    preds.push_back(y_hat);
    gs.push_back(cache.attention.g);

    double dyhat = 0.0;
    if (coeff.base != 0.0 && in_clamp_range(y_hat))
      dyhat = -coeff.base / B * (y == 1 ? 1.0 / y_hat : -1.0 / (1.0 - y_hat));

    Eigen::VectorXd dg;
    const Eigen::VectorXd* dg_ptr = nullptr;
    if (step.use_target && coeff.target != 0.0) {
      dg = Eigen::VectorXd::Zero(cache.attention.g.size());
      for (Eigen::Index j = 0; j < dg.size(); ++j) {
        if (step.fbar[j] <= 0.0) continue;
        const double gj = cache.attention.g[j];
        if (gj > kLogClamp) dg[j] = -coeff.target / B * step.fbar[j] / gj;
      }
      dg_ptr = &dg;
    }
    if (dyhat != 0.0 || dg_ptr) backward_pair(f, cache, params, dyhat, dg_ptr, res.grads);
  }
  res.loss.base = loss_base(preds, step.batch_labels);
  if (step.use_target) res.loss.target = loss_target(gs, step.fbar);

  if (step.use_support) {
    const double S = static_cast<double>(step.support_features.size());
    std::vector<SupportPoint> pts;
    pts.reserve(step.support_features.size());
    for (std::size_t i = 0; i < step.support_features.size(); ++i) {
      const PairFeatures& f = *step.support_features[i];
      const ForwardCache cache = forward_pair(f, params);
      const int y = step.support_labels[i];
      check_label(y);
      const double y_hat = cache.classifier.y_hat;
      pts.push_back({cache.attention.g, y_hat, y});
      if (coeff.support == 0.0) continue;

      const bool pos = y == 1;
      const Eigen::VectorXd& c = pos ? step.centroids.c_pos : step.centroids.c_neg;
      const double dbar = pos ? step.centroids.dbar_pos : step.centroids.dbar_neg;
      const Eigen::VectorXd diff = cache.attention.g - c;
      const double dist = diff.norm();
      const double weight = dist / dbar;
      const double p = clamp_prob(y_hat);
      const double log_term = pos ? std::log(p) : std::log(1.0 - p);

      double dyhat = 0.0;
      if (in_clamp_range(y_hat))
        dyhat = -coeff.support / S * weight * (pos ? 1.0 / y_hat : -1.0 / (1.0 - y_hat));

      Eigen::VectorXd dg = Eigen::VectorXd::Zero(cache.attention.g.size());
      if (dist > kDistFloor)
        dg = (-coeff.support / S * log_term / (dbar * dist)) * diff;

      backward_pair(f, cache, params, dyhat, &dg, res.grads);
    }
    res.loss.support = loss_support(pts, step.centroids);
  }

  res.loss.total = compose_total(res.loss, coeff, step);
  res.batch_predictions = std::move(preds);
  res.grads.check_finite();
  return res;
}

}  // namespace adamel
