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

#include "adamel/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace adamel {

PraucMethod parse_prauc_method(const std::string& name) {
  if (name == "average_precision") return PraucMethod::average_precision;
  if (name == "trapezoid") return PraucMethod::trapezoid;
  throw std::invalid_argument("unknown PRAUC method '" + name +
                              "' (average_precision|trapezoid)");
}

const char* prauc_method_name(PraucMethod m) {
  return m == PraucMethod::average_precision ? "average_precision" : "trapezoid";
}

PRCurve prauc(const std::vector<double>& scores, const std::vector<int>& labels,
              PraucMethod method) {
  if (scores.size() != labels.size())
    throw std::invalid_argument("prauc: scores/labels size mismatch");
  std::size_t n_pos = 0, n_neg = 0;
  for (int y : labels) {
    if (y != 0 && y != 1) throw std::invalid_argument("prauc: label outside {0,1}");
    (y == 1 ? n_pos : n_neg)++;
  }
  if (n_pos == 0 || n_neg == 0)
    throw std::invalid_argument("prauc: need at least one label of each class");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&scores](std::size_t i, std::size_t j) {
    return scores[i] > scores[j];
  });

  PRCurve curve;
  curve.method = method;
  std::size_t tp = 0, fp = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    const double threshold = scores[order[i]];
    // Ties collapse into one operating point.
    while (i < order.size() && scores[order[i]] == threshold) {
      (labels[order[i]] == 1 ? tp : fp)++;
      ++i;
    }
    PrPoint pt;
    pt.threshold = threshold;
    pt.recall = static_cast<double>(tp) / static_cast<double>(n_pos);
    pt.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    curve.points.push_back(pt);
  }

  double area = 0.0;
  double prev_recall = 0.0;
  double prev_precision = curve.points.front().precision;
  for (const auto& pt : curve.points) {
    const double dr = pt.recall - prev_recall;
    if (method == PraucMethod::average_precision)
      area += dr * pt.precision;
    else
      area += dr * 0.5 * (pt.precision + prev_precision);
    prev_recall = pt.recall;
    prev_precision = pt.precision;
  }
  curve.prauc = area;
  return curve;
}

void write_pr_curve(const std::string& path, const PRCurve& curve) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write PR curve: " + path);
  out << "threshold,recall,precision\n";
  char buf[128];
  for (const auto& pt : curve.points) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", pt.threshold, pt.recall, pt.precision);
    out << buf;
  }
  if (!out) throw std::runtime_error("PR curve write failed: " + path);
}

AttentionReport attention_report(const ModelParams& params, const std::vector<PairRecord>& pairs,
                                 const AlignedSchema& schema, const EmbeddingProvider& provider,
                                 int crop, int k, FeatureChannels channels) {
  if (pairs.empty()) throw std::invalid_argument("attention_report: no pairs");
  if (k < 1) throw std::invalid_argument("attention_report: k must be >= 1");
  const auto predictions = predict(params, pairs, schema, provider, crop, channels);

  Eigen::VectorXd mean = Eigen::VectorXd::Zero(params.dims.feature_count);
  for (const auto& p : predictions) mean += p.attention;
  mean /= static_cast<double>(predictions.size());

  AttentionReport report;
  report.full_scores = mean;
  report.k = std::min(k, params.dims.feature_count);

  std::vector<AttentionReportRow> rows;
  for (int j = 0; j < params.dims.feature_count; ++j)
    rows.push_back({schema.feature_name(j), mean[j]});
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.feature < b.feature;
  });
  rows.resize(static_cast<std::size_t>(report.k));
  report.rows = std::move(rows);
  return report;
}

void write_attention_report(const std::string& path, const AttentionReport& report) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write attention report: " + path);
  out << "feature\tscore\n";
  char buf[160];
  for (const auto& row : report.rows) {
    std::snprintf(buf, sizeof(buf), "%s\t%.4f\n", row.feature.c_str(), row.score);
    out << buf;
  }
  if (!out) throw std::runtime_error("attention report write failed: " + path);
}

void export_attention_vectors(const ModelParams& params,
                              const std::vector<PairRecord>& source_pairs,
                              const std::vector<PairRecord>& target_pairs,
                              const AlignedSchema& schema, const EmbeddingProvider& provider,
                              int crop, const std::string& path, FeatureChannels channels) {
  if (source_pairs.empty() || target_pairs.empty())
    throw std::invalid_argument("export_attention_vectors: both pair lists must be non-empty");

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write attention vectors: " + path);
  out << "pair_id,domain";
  for (int j = 1; j <= params.dims.feature_count; ++j) out << ",g_" << j;
  out << '\n';

  char buf[64];
  auto emit = [&](const std::vector<PairRecord>& pairs, const char* domain) {
    for (const auto& p : predict(params, pairs, schema, provider, crop, channels)) {
      out << p.pair_id << ',' << domain;
      for (Eigen::Index j = 0; j < p.attention.size(); ++j) {
        std::snprintf(buf, sizeof(buf), ",%.17g", p.attention[j]);
        out << buf;
      }
      out << '\n';
    }
  };
  emit(source_pairs, "source");
  emit(target_pairs, "target");
  if (!out) throw std::runtime_error("attention vector write failed: " + path);
}

void write_metrics(const std::string& path, const Metrics& metrics) {
  nlohmann::json j;
  j["prauc"] = {{"average_precision", metrics.prauc_average_precision},
                {"trapezoid", metrics.prauc_trapezoid}};
  j["default_method"] = "average_precision";
  j["counts"] = {{"pairs", metrics.pair_count},
                 {"positives", metrics.positive_count},
                 {"negatives", metrics.negative_count}};
  j["config_hash"] = metrics.config_hash;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write metrics: " + path);
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("metrics write failed: " + path);
}

}  // namespace adamel
