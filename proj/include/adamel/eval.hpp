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

#ifndef ADAMEL_EVAL_HPP
#define ADAMEL_EVAL_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "adamel/training.hpp"

namespace adamel {

enum class PraucMethod { average_precision, trapezoid };

PraucMethod parse_prauc_method(const std::string& name);
const char* prauc_method_name(PraucMethod m);

struct PrPoint {
  double recall = 0.0;
  double precision = 1.0;
  double threshold = 0.0;
};

struct PRCurve {
  std::vector<PrPoint> points;  // one per distinct score, descending threshold
  double prauc = 0.0;
  PraucMethod method = PraucMethod::average_precision;
};

/// Precision-recall curve and area. Equal scores collapse into a single
/// operating point. average_precision sums dRecall * precision; trapezoid
/// integrates the same points, extending the first point flat to recall 0.
/// Requires at least one label of each class.
PRCurve prauc(const std::vector<double>& scores, const std::vector<int>& labels,
              PraucMethod method = PraucMethod::average_precision);

void write_pr_curve(const std::string& path, const PRCurve& curve);

struct AttentionReportRow {
  std::string feature;
  double score = 0.0;
};

struct AttentionReport {
  std::vector<AttentionReportRow> rows;  // descending score, truncated to top k
  int k = 0;
  Eigen::VectorXd full_scores;           // mean attention over all F features
};

/// Mean attention over the given pairs, named "<attribute>_shared" /
/// "<attribute>_unique" per feature, sorted descending and cut to top k
/// (k is clamped to F).
AttentionReport attention_report(const ModelParams& params, const std::vector<PairRecord>& pairs,
                                 const AlignedSchema& schema, const EmbeddingProvider& provider,
                                 int crop, int k,
                                 FeatureChannels channels = FeatureChannels::both);

void write_attention_report(const std::string& path, const AttentionReport& report);

/// CSV of raw attention vectors with a domain tag, for external plotting:
/// pair_id, domain in {source,target}, g_1..g_F.
void export_attention_vectors(const ModelParams& params,
                              const std::vector<PairRecord>& source_pairs,
                              const std::vector<PairRecord>& target_pairs,
                              const AlignedSchema& schema, const EmbeddingProvider& provider,
                              int crop, const std::string& path,
                              FeatureChannels channels = FeatureChannels::both);

struct Metrics {
  double prauc_average_precision = 0.0;
  double prauc_trapezoid = 0.0;
  std::size_t pair_count = 0;
  std::size_t positive_count = 0;
  std::size_t negative_count = 0;
  std::uint64_t config_hash = 0;
};

void write_metrics(const std::string& path, const Metrics& metrics);

}  // namespace adamel

#endif  // ADAMEL_EVAL_HPP
