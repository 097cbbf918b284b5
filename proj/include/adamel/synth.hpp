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

#ifndef ADAMEL_SYNTH_HPP
#define ADAMEL_SYNTH_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "adamel/data.hpp"

namespace adamel {

struct SynthAttribute {
  std::string name;
  int vocab_size = 50;
  // Probability that a matching pair copies each left-side token to the
  // right side; the per-attribute linkage signal strength.
  double informativeness = 0.5;
  double missing_rate_source = 0.0;  // C1, records from seen sources
  double missing_rate_target = 0.0;  // C1, records from unseen sources
  bool new_attribute = false;        // C2: blank in every seen-source record
};

struct SynthConfig {
  std::uint64_t seed = 0;
  int n_sources_seen = 3;
  int n_sources_unseen = 4;
  int n_source_pairs = 300;
  int n_target_pairs = 300;
  int n_support_pairs = 100;
  int n_test_pairs = 300;
  double pos_rate = 0.5;
  double shift_strength = 0.0;  // C3: weight of the rank-permuted token mixture
  int min_tokens = 1;
  int max_tokens = 4;
  std::vector<SynthAttribute> attributes;

  void validate() const;
};

SynthConfig load_synth_config(const std::string& path);
std::string synth_config_to_json(const SynthConfig& config);
SynthConfig synth_config_from_json(const std::string& json_text);

struct SynthCorpus {
  AlignedSchema schema;
  DatasetPartitions partitions;       // source labeled, target unlabeled, support labeled
  std::vector<PairRecord> test;       // labeled, disjoint from the training partitions
  std::vector<double> informativeness;  // ground truth per schema attribute
};

/// Deterministic corpus generation. Matching pairs share tokens on
/// informative attributes; unseen-source records draw from rank-permuted
/// token distributions mixed in with weight shift/(1+shift); values drop at
/// the per-attribute missing rates; new attributes stay blank in
/// seen-source records.
SynthCorpus generate(const SynthConfig& config);

struct ChallengeStatsRow {
  std::string attribute;
  double source_fraction = 0.0;  // pairs with both sides non-missing
  double target_fraction = 0.0;
};

/// Fraction of pairs with both sides non-missing, per attribute and domain.
std::vector<ChallengeStatsRow> challenge_stats(const std::vector<PairRecord>& source_pairs,
                                               const std::vector<PairRecord>& target_pairs,
                                               const AlignedSchema& schema);

std::vector<ChallengeStatsRow> challenge_stats(const SynthCorpus& corpus);

}  // namespace adamel

#endif  // ADAMEL_SYNTH_HPP
