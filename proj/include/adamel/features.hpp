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

#ifndef ADAMEL_FEATURES_HPP
#define ADAMEL_FEATURES_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "adamel/data.hpp"

namespace adamel {

/// Lowercases and splits on any non-alphanumeric ASCII character. Bytes
/// >= 0x80 are kept as token characters so multi-byte text survives intact.
std::vector<std::string> tokenize(const std::string& text);

/// The two contrastive token sets of one attribute: shared = intersection,
/// unique = symmetric difference. Both returned sorted and deduplicated.
struct ContrastiveTokens {
  std::vector<std::string> shared;
  std::vector<std::string> unique;
};

ContrastiveTokens contrastive_features(const std::string& left_value,
                                       const std::string& right_value);

/// Word -> D-dim vector. Lookup is total: every word maps to some vector,
/// deterministically for a fixed provider configuration.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual int dimension() const = 0;
  virtual Eigen::VectorXd lookup(const std::string& word) const = 0;
  virtual std::string kind() const = 0;
  /// Stable identifier of (kind, dimension, underlying data); stored in
  /// checkpoints so a model is never scored against foreign embeddings.
  virtual std::uint64_t config_hash() const = 0;
};

/// Deterministic pseudo-random unit vectors seeded by a 64-bit hash of the
/// word. Stands in for a pretrained vector file when none is available.
class HashingEmbedding final : public EmbeddingProvider {
 public:
  HashingEmbedding(int dimension, std::uint64_t seed);
  int dimension() const override { return dimension_; }
  Eigen::VectorXd lookup(const std::string& word) const override;
  std::string kind() const override { return "hashing"; }
  std::uint64_t config_hash() const override;
  std::uint64_t seed() const { return seed_; }

 private:
  int dimension_;
  std::uint64_t seed_;
};

/// Loads the plain-text vector format `word v1 ... vD`, one word per line,
/// with an optional `count dim` header line. Out-of-vocabulary words fall
/// back to deterministic hashing vectors of the same dimension.
class VectorFileEmbedding final : public EmbeddingProvider {
 public:
  explicit VectorFileEmbedding(const std::string& path);
  int dimension() const override { return dimension_; }
  Eigen::VectorXd lookup(const std::string& word) const override;
  std::string kind() const override { return "vector_file"; }
  std::uint64_t config_hash() const override { return content_hash_; }
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  int dimension_ = 0;
  std::uint64_t content_hash_ = 0;
  std::unordered_map<std::string, Eigen::VectorXd> table_;
  HashingEmbedding fallback_;
};

/// The F x D token-embedding matrix of one pair. Row 2k holds the shared
/// tokens of attribute k, row 2k+1 the unique tokens.
struct PairFeatures {
  Eigen::MatrixXd h;                 // F x D
  std::vector<bool> missing_mask;    // true where the token set was empty
};

/// Fixed normalized non-zero vector substituted for empty token sets.
Eigen::VectorXd sentinel_vector(int dimension);

/// Sum of embeddings over the first `crop` tokens in sorted order; the
/// sentinel when the set is empty.
Eigen::VectorXd embed_feature(const std::vector<std::string>& tokens,
                              const EmbeddingProvider& provider, int crop);

PairFeatures featurize_pair(const PairRecord& pair, const AlignedSchema& schema,
                            const EmbeddingProvider& provider, int crop);

/// Which contrastive channels feed the model. Deselected rows are replaced
/// by the sentinel so tensor shapes stay fixed across ablations.
enum class FeatureChannels { both, shared_only, unique_only };

FeatureChannels parse_channels(const std::string& name);
const char* channels_name(FeatureChannels c);

void apply_channel_filter(PairFeatures& features, FeatureChannels channels, int dimension);

/// Featurizes a whole partition (pure per pair; crop applies everywhere).
std::vector<PairFeatures> featurize_all(const std::vector<PairRecord>& pairs,
                                        const AlignedSchema& schema,
                                        const EmbeddingProvider& provider, int crop,
                                        FeatureChannels channels = FeatureChannels::both);

/// Debug dump of one pair's F x D matrix as CSV, row-major, one feature row
/// per line with a trailing missing flag.
void write_feature_dump(const std::string& path, const PairFeatures& features);

}  // namespace adamel

#endif  // ADAMEL_FEATURES_HPP
