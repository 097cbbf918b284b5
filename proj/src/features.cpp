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

#include "adamel/features.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "adamel/rng.hpp"

namespace adamel {

std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> tokens;
  std::string cur;
  for (unsigned char c : text) {
    const bool keep = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c >= 0x80;
    const bool upper = c >= 'A' && c <= 'Z';
    if (keep) {
      cur.push_back(static_cast<char>(c));
    } else if (upper) {
      cur.push_back(static_cast<char>(c - 'A' + 'a'));
    } else if (!cur.empty()) {
      tokens.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) tokens.push_back(std::move(cur));
  return tokens;
}

ContrastiveTokens contrastive_features(const std::string& left_value,
                                       const std::string& right_value) {
  const auto lt = tokenize(left_value);
  const auto rt = tokenize(right_value);
  const std::set<std::string> ls(lt.begin(), lt.end());
  const std::set<std::string> rs(rt.begin(), rt.end());

  ContrastiveTokens out;
  std::set_intersection(ls.begin(), ls.end(), rs.begin(), rs.end(),
                        std::back_inserter(out.shared));
  std::set_symmetric_difference(ls.begin(), ls.end(), rs.begin(), rs.end(),
                                std::back_inserter(out.unique));
  return out;
}

HashingEmbedding::HashingEmbedding(int dimension, std::uint64_t seed)
    : dimension_(dimension), seed_(seed) {
  if (dimension < 1) throw std::invalid_argument("embedding dimension must be >= 1");
}

Eigen::VectorXd HashingEmbedding::lookup(const std::string& word) const {
  Rng rng(fnv1a64(word) ^ (seed_ * 0x9e3779b97f4a7c15ULL));
  Eigen::VectorXd v(dimension_);
  for (int i = 0; i < dimension_; ++i) v[i] = rng.normal();
  const double norm = v.norm();
  if (norm == 0.0) return sentinel_vector(dimension_);
  return v / norm;
}

std::uint64_t HashingEmbedding::config_hash() const {
  std::uint64_t h = fnv1a64("hashing");
  h = fnv1a64(&dimension_, sizeof(dimension_), h);
  h = fnv1a64(&seed_, sizeof(seed_), h);
  return h;
}

VectorFileEmbedding::VectorFileEmbedding(const std::string& path)
    : path_(path), fallback_(1, 0) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open embedding file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  content_hash_ = fnv1a64(text.data(), text.size());

  std::istringstream lines(text);
  std::string line;
  bool first = true;
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string word;
    fields >> word;
    std::vector<double> vals;
    double v;
    while (fields >> v) vals.push_back(v);
    if (first) {
      first = false;
      // Optional header: two integers, count and dim.
      if (vals.size() == 1) {
        double count_val;
        if (std::istringstream(word) >> count_val) continue;
      }
    }
    if (vals.empty()) throw std::runtime_error(path + ": no values for word '" + word + "'");
    if (dimension_ == 0) dimension_ = static_cast<int>(vals.size());
    if (static_cast<int>(vals.size()) != dimension_)
      throw std::runtime_error(path + ": inconsistent dimension at word '" + word + "'");
    table_[word] = Eigen::Map<Eigen::VectorXd>(vals.data(), dimension_);
  }
  if (dimension_ == 0) throw std::runtime_error(path + ": no vectors found");
  fallback_ = HashingEmbedding(dimension_, content_hash_);
}

Eigen::VectorXd VectorFileEmbedding::lookup(const std::string& word) const {
  auto it = table_.find(word);
  if (it != table_.end()) return it->second;
  return fallback_.lookup(word);
}

Eigen::VectorXd sentinel_vector(int dimension) {
  return Eigen::VectorXd::Constant(dimension, 1.0 / std::sqrt(static_cast<double>(dimension)));
}

Eigen::VectorXd embed_feature(const std::vector<std::string>& tokens,
                              const EmbeddingProvider& provider, int crop) {
  if (crop < 1) throw std::invalid_argument("crop must be >= 1");
  const int dim = provider.dimension();
  if (tokens.empty()) return sentinel_vector(dim);
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(dim);
  const std::size_t n = std::min<std::size_t>(tokens.size(), static_cast<std::size_t>(crop));
  for (std::size_t i = 0; i < n; ++i) sum += provider.lookup(tokens[i]);
  return sum;
}

PairFeatures featurize_pair(const PairRecord& pair, const AlignedSchema& schema,
                            const EmbeddingProvider& provider, int crop) {
  const int F = schema.feature_count();
  const int D = provider.dimension();
  if (D < 1) throw std::runtime_error("featurize_pair: provider dimension mismatch");

  PairFeatures out;
  out.h.resize(F, D);
  out.missing_mask.assign(static_cast<std::size_t>(F), false);
  for (int k = 0; k < schema.attribute_count(); ++k) {
    const auto& attr = schema.attributes()[static_cast<std::size_t>(k)];
    const auto ct = contrastive_features(pair.left.value(attr), pair.right.value(attr));
    out.h.row(2 * k) = embed_feature(ct.shared, provider, crop).transpose();
    out.h.row(2 * k + 1) = embed_feature(ct.unique, provider, crop).transpose();
    out.missing_mask[static_cast<std::size_t>(2 * k)] = ct.shared.empty();
    out.missing_mask[static_cast<std::size_t>(2 * k + 1)] = ct.unique.empty();
  }
  if (!out.h.allFinite()) throw std::runtime_error("featurize_pair: non-finite embedding");
  return out;
}

FeatureChannels parse_channels(const std::string& name) {
  if (name == "both") return FeatureChannels::both;
  if (name == "shared") return FeatureChannels::shared_only;
  if (name == "unique") return FeatureChannels::unique_only;
  throw std::invalid_argument("unknown channels '" + name + "' (both|shared|unique)");
}

const char* channels_name(FeatureChannels c) {
  switch (c) {
    case FeatureChannels::both: return "both";
    case FeatureChannels::shared_only: return "shared";
    case FeatureChannels::unique_only: return "unique";
  }
  return "?";
}

void apply_channel_filter(PairFeatures& features, FeatureChannels channels, int dimension) {
  if (channels == FeatureChannels::both) return;
  const Eigen::VectorXd sent = sentinel_vector(dimension);
  for (int j = 0; j < features.h.rows(); ++j) {
    const bool is_shared = j % 2 == 0;
    const bool drop = (channels == FeatureChannels::shared_only) ? !is_shared : is_shared;
    if (drop) {
      features.h.row(j) = sent.transpose();
      features.missing_mask[static_cast<std::size_t>(j)] = true;
    }
  }
}

std::vector<PairFeatures> featurize_all(const std::vector<PairRecord>& pairs,
                                        const AlignedSchema& schema,
                                        const EmbeddingProvider& provider, int crop,
                                        FeatureChannels channels) {
  std::vector<PairFeatures> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) {
    PairFeatures f = featurize_pair(p, schema, provider, crop);
    apply_channel_filter(f, channels, provider.dimension());
    out.push_back(std::move(f));
  }
  return out;
}

void write_feature_dump(const std::string& path, const PairFeatures& features) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write feature dump: " + path);
  char buf[64];
  for (Eigen::Index r = 0; r < features.h.rows(); ++r) {
    for (Eigen::Index c = 0; c < features.h.cols(); ++c) {
      std::snprintf(buf, sizeof(buf), c == 0 ? "%.17g" : ",%.17g", features.h(r, c));
      out << buf;
    }
    out << (features.missing_mask[static_cast<std::size_t>(r)] ? ",missing" : ",present") << '\n';
  }
  if (!out) throw std::runtime_error("feature dump write failed: " + path);
}

}  // namespace adamel
