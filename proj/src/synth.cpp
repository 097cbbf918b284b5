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

#include "adamel/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "adamel/rng.hpp"

namespace adamel {

using nlohmann::json;

void SynthConfig::validate() const {
  if (attributes.size() < 2) throw std::invalid_argument("synth: need at least 2 attributes");
  if (n_sources_seen < 1 || n_sources_unseen < 1)
    throw std::invalid_argument("synth: need at least one seen and one unseen source");
  if (!(pos_rate > 0.0 && pos_rate < 1.0))
    throw std::invalid_argument("synth: pos_rate must lie in (0,1)");
  if (!(shift_strength >= 0.0) || !std::isfinite(shift_strength))
    throw std::invalid_argument("synth: shift_strength must be finite and >= 0");
  if (min_tokens < 1 || max_tokens < min_tokens)
    throw std::invalid_argument("synth: need 1 <= min_tokens <= max_tokens");
  if (n_source_pairs < 1) throw std::invalid_argument("synth: need at least one source pair");
  if (n_target_pairs < 0 || n_support_pairs < 0 || n_test_pairs < 0)
    throw std::invalid_argument("synth: negative pair count");
  for (const auto& a : attributes) {
    if (a.name.empty()) throw std::invalid_argument("synth: empty attribute name");
    if (a.vocab_size < 2)
      throw std::invalid_argument("synth: attribute '" + a.name + "' vocabulary smaller than 2");
    if (!(a.informativeness >= 0.0 && a.informativeness <= 1.0))
      throw std::invalid_argument("synth: informativeness out of [0,1] for '" + a.name + "'");
    if (!(a.missing_rate_source >= 0.0 && a.missing_rate_source <= 1.0) ||
        !(a.missing_rate_target >= 0.0 && a.missing_rate_target <= 1.0))
      throw std::invalid_argument("synth: missing rate out of [0,1] for '" + a.name + "'");
  }
}

namespace {

SynthAttribute attribute_from_json(const json& j) {
  SynthAttribute a;
  a.name = j.at("name").get<std::string>();
  a.vocab_size = j.value("vocab", 50);
  a.informativeness = j.value("informativeness", 0.5);
  a.missing_rate_source = j.value("missing_source", 0.0);
  a.missing_rate_target = j.value("missing_target", 0.0);
  a.new_attribute = j.value("new_attribute", false);
  return a;
}

json attribute_to_json(const SynthAttribute& a) {
  return json{{"name", a.name},
              {"vocab", a.vocab_size},
              {"informativeness", a.informativeness},
              {"missing_source", a.missing_rate_source},
              {"missing_target", a.missing_rate_target},
              {"new_attribute", a.new_attribute}};
}

}  // namespace

SynthConfig synth_config_from_json(const std::string& json_text) {
  json j = json::parse(json_text);
  SynthConfig c;
  c.seed = j.value("seed", 0ULL);
  c.n_sources_seen = j.value("n_sources_seen", 3);
  c.n_sources_unseen = j.value("n_sources_unseen", 4);
  if (j.contains("pairs")) {
    const auto& p = j["pairs"];
    c.n_source_pairs = p.value("source", 300);
    c.n_target_pairs = p.value("target", 300);
    c.n_support_pairs = p.value("support", 100);
    c.n_test_pairs = p.value("test", 300);
  }
  c.pos_rate = j.value("pos_rate", 0.5);
  c.shift_strength = j.value("shift_strength", 0.0);
  c.min_tokens = j.value("min_tokens", 1);
  c.max_tokens = j.value("max_tokens", 4);
  if (!j.contains("attributes") || !j["attributes"].is_array())
    throw std::invalid_argument("synth config: 'attributes' array required");
  for (const auto& a : j["attributes"]) c.attributes.push_back(attribute_from_json(a));
  c.validate();
  return c;
}

std::string synth_config_to_json(const SynthConfig& c) {
  json j;
  j["seed"] = c.seed;
  j["n_sources_seen"] = c.n_sources_seen;
  j["n_sources_unseen"] = c.n_sources_unseen;
  j["pairs"] = {{"source", c.n_source_pairs},
                {"target", c.n_target_pairs},
                {"support", c.n_support_pairs},
                {"test", c.n_test_pairs}};
  j["pos_rate"] = c.pos_rate;
  j["shift_strength"] = c.shift_strength;
  j["min_tokens"] = c.min_tokens;
  j["max_tokens"] = c.max_tokens;
  json attrs = json::array();
  for (const auto& a : c.attributes) attrs.push_back(attribute_to_json(a));
  j["attributes"] = attrs;
  return j.dump(2);
}

SynthConfig load_synth_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open synth config: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return synth_config_from_json(ss.str());
}

namespace {

// Zipf(s=1.1) sampler over token ranks with an optional rank permutation
// blended in for unseen-source records.
class TokenSampler {
 public:
  TokenSampler(int attr_index, const SynthAttribute& attr, double shift_strength,
               std::uint64_t seed)
      : attr_index_(attr_index), vocab_(attr.vocab_size) {
    cdf_.resize(static_cast<std::size_t>(vocab_));
    double sum = 0.0;
    for (int k = 0; k < vocab_; ++k) {
      sum += 1.0 / std::pow(static_cast<double>(k + 1), 1.1);
      cdf_[static_cast<std::size_t>(k)] = sum;
    }
    for (auto& v : cdf_) v /= sum;

    perm_.resize(static_cast<std::size_t>(vocab_));
    std::iota(perm_.begin(), perm_.end(), 0);
    Rng perm_rng = Rng::stream(seed, "shift:" + attr.name);
    perm_rng.shuffle(perm_);
    mix_ = shift_strength / (1.0 + shift_strength);
  }

  std::string draw(Rng& rng, bool shifted_domain) const {
    const double u = rng.next_double();
    int rank = static_cast<int>(std::lower_bound(cdf_.begin(), cdf_.end(), u) - cdf_.begin());
    if (rank >= vocab_) rank = vocab_ - 1;
    if (shifted_domain && rng.next_double() < mix_)
      rank = perm_[static_cast<std::size_t>(rank)];
    return token(rank);
  }

  std::string token(int rank) const {
    return "a" + std::to_string(attr_index_) + "w" + std::to_string(rank);
  }

 private:
  int attr_index_;
  int vocab_;
  std::vector<double> cdf_;
  std::vector<int> perm_;
  double mix_ = 0.0;
};

std::string join_tokens(const std::vector<std::string>& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

struct Generator {
  const SynthConfig& config;
  std::vector<TokenSampler> samplers;
  Rng rng;

  explicit Generator(const SynthConfig& cfg) : config(cfg), rng(Rng::stream(cfg.seed, "synth")) {
    for (std::size_t i = 0; i < cfg.attributes.size(); ++i)
      samplers.emplace_back(static_cast<int>(i), cfg.attributes[i], cfg.shift_strength, cfg.seed);
  }

  std::string seen_source() { return "s" + std::to_string(rng.next_below(
                                               static_cast<std::uint64_t>(config.n_sources_seen))); }
  std::string unseen_source() {
    return "u" + std::to_string(rng.next_below(static_cast<std::uint64_t>(config.n_sources_unseen)));
  }

  static bool is_seen(const std::string& source_id) { return !source_id.empty() && source_id[0] == 's'; }

  int draw_length() {
    return config.min_tokens +
           static_cast<int>(rng.next_below(
               static_cast<std::uint64_t>(config.max_tokens - config.min_tokens + 1)));
  }

  std::vector<std::string> draw_tokens(std::size_t attr, bool shifted, int count) {
    std::vector<std::string> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) out.push_back(samplers[attr].draw(rng, shifted));
    return out;
  }

  // Applies C1/C2 after value generation; returns the final cell content.
  std::string finalize_value(std::size_t attr, const std::string& source_id,
                             std::vector<std::string> tokens) {
    const auto& a = config.attributes[attr];
    const bool seen = is_seen(source_id);
    if (a.new_attribute && seen) return "";
    const double miss = seen ? a.missing_rate_source : a.missing_rate_target;
    if (rng.bernoulli(miss)) return "";
    return join_tokens(tokens);
  }

  PairRecord make_pair(const std::string& pair_id, const std::string& left_src,
                       const std::string& right_src, int label) {
    PairRecord p;
    p.pair_id = pair_id;
    p.left.source_id = left_src;
    p.right.source_id = right_src;
    p.label = label;
    const bool left_shifted = !is_seen(left_src);
    const bool right_shifted = !is_seen(right_src);
    for (std::size_t k = 0; k < config.attributes.size(); ++k) {
      const auto& attr = config.attributes[k];
      const int len = draw_length();
      std::vector<std::string> left_tokens = draw_tokens(k, left_shifted, len);
      std::vector<std::string> right_tokens;
      if (label == 1) {
        right_tokens.reserve(left_tokens.size());
        for (const auto& t : left_tokens) {
          if (rng.bernoulli(attr.informativeness))
            right_tokens.push_back(t);
          else
            right_tokens.push_back(samplers[k].draw(rng, right_shifted));
        }
      } else {
        right_tokens = draw_tokens(k, right_shifted, draw_length());
      }
      p.left.values[attr.name] = finalize_value(k, left_src, std::move(left_tokens));
      p.right.values[attr.name] = finalize_value(k, right_src, std::move(right_tokens));
    }
    return p;
  }

  // Target-domain pairs keep Definition-style structure: the right record is
  // always from an unseen source, the left flips between seen and unseen.
  PairRecord target_style_pair(const std::string& pair_id, int label) {
    const std::string left = rng.bernoulli(0.5) ? seen_source() : unseen_source();
    return make_pair(pair_id, left, unseen_source(), label);
  }

  int draw_label() { return rng.bernoulli(config.pos_rate) ? 1 : 0; }
};

std::string padded_id(const char* prefix, int i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s-%06d", prefix, i);
  return buf;
}

}  // namespace

SynthCorpus generate(const SynthConfig& config) {
  config.validate();
  Generator gen(config);

  std::vector<std::string> names;
  std::vector<double> informativeness;
  for (const auto& a : config.attributes) {
    names.push_back(a.name);
    informativeness.push_back(a.informativeness);
  }
  // Schema order is the configured attribute order (already unique).
  SynthCorpus corpus;
  corpus.schema = AlignedSchema(names);
  corpus.informativeness = std::move(informativeness);

  for (int i = 0; i < config.n_source_pairs; ++i)
    corpus.partitions.source_domain.push_back(
        gen.make_pair(padded_id("src", i), gen.seen_source(), gen.seen_source(), gen.draw_label()));

  for (int i = 0; i < config.n_target_pairs; ++i) {
    PairRecord p = gen.target_style_pair(padded_id("tgt", i), gen.draw_label());
    p.label.reset();  // the target domain ships unlabeled
    corpus.partitions.target_domain.push_back(std::move(p));
  }

  // The support partition is balanced by construction so class-stratified
  // subsampling is always feasible.
  if (config.n_support_pairs > 0) {
    const int n_pos = static_cast<int>(std::lround(config.pos_rate * config.n_support_pairs));
    std::vector<int> labels(static_cast<std::size_t>(config.n_support_pairs), 0);
    for (int i = 0; i < n_pos && i < config.n_support_pairs; ++i)
      labels[static_cast<std::size_t>(i)] = 1;
    gen.rng.shuffle(labels);
    for (int i = 0; i < config.n_support_pairs; ++i)
      corpus.partitions.support_set.push_back(
          gen.target_style_pair(padded_id("sup", i), labels[static_cast<std::size_t>(i)]));
  }

  for (int i = 0; i < config.n_test_pairs; ++i)
    corpus.test.push_back(gen.target_style_pair(padded_id("tst", i), gen.draw_label()));

  check_partition_discipline(corpus.partitions);
  return corpus;
}

std::vector<ChallengeStatsRow> challenge_stats(const std::vector<PairRecord>& source_pairs,
                                               const std::vector<PairRecord>& target_pairs,
                                               const AlignedSchema& schema) {
  std::vector<ChallengeStatsRow> rows;
  for (const auto& attr : schema.attributes()) {
    auto fraction = [&attr](const std::vector<PairRecord>& pairs) {
      if (pairs.empty()) return 0.0;
      std::size_t complete = 0;
      for (const auto& p : pairs)
        if (!p.left.value(attr).empty() && !p.right.value(attr).empty()) ++complete;
      return static_cast<double>(complete) / static_cast<double>(pairs.size());
    };
    rows.push_back({attr, fraction(source_pairs), fraction(target_pairs)});
  }
  return rows;
}

std::vector<ChallengeStatsRow> challenge_stats(const SynthCorpus& corpus) {
  std::vector<PairRecord> target_all = corpus.partitions.target_domain;
  target_all.insert(target_all.end(), corpus.partitions.support_set.begin(),
                    corpus.partitions.support_set.end());
  target_all.insert(target_all.end(), corpus.test.begin(), corpus.test.end());
  return challenge_stats(corpus.partitions.source_domain, target_all, corpus.schema);
}

}  // namespace adamel
