#include <cmath>
#include <map>

#include "adamel/eval.hpp"
#include "adamel/features.hpp"
#include "adamel/synth.hpp"
#include "doctest.h"

using namespace adamel;

namespace {

SynthConfig base_config() {
  SynthConfig c;
  c.seed = 11;
  c.n_sources_seen = 3;
  c.n_sources_unseen = 4;
  c.n_source_pairs = 200;
  c.n_target_pairs = 200;
  c.n_support_pairs = 60;
  c.n_test_pairs = 200;
  c.pos_rate = 0.5;
  c.shift_strength = 0.0;
  c.min_tokens = 2;
  c.max_tokens = 4;
  c.attributes = {
      {"alpha", 40, 0.95, 0.0, 0.0, false},
      {"beta", 40, 0.9, 0.0, 0.0, false},
      {"noise", 30, 0.05, 0.0, 0.0, false},
  };
  return c;
}

// Per-attribute token histogram over one side of the given pairs.
std::map<std::string, double> token_histogram(const std::vector<PairRecord>& pairs,
                                              const std::string& attr) {
  std::map<std::string, double> hist;
  double total = 0.0;
  for (const auto& p : pairs) {
    for (const auto& rec : {p.left, p.right}) {
      for (const auto& tok : tokenize(rec.value(attr))) {
        hist[tok] += 1.0;
        total += 1.0;
      }
    }
  }
  for (auto& [k, v] : hist) v /= total;
  return hist;
}

double total_variation(const std::map<std::string, double>& a,
                       const std::map<std::string, double>& b) {
  double tv = 0.0;
  for (const auto& [k, v] : a) {
    auto it = b.find(k);
    tv += std::abs(v - (it == b.end() ? 0.0 : it->second));
  }
  for (const auto& [k, v] : b)
    if (!a.count(k)) tv += v;
  return tv / 2.0;
}

}  // namespace

TEST_CASE("generate is bit-reproducible and partitions are disjoint") {
  const auto c = base_config();
  const SynthCorpus a = generate(c);
  const SynthCorpus b = generate(c);
  CHECK(pairs_to_csv(a.partitions.source_domain, a.schema) ==
        pairs_to_csv(b.partitions.source_domain, b.schema));
  CHECK(pairs_to_csv(a.partitions.target_domain, a.schema) ==
        pairs_to_csv(b.partitions.target_domain, b.schema));
  CHECK(pairs_to_csv(a.test, a.schema) == pairs_to_csv(b.test, b.schema));

  CHECK(a.partitions.source_domain.size() == 200);
  CHECK(a.partitions.target_domain.size() == 200);
  CHECK(a.partitions.support_set.size() == 60);
  CHECK(a.test.size() == 200);
  CHECK_NOTHROW(check_partition_discipline(a.partitions));

  // target domain ships unlabeled; source, support, and test are labeled
  for (const auto& p : a.partitions.target_domain) CHECK_FALSE(p.label.has_value());
  for (const auto& p : a.partitions.source_domain) CHECK(p.label.has_value());
  for (const auto& p : a.partitions.support_set) CHECK(p.label.has_value());
  for (const auto& p : a.test) CHECK(p.label.has_value());

  // a different seed produces a different corpus
  auto c2 = c;
  c2.seed = 12;
  CHECK(pairs_to_csv(generate(c2).test, a.schema) != pairs_to_csv(a.test, a.schema));
}

TEST_CASE("every target-domain pair touches an unseen source") {
  const SynthCorpus corpus = generate(base_config());
  auto unseen = [](const std::string& sid) { return !sid.empty() && sid[0] == 'u'; };
  for (const auto& p : corpus.partitions.target_domain)
    CHECK((unseen(p.left.source_id) || unseen(p.right.source_id)));
  for (const auto& p : corpus.partitions.source_domain) {
    CHECK_FALSE(unseen(p.left.source_id));
    CHECK_FALSE(unseen(p.right.source_id));
  }
}

TEST_CASE("support partition is balanced and test balance tracks pos_rate") {
  const SynthCorpus corpus = generate(base_config());
  int sup_pos = 0;
  for (const auto& p : corpus.partitions.support_set) sup_pos += *p.label;
  CHECK(sup_pos == 30);

  int test_pos = 0;
  for (const auto& p : corpus.test) test_pos += *p.label;
  const double frac = static_cast<double>(test_pos) / 200.0;
  CHECK(frac > 0.35);
  CHECK(frac < 0.65);
}

TEST_CASE("missing rates are honored") {
  auto c = base_config();
  c.attributes[0].missing_rate_target = 1.0;  // alpha always missing in unseen-source records
  c.attributes[1].missing_rate_source = 0.3;
  const SynthCorpus corpus = generate(c);

  for (const auto& p : corpus.partitions.target_domain) {
    if (p.left.source_id[0] == 'u') CHECK(p.left.value("alpha").empty());
    CHECK(p.right.value("alpha").empty());  // right side always unseen
  }

  // binomial check on the source-domain missing fraction of beta
  int missing = 0, total = 0;
  for (const auto& p : corpus.partitions.source_domain) {
    for (const auto& rec : {p.left, p.right}) {
      ++total;
      if (rec.value("beta").empty()) ++missing;
    }
  }
  const double fraction = static_cast<double>(missing) / total;
  CHECK(fraction > 0.25);
  CHECK(fraction < 0.35);
}

TEST_CASE("new attributes stay blank in every seen-source record") {
  auto c = base_config();
  c.attributes.push_back({"gamma", 30, 0.9, 0.0, 0.0, true});
  const SynthCorpus corpus = generate(c);

  auto check_record = [](const EntityRecord& r) {
    if (r.source_id[0] == 's') CHECK(r.value("gamma").empty());
  };
  for (const auto& part :
       {corpus.partitions.source_domain, corpus.partitions.target_domain, corpus.test}) {
    for (const auto& p : part) {
      check_record(p.left);
      check_record(p.right);
    }
  }

  const auto stats = challenge_stats(corpus);
  // gamma is the fourth attribute
  REQUIRE(stats.size() == 4);
  CHECK(stats[3].attribute == "gamma");
  CHECK(stats[3].source_fraction == 0.0);
  CHECK(stats[3].target_fraction > 0.0);
}

TEST_CASE("challenge stats are complete-data fractions") {
  const SynthCorpus corpus = generate(base_config());  // no missing values configured
  for (const auto& row : challenge_stats(corpus)) {
    CHECK(row.source_fraction == 1.0);
    CHECK(row.target_fraction == 1.0);
  }

  auto c = base_config();
  c.attributes[2].missing_rate_source = 0.5;
  c.attributes[2].missing_rate_target = 0.5;
  const auto rows = challenge_stats(generate(c));
  CHECK(rows[2].source_fraction > 0.1);
  CHECK(rows[2].source_fraction < 0.4);  // both sides survive with prob ~0.25
  // fractions are reproducible under the seed
  const auto rows2 = challenge_stats(generate(c));
  CHECK(rows[2].source_fraction == rows2[2].source_fraction);
  CHECK(rows[2].target_fraction == rows2[2].target_fraction);
}

TEST_CASE("challenge-free corpora carry a learnable shared-token signal") {
  const SynthCorpus corpus = generate(base_config());
  std::vector<double> scores;
  std::vector<int> labels;
  for (const auto& p : corpus.test) {
    double shared = 0.0;
    for (const auto& attr : {"alpha", "beta"}) {
      const auto ct = contrastive_features(p.left.value(attr), p.right.value(attr));
      shared += static_cast<double>(ct.shared.size());
    }
    scores.push_back(shared);
    labels.push_back(*p.label);
  }
  CHECK(prauc(scores, labels).prauc > 0.95);
}

TEST_CASE("source and target distributions coincide with all challenges off") {
  auto c = base_config();
  c.n_source_pairs = 600;
  c.n_target_pairs = 600;
  const SynthCorpus corpus = generate(c);
  for (const auto& attr : {"alpha", "beta"}) {
    const double tv = total_variation(token_histogram(corpus.partitions.source_domain, attr),
                                      token_histogram(corpus.partitions.target_domain, attr));
    CHECK(tv < 0.1);
  }
}

TEST_CASE("distribution shift grows monotonically with shift_strength") {
  std::vector<double> shifts = {0.0, 0.5, 1.0, 2.0, 6.0};
  std::vector<double> tvs;
  for (double s : shifts) {
    double tv_sum = 0.0;
    for (std::uint64_t seed : {101ULL, 102ULL, 103ULL}) {
      auto c = base_config();
      c.seed = seed;
      c.shift_strength = s;
      c.n_source_pairs = 400;
      c.n_target_pairs = 400;
      const SynthCorpus corpus = generate(c);
      tv_sum += total_variation(token_histogram(corpus.partitions.source_domain, "alpha"),
                                token_histogram(corpus.partitions.target_domain, "alpha"));
    }
    tvs.push_back(tv_sum / 3.0);
  }
  for (std::size_t i = 1; i < tvs.size(); ++i) CHECK(tvs[i] >= tvs[i - 1] - 0.02);
  CHECK(tvs.back() > tvs.front() + 0.05);
}

TEST_CASE("config validation and json round trip") {
  auto c = base_config();
  c.attributes[0].vocab_size = 1;
  CHECK_THROWS(generate(c));

  c = base_config();
  c.pos_rate = 0.0;
  CHECK_THROWS(c.validate());

  c = base_config();
  c.attributes.resize(1);
  CHECK_THROWS(c.validate());

  const auto text = synth_config_to_json(base_config());
  const SynthConfig back = synth_config_from_json(text);
  CHECK(back.seed == 11);
  CHECK(back.attributes.size() == 3);
  CHECK(back.attributes[0].name == "alpha");
  CHECK(back.attributes[0].informativeness == 0.95);
  CHECK(back.n_support_pairs == 60);

  CHECK_THROWS(synth_config_from_json("{\"pairs\": {}}"));
}
