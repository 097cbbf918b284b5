#include <cmath>

#include "adamel/features.hpp"
#include "adamel/rng.hpp"
#include "doctest.h"
#include "helpers/tmpdir.hpp"

using namespace adamel;
using adamel_tests::TmpDir;
using adamel_tests::write_file;

namespace {

// Two-dimensional provider with a fixed table, for hand-checkable sums.
class StubProvider final : public EmbeddingProvider {
 public:
  int dimension() const override { return 2; }
  Eigen::VectorXd lookup(const std::string& word) const override {
    Eigen::VectorXd v(2);
    if (word == "w1")
      v << 1.0, 0.0;
    else if (word == "w2")
      v << 0.0, 2.0;
    else
      v << 0.5, 0.5;
    return v;
  }
  std::string kind() const override { return "stub"; }
  std::uint64_t config_hash() const override { return 1; }
};

PairRecord make_pair(const std::string& lt, const std::string& rt, const std::string& la,
                     const std::string& ra) {
  PairRecord p;
  p.pair_id = "p";
  p.left.source_id = "s1";
  p.right.source_id = "s2";
  p.left.values = {{"title", lt}, {"artist", la}};
  p.right.values = {{"title", rt}, {"artist", ra}};
  return p;
}

}  // namespace

TEST_CASE("tokenize lowercases and splits on non-alphanumerics") {
  CHECK(tokenize("Hey Jude") == std::vector<std::string>{"hey", "jude"});
  CHECK(tokenize("") == std::vector<std::string>{});
  CHECK(tokenize("A. W.") == std::vector<std::string>{"a", "w"});
  CHECK(tokenize("re-mix 2021!") == std::vector<std::string>{"re", "mix", "2021"});
  CHECK(tokenize("  \t ") == std::vector<std::string>{});
}

TEST_CASE("contrastive features are intersection and symmetric difference") {
  auto ct = contrastive_features("Hey Jude", "Hey Jude");
  CHECK(ct.shared == std::vector<std::string>{"hey", "jude"});
  CHECK(ct.unique.empty());

  ct = contrastive_features("The Beatles", "P.M.");
  CHECK(ct.shared.empty());
  CHECK(ct.unique == std::vector<std::string>{"beatles", "m", "p", "the"});

  ct = contrastive_features("Hello Adele", "Hello A. W.");
  CHECK(ct.shared == std::vector<std::string>{"hello"});
  CHECK(ct.unique == std::vector<std::string>{"a", "adele", "w"});
}

TEST_CASE("contrastive features are symmetric and set-valued") {
  Rng rng(5);
  const std::vector<std::string> words = {"aa", "bb", "cc", "dd", "ee"};
  for (int trial = 0; trial < 50; ++trial) {
    std::string l, r;
    for (int i = 0; i < 4; ++i) {
      l += words[rng.next_below(words.size())] + " ";
      r += words[rng.next_below(words.size())] + " ";
    }
    const auto ab = contrastive_features(l, r);
    const auto ba = contrastive_features(r, l);
    CHECK(ab.shared == ba.shared);
    CHECK(ab.unique == ba.unique);
  }
  // duplicates contribute once
  const auto ct = contrastive_features("la la la", "la di");
  CHECK(ct.shared == std::vector<std::string>{"la"});
  CHECK(ct.unique == std::vector<std::string>{"di"});
}

TEST_CASE("embed_feature sums lookups and falls back to the sentinel") {
  StubProvider provider;
  const Eigen::VectorXd sentinel = sentinel_vector(2);
  CHECK(embed_feature({}, provider, 20) == sentinel);
  CHECK(sentinel.norm() == doctest::Approx(1.0));
  CHECK(sentinel[0] == doctest::Approx(1.0 / std::sqrt(2.0)));

  CHECK(embed_feature({"w1"}, provider, 20) == provider.lookup("w1"));

  const Eigen::VectorXd sum = embed_feature({"w1", "w2"}, provider, 20);
  CHECK(sum[0] == doctest::Approx(1.0));
  CHECK(sum[1] == doctest::Approx(2.0));

  // crop keeps the first tokens in sorted order
  const Eigen::VectorXd cropped = embed_feature({"w1", "w2"}, provider, 1);
  CHECK(cropped == provider.lookup("w1"));
  CHECK_THROWS(embed_feature({"w1"}, provider, 0));
}

TEST_CASE("featurize_pair layout matches the schema") {
  const AlignedSchema schema({"title", "artist"});
  StubProvider provider;

  // both attributes identical: unique rows are sentinels
  const auto same = featurize_pair(make_pair("w1", "w1", "w2", "w2"), schema, provider, 20);
  REQUIRE(same.h.rows() == 4);
  CHECK(same.h.row(0).transpose() == provider.lookup("w1"));
  CHECK(same.h.row(1).transpose() == sentinel_vector(2));
  CHECK(same.h.row(2).transpose() == provider.lookup("w2"));
  CHECK(same.h.row(3).transpose() == sentinel_vector(2));
  CHECK(same.missing_mask == std::vector<bool>{false, true, false, true});

  // artist missing on one side: shared row sentinel, unique row carries the present side
  const auto miss = featurize_pair(make_pair("w1", "w1", "", "w2"), schema, provider, 20);
  CHECK(miss.h.row(2).transpose() == sentinel_vector(2));
  CHECK(miss.h.row(3).transpose() == provider.lookup("w2"));
  CHECK(miss.missing_mask[2]);
  CHECK_FALSE(miss.missing_mask[3]);
}

TEST_CASE("featurize_pair is symmetric under record swap and deterministic") {
  const AlignedSchema schema({"title", "artist"});
  HashingEmbedding provider(16, 3);
  const auto p = make_pair("hello world", "hello there", "adele", "a w");
  PairRecord swapped = p;
  std::swap(swapped.left, swapped.right);

  const auto f1 = featurize_pair(p, schema, provider, 20);
  const auto f2 = featurize_pair(swapped, schema, provider, 20);
  const auto f3 = featurize_pair(p, schema, provider, 20);
  CHECK(f1.h == f2.h);
  CHECK(f1.h == f3.h);
  CHECK(f1.missing_mask == f2.missing_mask);
}

TEST_CASE("all-missing pair embeds every row as the unit sentinel") {
  const AlignedSchema schema({"title", "artist"});
  HashingEmbedding provider(8, 1);
  const auto f = featurize_pair(make_pair("", "", "", ""), schema, provider, 20);
  for (int j = 0; j < 4; ++j) {
    CHECK(f.h.row(j).norm() == doctest::Approx(1.0));
    CHECK(f.h.row(j).transpose() == sentinel_vector(8));
    CHECK(f.missing_mask[static_cast<std::size_t>(j)]);
  }
}

TEST_CASE("hashing provider gives reproducible unit vectors") {
  HashingEmbedding a(32, 7);
  HashingEmbedding b(32, 7);
  HashingEmbedding other_seed(32, 8);
  const auto va = a.lookup("beatles");
  CHECK(va.norm() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(va == b.lookup("beatles"));
  CHECK(va != other_seed.lookup("beatles"));
  CHECK(va != a.lookup("stones"));
  CHECK(a.config_hash() == b.config_hash());
  CHECK(a.config_hash() != other_seed.config_hash());
}

TEST_CASE("vector file provider parses the text format") {
  TmpDir tmp("embed");
  const auto path = tmp.file("vectors.txt");
  write_file(path,
             "3 2\n"
             "hello 1.0 0.0\n"
             "world 0.0 1.0\n"
             "jude 0.5 -0.5\n");
  VectorFileEmbedding provider(path);
  CHECK(provider.dimension() == 2);
  CHECK(provider.lookup("hello")[0] == doctest::Approx(1.0));
  CHECK(provider.lookup("jude")[1] == doctest::Approx(-0.5));
  // out-of-vocabulary words still resolve, deterministically
  const auto oov = provider.lookup("yellow");
  CHECK(oov == provider.lookup("yellow"));
  CHECK(oov.size() == 2);

  // headerless files work too
  const auto path2 = tmp.file("plain.txt");
  write_file(path2, "hey 1 2 3\n");
  VectorFileEmbedding plain(path2);
  CHECK(plain.dimension() == 3);

  const auto bad = tmp.file("bad.txt");
  write_file(bad, "hey 1 2\nyou 1\n");
  CHECK_THROWS(VectorFileEmbedding(bad));
}

TEST_CASE("channel filter replaces deselected rows with the sentinel") {
  const AlignedSchema schema({"title", "artist"});
  StubProvider provider;
  auto f = featurize_pair(make_pair("w1", "w2", "w1", "w1"), schema, provider, 20);
  auto shared = f;
  apply_channel_filter(shared, FeatureChannels::shared_only, 2);
  CHECK(shared.h.row(0) == f.h.row(0));
  CHECK(shared.h.row(1).transpose() == sentinel_vector(2));
  CHECK(shared.h.row(2) == f.h.row(2));
  CHECK(shared.h.row(3).transpose() == sentinel_vector(2));
  CHECK(shared.missing_mask[1]);

  auto unique = f;
  apply_channel_filter(unique, FeatureChannels::unique_only, 2);
  CHECK(unique.h.row(0).transpose() == sentinel_vector(2));
  CHECK(unique.h.row(1) == f.h.row(1));

  CHECK(parse_channels("both") == FeatureChannels::both);
  CHECK_THROWS(parse_channels("all"));
}

TEST_CASE("feature dump writes the matrix row-major with missing flags") {
  TmpDir tmp("dump");
  const AlignedSchema schema({"title"});
  StubProvider provider;
  PairRecord p;
  p.pair_id = "p";
  p.left.values = {{"title", "w1"}};
  p.right.values = {{"title", "w1"}};
  const auto f = featurize_pair(p, schema, provider, 20);
  const auto path = tmp.file("dump.csv");
  write_feature_dump(path, f);
  const auto text = adamel_tests::read_file(path);
  CHECK(text == "1,0,present\n"
                "0.70710678118654746,0.70710678118654746,missing\n");
}
