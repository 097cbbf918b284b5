#include <filesystem>
#include <iostream>
#include <sstream>

#include "adamel/cli.hpp"
#include "adamel/csv.hpp"
#include "adamel/data.hpp"
#include "adamel/model.hpp"
#include "adamel/training.hpp"
#include "doctest.h"
#include "helpers/tmpdir.hpp"

using namespace adamel;
using adamel_tests::read_file;
using adamel_tests::TmpDir;
using adamel_tests::write_file;

namespace {

namespace fs = std::filesystem;

const char* kSynthConfig = R"({
  "seed": 5,
  "n_sources_seen": 2,
  "n_sources_unseen": 3,
  "pairs": {"source": 60, "target": 40, "support": 20, "test": 40},
  "pos_rate": 0.5,
  "shift_strength": 0.5,
  "min_tokens": 1,
  "max_tokens": 3,
  "attributes": [
    {"name": "alpha", "vocab": 30, "informativeness": 0.95},
    {"name": "beta", "vocab": 30, "informativeness": 0.85}
  ]
})";

int run_cli(std::initializer_list<std::string> args) {
  return adamel::cli::run(std::vector<std::string>(args));
}

struct SynthOut {
  TmpDir dir{"cli_synth"};
  SynthOut() {
    write_file(dir.file("synth.json"), kSynthConfig);
    REQUIRE(run_cli({"synth", "--config", dir.file("synth.json"), "--out", dir.str()}) == 0);
  }
};

}  // namespace

TEST_CASE("synth command writes the corpus and is byte-stable under its seed") {
  TmpDir tmp("cli_synth_det");
  write_file(tmp.file("synth.json"), kSynthConfig);
  const auto out1 = tmp.file("run1");
  const auto out2 = tmp.file("run2");
  REQUIRE(run_cli({"synth", "--config", tmp.file("synth.json"), "--out", out1}) == 0);
  REQUIRE(run_cli({"synth", "--config", tmp.file("synth.json"), "--out", out2}) == 0);

  for (const char* name : {"source.csv", "target.csv", "support.csv", "test.csv"}) {
    const auto a = read_file((fs::path(out1) / name).string());
    CHECK(a == read_file((fs::path(out2) / name).string()));
    CHECK_FALSE(a.empty());
  }
  // manifests differ only in their absolute paths
  const DataManifest m1 = load_data_manifest((fs::path(out1) / "manifest.json").string());
  CHECK(m1.schema_attributes == std::vector<std::string>{"alpha", "beta"});
  CHECK_FALSE(m1.test_path.empty());

  // row counts match the config (header + pairs)
  CHECK(csv::parse(read_file((fs::path(out1) / "source.csv").string())).size() == 61);
  CHECK(csv::parse(read_file((fs::path(out1) / "test.csv").string())).size() == 41);

  // a different seed changes the corpus
  const auto out3 = tmp.file("run3");
  REQUIRE(run_cli({"synth", "--config", tmp.file("synth.json"), "--out", out3, "--seed", "99"}) == 0);
  CHECK(read_file((fs::path(out1) / "source.csv").string()) !=
        read_file((fs::path(out3) / "source.csv").string()));

  // infeasible config fails without leaving outputs behind
  write_file(tmp.file("bad.json"),
             R"({"attributes": [{"name": "a", "vocab": 1}, {"name": "b"}]})");
  const auto bad_out = tmp.file("bad_run");
  CHECK(run_cli({"synth", "--config", tmp.file("bad.json"), "--out", bad_out}) != 0);
  CHECK_FALSE(fs::exists(fs::path(bad_out) / "source.csv"));
}

TEST_CASE("train command validates variant partitions") {
  SynthOut synth;
  const auto manifest = synth.dir.file("manifest.json");
  std::ostringstream captured;
  auto* old = std::cerr.rdbuf(captured.rdbuf());
  CHECK(run_cli({"train", "--variant", "zero", "--source", synth.dir.file("source.csv"),
                 "--schema", "alpha,beta", "--out", synth.dir.file("zr"), "--epochs", "1",
                 "--embed-dim", "6", "--latent-dim", "3", "--attention-dim", "3", "--hidden-dim",
                 "3"}) == 2);
  std::cerr.rdbuf(old);
  CHECK(captured.str().find("target partition required") != std::string::npos);
  CHECK(run_cli({"train", "--variant", "few", "--source", synth.dir.file("source.csv"),
                 "--schema", "alpha,beta", "--out", synth.dir.file("fw")}) == 2);
  CHECK(run_cli({"train", "--variant", "nosuch", "--manifest", manifest, "--out",
                 synth.dir.file("xx")}) == 2);
}

TEST_CASE("train is deterministic and a zero-epoch run checkpoints the initialization") {
  SynthOut synth;
  const auto manifest = synth.dir.file("manifest.json");
  const std::vector<std::string> common = {
      "train",        "--variant",       "hyb",  "--manifest",    manifest,
      "--epochs",     "2",               "--batch", "8",          "--seed", "3",
      "--embed-dim",  "6",               "--latent-dim", "3",     "--attention-dim", "3",
      "--hidden-dim", "4",               "--lr", "1e-3"};

  auto with_out = [&common](const std::string& out) {
    auto args = common;
    args.push_back("--out");
    args.push_back(out);
    return args;
  };
  REQUIRE(adamel::cli::run(with_out(synth.dir.file("r1"))) == 0);
  REQUIRE(adamel::cli::run(with_out(synth.dir.file("r2"))) == 0);
  CHECK(read_file(synth.dir.file("r1/checkpoint.json")) ==
        read_file(synth.dir.file("r2/checkpoint.json")));
  CHECK(fs::exists(synth.dir.file("r1/trace.csv")));
  CHECK(fs::exists(synth.dir.file("r1/run_manifest.json")));

  // zero epochs: the checkpoint equals the seeded initialization
  REQUIRE(run_cli({"train", "--variant", "base", "--manifest", manifest, "--epochs", "0",
                   "--seed", "3", "--embed-dim", "6", "--latent-dim", "3", "--attention-dim", "3",
                   "--hidden-dim", "4", "--out", synth.dir.file("r0")}) == 0);
  const Checkpoint ckpt = load_checkpoint(synth.dir.file("r0/checkpoint.json"));
  const ModelParams fresh = init_params(ckpt.params.dims, 3);
  std::vector<double> a, b;
  visit_tensors(ckpt.params, [&a](const std::string&, const double* d, std::int64_t n) {
    a.insert(a.end(), d, d + n);
  });
  visit_tensors(fresh, [&b](const std::string&, const double* d, std::int64_t n) {
    b.insert(b.end(), d, d + n);
  });
  CHECK(a == b);
}

TEST_CASE("eval, predict, report, and stats consume a trained checkpoint") {
  SynthOut synth;
  const auto manifest = synth.dir.file("manifest.json");
  REQUIRE(run_cli({"train", "--variant", "base", "--manifest", manifest, "--epochs", "10",
                   "--seed", "7", "--embed-dim", "6", "--latent-dim", "3", "--attention-dim", "3",
                   "--hidden-dim", "4", "--lr", "5e-3", "--out", synth.dir.file("model")}) == 0);
  const auto ckpt = synth.dir.file("model/checkpoint.json");

  SUBCASE("eval writes metrics and a curve, deterministically") {
    REQUIRE(run_cli({"eval", "--checkpoint", ckpt, "--pairs", synth.dir.file("test.csv"), "--out",
                     synth.dir.file("m1")}) == 0);
    REQUIRE(run_cli({"eval", "--checkpoint", ckpt, "--pairs", synth.dir.file("test.csv"), "--out",
                     synth.dir.file("m2")}) == 0);
    const auto m1 = read_file(synth.dir.file("m1/metrics.json"));
    CHECK(m1 == read_file(synth.dir.file("m2/metrics.json")));
    CHECK(m1.find("average_precision") != std::string::npos);
    CHECK(read_file(synth.dir.file("m1/pr_curve.csv")) ==
          read_file(synth.dir.file("m2/pr_curve.csv")));

    // mismatched schema is rejected with a non-zero exit
    write_file(synth.dir.file("wrong.csv"),
               "pair_id,source_left,source_right,label,left_x,right_x\np,s,s,1,a,a\n");
    CHECK(run_cli({"eval", "--checkpoint", ckpt, "--pairs", synth.dir.file("wrong.csv"), "--out",
                   synth.dir.file("m3")}) != 0);
    CHECK_FALSE(fs::exists(synth.dir.file("m3/metrics.json")));
  }

  SUBCASE("predict preserves order and emits attention columns") {
    REQUIRE(run_cli({"predict", "--checkpoint", ckpt, "--pairs", synth.dir.file("target.csv"),
                     "--out", synth.dir.file("p")}) == 0);
    const auto rows = csv::parse(read_file(synth.dir.file("p/predictions.csv")));
    REQUIRE(rows.size() == 41);  // header + 40 target pairs
    CHECK(rows[0][0] == "pair_id");
    CHECK(rows[0][1] == "score");
    CHECK(rows[0].size() == 2 + 4);  // F = 4 attention columns
    CHECK(rows[1][0] == "tgt-000000");
  }

  SUBCASE("report clamps top-k and rejects nonpositive k") {
    REQUIRE(run_cli({"report", "--checkpoint", ckpt, "--pairs", synth.dir.file("source.csv"),
                     "--target", synth.dir.file("target.csv"), "--top", "9999", "--out",
                     synth.dir.file("rep")}) == 0);
    const auto tsv = read_file(synth.dir.file("rep/attention_report.tsv"));
    // header + clamped F=4 rows
    CHECK(std::count(tsv.begin(), tsv.end(), '\n') == 5);
    const auto vectors = csv::parse(read_file(synth.dir.file("rep/attention_vectors.csv")));
    CHECK(vectors.size() == 1 + 60 + 40);

    CHECK(run_cli({"report", "--checkpoint", ckpt, "--pairs", synth.dir.file("source.csv"),
                   "--top", "0", "--out", synth.dir.file("rep0")}) == 2);

    // re-running produces identical bytes
    REQUIRE(run_cli({"report", "--checkpoint", ckpt, "--pairs", synth.dir.file("source.csv"),
                     "--top", "5", "--out", synth.dir.file("repA")}) == 0);
    REQUIRE(run_cli({"report", "--checkpoint", ckpt, "--pairs", synth.dir.file("source.csv"),
                     "--top", "5", "--out", synth.dir.file("repB")}) == 0);
    CHECK(read_file(synth.dir.file("repA/attention_report.tsv")) ==
          read_file(synth.dir.file("repB/attention_report.tsv")));
  }

  SUBCASE("stats reports per-attribute complete-pair fractions") {
    REQUIRE(run_cli({"stats", "--manifest", manifest, "--out", synth.dir.file("stats.tsv")}) == 0);
    const auto text = read_file(synth.dir.file("stats.tsv"));
    CHECK(text.find("attribute\tsource_fraction\ttarget_fraction") == 0);
    CHECK(text.find("alpha") != std::string::npos);
    CHECK(text.find("beta") != std::string::npos);
    // challenge-free config: everything complete
    CHECK(text.find("1.0000\t1.0000") != std::string::npos);
  }
}

TEST_CASE("unknown subcommands and missing flags fail cleanly") {
  CHECK(run_cli({"frobnicate"}) != 0);
  CHECK(run_cli({}) != 0);
  CHECK(run_cli({"train"}) != 0);  // --out required
}

TEST_CASE("projected classifier mode trains, checkpoints, and scores") {
  SynthOut synth;
  const auto manifest = synth.dir.file("manifest.json");
  REQUIRE(run_cli({"train", "--variant", "base", "--manifest", manifest, "--epochs", "2",
                   "--seed", "5", "--embed-dim", "6", "--latent-dim", "3", "--attention-dim", "3",
                   "--hidden-dim", "4", "--theta-input", "projected", "--out",
                   synth.dir.file("proj")}) == 0);
  const Checkpoint ckpt = load_checkpoint(synth.dir.file("proj/checkpoint.json"));
  CHECK(ckpt.params.dims.theta_input == ThetaInput::projected);
  CHECK(ckpt.params.theta1_w.cols() == 4 * 3);  // F x H'
  CHECK(run_cli({"eval", "--checkpoint", synth.dir.file("proj/checkpoint.json"), "--pairs",
                 synth.dir.file("test.csv"), "--out", synth.dir.file("proj_eval")}) == 0);
}

TEST_CASE("vector-file embeddings ride through checkpoint and eval") {
  SynthOut synth;
  // cover the synthetic vocabulary of both attributes: tokens a0w<k>, a1w<k>
  std::string vectors;
  for (int a = 0; a < 2; ++a)
    for (int k = 0; k < 30; ++k) {
      vectors += "a" + std::to_string(a) + "w" + std::to_string(k);
      for (int d = 0; d < 5; ++d)
        vectors += " " + std::to_string(0.1 * (d + 1) * (k % 7 + 1) * (a + 1));
      vectors += "\n";
    }
  write_file(synth.dir.file("vectors.txt"), vectors);

  REQUIRE(run_cli({"train", "--variant", "base", "--manifest", synth.dir.file("manifest.json"),
                   "--embeddings", synth.dir.file("vectors.txt"), "--epochs", "2", "--seed", "5",
                   "--latent-dim", "3", "--attention-dim", "3", "--hidden-dim", "4", "--out",
                   synth.dir.file("vf")}) == 0);
  const Checkpoint ckpt = load_checkpoint(synth.dir.file("vf/checkpoint.json"));
  CHECK(ckpt.provider_kind == "vector_file");
  CHECK(ckpt.provider_dim == 5);

  REQUIRE(run_cli({"eval", "--checkpoint", synth.dir.file("vf/checkpoint.json"), "--pairs",
                   synth.dir.file("test.csv"), "--out", synth.dir.file("vf_eval")}) == 0);

  // a modified embedding file no longer matches the checkpoint
  write_file(synth.dir.file("vectors.txt"), vectors + "extra 1 1 1 1 1\n");
  CHECK(run_cli({"eval", "--checkpoint", synth.dir.file("vf/checkpoint.json"), "--pairs",
                 synth.dir.file("test.csv"), "--out", synth.dir.file("vf_eval2")}) != 0);
}

TEST_CASE("train config file fills unset flags, and flags win") {
  SynthOut synth;
  const auto manifest = synth.dir.file("manifest.json");
  write_file(synth.dir.file("train.json"), R"({
    "variant": "zero", "epochs": 2, "lambda": 0.5, "seed": 4,
    "embed_dim": 6, "latent_dim": 3, "attention_dim": 3, "hidden_dim": 4,
    "learning_rate": 1e-3, "batch_size": 8
  })");

  // all hyperparameters come from the config file
  REQUIRE(run_cli({"train", "--config", synth.dir.file("train.json"), "--manifest", manifest,
                   "--out", synth.dir.file("cfg1")}) == 0);
  const auto trace1 = read_file(synth.dir.file("cfg1/trace.csv"));
  CHECK(std::count(trace1.begin(), trace1.end(), '\n') == 3);  // header + 2 epochs
  const auto rm1 = read_file(synth.dir.file("cfg1/run_manifest.json"));
  CHECK(rm1.find("\"variant\": \"zero\"") != std::string::npos);
  CHECK(rm1.find("\"lambda\": 0.5") != std::string::npos);

  // an explicit flag overrides the config value
  REQUIRE(run_cli({"train", "--config", synth.dir.file("train.json"), "--manifest", manifest,
                   "--epochs", "1", "--out", synth.dir.file("cfg2")}) == 0);
  const auto trace2 = read_file(synth.dir.file("cfg2/trace.csv"));
  CHECK(std::count(trace2.begin(), trace2.end(), '\n') == 2);  // header + 1 epoch

  // unreadable config is a usage error
  CHECK(run_cli({"train", "--config", synth.dir.file("absent.json"), "--manifest", manifest,
                 "--out", synth.dir.file("cfg3")}) == 2);
}

TEST_CASE("provider selection honors flags, the environment, and the default") {
  TmpDir tmp("provider");
  write_file(tmp.file("vecs.txt"), "hello 1 0\nworld 0 1\n");

  const auto from_flag = adamel::cli::make_provider(tmp.file("vecs.txt"), 300, 1);
  CHECK(from_flag->kind() == "vector_file");
  CHECK(from_flag->dimension() == 2);

  ::setenv("ADAMEL_EMBEDDINGS", tmp.file("vecs.txt").c_str(), 1);
  const auto from_env = adamel::cli::make_provider("", 300, 1);
  CHECK(from_env->kind() == "vector_file");
  ::unsetenv("ADAMEL_EMBEDDINGS");

  const auto fallback = adamel::cli::make_provider("", 24, 5);
  CHECK(fallback->kind() == "hashing");
  CHECK(fallback->dimension() == 24);
}
