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

#include "adamel/cli.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "adamel/data.hpp"
#include "adamel/eval.hpp"
#include "adamel/rng.hpp"
#include "adamel/synth.hpp"
#include "adamel/training.hpp"

namespace adamel::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::uint64_t file_hash(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file for hashing: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  const std::string bytes = ss.str();
  return fnv1a64(bytes.data(), bytes.size());
}

std::string timestamp_utc() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Removes every registered output if the command fails midway.
class OutputTracker {
 public:
  std::string add(const std::string& path) {
    paths_.push_back(path);
    return path;
  }
  void commit() { committed_ = true; }
  ~OutputTracker() {
    if (committed_) return;
    for (const auto& p : paths_) {
      std::error_code ec;
      fs::remove(p, ec);
    }
  }

 private:
  std::vector<std::string> paths_;
  bool committed_ = false;
};

void write_json_atomic(const std::string& path, const json& j) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write: " + tmp);
    out << j.dump(2) << '\n';
    if (!out) throw std::runtime_error("write failed: " + tmp);
  }
  fs::rename(tmp, path);
}

std::vector<std::string> split_schema_flag(const std::string& flag) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : flag) {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

std::vector<PairRecord> load_labeled(const std::string& path, const AlignedSchema& schema,
                                     const char* what) {
  auto pairs = load_pairs(path, schema, Partition::target);
  for (const auto& p : pairs)
    if (!p.label)
      throw std::runtime_error(std::string(what) + " file must be fully labeled (pair '" +
                               p.pair_id + "' has no label)");
  return pairs;
}

struct TrainArgs {
  std::string variant = "base";
  std::string manifest_path;
  std::string source_path, target_path, support_path;
  std::string schema_flag;
  std::string out_dir;
  std::string embeddings_path;
  std::string theta_input = "latent";
  std::string channels = "both";
  double lambda = 0.98;
  double phi = 1.0;
  double lr = 1e-4;
  int batch = 16;
  int epochs = 100;
  std::uint64_t seed = 0;
  int embed_dim = 300;
  int crop = 20;
  int latent_dim = 64;
  int attention_dim = 256;
  int hidden_dim = 256;
  int target_batch = 0;
};

int cmd_train(const TrainArgs& args) {
  std::vector<std::string> schema_attrs = split_schema_flag(args.schema_flag);
  std::string source_path = args.source_path;
  std::string target_path = args.target_path;
  std::string support_path = args.support_path;
  if (!args.manifest_path.empty()) {
    const DataManifest m = load_data_manifest(args.manifest_path);
    if (schema_attrs.empty()) schema_attrs = m.schema_attributes;
    if (source_path.empty()) source_path = m.source_path;
    if (target_path.empty()) target_path = m.target_path;
    if (support_path.empty()) support_path = m.support_path;
  }
  if (schema_attrs.empty())
    throw std::invalid_argument("schema required (--schema or a manifest with one)");
  if (source_path.empty()) throw std::invalid_argument("source partition required");

  const Variant variant = parse_variant(args.variant);
  const bool needs_target = variant == Variant::zero || variant == Variant::hyb;
  const bool needs_support = variant == Variant::few || variant == Variant::hyb;
  if (needs_target && target_path.empty())
    throw std::invalid_argument("target partition required");
  if (needs_support && support_path.empty())
    throw std::invalid_argument("support partition required");

  const AlignedSchema schema(schema_attrs);
  DatasetPartitions parts;
  parts.source_domain = load_pairs(source_path, schema, Partition::source);
  if (!target_path.empty())
    parts.target_domain = load_pairs(target_path, schema, Partition::target);
  if (!support_path.empty())
    parts.support_set = load_pairs(support_path, schema, Partition::support);
  check_partition_discipline(parts);
  if (!parts.support_set.empty() && !parts.target_domain.empty() &&
      !support_sources_covered(parts.support_set, parts.target_domain))
    std::fprintf(stderr,
                 "warning: support set uses data sources that never appear in the target "
                 "partition; it is meant to be sampled from the target domain's sources\n");

  const auto provider = make_provider(args.embeddings_path, args.embed_dim, args.seed);

  TrainConfig config;
  config.variant = variant;
  config.lambda = args.lambda;
  config.phi = args.phi;
  config.learning_rate = args.lr;
  config.batch_size = args.batch;
  config.epochs = args.epochs;
  config.seed = args.seed;
  config.crop = args.crop;
  config.latent_dim = args.latent_dim;
  config.attention_dim = args.attention_dim;
  config.hidden_dim = args.hidden_dim;
  config.theta_input = parse_theta_input(args.theta_input);
  config.channels = parse_channels(args.channels);
  if (args.target_batch > 0) config.target_batch = args.target_batch;

  const std::string started = timestamp_utc();
  fs::create_directories(args.out_dir);
  OutputTracker outputs;

  TrainResult result = train(parts, schema, *provider, config);

  Checkpoint ckpt;
  ckpt.params = std::move(result.params);
  ckpt.schema_attributes = schema.attributes();
  ckpt.channels = config.channels;
  ckpt.crop = config.crop;
  ckpt.provider_kind = provider->kind();
  ckpt.provider_dim = provider->dimension();
  ckpt.provider_hash = provider->config_hash();
  if (const auto* hashing = dynamic_cast<const HashingEmbedding*>(provider.get()))
    ckpt.provider_seed = hashing->seed();
  if (const auto* file = dynamic_cast<const VectorFileEmbedding*>(provider.get()))
    ckpt.provider_path = file->path();

  const std::string ckpt_path = outputs.add((fs::path(args.out_dir) / "checkpoint.json").string());
  const std::string trace_path = outputs.add((fs::path(args.out_dir) / "trace.csv").string());
  const std::string manifest_path =
      outputs.add((fs::path(args.out_dir) / "run_manifest.json").string());

  save_checkpoint(ckpt_path, ckpt);
  write_loss_trace(trace_path, result.trace);

  json manifest;
  manifest["command"] = "train";
  manifest["seed"] = config.seed;
  manifest["config"] = {{"variant", variant_name(variant)},
                        {"lambda", config.lambda},
                        {"phi", config.phi},
                        {"learning_rate", config.learning_rate},
                        {"batch_size", config.batch_size},
                        {"epochs", config.epochs},
                        {"crop", config.crop},
                        {"embed_dim", provider->dimension()},
                        {"latent_dim", config.latent_dim},
                        {"attention_dim", config.attention_dim},
                        {"hidden_dim", config.hidden_dim},
                        {"theta_input", theta_input_name(config.theta_input)},
                        {"channels", channels_name(config.channels)},
                        {"target_batch", args.target_batch},
                        {"schema", schema.attributes()}};
  json inputs;
  inputs["source"] = {{"path", source_path}, {"hash", file_hash(source_path)}};
  if (!target_path.empty())
    inputs["target"] = {{"path", target_path}, {"hash", file_hash(target_path)}};
  if (!support_path.empty())
    inputs["support"] = {{"path", support_path}, {"hash", file_hash(support_path)}};
  manifest["inputs"] = inputs;
  manifest["outputs"] = {{"checkpoint", ckpt_path}, {"trace", trace_path}};
  manifest["provider"] = {{"kind", provider->kind()},
                          {"dim", provider->dimension()},
                          {"config_hash", provider->config_hash()}};
  manifest["started"] = started;
  manifest["finished"] = timestamp_utc();
  write_json_atomic(manifest_path, manifest);

  outputs.commit();
  return 0;
}

struct CheckpointBundle {
  Checkpoint ckpt;
  AlignedSchema schema;
  std::unique_ptr<EmbeddingProvider> provider;
};

CheckpointBundle open_checkpoint(const std::string& path) {
  CheckpointBundle b;
  b.ckpt = load_checkpoint(path);
  b.schema = AlignedSchema(b.ckpt.schema_attributes);
  b.provider = provider_from_checkpoint(b.ckpt);
  return b;
}

int cmd_eval(const std::string& ckpt_path, const std::string& pairs_path,
             const std::string& out_dir, const std::string& started) {
  CheckpointBundle b = open_checkpoint(ckpt_path);
  const auto pairs = load_labeled(pairs_path, b.schema, "test");

  std::vector<double> scores;
  std::vector<int> labels;
  for (const auto& p :
       predict(b.ckpt.params, pairs, b.schema, *b.provider, b.ckpt.crop, b.ckpt.channels))
    scores.push_back(p.score);
  for (const auto& p : pairs) labels.push_back(*p.label);

  const PRCurve ap = prauc(scores, labels, PraucMethod::average_precision);
  const PRCurve trap = prauc(scores, labels, PraucMethod::trapezoid);

  fs::create_directories(out_dir);
  OutputTracker outputs;
  const std::string metrics_path = outputs.add((fs::path(out_dir) / "metrics.json").string());
  const std::string curve_path = outputs.add((fs::path(out_dir) / "pr_curve.csv").string());
  const std::string manifest_path =
      outputs.add((fs::path(out_dir) / "run_manifest.json").string());

  Metrics metrics;
  metrics.prauc_average_precision = ap.prauc;
  metrics.prauc_trapezoid = trap.prauc;
  metrics.pair_count = pairs.size();
  for (int y : labels) (y == 1 ? metrics.positive_count : metrics.negative_count)++;
  metrics.config_hash = file_hash(ckpt_path);
  write_metrics(metrics_path, metrics);
  write_pr_curve(curve_path, ap);

  json manifest;
  manifest["command"] = "eval";
  manifest["inputs"] = {{"checkpoint", {{"path", ckpt_path}, {"hash", file_hash(ckpt_path)}}},
                        {"pairs", {{"path", pairs_path}, {"hash", file_hash(pairs_path)}}}};
  manifest["outputs"] = {{"metrics", metrics_path}, {"pr_curve", curve_path}};
  manifest["started"] = started;
  manifest["finished"] = timestamp_utc();
  write_json_atomic(manifest_path, manifest);

  std::printf("prauc average_precision %.6f trapezoid %.6f over %zu pairs\n", ap.prauc, trap.prauc,
              pairs.size());
  outputs.commit();
  return 0;
}

int cmd_predict(const std::string& ckpt_path, const std::string& pairs_path,
                const std::string& out_dir) {
  CheckpointBundle b = open_checkpoint(ckpt_path);
  const auto pairs = load_pairs(pairs_path, b.schema, Partition::target);
  const auto preds =
      predict(b.ckpt.params, pairs, b.schema, *b.provider, b.ckpt.crop, b.ckpt.channels);

  fs::create_directories(out_dir);
  OutputTracker outputs;
  const std::string pred_path = outputs.add((fs::path(out_dir) / "predictions.csv").string());
  std::ofstream out(pred_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write: " + pred_path);
  out << "pair_id,score";
  for (int j = 1; j <= b.ckpt.params.dims.feature_count; ++j) out << ",g_" << j;
  out << '\n';
  char buf[64];
  for (const auto& p : preds) {
    out << p.pair_id;
    std::snprintf(buf, sizeof(buf), ",%.17g", p.score);
    out << buf;
    for (Eigen::Index j = 0; j < p.attention.size(); ++j) {
      std::snprintf(buf, sizeof(buf), ",%.17g", p.attention[j]);
      out << buf;
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + pred_path);
  out.close();
  outputs.commit();
  return 0;
}

int cmd_report(const std::string& ckpt_path, const std::string& pairs_path,
               const std::string& target_path, int top_k, const std::string& out_dir) {
  if (top_k <= 0) throw std::invalid_argument("--top must be positive");
  CheckpointBundle b = open_checkpoint(ckpt_path);
  const auto pairs = load_pairs(pairs_path, b.schema, Partition::target);
  std::vector<PairRecord> target_pairs;
  if (!target_path.empty()) target_pairs = load_pairs(target_path, b.schema, Partition::target);

  std::vector<PairRecord> report_pairs = pairs;
  report_pairs.insert(report_pairs.end(), target_pairs.begin(), target_pairs.end());
  const AttentionReport report = attention_report(b.ckpt.params, report_pairs, b.schema,
                                                  *b.provider, b.ckpt.crop, top_k, b.ckpt.channels);

  fs::create_directories(out_dir);
  OutputTracker outputs;
  const std::string report_path = outputs.add((fs::path(out_dir) / "attention_report.tsv").string());
  const std::string vectors_path =
      outputs.add((fs::path(out_dir) / "attention_vectors.csv").string());
  write_attention_report(report_path, report);

  if (!target_pairs.empty()) {
    export_attention_vectors(b.ckpt.params, pairs, target_pairs, b.schema, *b.provider,
                             b.ckpt.crop, vectors_path, b.ckpt.channels);
  } else {
    // Single-domain export: every row tagged source.
    std::ofstream out(vectors_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write: " + vectors_path);
    out << "pair_id,domain";
    for (int j = 1; j <= b.ckpt.params.dims.feature_count; ++j) out << ",g_" << j;
    out << '\n';
    char buf[64];
    for (const auto& p :
         predict(b.ckpt.params, pairs, b.schema, *b.provider, b.ckpt.crop, b.ckpt.channels)) {
      out << p.pair_id << ",source";
      for (Eigen::Index j = 0; j < p.attention.size(); ++j) {
        std::snprintf(buf, sizeof(buf), ",%.17g", p.attention[j]);
        out << buf;
      }
      out << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + vectors_path);
  }
  outputs.commit();
  return 0;
}

int cmd_synth(const std::string& config_path, const std::string& out_dir, std::uint64_t seed,
              bool seed_set) {
  SynthConfig config = load_synth_config(config_path);
  if (seed_set) config.seed = seed;
  const SynthCorpus corpus = generate(config);

  fs::create_directories(out_dir);
  OutputTracker outputs;
  const std::string source_path = outputs.add((fs::path(out_dir) / "source.csv").string());
  const std::string target_path = outputs.add((fs::path(out_dir) / "target.csv").string());
  const std::string support_path = outputs.add((fs::path(out_dir) / "support.csv").string());
  const std::string test_path = outputs.add((fs::path(out_dir) / "test.csv").string());
  const std::string manifest_path = outputs.add((fs::path(out_dir) / "manifest.json").string());

  write_pairs(source_path, corpus.partitions.source_domain, corpus.schema);
  write_pairs(target_path, corpus.partitions.target_domain, corpus.schema);
  write_pairs(support_path, corpus.partitions.support_set, corpus.schema);
  write_pairs(test_path, corpus.test, corpus.schema);

  json manifest;
  manifest["schema"] = corpus.schema.attributes();
  manifest["source"] = source_path;
  manifest["target"] = target_path;
  manifest["support"] = support_path;
  manifest["test"] = test_path;
  manifest["synth"] = {{"config", json::parse(synth_config_to_json(config))},
                       {"informativeness", corpus.informativeness}};
  write_json_atomic(manifest_path, manifest);
  outputs.commit();
  return 0;
}

int cmd_stats(const std::string& manifest_path, const std::string& source_path_flag,
              const std::string& target_path_flag, const std::string& schema_flag,
              const std::string& out_path) {
  std::vector<std::string> schema_attrs = split_schema_flag(schema_flag);
  std::string source_path = source_path_flag;
  std::string target_path = target_path_flag;
  if (!manifest_path.empty()) {
    const DataManifest m = load_data_manifest(manifest_path);
    if (schema_attrs.empty()) schema_attrs = m.schema_attributes;
    if (source_path.empty()) source_path = m.source_path;
    if (target_path.empty()) target_path = m.target_path;
  }
  if (schema_attrs.empty() || source_path.empty() || target_path.empty())
    throw std::invalid_argument("stats needs --manifest or --source/--target/--schema");

  const AlignedSchema schema(schema_attrs);
  const auto source = load_pairs(source_path, schema, Partition::target);
  const auto target = load_pairs(target_path, schema, Partition::target);
  const auto rows = challenge_stats(source, target, schema);

  std::ostringstream os;
  os << "attribute\tsource_fraction\ttarget_fraction\n";
  char buf[160];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%s\t%.4f\t%.4f\n", r.attribute.c_str(), r.source_fraction,
                  r.target_fraction);
    os << buf;
  }
  if (out_path.empty()) {
    std::cout << os.str();
  } else {
    OutputTracker outputs;
    outputs.add(out_path);
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write: " + out_path);
    out << os.str();
    if (!out) throw std::runtime_error("write failed: " + out_path);
    outputs.commit();
  }
  return 0;
}

}  // namespace

std::unique_ptr<EmbeddingProvider> make_provider(const std::string& embeddings_path, int embed_dim,
                                                 std::uint64_t seed) {
  std::string path = embeddings_path;
  if (path.empty()) {
    if (const char* env = std::getenv("ADAMEL_EMBEDDINGS")) path = env;
  }
  if (!path.empty()) return std::make_unique<VectorFileEmbedding>(path);
  return std::make_unique<HashingEmbedding>(embed_dim, seed);
}

std::unique_ptr<EmbeddingProvider> provider_from_checkpoint(const Checkpoint& ckpt) {
  if (ckpt.provider_kind == "hashing")
    return std::make_unique<HashingEmbedding>(ckpt.provider_dim, ckpt.provider_seed);
  if (ckpt.provider_kind == "vector_file") {
    auto p = std::make_unique<VectorFileEmbedding>(ckpt.provider_path);
    if (p->config_hash() != ckpt.provider_hash)
      throw std::runtime_error("embedding file '" + ckpt.provider_path +
                               "' does not match the one the checkpoint was trained with");
    if (p->dimension() != ckpt.provider_dim)
      throw std::runtime_error("embedding file dimension mismatch");
    return p;
  }
  throw std::runtime_error("unknown provider kind '" + ckpt.provider_kind + "' in checkpoint");
}

int run(const std::vector<std::string>& args) {
  CLI::App app{"attribute-level attention for multi-source entity linkage"};
  app.require_subcommand(1);

  TrainArgs train_args;
  std::string train_config_path;
  auto* train_cmd = app.add_subcommand("train", "train a model variant");
  train_cmd->add_option("--config", train_config_path,
                        "JSON config file; command-line flags take precedence");
  std::map<std::string, CLI::Option*> train_opts;
  train_opts["variant"] = train_cmd->add_option("--variant", train_args.variant, "base|zero|few|hyb");
  train_cmd->add_option("--manifest", train_args.manifest_path, "dataset manifest (JSON)");
  train_cmd->add_option("--source", train_args.source_path, "labeled source-domain pair file");
  train_cmd->add_option("--target", train_args.target_path, "unlabeled target-domain pair file");
  train_cmd->add_option("--support", train_args.support_path, "labeled support pair file");
  train_cmd->add_option("--schema", train_args.schema_flag, "comma-separated attribute names");
  train_cmd->add_option("--out", train_args.out_dir, "output directory")->required();
  train_opts["lambda"] = train_cmd->add_option("--lambda", train_args.lambda,
                                               "adaptation weight in [0,1]");
  train_opts["phi"] = train_cmd->add_option("--phi", train_args.phi, "support weight in (0,1]");
  train_opts["learning_rate"] = train_cmd->add_option("--lr", train_args.lr, "Adam learning rate");
  train_opts["batch_size"] = train_cmd->add_option("--batch", train_args.batch, "batch size");
  train_opts["epochs"] = train_cmd->add_option("--epochs", train_args.epochs, "training epochs");
  train_opts["seed"] = train_cmd->add_option("--seed", train_args.seed, "master RNG seed");
  train_opts["embed_dim"] =
      train_cmd->add_option("--embed-dim", train_args.embed_dim, "hashing embedding dimension");
  train_cmd->add_option("--embeddings", train_args.embeddings_path, "embedding vector file");
  train_opts["crop"] = train_cmd->add_option("--crop", train_args.crop, "token cropping size");
  train_opts["latent_dim"] = train_cmd->add_option("--latent-dim", train_args.latent_dim,
                                                   "per-feature latent dimension H");
  train_opts["attention_dim"] =
      train_cmd->add_option("--attention-dim", train_args.attention_dim, "attention dimension H'");
  train_opts["hidden_dim"] = train_cmd->add_option("--hidden-dim", train_args.hidden_dim,
                                                   "classifier hidden dimension");
  train_opts["theta_input"] =
      train_cmd->add_option("--theta-input", train_args.theta_input, "latent|projected");
  train_opts["channels"] =
      train_cmd->add_option("--channels", train_args.channels, "both|shared|unique");
  train_opts["target_batch"] =
      train_cmd->add_option("--target-batch", train_args.target_batch,
                            "recompute mean target attention over this many sampled pairs");

  std::string ckpt_path, pairs_path, out_dir, target_path;
  auto* eval_cmd = app.add_subcommand("eval", "PRAUC of a checkpoint on a labeled pair file");
  eval_cmd->add_option("--checkpoint", ckpt_path)->required();
  eval_cmd->add_option("--pairs", pairs_path)->required();
  eval_cmd->add_option("--out", out_dir)->required();

  auto* predict_cmd = app.add_subcommand("predict", "score pairs with a checkpoint");
  predict_cmd->add_option("--checkpoint", ckpt_path)->required();
  predict_cmd->add_option("--pairs", pairs_path)->required();
  predict_cmd->add_option("--out", out_dir)->required();

  int top_k = 5;
  auto* report_cmd = app.add_subcommand("report", "feature-importance report");
  report_cmd->add_option("--checkpoint", ckpt_path)->required();
  report_cmd->add_option("--pairs", pairs_path)->required();
  report_cmd->add_option("--target", target_path, "second pair file tagged as target domain");
  report_cmd->add_option("--top", top_k, "rows to keep");
  report_cmd->add_option("--out", out_dir)->required();

  std::string synth_config_path;
  std::uint64_t synth_seed = 0;
  auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic corpus");
  synth_cmd->add_option("--config", synth_config_path)->required();
  synth_cmd->add_option("--out", out_dir)->required();
  auto* seed_opt = synth_cmd->add_option("--seed", synth_seed, "override the config seed");

  std::string stats_manifest, stats_source, stats_target, stats_schema, stats_out;
  auto* stats_cmd = app.add_subcommand("stats", "per-attribute non-missing-pair fractions");
  stats_cmd->add_option("--manifest", stats_manifest);
  stats_cmd->add_option("--source", stats_source);
  stats_cmd->add_option("--target", stats_target);
  stats_cmd->add_option("--schema", stats_schema);
  stats_cmd->add_option("--out", stats_out, "write TSV here instead of stdout");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  const std::string started = timestamp_utc();
  try {
    if (train_cmd->parsed()) {
      // precedence: flags > config file > built-in defaults
      if (!train_config_path.empty()) {
        std::ifstream in(train_config_path);
        if (!in) throw std::invalid_argument("cannot open config: " + train_config_path);
        json cfg;
        in >> cfg;
        auto fill = [&cfg, &train_opts](const char* key, auto& field) {
          if (cfg.contains(key) && train_opts.at(key)->count() == 0)
            field = cfg.at(key).get<std::decay_t<decltype(field)>>();
        };
        fill("variant", train_args.variant);
        fill("lambda", train_args.lambda);
        fill("phi", train_args.phi);
        fill("learning_rate", train_args.lr);
        fill("batch_size", train_args.batch);
        fill("epochs", train_args.epochs);
        fill("seed", train_args.seed);
        fill("embed_dim", train_args.embed_dim);
        fill("crop", train_args.crop);
        fill("latent_dim", train_args.latent_dim);
        fill("attention_dim", train_args.attention_dim);
        fill("hidden_dim", train_args.hidden_dim);
        fill("theta_input", train_args.theta_input);
        fill("channels", train_args.channels);
        fill("target_batch", train_args.target_batch);
      }
      return cmd_train(train_args);
    }
    if (eval_cmd->parsed()) return cmd_eval(ckpt_path, pairs_path, out_dir, started);
    if (predict_cmd->parsed()) return cmd_predict(ckpt_path, pairs_path, out_dir);
    if (report_cmd->parsed()) return cmd_report(ckpt_path, pairs_path, target_path, top_k, out_dir);
    if (synth_cmd->parsed()) return cmd_synth(synth_config_path, out_dir, synth_seed, !seed_opt->empty());
    if (stats_cmd->parsed())
      return cmd_stats(stats_manifest, stats_source, stats_target, stats_schema, stats_out);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace adamel::cli
