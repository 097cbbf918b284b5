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

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "adamel/cli.hpp"
#include "adamel/data.hpp"
#include "adamel/eval.hpp"
#include "adamel/features.hpp"
#include "adamel/losses.hpp"
#include "adamel/model.hpp"
#include "adamel/synth.hpp"
#include "adamel/training.hpp"

namespace py = pybind11;
using namespace adamel;

namespace {

PairRecord make_pair_record(const std::string& pair_id, const std::string& source_left,
                            const std::string& source_right, py::object label,
                            const std::map<std::string, std::string>& left_values,
                            const std::map<std::string, std::string>& right_values) {
  PairRecord p;
  p.pair_id = pair_id;
  p.left.source_id = source_left;
  p.left.values = left_values;
  p.right.source_id = source_right;
  p.right.values = right_values;
  if (!label.is_none()) p.label = label.cast<int>();
  return p;
}

TrainResult train_py(const std::string& variant, const std::vector<PairRecord>& source,
                     const std::vector<PairRecord>& target,
                     const std::vector<PairRecord>& support, const AlignedSchema& schema,
                     const EmbeddingProvider& provider, const TrainConfig& config) {
  TrainConfig c = config;
  c.variant = parse_variant(variant);
  DatasetPartitions parts{source, target, support};
  return train(parts, schema, provider, c);
}

}  // namespace

PYBIND11_MODULE(_adamel, m) {
  m.doc() = "attribute-level attention for multi-source entity linkage";

  py::class_<AlignedSchema>(m, "AlignedSchema")
      .def(py::init<std::vector<std::string>>(), py::arg("attributes"))
      .def_property_readonly("attributes", &AlignedSchema::attributes)
      .def_property_readonly("feature_count", &AlignedSchema::feature_count)
      .def("feature_name", &AlignedSchema::feature_name, py::arg("j"));

  py::class_<PairRecord>(m, "PairRecord")
      .def(py::init(&make_pair_record), py::arg("pair_id"), py::arg("source_left"),
           py::arg("source_right"), py::arg("label"), py::arg("left_values"),
           py::arg("right_values"))
      .def_readonly("pair_id", &PairRecord::pair_id)
      .def_property_readonly("label",
                             [](const PairRecord& p) -> py::object {
                               if (!p.label) return py::none();
                               return py::int_(*p.label);
                             })
      .def_property_readonly("left_values", [](const PairRecord& p) { return p.left.values; })
      .def_property_readonly("right_values", [](const PairRecord& p) { return p.right.values; });

  m.def("align_ontology",
        [](const std::vector<std::vector<std::string>>& schemas) {
          return align_ontology(schemas).attributes();
        },
        py::arg("schemas"), "lexicographic union of per-source attribute lists");
  m.def("load_pairs",
        [](const std::string& path, const AlignedSchema& schema, const std::string& partition) {
          Partition p = partition == "source"   ? Partition::source
                        : partition == "target" ? Partition::target
                                                : Partition::support;
          return load_pairs(path, schema, p);
        },
        py::arg("path"), py::arg("schema"), py::arg("partition"));
  m.def("write_pairs", &write_pairs, py::arg("path"), py::arg("pairs"), py::arg("schema"));
  m.def("split_support", &split_support, py::arg("target_pairs"), py::arg("n"), py::arg("seed"));

  m.def("tokenize", &tokenize, py::arg("text"));
  m.def("contrastive_features",
        [](const std::string& l, const std::string& r) {
          const auto ct = contrastive_features(l, r);
          return py::make_tuple(ct.shared, ct.unique);
        },
        py::arg("left_value"), py::arg("right_value"));
  m.def("sentinel_vector", &sentinel_vector, py::arg("dimension"));

  py::class_<EmbeddingProvider>(m, "EmbeddingProvider")
      .def_property_readonly("dimension", &EmbeddingProvider::dimension)
      .def("lookup", &EmbeddingProvider::lookup, py::arg("word"))
      .def_property_readonly("kind", &EmbeddingProvider::kind);
  py::class_<HashingEmbedding, EmbeddingProvider>(m, "HashingEmbedding")
      .def(py::init<int, std::uint64_t>(), py::arg("dimension"), py::arg("seed"));
  py::class_<VectorFileEmbedding, EmbeddingProvider>(m, "VectorFileEmbedding")
      .def(py::init<const std::string&>(), py::arg("path"));

  m.def("featurize_pair",
        [](const PairRecord& pair, const AlignedSchema& schema, const EmbeddingProvider& provider,
           int crop) { return featurize_pair(pair, schema, provider, crop).h; },
        py::arg("pair"), py::arg("schema"), py::arg("provider"), py::arg("crop") = 20);

  m.def("parameter_count", &parameter_count_formula, py::arg("feature_count"),
        py::arg("embed_dim"), py::arg("latent_dim"), py::arg("attention_dim"),
        py::arg("hidden_dim"));

  m.def("loss_base", &loss_base, py::arg("predictions"), py::arg("labels"));
  m.def("loss_un", &loss_un, py::arg("base"), py::arg("target"), py::arg("lambda_"));
  m.def("loss_ssl", &loss_ssl, py::arg("base"), py::arg("support"), py::arg("phi"));
  m.def("loss_hybrid", &loss_hybrid, py::arg("base"), py::arg("target"), py::arg("support"),
        py::arg("lambda_"), py::arg("phi"));

  py::class_<ModelParams>(m, "ModelParams")
      .def_property_readonly("feature_count",
                             [](const ModelParams& p) { return p.dims.feature_count; })
      .def_property_readonly("embed_dim", [](const ModelParams& p) { return p.dims.embed_dim; });

  py::class_<EpochTrace>(m, "EpochTrace")
      .def_readonly("epoch", &EpochTrace::epoch)
      .def_readonly("base", &EpochTrace::base)
      .def_readonly("target", &EpochTrace::target)
      .def_readonly("support", &EpochTrace::support)
      .def_readonly("total", &EpochTrace::total);

  py::class_<TrainConfig>(m, "TrainConfig")
      .def(py::init<>())
      .def_readwrite("lambda_", &TrainConfig::lambda)
      .def_readwrite("phi", &TrainConfig::phi)
      .def_readwrite("learning_rate", &TrainConfig::learning_rate)
      .def_readwrite("batch_size", &TrainConfig::batch_size)
      .def_readwrite("epochs", &TrainConfig::epochs)
      .def_readwrite("seed", &TrainConfig::seed)
      .def_readwrite("latent_dim", &TrainConfig::latent_dim)
      .def_readwrite("attention_dim", &TrainConfig::attention_dim)
      .def_readwrite("hidden_dim", &TrainConfig::hidden_dim)
      .def_readwrite("crop", &TrainConfig::crop);

  py::class_<TrainResult>(m, "TrainResult")
      .def_readonly("params", &TrainResult::params)
      .def_readonly("trace", &TrainResult::trace);

  m.def("train", &train_py, py::arg("variant"), py::arg("source"),
        py::arg("target") = std::vector<PairRecord>{},
        py::arg("support") = std::vector<PairRecord>{}, py::arg("schema"), py::arg("provider"),
        py::arg("config") = TrainConfig{});

  py::class_<Prediction>(m, "Prediction")
      .def_readonly("pair_id", &Prediction::pair_id)
      .def_readonly("score", &Prediction::score)
      .def_readonly("attention", &Prediction::attention);

  m.def("predict",
        [](const ModelParams& params, const std::vector<PairRecord>& pairs,
           const AlignedSchema& schema, const EmbeddingProvider& provider, int crop) {
          return predict(params, pairs, schema, provider, crop);
        },
        py::arg("params"), py::arg("pairs"), py::arg("schema"), py::arg("provider"),
        py::arg("crop") = 20);

  m.def("prauc",
        [](const std::vector<double>& scores, const std::vector<int>& labels,
           const std::string& method) {
          const PRCurve c = prauc(scores, labels, parse_prauc_method(method));
          py::list points;
          for (const auto& pt : c.points)
            points.append(py::make_tuple(pt.recall, pt.precision, pt.threshold));
          return py::make_tuple(c.prauc, points);
        },
        py::arg("scores"), py::arg("labels"), py::arg("method") = "average_precision");

  m.def("attention_report",
        [](const ModelParams& params, const std::vector<PairRecord>& pairs,
           const AlignedSchema& schema, const EmbeddingProvider& provider, int crop, int k) {
          const AttentionReport r = attention_report(params, pairs, schema, provider, crop, k);
          py::list rows;
          for (const auto& row : r.rows) rows.append(py::make_tuple(row.feature, row.score));
          return rows;
        },
        py::arg("params"), py::arg("pairs"), py::arg("schema"), py::arg("provider"),
        py::arg("crop") = 20, py::arg("k") = 5);

  py::class_<SynthCorpus>(m, "SynthCorpus")
      .def_property_readonly("schema", [](const SynthCorpus& c) { return c.schema; })
      .def_property_readonly("source", [](const SynthCorpus& c) { return c.partitions.source_domain; })
      .def_property_readonly("target", [](const SynthCorpus& c) { return c.partitions.target_domain; })
      .def_property_readonly("support", [](const SynthCorpus& c) { return c.partitions.support_set; })
      .def_readonly("test", &SynthCorpus::test)
      .def_readonly("informativeness", &SynthCorpus::informativeness);

  m.def("generate", [](const std::string& config_json) {
    return generate(synth_config_from_json(config_json));
  },
        py::arg("config_json"), "generate a synthetic corpus from a JSON config string");

  m.def("challenge_stats",
        [](const std::vector<PairRecord>& source, const std::vector<PairRecord>& target,
           const AlignedSchema& schema) {
          py::list rows;
          for (const auto& r : challenge_stats(source, target, schema))
            rows.append(py::make_tuple(r.attribute, r.source_fraction, r.target_fraction));
          return rows;
        },
        py::arg("source_pairs"), py::arg("target_pairs"), py::arg("schema"));

  m.def("save_checkpoint",
        [](const std::string& path, const ModelParams& params, const AlignedSchema& schema,
           const EmbeddingProvider& provider, int crop) {
          Checkpoint ckpt;
          ckpt.params = params;
          ckpt.schema_attributes = schema.attributes();
          ckpt.crop = crop;
          ckpt.provider_kind = provider.kind();
          ckpt.provider_dim = provider.dimension();
          ckpt.provider_hash = provider.config_hash();
          if (const auto* hashing = dynamic_cast<const HashingEmbedding*>(&provider))
            ckpt.provider_seed = hashing->seed();
          if (const auto* file = dynamic_cast<const VectorFileEmbedding*>(&provider))
            ckpt.provider_path = file->path();
          save_checkpoint(path, ckpt);
        },
        py::arg("path"), py::arg("params"), py::arg("schema"), py::arg("provider"),
        py::arg("crop") = 20);
  m.def("load_checkpoint_params",
        [](const std::string& path) { return load_checkpoint(path).params; }, py::arg("path"));

  m.def("run_cli", &adamel::cli::run, py::arg("args"),
        "run a CLI subcommand in-process; returns the exit code");
}
