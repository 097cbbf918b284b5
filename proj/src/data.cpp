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

#include "adamel/data.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "adamel/csv.hpp"
#include "adamel/rng.hpp"

namespace adamel {

using nlohmann::json;

AlignedSchema::AlignedSchema(std::vector<std::string> attributes)
    : attributes_(std::move(attributes)) {
  if (attributes_.empty()) throw std::invalid_argument("schema: no attributes");
  std::set<std::string> seen;
  for (const auto& a : attributes_) {
    if (a.empty()) throw std::invalid_argument("schema: empty attribute name");
    if (!seen.insert(a).second)
      throw std::invalid_argument("schema: duplicate attribute '" + a + "'");
  }
}

std::string AlignedSchema::feature_name(int j) const {
  if (j < 0 || j >= feature_count()) throw std::out_of_range("feature index");
  return attributes_[static_cast<std::size_t>(j / 2)] + (j % 2 == 0 ? "_shared" : "_unique");
}

bool AlignedSchema::has_attribute(const std::string& name) const {
  return std::find(attributes_.begin(), attributes_.end(), name) != attributes_.end();
}

const std::string& EntityRecord::value(const std::string& attribute) const {
  static const std::string empty;
  auto it = values.find(attribute);
  return it == values.end() ? empty : it->second;
}

const char* partition_name(Partition p) {
  switch (p) {
    case Partition::source: return "source";
    case Partition::target: return "target";
    case Partition::support: return "support";
  }
  return "?";
}

AlignedSchema align_ontology(const std::vector<std::vector<std::string>>& schemas) {
  std::set<std::string> uni;
  for (const auto& s : schemas)
    for (const auto& a : s)
      if (!a.empty()) uni.insert(a);
  if (uni.empty()) throw std::invalid_argument("align_ontology: no usable attributes");
  return AlignedSchema(std::vector<std::string>(uni.begin(), uni.end()));
}

namespace {

std::optional<int> parse_label(const std::string& cell, Partition partition, std::size_t row) {
  if (cell.empty()) {
    if (partition == Partition::target) return std::nullopt;
    throw std::runtime_error("pair file row " + std::to_string(row) + ": missing label in " +
                             std::string(partition_name(partition)) + " partition");
  }
  if (cell == "0") return 0;
  if (cell == "1") return 1;
  throw std::runtime_error("pair file row " + std::to_string(row) + ": label '" + cell +
                           "' outside {0,1}");
}

}  // namespace

std::vector<PairRecord> parse_pairs(const std::string& csv_text, const AlignedSchema& schema,
                                    Partition partition, const std::string& origin) {
  const auto rows = csv::parse(csv_text);
  if (rows.empty()) throw std::runtime_error(origin + ": missing header row");

  std::vector<std::string> expected = {"pair_id", "source_left", "source_right", "label"};
  for (const auto& a : schema.attributes()) {
    expected.push_back("left_" + a);
    expected.push_back("right_" + a);
  }
  if (rows[0] != expected) {
    std::string got;
    for (std::size_t i = 0; i < rows[0].size(); ++i) got += (i ? "," : "") + rows[0][i];
    throw std::runtime_error(origin + ": header does not match schema (got: " + got + ")");
  }

  std::vector<PairRecord> out;
  out.reserve(rows.size() - 1);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() != expected.size())
      throw std::runtime_error(origin + ": row " + std::to_string(r) + " has " +
                               std::to_string(row.size()) + " fields, expected " +
                               std::to_string(expected.size()));
    PairRecord p;
    p.pair_id = row[0].empty() ? std::to_string(r) : row[0];
    p.left.source_id = row[1];
    p.right.source_id = row[2];
    p.label = parse_label(row[3], partition, r);
    for (int k = 0; k < schema.attribute_count(); ++k) {
      const auto& attr = schema.attributes()[static_cast<std::size_t>(k)];
      p.left.values[attr] = row[static_cast<std::size_t>(4 + 2 * k)];
      p.right.values[attr] = row[static_cast<std::size_t>(5 + 2 * k)];
    }
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<PairRecord> load_pairs(const std::string& path, const AlignedSchema& schema,
                                   Partition partition) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open pair file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_pairs(ss.str(), schema, partition, path);
}

std::string pairs_to_csv(const std::vector<PairRecord>& pairs, const AlignedSchema& schema) {
  std::ostringstream os;
  std::vector<std::string> header = {"pair_id", "source_left", "source_right", "label"};
  for (const auto& a : schema.attributes()) {
    header.push_back("left_" + a);
    header.push_back("right_" + a);
  }
  csv::write_row(os, header);
  std::vector<std::string> row;
  for (const auto& p : pairs) {
    row.clear();
    row.push_back(p.pair_id);
    row.push_back(p.left.source_id);
    row.push_back(p.right.source_id);
    row.push_back(p.label ? std::to_string(*p.label) : std::string());
    for (const auto& a : schema.attributes()) {
      row.push_back(p.left.value(a));
      row.push_back(p.right.value(a));
    }
    csv::write_row(os, row);
  }
  return os.str();
}

void write_pairs(const std::string& path, const std::vector<PairRecord>& pairs,
                 const AlignedSchema& schema) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write pair file: " + path);
  out << pairs_to_csv(pairs, schema);
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::pair<std::vector<PairRecord>, std::vector<PairRecord>> split_support(
    const std::vector<PairRecord>& target_pairs, int n, std::uint64_t seed) {
  if (n <= 0 || n % 2 != 0) throw std::invalid_argument("split_support: n must be positive and even");
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < target_pairs.size(); ++i) {
    const auto& p = target_pairs[i];
    if (!p.label) throw std::invalid_argument("split_support: unlabeled pair '" + p.pair_id + "'");
    (*p.label == 1 ? pos : neg).push_back(i);
  }
  const std::size_t half = static_cast<std::size_t>(n) / 2;
  if (pos.size() < half || neg.size() < half)
    throw std::runtime_error("split_support: need " + std::to_string(half) +
                             " pairs of each class, have " + std::to_string(pos.size()) +
                             " positive / " + std::to_string(neg.size()) + " negative");

  Rng rng = Rng::stream(seed, "support_split");
  rng.shuffle(pos);
  rng.shuffle(neg);

  std::unordered_set<std::size_t> chosen;
  for (std::size_t i = 0; i < half; ++i) {
    chosen.insert(pos[i]);
    chosen.insert(neg[i]);
  }

  std::vector<PairRecord> support, remaining;
  for (std::size_t i = 0; i < target_pairs.size(); ++i) {
    if (chosen.count(i)) {
      support.push_back(target_pairs[i]);
    } else {
      PairRecord stripped = target_pairs[i];
      stripped.label.reset();
      remaining.push_back(std::move(stripped));
    }
  }
  return {std::move(support), std::move(remaining)};
}

void check_partition_discipline(const DatasetPartitions& parts) {
  std::unordered_set<std::string> seen;
  auto visit = [&seen](const std::vector<PairRecord>& v, const char* name) {
    for (const auto& p : v)
      if (!seen.insert(p.pair_id).second)
        throw std::runtime_error("pair '" + p.pair_id + "' appears in multiple partitions (" +
                                 name + ")");
  };
  visit(parts.source_domain, "source");
  visit(parts.target_domain, "target");
  visit(parts.support_set, "support");
}

bool support_sources_covered(const std::vector<PairRecord>& support,
                             const std::vector<PairRecord>& target) {
  std::unordered_set<std::string> target_sources;
  for (const auto& p : target) {
    target_sources.insert(p.left.source_id);
    target_sources.insert(p.right.source_id);
  }
  for (const auto& p : support)
    if (!target_sources.count(p.left.source_id) || !target_sources.count(p.right.source_id))
      return false;
  return true;
}

DataManifest load_data_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open manifest: " + path);
  json j;
  in >> j;
  DataManifest m;
  if (!j.contains("schema") || !j["schema"].is_array())
    throw std::runtime_error(path + ": manifest needs a 'schema' array");
  for (const auto& a : j["schema"]) m.schema_attributes.push_back(a.get<std::string>());
  m.source_path = j.value("source", "");
  m.target_path = j.value("target", "");
  m.support_path = j.value("support", "");
  m.test_path = j.value("test", "");
  return m;
}

void save_data_manifest(const std::string& path, const DataManifest& manifest) {
  json j;
  j["schema"] = manifest.schema_attributes;
  if (!manifest.source_path.empty()) j["source"] = manifest.source_path;
  if (!manifest.target_path.empty()) j["target"] = manifest.target_path;
  if (!manifest.support_path.empty()) j["support"] = manifest.support_path;
  if (!manifest.test_path.empty()) j["test"] = manifest.test_path;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write manifest: " + path);
  out << j.dump(2) << '\n';
}

}  // namespace adamel
