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

#ifndef ADAMEL_DATA_HPP
#define ADAMEL_DATA_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace adamel {

/// Ordered attribute list shared by every record after ontology alignment.
/// Feature index j is stable for the lifetime of the schema: attribute k
/// owns feature rows 2k (shared tokens) and 2k+1 (unique tokens).
class AlignedSchema {
 public:
  AlignedSchema() = default;
  explicit AlignedSchema(std::vector<std::string> attributes);

  const std::vector<std::string>& attributes() const { return attributes_; }
  int attribute_count() const { return static_cast<int>(attributes_.size()); }
  int feature_count() const { return 2 * attribute_count(); }

  /// Name of feature row j: "<attribute>_shared" for even j, "<attribute>_unique" for odd.
  std::string feature_name(int j) const;

  bool has_attribute(const std::string& name) const;

  bool operator==(const AlignedSchema& other) const { return attributes_ == other.attributes_; }

 private:
  std::vector<std::string> attributes_;
};

struct EntityRecord {
  std::string source_id;
  // One entry per schema attribute; missing values are the empty string.
  std::map<std::string, std::string> values;

  const std::string& value(const std::string& attribute) const;
};

struct PairRecord {
  std::string pair_id;
  EntityRecord left;
  EntityRecord right;
  std::optional<int> label;  // 0 or 1; absent only in the target domain
};

enum class Partition { source, target, support };

const char* partition_name(Partition p);

struct DatasetPartitions {
  std::vector<PairRecord> source_domain;  // labeled
  std::vector<PairRecord> target_domain;  // unlabeled
  std::vector<PairRecord> support_set;    // labeled, possibly empty
};

/// Lexicographically ordered union of the per-source attribute lists.
/// Throws if the union is empty.
AlignedSchema align_ontology(const std::vector<std::vector<std::string>>& schemas);

/// Reads a pair file. The expected header is
///   pair_id,source_left,source_right,label,left_<a1>,right_<a1>,...
/// in schema order. Labels must be 0/1 and are required unless the partition
/// is the target domain, where an empty label cell is allowed.
std::vector<PairRecord> load_pairs(const std::string& path, const AlignedSchema& schema,
                                   Partition partition);

/// Parses pair rows from CSV text already in memory (same format as load_pairs).
std::vector<PairRecord> parse_pairs(const std::string& csv_text, const AlignedSchema& schema,
                                    Partition partition, const std::string& origin);

/// Writes pairs in the load_pairs format. Unlabeled pairs get an empty label cell.
void write_pairs(const std::string& path, const std::vector<PairRecord>& pairs,
                 const AlignedSchema& schema);

std::string pairs_to_csv(const std::vector<PairRecord>& pairs, const AlignedSchema& schema);

/// Draws a class-balanced support set of size n (n/2 positives, n/2 negatives)
/// without replacement from labeled target pairs. The pairs not selected are
/// returned with their labels stripped, ready to serve as the target domain.
std::pair<std::vector<PairRecord>, std::vector<PairRecord>> split_support(
    const std::vector<PairRecord>& target_pairs, int n, std::uint64_t seed);

/// Checks that no pair_id appears in more than one partition. Throws on overlap.
void check_partition_discipline(const DatasetPartitions& parts);

/// True when every support pair draws both records from sources that also
/// appear somewhere in the target pairs (the support set is meant to be
/// sampled from the target domain's sources).
bool support_sources_covered(const std::vector<PairRecord>& support,
                             const std::vector<PairRecord>& target);

/// Dataset manifest: file paths per partition plus the schema, JSON-shaped.
struct DataManifest {
  std::vector<std::string> schema_attributes;
  std::string source_path;
  std::string target_path;
  std::string support_path;  // optional, empty if absent
  std::string test_path;     // optional, empty if absent
};

DataManifest load_data_manifest(const std::string& path);
void save_data_manifest(const std::string& path, const DataManifest& manifest);

}  // namespace adamel

#endif  // ADAMEL_DATA_HPP
