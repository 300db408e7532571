#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "glassbox/common.hpp"

namespace glassbox {

struct RawTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;  // missing cells hold "?"

  std::size_t column_index(const std::string& name) const;
};

struct CategoricalColumn {
  std::string source;                   // raw column name
  std::string prefix;                   // encoded name prefix (native.country -> "nac")
  std::vector<std::string> categories;  // observed, deduplicated, sorted; "?" excluded
};

// Encoding schema for the Adult census layout. marital.status is consumed by
// the derived married_1 binary and the education string column is dropped as
// an exact recode of education.num; both choices are documented in the README.
struct FeatureSchema {
  std::vector<std::string> numeric_columns;
  std::vector<CategoricalColumn> categorical_columns;
  std::string label_column;
  std::vector<std::string> married_values;  // marital.status values mapping to married_1 = 1

  bool is_married(const std::string& marital_status) const;
};

enum class GroupKind { numeric, binary, onehot };

// One source feature and the encoded columns it owns. Permutation importance,
// LIME sampling and audit sibling exclusion all operate on these units.
struct FeatureGroup {
  std::string name;                  // unit name: column name, "married_1", or source name
  GroupKind kind = GroupKind::numeric;
  std::vector<std::size_t> members;  // encoded column indices
};

struct EncodedDataset {
  Matrix X;
  std::vector<int> y;  // 1 <=> income > 50K
  std::vector<std::string> feature_names;
  std::vector<FeatureGroup> groups;
  std::vector<std::size_t> group_of;        // encoded column -> group index
  std::vector<std::uint8_t> missing;        // rows x groups, 1 = "?" cell in that group
  bool missing_at(std::size_t row, std::size_t group) const {
    return !missing.empty() && missing[row * groups.size() + group] != 0;
  }
};

struct SplitPair {
  EncodedDataset train;
  EncodedDataset test;
  std::uint64_t seed = 0;
  double ratio = 0.8;
};

// CSV ingestion: header row, comma delimiter, "?" missing marker, cells
// trimmed of surrounding whitespace. Rows with a missing label are dropped.
RawTable parse_census(std::istream& stream);
RawTable parse_census_file(const std::string& path);

FeatureSchema build_schema(const RawTable& table);

EncodedDataset encode(const RawTable& table, const FeatureSchema& schema);

SplitPair train_test_split(const EncodedDataset& data, double ratio, std::uint64_t seed);

std::size_t feature_index(const EncodedDataset& data, const std::string& name);

}  // namespace glassbox
