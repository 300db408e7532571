#include "glassbox/census.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>

#include "glassbox/rng.hpp"

namespace glassbox {

namespace {

const std::vector<std::string> kNumericColumns = {"age",          "fnlwgt",
                                                  "education.num", "capital.gain",
                                                  "capital.loss",  "hours.per.week"};
const std::vector<std::string> kCategoricalSources = {"workclass", "occupation", "relationship",
                                                      "race",      "sex",        "native.country"};
const std::string kLabelColumn = "income";
const std::string kMaritalColumn = "marital.status";
const std::string kEducationColumn = "education";  // dropped: exact recode of education.num

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.push_back("");
  return cells;
}

double parse_numeric(const std::string& cell, const std::string& column, std::size_t row) {
  const char* begin = cell.c_str();
  char* end = nullptr;
  double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0')
    throw validation_error("encode: non-numeric value '" + cell + "' in column " + column +
                           " at row " + std::to_string(row));
  return v;
}

}  // namespace

std::size_t RawTable::column_index(const std::string& name) const {
  auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw validation_error("unknown column: " + name);
  return static_cast<std::size_t>(it - columns.begin());
}

bool FeatureSchema::is_married(const std::string& marital_status) const {
  return std::find(married_values.begin(), married_values.end(), marital_status) !=
         married_values.end();
}

RawTable parse_census(std::istream& stream) {
  RawTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(stream, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1) {
      table.columns = split_line(line);
      if (table.columns.empty()) throw validation_error("parse_census: empty header");
      continue;
    }
    if (line.empty()) continue;
    auto cells = split_line(line);
    if (cells.size() != table.columns.size())
      throw validation_error("parse_census: line " + std::to_string(line_no) + " has " +
                             std::to_string(cells.size()) + " cells, expected " +
                             std::to_string(table.columns.size()));
    table.rows.push_back(std::move(cells));
  }
  if (table.columns.empty()) throw validation_error("parse_census: empty stream");

  // Drop rows whose label cell is empty or missing.
  auto label_it = std::find(table.columns.begin(), table.columns.end(), kLabelColumn);
  if (label_it != table.columns.end()) {
    std::size_t li = static_cast<std::size_t>(label_it - table.columns.begin());
    std::erase_if(table.rows, [li](const std::vector<std::string>& row) {
      return row[li].empty() || row[li] == "?";
    });
  }
  return table;
}

RawTable parse_census_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open " + path);
  return parse_census(in);
}

FeatureSchema build_schema(const RawTable& table) {
  if (table.rows.empty()) throw validation_error("build_schema: empty table");
  for (const auto& required : kNumericColumns) table.column_index(required);
  for (const auto& required : kCategoricalSources) table.column_index(required);
  table.column_index(kLabelColumn);
  table.column_index(kMaritalColumn);
  table.column_index(kEducationColumn);

  FeatureSchema schema;
  schema.numeric_columns = kNumericColumns;
  schema.label_column = kLabelColumn;
  schema.married_values = {"Married-AF-spouse", "Married-civ-spouse"};

  std::vector<std::string> sources = kCategoricalSources;
  std::sort(sources.begin(), sources.end());
  for (const auto& source : sources) {
    std::size_t ci = table.column_index(source);
    std::set<std::string> values;
    for (const auto& row : table.rows)
      if (row[ci] != "?" && !row[ci].empty()) values.insert(row[ci]);
    CategoricalColumn col;
    col.source = source;
    col.prefix = source == "native.country" ? "nac" : source;
    col.categories.assign(values.begin(), values.end());
    schema.categorical_columns.push_back(std::move(col));
  }
  return schema;
}

EncodedDataset encode(const RawTable& table, const FeatureSchema& schema) {
  EncodedDataset out;

  // Layout: numerics in canonical order, then married_1 (derived from
  // marital.status), then one-hot groups; group order is alphabetical by
  // source column, which places married_1 first (marital.status sorts lowest).
  for (const auto& name : schema.numeric_columns) {
    FeatureGroup g;
    g.name = name;
    g.kind = GroupKind::numeric;
    g.members = {out.feature_names.size()};
    out.feature_names.push_back(name);
    out.groups.push_back(std::move(g));
  }
  {
    FeatureGroup g;
    g.name = "married_1";
    g.kind = GroupKind::binary;
    g.members = {out.feature_names.size()};
    out.feature_names.push_back("married_1");
    out.groups.push_back(std::move(g));
  }
  for (const auto& cat : schema.categorical_columns) {
    FeatureGroup g;
    g.name = cat.source;
    g.kind = GroupKind::onehot;
    for (const auto& value : cat.categories) {
      g.members.push_back(out.feature_names.size());
      out.feature_names.push_back(cat.prefix + "_" + value);
    }
    out.groups.push_back(std::move(g));
  }
  out.group_of.resize(out.feature_names.size());
  for (std::size_t gi = 0; gi < out.groups.size(); ++gi)
    for (std::size_t f : out.groups[gi].members) out.group_of[f] = gi;

  std::size_t width = out.feature_names.size();
  std::size_t n = table.rows.size();
  out.X = Matrix(n, width);
  out.y.resize(n);
  out.missing.assign(n * out.groups.size(), 0);

  std::vector<std::size_t> numeric_src(schema.numeric_columns.size());
  for (std::size_t k = 0; k < schema.numeric_columns.size(); ++k)
    numeric_src[k] = table.column_index(schema.numeric_columns[k]);
  std::size_t marital_src = table.column_index(kMaritalColumn);
  std::size_t label_src = table.column_index(schema.label_column);
  std::vector<std::size_t> cat_src(schema.categorical_columns.size());
  for (std::size_t k = 0; k < schema.categorical_columns.size(); ++k)
    cat_src[k] = table.column_index(schema.categorical_columns[k].source);

  for (std::size_t r = 0; r < n; ++r) {
    const auto& row = table.rows[r];
    std::size_t col = 0;
    for (std::size_t k = 0; k < numeric_src.size(); ++k)
      out.X(r, col++) = parse_numeric(row[numeric_src[k]], schema.numeric_columns[k], r + 1);

    out.X(r, col++) = schema.is_married(row[marital_src]) ? 1.0 : 0.0;

    for (std::size_t k = 0; k < schema.categorical_columns.size(); ++k) {
      const auto& cat = schema.categorical_columns[k];
      const std::string& value = row[cat_src[k]];
      std::size_t group_index = schema.numeric_columns.size() + 1 + k;
      if (value == "?" || value.empty()) {
        out.missing[r * out.groups.size() + group_index] = 1;
        col += cat.categories.size();
        continue;
      }
      auto it = std::lower_bound(cat.categories.begin(), cat.categories.end(), value);
      if (it == cat.categories.end() || *it != value)
        throw validation_error("encode: unseen category '" + value + "' in column " + cat.source);
      std::size_t offset = static_cast<std::size_t>(it - cat.categories.begin());
      for (std::size_t c = 0; c < cat.categories.size(); ++c) out.X(r, col + c) = 0.0;
      out.X(r, col + offset) = 1.0;
      col += cat.categories.size();
    }

    const std::string& label = row[label_src];
    std::string cleaned = label;
    if (!cleaned.empty() && cleaned.back() == '.') cleaned.pop_back();
    if (cleaned == ">50K")
      out.y[r] = 1;
    else if (cleaned == "<=50K")
      out.y[r] = 0;
    else
      throw validation_error("encode: unrecognized label '" + label + "' at row " +
                             std::to_string(r + 1));
  }
  return out;
}

namespace {
EncodedDataset take_rows(const EncodedDataset& data, const std::vector<std::size_t>& rows) {
  EncodedDataset out;
  out.feature_names = data.feature_names;
  out.groups = data.groups;
  out.group_of = data.group_of;
  out.X = Matrix(rows.size(), data.X.cols);
  out.y.resize(rows.size());
  out.missing.assign(rows.size() * data.groups.size(), 0);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::copy(data.X.row_ptr(rows[i]), data.X.row_ptr(rows[i]) + data.X.cols, out.X.row_ptr(i));
    out.y[i] = data.y[rows[i]];
    if (!data.missing.empty())
      std::copy(data.missing.begin() + static_cast<std::ptrdiff_t>(rows[i] * data.groups.size()),
                data.missing.begin() +
                    static_cast<std::ptrdiff_t>((rows[i] + 1) * data.groups.size()),
                out.missing.begin() + static_cast<std::ptrdiff_t>(i * data.groups.size()));
  }
  return out;
}
}  // namespace

SplitPair train_test_split(const EncodedDataset& data, double ratio, std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0)) throw validation_error("train_test_split: ratio must be in (0,1)");
  std::size_t n = data.X.rows;
  Rng rng(stable_hash({seed, 0x53504C4954ull}));
  auto order = rng.permutation(n);
  std::size_t n_train = static_cast<std::size_t>(
      std::min<double>(static_cast<double>(n), std::ceil(ratio * static_cast<double>(n))));
  std::vector<std::size_t> train_rows(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  std::vector<std::size_t> test_rows(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
  SplitPair pair;
  pair.train = take_rows(data, train_rows);
  pair.test = take_rows(data, test_rows);
  pair.seed = seed;
  pair.ratio = ratio;
  return pair;
}

std::size_t feature_index(const EncodedDataset& data, const std::string& name) {
  auto it = std::find(data.feature_names.begin(), data.feature_names.end(), name);
  if (it == data.feature_names.end()) throw validation_error("unknown feature: " + name);
  return static_cast<std::size_t>(it - data.feature_names.begin());
}

}  // namespace glassbox
