// SPDX-License-Identifier: Apache-2.0
#include "fairdistill/data/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "fairdistill/data/csv.hpp"
#include "fairdistill/error.hpp"

namespace fairdistill::data {
namespace {

std::unordered_map<std::string, int> vocabulary_index(const ColumnSpec& c) {
  std::unordered_map<std::string, int> idx;
  for (std::size_t i = 0; i < c.categories.size(); ++i) idx.emplace(c.categories[i], static_cast<int>(i));
  return idx;
}

double parse_numeric(const std::string& cell, const std::string& column, std::size_t row) {
  double value = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  while (first < last && *first == ' ') ++first;
  while (last > first && last[-1] == ' ') --last;
  if (first < last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || first == last || !std::isfinite(value)) {
    throw Error(ErrorCode::NonFiniteNumeric,
                "column '" + column + "' row " + std::to_string(row) + " value '" + cell + "'");
  }
  return value;
}

}  // namespace

Eigen::MatrixXd Dataset::group_onehot() const {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows()),
                                              static_cast<Eigen::Index>(schema.group_count()));
  for (std::size_t i = 0; i < rows(); ++i) out(static_cast<Eigen::Index>(i), s[i]) = 1.0;
  return out;
}

Eigen::MatrixXd Dataset::features_with_group() const {
  Eigen::MatrixXd out(x.rows(), x.cols() + static_cast<Eigen::Index>(schema.group_count()));
  out << x, group_onehot();
  return out;
}

Dataset Dataset::subset(std::span<const std::size_t> idx) const {
  Dataset out;
  out.schema = schema;
  out.x.resize(static_cast<Eigen::Index>(idx.size()), x.cols());
  out.s.reserve(idx.size());
  out.y.reserve(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    out.x.row(static_cast<Eigen::Index>(i)) = x.row(static_cast<Eigen::Index>(idx[i]));
    out.s.push_back(s[idx[i]]);
    out.y.push_back(y[idx[i]]);
  }
  return out;
}

void Dataset::validate() const {
  auto fail = [](const std::string& m) { throw Error(ErrorCode::SchemaMismatch, m); };
  if (x.cols() != static_cast<Eigen::Index>(schema.encoded_width())) fail("X width does not match schema");
  if (x.rows() != static_cast<Eigen::Index>(rows()) || y.size() != s.size()) fail("row counts disagree");
  const int groups = static_cast<int>(schema.group_count());
  for (std::size_t i = 0; i < rows(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    if (s[i] < 0 || s[i] >= groups) fail("row " + std::to_string(i) + " has invalid group index");
    if (y[i] != 0 && y[i] != 1) fail("row " + std::to_string(i) + " has non-binary target");
    for (const auto& b : schema.blocks()) {
      const auto& col = schema.column(b.column);
      if (col.kind == ColumnKind::Categorical) {
        double sum = 0.0;
        for (std::size_t j = 0; j < b.width; ++j) {
          const double v = x(r, static_cast<Eigen::Index>(b.offset + j));
          if (v != 0.0 && v != 1.0) fail("row " + std::to_string(i) + " column '" + col.name + "' not one-hot");
          sum += v;
        }
        if (sum != 1.0) fail("row " + std::to_string(i) + " column '" + col.name + "' block does not sum to 1");
      } else {
        const double v = x(r, static_cast<Eigen::Index>(b.offset));
        if (!(v >= 0.0 && v <= 1.0)) fail("row " + std::to_string(i) + " column '" + col.name + "' outside [0,1]");
      }
    }
  }
}

Dataset encode_records(std::span<const Record> records, const TabularSchema& input_schema) {
  const auto& cols = input_schema.columns();
  for (std::size_t r = 0; r < records.size(); ++r) {
    if (records[r].size() != cols.size()) {
      throw Error(ErrorCode::WidthMismatch, "record " + std::to_string(r) + " has " +
                                                std::to_string(records[r].size()) + " cells, schema has " +
                                                std::to_string(cols.size()));
    }
  }

  // Parse numerics once; resolve missing bounds from the data.
  std::vector<std::vector<double>> numeric(cols.size());
  TabularSchema schema = input_schema;
  for (std::size_t c = 0; c < cols.size(); ++c) {
    if (cols[c].kind != ColumnKind::Numeric) continue;
    auto& values = numeric[c];
    values.reserve(records.size());
    for (std::size_t r = 0; r < records.size(); ++r) values.push_back(parse_numeric(records[r][c], cols[c].name, r));
    if (!cols[c].min) {
      double lo = 0.0, hi = 0.0;
      if (!values.empty()) {
        const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
        lo = *mn;
        hi = *mx;
      }
      schema = schema.with_bounds(c, lo, hi);
    }
  }

  Dataset d;
  d.schema = schema;
  const auto n = static_cast<Eigen::Index>(records.size());
  d.x = Eigen::MatrixXd::Zero(n, static_cast<Eigen::Index>(schema.encoded_width()));
  d.s.assign(records.size(), 0);
  d.y.assign(records.size(), 0);

  std::vector<std::unordered_map<std::string, int>> vocab(cols.size());
  for (std::size_t c = 0; c < cols.size(); ++c) {
    if (cols[c].kind == ColumnKind::Categorical) vocab[c] = vocabulary_index(cols[c]);
  }
  auto category = [&](std::size_t c, std::size_t r) {
    const auto it = vocab[c].find(records[r][c]);
    if (it == vocab[c].end()) {
      throw Error(ErrorCode::UnknownCategory, "column '" + cols[c].name + "' row " + std::to_string(r) +
                                                  " value '" + records[r][c] + "'");
    }
    return it->second;
  };

  for (std::size_t r = 0; r < records.size(); ++r) {
    const auto row = static_cast<Eigen::Index>(r);
    d.s[r] = category(schema.protected_column(), r);
    d.y[r] = category(schema.target_column(), r) == static_cast<int>(schema.positive_index()) ? 1 : 0;
    for (const auto& b : schema.blocks()) {
      const auto& col = schema.column(b.column);
      if (col.kind == ColumnKind::Categorical) {
        d.x(row, static_cast<Eigen::Index>(b.offset) + category(b.column, r)) = 1.0;
      } else {
        const double v = numeric[b.column][r];
        const double lo = *col.min, hi = *col.max;
        if (v < lo || v > hi) {
          throw Error(ErrorCode::NumericOutOfRange, "column '" + col.name + "' row " + std::to_string(r) +
                                                        " value " + records[r][b.column] + " outside [" +
                                                        format_numeric(lo, false) + ", " +
                                                        format_numeric(hi, false) + "]");
        }
        d.x(row, static_cast<Eigen::Index>(b.offset)) = hi > lo ? (v - lo) / (hi - lo) : 0.0;
      }
    }
  }
  return d;
}

Dataset load_csv(const std::filesystem::path& path, const TabularSchema& schema) {
  std::error_code ec;
  if (!std::filesystem::exists(path, ec)) throw Error(ErrorCode::IoError, "no such file " + path.string());
  const CsvTable table = read_csv(path);
  std::vector<std::size_t> source(schema.columns().size());
  for (std::size_t c = 0; c < schema.columns().size(); ++c) {
    const auto& name = schema.column(c).name;
    const auto it = std::find(table.header.begin(), table.header.end(), name);
    if (it == table.header.end()) throw Error(ErrorCode::MissingColumn, "'" + name + "' not in " + path.string());
    source[c] = static_cast<std::size_t>(it - table.header.begin());
  }
  std::vector<Record> records;
  records.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    Record rec(source.size());
    for (std::size_t c = 0; c < source.size(); ++c) rec[c] = row[source[c]];
    records.push_back(std::move(rec));
  }
  return encode_records(records, schema);
}

namespace {

double round_significant(double value, int digits) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, digits);
  (void)ec;
  double out = value;
  std::from_chars(buf, ptr, out);
  return out;
}

}  // namespace

std::string format_numeric(double value, bool integer) {
  if (integer) {
    const double r = std::nearbyint(value);
    return std::to_string(static_cast<long long>(r));
  }
  if (value == 0.0) value = 0.0;  // drop negative zero
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  (void)ec;
  return std::string(buf, ptr);
}

std::vector<Record> decode_rows(const Eigen::MatrixXd& encoded, std::span<const int> s,
                                std::span<const int> y, const TabularSchema& schema) {
  if (encoded.cols() != static_cast<Eigen::Index>(schema.encoded_width())) {
    throw Error(ErrorCode::WidthMismatch, "encoded width " + std::to_string(encoded.cols()) +
                                              " does not match schema width " +
                                              std::to_string(schema.encoded_width()));
  }
  if (s.size() != static_cast<std::size_t>(encoded.rows()) || y.size() != s.size()) {
    throw Error(ErrorCode::WidthMismatch, "group/target vectors do not match row count");
  }
  if (!schema.bounds_resolved()) throw Error(ErrorCode::InvalidSchema, "numeric bounds unresolved");

  const auto& prot = schema.column(schema.protected_column());
  const auto& target = schema.column(schema.target_column());
  std::vector<Record> out;
  out.reserve(s.size());
  for (Eigen::Index r = 0; r < encoded.rows(); ++r) {
    Record rec(schema.columns().size());
    const auto i = static_cast<std::size_t>(r);
    if (s[i] < 0 || s[i] >= static_cast<int>(prot.categories.size())) {
      throw Error(ErrorCode::SchemaMismatch, "group index out of range in row " + std::to_string(i));
    }
    rec[schema.protected_column()] = prot.categories[static_cast<std::size_t>(s[i])];
    const std::size_t negative = 1 - schema.positive_index();
    rec[schema.target_column()] = target.categories[y[i] == 1 ? schema.positive_index() : negative];
    for (const auto& b : schema.blocks()) {
      const auto& col = schema.column(b.column);
      if (col.kind == ColumnKind::Categorical) {
        Eigen::Index best = 0;
        encoded.row(r).segment(static_cast<Eigen::Index>(b.offset), static_cast<Eigen::Index>(b.width)).maxCoeff(&best);
        rec[b.column] = col.categories[static_cast<std::size_t>(best)];
      } else {
        const double p = std::clamp(encoded(r, static_cast<Eigen::Index>(b.offset)), 0.0, 1.0);
        double v = *col.min + p * (*col.max - *col.min);
        if (col.integer) v = std::clamp(std::nearbyint(v), std::ceil(*col.min), std::floor(*col.max));
        // 12 significant digits hide the min-max scaling round-off.
        rec[b.column] = col.integer ? format_numeric(v, true) : format_numeric(round_significant(v, 12), false);
      }
    }
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<Record> decode_rows(const Dataset& d) { return decode_rows(d.x, d.s, d.y, d.schema); }

}  // namespace fairdistill::data
