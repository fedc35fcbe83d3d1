// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fairdistill/data/schema.hpp"

namespace fairdistill::data {

/// Human-readable record: one string cell per schema column, in schema order.
using Record = std::vector<std::string>;

/// Encoded tabular data. X holds the feature columns only (one-hot
/// categoricals, min-max scaled numerics); the protected group index s and
/// binary target y are kept separately.
struct Dataset {
  TabularSchema schema;
  Eigen::MatrixXd x;
  std::vector<int> s;
  std::vector<int> y;

  std::size_t rows() const noexcept { return s.size(); }

  /// One-hot encoding of s, rows() x group_count().
  Eigen::MatrixXd group_onehot() const;
  /// [X | onehot(s)]: the encoder input, and the feature matrix the
  /// downstream classifier sees.
  Eigen::MatrixXd features_with_group() const;

  Dataset subset(std::span<const std::size_t> rows) const;

  /// Checks the one-hot, range and label invariants; throws SchemaMismatch.
  void validate() const;
};

/// Encodes records (schema column order). Numeric columns without declared
/// bounds get them from the records' min and max.
Dataset encode_records(std::span<const Record> records, const TabularSchema& schema);

/// Reads a headered CSV and encodes it. Header order may differ from schema
/// order; extra CSV columns are ignored. Errors: MissingColumn,
/// UnknownCategory, NonFiniteNumeric, NumericOutOfRange, EmptyFile.
Dataset load_csv(const std::filesystem::path& path, const TabularSchema& schema);

/// Inverse of the encoding: argmax per one-hot block, inverse min-max per
/// numeric cell (rounded for integer columns). `encoded` must be
/// n x encoded_width(); s and y supply the protected and target cells.
std::vector<Record> decode_rows(const Eigen::MatrixXd& encoded, std::span<const int> s,
                                std::span<const int> y, const TabularSchema& schema);
std::vector<Record> decode_rows(const Dataset& d);

/// Formats a numeric cell the way decode_rows does.
std::string format_numeric(double value, bool integer);

}  // namespace fairdistill::data
