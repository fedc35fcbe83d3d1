// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace fairdistill::data {

enum class ColumnKind { Numeric, Categorical };
enum class ColumnRole { Feature, Protected, Target };

struct ColumnSpec {
  std::string name;
  ColumnKind kind = ColumnKind::Numeric;
  ColumnRole role = ColumnRole::Feature;
  /// Categorical vocabulary, in encoding order.
  std::vector<std::string> categories;
  /// Numeric scaling bounds. Unset bounds are resolved from the data at load.
  std::optional<double> min;
  std::optional<double> max;
  /// Decoded numeric values are rounded to whole numbers.
  bool integer = false;
  /// Target only: the category encoded as y = 1.
  std::string positive;
};

/// One contiguous one-hot block (or single numeric cell) of the encoded
/// feature matrix.
struct EncodedBlock {
  std::size_t column = 0;
  std::size_t offset = 0;
  std::size_t width = 0;
};

/// Column roles and encodings. Exactly one protected and one target column;
/// both categorical, the target binary. Protected and target are not part of
/// the encoded feature matrix X.
class TabularSchema {
 public:
  TabularSchema() = default;
  explicit TabularSchema(std::vector<ColumnSpec> columns);

  const std::vector<ColumnSpec>& columns() const noexcept { return columns_; }
  const ColumnSpec& column(std::size_t i) const { return columns_.at(i); }
  std::optional<std::size_t> find(const std::string& name) const;

  std::size_t protected_column() const noexcept { return protected_; }
  std::size_t target_column() const noexcept { return target_; }
  std::size_t group_count() const { return columns_[protected_].categories.size(); }
  std::size_t positive_index() const noexcept { return positive_; }

  /// Feature blocks in column order; their widths sum to encoded_width().
  const std::vector<EncodedBlock>& blocks() const noexcept { return blocks_; }
  std::size_t encoded_width() const noexcept { return encoded_width_; }

  bool bounds_resolved() const;
  /// Copy with the given bounds for column i.
  TabularSchema with_bounds(std::size_t i, double min, double max) const;

  /// Re-checks every invariant; throws InvalidSchema.
  void validate() const;

  bool operator==(const TabularSchema& other) const;

  static TabularSchema from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

 private:
  void index();

  std::vector<ColumnSpec> columns_;
  std::vector<EncodedBlock> blocks_;
  std::size_t protected_ = 0;
  std::size_t target_ = 0;
  std::size_t positive_ = 1;
  std::size_t encoded_width_ = 0;
};

}  // namespace fairdistill::data
