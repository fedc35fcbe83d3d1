// SPDX-License-Identifier: Apache-2.0
#include "fairdistill/data/schema.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <nlohmann/json.hpp>

#include "fairdistill/error.hpp"

namespace fairdistill::data {
namespace {

[[noreturn]] void invalid(const std::string& message) {
  throw Error(ErrorCode::InvalidSchema, message);
}

std::string kind_name(ColumnKind k) { return k == ColumnKind::Numeric ? "numeric" : "categorical"; }

std::string role_name(ColumnRole r) {
  switch (r) {
    case ColumnRole::Feature: return "feature";
    case ColumnRole::Protected: return "protected";
    case ColumnRole::Target: return "target";
  }
  return "feature";
}

}  // namespace

TabularSchema::TabularSchema(std::vector<ColumnSpec> columns) : columns_(std::move(columns)) {
  validate();
  index();
}

void TabularSchema::validate() const {
  if (columns_.empty()) invalid("schema has no columns");
  std::set<std::string> names;
  std::size_t n_protected = 0;
  std::size_t n_target = 0;
  std::size_t n_features = 0;
  for (const auto& c : columns_) {
    if (c.name.empty()) invalid("column with empty name");
    if (!names.insert(c.name).second) invalid("duplicate column '" + c.name + "'");
    if (c.kind == ColumnKind::Categorical) {
      if (c.categories.empty()) invalid("categorical column '" + c.name + "' has an empty vocabulary");
      std::set<std::string> seen(c.categories.begin(), c.categories.end());
      if (seen.size() != c.categories.size()) {
        invalid("categorical column '" + c.name + "' has duplicate categories");
      }
    } else {
      if (c.min && !std::isfinite(*c.min)) invalid("non-finite min for '" + c.name + "'");
      if (c.max && !std::isfinite(*c.max)) invalid("non-finite max for '" + c.name + "'");
      if (c.min.has_value() != c.max.has_value()) {
        invalid("numeric column '" + c.name + "' must declare both min and max or neither");
      }
      if (c.min && *c.min > *c.max) invalid("numeric column '" + c.name + "' has min > max");
    }
    switch (c.role) {
      case ColumnRole::Protected:
        ++n_protected;
        if (c.kind != ColumnKind::Categorical) invalid("protected column '" + c.name + "' must be categorical");
        break;
      case ColumnRole::Target:
        ++n_target;
        if (c.kind != ColumnKind::Categorical || c.categories.size() != 2) {
          invalid("target column '" + c.name + "' must be categorical with exactly two categories");
        }
        if (std::find(c.categories.begin(), c.categories.end(), c.positive) == c.categories.end()) {
          invalid("target column '" + c.name + "' positive label '" + c.positive + "' is not a category");
        }
        break;
      case ColumnRole::Feature:
        ++n_features;
        break;
    }
  }
  if (n_protected != 1) invalid("exactly one protected column required, found " + std::to_string(n_protected));
  if (n_target != 1) invalid("exactly one target column required, found " + std::to_string(n_target));
  if (n_features == 0) invalid("schema has no feature columns");
}

void TabularSchema::index() {
  blocks_.clear();
  encoded_width_ = 0;
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    const auto& c = columns_[i];
    if (c.role == ColumnRole::Protected) {
      protected_ = i;
      continue;
    }
    if (c.role == ColumnRole::Target) {
      target_ = i;
      positive_ = static_cast<std::size_t>(
          std::find(c.categories.begin(), c.categories.end(), c.positive) - c.categories.begin());
      continue;
    }
    const std::size_t width = c.kind == ColumnKind::Categorical ? c.categories.size() : 1;
    blocks_.push_back({i, encoded_width_, width});
    encoded_width_ += width;
  }
}

std::optional<std::size_t> TabularSchema::find(const std::string& name) const {
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (columns_[i].name == name) return i;
  }
  return std::nullopt;
}

bool TabularSchema::bounds_resolved() const {
  return std::all_of(columns_.begin(), columns_.end(), [](const ColumnSpec& c) {
    return c.kind != ColumnKind::Numeric || c.min.has_value();
  });
}

TabularSchema TabularSchema::with_bounds(std::size_t i, double min, double max) const {
  auto cols = columns_;
  cols.at(i).min = min;
  cols.at(i).max = max;
  return TabularSchema(std::move(cols));
}

bool TabularSchema::operator==(const TabularSchema& other) const {
  if (columns_.size() != other.columns_.size()) return false;
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    const auto& a = columns_[i];
    const auto& b = other.columns_[i];
    if (a.name != b.name || a.kind != b.kind || a.role != b.role || a.categories != b.categories ||
        a.min != b.min || a.max != b.max || a.integer != b.integer || a.positive != b.positive) {
      return false;
    }
  }
  return true;
}

TabularSchema TabularSchema::from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("columns") || !j["columns"].is_array()) {
    invalid("schema must be an object with a 'columns' array");
  }
  std::vector<ColumnSpec> cols;
  try {
    for (const auto& c : j["columns"]) {
      ColumnSpec spec;
      spec.name = c.at("name").get<std::string>();
      const auto kind = c.at("kind").get<std::string>();
      if (kind == "numeric") {
        spec.kind = ColumnKind::Numeric;
      } else if (kind == "categorical") {
        spec.kind = ColumnKind::Categorical;
      } else {
        invalid("column '" + spec.name + "' has unknown kind '" + kind + "'");
      }
      const auto role = c.value("role", std::string("feature"));
      if (role == "feature") {
        spec.role = ColumnRole::Feature;
      } else if (role == "protected") {
        spec.role = ColumnRole::Protected;
      } else if (role == "target") {
        spec.role = ColumnRole::Target;
      } else {
        invalid("column '" + spec.name + "' has unknown role '" + role + "'");
      }
      if (c.contains("categories")) spec.categories = c["categories"].get<std::vector<std::string>>();
      if (c.contains("min")) spec.min = c["min"].get<double>();
      if (c.contains("max")) spec.max = c["max"].get<double>();
      spec.integer = c.value("integer", false);
      spec.positive = c.value("positive", std::string());
      cols.push_back(std::move(spec));
    }
  } catch (const nlohmann::json::exception& e) {
    invalid(std::string("malformed schema: ") + e.what());
  }
  return TabularSchema(std::move(cols));
}

nlohmann::json TabularSchema::to_json() const {
  nlohmann::json cols = nlohmann::json::array();
  for (const auto& c : columns_) {
    nlohmann::json o;
    o["name"] = c.name;
    o["kind"] = kind_name(c.kind);
    o["role"] = role_name(c.role);
    if (c.kind == ColumnKind::Categorical) o["categories"] = c.categories;
    if (c.min) o["min"] = *c.min;
    if (c.max) o["max"] = *c.max;
    if (c.integer) o["integer"] = true;
    if (c.role == ColumnRole::Target) o["positive"] = c.positive;
    cols.push_back(std::move(o));
  }
  return nlohmann::json{{"columns", std::move(cols)}};
}

}  // namespace fairdistill::data
