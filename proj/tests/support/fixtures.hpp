// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "fairdistill/data/dataset.hpp"
#include "fairdistill/pipeline/config.hpp"

namespace fixtures {

std::filesystem::path source_dir();

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag);
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

/// age (numeric 18..80, integer), hours (numeric, real), color {red, green,
/// blue}, sex {F, M} protected, income {low, high} target (positive high).
fairdistill::data::TabularSchema toy_schema(bool with_bounds = true);

/// Records where income depends on age, color and sex.
std::vector<fairdistill::data::Record> toy_records(std::size_t n, std::uint64_t seed);

fairdistill::data::Dataset toy_dataset(std::size_t n, std::uint64_t seed);

void write_records_csv(const std::filesystem::path& path, const fairdistill::data::TabularSchema& schema,
                       const std::vector<fairdistill::data::Record>& records);

/// Small but complete run config on toy data, written into `dir`.
fairdistill::pipeline::RunConfig toy_run_config(const std::filesystem::path& dir, std::size_t rows = 300);

}  // namespace fixtures
