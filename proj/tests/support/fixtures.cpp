// SPDX-License-Identifier: Apache-2.0
#include "fixtures.hpp"

#include <atomic>
#include <cmath>
#include <fstream>

#include <unistd.h>

#include "fairdistill/data/csv.hpp"
#include "fairdistill/rng.hpp"

namespace fixtures {
namespace fs = std::filesystem;
using namespace fairdistill;

fs::path source_dir() { return FAIRDISTILL_SOURCE_DIR; }

TempDir::TempDir(const std::string& tag) {
  static std::atomic<int> counter{0};
  path_ = fs::temp_directory_path() /
          ("fairdistill-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
  fs::remove_all(path_);
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

data::TabularSchema toy_schema(bool with_bounds) {
  std::vector<data::ColumnSpec> cols(5);
  cols[0].name = "age";
  cols[0].kind = data::ColumnKind::Numeric;
  cols[0].integer = true;
  cols[1].name = "hours";
  cols[1].kind = data::ColumnKind::Numeric;
  if (with_bounds) {
    cols[0].min = 18;
    cols[0].max = 80;
    cols[1].min = 0;
    cols[1].max = 60;
  }
  cols[2].name = "color";
  cols[2].kind = data::ColumnKind::Categorical;
  cols[2].categories = {"red", "green", "blue"};
  cols[3].name = "sex";
  cols[3].kind = data::ColumnKind::Categorical;
  cols[3].role = data::ColumnRole::Protected;
  cols[3].categories = {"F", "M"};
  cols[4].name = "income";
  cols[4].kind = data::ColumnKind::Categorical;
  cols[4].role = data::ColumnRole::Target;
  cols[4].categories = {"low", "high"};
  cols[4].positive = "high";
  return data::TabularSchema(cols);
}

std::vector<data::Record> toy_records(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<data::Record> out;
  const char* colors[] = {"red", "green", "blue"};
  for (std::size_t i = 0; i < n; ++i) {
    const bool male = uniform01(rng) < 0.5;
    const int age = 18 + static_cast<int>(uniform_index(rng, 63));
    double hours = std::round((30.0 + (male ? 8.0 : 0.0) + 8.0 * standard_normal(rng)) * 4.0) / 4.0;
    hours = std::clamp(hours, 0.0, 60.0);
    const std::size_t color = uniform_index(rng, 3);
    const double logit = -2.0 + 0.05 * (age - 40) + 0.08 * (hours - 30) + (color == 2 ? 1.0 : 0.0) + (male ? 1.0 : 0.0);
    const bool high = uniform01(rng) < 1.0 / (1.0 + std::exp(-logit));
    out.push_back({std::to_string(age), data::format_numeric(hours, false), colors[color], male ? "M" : "F",
                   high ? "high" : "low"});
  }
  return out;
}

data::Dataset toy_dataset(std::size_t n, std::uint64_t seed) {
  const auto rec = toy_records(n, seed);
  return data::encode_records(rec, toy_schema());
}

void write_records_csv(const fs::path& path, const data::TabularSchema& schema, const std::vector<data::Record>& records) {
  data::CsvTable t;
  for (const auto& c : schema.columns()) t.header.push_back(c.name);
  t.rows = records;
  data::write_csv(path, t);
}

pipeline::RunConfig toy_run_config(const fs::path& dir, std::size_t rows) {
  const fs::path csv = dir / "toy.csv";
  write_records_csv(csv, toy_schema(), toy_records(rows, 7));
  nlohmann::json j = {
      {"dataset", {{"path", "toy.csv"}, {"schema", toy_schema().to_json()}, {"protected", "sex"}, {"target", "income"}}},
      {"teacher", {{"beta", 2.0}, {"epochs", 3}, {"batch_size", 32}, {"latent_dim", 3}, {"hidden", {16, 16}}}},
      {"student", {{"quality_loss", "l1"}, {"lambda", 1.0}, {"epochs", 2}, {"batch_size", 32}}},
      {"generation", {{"n_out", 0}}},
      {"eval",
       {{"repetitions", 2}, {"trees", 5}, {"max_depth", 4}, {"k_nn", 3}, {"max_points", 100},
        {"permutation_shuffles", 1}, {"pca_rows", 50}}},
      {"output_dir", "run"},
      {"seed", 11}};
  return pipeline::RunConfig::from_json(j, dir);
}

}  // namespace fixtures
