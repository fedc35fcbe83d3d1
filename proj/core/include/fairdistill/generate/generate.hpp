// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fairdistill/data/dataset.hpp"
#include "fairdistill/distill/student.hpp"
#include "fairdistill/fairvae/teacher.hpp"

namespace fairdistill::generate {

struct Provenance {
  std::string teacher_id;
  std::string student_id;
  std::uint64_t seed = 0;
  std::size_t n_out = 0;
  bool resample_groups = false;
  std::string source = "train";

  nlohmann::json to_json() const;
  static Provenance from_json(const nlohmann::json& j);
};

struct SyntheticDataset {
  std::vector<data::Record> rows;  ///< human-readable, schema column order
  data::Dataset data;              ///< rows re-encoded under the source schema
  Provenance provenance;
};

struct GenerateOptions {
  std::size_t n_out = 0;  ///< 0 means "as many rows as the source"
  std::uint64_t seed = 0;
  /// Draw each output row's s from the empirical marginal of the source
  /// instead of keeping the source row's own s.
  bool resample_groups = false;
};

/// Samples source rows (a seeded permutation prefix when n_out <= n, with
/// replacement otherwise), encodes each with the student using per-row
/// noise derived from (seed, output row), decodes z' with the teacher
/// decoder conditioned on s and maps the result back to the schema. y is
/// copied from the source row.
SyntheticDataset generate_synthetic(const data::Dataset& source, const distill::StudentModel& student,
                                    const fairvae::TeacherModel& teacher, const GenerateOptions& opts);

/// Decoder input for a batch: [z | onehot(s)].
Eigen::MatrixXd decoder_input(const Eigen::MatrixXd& z, std::span<const int> s, int groups);

/// Writes the CSV and a sidecar `<stem>.provenance.json` next to it.
/// Returns the sidecar path. Throws IoError.
std::filesystem::path export_synthetic(const SyntheticDataset& sd, const std::filesystem::path& path);

/// Average over categorical feature columns of the total-variation distance
/// between the category marginals of two datasets with the same schema.
double mean_categorical_tv(const data::Dataset& a, const data::Dataset& b);

}  // namespace fairdistill::generate
