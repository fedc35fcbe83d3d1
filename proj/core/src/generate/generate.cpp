// SPDX-License-Identifier: Apache-2.0
#include "fairdistill/generate/generate.hpp"

#include <fstream>
#include <numeric>

#include "fairdistill/data/csv.hpp"
#include "fairdistill/error.hpp"
#include "fairdistill/nn/checkpoint.hpp"
#include "fairdistill/rng.hpp"

namespace fairdistill::generate {

nlohmann::json Provenance::to_json() const {
  return {{"teacher", teacher_id}, {"student", student_id},   {"seed", seed},
          {"n_out", n_out},        {"flags", {{"resample_groups", resample_groups}}}, {"source", source}};
}

Provenance Provenance::from_json(const nlohmann::json& j) {
  Provenance p;
  p.teacher_id = j.at("teacher").get<std::string>();
  p.student_id = j.at("student").get<std::string>();
  p.seed = j.at("seed").get<std::uint64_t>();
  p.n_out = j.at("n_out").get<std::size_t>();
  p.resample_groups = j.at("flags").value("resample_groups", false);
  p.source = j.value("source", "train");
  return p;
}

Eigen::MatrixXd decoder_input(const Eigen::MatrixXd& z, std::span<const int> s, int groups) {
  if (static_cast<std::size_t>(z.rows()) != s.size()) throw Error(ErrorCode::ShapeMismatch, "z rows != s size");
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(z.rows(), z.cols() + groups);
  out.leftCols(z.cols()) = z;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] < 0 || s[i] >= groups) throw Error(ErrorCode::SchemaMismatch, "group index out of range");
    out(static_cast<Eigen::Index>(i), z.cols() + s[i]) = 1.0;
  }
  return out;
}

SyntheticDataset generate_synthetic(const data::Dataset& source, const distill::StudentModel& student,
                                    const fairvae::TeacherModel& teacher, const GenerateOptions& opts) {
  if (student.latent_dim != teacher.latent_dim) {
    throw Error(ErrorCode::LatentDimMismatch, "student k=" + std::to_string(student.latent_dim) +
                                                  " but decoder expects k=" + std::to_string(teacher.latent_dim));
  }
  const int groups = static_cast<int>(source.schema.group_count());
  if (teacher.groups != groups || static_cast<Eigen::Index>(source.schema.encoded_width()) != teacher.feature_width() ||
      student.encoder.input_width() != teacher.encoder.input_width()) {
    throw Error(ErrorCode::SchemaMismatch, "models were trained on a different schema");
  }
  const std::size_t n = source.rows();
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "empty source dataset");
  const std::size_t n_out = opts.n_out == 0 ? n : opts.n_out;

  std::vector<std::size_t> picks(n_out);
  Rng select(derive_seed(opts.seed, 1));
  if (n_out <= n) {
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    shuffle(std::span<std::size_t>(perm), select);
    std::copy_n(perm.begin(), n_out, picks.begin());
  } else {
    for (auto& p : picks) p = static_cast<std::size_t>(uniform_index(select, n));
  }

  std::vector<int> s(n_out), y(n_out);
  Rng group_rng(derive_seed(opts.seed, 3));
  for (std::size_t i = 0; i < n_out; ++i) {
    y[i] = source.y[picks[i]];
    s[i] = opts.resample_groups ? source.s[static_cast<std::size_t>(uniform_index(group_rng, n))]
                                : source.s[picks[i]];
  }

  const auto k = static_cast<Eigen::Index>(student.latent_dim);
  const std::uint64_t noise_base = derive_seed(opts.seed, 2);
  Eigen::MatrixXd x(static_cast<Eigen::Index>(n_out), source.x.cols());
  Eigen::MatrixXd src_groups = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_out), groups);
  Eigen::MatrixXd noise(static_cast<Eigen::Index>(n_out), k);
  for (std::size_t i = 0; i < n_out; ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    x.row(r) = source.x.row(static_cast<Eigen::Index>(picks[i]));
    src_groups(r, source.s[picks[i]]) = 1.0;
    Rng row_rng(derive_seed(noise_base, i));
    for (Eigen::Index j = 0; j < k; ++j) noise(r, j) = standard_normal(row_rng);
  }

  const Eigen::MatrixXd z = nn::reparam_sample(student.encode(x, src_groups), noise);
  const Eigen::MatrixXd dec_in = decoder_input(z, s, groups);
  const Eigen::MatrixXd probs = teacher.decode(z, dec_in.rightCols(groups));

  SyntheticDataset out;
  out.rows = data::decode_rows(probs, s, y, source.schema);
  out.data = data::encode_records(out.rows, source.schema);
  out.provenance.teacher_id = nn::parameter_hash(teacher.to_checkpoint());
  out.provenance.student_id = nn::parameter_hash(student.to_checkpoint());
  out.provenance.seed = opts.seed;
  out.provenance.n_out = n_out;
  out.provenance.resample_groups = opts.resample_groups;
  return out;
}

std::filesystem::path export_synthetic(const SyntheticDataset& sd, const std::filesystem::path& path) {
  data::CsvTable table;
  for (const auto& c : sd.data.schema.columns()) table.header.push_back(c.name);
  table.rows = sd.rows;
  data::write_csv(path, table);
  std::filesystem::path sidecar = path;
  sidecar.replace_extension(".provenance.json");
  std::ofstream os(sidecar, std::ios::binary);
  if (!os) throw Error(ErrorCode::IoError, "cannot write " + sidecar.string());
  os << sd.provenance.to_json().dump(2) << '\n';
  if (!os) throw Error(ErrorCode::IoError, "write failed for " + sidecar.string());
  return sidecar;
}

double mean_categorical_tv(const data::Dataset& a, const data::Dataset& b) {
  if (!(a.schema == b.schema)) throw Error(ErrorCode::SchemaMismatch, "datasets use different schemas");
  double total = 0.0;
  int count = 0;
  for (const auto& block : a.schema.blocks()) {
    if (a.schema.column(block.column).kind != data::ColumnKind::Categorical) continue;
    const auto off = static_cast<Eigen::Index>(block.offset);
    const auto w = static_cast<Eigen::Index>(block.width);
    const Eigen::RowVectorXd pa = a.x.middleCols(off, w).colwise().mean();
    const Eigen::RowVectorXd pb = b.x.middleCols(off, w).colwise().mean();
    total += 0.5 * (pa - pb).cwiseAbs().sum();
    ++count;
  }
  return count ? total / count : 0.0;
}

}  // namespace fairdistill::generate
