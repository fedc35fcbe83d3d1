// SPDX-License-Identifier: Apache-2.0
#include "fairdistill/distill/student.hpp"

#include <chrono>
#include <cmath>
#include <numeric>

#include "fairdistill/error.hpp"
#include "fairdistill/rng.hpp"

namespace fairdistill::distill {
namespace {

Matrix hstack(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows(), a.cols() + b.cols());
  out << a, b;
  return out;
}

std::string teacher_hash(const fairvae::TeacherModel& t) {
  return nn::parameter_hash(t.encoder) + nn::parameter_hash(t.decoder);
}

}  // namespace

nn::GaussianHead StudentModel::encode(const Matrix& features, const Matrix& group_onehot) const {
  return nn::split_head(encoder.forward(hstack(features, group_onehot)));
}

nn::Checkpoint StudentModel::to_checkpoint() const {
  nn::Checkpoint c;
  c.latent_dim = latent_dim;
  c.networks.emplace("encoder", encoder);
  c.meta = {{"role", "student"}, {"groups", groups}};
  return c;
}

StudentModel StudentModel::from_checkpoint(const nn::Checkpoint& ckpt) {
  if (!ckpt.networks.contains("encoder")) throw Error(ErrorCode::CheckpointFormat, "student checkpoint needs an encoder");
  StudentModel s;
  s.encoder = ckpt.networks.at("encoder");
  s.latent_dim = ckpt.latent_dim;
  s.groups = ckpt.meta.value("groups", 0);
  if (s.encoder.output_width() != 2 * s.latent_dim) {
    throw Error(ErrorCode::CheckpointFormat, "student encoder output is not 2k wide");
  }
  return s;
}

void DistillConfig::validate() const {
  auto bad = [](const std::string& m) { throw Error(ErrorCode::InvalidConfig, m); };
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) bad("lambda must be >= 0");
  if (!(huber_delta > 0.0) || !std::isfinite(huber_delta)) bad("huber_delta must be > 0");
  if (epochs < 1) bad("epochs must be >= 1");
  if (batch_size < 1) bad("batch_size must be >= 1");
  for (auto h : hidden) {
    if (h == 0) bad("hidden widths must be positive");
  }
}

std::vector<std::size_t> default_student_hidden(const fairvae::TeacherModel& teacher) {
  std::vector<std::size_t> widths;
  const auto& layers = teacher.encoder.layers();
  for (std::size_t i = 0; i + 1 < layers.size(); ++i) {
    widths.push_back(std::max<std::size_t>(1, static_cast<std::size_t>(layers[i].outputs()) / 2));
  }
  if (!widths.empty()) widths.pop_back();
  return widths;
}

StudentModel make_student(const fairvae::TeacherModel& teacher, const DistillConfig& cfg) {
  cfg.validate();
  Rng init(derive_seed(cfg.seed, 1));
  std::vector<std::size_t> widths{static_cast<std::size_t>(teacher.encoder.input_width())};
  const auto hidden = cfg.hidden.empty() ? default_student_hidden(teacher) : cfg.hidden;
  widths.insert(widths.end(), hidden.begin(), hidden.end());
  widths.push_back(static_cast<std::size_t>(2 * teacher.latent_dim));
  StudentModel s;
  s.encoder = nn::Mlp::create(widths, nn::Activation::Relu, nn::Activation::Identity, init, "student");
  s.latent_dim = teacher.latent_dim;
  s.groups = teacher.groups;
  if (s.encoder.parameter_count() >= teacher.encoder.parameter_count()) {
    throw Error(ErrorCode::InvalidConfig, "student encoder must have fewer parameters than the teacher encoder (" +
                                              std::to_string(s.encoder.parameter_count()) + " >= " +
                                              std::to_string(teacher.encoder.parameter_count()) + ")");
  }
  return s;
}

DistillBatchLoss distill_loss(nn::Tape& tape, const fairvae::TeacherModel& teacher, StudentModel& student,
                              const Matrix& features, const Matrix& group_onehot, const Matrix& noise,
                              const DistillConfig& cfg) {
  const Matrix input = hstack(features, group_onehot);
  const Matrix z = nn::reparam_sample(nn::split_head(teacher.encoder.forward(input)), noise);
  const nn::Var head = student.encoder.forward(tape, tape.constant(input));
  const Eigen::Index k = student.latent_dim;
  const nn::Var mu = nn::slice_cols(head, 0, k);
  const nn::Var log_var = nn::slice_cols(head, k, k);
  const nn::Var z_prime = nn::reparameterize(mu, log_var, noise);
  DistillBatchLoss out;
  out.quality = quality_loss(z, z_prime, cfg.quality, cfg.huber_delta);
  out.kl = nn::gaussian_kl(mu, log_var);
  out.total = nn::add(out.quality, nn::scale(out.kl, cfg.lambda));
  return out;
}

DistillResult distill_student(const data::Dataset& d, const fairvae::TeacherModel& teacher, const DistillConfig& cfg) {
  return distill_student(d, teacher, make_student(teacher, cfg), cfg);
}

DistillResult distill_student(const data::Dataset& d, const fairvae::TeacherModel& teacher, StudentModel student,
                              const DistillConfig& cfg) {
  cfg.validate();
  if (student.latent_dim != teacher.latent_dim) {
    throw Error(ErrorCode::LatentDimMismatch, "student and teacher latent widths differ");
  }
  if (d.rows() == 0) throw Error(ErrorCode::InvalidArgument, "distillation needs data");
  const std::string frozen = teacher_hash(teacher);

  DistillResult result;
  result.student = std::move(student);
  StudentModel& st = result.student;
  const std::vector<nn::Parameter*> params = st.encoder.parameters();
  nn::AdamState adam;
  Rng rng(derive_seed(cfg.seed, 2));
  const Matrix onehot = d.group_onehot();

  std::vector<std::size_t> order(d.rows());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto batch = static_cast<std::size_t>(cfg.batch_size);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const auto started = std::chrono::steady_clock::now();
    shuffle(std::span<std::size_t>(order), rng);
    DistillEpoch acc;
    acc.epoch = epoch;
    int batches = 0;
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t len = std::min(batch, order.size() - start);
      Matrix x(static_cast<Eigen::Index>(len), d.x.cols());
      Matrix s(static_cast<Eigen::Index>(len), onehot.cols());
      for (std::size_t i = 0; i < len; ++i) {
        x.row(static_cast<Eigen::Index>(i)) = d.x.row(static_cast<Eigen::Index>(order[start + i]));
        s.row(static_cast<Eigen::Index>(i)) = onehot.row(static_cast<Eigen::Index>(order[start + i]));
      }
      const Matrix noise = nn::standard_normal_matrix(static_cast<Eigen::Index>(len), st.latent_dim, rng);

      nn::Tape tape;
      const DistillBatchLoss loss = distill_loss(tape, teacher, st, x, s, noise, cfg);
      const DistillStep step{loss.quality.scalar(), loss.kl.scalar(), loss.total.scalar()};
      if (!std::isfinite(step.total)) {
        throw Error(ErrorCode::NonFiniteLoss, "distillation loss not finite at epoch " + std::to_string(epoch) +
                                                  " batch " + std::to_string(batches));
      }
      tape.backward(loss.total);
      nn::adam_step(params, adam, cfg.optimizer);

      result.steps.push_back(step);
      acc.quality += step.quality;
      acc.kl += step.kl;
      acc.total += step.total;
      ++batches;
    }
    const double n = static_cast<double>(std::max(batches, 1));
    acc.quality /= n;
    acc.kl /= n;
    acc.total /= n;
    result.trace.push_back(acc);
    result.epoch_seconds.push_back(
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count());
  }
  if (teacher_hash(teacher) != frozen) throw Error(ErrorCode::TeacherNotFrozen, "teacher parameters changed");
  return result;
}

double mean_abs_latent_gap(const fairvae::TeacherModel& teacher, const StudentModel& student, const data::Dataset& d,
                           std::uint64_t seed) {
  if (d.rows() == 0) return 0.0;
  Rng rng(seed);
  const Matrix s = d.group_onehot();
  const Matrix noise = nn::standard_normal_matrix(static_cast<Eigen::Index>(d.rows()), teacher.latent_dim, rng);
  const Matrix z = nn::reparam_sample(teacher.encode(d.x, s), noise);
  const Matrix zp = nn::reparam_sample(student.encode(d.x, s), noise);
  return (z - zp).cwiseAbs().mean();
}

}  // namespace fairdistill::distill
