// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "fairdistill/data/dataset.hpp"
#include "fairdistill/distill/quality_loss.hpp"
#include "fairdistill/fairvae/teacher.hpp"
#include "fairdistill/nn/adam.hpp"
#include "fairdistill/nn/checkpoint.hpp"

namespace fairdistill::distill {

/// Smaller encoder mapping [x | onehot(s)] to a k-dimensional Gaussian head.
struct StudentModel {
  nn::Mlp encoder;
  int latent_dim = 0;
  int groups = 0;

  nn::GaussianHead encode(const Matrix& features, const Matrix& group_onehot) const;

  nn::Checkpoint to_checkpoint() const;
  static StudentModel from_checkpoint(const nn::Checkpoint& ckpt);
};

struct DistillConfig {
  QualityLoss quality = QualityLoss::L1;
  double lambda = 1.0;
  double huber_delta = 1.0;
  int epochs = 100;
  int batch_size = 256;
  /// Empty means: half the teacher's hidden widths, one fewer hidden layer.
  std::vector<std::size_t> hidden;
  nn::AdamConfig optimizer;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Half of each teacher hidden width (at least 1), with the last layer dropped.
std::vector<std::size_t> default_student_hidden(const fairvae::TeacherModel& teacher);

/// Builds an untrained student. Throws InvalidConfig unless it has strictly
/// fewer parameters than the teacher encoder.
StudentModel make_student(const fairvae::TeacherModel& teacher, const DistillConfig& cfg);

struct DistillStep {
  double quality = 0.0;
  double kl = 0.0;
  double total = 0.0;
};

struct DistillEpoch {
  int epoch = 0;
  double quality = 0.0;
  double kl = 0.0;
  double total = 0.0;
};

struct DistillResult {
  StudentModel student;
  std::vector<DistillStep> steps;
  std::vector<DistillEpoch> trace;
  std::vector<double> epoch_seconds;
};

/// One distillation batch. Teacher and student samples share `noise`.
/// The returned loss is quality + lambda * kl as recorded on the tape.
struct DistillBatchLoss {
  nn::Var quality;
  nn::Var kl;
  nn::Var total;
};
DistillBatchLoss distill_loss(nn::Tape& tape, const fairvae::TeacherModel& teacher, StudentModel& student,
                              const Matrix& features, const Matrix& group_onehot, const Matrix& noise,
                              const DistillConfig& cfg);

/// Trains the student against the frozen teacher. Only student parameters
/// are updated; the teacher's parameter hash is compared before and after
/// (TeacherNotFrozen on mismatch).
DistillResult distill_student(const data::Dataset& d, const fairvae::TeacherModel& teacher, const DistillConfig& cfg);

/// Same as above, starting from a given student (its size is not checked).
DistillResult distill_student(const data::Dataset& d, const fairvae::TeacherModel& teacher, StudentModel student,
                              const DistillConfig& cfg);

/// Mean over rows and coordinates of |z - z'| with shared noise.
double mean_abs_latent_gap(const fairvae::TeacherModel& teacher, const StudentModel& student, const data::Dataset& d,
                           std::uint64_t seed);

}  // namespace fairdistill::distill
