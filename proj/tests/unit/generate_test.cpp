// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <fstream>
#include <set>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "fairdistill/data/csv.hpp"
#include "fairdistill/error.hpp"
#include "fairdistill/generate/generate.hpp"
#include "fairdistill/rng.hpp"
#include "fixtures.hpp"

using namespace fairdistill;

namespace {

struct Models {
  fairvae::TeacherModel teacher;
  distill::StudentModel student;
};

Models tiny_models(int k = 3) {
  fairvae::FairVaeConfig tc;
  tc.latent_dim = k;
  tc.hidden = {8, 8};
  tc.seed = 1;
  Models m{fairvae::make_teacher(5, 2, tc), {}};
  distill::DistillConfig dc;
  m.student = distill::make_student(m.teacher, dc);
  return m;
}

}  // namespace

TEST(Generate, DecoderInputAppendsOneHot) {
  Eigen::MatrixXd z(2, 2);
  z << 1, 2, 3, 4;
  const std::vector<int> s{1, 0};
  const Eigen::MatrixXd in = generate::decoder_input(z, s, 3);
  Eigen::MatrixXd expected(2, 5);
  expected << 1, 2, 0, 1, 0, 3, 4, 1, 0, 0;
  EXPECT_EQ(in, expected);
  EXPECT_THROW(generate::decoder_input(z, std::vector<int>{0, 3}, 3), Error);
}

TEST(Generate, RowsAreValidUnderSchema) {
  const auto m = tiny_models();
  const auto source = fixtures::toy_dataset(60, 4);
  const auto sd = generate::generate_synthetic(source, m.student, m.teacher, {0, 7, false});
  ASSERT_EQ(sd.rows.size(), 60u);
  EXPECT_NO_THROW(sd.data.validate());
  EXPECT_EQ(sd.data.schema, source.schema);
  for (const auto& r : sd.rows) {
    const int age = std::stoi(r[0]);
    EXPECT_GE(age, 18);
    EXPECT_LE(age, 80);
    EXPECT_EQ(std::to_string(age), r[0]);
    EXPECT_TRUE(r[2] == "red" || r[2] == "green" || r[2] == "blue");
  }
}

TEST(Generate, KeepsSourceLabelsAndGroupsWithoutResampling) {
  const auto m = tiny_models();
  const auto source = fixtures::toy_dataset(50, 4);
  const auto sd = generate::generate_synthetic(source, m.student, m.teacher, {0, 7, false});
  // n_out == n picks a permutation, so label and group counts are preserved
  auto count = [](const std::vector<int>& v, int c) { return std::count(v.begin(), v.end(), c); };
  EXPECT_EQ(count(sd.data.y, 1), count(source.y, 1));
  EXPECT_EQ(count(sd.data.s, 1), count(source.s, 1));
}

TEST(Generate, LargerOutputSamplesWithReplacement) {
  const auto m = tiny_models();
  const auto source = fixtures::toy_dataset(20, 4);
  const auto sd = generate::generate_synthetic(source, m.student, m.teacher, {75, 3, true});
  EXPECT_EQ(sd.rows.size(), 75u);
  EXPECT_EQ(sd.provenance.n_out, 75u);
  EXPECT_TRUE(sd.provenance.resample_groups);
}

TEST(Generate, DeterministicAndSeedSensitive) {
  const auto m = tiny_models();
  const auto source = fixtures::toy_dataset(40, 4);
  const auto a = generate::generate_synthetic(source, m.student, m.teacher, {0, 7, true});
  const auto b = generate::generate_synthetic(source, m.student, m.teacher, {0, 7, true});
  const auto c = generate::generate_synthetic(source, m.student, m.teacher, {0, 8, true});
  EXPECT_EQ(a.rows, b.rows);
  EXPECT_NE(a.rows, c.rows);
}

TEST(Generate, PrefixStableWhenOutputGrowsBeyondSource) {
  // per-row noise streams are keyed by row index
  const auto m = tiny_models();
  const auto source = fixtures::toy_dataset(30, 4);
  const auto a = generate::generate_synthetic(source, m.student, m.teacher, {40, 2, false});
  const auto b = generate::generate_synthetic(source, m.student, m.teacher, {60, 2, false});
  for (std::size_t i = 0; i < 40; ++i) EXPECT_EQ(a.rows[i], b.rows[i]);
}

TEST(Generate, LatentMismatchIsRejected) {
  auto m = tiny_models(3);
  const auto other = tiny_models(4);
  try {
    generate::generate_synthetic(fixtures::toy_dataset(10, 1), other.student, m.teacher, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::LatentDimMismatch);
  }
}

TEST(Generate, ProvenanceIdentifiesModels) {
  const auto m = tiny_models();
  const auto sd = generate::generate_synthetic(fixtures::toy_dataset(10, 1), m.student, m.teacher, {0, 5, false});
  EXPECT_EQ(sd.provenance.teacher_id, nn::parameter_hash(m.teacher.to_checkpoint()));
  EXPECT_EQ(sd.provenance.student_id, nn::parameter_hash(m.student.to_checkpoint()));
  EXPECT_NE(sd.provenance.teacher_id, sd.provenance.student_id);
  const auto back = generate::Provenance::from_json(sd.provenance.to_json());
  EXPECT_EQ(back.to_json(), sd.provenance.to_json());
}

TEST(Generate, ExportWritesCsvAndSidecar) {
  fixtures::TempDir dir("generate");
  const auto m = tiny_models();
  const auto sd = generate::generate_synthetic(fixtures::toy_dataset(12, 1), m.student, m.teacher, {0, 5, false});
  const auto sidecar = generate::export_synthetic(sd, dir.path() / "synthetic.csv");
  EXPECT_EQ(sidecar.filename(), "synthetic.provenance.json");
  const auto table = data::read_csv(dir.path() / "synthetic.csv");
  EXPECT_EQ(table.header, (data::CsvRow{"age", "hours", "color", "sex", "income"}));
  EXPECT_EQ(table.rows, sd.rows);
  std::ifstream in(sidecar);
  const auto j = nlohmann::json::parse(in);
  EXPECT_EQ(j.at("teacher"), sd.provenance.teacher_id);
  EXPECT_EQ(j.at("n_out"), 12);
}

TEST(Generate, CategoricalTvZeroForSelf) {
  const auto d = fixtures::toy_dataset(30, 2);
  EXPECT_EQ(generate::mean_categorical_tv(d, d), 0.0);
  const auto e = fixtures::toy_dataset(30, 3);
  const double tv = generate::mean_categorical_tv(d, e);
  EXPECT_GE(tv, 0.0);
  EXPECT_LE(tv, 1.0);
}

TEST(Generate, CategoricalMarginalsBeatUniformRows) {
  auto records = fixtures::toy_records(600, 12);
  Rng rng(5);
  for (auto& r : records) r[2] = uniform01(rng) < 0.7 ? "red" : (uniform01(rng) < 0.5 ? "green" : "blue");
  const auto source = data::encode_records(records, fixtures::toy_schema());

  fairvae::FairVaeConfig tc;
  tc.latent_dim = 3;
  tc.hidden = {16, 16};
  tc.epochs = 15;
  tc.batch_size = 32;
  tc.beta = 1.0;
  tc.seed = 2;
  const auto teacher = fairvae::train_teacher(source, tc).model;
  distill::DistillConfig dc;
  dc.epochs = 15;
  dc.batch_size = 32;
  dc.seed = 3;
  const auto student = distill::distill_student(source, teacher, dc).student;
  const auto sd = generate::generate_synthetic(source, student, teacher, {0, 4, false});

  const char* colors[] = {"red", "green", "blue"};
  auto uniform = records;
  for (auto& r : uniform) r[2] = colors[uniform_index(rng, 3)];
  const auto uniform_data = data::encode_records(uniform, fixtures::toy_schema());
  EXPECT_LT(generate::mean_categorical_tv(sd.data, source), generate::mean_categorical_tv(uniform_data, source));
}
