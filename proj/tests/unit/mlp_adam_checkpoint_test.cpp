// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <fstream>

#include <gtest/gtest.h>

#include "fairdistill/error.hpp"
#include "fairdistill/nn/adam.hpp"
#include "fairdistill/nn/checkpoint.hpp"
#include "fairdistill/nn/mlp.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace fairdistill;
using namespace fairdistill::nn;

namespace {

Mlp tiny_net() {
  DenseLayer l1;
  l1.weight = {"w1", Matrix(2, 2), {}};
  l1.weight.value << 1.0, -1.0, 0.5, 2.0;
  l1.bias = {"b1", Matrix(1, 2), {}};
  l1.bias.value << 0.0, -3.0;
  l1.activation = Activation::Relu;
  DenseLayer l2;
  l2.weight = {"w2", Matrix(2, 1), {}};
  l2.weight.value << 2.0, 1.0;
  l2.bias = {"b2", Matrix(1, 1), {}};
  l2.bias.value << 0.5;
  l2.activation = Activation::Identity;
  return Mlp({l1, l2});
}

}  // namespace

TEST(Mlp, HandComputedForward) {
  Matrix x(2, 2);
  x << 1.0, 2.0,   // h = relu([1+1, -1+4-3]) = [2, 0] -> 4.5
      -2.0, 4.0;   // h = relu([-2+2, 2+8-3]) = [0, 7] -> 7.5
  const Matrix y = tiny_net().forward(x);
  EXPECT_DOUBLE_EQ(y(0, 0), 4.5);
  EXPECT_DOUBLE_EQ(y(1, 0), 7.5);
}

TEST(Mlp, TapeForwardMatchesPlainForward) {
  Rng rng(3);
  const std::vector<std::size_t> widths{5, 7, 4};
  Mlp net = Mlp::create(widths, Activation::Relu, Activation::Sigmoid, rng);
  const Matrix x = standard_normal_matrix(6, 5, rng);
  Tape tape;
  const Var out = net.forward(tape, tape.constant(x));
  EXPECT_TRUE(out.value().isApprox(net.forward(x), 1e-15));
  EXPECT_EQ(net.parameter_count(), 5u * 7 + 7 + 7 * 4 + 4);
}

TEST(Mlp, RejectsWidthsThatDoNotChain) {
  Mlp good = tiny_net();
  auto layers = good.layers();
  layers[1].weight.value = Matrix::Zero(3, 1);
  try {
    Mlp bad(layers);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ShapeMismatch);
  }
  try {
    good.forward(Matrix::Zero(1, 3));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ShapeMismatch);
  }
}

TEST(Mlp, NonFiniteActivationDetected) {
  Mlp net = tiny_net();
  Matrix x(1, 2);
  x << std::numeric_limits<double>::quiet_NaN(), 0.0;
  try {
    net.forward(x);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonFiniteActivation);
  }
}

TEST(Mlp, ParameterGradientsMatchFiniteDifferences) {
  Rng rng(8);
  const std::vector<std::size_t> widths{3, 4, 2};
  Mlp net = Mlp::create(widths, Activation::Relu, Activation::Sigmoid, rng);
  const Matrix x = standard_normal_matrix(5, 3, rng);
  auto params = net.parameters();
  {
    Tape tape;
    tape.backward(sum(net.forward(tape, tape.constant(x))));
  }
  std::vector<Matrix> analytic;
  for (auto* p : params) analytic.push_back(p->grad);
  auto eval = [&] { return net.forward(x).sum(); };
  for (std::size_t k = 0; k < params.size(); ++k) {
    for (Eigen::Index i = 0; i < params[k]->value.rows(); ++i) {
      for (Eigen::Index j = 0; j < params[k]->value.cols(); ++j) {
        const double numeric = oracle::central_difference(eval, params[k]->value(i, j));
        EXPECT_TRUE(oracle::close(analytic[k](i, j), numeric, 1e-4, 1e-6)) << params[k]->name;
      }
    }
  }
}

TEST(Adam, MatchesHandRolledRecurrence) {
  Parameter p{"p", Matrix(1, 2), Matrix(1, 2)};
  p.value << 1.0, -2.0;
  const AdamConfig cfg{0.01, 0.9, 0.999, 1e-8};
  AdamState state;
  double theta[2] = {1.0, -2.0}, m[2] = {0, 0}, v[2] = {0, 0};
  Parameter* ptrs[] = {&p};
  for (int t = 1; t <= 5; ++t) {
    const double g[2] = {0.3 * t, -0.1 * t * t};
    p.grad << g[0], g[1];
    adam_step(ptrs, state, cfg);
    for (int i = 0; i < 2; ++i) {
      m[i] = 0.9 * m[i] + 0.1 * g[i];
      v[i] = 0.999 * v[i] + 0.001 * g[i] * g[i];
      const double mh = m[i] / (1 - std::pow(0.9, t));
      const double vh = v[i] / (1 - std::pow(0.999, t));
      theta[i] -= 0.01 * mh / (std::sqrt(vh) + 1e-8);
    }
    EXPECT_NEAR(p.value(0, 0), theta[0], 1e-14);
    EXPECT_NEAR(p.value(0, 1), theta[1], 1e-14);
  }
}

TEST(Adam, RejectsBadLearningRate) {
  Parameter p{"p", Matrix::Zero(1, 1), Matrix::Zero(1, 1)};
  Parameter* ptrs[] = {&p};
  AdamState s;
  try {
    adam_step(ptrs, s, AdamConfig{0.0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidArgument);
  }
}

TEST(Checkpoint, RoundTripIsExactAndHashStable) {
  fixtures::TempDir tmp("ckpt");
  Rng rng(12);
  const std::vector<std::size_t> widths{4, 6, 2};
  Checkpoint c;
  c.latent_dim = 1;
  c.networks.emplace("encoder", Mlp::create(widths, Activation::Relu, Activation::Identity, rng));
  c.meta = {{"note", "x"}};
  save_checkpoint(tmp.path() / "c.json", c);
  const Checkpoint back = load_checkpoint(tmp.path() / "c.json");
  const auto& a = c.networks.at("encoder").layers();
  const auto& b = back.networks.at("encoder").layers();
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].weight.value, b[i].weight.value);
    EXPECT_EQ(a[i].bias.value, b[i].bias.value);
    EXPECT_EQ(a[i].activation, b[i].activation);
  }
  EXPECT_EQ(parameter_hash(c), parameter_hash(back));
  save_checkpoint(tmp.path() / "d.json", back);
  std::ifstream f1(tmp.path() / "c.json"), f2(tmp.path() / "d.json");
  const std::string s1((std::istreambuf_iterator<char>(f1)), {}), s2((std::istreambuf_iterator<char>(f2)), {});
  EXPECT_EQ(s1, s2);

  c.networks.at("encoder").layers()[0].weight.value(0, 0) += 1e-12;
  EXPECT_NE(parameter_hash(c), parameter_hash(back));
}

TEST(Checkpoint, CorruptFileRejected) {
  fixtures::TempDir tmp("ckpt");
  std::ofstream(tmp.path() / "bad.json") << "{\"format\": \"something-else\"}";
  try {
    load_checkpoint(tmp.path() / "bad.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::CheckpointFormat);
  }
  try {
    load_checkpoint(tmp.path() / "missing.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::IoError);
  }
}
