// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <functional>

#include <gtest/gtest.h>

#include "fairdistill/error.hpp"
#include "fairdistill/nn/tape.hpp"
#include "fairdistill/rng.hpp"
#include "oracles.hpp"

using namespace fairdistill;
using namespace fairdistill::nn;

namespace {

Matrix random_matrix(Eigen::Index r, Eigen::Index c, Rng& rng) {
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = 2.0 * uniform01(rng) - 1.0;
  }
  return m;
}

// Builds loss(p) on a fresh tape; checks p.grad against central differences.
void check_gradient(Parameter& p, const std::function<Var(Tape&, const Var&)>& build) {
  {
    Tape tape;
    const Var loss = build(tape, tape.parameter(p));
    tape.backward(loss);
  }
  const Matrix analytic = p.grad;
  auto eval = [&] {
    Tape tape;
    return build(tape, tape.constant(p.value)).scalar();
  };
  for (Eigen::Index i = 0; i < p.value.rows(); ++i) {
    for (Eigen::Index j = 0; j < p.value.cols(); ++j) {
      const double numeric = oracle::central_difference(eval, p.value(i, j));
      EXPECT_TRUE(oracle::close(analytic(i, j), numeric, 1e-4, 1e-6))
          << "entry (" << i << "," << j << ") analytic " << analytic(i, j) << " numeric " << numeric;
    }
  }
}

}  // namespace

TEST(Tape, ElementaryOpGradients) {
  Rng rng(1);
  Parameter a{"a", random_matrix(3, 4, rng), {}};
  const Matrix w = random_matrix(4, 2, rng);
  const Matrix bias = random_matrix(1, 2, rng);
  check_gradient(a, [&](Tape& t, const Var& x) {
    const Var h = add_bias(matmul(x, t.constant(w)), t.constant(bias));
    return sum(scale(sigmoid(relu(h)), 2.5));
  });
  const Matrix side = random_matrix(3, 2, rng);
  check_gradient(a, [&](Tape& t, const Var& x) {
    const Var cat = hcat(x, t.constant(side));
    return sum(slice_cols(add(cat, cat), 1, 4));
  });
}

TEST(Tape, MatmulGradientOnRightOperand) {
  Rng rng(2);
  Parameter w{"w", random_matrix(3, 2, rng), {}};
  const Matrix x = random_matrix(5, 3, rng);
  check_gradient(w, [&](Tape& t, const Var& wv) { return sum(sigmoid(matmul(t.constant(x), wv))); });
}

TEST(Tape, BceAndKlMatchFormulaOracles) {
  Rng rng(3);
  const Matrix logits = random_matrix(4, 6, rng) * 3.0;
  Matrix targets = random_matrix(4, 6, rng).cwiseAbs();
  targets(0, 0) = 0.0;
  targets(1, 1) = 1.0;
  EXPECT_NEAR(bce_with_logits(logits, targets), oracle::bce(logits, targets), 1e-10);
  const Matrix mu = random_matrix(4, 3, rng), lv = random_matrix(4, 3, rng);
  EXPECT_NEAR(gaussian_kl(mu, lv), oracle::gaussian_kl(mu, lv), 1e-12);
}

TEST(Tape, BceStableForLargeLogits) {
  Matrix logits(1, 2);
  logits << 800.0, -800.0;
  Matrix t(1, 2);
  t << 1.0, 0.0;
  EXPECT_NEAR(bce_with_logits(logits, t), 0.0, 1e-12);
  t << 0.0, 1.0;
  EXPECT_NEAR(bce_with_logits(logits, t), 1600.0, 1e-9);
}

TEST(Tape, BceKlAndReparameterizeGradients) {
  Rng rng(4);
  Parameter logits{"l", random_matrix(3, 5, rng), {}};
  const Matrix targets = random_matrix(3, 5, rng).cwiseAbs();
  check_gradient(logits, [&](Tape&, const Var& x) { return bce_with_logits(x, targets); });

  Parameter head{"h", random_matrix(4, 6, rng), {}};
  const Matrix noise = random_matrix(4, 3, rng);
  check_gradient(head, [&](Tape&, const Var& h) {
    const Var mu = slice_cols(h, 0, 3), lv = slice_cols(h, 3, 3);
    return add(gaussian_kl(mu, lv), sum(reparameterize(mu, lv, noise)));
  });
}

TEST(Tape, KlZeroExactlyAtPrior) {
  const Matrix zero = Matrix::Zero(3, 4);
  EXPECT_EQ(gaussian_kl(zero, zero), 0.0);
  Matrix mu = zero;
  mu(0, 0) = 1e-6;
  EXPECT_GT(gaussian_kl(mu, zero), 0.0);
  Matrix lv = zero;
  lv(2, 1) = -1e-5;
  EXPECT_GT(gaussian_kl(zero, lv), 0.0);
}

TEST(Tape, SecondBackwardIsStale) {
  Parameter p{"p", Matrix::Ones(1, 1), {}};
  Tape tape;
  const Var loss = sum(tape.parameter(p));
  tape.backward(loss);
  EXPECT_EQ(p.grad(0, 0), 1.0);
  try {
    tape.backward(loss);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::StaleTape);
  }
}

TEST(Tape, NonFiniteLossRejected) {
  Parameter p{"p", Matrix::Constant(1, 1, std::numeric_limits<double>::infinity()), {}};
  Tape tape;
  const Var loss = sum(tape.parameter(p));
  try {
    tape.backward(loss);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonFiniteLoss);
  }
}

TEST(Tape, ShapeMismatchOnBadMatmul) {
  Tape tape;
  const Var a = tape.constant(Matrix::Ones(2, 3));
  const Var b = tape.constant(Matrix::Ones(2, 3));
  try {
    matmul(a, b);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ShapeMismatch);
  }
}

TEST(Tape, GradientAccumulatesOverSharedUses) {
  Parameter p{"p", Matrix::Constant(1, 1, 3.0), {}};
  Tape tape;
  const Var x = tape.parameter(p);
  const Var loss = sum(add(scale(x, 2.0), x));
  tape.backward(loss);
  EXPECT_DOUBLE_EQ(p.grad(0, 0), 3.0);
}
