// SPDX-License-Identifier: Apache-2.0
#include "fairdistill/distill/quality_loss.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "fairdistill/error.hpp"

namespace fairdistill::distill {
namespace {

double sign(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

void check_shapes(const Matrix& z, const Matrix& zp) {
  if (z.rows() != zp.rows() || z.cols() != zp.cols()) {
    throw Error(ErrorCode::ShapeMismatch, "quality loss operands differ in shape");
  }
  if (z.rows() == 0) throw Error(ErrorCode::ShapeMismatch, "quality loss on empty batch");
}

}  // namespace

std::string to_string(QualityLoss kind) {
  switch (kind) {
    case QualityLoss::L1: return "l1";
    case QualityLoss::MSE: return "mse";
    case QualityLoss::Huber: return "huber";
    case QualityLoss::MeanDifference: return "mean-difference";
  }
  return "?";
}

QualityLoss quality_loss_from_string(const std::string& name) {
  std::string s = name;
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  std::replace(s.begin(), s.end(), '_', '-');
  if (s == "l1") return QualityLoss::L1;
  if (s == "mse") return QualityLoss::MSE;
  if (s == "huber") return QualityLoss::Huber;
  if (s == "mean-difference" || s == "meandifference") return QualityLoss::MeanDifference;
  throw Error(ErrorCode::InvalidConfig, "unknown quality loss '" + name + "'");
}

double huber(double residual, double delta) {
  const double a = std::abs(residual);
  return a <= delta ? 0.5 * residual * residual : delta * (a - 0.5 * delta);
}

double quality_loss(const Matrix& z, const Matrix& z_prime, QualityLoss kind, double delta) {
  check_shapes(z, z_prime);
  const double n = static_cast<double>(z.rows());
  double total = 0.0;
  for (Eigen::Index j = 0; j < z.cols(); ++j) {
    if (kind == QualityLoss::MeanDifference) {
      total += std::abs(z.col(j).mean() - z_prime.col(j).mean());
      continue;
    }
    double col = 0.0;
    for (Eigen::Index i = 0; i < z.rows(); ++i) {
      const double r = z(i, j) - z_prime(i, j);
      switch (kind) {
        case QualityLoss::L1: col += std::abs(r); break;
        case QualityLoss::MSE: col += r * r; break;
        case QualityLoss::Huber: col += huber(r, delta); break;
        case QualityLoss::MeanDifference: break;
      }
    }
    total += col / n;
  }
  return total;
}

nn::Var quality_loss(const Matrix& z, const nn::Var& z_prime, QualityLoss kind, double delta) {
  const Matrix& zp = z_prime.value();
  check_shapes(z, zp);
  if (kind == QualityLoss::Huber && !(delta > 0.0)) throw Error(ErrorCode::InvalidConfig, "huber delta must be > 0");
  Matrix value(1, 1);
  value(0, 0) = quality_loss(z, zp, kind, delta);
  const Matrix residual = z - zp;
  const double n = static_cast<double>(z.rows());
  return z_prime.tape()->record(
      std::move(value), {z_prime}, [z_prime, residual, kind, delta, n](nn::Tape& tape, const Matrix& g) {
        const double up = g(0, 0);
        Matrix d(residual.rows(), residual.cols());
        switch (kind) {
          case QualityLoss::L1: d = residual.unaryExpr([](double r) { return -sign(r); }); break;
          case QualityLoss::MSE: d = -2.0 * residual; break;
          case QualityLoss::Huber:
            d = residual.unaryExpr([delta](double r) { return std::abs(r) <= delta ? -r : -delta * sign(r); });
            break;
          case QualityLoss::MeanDifference: {
            const Eigen::RowVectorXd m = residual.colwise().mean();
            for (Eigen::Index j = 0; j < residual.cols(); ++j) d.col(j).setConstant(-sign(m(j)));
            break;
          }
        }
        tape.accumulate(z_prime, d * (up / n));
      });
}

double utility_kl(const nn::GaussianHead& head) {
  if (head.mu.rows() == 0) throw Error(ErrorCode::NonFiniteLoss, "utility KL on empty batch");
  const double kl = nn::gaussian_kl(head.mu, head.log_var);
  if (!std::isfinite(kl)) throw Error(ErrorCode::NonFiniteLoss, "utility KL not finite");
  return kl;
}

}  // namespace fairdistill::distill
