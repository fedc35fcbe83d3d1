// SPDX-License-Identifier: Apache-2.0
#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>
#include <string>

namespace oracle {

namespace {

std::vector<std::vector<double>> centered(const std::vector<std::vector<double>>& d) {
  const std::size_t n = d.size();
  std::vector<double> row(n, 0.0), col(n, 0.0);
  double grand = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      row[i] += d[i][j] / static_cast<double>(n);
      col[j] += d[i][j] / static_cast<double>(n);
      grand += d[i][j] / static_cast<double>(n * n);
    }
  }
  auto out = d;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) out[i][j] = d[i][j] - row[i] - col[j] + grand;
  }
  return out;
}

}  // namespace

double distance_covariance_sq(const Eigen::MatrixXd& z, const std::vector<int>& groups) {
  const auto n = static_cast<std::size_t>(z.rows());
  std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0)), b = a;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double acc = 0.0;
      for (Eigen::Index c = 0; c < z.cols(); ++c) {
        const double t = z(static_cast<Eigen::Index>(i), c) - z(static_cast<Eigen::Index>(j), c);
        acc += t * t;
      }
      a[i][j] = std::sqrt(acc);
      // Two distinct one-hot vectors are sqrt(2) apart.
      b[i][j] = groups[i] == groups[j] ? 0.0 : std::sqrt(2.0);
    }
  }
  const auto ac = centered(a), bc = centered(b);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) sum += ac[i][j] * bc[i][j];
  }
  return std::max(0.0, sum / static_cast<double>(n * n));
}

double bce(const Eigen::MatrixXd& logits, const Eigen::MatrixXd& targets) {
  long double total = 0.0L;
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    for (Eigen::Index j = 0; j < logits.cols(); ++j) {
      const long double p = 1.0L / (1.0L + std::exp(-static_cast<long double>(logits(i, j))));
      const long double t = targets(i, j);
      total += -(t * std::log(p) + (1.0L - t) * std::log(1.0L - p));
    }
  }
  return static_cast<double>(total / logits.rows());
}

double gaussian_kl(const Eigen::MatrixXd& mu, const Eigen::MatrixXd& log_var) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < mu.rows(); ++i) {
    for (Eigen::Index j = 0; j < mu.cols(); ++j) {
      total += 0.5 * (std::exp(log_var(i, j)) + mu(i, j) * mu(i, j) - 1.0 - log_var(i, j));
    }
  }
  return total / static_cast<double>(mu.rows());
}

double quality(const Eigen::MatrixXd& z, const Eigen::MatrixXd& zp, const std::string& kind, double delta) {
  const double n = static_cast<double>(z.rows());
  double total = 0.0;
  for (Eigen::Index j = 0; j < z.cols(); ++j) {
    if (kind == "mean-difference") {
      double mz = 0.0, mp = 0.0;
      for (Eigen::Index i = 0; i < z.rows(); ++i) {
        mz += z(i, j) / n;
        mp += zp(i, j) / n;
      }
      total += std::fabs(mz - mp);
      continue;
    }
    double col = 0.0;
    for (Eigen::Index i = 0; i < z.rows(); ++i) {
      const double r = z(i, j) - zp(i, j);
      if (kind == "l1") {
        col += std::fabs(r);
      } else if (kind == "mse") {
        col += r * r;
      } else if (kind == "huber") {
        col += std::fabs(r) <= delta ? r * r / 2.0 : delta * std::fabs(r) - delta * delta / 2.0;
      } else {
        throw std::invalid_argument(kind);
      }
    }
    total += col / n;
  }
  return total;
}

double dpr(const std::vector<int>& y_hat, const std::vector<int>& s) {
  std::map<int, std::pair<double, double>> g;  // positives, count
  for (std::size_t i = 0; i < s.size(); ++i) {
    g[s[i]].first += y_hat[i];
    g[s[i]].second += 1;
  }
  double best = 1.0;
  bool any_positive = false;
  for (const auto& [a, ca] : g) {
    for (const auto& [b, cb] : g) {
      if (a == b) continue;
      const double ra = ca.first / ca.second, rb = cb.first / cb.second;
      if (rb > 0) {
        any_positive = true;
        best = std::min(best, ra / rb);
      }
    }
  }
  return any_positive ? best : 1.0;
}

double eor(const std::vector<int>& y_hat, const std::vector<int>& y, const std::vector<int>& s) {
  // counts[group][true label][predicted label]
  std::map<int, double[2][2]> counts;
  for (std::size_t i = 0; i < s.size(); ++i) {
    auto& c = counts[s[i]];
    c[y[i]][y_hat[i]] += 1;
  }
  auto ratio = [&](int label) {
    std::vector<double> rates;
    for (auto& [g, c] : counts) {
      const double total = c[label][0] + c[label][1];
      if (total > 0) rates.push_back(c[label][1] / total);
    }
    double best = 1.0;
    for (double a : rates) {
      for (double b : rates) {
        if (b > 0) best = std::min(best, a / b);
      }
    }
    return best;
  };
  return std::min(ratio(1), ratio(0));
}

Counts density_coverage_counts(const Eigen::MatrixXd& real, const Eigen::MatrixXd& synth, int k) {
  auto dist = [](const Eigen::RowVectorXd& a, const Eigen::RowVectorXd& b) {
    double acc = 0.0;
    for (Eigen::Index c = 0; c < a.size(); ++c) acc += (a(c) - b(c)) * (a(c) - b(c));
    return std::sqrt(acc);
  };
  std::vector<double> radius;
  for (Eigen::Index i = 0; i < real.rows(); ++i) {
    std::vector<double> d;
    for (Eigen::Index j = 0; j < real.rows(); ++j) {
      if (i != j) d.push_back(dist(real.row(i), real.row(j)));
    }
    std::sort(d.begin(), d.end());
    radius.push_back(d[static_cast<std::size_t>(k - 1)]);
  }
  Counts c;
  for (Eigen::Index i = 0; i < real.rows(); ++i) {
    bool hit = false;
    for (Eigen::Index j = 0; j < synth.rows(); ++j) {
      if (dist(synth.row(j), real.row(i)) <= radius[static_cast<std::size_t>(i)]) {
        ++c.inside;
        hit = true;
      }
    }
    c.covered += hit ? 1 : 0;
  }
  return c;
}

Pca pca(const Eigen::MatrixXd& z, int dims) {
  const Eigen::MatrixXd c = z.rowwise() - z.colwise().mean();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(c, Eigen::ComputeThinV);
  const Eigen::VectorXd sv = svd.singularValues();
  Eigen::MatrixXd v = svd.matrixV().leftCols(dims);
  for (int d = 0; d < dims; ++d) {
    Eigen::Index arg = 0;
    v.col(d).cwiseAbs().maxCoeff(&arg);
    if (v(arg, d) < 0) v.col(d) *= -1.0;
  }
  Pca out;
  out.projection = c * v;
  const double total = sv.squaredNorm();
  for (int d = 0; d < dims; ++d) out.ratios.push_back(sv(d) * sv(d) / total);
  for (Eigen::Index d = dims; d < sv.size(); ++d) out.residual += sv(d) * sv(d);
  return out;
}

double central_difference(const std::function<double()>& f, double& x, double h) {
  const double saved = x;
  x = saved + h;
  const double up = f();
  x = saved - h;
  const double down = f();
  x = saved;
  return (up - down) / (2.0 * h);
}

bool close(double a, double b, double rel, double abs_floor) {
  return std::fabs(a - b) <= std::max(rel * std::max(std::fabs(a), std::fabs(b)), abs_floor);
}

}  // namespace oracle
