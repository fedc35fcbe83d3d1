// SPDX-License-Identifier: Apache-2.0
#include "fairdistill/eval/forest.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "fairdistill/error.hpp"
#include "fairdistill/rng.hpp"

namespace fairdistill::eval {
namespace {

double gini(double pos, double total) {
  if (total <= 0.0) return 0.0;
  const double p = pos / total;
  return 2.0 * p * (1.0 - p);
}

struct Split {
  int feature = -1;
  double threshold = 0.0;
  double score = 0.0;  // weighted child impurity
};

class Builder {
 public:
  Builder(const Eigen::MatrixXd& x, std::span<const int> y, const ForestConfig& cfg, int mtry, Rng& rng)
      : x_(x), y_(y), cfg_(cfg), mtry_(mtry), rng_(rng), importance_(static_cast<std::size_t>(x.cols()), 0.0) {
    features_.resize(static_cast<std::size_t>(x.cols()));
    std::iota(features_.begin(), features_.end(), 0);
  }

  void build(std::vector<std::size_t>& rows, std::vector<DecisionTree::Node>& out) {
    total_ = static_cast<double>(rows.size());
    grow(rows, 0, rows.size(), 0, out);
  }

  std::vector<double>& importance() { return importance_; }

 private:
  int grow(std::vector<std::size_t>& rows, std::size_t begin, std::size_t end, int depth,
           std::vector<DecisionTree::Node>& out) {
    const int id = static_cast<int>(out.size());
    out.emplace_back();
    double pos = 0.0;
    for (std::size_t i = begin; i < end; ++i) pos += y_[rows[i]];
    const double n = static_cast<double>(end - begin);
    out[static_cast<std::size_t>(id)].p1 = pos / n;
    if (depth >= cfg_.max_depth || end - begin < static_cast<std::size_t>(cfg_.min_samples_split) || pos == 0.0 ||
        pos == n) {
      return id;
    }
    const double parent = gini(pos, n);
    const Split best = find_split(rows, begin, end, pos, parent);
    if (best.feature < 0) return id;

    const auto f = static_cast<Eigen::Index>(best.feature);
    auto mid = std::partition(rows.begin() + static_cast<std::ptrdiff_t>(begin),
                              rows.begin() + static_cast<std::ptrdiff_t>(end),
                              [&](std::size_t r) { return x_(static_cast<Eigen::Index>(r), f) <= best.threshold; });
    const auto split_at = static_cast<std::size_t>(mid - rows.begin());
    importance_[static_cast<std::size_t>(best.feature)] += (n / total_) * (parent - best.score);

    out[static_cast<std::size_t>(id)].feature = best.feature;
    out[static_cast<std::size_t>(id)].threshold = best.threshold;
    const int left = grow(rows, begin, split_at, depth + 1, out);
    const int right = grow(rows, split_at, end, depth + 1, out);
    out[static_cast<std::size_t>(id)].left = left;
    out[static_cast<std::size_t>(id)].right = right;
    return id;
  }

  Split find_split(const std::vector<std::size_t>& rows, std::size_t begin, std::size_t end, double pos,
                   double parent) {
    shuffle(std::span<int>(features_), rng_);
    const double n = static_cast<double>(end - begin);
    Split best;
    best.score = parent;
    int tried = 0;
    for (int f : features_) {
      if (tried >= mtry_ && best.feature >= 0) break;
      const auto col = static_cast<Eigen::Index>(f);
      buf_.clear();
      double lo = std::numeric_limits<double>::infinity(), hi = -lo;
      for (std::size_t i = begin; i < end; ++i) {
        const double v = x_(static_cast<Eigen::Index>(rows[i]), col);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
        buf_.emplace_back(v, y_[rows[i]]);
      }
      if (lo == hi) continue;  // constant here: does not count as tried
      ++tried;
      if (two_valued(lo, hi)) {
        // One-hot columns: a single candidate split, no sort needed.
        double left_n = 0.0, left_pos = 0.0;
        for (const auto& [v, label] : buf_) {
          if (v == lo) {
            left_n += 1.0;
            left_pos += label;
          }
        }
        const double right_n = n - left_n;
        const double score = (left_n * gini(left_pos, left_n) + right_n * gini(pos - left_pos, right_n)) / n;
        if (score < best.score - 1e-15) {
          best.score = score;
          best.feature = f;
          best.threshold = 0.5 * (lo + hi);
          if (!(best.threshold < hi)) best.threshold = lo;
        }
        if (tried >= mtry_ && best.feature >= 0) break;
        continue;
      }
      std::sort(buf_.begin(), buf_.end());
      double left_n = 0.0, left_pos = 0.0;
      for (std::size_t i = 0; i + 1 < buf_.size(); ++i) {
        left_n += 1.0;
        left_pos += buf_[i].second;
        if (buf_[i].first == buf_[i + 1].first) continue;
        const double right_n = n - left_n;
        const double score = (left_n * gini(left_pos, left_n) + right_n * gini(pos - left_pos, right_n)) / n;
        if (score < best.score - 1e-15) {
          best.score = score;
          best.feature = f;
          best.threshold = 0.5 * (buf_[i].first + buf_[i + 1].first);
          if (!(best.threshold < buf_[i + 1].first)) best.threshold = buf_[i].first;
        }
      }
      if (tried >= mtry_ && best.feature >= 0) break;
    }
    return best;
  }

  bool two_valued(double lo, double hi) const {
    for (const auto& e : buf_) {
      if (e.first != lo && e.first != hi) return false;
    }
    return true;
  }

  const Eigen::MatrixXd& x_;
  std::span<const int> y_;
  const ForestConfig& cfg_;
  int mtry_;
  Rng& rng_;
  std::vector<double> importance_;
  std::vector<int> features_;
  std::vector<std::pair<double, int>> buf_;
  double total_ = 1.0;
};

}  // namespace

double DecisionTree::predict_proba(const double* row) const {
  int i = 0;
  while (nodes_[static_cast<std::size_t>(i)].feature >= 0) {
    const Node& node = nodes_[static_cast<std::size_t>(i)];
    i = row[node.feature] <= node.threshold ? node.left : node.right;
  }
  return nodes_[static_cast<std::size_t>(i)].p1;
}

int DecisionTree::depth() const {
  std::vector<int> d(nodes_.size(), 0);
  int best = 0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    best = std::max(best, d[i]);
    if (nodes_[i].feature >= 0) {
      d[static_cast<std::size_t>(nodes_[i].left)] = d[i] + 1;
      d[static_cast<std::size_t>(nodes_[i].right)] = d[i] + 1;
    }
  }
  return best;
}

TreeEnsemble TreeEnsemble::fit(const Eigen::MatrixXd& x, std::span<const int> y, const ForestConfig& cfg) {
  const auto n = static_cast<std::size_t>(x.rows());
  if (n == 0 || y.size() != n) throw Error(ErrorCode::InvalidArgument, "forest needs matching non-empty x and y");
  if (cfg.n_trees < 1 || cfg.max_depth < 0 || cfg.min_samples_split < 2) {
    throw Error(ErrorCode::InvalidConfig, "invalid forest configuration");
  }
  for (int v : y) {
    if (v != 0 && v != 1) throw Error(ErrorCode::InvalidArgument, "forest target must be binary");
  }
  const auto d = static_cast<int>(x.cols());
  const int mtry = cfg.mtry > 0 ? std::min(cfg.mtry, d) : static_cast<int>(std::ceil(std::sqrt(static_cast<double>(d))));

  TreeEnsemble forest;
  forest.features_ = static_cast<std::size_t>(d);
  const long positives = std::count(y.begin(), y.end(), 1);
  forest.degenerate_ = positives == 0 || positives == static_cast<long>(n);

  std::vector<std::size_t> rows(n);
  for (int t = 0; t < cfg.n_trees; ++t) {
    Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(t)));
    for (auto& r : rows) r = uniform_index(rng, n);
    Builder b(x, y, cfg, mtry, rng);
    DecisionTree tree;
    b.build(rows, tree.nodes_);
    std::vector<double> imp = std::move(b.importance());
    const double total = std::accumulate(imp.begin(), imp.end(), 0.0);
    if (total > 0.0) {
      for (auto& v : imp) v /= total;
    }
    forest.tree_importance_.push_back(std::move(imp));
    forest.trees_.push_back(std::move(tree));
  }
  return forest;
}

std::vector<double> TreeEnsemble::vote_share(const Eigen::MatrixXd& x) const {
  if (static_cast<std::size_t>(x.cols()) != features_) throw Error(ErrorCode::ShapeMismatch, "forest input width");
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> xr = x;
  std::vector<double> share(static_cast<std::size_t>(x.rows()), 0.0);
  for (Eigen::Index i = 0; i < xr.rows(); ++i) {
    int votes = 0;
    for (const auto& t : trees_) votes += t.predict_proba(xr.row(i).data()) > 0.5 ? 1 : 0;
    share[static_cast<std::size_t>(i)] = static_cast<double>(votes) / static_cast<double>(trees_.size());
  }
  return share;
}

std::vector<int> TreeEnsemble::predict(const Eigen::MatrixXd& x) const {
  if (static_cast<std::size_t>(x.cols()) != features_) throw Error(ErrorCode::ShapeMismatch, "forest input width");
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> xr = x;
  std::vector<int> out(static_cast<std::size_t>(x.rows()), 0);
  const std::size_t t = trees_.size();
  for (Eigen::Index i = 0; i < xr.rows(); ++i) {
    std::size_t votes = 0;
    double mean = 0.0;
    for (const auto& tree : trees_) {
      const double p = tree.predict_proba(xr.row(i).data());
      votes += p > 0.5 ? 1 : 0;
      mean += p;
    }
    int label = 0;
    if (2 * votes > t) {
      label = 1;
    } else if (2 * votes == t) {
      label = mean / static_cast<double>(t) > 0.5 ? 1 : 0;
    }
    out[static_cast<std::size_t>(i)] = label;
  }
  return out;
}

std::vector<double> TreeEnsemble::impurity_importance() const {
  std::vector<double> imp(features_, 0.0);
  for (const auto& ti : tree_importance_) {
    for (std::size_t f = 0; f < features_; ++f) imp[f] += ti[f];
  }
  const double total = std::accumulate(imp.begin(), imp.end(), 0.0);
  if (total <= 0.0) return std::vector<double>(features_, features_ ? 1.0 / static_cast<double>(features_) : 0.0);
  for (auto& v : imp) v /= total;
  return imp;
}

}  // namespace fairdistill::eval
