// SPDX-License-Identifier: Apache-2.0
#include "fairdistill/eval/fairness.hpp"

#include <algorithm>
#include <map>

#include "fairdistill/error.hpp"

namespace fairdistill::eval {
namespace {

void check_lengths(std::size_t a, std::size_t b) {
  if (a != b) throw Error(ErrorCode::ShapeMismatch, "prediction and label lengths differ");
}

// Ratio of the smallest to the largest rate; 1 (flagged) if all are zero.
void min_over_max(const std::vector<double>& rates, RatioResult& out) {
  if (rates.size() < 2) {
    out.value = 1.0;
    return;
  }
  const auto [lo, hi] = std::minmax_element(rates.begin(), rates.end());
  if (*hi == 0.0) {
    out.value = 1.0;
    out.degenerate = true;
    return;
  }
  out.value = *lo / *hi;
}

struct Counts {
  double n = 0, pred = 0, pos = 0, tp = 0, neg = 0, fp = 0;
};

std::map<int, Counts> tally(std::span<const int> y_hat, std::span<const int> y, std::span<const int> s) {
  std::map<int, Counts> groups;
  for (std::size_t i = 0; i < s.size(); ++i) {
    Counts& c = groups[s[i]];
    c.n += 1;
    c.pred += y_hat[i] == 1;
    if (!y.empty()) {
      if (y[i] == 1) {
        c.pos += 1;
        c.tp += y_hat[i] == 1;
      } else {
        c.neg += 1;
        c.fp += y_hat[i] == 1;
      }
    }
  }
  if (groups.size() < 2) throw Error(ErrorCode::SingleGroup, "fairness ratios need at least two groups");
  return groups;
}

}  // namespace

RatioResult demographic_parity_ratio(std::span<const int> y_hat, std::span<const int> s) {
  check_lengths(y_hat.size(), s.size());
  const auto groups = tally(y_hat, {}, s);
  std::vector<double> rates;
  for (const auto& [g, c] : groups) rates.push_back(c.pred / c.n);
  RatioResult out;
  min_over_max(rates, out);
  return out;
}

RatioResult equalized_odds_ratio(std::span<const int> y_hat, std::span<const int> y, std::span<const int> s) {
  check_lengths(y_hat.size(), s.size());
  check_lengths(y.size(), s.size());
  const auto positives = std::count(y.begin(), y.end(), 1);
  if (positives == 0 || positives == static_cast<long>(y.size())) {
    throw Error(ErrorCode::InvalidArgument, "equalized odds needs both classes in y");
  }
  const auto groups = tally(y_hat, y, s);
  std::vector<double> tpr, fpr;
  RatioResult out;
  for (const auto& [g, c] : groups) {
    const bool ok_pos = c.pos > 0, ok_neg = c.neg > 0;
    if (ok_pos) tpr.push_back(c.tp / c.pos);
    if (ok_neg) fpr.push_back(c.fp / c.neg);
    if (!ok_pos || !ok_neg) out.excluded_groups.push_back(g);
  }
  RatioResult t, f;
  min_over_max(tpr, t);
  min_over_max(fpr, f);
  out.value = std::min(t.value, f.value);
  out.degenerate = t.degenerate && f.degenerate;
  return out;
}

UtilityScores utility_scores(std::span<const int> y_hat, std::span<const int> y) {
  check_lengths(y_hat.size(), y.size());
  if (y.empty()) throw Error(ErrorCode::InvalidArgument, "utility scores on empty input");
  double tp = 0, fp = 0, fn = 0, correct = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    correct += y_hat[i] == y[i];
    tp += y_hat[i] == 1 && y[i] == 1;
    fp += y_hat[i] == 1 && y[i] == 0;
    fn += y_hat[i] == 0 && y[i] == 1;
  }
  UtilityScores u;
  u.accuracy = correct / static_cast<double>(y.size());
  u.precision = tp + fp > 0 ? tp / (tp + fp) : 0.0;
  u.recall = tp + fn > 0 ? tp / (tp + fn) : 0.0;
  u.f1 = u.precision + u.recall > 0 ? 2.0 * u.precision * u.recall / (u.precision + u.recall) : 0.0;
  return u;
}

}  // namespace fairdistill::eval
