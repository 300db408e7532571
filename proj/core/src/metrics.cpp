#include "glassbox/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace glassbox {

double mean(std::span<const double> values) {
  if (values.empty()) return 0.0;
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double auc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw validation_error("auc: size mismatch");
  std::size_t n = scores.size();
  std::size_t n_pos = 0;
  for (int y : labels) n_pos += static_cast<std::size_t>(y == 1);
  std::size_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0) throw validation_error("auc: needs both classes");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Average ranks within tied score runs, accumulate positive-class ranks.
  double rank_sum_pos = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    double avg_rank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j));  // 1-based
    for (std::size_t k = i; k < j; ++k)
      if (labels[order[k]] == 1) rank_sum_pos += avg_rank;
    i = j;
  }
  double u = rank_sum_pos - static_cast<double>(n_pos) * (static_cast<double>(n_pos) + 1.0) / 2.0;
  return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

MetricReport evaluate_scores(std::span<const double> probs, std::span<const int> labels,
                             double threshold) {
  if (probs.size() != labels.size()) throw validation_error("evaluate: size mismatch");
  if (probs.empty()) throw validation_error("evaluate: empty data");
  std::size_t tp = 0, tn = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    bool pred = probs[i] >= threshold;
    bool truth = labels[i] == 1;
    if (pred && truth)
      ++tp;
    else if (pred && !truth)
      ++fp;
    else if (!pred && truth)
      ++fn;
    else
      ++tn;
  }
  MetricReport report;
  report.threshold = threshold;
  double n = static_cast<double>(probs.size());
  report.accuracy = static_cast<double>(tp + tn) / n;
  report.precision = (tp + fp) ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
  report.recall = (tp + fn) ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
  report.f1 = (report.precision + report.recall > 0.0)
                  ? 2.0 * report.precision * report.recall / (report.precision + report.recall)
                  : 0.0;
  report.auc = auc(probs, labels);
  return report;
}

double r2_score(std::span<const double> y_true, std::span<const double> y_pred) {
  std::vector<double> w(y_true.size(), 1.0);
  return r2_score_weighted(y_true, y_pred, w);
}

double r2_score_weighted(std::span<const double> y_true, std::span<const double> y_pred,
                         std::span<const double> weights) {
  if (y_true.size() != y_pred.size() || y_true.size() != weights.size())
    throw validation_error("r2: size mismatch");
  if (y_true.empty()) throw validation_error("r2: empty data");
  double wsum = 0.0, wy = 0.0;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    wsum += weights[i];
    wy += weights[i] * y_true[i];
  }
  if (wsum <= 0.0) throw validation_error("r2: weights sum to zero");
  double ybar = wy / wsum;
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    double r = y_true[i] - y_pred[i];
    double d = y_true[i] - ybar;
    ss_res += weights[i] * r * r;
    ss_tot += weights[i] * d * d;
  }
  if (ss_tot == 0.0) return 0.0;
  return 1.0 - ss_res / ss_tot;
}

double log_loss(std::span<const int> labels, std::span<const double> probs) {
  if (labels.size() != probs.size()) throw validation_error("log_loss: size mismatch");
  if (labels.empty()) throw validation_error("log_loss: empty data");
  constexpr double eps = 1e-15;
  double total = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    double p = std::clamp(probs[i], eps, 1.0 - eps);
    total += labels[i] == 1 ? -std::log(p) : -std::log(1.0 - p);
  }
  return total / static_cast<double>(labels.size());
}

}  // namespace glassbox
