#pragma once

#include <span>
#include <vector>

#include "glassbox/common.hpp"

namespace glassbox {

struct MetricReport {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double auc = 0.0;
  double threshold = 0.5;
};

// Mann-Whitney AUC, sort-based with average ranks for ties (ties count 1/2).
// Throws if labels contain a single class.
double auc(std::span<const double> scores, std::span<const int> labels);

// Threshold metrics plus AUC. Ties at the threshold classify positive.
// precision/recall are defined as 0 when their denominator is 0.
MetricReport evaluate_scores(std::span<const double> probs, std::span<const int> labels,
                             double threshold = 0.5);

// Coefficient of determination; predicting the mean scores exactly 0.
// A constant target is a degenerate case, documented as 0.
double r2_score(std::span<const double> y_true, std::span<const double> y_pred);
double r2_score_weighted(std::span<const double> y_true, std::span<const double> y_pred,
                         std::span<const double> weights);

double log_loss(std::span<const int> labels, std::span<const double> probs);

double mean(std::span<const double> values);

}  // namespace glassbox
