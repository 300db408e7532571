#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "glassbox/census.hpp"
#include "glassbox/common.hpp"
#include "glassbox/linear.hpp"
#include "glassbox/metrics.hpp"
#include "glassbox/tree.hpp"

namespace glassbox {

struct PermutationEntry {
  std::string feature;  // unit name: column name or one-hot source
  double mean_drop = 0.0;
  double stddev = 0.0;
};

struct PermutationReport {
  std::vector<PermutationEntry> ranking;  // mean drop descending, ties by name
  double baseline_auc = 0.0;
  int repeats = 0;
  std::uint64_t seed = 0;
};

// AUC drop per feature unit; one-hot groups are permuted jointly so every
// perturbed row keeps a valid group sum.
PermutationReport permutation_importance(const Predictor& f, const EncodedDataset& data,
                                         int repeats, std::uint64_t seed);

enum class SurrogateKind { decision_tree, logistic, self };

struct SurrogateConfig {
  int tree_max_depth = 5;
  std::size_t tree_min_samples_leaf = 50;
  LogisticConfig logistic{1e-4, 200, 1e-7};
};

struct SurrogateReport {
  SurrogateKind kind = SurrogateKind::decision_tree;
  double r2_train = 0.0;
  double r2_test = 0.0;
  MetricReport train_metrics;  // surrogate vs. true labels
  MetricReport test_metrics;
  bool accepted = false;  // both fidelity R^2 strictly positive
  TreeModel tree;
  LinearModel linear;
  std::string tree_text;
};

// Fidelity target is the black box probability. The decision tree regresses
// on it directly; the logistic surrogate trains on thresholded hard labels
// and its fidelity is measured on its class output, reproducing the
// negative-R^2 phenomenon. `self` scores the predictor against itself
// (test hook: fidelity exactly 1).
SurrogateReport fit_global_surrogate(const Predictor& f, const SplitPair& splits,
                                     SurrogateKind kind, const SurrogateConfig& config = {});

struct PickResult {
  std::vector<std::size_t> selected;     // pick order
  std::vector<double> coverage_steps;    // cumulative coverage after each pick
  double coverage = 0.0;
  std::size_t budget = 0;
};

// W: instances x features matrix of local explanation coefficients.
double splime_coverage(const Matrix& W, const std::vector<std::size_t>& picks);
PickResult sp_lime(const Matrix& W, std::size_t budget);
PickResult sp_lime_exact(const Matrix& W, std::size_t budget);  // refuses C(n,b) > 1e6

}  // namespace glassbox
