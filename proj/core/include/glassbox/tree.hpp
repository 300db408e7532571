#pragma once

#include <span>
#include <string>
#include <vector>

#include "glassbox/common.hpp"

namespace glassbox {

struct TreeNode {
  int feature = -1;  // -1 for leaves
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;  // mean target at the node
  double gain = 0.0;   // impurity decrease of the split
  std::size_t n = 0;
};

struct TreeConfig {
  int max_depth = 4;
  std::size_t min_samples_leaf = 1;
};

// Greedy CART. Criterion is Gini when every target is exactly 0 or 1,
// variance otherwise (regression on probabilities for surrogate mode).
// Split ties break to the lowest feature index, then lowest threshold.
class TreeModel {
 public:
  static TreeModel fit(const Matrix& X, std::span<const double> targets, TreeConfig config);

  double predict_row(std::span<const double> row) const;
  std::vector<double> predict(const Matrix& X) const;
  Predictor predictor() const;

  const std::vector<TreeNode>& nodes() const { return nodes_; }
  const TreeConfig& config() const { return config_; }
  bool classification() const { return classification_; }

  // Root feature of the fitted tree, -1 if a single leaf.
  int root_feature() const { return nodes_.empty() ? -1 : nodes_[0].feature; }

  // Indented text rendering of the split structure.
  std::string render_text(const std::vector<std::string>& feature_names) const;

 private:
  std::vector<TreeNode> nodes_;
  TreeConfig config_;
  bool classification_ = false;
};

}  // namespace glassbox
