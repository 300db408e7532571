#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "glassbox/census.hpp"
#include "glassbox/common.hpp"

namespace glassbox {

struct GbtConfig {
  int n_trees = 200;
  int max_depth = 4;
  double learning_rate = 0.1;
  double min_child_weight = 10.0;  // minimum hessian sum per child
  double subsample = 1.0;
  std::uint64_t subsample_seed = 0;
};

struct GbtNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;  // leaf step, learning rate already applied
  double gain = 0.0;
};

struct GbtTree {
  std::vector<GbtNode> nodes;
  double predict_row(std::span<const double> row) const;
};

// Gradient-boosted trees with logistic loss: each tree fits the negative
// gradient (y - p) by variance-reduction splits; leaf values come from an
// exact 1-D line search on the leaf's logistic loss, which makes the
// training loss non-increasing per tree at learning rates in (0, 1].
class GbtModel {
 public:
  static GbtModel train(const EncodedDataset& data, const GbtConfig& config);

  double margin_row(std::span<const double> row) const;
  double proba_row(std::span<const double> row) const { return sigmoid(margin_row(row)); }
  std::vector<double> predict_proba(const Matrix& X) const;
  std::vector<double> predict_margin(const Matrix& X) const;

  Predictor predictor() const;         // probabilities
  Predictor margin_predictor() const;  // log-odds

  // Normalized total split gain per feature, descending; ties by name.
  std::vector<std::pair<std::string, double>> gain_importance() const;

  std::string to_json_string() const;
  static GbtModel from_json_string(const std::string& text);
  void save(const std::string& path) const;
  static GbtModel load(const std::string& path);

  double base_score() const { return base_score_; }
  const GbtConfig& config() const { return config_; }
  const std::vector<GbtTree>& trees() const { return trees_; }
  const std::vector<std::string>& feature_names() const { return feature_names_; }
  const std::vector<double>& train_loss() const { return train_loss_; }
  std::size_t n_features() const { return feature_names_.size(); }

 private:
  double base_score_ = 0.0;
  GbtConfig config_;
  std::vector<GbtTree> trees_;
  std::vector<std::string> feature_names_;
  std::vector<double> train_loss_;  // log loss after each tree
};

}  // namespace glassbox
