#include "glassbox/tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace glassbox {

namespace {

struct SplitChoice {
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;
};

// Node impurity times sample count: n*gini for classification, SSE for
// regression. Both are computed from (sum, sum of squares, count).
double weighted_impurity(double sum, double sum_sq, double n, bool classification) {
  if (n <= 0.0) return 0.0;
  if (classification) {
    double p = sum / n;
    return n * 2.0 * p * (1.0 - p);
  }
  return sum_sq - sum * sum / n;
}

}  // namespace

TreeModel TreeModel::fit(const Matrix& X, std::span<const double> targets, TreeConfig config) {
  if (X.rows == 0) throw validation_error("train_decision_tree: empty matrix");
  if (X.rows != targets.size()) throw validation_error("train_decision_tree: size mismatch");

  TreeModel model;
  model.config_ = config;
  model.classification_ =
      std::all_of(targets.begin(), targets.end(), [](double t) { return t == 0.0 || t == 1.0; });
  bool cls = model.classification_;

  struct Work {
    int node;
    int depth;
    std::vector<std::size_t> rows;
  };

  std::vector<std::size_t> all(X.rows);
  std::iota(all.begin(), all.end(), 0);
  model.nodes_.push_back(TreeNode{});
  std::vector<Work> stack;
  stack.push_back({0, 0, std::move(all)});

  while (!stack.empty()) {
    Work work = std::move(stack.back());
    stack.pop_back();
    auto& rows = work.rows;
    double sum = 0.0, sum_sq = 0.0;
    for (std::size_t r : rows) {
      sum += targets[r];
      sum_sq += targets[r] * targets[r];
    }
    double n = static_cast<double>(rows.size());
    TreeNode& node = model.nodes_[static_cast<std::size_t>(work.node)];
    node.value = sum / n;
    node.n = rows.size();

    double parent_impurity = weighted_impurity(sum, sum_sq, n, cls);
    if (work.depth >= config.max_depth || rows.size() < 2 * config.min_samples_leaf ||
        parent_impurity <= 1e-12)
      continue;

    SplitChoice best;
    std::vector<std::pair<double, std::size_t>> sorted;
    sorted.reserve(rows.size());
    for (std::size_t f = 0; f < X.cols; ++f) {
      sorted.clear();
      for (std::size_t r : rows) sorted.emplace_back(X(r, f), r);
      std::sort(sorted.begin(), sorted.end());
      if (sorted.front().first == sorted.back().first) continue;

      double left_sum = 0.0, left_sq = 0.0;
      for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
        double t = targets[sorted[i].second];
        left_sum += t;
        left_sq += t * t;
        if (sorted[i].first == sorted[i + 1].first) continue;
        std::size_t n_left = i + 1;
        std::size_t n_right = sorted.size() - n_left;
        if (n_left < config.min_samples_leaf || n_right < config.min_samples_leaf) continue;
        double right_sum = sum - left_sum;
        double right_sq = sum_sq - left_sq;
        double gain = parent_impurity -
                      (weighted_impurity(left_sum, left_sq, static_cast<double>(n_left), cls) +
                       weighted_impurity(right_sum, right_sq, static_cast<double>(n_right), cls));
        if (gain > best.gain + 1e-12) {
          best.feature = static_cast<int>(f);
          best.threshold = 0.5 * (sorted[i].first + sorted[i + 1].first);
          best.gain = gain;
        }
      }
    }

    if (best.feature < 0) continue;

    std::vector<std::size_t> left_rows, right_rows;
    for (std::size_t r : rows)
      (X(r, static_cast<std::size_t>(best.feature)) < best.threshold ? left_rows : right_rows)
          .push_back(r);
    if (left_rows.empty() || right_rows.empty()) continue;

    const int left_child = static_cast<int>(model.nodes_.size());
    model.nodes_.push_back(TreeNode{});
    model.nodes_.push_back(TreeNode{});
    TreeNode& parent = model.nodes_[static_cast<std::size_t>(work.node)];
    parent.feature = best.feature;
    parent.threshold = best.threshold;
    parent.gain = best.gain;
    parent.left = left_child;
    parent.right = left_child + 1;
    stack.push_back({parent.right, work.depth + 1, std::move(right_rows)});
    stack.push_back({parent.left, work.depth + 1, std::move(left_rows)});
  }
  return model;
}

double TreeModel::predict_row(std::span<const double> row) const {
  if (nodes_.empty()) throw validation_error("tree: not fitted");
  int i = 0;
  while (nodes_[static_cast<std::size_t>(i)].feature >= 0) {
    const TreeNode& node = nodes_[static_cast<std::size_t>(i)];
    if (static_cast<std::size_t>(node.feature) >= row.size())
      throw validation_error("tree: row width mismatch");
    i = row[static_cast<std::size_t>(node.feature)] < node.threshold ? node.left : node.right;
  }
  return nodes_[static_cast<std::size_t>(i)].value;
}

std::vector<double> TreeModel::predict(const Matrix& X) const {
  std::vector<double> out(X.rows);
  for (std::size_t r = 0; r < X.rows; ++r) out[r] = predict_row(X.row(r));
  return out;
}

Predictor TreeModel::predictor() const {
  TreeModel copy = *this;
  return [copy](const Matrix& X) { return copy.predict(X); };
}

std::string TreeModel::render_text(const std::vector<std::string>& feature_names) const {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(2);
  auto name = [&](int f) {
    std::size_t i = static_cast<std::size_t>(f);
    return i < feature_names.size() ? feature_names[i] : "f" + std::to_string(f);
  };
  std::function<void(int, int)> walk = [&](int index, int depth) {
    const TreeNode& node = nodes_[static_cast<std::size_t>(index)];
    std::string indent;
    for (int d = 0; d < depth; ++d) indent += "|   ";
    if (node.feature < 0) {
      out << indent << "|--- value: " << node.value << " (n=" << node.n << ")\n";
      return;
    }
    out << indent << "|--- " << name(node.feature) << " < " << node.threshold << "\n";
    walk(node.left, depth + 1);
    out << indent << "|--- " << name(node.feature) << " >= " << node.threshold << "\n";
    walk(node.right, depth + 1);
  };
  if (!nodes_.empty()) walk(0, 0);
  return out.str();
}

}  // namespace glassbox
