#include "glassbox/gbt.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>

#include <nlohmann/json.hpp>

#include "glassbox/metrics.hpp"
#include "glassbox/rng.hpp"

namespace glassbox {

namespace {

using ordered_json = nlohmann::ordered_json;

struct SplitChoice {
  int feature = -1;
  double threshold = 0.0;
  double gain = -1.0;
};

double sse(double sum, double sum_sq, double n) {
  return n > 0.0 ? sum_sq - sum * sum / n : 0.0;
}

// Split search on residuals. Binary {0,1} columns get a canonical two-sided
// evaluation so complement one-hot pairs (sex_Male vs sex_Female) produce
// bitwise-identical gains; ties then resolve to the highest feature index,
// which keeps the paper's named columns (the *_Male/_White/_United-States
// side) in the fitted model instead of their complements.
SplitChoice find_split(const Matrix& X, const std::vector<double>& grad,
                       const std::vector<double>& hess, const std::vector<std::size_t>& rows,
                       const std::vector<bool>& is_binary, double min_child_weight,
                       std::size_t min_rows_per_child) {
  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t r : rows) {
    sum += grad[r];
    sum_sq += grad[r] * grad[r];
  }
  double parent = sse(sum, sum_sq, static_cast<double>(rows.size()));
  SplitChoice best;
  if (parent <= 1e-12) return best;

  std::vector<std::pair<double, std::size_t>> sorted;
  for (std::size_t f = 0; f < X.cols; ++f) {
    if (is_binary[f]) {
      double sum0 = 0.0, sq0 = 0.0, h0 = 0.0, sum1 = 0.0, sq1 = 0.0, h1 = 0.0;
      std::size_t n0 = 0, n1 = 0;
      for (std::size_t r : rows) {
        if (X(r, f) < 0.5) {
          sum0 += grad[r];
          sq0 += grad[r] * grad[r];
          h0 += hess[r];
          ++n0;
        } else {
          sum1 += grad[r];
          sq1 += grad[r] * grad[r];
          h1 += hess[r];
          ++n1;
        }
      }
      if (n0 < min_rows_per_child || n1 < min_rows_per_child) continue;
      if (h0 < min_child_weight || h1 < min_child_weight) continue;
      double children = sse(sum0, sq0, static_cast<double>(n0)) +
                        sse(sum1, sq1, static_cast<double>(n1));
      double gain = parent - children;
      if (gain > 1e-12 && gain >= best.gain) {
        best.feature = static_cast<int>(f);
        best.threshold = 0.5;
        best.gain = gain;
      }
      continue;
    }

    sorted.clear();
    for (std::size_t r : rows) sorted.emplace_back(X(r, f), r);
    std::sort(sorted.begin(), sorted.end());
    if (sorted.front().first == sorted.back().first) continue;
    double left_sum = 0.0, left_sq = 0.0, left_h = 0.0;
    double total_h = 0.0;
    for (std::size_t r : rows) total_h += hess[r];
    for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
      double g = grad[sorted[i].second];
      left_sum += g;
      left_sq += g * g;
      left_h += hess[sorted[i].second];
      if (sorted[i].first == sorted[i + 1].first) continue;
      std::size_t n_left = i + 1;
      std::size_t n_right = sorted.size() - n_left;
      if (n_left < min_rows_per_child || n_right < min_rows_per_child) continue;
      if (left_h < min_child_weight || total_h - left_h < min_child_weight) continue;
      double children = sse(left_sum, left_sq, static_cast<double>(n_left)) +
                        sse(sum - left_sum, sum_sq - left_sq, static_cast<double>(n_right));
      double gain = parent - children;
      if (gain > 1e-12 && gain >= best.gain) {
        best.feature = static_cast<int>(f);
        best.threshold = 0.5 * (sorted[i].first + sorted[i + 1].first);
        best.gain = gain;
      }
    }
  }
  return best;
}

// Exact 1-D minimization of the leaf's logistic loss in the leaf step gamma.
double leaf_line_search(const std::vector<double>& margins, const std::vector<int>& y,
                        const std::vector<std::size_t>& rows) {
  auto loss = [&](double gamma) {
    double total = 0.0;
    for (std::size_t r : rows) {
      double m = margins[r] + gamma;
      // log(1 + exp(-m)) for y=1, log(1 + exp(m)) for y=0, stably.
      double z = y[r] == 1 ? -m : m;
      total += z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
    }
    return total;
  };
  double gamma = 0.0;
  for (int iter = 0; iter < 20; ++iter) {
    double d1 = 0.0, d2 = 0.0;
    for (std::size_t r : rows) {
      double p = sigmoid(margins[r] + gamma);
      d1 += p - static_cast<double>(y[r]);
      d2 += p * (1.0 - p);
    }
    if (d2 < 1e-12) break;
    double step = d1 / d2;
    gamma -= std::clamp(step, -4.0, 4.0);
    if (std::abs(step) < 1e-10) break;
  }
  gamma = std::clamp(gamma, -15.0, 15.0);
  if (loss(gamma) > loss(0.0)) gamma = 0.0;  // safeguard: never increase the loss
  return gamma;
}

}  // namespace

double GbtTree::predict_row(std::span<const double> row) const {
  int i = 0;
  while (nodes[static_cast<std::size_t>(i)].feature >= 0) {
    const GbtNode& node = nodes[static_cast<std::size_t>(i)];
    i = row[static_cast<std::size_t>(node.feature)] < node.threshold ? node.left : node.right;
  }
  return nodes[static_cast<std::size_t>(i)].value;
}

GbtModel GbtModel::train(const EncodedDataset& data, const GbtConfig& config) {
  std::size_t n = data.X.rows;
  if (n == 0) throw validation_error("train_gbt: empty training data");
  require_finite(data.X.data, "train_gbt: features");
  bool has_pos = false, has_neg = false;
  for (int label : data.y) (label == 1 ? has_pos : has_neg) = true;
  if (!has_pos || !has_neg) throw validation_error("train_gbt: labels contain a single class");
  if (config.n_trees < 0) throw validation_error("train_gbt: n_trees must be >= 0");
  if (!(config.learning_rate > 0.0 && config.learning_rate <= 1.0))
    throw validation_error("train_gbt: learning_rate must be in (0,1]");
  if (!(config.subsample > 0.0 && config.subsample <= 1.0))
    throw validation_error("train_gbt: subsample must be in (0,1]");

  GbtModel model;
  model.config_ = config;
  model.feature_names_ = data.feature_names;
  double prevalence =
      std::accumulate(data.y.begin(), data.y.end(), 0.0) / static_cast<double>(n);
  model.base_score_ = logit(prevalence);

  std::vector<bool> is_binary(data.X.cols, true);
  for (std::size_t f = 0; f < data.X.cols; ++f)
    for (std::size_t r = 0; r < n && is_binary[f]; ++r)
      if (data.X(r, f) != 0.0 && data.X(r, f) != 1.0) is_binary[f] = false;

  std::vector<double> margins(n, model.base_score_);
  std::vector<double> grad(n), hess(n);
  std::size_t min_rows = 1;

  for (int t = 0; t < config.n_trees; ++t) {
    for (std::size_t i = 0; i < n; ++i) {
      double p = sigmoid(margins[i]);
      grad[i] = static_cast<double>(data.y[i]) - p;  // negative gradient
      hess[i] = p * (1.0 - p);
    }

    std::vector<std::size_t> sample;
    if (config.subsample < 1.0) {
      std::size_t k = std::max<std::size_t>(
          1, static_cast<std::size_t>(config.subsample * static_cast<double>(n)));
      Rng rng(stable_hash({config.subsample_seed, static_cast<std::uint64_t>(t), 0x474254ull}));
      sample = rng.sample_without_replacement(n, k);
      std::sort(sample.begin(), sample.end());
    } else {
      sample.resize(n);
      std::iota(sample.begin(), sample.end(), 0);
    }

    GbtTree tree;
    tree.nodes.push_back(GbtNode{});
    struct Work {
      int node;
      int depth;
      std::vector<std::size_t> rows;
    };
    std::vector<Work> stack;
    stack.push_back({0, 0, std::move(sample)});
    std::vector<std::pair<int, std::vector<std::size_t>>> leaves;

    while (!stack.empty()) {
      Work work = std::move(stack.back());
      stack.pop_back();
      SplitChoice split;
      if (work.depth < config.max_depth && work.rows.size() >= 2 * min_rows)
        split = find_split(data.X, grad, hess, work.rows, is_binary, config.min_child_weight,
                           min_rows);
      if (split.feature < 0) {
        leaves.emplace_back(work.node, std::move(work.rows));
        continue;
      }
      std::vector<std::size_t> left_rows, right_rows;
      for (std::size_t r : work.rows)
        (data.X(r, static_cast<std::size_t>(split.feature)) < split.threshold ? left_rows
                                                                              : right_rows)
            .push_back(r);
      const int left_child = static_cast<int>(tree.nodes.size());
      tree.nodes.push_back(GbtNode{});
      tree.nodes.push_back(GbtNode{});
      GbtNode& node = tree.nodes[static_cast<std::size_t>(work.node)];
      node.feature = split.feature;
      node.threshold = split.threshold;
      node.gain = split.gain;
      node.left = left_child;
      node.right = left_child + 1;
      stack.push_back({node.right, work.depth + 1, std::move(right_rows)});
      stack.push_back({node.left, work.depth + 1, std::move(left_rows)});
    }

    for (auto& [leaf_index, rows] : leaves) {
      double gamma = leaf_line_search(margins, data.y, rows);
      tree.nodes[static_cast<std::size_t>(leaf_index)].value = config.learning_rate * gamma;
    }

    for (std::size_t i = 0; i < n; ++i) margins[i] += tree.predict_row(data.X.row(i));
    model.trees_.push_back(std::move(tree));

    std::vector<double> probs(n);
    for (std::size_t i = 0; i < n; ++i) probs[i] = sigmoid(margins[i]);
    model.train_loss_.push_back(log_loss(data.y, probs));
  }
  return model;
}

double GbtModel::margin_row(std::span<const double> row) const {
  if (row.size() != feature_names_.size())
    throw validation_error("predict: row width " + std::to_string(row.size()) +
                           " does not match model width " +
                           std::to_string(feature_names_.size()));
  double margin = base_score_;
  for (const auto& tree : trees_) margin += tree.predict_row(row);
  return margin;
}

std::vector<double> GbtModel::predict_margin(const Matrix& X) const {
  std::vector<double> out(X.rows);
  for (std::size_t r = 0; r < X.rows; ++r) out[r] = margin_row(X.row(r));
  return out;
}

std::vector<double> GbtModel::predict_proba(const Matrix& X) const {
  std::vector<double> out = predict_margin(X);
  for (double& v : out) v = sigmoid(v);
  return out;
}

Predictor GbtModel::predictor() const {
  GbtModel copy = *this;
  return [copy](const Matrix& X) { return copy.predict_proba(X); };
}

Predictor GbtModel::margin_predictor() const {
  GbtModel copy = *this;
  return [copy](const Matrix& X) { return copy.predict_margin(X); };
}

std::vector<std::pair<std::string, double>> GbtModel::gain_importance() const {
  if (trees_.empty()) throw validation_error("gain_importance: model has no trees");
  std::vector<double> totals(feature_names_.size(), 0.0);
  for (const auto& tree : trees_)
    for (const auto& node : tree.nodes)
      if (node.feature >= 0) totals[static_cast<std::size_t>(node.feature)] += node.gain;
  double sum = std::accumulate(totals.begin(), totals.end(), 0.0);
  std::vector<std::pair<std::string, double>> ranked;
  for (std::size_t f = 0; f < totals.size(); ++f)
    ranked.emplace_back(feature_names_[f], sum > 0.0 ? totals[f] / sum : 0.0);
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  return ranked;
}

std::string GbtModel::to_json_string() const {
  ordered_json doc;
  doc["format"] = "glassbox.gbt";
  doc["version"] = 1;
  doc["base_score"] = base_score_;
  doc["config"] = {{"n_trees", config_.n_trees},
                   {"max_depth", config_.max_depth},
                   {"learning_rate", config_.learning_rate},
                   {"min_child_weight", config_.min_child_weight},
                   {"subsample", config_.subsample},
                   {"subsample_seed", config_.subsample_seed}};
  doc["feature_names"] = feature_names_;
  ordered_json trees = ordered_json::array();
  for (const auto& tree : trees_) {
    ordered_json nodes = ordered_json::array();
    for (const auto& node : tree.nodes)
      nodes.push_back({{"f", node.feature},
                       {"t", node.threshold},
                       {"l", node.left},
                       {"r", node.right},
                       {"v", node.value},
                       {"g", node.gain}});
    trees.push_back({{"nodes", std::move(nodes)}});
  }
  doc["trees"] = std::move(trees);
  doc["train_loss"] = train_loss_;
  return doc.dump(2);
}

GbtModel GbtModel::from_json_string(const std::string& text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const std::exception& e) {
    throw validation_error(std::string("model parse error: ") + e.what());
  }
  if (doc.value("format", "") != "glassbox.gbt")
    throw validation_error("model parse error: not a glassbox.gbt document");
  if (doc.value("version", 0) != 1)
    throw validation_error("model parse error: unsupported version");
  GbtModel model;
  model.base_score_ = doc.at("base_score").get<double>();
  const auto& cfg = doc.at("config");
  model.config_.n_trees = cfg.at("n_trees").get<int>();
  model.config_.max_depth = cfg.at("max_depth").get<int>();
  model.config_.learning_rate = cfg.at("learning_rate").get<double>();
  model.config_.min_child_weight = cfg.at("min_child_weight").get<double>();
  model.config_.subsample = cfg.at("subsample").get<double>();
  model.config_.subsample_seed = cfg.at("subsample_seed").get<std::uint64_t>();
  model.feature_names_ = doc.at("feature_names").get<std::vector<std::string>>();
  for (const auto& jt : doc.at("trees")) {
    GbtTree tree;
    for (const auto& jn : jt.at("nodes")) {
      GbtNode node;
      node.feature = jn.at("f").get<int>();
      node.threshold = jn.at("t").get<double>();
      node.left = jn.at("l").get<int>();
      node.right = jn.at("r").get<int>();
      node.value = jn.at("v").get<double>();
      node.gain = jn.at("g").get<double>();
      tree.nodes.push_back(node);
    }
    model.trees_.push_back(std::move(tree));
  }
  model.train_loss_ = doc.at("train_loss").get<std::vector<double>>();
  return model;
}

void GbtModel::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot write " + path);
  out << to_json_string();
  if (!out) throw io_error("write failed: " + path);
}

GbtModel GbtModel::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return from_json_string(text);
}

}  // namespace glassbox
