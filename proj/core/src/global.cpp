#include "glassbox/global.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "glassbox/parallel.hpp"
#include "glassbox/rng.hpp"

namespace glassbox {

PermutationReport permutation_importance(const Predictor& f, const EncodedDataset& data,
                                         int repeats, std::uint64_t seed) {
  if (repeats < 1) throw validation_error("permutation_importance: repeats must be >= 1");
  std::size_t n = data.X.rows;
  if (n == 0) throw validation_error("permutation_importance: empty data");

  std::vector<double> baseline_probs = f(data.X);
  double baseline = auc(baseline_probs, data.y);  // throws on single-class data

  std::size_t G = data.groups.size();
  std::size_t R = static_cast<std::size_t>(repeats);
  std::vector<double> drops(G * R, 0.0);

  parallel_for(G * R, [&](std::size_t task) {
    std::size_t g = task / R;
    std::size_t rep = task % R;
    Rng rng(stable_hash({seed, static_cast<std::uint64_t>(g), static_cast<std::uint64_t>(rep),
                         0x5045524Dull}));
    auto perm = rng.permutation(n);
    Matrix shuffled = data.X;
    for (std::size_t c : data.groups[g].members)
      for (std::size_t r = 0; r < n; ++r) shuffled(r, c) = data.X(perm[r], c);
    std::vector<double> probs = f(shuffled);
    drops[task] = baseline - auc(probs, data.y);
  });

  PermutationReport report;
  report.baseline_auc = baseline;
  report.repeats = repeats;
  report.seed = seed;
  for (std::size_t g = 0; g < G; ++g) {
    double m = 0.0;
    for (std::size_t rep = 0; rep < R; ++rep) m += drops[g * R + rep];
    m /= static_cast<double>(R);
    double var = 0.0;
    for (std::size_t rep = 0; rep < R; ++rep) {
      double d = drops[g * R + rep] - m;
      var += d * d;
    }
    double stddev = R > 1 ? std::sqrt(var / static_cast<double>(R - 1)) : 0.0;
    report.ranking.push_back({data.groups[g].name, m, stddev});
  }
  std::sort(report.ranking.begin(), report.ranking.end(),
            [](const PermutationEntry& a, const PermutationEntry& b) {
              if (a.mean_drop != b.mean_drop) return a.mean_drop > b.mean_drop;
              return a.feature < b.feature;
            });
  return report;
}

SurrogateReport fit_global_surrogate(const Predictor& f, const SplitPair& splits,
                                     SurrogateKind kind, const SurrogateConfig& config) {
  if (splits.train.X.rows == 0 || splits.test.X.rows == 0)
    throw validation_error("fit_global_surrogate: both splits must be non-empty");

  std::vector<double> p_train = f(splits.train.X);
  std::vector<double> p_test = f(splits.test.X);

  SurrogateReport report;
  report.kind = kind;

  std::vector<double> s_train, s_test;    // surrogate fidelity outputs
  std::vector<double> m_train, m_test;    // surrogate label-metric probabilities
  if (kind == SurrogateKind::decision_tree) {
    TreeConfig tc;
    tc.max_depth = config.tree_max_depth;
    tc.min_samples_leaf = config.tree_min_samples_leaf;
    report.tree = TreeModel::fit(splits.train.X, p_train, tc);
    report.tree_text = report.tree.render_text(splits.train.feature_names);
    s_train = report.tree.predict(splits.train.X);
    s_test = report.tree.predict(splits.test.X);
    m_train = s_train;
    m_test = s_test;
  } else if (kind == SurrogateKind::logistic) {
    std::vector<int> hard(p_train.size());
    for (std::size_t i = 0; i < p_train.size(); ++i) hard[i] = p_train[i] >= 0.5 ? 1 : 0;
    bool has_pos = std::count(hard.begin(), hard.end(), 1) > 0;
    bool has_neg = std::count(hard.begin(), hard.end(), 0) > 0;
    if (!has_pos || !has_neg)
      throw validation_error("fit_global_surrogate: black box emits a single hard class");
    report.linear = train_logistic(splits.train.X, hard, config.logistic);
    m_train = report.linear.predict_proba(splits.train.X);
    m_test = report.linear.predict_proba(splits.test.X);
    // Fidelity is scored on the surrogate's class output, not its
    // probability; a linear classifier commits to hard labels.
    s_train.resize(m_train.size());
    s_test.resize(m_test.size());
    for (std::size_t i = 0; i < m_train.size(); ++i) s_train[i] = m_train[i] >= 0.5 ? 1.0 : 0.0;
    for (std::size_t i = 0; i < m_test.size(); ++i) s_test[i] = m_test[i] >= 0.5 ? 1.0 : 0.0;
  } else {
    s_train = p_train;
    s_test = p_test;
    m_train = p_train;
    m_test = p_test;
  }

  report.r2_train = r2_score(p_train, s_train);
  report.r2_test = r2_score(p_test, s_test);
  report.train_metrics = evaluate_scores(m_train, splits.train.y);
  report.test_metrics = evaluate_scores(m_test, splits.test.y);
  report.accepted = report.r2_train > 0.0 && report.r2_test > 0.0;
  return report;
}

namespace {

std::vector<double> global_feature_importance(const Matrix& W) {
  std::vector<double> importance(W.cols, 0.0);
  for (std::size_t j = 0; j < W.cols; ++j) {
    double total = 0.0;
    for (std::size_t i = 0; i < W.rows; ++i) total += std::abs(W(i, j));
    importance[j] = std::sqrt(total);
  }
  return importance;
}

}  // namespace

double splime_coverage(const Matrix& W, const std::vector<std::size_t>& picks) {
  require_finite(W.data, "sp_lime: W");
  std::vector<double> importance = global_feature_importance(W);
  double total = 0.0;
  for (std::size_t j = 0; j < W.cols; ++j) {
    bool covered = false;
    for (std::size_t i : picks)
      if (std::abs(W(i, j)) > 0.0) {
        covered = true;
        break;
      }
    if (covered) total += importance[j];
  }
  return total;
}

PickResult sp_lime(const Matrix& W, std::size_t budget) {
  if (budget < 1) throw validation_error("sp_lime: budget must be >= 1");
  require_finite(W.data, "sp_lime: W");
  std::vector<double> importance = global_feature_importance(W);

  PickResult result;
  result.budget = budget;
  std::vector<bool> covered(W.cols, false);
  std::vector<bool> picked(W.rows, false);
  double coverage = 0.0;
  while (result.selected.size() < std::min(budget, W.rows)) {
    double best_gain = 0.0;
    std::size_t best_i = W.rows;
    for (std::size_t i = 0; i < W.rows; ++i) {
      if (picked[i]) continue;
      double gain = 0.0;
      for (std::size_t j = 0; j < W.cols; ++j)
        if (!covered[j] && std::abs(W(i, j)) > 0.0) gain += importance[j];
      if (gain > best_gain) {  // ties keep the lowest instance id
        best_gain = gain;
        best_i = i;
      }
    }
    if (best_i == W.rows) break;  // zero marginal gain
    picked[best_i] = true;
    for (std::size_t j = 0; j < W.cols; ++j)
      if (std::abs(W(best_i, j)) > 0.0) covered[j] = true;
    coverage += best_gain;
    result.selected.push_back(best_i);
    result.coverage_steps.push_back(coverage);
  }
  result.coverage = coverage;
  return result;
}

PickResult sp_lime_exact(const Matrix& W, std::size_t budget) {
  if (budget < 1) throw validation_error("sp_lime_exact: budget must be >= 1");
  require_finite(W.data, "sp_lime: W");
  std::size_t n = W.rows;
  std::size_t k = std::min(budget, n);
  double total_combos = 0.0;
  double c = 1.0;
  for (std::size_t s = 1; s <= k; ++s) {
    c = c * static_cast<double>(n - s + 1) / static_cast<double>(s);
    total_combos += c;
  }
  if (total_combos > 1e6)
    throw validation_error("sp_lime_exact: instance too large (C(n,budget) > 1e6)");

  // Sizes ascending with strict improvement: the smallest (then
  // lexicographically first) subset attaining the optimum wins, so
  // instances contributing nothing are never reported.
  PickResult best;
  best.budget = budget;
  for (std::size_t s = 1; s <= k; ++s) {
    std::vector<std::size_t> comb(s);
    std::iota(comb.begin(), comb.end(), 0);
    for (;;) {
      double cov = splime_coverage(W, comb);
      if (cov > best.coverage) {
        best.coverage = cov;
        best.selected = comb;
      }
      std::size_t idx = s;
      while (idx > 0 && comb[idx - 1] == n - s + idx - 1) --idx;
      if (idx == 0) break;
      ++comb[idx - 1];
      for (std::size_t j = idx; j < s; ++j) comb[j] = comb[j - 1] + 1;
    }
  }
  best.coverage_steps = {best.coverage};
  return best;
}

}  // namespace glassbox
