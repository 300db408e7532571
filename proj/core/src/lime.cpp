#include "glassbox/lime.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "glassbox/linear.hpp"
#include "glassbox/metrics.hpp"
#include "glassbox/rng.hpp"

namespace glassbox {

namespace {

int quartile_bin(const std::vector<double>& edges, double value) {
  int bin = 0;
  for (double e : edges)
    if (value > e) ++bin;
  return bin;
}

// Category index of a one-hot unit in a row; -1 for the all-zero group.
int unit_category(std::span<const double> row, const LimeUnit& unit) {
  for (std::size_t k = 0; k < unit.members.size(); ++k)
    if (row[unit.members[k]] >= 0.5) return static_cast<int>(k);
  return -1;
}

}  // namespace

LimeStats lime_stats(const EncodedDataset& train) {
  if (train.X.rows == 0) throw validation_error("lime_stats: empty training data");
  LimeStats stats;
  stats.width = train.X.cols;
  std::size_t n = train.X.rows;

  stats.column_mean.assign(train.X.cols, 0.0);
  stats.column_scale.assign(train.X.cols, 1.0);
  for (std::size_t c = 0; c < train.X.cols; ++c) {
    double s = 0.0;
    for (std::size_t r = 0; r < n; ++r) s += train.X(r, c);
    double m = s / static_cast<double>(n);
    double var = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      double d = train.X(r, c) - m;
      var += d * d;
    }
    var /= static_cast<double>(n);
    stats.column_mean[c] = m;
    stats.column_scale[c] = var > 0.0 ? std::sqrt(var) : 1.0;
  }

  for (const auto& group : train.groups) {
    LimeUnit unit;
    unit.name = group.name;
    unit.kind = group.kind;
    unit.members = group.members;
    if (group.kind == GroupKind::numeric) {
      std::size_t c = group.members[0];
      unit.mean = stats.column_mean[c];
      unit.stddev = stats.column_scale[c];
      std::vector<double> values(n);
      for (std::size_t r = 0; r < n; ++r) values[r] = train.X(r, c);
      std::sort(values.begin(), values.end());
      for (std::size_t q = 1; q <= 3; ++q)
        unit.quartiles.push_back(values[std::min(n - 1, q * n / 4)]);
    } else if (group.kind == GroupKind::binary) {
      std::size_t c = group.members[0];
      double s = 0.0;
      for (std::size_t r = 0; r < n; ++r) s += train.X(r, c);
      unit.marginals = {s / static_cast<double>(n)};
    } else {
      unit.marginals.assign(group.members.size(), 0.0);
      std::size_t missing = 0;
      for (std::size_t r = 0; r < n; ++r) {
        int cat = unit_category(train.X.row(r), unit);
        if (cat < 0)
          ++missing;
        else
          unit.marginals[static_cast<std::size_t>(cat)] += 1.0;
      }
      for (double& m : unit.marginals) m /= static_cast<double>(n);
      unit.missing_rate = static_cast<double>(missing) / static_cast<double>(n);
    }
    stats.units.push_back(std::move(unit));
  }
  return stats;
}

Neighborhood sample_neighborhood(std::span<const double> instance, const LimeStats& stats,
                                 std::size_t n, std::uint64_t seed) {
  if (instance.size() != stats.width) throw validation_error("sample_neighborhood: width mismatch");
  if (n == 0) throw validation_error("sample_neighborhood: n must be positive");
  std::size_t U = stats.units.size();

  Neighborhood nb;
  nb.X = Matrix(n, stats.width);
  nb.Z = Matrix(n, U, 1.0);
  nb.distances.assign(n, 0.0);
  std::copy(instance.begin(), instance.end(), nb.X.row_ptr(0));

  // Instance-side reference state per unit.
  std::vector<int> instance_cat(U, 0);
  std::vector<int> instance_bin(U, 0);
  for (std::size_t u = 0; u < U; ++u) {
    const LimeUnit& unit = stats.units[u];
    if (unit.kind == GroupKind::onehot)
      instance_cat[u] = unit_category(instance, unit);
    else if (unit.kind == GroupKind::numeric)
      instance_bin[u] = quartile_bin(unit.quartiles, instance[unit.members[0]]);
  }

  Rng rng(stable_hash({seed, 0x4C494D45ull}));
  for (std::size_t r = 1; r < n; ++r) {
    double* row = nb.X.row_ptr(r);
    std::copy(instance.begin(), instance.end(), row);
    for (std::size_t u = 0; u < U; ++u) {
      const LimeUnit& unit = stats.units[u];
      if (unit.kind == GroupKind::numeric) {
        std::size_t c = unit.members[0];
        row[c] = instance[c] + rng.normal() * unit.stddev;
        nb.Z(r, u) = quartile_bin(unit.quartiles, row[c]) == instance_bin[u] ? 1.0 : 0.0;
      } else if (unit.kind == GroupKind::binary) {
        std::size_t c = unit.members[0];
        row[c] = rng.uniform() < unit.marginals[0] ? 1.0 : 0.0;
        nb.Z(r, u) = row[c] == instance[c] ? 1.0 : 0.0;
      } else {
        double roll = rng.uniform();
        int cat = -1;  // all-zero (missing) group when nothing matches
        double cum = 0.0;
        for (std::size_t k = 0; k < unit.marginals.size(); ++k) {
          cum += unit.marginals[k];
          if (roll < cum) {
            cat = static_cast<int>(k);
            break;
          }
        }
        for (std::size_t k = 0; k < unit.members.size(); ++k)
          row[unit.members[k]] = cat == static_cast<int>(k) ? 1.0 : 0.0;
        nb.Z(r, u) = cat == instance_cat[u] ? 1.0 : 0.0;
      }
    }
    double d2 = 0.0;
    for (std::size_t c = 0; c < stats.width; ++c) {
      double d = (row[c] - instance[c]) / stats.column_scale[c];
      d2 += d * d;
    }
    nb.distances[r] = std::sqrt(d2);
  }
  return nb;
}

double lime_kernel_width(const LimeConfig& config, std::size_t encoded_width) {
  if (config.kernel_width > 0.0) return config.kernel_width;
  return 0.75 * std::sqrt(static_cast<double>(encoded_width));
}

std::vector<std::string> LimeExplanation::selected_features() const {
  std::vector<std::string> out;
  for (const auto& [name, coef] : coefficients) out.push_back(name);
  return out;
}

LimeExplanation lime_explain(const Predictor& f, std::span<const double> instance,
                             const LimeStats& stats, const LimeConfig& config,
                             std::int64_t instance_id) {
  if (config.n_samples < 2) throw validation_error("lime_explain: n_samples must be >= 2");
  if (config.top_k == 0) throw validation_error("lime_explain: top_k must be >= 1");
  std::uint64_t seed = config.seed ? *config.seed : entropy_seed();
  Neighborhood nb = sample_neighborhood(instance, stats, config.n_samples, seed);

  std::vector<double> y = f(nb.X);
  double width = lime_kernel_width(config, stats.width);
  std::vector<double> weights(nb.X.rows);
  for (std::size_t r = 0; r < nb.X.rows; ++r) {
    double d = nb.distances[r] / width;
    weights[r] = std::exp(-d * d);
  }

  std::size_t U = stats.units.size();
  std::size_t k_max = std::min(config.top_k, U);

  auto fit_on = [&](const std::vector<std::size_t>& cols) {
    Matrix sub(nb.Z.rows, cols.size());
    for (std::size_t r = 0; r < nb.Z.rows; ++r)
      for (std::size_t k = 0; k < cols.size(); ++k) sub(r, k) = nb.Z(r, cols[k]);
    RidgeFit fit = weighted_ridge(sub, y, weights, config.ridge);
    std::vector<double> pred(nb.Z.rows, fit.intercept);
    for (std::size_t r = 0; r < nb.Z.rows; ++r)
      for (std::size_t k = 0; k < cols.size(); ++k) pred[r] += fit.weights[k] * sub(r, k);
    double r2 = r2_score_weighted(y, pred, weights);
    return std::make_pair(fit, r2);
  };

  std::vector<std::size_t> selected;
  std::vector<bool> in_model(U, false);
  for (std::size_t round = 0; round < k_max; ++round) {
    double best_r2 = -std::numeric_limits<double>::infinity();
    std::size_t best_u = U;
    for (std::size_t u = 0; u < U; ++u) {
      if (in_model[u]) continue;
      auto candidate = selected;
      candidate.push_back(u);
      double r2 = fit_on(candidate).second;
      if (r2 > best_r2) {
        best_r2 = r2;
        best_u = u;
      }
    }
    if (best_u == U) break;
    selected.push_back(best_u);
    in_model[best_u] = true;
  }

  auto [fit, r2] = fit_on(selected);
  LimeExplanation ex;
  ex.instance_id = instance_id;
  ex.intercept = fit.intercept;
  ex.local_r2 = r2;
  ex.predicted_local = fit.intercept;
  for (std::size_t k = 0; k < selected.size(); ++k) {
    ex.coefficients.emplace_back(stats.units[selected[k]].name, fit.weights[k]);
    ex.predicted_local += fit.weights[k];  // z = 1 everywhere at the instance
  }
  return ex;
}

StabilityReport stability(const Predictor& f, std::span<const double> instance,
                          const LimeStats& stats, int runs, const LimeConfig& config) {
  if (runs < 2) throw validation_error("stability: runs must be >= 2");
  std::vector<LimeExplanation> results;
  for (int run = 0; run < runs; ++run)
    results.push_back(lime_explain(f, instance, stats, config));
  return summarize_stability(results, stats);
}

StabilityReport summarize_stability(const std::vector<LimeExplanation>& runs,
                                    const LimeStats& stats) {
  if (runs.size() < 2) throw validation_error("stability: runs must be >= 2");
  std::size_t U = stats.units.size();

  std::vector<std::set<std::string>> topk_sets;
  Matrix coef_runs(runs.size(), U, 0.0);
  for (std::size_t run = 0; run < runs.size(); ++run) {
    std::set<std::string> names;
    for (const auto& [name, coef] : runs[run].coefficients) {
      names.insert(name);
      for (std::size_t u = 0; u < U; ++u)
        if (stats.units[u].name == name) coef_runs(run, u) = coef;
    }
    topk_sets.push_back(std::move(names));
  }

  StabilityReport report;
  report.runs = static_cast<int>(runs.size());
  for (const auto& unit : stats.units) report.unit_names.push_back(unit.name);

  double jaccard_sum = 0.0;
  std::size_t pairs = 0;
  for (std::size_t a = 0; a < topk_sets.size(); ++a)
    for (std::size_t b = a + 1; b < topk_sets.size(); ++b) {
      std::vector<std::string> inter, uni;
      std::set_intersection(topk_sets[a].begin(), topk_sets[a].end(), topk_sets[b].begin(),
                            topk_sets[b].end(), std::back_inserter(inter));
      std::set_union(topk_sets[a].begin(), topk_sets[a].end(), topk_sets[b].begin(),
                     topk_sets[b].end(), std::back_inserter(uni));
      jaccard_sum += uni.empty() ? 1.0
                                 : static_cast<double>(inter.size()) /
                                       static_cast<double>(uni.size());
      ++pairs;
    }
  report.mean_pairwise_jaccard_topk = pairs ? jaccard_sum / static_cast<double>(pairs) : 1.0;

  report.coefficient_stddev.assign(U, 0.0);
  for (std::size_t u = 0; u < U; ++u) {
    double m = 0.0;
    for (std::size_t run = 0; run < runs.size(); ++run) m += coef_runs(run, u);
    m /= static_cast<double>(runs.size());
    double var = 0.0;
    for (std::size_t run = 0; run < runs.size(); ++run) {
      double d = coef_runs(run, u) - m;
      var += d * d;
    }
    report.coefficient_stddev[u] = std::sqrt(var / static_cast<double>(runs.size()));
  }

  std::set<std::set<std::string>> distinct(topk_sets.begin(), topk_sets.end());
  report.distinct_topk_sets = static_cast<int>(distinct.size());
  return report;
}

}  // namespace glassbox
