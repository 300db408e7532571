#include "glassbox/shap.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <numeric>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "glassbox/metrics.hpp"
#include "glassbox/parallel.hpp"
#include "glassbox/rng.hpp"

namespace glassbox {

namespace {

using ordered_json = nlohmann::ordered_json;

double binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0.0;
  k = std::min(k, n - k);
  double result = 1.0;
  for (std::size_t i = 1; i <= k; ++i)
    result = result * static_cast<double>(n - k + i) / static_cast<double>(i);
  return result;
}

// Mean model output over the background with coalition features pinned to
// the instance. Masks are evaluated in fixed chunks; callers inside an
// already-parallel loop pass parallel = false.
std::vector<double> coalition_values(const Predictor& f, std::span<const double> instance,
                                     const Matrix& background,
                                     const std::vector<std::uint64_t>& masks, bool parallel) {
  std::size_t M = instance.size();
  std::size_t B = background.rows;
  std::vector<double> values(masks.size());
  std::size_t chunk = std::max<std::size_t>(1, 16384 / std::max<std::size_t>(1, B));
  std::size_t n_chunks = (masks.size() + chunk - 1) / chunk;

  auto eval_chunk = [&](std::size_t ci) {
    std::size_t begin = ci * chunk;
    std::size_t end = std::min(begin + chunk, masks.size());
    Matrix batch((end - begin) * B, M);
    std::size_t out_row = 0;
    for (std::size_t mi = begin; mi < end; ++mi) {
      std::uint64_t mask = masks[mi];
      for (std::size_t b = 0; b < B; ++b, ++out_row) {
        double* dst = batch.row_ptr(out_row);
        const double* src = background.row_ptr(b);
        for (std::size_t j = 0; j < M; ++j)
          dst[j] = (mask >> j) & 1ull ? instance[j] : src[j];
      }
    }
    std::vector<double> preds = f(batch);
    for (std::size_t mi = begin; mi < end; ++mi) {
      double total = 0.0;
      for (std::size_t b = 0; b < B; ++b)
        total += preds[(mi - begin) * B + b];
      values[mi] = total / static_cast<double>(B);
    }
  };

  if (parallel && n_chunks > 1)
    parallel_for(n_chunks, eval_chunk);
  else
    for (std::size_t ci = 0; ci < n_chunks; ++ci) eval_chunk(ci);
  return values;
}

struct Coalition {
  std::uint64_t mask = 0;
  double weight = 0.0;
};

Attribution kernel_shap_impl(const Predictor& f, std::span<const double> instance,
                             const BackgroundSet& background, const KernelShapConfig& config,
                             std::int64_t instance_id, bool parallel);

Attribution exact_shapley_impl(const Predictor& f, std::span<const double> instance,
                               const BackgroundSet& background, std::int64_t instance_id,
                               bool parallel) {
  std::size_t M = instance.size();
  if (M == 0) throw validation_error("exact_shapley: empty instance");
  if (M > 20)
    throw validation_error("exact_shapley: refusing " + std::to_string(M) +
                           " features (limit 20); use kernel_shap");
  if (background.rows.rows == 0) throw validation_error("exact_shapley: empty background");
  if (background.rows.cols != M) throw validation_error("exact_shapley: width mismatch");

  std::size_t n_masks = std::size_t{1} << M;
  std::vector<std::uint64_t> masks(n_masks);
  std::iota(masks.begin(), masks.end(), 0ull);
  std::vector<double> v = coalition_values(f, instance, background.rows, masks, parallel);

  std::vector<double> factorial(M + 1, 1.0);
  for (std::size_t i = 1; i <= M; ++i) factorial[i] = factorial[i - 1] * static_cast<double>(i);
  std::vector<double> weight(M);  // |S|!(M-|S|-1)!/M! by coalition size
  for (std::size_t s = 0; s < M; ++s)
    weight[s] = factorial[s] * factorial[M - s - 1] / factorial[M];

  Attribution attr;
  attr.instance_id = instance_id;
  attr.phi.assign(M, 0.0);
  attr.base_value = v[0];
  attr.output_value = v[n_masks - 1];
  for (std::uint64_t mask = 0; mask < n_masks; ++mask) {
    std::size_t s = static_cast<std::size_t>(std::popcount(mask));
    if (s == M) continue;
    double w = weight[s];
    for (std::size_t i = 0; i < M; ++i) {
      if ((mask >> i) & 1ull) continue;
      attr.phi[i] += w * (v[mask | (1ull << i)] - v[mask]);
    }
  }
  return attr;
}

Attribution kernel_shap_impl(const Predictor& f, std::span<const double> instance,
                             const BackgroundSet& background, const KernelShapConfig& config,
                             std::int64_t instance_id, bool parallel) {
  std::size_t M = instance.size();
  if (M == 0) throw validation_error("kernel_shap: empty instance");
  if (M > 62) throw validation_error("kernel_shap: more than 62 features unsupported");
  if (background.rows.rows == 0) throw validation_error("kernel_shap: empty background");
  if (background.rows.cols != M) throw validation_error("kernel_shap: width mismatch");

  // Constraint anchors: v(empty) from the raw background, v(full) = f(x).
  std::vector<std::uint64_t> anchors = {0ull, M >= 64 ? ~0ull : (1ull << M) - 1ull};
  std::vector<double> anchor_v = coalition_values(f, instance, background.rows, anchors, false);
  double base = anchor_v[0];
  double fx = anchor_v[1];
  double delta = fx - base;

  Attribution attr;
  attr.instance_id = instance_id;
  attr.base_value = base;
  attr.output_value = fx;
  if (M == 1) {
    attr.phi = {delta};
    return attr;
  }

  std::vector<Coalition> coalitions;
  double total_proper = std::pow(2.0, static_cast<double>(M)) - 2.0;
  bool full_enumeration =
      static_cast<double>(config.n_coalitions) >= total_proper && M <= 25;

  auto kernel_weight = [&](std::size_t s) {
    return static_cast<double>(M - 1) /
           (binomial(M, s) * static_cast<double>(s) * static_cast<double>(M - s));
  };

  if (full_enumeration) {
    std::uint64_t full = (1ull << M) - 1ull;
    for (std::uint64_t mask = 1; mask < full; ++mask)
      coalitions.push_back({mask, kernel_weight(static_cast<std::size_t>(std::popcount(mask)))});
  } else {
    // Deterministic stratification: pair sizes from the extremes inward,
    // enumerate whole strata while they fit, sample the remainder.
    std::vector<std::size_t> size_order;
    for (std::size_t s = 1; 2 * s <= M; ++s) {
      size_order.push_back(s);
      if (s != M - s) size_order.push_back(M - s);
    }
    std::size_t budget = config.n_coalitions;
    std::vector<std::size_t> sampled_sizes;
    for (std::size_t idx = 0; idx < size_order.size(); ++idx) {
      std::size_t s = size_order[idx];
      double stratum = binomial(M, s);
      if (stratum <= static_cast<double>(budget)) {
        std::vector<std::size_t> comb(s);
        std::iota(comb.begin(), comb.end(), 0);
        for (;;) {
          std::uint64_t mask = 0;
          for (std::size_t i : comb) mask |= 1ull << i;
          coalitions.push_back({mask, kernel_weight(s)});
          // next lexicographic combination
          std::size_t k = s;
          while (k > 0 && comb[k - 1] == M - s + k - 1) --k;
          if (k == 0) break;
          ++comb[k - 1];
          for (std::size_t j = k; j < s; ++j) comb[j] = comb[j - 1] + 1;
        }
        budget -= static_cast<std::size_t>(stratum);
      } else {
        sampled_sizes.assign(size_order.begin() + static_cast<std::ptrdiff_t>(idx),
                             size_order.end());
        break;
      }
    }
    if (!sampled_sizes.empty() && budget > 0) {
      std::vector<double> stratum_weight(sampled_sizes.size());
      double weight_total = 0.0;
      for (std::size_t k = 0; k < sampled_sizes.size(); ++k) {
        std::size_t s = sampled_sizes[k];
        stratum_weight[k] =
            static_cast<double>(M - 1) / (static_cast<double>(s) * static_cast<double>(M - s));
        weight_total += stratum_weight[k];
      }
      // Largest-remainder allocation of the leftover budget across strata.
      std::vector<std::size_t> alloc(sampled_sizes.size(), 0);
      std::vector<std::pair<double, std::size_t>> remainders;
      std::size_t assigned = 0;
      for (std::size_t k = 0; k < sampled_sizes.size(); ++k) {
        double share = static_cast<double>(budget) * stratum_weight[k] / weight_total;
        alloc[k] = static_cast<std::size_t>(share);
        assigned += alloc[k];
        remainders.push_back({share - std::floor(share), k});
      }
      std::sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
      });
      for (std::size_t k = 0; assigned < budget && k < remainders.size(); ++k, ++assigned)
        ++alloc[remainders[k].second];

      Rng rng(stable_hash({config.seed, 0x4B534841ull}));
      std::vector<std::size_t> draw(M);
      for (std::size_t k = 0; k < sampled_sizes.size(); ++k) {
        if (alloc[k] == 0) continue;
        std::size_t s = sampled_sizes[k];
        std::map<std::uint64_t, std::size_t> counts;
        for (std::size_t t = 0; t < alloc[k]; ++t) {
          std::iota(draw.begin(), draw.end(), 0);
          for (std::size_t i = 0; i < s; ++i) {
            std::size_t j = i + static_cast<std::size_t>(rng.below(M - i));
            std::swap(draw[i], draw[j]);
          }
          std::uint64_t mask = 0;
          for (std::size_t i = 0; i < s; ++i) mask |= 1ull << draw[i];
          ++counts[mask];
        }
        double per_draw = stratum_weight[k] / static_cast<double>(alloc[k]);
        for (const auto& [mask, count] : counts)
          coalitions.push_back({mask, per_draw * static_cast<double>(count)});
      }
    }
  }

  if (coalitions.empty())
    throw numeric_error("kernel_shap: no coalitions sampled; increase n_coalitions");

  std::vector<std::uint64_t> masks(coalitions.size());
  for (std::size_t i = 0; i < coalitions.size(); ++i) masks[i] = coalitions[i].mask;
  std::vector<double> v = coalition_values(f, instance, background.rows, masks, parallel);

  // Eliminate phi_{M-1} via the efficiency constraint, solve the weighted
  // normal equations for the rest.
  std::size_t d = M - 1;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(d),
                                            static_cast<Eigen::Index>(d));
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d));
  Eigen::VectorXd x(static_cast<Eigen::Index>(d));
  for (std::size_t ci = 0; ci < coalitions.size(); ++ci) {
    std::uint64_t mask = coalitions[ci].mask;
    double w = coalitions[ci].weight;
    double z_last = static_cast<double>((mask >> (M - 1)) & 1ull);
    for (std::size_t i = 0; i < d; ++i)
      x(static_cast<Eigen::Index>(i)) = static_cast<double>((mask >> i) & 1ull) - z_last;
    double target = v[ci] - base - z_last * delta;
    A.selfadjointView<Eigen::Lower>().rankUpdate(x, w);
    rhs += w * target * x;
  }
  Eigen::MatrixXd As = A.selfadjointView<Eigen::Lower>();
  for (std::size_t i = 0; i < d; ++i)
    As(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) += config.ridge;

  Eigen::LDLT<Eigen::MatrixXd> solver(As);
  Eigen::VectorXd sol = solver.solve(rhs);
  double resid = (As * sol - rhs).cwiseAbs().maxCoeff();
  double scale = std::max(1.0, rhs.cwiseAbs().maxCoeff());
  if (!sol.allFinite() || resid > 1e-6 * scale)
    throw numeric_error(
        "kernel_shap: singular weighted system; increase ridge or n_coalitions");

  attr.phi.assign(M, 0.0);
  double sum = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    attr.phi[i] = sol(static_cast<Eigen::Index>(i));
    sum += attr.phi[i];
  }
  attr.phi[M - 1] = delta - sum;
  return attr;
}

}  // namespace

BackgroundSet sample_background(const Matrix& X, std::size_t size, std::uint64_t seed) {
  if (X.rows == 0) throw validation_error("sample_background: empty matrix");
  std::size_t k = std::min(size, X.rows);
  Rng rng(stable_hash({seed, 0x424B4752ull}));
  auto idx = rng.sample_without_replacement(X.rows, k);
  std::sort(idx.begin(), idx.end());
  BackgroundSet bg;
  bg.rows = Matrix(k, X.cols);
  for (std::size_t i = 0; i < k; ++i)
    std::copy(X.row_ptr(idx[i]), X.row_ptr(idx[i]) + X.cols, bg.rows.row_ptr(i));
  return bg;
}

Attribution exact_shapley(const Predictor& f, std::span<const double> instance,
                          const BackgroundSet& background, std::int64_t instance_id) {
  return exact_shapley_impl(f, instance, background, instance_id, true);
}

Attribution kernel_shap(const Predictor& f, std::span<const double> instance,
                        const BackgroundSet& background, const KernelShapConfig& config,
                        std::int64_t instance_id) {
  return kernel_shap_impl(f, instance, background, config, instance_id, true);
}

AttributionMatrix explain_matrix(const Predictor& f, const Matrix& X,
                                 std::vector<std::string> feature_names,
                                 const BackgroundSet& background, ShapMethod method,
                                 const KernelShapConfig& config,
                                 std::span<const std::int64_t> instance_ids) {
  if (X.rows == 0) throw validation_error("explain_matrix: no instances");
  AttributionMatrix out;
  out.feature_names = std::move(feature_names);
  out.rows.resize(X.rows);
  parallel_for(X.rows, [&](std::size_t r) {
    std::int64_t id =
        instance_ids.empty() ? static_cast<std::int64_t>(r) : instance_ids[r];
    if (method == ShapMethod::exact) {
      out.rows[r] = exact_shapley_impl(f, X.row(r), background, id, false);
    } else {
      KernelShapConfig local = config;
      local.seed = stable_hash({config.seed, static_cast<std::uint64_t>(id)});
      out.rows[r] = kernel_shap_impl(f, X.row(r), background, local, id, false);
    }
  });
  out.base_value = out.rows[0].base_value;
  return out;
}

std::vector<std::pair<std::string, double>> shap_importance(const AttributionMatrix& attrs) {
  if (attrs.rows.empty()) throw validation_error("shap_importance: empty attribution matrix");
  std::size_t M = attrs.feature_names.size();
  std::vector<double> totals(M, 0.0);
  for (const auto& row : attrs.rows)
    for (std::size_t i = 0; i < M; ++i) totals[i] += std::abs(row.phi[i]);
  std::vector<std::pair<std::string, double>> ranked;
  for (std::size_t i = 0; i < M; ++i)
    ranked.emplace_back(attrs.feature_names[i],
                        totals[i] / static_cast<double>(attrs.rows.size()));
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  return ranked;
}

std::vector<SummarySeries> summary_data(const AttributionMatrix& attrs, const Matrix& X) {
  if (attrs.rows.size() != X.rows) throw validation_error("summary_data: row mismatch");
  auto ranking = shap_importance(attrs);
  std::vector<SummarySeries> out;
  for (const auto& [name, unused] : ranking) {
    std::size_t fi = static_cast<std::size_t>(
        std::find(attrs.feature_names.begin(), attrs.feature_names.end(), name) -
        attrs.feature_names.begin());
    double lo = X(0, fi), hi = X(0, fi);
    for (std::size_t r = 0; r < X.rows; ++r) {
      lo = std::min(lo, X(r, fi));
      hi = std::max(hi, X(r, fi));
    }
    SummarySeries series;
    series.feature = name;
    for (std::size_t r = 0; r < X.rows; ++r) {
      SummaryPoint pt;
      pt.phi = attrs.rows[r].phi[fi];
      pt.normalized_value = hi > lo ? (X(r, fi) - lo) / (hi - lo) : 0.5;
      series.points.push_back(pt);
    }
    out.push_back(std::move(series));
  }
  return out;
}

namespace {

// Quantile-bin index of each value over the explained rows, 10 bins.
std::vector<int> quantile_bins(std::span<const double> values) {
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  std::size_t n = sorted.size();
  std::vector<double> edges;
  for (std::size_t k = 1; k < 10; ++k) {
    std::size_t pos = std::min(n - 1, k * n / 10);
    edges.push_back(sorted[pos]);
  }
  std::vector<int> bins(values.size());
  for (std::size_t i = 0; i < values.size(); ++i)
    bins[i] = static_cast<int>(std::upper_bound(edges.begin(), edges.end(), values[i]) -
                               edges.begin());
  return bins;
}

}  // namespace

DependencyPoints dependency_data(const AttributionMatrix& attrs, const Matrix& X,
                                 const std::string& feature,
                                 const std::optional<std::string>& interaction) {
  if (attrs.rows.size() != X.rows || X.rows == 0)
    throw validation_error("dependency_data: row mismatch");
  auto find_feature = [&](const std::string& name) {
    auto it = std::find(attrs.feature_names.begin(), attrs.feature_names.end(), name);
    if (it == attrs.feature_names.end())
      throw validation_error("dependency_data: unknown feature " + name);
    return static_cast<std::size_t>(it - attrs.feature_names.begin());
  };
  std::size_t fi = find_feature(feature);
  std::size_t n = X.rows;

  std::vector<double> phi(n), fvalues(n);
  for (std::size_t r = 0; r < n; ++r) {
    phi[r] = attrs.rows[r].phi[fi];
    fvalues[r] = X(r, fi);
  }

  std::string chosen;
  if (interaction) {
    chosen = *interaction;
    find_feature(chosen);
  } else {
    std::vector<int> bins = quantile_bins(fvalues);
    double best_score = -1.0;
    for (std::size_t c = 0; c < attrs.feature_names.size(); ++c) {
      if (c == fi) continue;
      std::vector<double> cvals(n);
      for (std::size_t r = 0; r < n; ++r) cvals[r] = X(r, c);
      std::vector<double> sorted = cvals;
      std::sort(sorted.begin(), sorted.end());
      double median = sorted[(n - 1) / 2];
      if (sorted.front() == sorted.back()) continue;

      double sum_high[10] = {0}, sum_low[10] = {0};
      std::size_t n_high[10] = {0}, n_low[10] = {0};
      for (std::size_t r = 0; r < n; ++r) {
        int b = bins[r];
        if (cvals[r] > median) {
          sum_high[b] += phi[r];
          ++n_high[b];
        } else {
          sum_low[b] += phi[r];
          ++n_low[b];
        }
      }
      std::vector<double> gaps;
      for (int b = 0; b < 10; ++b)
        if (n_high[b] > 0 && n_low[b] > 0)
          gaps.push_back(sum_high[b] / static_cast<double>(n_high[b]) -
                         sum_low[b] / static_cast<double>(n_low[b]));
      if (gaps.size() < 2) continue;
      double gm = mean(gaps);
      double var = 0.0;
      for (double g : gaps) var += (g - gm) * (g - gm);
      var /= static_cast<double>(gaps.size());
      const std::string& cname = attrs.feature_names[c];
      if (var > best_score || (var == best_score && cname < chosen)) {
        best_score = var;
        chosen = cname;
      }
    }
    if (chosen.empty()) chosen = feature;  // degenerate: no varying candidate
  }

  std::size_t ci = find_feature(chosen);
  DependencyPoints out;
  out.feature = feature;
  out.interaction = chosen;
  out.feature_values = std::move(fvalues);
  out.phi_values = std::move(phi);
  out.interaction_values.resize(n);
  for (std::size_t r = 0; r < n; ++r) out.interaction_values[r] = X(r, ci);
  return out;
}

ForceData force_data(const Attribution& attr, std::span<const double> instance,
                     const std::vector<std::string>& feature_names) {
  if (attr.phi.size() != feature_names.size() || attr.phi.size() != instance.size())
    throw validation_error("force_data: width mismatch");
  ForceData out;
  out.base_value = attr.base_value;
  out.output_value = attr.output_value;
  for (std::size_t i = 0; i < attr.phi.size(); ++i)
    out.entries.push_back({feature_names[i], instance[i], attr.phi[i]});
  std::sort(out.entries.begin(), out.entries.end(), [](const ForceEntry& a, const ForceEntry& b) {
    double am = std::abs(a.phi), bm = std::abs(b.phi);
    if (am != bm) return am > bm;
    return a.feature < b.feature;
  });
  return out;
}

DecisionData decision_data(const AttributionMatrix& attrs,
                           std::span<const std::size_t> subset) {
  if (attrs.rows.empty()) throw validation_error("decision_data: empty attribution matrix");
  auto ranking = shap_importance(attrs);  // descending
  DecisionData out;
  out.base_value = attrs.rows[0].base_value;
  for (auto it = ranking.rbegin(); it != ranking.rend(); ++it)
    out.feature_order.push_back(it->first);  // ascending importance

  std::vector<std::size_t> order(out.feature_order.size());
  for (std::size_t k = 0; k < out.feature_order.size(); ++k)
    order[k] = static_cast<std::size_t>(
        std::find(attrs.feature_names.begin(), attrs.feature_names.end(),
                  out.feature_order[k]) -
        attrs.feature_names.begin());

  std::vector<std::size_t> rows(subset.begin(), subset.end());
  if (rows.empty()) {
    rows.resize(attrs.rows.size());
    std::iota(rows.begin(), rows.end(), 0);
  }
  for (std::size_t r : rows) {
    if (r >= attrs.rows.size()) throw validation_error("decision_data: subset out of range");
    const Attribution& attr = attrs.rows[r];
    DecisionPath path;
    path.instance_id = attr.instance_id;
    path.output_value = attr.output_value;
    double running = attr.base_value;
    for (std::size_t k : order) {
      running += attr.phi[k];
      path.cumulative.push_back(running);
    }
    out.paths.push_back(std::move(path));
  }
  return out;
}

std::string AttributionMatrix::to_json_string() const {
  ordered_json doc;
  doc["format"] = "glassbox.attributions";
  doc["version"] = 1;
  doc["feature_names"] = feature_names;
  doc["base_value"] = base_value;
  ordered_json rows_json = ordered_json::array();
  for (const auto& row : rows)
    rows_json.push_back({{"instance_id", row.instance_id},
                         {"base_value", row.base_value},
                         {"output_value", row.output_value},
                         {"phi", row.phi}});
  doc["rows"] = std::move(rows_json);
  return doc.dump(2);
}

AttributionMatrix AttributionMatrix::from_json_string(const std::string& text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const std::exception& e) {
    throw validation_error(std::string("attribution parse error: ") + e.what());
  }
  if (doc.value("format", "") != "glassbox.attributions" || doc.value("version", 0) != 1)
    throw validation_error("attribution parse error: unrecognized document");
  AttributionMatrix out;
  out.feature_names = doc.at("feature_names").get<std::vector<std::string>>();
  out.base_value = doc.at("base_value").get<double>();
  for (const auto& jrow : doc.at("rows")) {
    Attribution attr;
    attr.instance_id = jrow.at("instance_id").get<std::int64_t>();
    attr.base_value = jrow.at("base_value").get<double>();
    attr.output_value = jrow.at("output_value").get<double>();
    attr.phi = jrow.at("phi").get<std::vector<double>>();
    out.rows.push_back(std::move(attr));
  }
  return out;
}

}  // namespace glassbox
