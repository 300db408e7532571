#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "glassbox/common.hpp"

namespace glassbox {

struct BackgroundSet {
  Matrix rows;
};

// Deterministic sample (without replacement, original row order preserved)
// used as the marginalization background for the value function.
BackgroundSet sample_background(const Matrix& X, std::size_t size, std::uint64_t seed);

// Attribution units follow the predictor handed in: pass a probability
// predictor for probability-space phi, a margin predictor for log-odds.
struct Attribution {
  std::vector<double> phi;
  double base_value = 0.0;    // mean model output over the background
  double output_value = 0.0;  // model output at the instance
  std::int64_t instance_id = 0;
};

struct AttributionMatrix {
  std::vector<Attribution> rows;
  std::vector<std::string> feature_names;
  double base_value = 0.0;

  std::string to_json_string() const;
  static AttributionMatrix from_json_string(const std::string& text);
};

struct KernelShapConfig {
  std::size_t n_coalitions = 2048;  // excludes the empty and full coalitions
  std::uint64_t seed = 0;
  double ridge = 1e-10;
};

// Exact enumeration over all 2^M coalitions; refuses M > 20.
Attribution exact_shapley(const Predictor& f, std::span<const double> instance,
                          const BackgroundSet& background, std::int64_t instance_id = 0);

// KernelSHAP: Shapley-kernel weighted least squares over sampled coalitions,
// with the empty and full coalitions enforced as equality constraints. When
// n_coalitions covers every proper coalition the result equals the exact
// enumeration. Coalition strata are filled deterministically from the
// smallest and largest sizes inward; leftover budget is sampled by seed.
Attribution kernel_shap(const Predictor& f, std::span<const double> instance,
                        const BackgroundSet& background, const KernelShapConfig& config,
                        std::int64_t instance_id = 0);

enum class ShapMethod { exact, kernel };

// Explains each row of X; per-instance coalition seeds derive from
// stable_hash(seed, instance_id), so results are independent of scheduling.
AttributionMatrix explain_matrix(const Predictor& f, const Matrix& X,
                                 std::vector<std::string> feature_names,
                                 const BackgroundSet& background, ShapMethod method,
                                 const KernelShapConfig& config,
                                 std::span<const std::int64_t> instance_ids = {});

// Mean |phi| per feature, descending; ties by name.
std::vector<std::pair<std::string, double>> shap_importance(const AttributionMatrix& attrs);

struct SummaryPoint {
  double phi = 0.0;
  double normalized_value = 0.0;  // min-max over the explained rows; constant -> 0.5
};

struct SummarySeries {
  std::string feature;
  std::vector<SummaryPoint> points;  // one per explained instance
};

// Features ordered by mean |phi| descending (the beeswarm row order).
std::vector<SummarySeries> summary_data(const AttributionMatrix& attrs, const Matrix& X);

struct DependencyPoints {
  std::string feature;
  std::string interaction;
  std::vector<double> feature_values;
  std::vector<double> phi_values;
  std::vector<double> interaction_values;
};

// interaction = std::nullopt selects the strongest interaction feature:
// the candidate maximizing the variance, across 10 quantile bins of the
// plotted feature, of (mean phi | candidate high) - (mean phi | candidate
// low) under a median split of the candidate.
DependencyPoints dependency_data(const AttributionMatrix& attrs, const Matrix& X,
                                 const std::string& feature,
                                 const std::optional<std::string>& interaction);

struct ForceEntry {
  std::string feature;
  double value = 0.0;
  double phi = 0.0;
};

struct ForceData {
  double base_value = 0.0;
  double output_value = 0.0;
  std::vector<ForceEntry> entries;  // sorted by |phi| descending
};

ForceData force_data(const Attribution& attr, std::span<const double> instance,
                     const std::vector<std::string>& feature_names);

struct DecisionPath {
  std::int64_t instance_id = 0;
  std::vector<double> cumulative;  // base + running phi sums, one per feature
  double output_value = 0.0;
};

struct DecisionData {
  double base_value = 0.0;
  std::vector<std::string> feature_order;  // global mean |phi| ascending
  std::vector<DecisionPath> paths;
};

DecisionData decision_data(const AttributionMatrix& attrs,
                           std::span<const std::size_t> subset);

}  // namespace glassbox
