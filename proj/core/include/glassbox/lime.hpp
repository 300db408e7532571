#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "glassbox/census.hpp"
#include "glassbox/common.hpp"

namespace glassbox {

// Training-set statistics that drive neighborhood synthesis: numeric scale
// and quartile bins, categorical marginals, and per-column standardization
// for the distance metric. Interpretable features are source-level units
// (one per numeric column / one-hot group), not encoded columns.
struct LimeUnit {
  std::string name;
  GroupKind kind = GroupKind::numeric;
  std::vector<std::size_t> members;      // encoded columns
  double mean = 0.0;                     // numeric
  double stddev = 1.0;                   // numeric
  std::vector<double> quartiles;         // numeric: 3 inner edges
  std::vector<double> marginals;         // onehot: per category; binary: P(value=1)
  double missing_rate = 0.0;             // onehot: train frequency of the all-zero group
};

struct LimeStats {
  std::vector<LimeUnit> units;
  std::vector<double> column_mean;    // per encoded column
  std::vector<double> column_scale;   // per encoded column, never 0
  std::size_t width = 0;
};

LimeStats lime_stats(const EncodedDataset& train);

struct Neighborhood {
  Matrix X;                        // perturbed encoded rows; row 0 is the instance
  Matrix Z;                        // n x units binary agreement representation
  std::vector<double> distances;   // standardized euclidean distance to the instance
};

// z_u = 1 iff the perturbed row matches the instance on unit u: equal
// category for groups, same training quartile bin for numerics.
Neighborhood sample_neighborhood(std::span<const double> instance, const LimeStats& stats,
                                 std::size_t n, std::uint64_t seed);

struct LimeConfig {
  std::size_t n_samples = 5000;
  double kernel_width = 0.0;  // <= 0: AUTO, 0.75 * sqrt(encoded feature count)
  std::size_t top_k = 6;
  std::optional<std::uint64_t> seed;  // empty: fresh entropy per run
  double ridge = 1e-6;
};

struct LimeExplanation {
  double intercept = 0.0;
  std::vector<std::pair<std::string, double>> coefficients;  // selection order, <= top_k
  double local_r2 = 0.0;
  double predicted_local = 0.0;
  std::int64_t instance_id = 0;

  std::vector<std::string> selected_features() const;
};

// Kernel-weighted ridge with greedy forward selection on weighted R^2 gain,
// refit on the selected set. A constant predictor yields all-zero
// coefficients and local_r2 = 0 by the degenerate-R^2 rule.
LimeExplanation lime_explain(const Predictor& f, std::span<const double> instance,
                             const LimeStats& stats, const LimeConfig& config,
                             std::int64_t instance_id = 0);

struct StabilityReport {
  int runs = 0;
  double mean_pairwise_jaccard_topk = 0.0;
  std::vector<std::string> unit_names;
  std::vector<double> coefficient_stddev;  // per unit, over runs
  int distinct_topk_sets = 0;
};

// Re-runs lime_explain `runs` times. A fixed config.seed is reused verbatim
// (all runs identical); an empty seed draws fresh entropy per run.
StabilityReport stability(const Predictor& f, std::span<const double> instance,
                          const LimeStats& stats, int runs, const LimeConfig& config);

// Aggregates already-computed runs; lets the pipeline use deterministic
// per-run seeds while keeping the same report shape.
StabilityReport summarize_stability(const std::vector<LimeExplanation>& runs,
                                    const LimeStats& stats);

double lime_kernel_width(const LimeConfig& config, std::size_t encoded_width);

}  // namespace glassbox
