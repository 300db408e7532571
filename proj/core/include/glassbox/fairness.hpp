#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "glassbox/census.hpp"
#include "glassbox/common.hpp"

namespace glassbox {

struct AuditConfig {
  std::size_t sample_size = 2000;
  std::uint64_t seed = 0;
  std::vector<std::string> sensitive_features = {"race_*", "sex_*", "nac_*"};
};

struct DependenceEntry {
  std::string feature;
  double raw = 0.0;
  double normalized = 0.0;  // raw / max |raw|, in [-1, 1]
  bool sensitive = false;
};

struct DependenceReport {
  std::vector<DependenceEntry> entries;  // encoded column order
  std::size_t sample_size = 0;
  std::uint64_t seed = 0;
};

// Column j minus its least-squares projection onto the remaining columns
// plus intercept. Rank-deficient designs fall back to a ridge solve
// (lambda = 1e-8). Throws if column j is constant.
std::vector<double> orthogonal_residual(const Matrix& X, std::size_t j);

// Eq. 2 style dependence probe. For each encoded column j: shuffle the
// orthogonal residual of j across rows and re-add the component predictable
// from the other columns, keeping j's correlation structure intact while
// destroying its unique signal; score = sum of sign(x_j - x'_j) * (F(x) -
// F(x')) over the audit sample divided by the total |x_j - x'_j| moved, i.e.
// the model's response per unit of orthogonal displacement. A feature the
// model leans on positively scores positive, and auditing a linear model
// recovers its coefficients. When j belongs to a one-hot group its sibling
// columns are excluded from the projection design (they determine j exactly,
// which would make every residual vanish). Constant columns and columns with
// no unique variation score 0.
DependenceReport audit(const Predictor& f, const EncodedDataset& data, const AuditConfig& config);

// Features with |normalized| >= threshold missing from the top-10 of both
// rankings, ordered by |normalized| descending.
std::vector<std::string> compare_with_importance(const DependenceReport& dep,
                                                 const std::vector<std::string>& shap_rank,
                                                 const std::vector<std::string>& pi_rank,
                                                 double threshold = 0.25);

bool glob_match(const std::string& pattern, const std::string& text);

}  // namespace glassbox
