#include "glassbox/fairness.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Dense>

#include "glassbox/parallel.hpp"
#include "glassbox/rng.hpp"

namespace glassbox {

namespace {

struct Projection {
  std::vector<double> fitted;
  std::vector<double> residual;
};

// Least squares of column j on the design columns plus intercept; QR first,
// ridge fallback on rank deficiency.
Projection project_column(const Matrix& X, std::size_t j,
                          const std::vector<std::size_t>& design_cols) {
  std::size_t n = X.rows;
  std::size_t d = design_cols.size();
  Eigen::MatrixXd D(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d + 1));
  Eigen::VectorXd y(static_cast<Eigen::Index>(n));
  for (std::size_t r = 0; r < n; ++r) {
    y(static_cast<Eigen::Index>(r)) = X(r, j);
    for (std::size_t k = 0; k < d; ++k)
      D(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)) = X(r, design_cols[k]);
    D(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(d)) = 1.0;
  }

  Eigen::VectorXd beta;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(D);
  if (qr.rank() == D.cols()) {
    beta = qr.solve(y);
  } else {
    Eigen::MatrixXd A = D.transpose() * D;
    for (Eigen::Index i = 0; i < A.rows(); ++i) A(i, i) += 1e-8;  // documented ridge fallback
    beta = A.ldlt().solve(D.transpose() * y);
  }
  if (!beta.allFinite()) throw numeric_error("orthogonal projection failed");

  Eigen::VectorXd fitted = D * beta;
  Projection out;
  out.fitted.resize(n);
  out.residual.resize(n);
  for (std::size_t r = 0; r < n; ++r) {
    out.fitted[r] = fitted(static_cast<Eigen::Index>(r));
    out.residual[r] = X(r, j) - out.fitted[r];
  }
  return out;
}

bool column_constant(const Matrix& X, std::size_t j) {
  for (std::size_t r = 1; r < X.rows; ++r)
    if (X(r, j) != X(0, j)) return false;
  return true;
}

}  // namespace

std::vector<double> orthogonal_residual(const Matrix& X, std::size_t j) {
  if (X.cols < 2) throw validation_error("orthogonal_residual: needs at least 2 columns");
  if (j >= X.cols) throw validation_error("orthogonal_residual: bad column index");
  if (column_constant(X, j)) throw validation_error("orthogonal_residual: column is constant");
  std::vector<std::size_t> design;
  for (std::size_t c = 0; c < X.cols; ++c)
    if (c != j) design.push_back(c);
  return project_column(X, j, design).residual;
}

DependenceReport audit(const Predictor& f, const EncodedDataset& data, const AuditConfig& config) {
  std::size_t n = data.X.rows;
  if (n == 0) throw validation_error("audit: empty data");
  if (config.sample_size < 30) throw validation_error("audit: sample_size must be >= 30");
  if (n < config.sample_size)
    throw validation_error("audit: data has " + std::to_string(n) +
                           " rows, fewer than sample_size " +
                           std::to_string(config.sample_size));

  // Deterministic audit sample, original order preserved.
  Matrix S;
  if (config.sample_size == n) {
    S = data.X;
  } else {
    Rng rng(stable_hash({config.seed, 0x41554454ull}));
    auto idx = rng.sample_without_replacement(n, config.sample_size);
    std::sort(idx.begin(), idx.end());
    S = Matrix(config.sample_size, data.X.cols);
    for (std::size_t i = 0; i < idx.size(); ++i)
      std::copy(data.X.row_ptr(idx[i]), data.X.row_ptr(idx[i]) + data.X.cols, S.row_ptr(i));
  }
  std::size_t m = S.rows;
  std::vector<double> f0 = f(S);

  std::size_t width = data.X.cols;
  std::vector<double> raw(width, 0.0);
  parallel_for(width, [&](std::size_t j) {
    if (column_constant(S, j)) return;  // nothing to perturb

    std::vector<std::size_t> design;
    const FeatureGroup& group = data.groups[data.group_of[j]];
    for (std::size_t c = 0; c < width; ++c) {
      if (c == j) continue;
      if (group.kind == GroupKind::onehot &&
          std::find(group.members.begin(), group.members.end(), c) != group.members.end())
        continue;  // one-hot siblings determine j exactly
      if (column_constant(S, c)) continue;
      design.push_back(c);
    }
    Projection proj = project_column(S, j, design);

    Rng rng(stable_hash({config.seed, static_cast<std::uint64_t>(j), 0x52455349ull}));
    auto perm = rng.permutation(m);
    Matrix Xp = S;
    for (std::size_t i = 0; i < m; ++i) Xp(i, j) = proj.fitted[i] + proj.residual[perm[i]];
    std::vector<double> f1 = f(Xp);

    // Per-unit response: output change per unit of orthogonal displacement,
    // which for a linear model recovers its coefficient on column j. A
    // column with no unique variation (residual ~ 0) cannot be audited and
    // scores 0.
    double total = 0.0;
    double displacement = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      double dx = S(i, j) - Xp(i, j);
      double s = dx > 0.0 ? 1.0 : (dx < 0.0 ? -1.0 : 0.0);
      total += s * (f0[i] - f1[i]);
      displacement += std::abs(dx);
    }
    if (displacement > 1e-12 * static_cast<double>(m)) raw[j] = total / displacement;
  });

  double max_abs = 0.0;
  for (double v : raw) max_abs = std::max(max_abs, std::abs(v));

  DependenceReport report;
  report.sample_size = m;
  report.seed = config.seed;
  for (std::size_t j = 0; j < width; ++j) {
    DependenceEntry entry;
    entry.feature = data.feature_names[j];
    entry.raw = raw[j];
    entry.normalized = max_abs > 0.0 ? raw[j] / max_abs : 0.0;
    for (const auto& pattern : config.sensitive_features)
      if (glob_match(pattern, entry.feature)) {
        entry.sensitive = true;
        break;
      }
    report.entries.push_back(std::move(entry));
  }
  return report;
}

std::vector<std::string> compare_with_importance(const DependenceReport& dep,
                                                 const std::vector<std::string>& shap_rank,
                                                 const std::vector<std::string>& pi_rank,
                                                 double threshold) {
  auto top10 = [](const std::vector<std::string>& ranked) {
    return std::vector<std::string>(ranked.begin(),
                                    ranked.begin() + std::min<std::size_t>(10, ranked.size()));
  };
  auto shap_top = top10(shap_rank);
  auto pi_top = top10(pi_rank);
  auto absent = [](const std::vector<std::string>& list, const std::string& name) {
    return std::find(list.begin(), list.end(), name) == list.end();
  };

  std::vector<const DependenceEntry*> flagged;
  for (const auto& entry : dep.entries)
    if (std::abs(entry.normalized) >= threshold && absent(shap_top, entry.feature) &&
        absent(pi_top, entry.feature))
      flagged.push_back(&entry);
  std::sort(flagged.begin(), flagged.end(), [](const DependenceEntry* a, const DependenceEntry* b) {
    double am = std::abs(a->normalized), bm = std::abs(b->normalized);
    if (am != bm) return am > bm;
    return a->feature < b->feature;
  });
  std::vector<std::string> out;
  for (const auto* entry : flagged) out.push_back(entry->feature);
  return out;
}

bool glob_match(const std::string& pattern, const std::string& text) {
  // Iterative '*' matcher; no character classes needed for feature names.
  std::size_t p = 0, t = 0, star = std::string::npos, mark = 0;
  while (t < text.size()) {
    if (p < pattern.size() && (pattern[p] == text[t])) {
      ++p;
      ++t;
    } else if (p < pattern.size() && pattern[p] == '*') {
      star = p++;
      mark = t;
    } else if (star != std::string::npos) {
      p = star + 1;
      t = ++mark;
    } else {
      return false;
    }
  }
  while (p < pattern.size() && pattern[p] == '*') ++p;
  return p == pattern.size();
}

}  // namespace glassbox
