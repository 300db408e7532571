#include "glassbox/linear.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

namespace glassbox {

namespace {

Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
eigen_view(const Matrix& m) {
  return {m.data.data(), static_cast<Eigen::Index>(m.rows), static_cast<Eigen::Index>(m.cols)};
}

}  // namespace

double LinearModel::margin_row(std::span<const double> row) const {
  if (row.size() != weights.size()) throw validation_error("linear predict: width mismatch");
  double z = intercept;
  for (std::size_t i = 0; i < row.size(); ++i) z += weights[i] * row[i];
  return z;
}

std::vector<double> LinearModel::predict_proba(const Matrix& X) const {
  std::vector<double> out(X.rows);
  for (std::size_t r = 0; r < X.rows; ++r) out[r] = proba_row(X.row(r));
  return out;
}

Predictor LinearModel::predictor() const {
  LinearModel copy = *this;
  return [copy](const Matrix& X) { return copy.predict_proba(X); };
}

double logistic_objective(const Matrix& X, std::span<const int> y,
                          std::span<const double> weights, double intercept, double l2) {
  double total = 0.0;
  for (std::size_t r = 0; r < X.rows; ++r) {
    double m = intercept;
    const double* row = X.row_ptr(r);
    for (std::size_t c = 0; c < X.cols; ++c) m += weights[c] * row[c];
    double z = y[r] == 1 ? -m : m;
    total += z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
  }
  total /= static_cast<double>(X.rows);
  double penalty = 0.0;
  for (double w : weights) penalty += w * w;
  return total + 0.5 * l2 * penalty;
}

std::vector<double> logistic_gradient(const Matrix& X, std::span<const int> y,
                                      std::span<const double> weights, double intercept,
                                      double l2) {
  std::vector<double> grad(X.cols + 1, 0.0);  // weights then intercept
  for (std::size_t r = 0; r < X.rows; ++r) {
    double m = intercept;
    const double* row = X.row_ptr(r);
    for (std::size_t c = 0; c < X.cols; ++c) m += weights[c] * row[c];
    double diff = sigmoid(m) - static_cast<double>(y[r]);
    for (std::size_t c = 0; c < X.cols; ++c) grad[c] += diff * row[c];
    grad[X.cols] += diff;
  }
  double inv_n = 1.0 / static_cast<double>(X.rows);
  for (double& g : grad) g *= inv_n;
  for (std::size_t c = 0; c < X.cols; ++c) grad[c] += l2 * weights[c];
  return grad;
}

LinearModel train_logistic(const Matrix& X, std::span<const int> y,
                           const LogisticConfig& config) {
  if (X.rows == 0 || X.rows != y.size()) throw validation_error("train_logistic: bad shapes");
  bool has_pos = false, has_neg = false;
  for (int label : y) (label == 1 ? has_pos : has_neg) = true;
  if (!has_pos || !has_neg) throw validation_error("train_logistic: needs both classes");

  std::size_t n = X.rows, d = X.cols;
  auto Xe = eigen_view(X);
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d + 1));
  double pos = 0.0;
  for (int label : y) pos += label;
  double prevalence = std::clamp(pos / static_cast<double>(n), 1e-12, 1.0 - 1e-12);
  beta(static_cast<Eigen::Index>(d)) = logit(prevalence);

  auto wrap = [&](const Eigen::VectorXd& b) {
    LinearModel m;
    m.weights.assign(b.data(), b.data() + d);
    m.intercept = b(static_cast<Eigen::Index>(d));
    m.l2 = config.l2;
    return m;
  };
  auto objective = [&](const Eigen::VectorXd& b) {
    LinearModel m = wrap(b);
    return logistic_objective(X, y, m.weights, m.intercept, config.l2);
  };

  double inv_n = 1.0 / static_cast<double>(n);
  double f0 = objective(beta);
  double step0 = 1.0;  // warm-started across iterations
  LinearModel model;
  int iter = 0;
  for (; iter < config.max_iters; ++iter) {
    Eigen::VectorXd margins = Xe * beta.head(static_cast<Eigen::Index>(d));
    margins.array() += beta(static_cast<Eigen::Index>(d));
    Eigen::VectorXd diff(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < diff.size(); ++i)
      diff(i) = sigmoid(margins(i)) - static_cast<double>(y[static_cast<std::size_t>(i)]);

    Eigen::VectorXd grad(static_cast<Eigen::Index>(d + 1));
    grad.head(static_cast<Eigen::Index>(d)) = inv_n * (Xe.transpose() * diff);
    grad.head(static_cast<Eigen::Index>(d)) +=
        config.l2 * beta.head(static_cast<Eigen::Index>(d));
    grad(static_cast<Eigen::Index>(d)) = inv_n * diff.sum();
    if (!grad.allFinite()) throw numeric_error("train_logistic: non-finite gradient");

    model.grad_norm = grad.cwiseAbs().maxCoeff();
    if (model.grad_norm <= config.tol) {
      model.converged = true;
      break;
    }

    // Steepest descent with Armijo backtracking. No preconditioning or
    // feature scaling happens here, so convergence within the iteration
    // budget depends on the conditioning of X, as it does in the reference
    // pipeline this port follows.
    double gg = grad.squaredNorm();
    double scale = step0;
    bool accepted = false;
    for (int halvings = 0; halvings < 60; ++halvings) {
      Eigen::VectorXd candidate = beta - scale * grad;
      double f1 = objective(candidate);
      if (std::isfinite(f1) && f1 <= f0 - 1e-4 * scale * gg) {
        beta = candidate;
        f0 = f1;
        step0 = scale * 2.0;
        accepted = true;
        break;
      }
      scale *= 0.5;
    }
    if (!accepted) break;  // step underflow: the iteration has stalled
  }

  LinearModel out = wrap(beta);
  out.iterations = iter;
  out.grad_norm = model.grad_norm;
  out.converged = model.converged;
  return out;
}

RidgeFit weighted_ridge(const Matrix& X, std::span<const double> y,
                        std::span<const double> sample_weights, double lambda,
                        bool fit_intercept) {
  if (X.rows == 0 || X.rows != y.size() || X.rows != sample_weights.size())
    throw validation_error("weighted_ridge: bad shapes");
  std::size_t d = X.cols;
  std::size_t p = d + (fit_intercept ? 1 : 0);
  auto Xe = eigen_view(X);
  Eigen::VectorXd ye = Eigen::Map<const Eigen::VectorXd>(y.data(), static_cast<Eigen::Index>(y.size()));
  Eigen::VectorXd we = Eigen::Map<const Eigen::VectorXd>(sample_weights.data(),
                                                         static_cast<Eigen::Index>(y.size()));

  Eigen::MatrixXd A(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p));
  Eigen::VectorXd b(static_cast<Eigen::Index>(p));
  Eigen::MatrixXd Xw = we.asDiagonal() * Xe;
  A.topLeftCorner(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d)) =
      Xe.transpose() * Xw;
  b.head(static_cast<Eigen::Index>(d)) = Xw.transpose() * ye;
  for (std::size_t c = 0; c < d; ++c)
    A(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(c)) += lambda;
  if (fit_intercept) {
    Eigen::VectorXd xw_col = Xw.colwise().sum().transpose();
    A.topRightCorner(static_cast<Eigen::Index>(d), 1) = xw_col;
    A.bottomLeftCorner(1, static_cast<Eigen::Index>(d)) = xw_col.transpose();
    A(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d)) = we.sum();
    b(static_cast<Eigen::Index>(d)) = we.dot(ye);
  }

  Eigen::LDLT<Eigen::MatrixXd> solver(A);
  Eigen::VectorXd sol = solver.solve(b);
  double residual = (A * sol - b).cwiseAbs().maxCoeff();
  double scale = std::max(1.0, b.cwiseAbs().maxCoeff());
  if (!sol.allFinite() || residual > 1e-6 * scale)
    throw numeric_error("weighted_ridge: singular system; increase the ridge penalty");

  RidgeFit fit;
  fit.weights.assign(sol.data(), sol.data() + d);
  fit.intercept = fit_intercept ? sol(static_cast<Eigen::Index>(d)) : 0.0;
  return fit;
}

}  // namespace glassbox
