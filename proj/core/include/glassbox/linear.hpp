#pragma once

#include <span>
#include <vector>

#include "glassbox/common.hpp"

namespace glassbox {

struct LinearModel {
  std::vector<double> weights;
  double intercept = 0.0;
  double l2 = 0.0;
  int iterations = 0;
  double grad_norm = 0.0;
  bool converged = false;

  double margin_row(std::span<const double> row) const;
  double proba_row(std::span<const double> row) const { return sigmoid(margin_row(row)); }
  std::vector<double> predict_proba(const Matrix& X) const;
  Predictor predictor() const;
};

struct LogisticConfig {
  double l2 = 1e-4;      // on weights only, intercept unpenalized
  int max_iters = 100;
  double tol = 1e-6;     // max-abs gradient of the penalized mean loss
};

// Gradient descent with Armijo backtracking on the L2-penalized mean
// logistic loss, run on the features as given. Stops at the tolerance or
// the iteration budget, whichever comes first, and reports which through
// `converged`; callers that need a certified optimum must check the flag.
LinearModel train_logistic(const Matrix& X, std::span<const int> y, const LogisticConfig& config);

// Penalized logistic objective and gradient, exposed for the
// finite-difference oracle in the test suite.
double logistic_objective(const Matrix& X, std::span<const int> y,
                          std::span<const double> weights, double intercept, double l2);
std::vector<double> logistic_gradient(const Matrix& X, std::span<const int> y,
                                      std::span<const double> weights, double intercept,
                                      double l2);

struct RidgeFit {
  std::vector<double> weights;
  double intercept = 0.0;
};

// Weighted ridge regression: minimizes sum_i w_i (y_i - b - x_i.beta)^2 +
// lambda |beta|^2 with the intercept unpenalized. Throws on a numerically
// singular system.
RidgeFit weighted_ridge(const Matrix& X, std::span<const double> y,
                        std::span<const double> sample_weights, double lambda,
                        bool fit_intercept = true);

}  // namespace glassbox
