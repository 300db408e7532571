#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace glassbox {

enum class ErrorKind { validation, io, numeric };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& msg) : std::runtime_error(msg), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

inline Error validation_error(const std::string& msg) { return Error(ErrorKind::validation, msg); }
inline Error io_error(const std::string& msg) { return Error(ErrorKind::io, msg); }
inline Error numeric_error(const std::string& msg) { return Error(ErrorKind::numeric, msg); }

// Dense row-major matrix. The whole toolkit passes features around in this
// shape; Eigen is an implementation detail of the linear solvers only.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

  double* row_ptr(std::size_t r) { return data.data() + r * cols; }
  const double* row_ptr(std::size_t r) const { return data.data() + r * cols; }
  std::span<const double> row(std::size_t r) const { return {row_ptr(r), cols}; }
  std::span<double> row(std::size_t r) { return {row_ptr(r), cols}; }

  void push_row(std::span<const double> values) {
    if (rows == 0 && cols == 0) cols = values.size();
    if (values.size() != cols) throw validation_error("push_row: width mismatch");
    data.insert(data.end(), values.begin(), values.end());
    ++rows;
  }

  bool operator==(const Matrix& other) const = default;
};

// Batch predictor: rows of encoded features -> probability of the positive
// class per row. Implementations must be pure and safe to call concurrently.
using Predictor = std::function<std::vector<double>(const Matrix&)>;

inline double predict_one(const Predictor& f, std::span<const double> row) {
  Matrix m(1, row.size());
  std::copy(row.begin(), row.end(), m.data.begin());
  return f(m)[0];
}

inline double sigmoid(double z) {
  if (z >= 0) {
    double e = std::exp(-z);
    return 1.0 / (1.0 + e);
  }
  double e = std::exp(z);
  return e / (1.0 + e);
}

inline double logit(double p) { return std::log(p / (1.0 - p)); }

inline void require_finite(std::span<const double> values, const std::string& what) {
  for (double v : values)
    if (!std::isfinite(v)) throw numeric_error(what + ": non-finite value");
}

}  // namespace glassbox
