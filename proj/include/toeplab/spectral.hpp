#pragma once

#include "toeplab/hardy_sphere.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace toeplab {

/// Test function f for the spectral measure trace f(Q). Polynomials are the
/// default; sampled functions are any continuous callable on a stated range.
class TestFunction {
 public:
  /// a_0 + a_1 x + ... + a_p x^p
  static TestFunction polynomial(std::vector<double> coeffs);
  static TestFunction sampled(std::function<double(double)> f, double lo, double hi);

  static TestFunction one() { return polynomial({1.0}); }
  static TestFunction power(int p);

  double operator()(double x) const;

  bool is_polynomial() const { return polynomial_; }
  const std::vector<double>& coefficients() const { return coeffs_; }
  std::size_t degree() const { return coeffs_.empty() ? 0 : coeffs_.size() - 1; }
  double lo() const { return lo_; }
  double hi() const { return hi_; }

 private:
  bool polynomial_ = true;
  std::vector<double> coeffs_;
  std::function<double(double)> f_;
  double lo_ = 0.0;
  double hi_ = 0.0;
};

inline constexpr std::size_t kDefaultDegreeCap = 16;

/// sum_j a_j trace(Q^j) by repeated products; no eigensolve.
double measure_poly(const ToeplitzBlock& block, const TestFunction& f, std::size_t degree_cap = kDefaultDegreeCap);

/// Eigenvalues of the Hermitian block in ascending order.
Eigen::VectorXd block_eigenvalues(const ToeplitzBlock& block);

/// sum_i f(lambda_i) over the eigenvalues of the block.
double measure_eigen(const ToeplitzBlock& block, const TestFunction& f);

/// (2 pi / k)^m * value
double scaled_measure(double value, int m, std::int64_t k);

struct Sample {
  std::int64_t k;
  double value;
};

struct AsymptoticFit {
  std::vector<double> coefficients;  // c_0 .. c_r of sum c_i k^{-i}
  double residual_norm = 0.0;        // max |model - sample|
  std::vector<std::int64_t> k_range;
  int order = 0;
  double c0_uncertainty = 0.0;  // |c_0 - c_0 refitted on the upper half of k|
  double condition_number = 0.0;
};

inline constexpr double kMaxFitCondition = 1e12;

/// Least-squares fit of sum_{i<=order} c_i k^{-i}.
AsymptoticFit fit_expansion(std::span<const Sample> samples, int order = 2);

/// Neville tableau for polynomial extrapolation in h = 1/k to h = 0.
/// rows[i][j] is the order-j estimate ending at sample i.
struct RichardsonTable {
  std::vector<std::vector<double>> rows;
  double limit = 0.0;
  double error_estimate = 0.0;
};

/// Uses the last order+1 samples (by increasing k); order <= 3.
RichardsonTable richardson_table(std::span<const Sample> samples, int order);

}  // namespace toeplab
