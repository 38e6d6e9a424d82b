#include "toeplab/spectral.hpp"

#include "toeplab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <string>

namespace toeplab {

TestFunction TestFunction::polynomial(std::vector<double> coeffs) {
  if (coeffs.empty()) coeffs.push_back(0.0);
  TestFunction f;
  f.polynomial_ = true;
  f.coeffs_ = std::move(coeffs);
  return f;
}

TestFunction TestFunction::sampled(std::function<double(double)> fn, double lo, double hi) {
  if (!(lo <= hi)) throw ValidationError("TestFunction::sampled: empty support interval");
  TestFunction f;
  f.polynomial_ = false;
  f.f_ = std::move(fn);
  f.lo_ = lo;
  f.hi_ = hi;
  return f;
}

TestFunction TestFunction::power(int p) {
  std::vector<double> c(static_cast<std::size_t>(p) + 1, 0.0);
  c.back() = 1.0;
  return polynomial(std::move(c));
}

double TestFunction::operator()(double x) const {
  if (!polynomial_) return f_(x);
  double acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + *it;
  return acc;
}

double measure_poly(const ToeplitzBlock& block, const TestFunction& f, std::size_t degree_cap) {
  if (!f.is_polynomial()) throw ValidationError("spectral::measure_poly: test function is not a polynomial");
  if (f.degree() > degree_cap)
    throw ValidationError("spectral::measure_poly: polynomial degree " + std::to_string(f.degree()) +
                          " exceeds cap " + std::to_string(degree_cap));
  const auto& a = f.coefficients();
  const auto dim = static_cast<double>(block.dim());
  if (block.is_diagonal()) {
    const Eigen::VectorXd d = block.matrix.diagonal().real();
    Eigen::VectorXd power = Eigen::VectorXd::Ones(d.size());
    double total = a[0] * dim;
    for (std::size_t j = 1; j < a.size(); ++j) {
      power = power.cwiseProduct(d);
      total += a[j] * power.sum();
    }
    return total;
  }
  double total = a[0] * dim;
  if (a.size() == 1) return total;
  const Eigen::MatrixXcd& q = block.matrix;
  total += a[1] * q.trace().real();
  Eigen::MatrixXcd power = q;
  for (std::size_t j = 2; j < a.size(); ++j) {
    if (j + 1 == a.size()) {
      // trace(P Q) without forming the last product
      total += a[j] * (power.cwiseProduct(q.transpose())).sum().real();
    } else {
      power = (power * q).eval();
      total += a[j] * power.trace().real();
    }
  }
  return total;
}

Eigen::VectorXd block_eigenvalues(const ToeplitzBlock& block) {
  if (block.is_diagonal()) {
    Eigen::VectorXd d = block.matrix.diagonal().real();
    std::sort(d.data(), d.data() + d.size());
    return d;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(block.matrix, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw NumericalError("spectral::measure_eigen: eigensolver did not converge at k = " + std::to_string(block.k));
  return solver.eigenvalues();
}

double measure_eigen(const ToeplitzBlock& block, const TestFunction& f) {
  const Eigen::VectorXd lambda = block_eigenvalues(block);
  double total = 0.0;
  for (Eigen::Index i = 0; i < lambda.size(); ++i) total += f(lambda[i]);
  return total;
}

double scaled_measure(double value, int m, std::int64_t k) {
  if (k < 1) throw ValidationError("spectral::scaled_measure: k must be >= 1");
  if (m < 0) throw ValidationError("spectral::scaled_measure: m must be >= 0");
  return std::pow(2.0 * std::numbers::pi / static_cast<double>(k), m) * value;
}

namespace {

struct LeastSquares {
  Eigen::VectorXd coeffs;
  double condition = 0.0;
};

LeastSquares solve_design(std::span<const Sample> samples, int order) {
  const auto rows = static_cast<Eigen::Index>(samples.size());
  Eigen::MatrixXd design(rows, order + 1);
  Eigen::VectorXd y(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const double h = 1.0 / static_cast<double>(samples[static_cast<std::size_t>(i)].k);
    double p = 1.0;
    for (int j = 0; j <= order; ++j) {
      design(i, j) = p;
      p *= h;
    }
    y[i] = samples[static_cast<std::size_t>(i)].value;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(design, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  LeastSquares out;
  out.condition = s[s.size() - 1] > 0 ? s[0] / s[s.size() - 1] : INFINITY;
  out.coeffs = svd.solve(y);
  return out;
}

}  // namespace

AsymptoticFit fit_expansion(std::span<const Sample> samples, int order) {
  if (order < 0) throw ValidationError("spectral::fit_expansion: order must be >= 0");
  std::vector<Sample> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end(), [](const Sample& a, const Sample& b) { return a.k < b.k; });
  std::set<std::int64_t> distinct;
  for (const auto& s : sorted) {
    if (s.k < 1) throw ValidationError("spectral::fit_expansion: k values must be >= 1");
    distinct.insert(s.k);
  }
  if (distinct.size() < static_cast<std::size_t>(order) + 2)
    throw ValidationError("spectral::fit_expansion: need at least order+2 distinct k values");
  if (*distinct.begin() < 2 * order)
    throw ValidationError("spectral::fit_expansion: smallest k must be >= 2*order");

  const LeastSquares ls = solve_design(sorted, order);
  if (!(ls.condition <= kMaxFitCondition))
    throw NumericalError("spectral::fit_expansion: design condition number " + std::to_string(ls.condition) +
                         " exceeds 1e12; widen the k range");

  AsymptoticFit fit;
  fit.order = order;
  fit.condition_number = ls.condition;
  fit.coefficients.assign(ls.coeffs.data(), ls.coeffs.data() + ls.coeffs.size());
  for (const auto& s : sorted) {
    fit.k_range.push_back(s.k);
    double model = 0.0;
    double p = 1.0;
    for (double c : fit.coefficients) {
      model += c * p;
      p /= static_cast<double>(s.k);
    }
    fit.residual_norm = std::max(fit.residual_norm, std::abs(model - s.value));
  }

  // Stability diagnostic: refit on the upper half of the k range.
  const std::size_t half = sorted.size() / 2;
  std::span<const Sample> upper(sorted.data() + half, sorted.size() - half);
  std::set<std::int64_t> upper_distinct;
  for (const auto& s : upper) upper_distinct.insert(s.k);
  if (upper_distinct.size() >= static_cast<std::size_t>(order) + 2) {
    const LeastSquares refit = solve_design(upper, order);
    if (refit.condition <= kMaxFitCondition) fit.c0_uncertainty = std::abs(refit.coeffs[0] - fit.coefficients[0]);
  }
  return fit;
}

RichardsonTable richardson_table(std::span<const Sample> samples, int order) {
  if (order < 0 || order > 3) throw ValidationError("spectral::richardson_table: order must be in [0, 3]");
  if (samples.size() < static_cast<std::size_t>(order) + 1)
    throw ValidationError("spectral::richardson_table: need at least order+1 samples");
  std::vector<Sample> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end(), [](const Sample& a, const Sample& b) { return a.k < b.k; });
  for (std::size_t i = 1; i < sorted.size(); ++i)
    if (sorted[i].k == sorted[i - 1].k) throw ValidationError("spectral::richardson_table: duplicate k");
  std::vector<Sample> window(sorted.end() - (order + 1), sorted.end());

  const std::size_t m = window.size();
  std::vector<double> h(m);
  for (std::size_t i = 0; i < m; ++i) h[i] = 1.0 / static_cast<double>(window[i].k);
  RichardsonTable table;
  table.rows.assign(m, std::vector<double>(m, 0.0));
  for (std::size_t i = 0; i < m; ++i) table.rows[i][0] = window[i].value;
  for (std::size_t j = 1; j < m; ++j)
    for (std::size_t i = j; i < m; ++i) {
      const double hi = h[i];
      const double lo = h[i - j];
      table.rows[i][j] = table.rows[i][j - 1] + (table.rows[i][j - 1] - table.rows[i - 1][j - 1]) * hi / (lo - hi);
    }
  table.limit = table.rows[m - 1][m - 1];
  table.error_estimate = m >= 2 ? std::abs(table.rows[m - 1][m - 1] - table.rows[m - 1][m - 2]) : 0.0;
  return table;
}

}  // namespace toeplab
