#include "toeplab/canonical_model.hpp"

#include "toeplab/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <set>
#include <string>

namespace toeplab {

double ModelIndex::norm() const {
  double s = 0.0;
  for (auto v : m) s += static_cast<double>(v) * static_cast<double>(v);
  return std::sqrt(s);
}

void ModelIndex::validate() const {
  if (m.empty()) throw ValidationError("canonical_model::ModelIndex: l must be >= 1");
  if (k_dim == 0) throw ValidationError("canonical_model::ModelIndex: k must be >= 1");
  if (std::all_of(m.begin(), m.end(), [](auto v) { return v == 0; }))
    throw ValidationError("canonical_model::ModelIndex: m = 0 is excluded");
}

GaussHermiteRule gauss_hermite(std::size_t count) {
  if (count == 0) throw ValidationError("canonical_model::gauss_hermite: need at least one node");
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(count, count);
  for (std::size_t i = 1; i < count; ++i) {
    const double b = std::sqrt(static_cast<double>(i) / 2.0);
    jacobi(i, i - 1) = b;
    jacobi(i - 1, i) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericalError("canonical_model::gauss_hermite: eigensolver failed");

  // orthonormal Hermite values p_0..p_count at x
  auto recurrence = [count](double x, std::vector<double>& p) {
    p.assign(count + 1, 0.0);
    p[0] = std::pow(std::numbers::pi, -0.25);
    if (count >= 1) p[1] = std::sqrt(2.0) * x * p[0];
    for (std::size_t j = 1; j < count; ++j)
      p[j + 1] = std::sqrt(2.0 / (j + 1.0)) * x * p[j] - std::sqrt(j / (j + 1.0)) * p[j - 1];
  };

  GaussHermiteRule rule;
  std::vector<double> p;
  for (std::size_t i = 0; i < count; ++i) {
    double x = solver.eigenvalues()(static_cast<Eigen::Index>(i));
    for (int it = 0; it < 3; ++it) {
      recurrence(x, p);
      const double deriv = std::sqrt(2.0 * static_cast<double>(count)) * p[count - 1];
      if (deriv == 0.0) break;
      x -= p[count] / deriv;
    }
    recurrence(x, p);
    double s = 0.0;
    for (std::size_t j = 0; j < count; ++j) s += p[j] * p[j];
    rule.nodes.push_back(x);
    rule.weights.push_back(1.0 / s);
  }
  // exact symmetry about the origin
  for (std::size_t i = 0; i < count / 2; ++i) {
    const std::size_t j = count - 1 - i;
    const double x = 0.5 * (rule.nodes[j] - rule.nodes[i]);
    const double w = 0.5 * (rule.weights[i] + rule.weights[j]);
    rule.nodes[i] = -x;
    rule.nodes[j] = x;
    rule.weights[i] = rule.weights[j] = w;
  }
  if (count % 2 == 1) rule.nodes[count / 2] = 0.0;
  return rule;
}

double fm_normalization(const ModelIndex& idx) {
  idx.validate();
  const double k = static_cast<double>(idx.k_dim);
  const double l = static_cast<double>(idx.m.size());
  return std::pow(idx.norm() / std::numbers::pi, k / 4.0) * std::pow(2.0 * std::numbers::pi, -l / 2.0);
}

std::complex<double> fm_eval(const ModelIndex& idx, std::span<const double> y, std::span<const double> theta,
                             bool normalized) {
  idx.validate();
  if (y.size() != idx.k_dim || theta.size() != idx.m.size())
    throw ValidationError("canonical_model::fm_eval: point has the wrong dimension");
  double y2 = 0.0;
  for (double v : y) y2 += v * v;
  double phase = 0.0;
  for (std::size_t i = 0; i < theta.size(); ++i) phase += static_cast<double>(idx.m[i]) * theta[i];
  const double c = normalized ? fm_normalization(idx) : 1.0;
  return std::polar(c * std::exp(-0.5 * y2 * idx.norm()), phase);
}

namespace {

void check_indices(const std::vector<ModelIndex>& indices, const char* op) {
  std::set<std::vector<std::int64_t>> seen;
  for (const auto& idx : indices) {
    idx.validate();
    if (idx.k_dim != indices.front().k_dim || idx.m.size() != indices.front().m.size())
      throw ValidationError(std::string("canonical_model::") + op + ": indices mix dimensions");
    if (!seen.insert(idx.m).second) throw ValidationError(std::string("canonical_model::") + op + ": duplicate index");
  }
}

std::vector<std::string> quadrature_warnings(const std::vector<ModelIndex>& indices, const QuadratureSpec& quad) {
  std::vector<std::string> warnings;
  if (quad.hermite_nodes < kMinHermiteNodes)
    warnings.push_back("hermite_nodes = " + std::to_string(quad.hermite_nodes) + " is below " +
                       std::to_string(kMinHermiteNodes));
  std::int64_t max_m = 0;
  for (const auto& idx : indices)
    for (auto v : idx.m) max_m = std::max<std::int64_t>(max_m, std::abs(v));
  if (static_cast<std::int64_t>(quad.fourier_nodes) < 4 * max_m)
    warnings.push_back("fourier_nodes = " + std::to_string(quad.fourier_nodes) + " is below 4 max|m| = " +
                       std::to_string(4 * max_m));
  return warnings;
}

// Rows are quadrature points, columns the indices, scaled by the square root
// of the quadrature weight so that A^H A is the Gram matrix.
Eigen::MatrixXcd design_matrix(const std::vector<ModelIndex>& indices, const QuadratureSpec& quad, bool normalized) {
  if (quad.hermite_nodes == 0 || quad.fourier_nodes == 0)
    throw ValidationError("canonical_model: quadrature node counts must be positive");
  const std::size_t k = indices.front().k_dim;
  const std::size_t l = indices.front().m.size();
  const auto rule = gauss_hermite(quad.hermite_nodes);
  std::size_t points = 1;
  for (std::size_t i = 0; i < k; ++i) points *= quad.hermite_nodes;
  for (std::size_t i = 0; i < l; ++i) points *= quad.fourier_nodes;

  const double angle_weight = std::pow(2.0 * std::numbers::pi / static_cast<double>(quad.fourier_nodes),
                                       static_cast<double>(l));
  Eigen::MatrixXcd a(static_cast<Eigen::Index>(points), static_cast<Eigen::Index>(indices.size()));
  std::vector<std::size_t> yi(k, 0), ti(l, 0);
  for (std::size_t p = 0; p < points; ++p) {
    std::size_t rest = p;
    for (std::size_t i = 0; i < l; ++i) {
      ti[i] = rest % quad.fourier_nodes;
      rest /= quad.fourier_nodes;
    }
    for (std::size_t i = 0; i < k; ++i) {
      yi[i] = rest % quad.hermite_nodes;
      rest /= quad.hermite_nodes;
    }
    double w = angle_weight;
    double y2 = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      w *= rule.weights[yi[i]];
      y2 += rule.nodes[yi[i]] * rule.nodes[yi[i]];
    }
    const double sw = std::sqrt(w);
    for (std::size_t j = 0; j < indices.size(); ++j) {
      const auto& idx = indices[j];
      double phase = 0.0;
      for (std::size_t i = 0; i < l; ++i)
        phase += static_cast<double>(idx.m[i]) * 2.0 * std::numbers::pi * static_cast<double>(ti[i]) /
                 static_cast<double>(quad.fourier_nodes);
      const double c = normalized ? fm_normalization(idx) : 1.0;
      // e^{y^2} undoes the Hermite weight; folding it into one exponent keeps it finite
      const double radial = sw * std::exp(0.5 * y2 - 0.5 * idx.norm() * y2);
      a(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(j)) = std::polar(c * radial, phase);
    }
  }
  return a;
}

// The same tensor rule summed axis by axis: Gram entries factor into one
// Hermite sum (raised to the k-th power) and one angular sum per T^l factor.
Eigen::MatrixXcd separable_gram(const std::vector<ModelIndex>& indices, const QuadratureSpec& quad, bool normalized) {
  if (quad.hermite_nodes == 0 || quad.fourier_nodes == 0)
    throw ValidationError("canonical_model: quadrature node counts must be positive");
  const auto rule = gauss_hermite(quad.hermite_nodes);
  const auto k = static_cast<double>(indices.front().k_dim);
  const std::size_t l = indices.front().m.size();
  const auto count = static_cast<Eigen::Index>(indices.size());
  const double step = 2.0 * std::numbers::pi / static_cast<double>(quad.fourier_nodes);
  Eigen::MatrixXcd gram(count, count);
  for (Eigen::Index i = 0; i < count; ++i)
    for (Eigen::Index j = 0; j < count; ++j) {
      const auto& a = indices[static_cast<std::size_t>(i)];
      const auto& b = indices[static_cast<std::size_t>(j)];
      const double decay = 1.0 - 0.5 * (a.norm() + b.norm());
      double radial = 0.0;
      for (std::size_t n = 0; n < rule.nodes.size(); ++n)
        radial += rule.weights[n] * std::exp(decay * rule.nodes[n] * rule.nodes[n]);
      std::complex<double> value = std::pow(radial, k);
      for (std::size_t axis = 0; axis < l; ++axis) {
        const double d = static_cast<double>(b.m[axis] - a.m[axis]);
        std::complex<double> angular = 0.0;
        for (std::size_t t = 0; t < quad.fourier_nodes; ++t) angular += std::polar(step, d * step * static_cast<double>(t));
        value *= angular;
      }
      if (normalized) value *= fm_normalization(a) * fm_normalization(b);
      gram(i, j) = value;
    }
  return gram;
}

inline constexpr Eigen::Index kChunk = 64;

std::string format_count(double n) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.0f", n);
  return buf;
}

}  // namespace

GramResult gram_matrix(const std::vector<ModelIndex>& indices, const QuadratureSpec& quad, bool normalized) {
  GramResult out;
  if (indices.empty()) return out;
  check_indices(indices, "gram_matrix");
  out.warnings = quadrature_warnings(indices, quad);
  out.gram = separable_gram(indices, quad, normalized);
  return out;
}

IsometryReport check_isometry(const std::vector<ModelIndex>& indices, const QuadratureSpec& quad, double tolerance,
                              bool normalized) {
  IsometryReport report;
  report.tolerance = tolerance;
  report.quad = quad;
  report.count = indices.size();
  if (indices.empty()) return report;
  check_indices(indices, "check_isometry");
  report.warnings = quadrature_warnings(indices, quad);

  const Eigen::MatrixXcd gram = separable_gram(indices, quad, normalized);
  const Eigen::Index count = gram.rows();
  auto note = [&](const char* matrix, Eigen::Index r, Eigen::Index c, double defect) {
    if (defect <= tolerance) return;
    report.pass = false;
    if (report.exceedances.size() < kMaxListedExceedances)
      report.exceedances.push_back({matrix, static_cast<std::size_t>(r), static_cast<std::size_t>(c), defect});
  };
  for (Eigen::Index i = 0; i < count; ++i)
    for (Eigen::Index j = 0; j < count; ++j) {
      const double defect = std::abs(gram(i, j) - (i == j ? 1.0 : 0.0));
      report.max_isometry_defect = std::max(report.max_isometry_defect, defect);
      if (i != j) report.max_gram_offdiag = std::max(report.max_gram_offdiag, defect);
      note("RtR-I", i, j, defect);
    }

  const double point_count = std::pow(static_cast<double>(quad.hermite_nodes), static_cast<double>(indices.front().k_dim)) *
                       std::pow(static_cast<double>(quad.fourier_nodes), static_cast<double>(indices.front().m.size()));
  // (RRt)^2 - RRt = A (A^H A - I) A^H
  const Eigen::MatrixXcd excess = gram - Eigen::MatrixXcd::Identity(count, count);
  if (point_count > static_cast<double>(kMaxExactProjectorPoints)) {
    // ||A E A^H||_F^2 = tr(E G E G) bounds every entry.
    const Eigen::MatrixXcd eg = excess * gram;
    report.projector_bound = true;
    report.max_idempotency_defect = std::sqrt(std::max(0.0, (eg * eg).trace().real()));
    note("(RRt)^2-RRt", 0, 0, report.max_idempotency_defect);
    report.warnings.push_back(format_count(point_count) + " quadrature points exceed " +
                              std::to_string(kMaxExactProjectorPoints) +
                              "; idempotency defect is the Frobenius-norm bound, self-adjointness not evaluated");
    return report;
  }
  const auto a = design_matrix(indices, quad, normalized);
  const Eigen::Index points = a.rows();
  const Eigen::MatrixXcd right = excess * a.adjoint();
  for (Eigen::Index r0 = 0; r0 < points; r0 += kChunk) {
    const Eigen::Index rows = std::min(kChunk, points - r0);
    const Eigen::MatrixXcd defect = a.middleRows(r0, rows) * right;
    const Eigen::MatrixXcd p_rows = a.middleRows(r0, rows) * a.adjoint();
    const Eigen::MatrixXcd p_cols = a * a.middleRows(r0, rows).adjoint();
    for (Eigen::Index i = 0; i < rows; ++i)
      for (Eigen::Index j = 0; j < points; ++j) {
        const double d = std::abs(defect(i, j));
        report.max_idempotency_defect = std::max(report.max_idempotency_defect, d);
        note("(RRt)^2-RRt", r0 + i, j, d);
        const double s = std::abs(p_rows(i, j) - std::conj(p_cols(j, i)));
        report.max_self_adjoint_defect = std::max(report.max_self_adjoint_defect, s);
      }
  }
  if (report.max_self_adjoint_defect > tolerance) report.pass = false;
  if (report.exceedances.size() == kMaxListedExceedances)
    report.warnings.push_back("exceedance list truncated at " + std::to_string(kMaxListedExceedances));
  return report;
}

double annihilation_residual(const ModelIndex& idx, std::span<const double> y, std::span<const double> theta,
                             double step, DifferenceScheme scheme) {
  idx.validate();
  if (!(step > 0.0)) throw ValidationError("canonical_model::annihilation_residual: step must be positive");
  std::vector<double> probe(y.begin(), y.end());
  auto at = [&](std::size_t j, double offset) {
    probe[j] = y[j] + offset;
    const auto v = fm_eval(idx, probe, theta);
    probe[j] = y[j];
    return v;
  };
  const auto center = fm_eval(idx, y, theta);
  double worst = 0.0;
  for (std::size_t j = 0; j < y.size(); ++j) {
    std::complex<double> deriv;
    if (scheme == DifferenceScheme::Central2) {
      deriv = (at(j, step) - at(j, -step)) / (2.0 * step);
    } else {
      deriv = (-at(j, 2 * step) + 8.0 * at(j, step) - 8.0 * at(j, -step) + at(j, -2 * step)) / (12.0 * step);
    }
    worst = std::max(worst, std::abs(deriv + y[j] * idx.norm() * center));
  }
  return worst;
}

std::vector<ModelIndex> truncation_box(std::size_t l, std::size_t k_dim, std::int64_t M) {
  if (l == 0 || k_dim == 0) throw ValidationError("canonical_model::truncation_box: l and k must be >= 1");
  if (M < 1) throw ValidationError("canonical_model::truncation_box: M must be >= 1");
  std::vector<ModelIndex> out;
  std::vector<std::int64_t> m(l, -M);
  while (true) {
    if (std::any_of(m.begin(), m.end(), [](auto v) { return v != 0; })) out.push_back({m, k_dim});
    std::size_t pos = l;
    while (pos > 0) {
      --pos;
      if (m[pos] < M) {
        ++m[pos];
        break;
      }
      m[pos] = -M;
      if (pos == 0) return out;
    }
  }
}

}  // namespace toeplab
