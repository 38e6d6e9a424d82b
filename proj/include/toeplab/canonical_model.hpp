#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace toeplab {

/// Fourier index m != 0 on T^l together with the spatial dimension of R^k.
struct ModelIndex {
  std::vector<std::int64_t> m;
  std::size_t k_dim = 1;

  /// Euclidean norm |m|.
  double norm() const;
  void validate() const;
};

struct QuadratureSpec {
  std::size_t hermite_nodes = 64;  // per spatial axis
  std::size_t fourier_nodes = 24;  // per angle
};

inline constexpr std::size_t kMinHermiteNodes = 20;

/// Nodes and weights for the weight e^{-x^2} on R.
struct GaussHermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Golub-Welsch, then Newton-polished nodes and Christoffel weights from the
/// orthonormal three-term recurrence.
GaussHermiteRule gauss_hermite(std::size_t count);

/// (|m| / pi)^{k/4} (2 pi)^{-l/2}
double fm_normalization(const ModelIndex& idx);

/// c e^{-|y|^2 |m| / 2} e^{i m.theta}; without the normalization c = 1.
std::complex<double> fm_eval(const ModelIndex& idx, std::span<const double> y, std::span<const double> theta,
                             bool normalized = true);

struct GramResult {
  Eigen::MatrixXcd gram;
  std::vector<std::string> warnings;
};

/// Inner products over R^k x T^l by tensor Gauss-Hermite x equispaced angles.
GramResult gram_matrix(const std::vector<ModelIndex>& indices, const QuadratureSpec& quad = {},
                       bool normalized = true);

struct Exceedance {
  std::string matrix;  // "RtR-I" or "(RRt)^2-RRt"
  std::size_t row = 0;
  std::size_t col = 0;
  double defect = 0.0;
};

inline constexpr std::size_t kMaxListedExceedances = 1000;

/// Above this many quadrature points the projector defects are not formed
/// entrywise (cost grows with the square of the point count).
inline constexpr std::size_t kMaxExactProjectorPoints = 8192;

struct IsometryReport {
  bool pass = true;
  double tolerance = 0.0;
  std::size_t count = 0;
  QuadratureSpec quad;
  double max_isometry_defect = 0.0;     // max |RtR - I|
  double max_gram_offdiag = 0.0;
  double max_idempotency_defect = 0.0;  // max |(RRt)^2 - RRt| on quadrature space
  double max_self_adjoint_defect = 0.0;
  bool projector_bound = false;  // idempotency defect is a Frobenius bound, not an entrywise max
  std::vector<Exceedance> exceedances;
  std::vector<std::string> warnings;
};

/// R maps the orthonormal Fourier mode of m to f_m. Checks RtR = I on the
/// truncated modes and that RRt is an idempotent self-adjoint operator on
/// the discretized space.
IsometryReport check_isometry(const std::vector<ModelIndex>& indices, const QuadratureSpec& quad = {},
                              double tolerance = 1e-8, bool normalized = true);

enum class DifferenceScheme { Central2, Central4 };

/// max_j |(d/dy_j + y_j |m|) f_m| at (y, theta) by finite differences.
double annihilation_residual(const ModelIndex& idx, std::span<const double> y, std::span<const double> theta,
                             double step, DifferenceScheme scheme = DifferenceScheme::Central4);

/// All m in [-M, M]^l except 0, lexicographic.
std::vector<ModelIndex> truncation_box(std::size_t l, std::size_t k_dim, std::int64_t M = 5);

}  // namespace toeplab
