#pragma once

#include "toeplab/hardy_sphere.hpp"
#include "toeplab/multiindex.hpp"
#include "toeplab/rational.hpp"
#include "toeplab/toric.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace toeplab {

/// Eigenvalues tracked along the ray beta = k * direction.
struct RaySpectrumSeries {
  RationalVector direction;
  std::vector<std::int64_t> ks;  // strictly increasing
  std::vector<double> lambdas;

  void validate() const;
};

enum class ExtrapolationMethod {
  Richardson,  // polynomial in h = 1/k (Neville)
  Rational,    // Bulirsch-Stoer rational tableau in h = 1/k
};

inline constexpr int kMaxExtrapolationOrder = 3;

struct RayLimit {
  double limit = 0.0;
  double error_estimate = 0.0;  // |limit - same estimate one sample earlier|
  bool low_confidence = false;  // error estimates fail to shrink with order
  int order_used = 0;
};

/// Needs at least order+2 entries; order 0 returns the last value.
RayLimit extrapolate_ray(const RaySpectrumSeries& series, int order,
                         ExtrapolationMethod method = ExtrapolationMethod::Richardson);

using SpectrumOracle = std::function<EquivariantSpectrum(std::int64_t k)>;

/// Forward map for an invariant polynomial symbol.
SpectrumOracle invariant_oracle(const SubtorusData& sub, const InvariantSymbol& symbol);

struct ReconstructOptions {
  int order = 1;
  ExtrapolationMethod method = ExtrapolationMethod::Richardson;
  std::optional<InvariantSymbol> truth;
  unsigned threads = 1;
};

struct ReconstructedPoint {
  RationalVector point;  // x in P_alpha; the symbol is evaluated at x / sum x
  std::int64_t period = 1;
  bool missing = false;
  std::string reason;
  std::vector<std::int64_t> ks;
  double p_hat = 0.0;
  double error_estimate = 0.0;
  bool low_confidence = false;
  std::optional<double> p_true;
  std::optional<double> abs_err;
};

struct Reconstruction {
  std::int64_t k_max = 0;
  int order = 0;
  std::vector<ReconstructedPoint> points;

  /// Largest abs_err over points that have one; 0 when there are none.
  double max_error() const;
  std::size_t missing_count() const;
};

/// Grid points are rational points of P_alpha = {x >= 0 : Bt x = alpha} with
/// all entries positive. A point with denominator q is probed at k in qN only.
Reconstruction reconstruct(const SubtorusData& sub, const SpectrumOracle& oracle, std::int64_t k_max,
                           const std::vector<RationalVector>& grid, const ReconstructOptions& options = {});

/// Least-squares slope of log y against log x.
double log_log_slope(std::span<const double> x, std::span<const double> y);

inline constexpr double kDistinguishTolerance = 1e-12;

struct DistinguishReport {
  std::int64_t k_max = 0;
  double tolerance = kDistinguishTolerance;
  std::optional<std::int64_t> labeled_k;   // first k where labeled spectra differ
  std::optional<std::int64_t> multiset_k;  // first k where sorted spectra differ
  std::vector<double> labeled_max_diff;    // per k = 1..k_max
  std::vector<double> multiset_max_diff;

  bool distinguished() const { return labeled_k.has_value(); }
};

DistinguishReport spectral_distinguishability(const InvariantSymbol& a, const InvariantSymbol& b,
                                              const SubtorusData& sub, std::int64_t k_max);

}  // namespace toeplab
