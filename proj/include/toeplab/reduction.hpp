#pragma once

#include "toeplab/hardy_sphere.hpp"
#include "toeplab/multiindex.hpp"
#include "toeplab/spectral.hpp"

#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace toeplab {

/// (|z_1|^2, ..., |z_n|^2)
std::vector<double> moment_map(std::span<const std::complex<double>> z);

/// (2 pi)^{n-1} / (n-1)!: sigma-volume of the reduced space CP^{n-1}.
double full_sphere_volume(std::size_t n);

struct ReducedSpaceSpec {
  enum class Kind { FullSphere, ToricFiber };

  Kind kind = Kind::FullSphere;
  std::size_t n = 0;
  std::optional<SubtorusData> sub;
  double sigma_volume = 0.0;

  static ReducedSpaceSpec full_sphere(std::size_t n);
  void validate() const;
};

struct McEstimate {
  double estimate = 0.0;
  double standard_error = 0.0;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
};

struct McOptions {
  unsigned threads = 1;
  /// Coordinate permutation applied to every sample before evaluation
  /// (sample i-th coordinate moves to perm[i]); empty means identity.
  std::vector<std::size_t> permutation;
};

inline constexpr std::uint64_t kMcBatchSize = 1 << 16;
inline constexpr std::uint64_t kMinMcSamples = 10000;

/// Mean and standard error of g(z) over z uniform on S^{2n-1}. Batches of
/// kMcBatchSize draw from independent streams keyed by (seed, batch), so the
/// result does not depend on the thread count.
McEstimate sphere_average(std::size_t n, std::uint64_t samples, std::uint64_t seed,
                          const std::function<double(std::span<const std::complex<double>>)>& g,
                          const McOptions& options = {});

/// c_0(f) = sigma_volume * E[f(F(z))] over the unit sphere.
McEstimate c0_sphere_mc(const SymbolPoly& symbol, const TestFunction& f, std::size_t n, std::uint64_t samples,
                        std::uint64_t seed, const McOptions& options = {});
McEstimate c0_sphere_mc(const InvariantSymbol& symbol, const TestFunction& f, std::size_t n,
                        std::uint64_t samples, std::uint64_t seed, const McOptions& options = {});

/// Centroid-rule integral over {a >= 0, sum a = 1} (Lebesgue mass 1/(n-1)!)
/// on the uniform Kuhn refinement with mesh^(n-1) cells.
double simplex_integral(std::size_t n, int mesh, const std::function<double(std::span<const double>)>& g,
                        unsigned threads = 1);

inline constexpr int kMinSimplexMesh = 8;

/// (2 pi)^{n-1} * integral over the simplex of f(g(a)).
double c0_simplex_quad(const InvariantSymbol& symbol, const TestFunction& f, std::size_t n, int mesh,
                       unsigned threads = 1);

/// Limit of (2 pi / k)^{n-1} C(k+n-1, n-1) by fitting the exact 1/k model.
double calibrate_volume(std::size_t n, std::span<const std::int64_t> ks);

}  // namespace toeplab
