#pragma once

#include "toeplab/hardy_sphere.hpp"
#include "toeplab/multiindex.hpp"
#include "toeplab/reduction.hpp"
#include "toeplab/spectral.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace toeplab {

struct VertexCheck {
  PolytopeVertex vertex;
  bool full_rank = false;       // support columns span Q^d (regular value)
  Integer minor_gcd = 0;        // gcd of the d x d minors on the support
  bool pass = false;            // full rank and minor_gcd == 1 (free action)
  std::vector<std::size_t> violating_columns;  // a minor with |det| != 1, when failing
  Integer violating_minor = 0;
};

struct RegularFreeReport {
  bool pass = true;
  std::vector<VertexCheck> vertices;
};

/// Vertex-level certificate that alpha is a regular value and G acts freely
/// on the level set: at every vertex of P_alpha the support columns of Bt
/// must generate Z^d.
RegularFreeReport regular_free_check(const SubtorusData& sub);

struct SpectrumEntry {
  MultiIndex beta;
  Rational exact;
  double lambda = 0.0;
};

/// One eigenvalue per lattice point of the weight-k alpha fiber.
struct EquivariantSpectrum {
  SubtorusData sub;
  std::int64_t k = 0;
  std::vector<SpectrumEntry> entries;

  const SpectrumEntry* find(const MultiIndex& beta) const;
};

EquivariantSpectrum equivariant_spectrum(const SubtorusData& sub, std::int64_t k, const InvariantSymbol& symbol);

/// sum over the fiber of f(lambda_beta)
double fiber_measure(const EquivariantSpectrum& spec, const TestFunction& f);

/// Sigma-volume of the reduced space from lattice-count growth:
/// lim (2 pi / k)^{n-d} #fiber(k), fitted at multiples of the Ehrhart period.
struct FiberVolume {
  double volume = 0.0;
  std::int64_t period = 1;
  AsymptoticFit fit;
};

FiberVolume fiber_volume(const SubtorusData& sub);

inline constexpr double kMinRejectionEfficiency = 1e-4;

struct LeadingTerm {
  double value = 0.0;
  double standard_error = 0.0;
  double volume = 0.0;
  double acceptance_rate = 1.0;
  std::uint64_t samples = 0;
};

/// Reference value of the leading coefficient: V_alpha times the mean of
/// f(g(x / sum x)) over x uniform on P_alpha (rejection sampling).
LeadingTerm theorem2_leading(const SubtorusData& sub, const InvariantSymbol& symbol, const TestFunction& f,
                             std::uint64_t samples, std::uint64_t seed, unsigned threads = 1);

}  // namespace toeplab
