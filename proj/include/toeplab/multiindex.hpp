#pragma once

#include "toeplab/exact_linalg.hpp"
#include "toeplab/rational.hpp"

#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace toeplab {

/// Exponent vector of a monomial z^alpha; all entries non-negative.
class MultiIndex {
 public:
  using value_type = std::int64_t;

  MultiIndex() = default;
  explicit MultiIndex(std::size_t n) : entries_(n, 0) {}
  MultiIndex(std::initializer_list<value_type> entries);
  explicit MultiIndex(std::vector<value_type> entries);

  static MultiIndex unit(std::size_t n, std::size_t j);

  std::size_t size() const { return entries_.size(); }
  value_type operator[](std::size_t i) const { return entries_[i]; }
  std::span<const value_type> entries() const { return entries_; }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

  /// |alpha|, the homogeneity degree of z^alpha.
  value_type degree() const;

  /// Checked entrywise sum.
  MultiIndex operator+(const MultiIndex& other) const;

  /// this + plus - minus, or nullopt if some entry would be negative.
  std::optional<MultiIndex> shifted(const MultiIndex& plus, const MultiIndex& minus) const;

  MultiIndex permuted(std::span<const std::size_t> perm) const;

  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;
  friend auto operator<=>(const MultiIndex&, const MultiIndex&) = default;

 private:
  std::vector<value_type> entries_;
};

struct MultiIndexHash {
  std::size_t operator()(const MultiIndex& m) const noexcept;
};

/// Graded-lexicographic order: lower degree first, then larger leading
/// entries first, so (2,0) precedes (1,1) precedes (0,2).
bool graded_lex_before(const MultiIndex& a, const MultiIndex& b);

std::int64_t checked_add(std::int64_t a, std::int64_t b);
std::int64_t checked_mul(std::int64_t a, std::int64_t b);

/// C(n, k) in checked 64-bit arithmetic.
std::int64_t binomial(std::int64_t n, std::int64_t k);

/// Lattice data of a subtorus G of T^n: rows of `bt` are the weights of the d
/// circle factors of G on the coordinates, `alpha` a weight of G.
struct SubtorusData {
  std::size_t n = 0;
  std::size_t d = 0;
  IntMatrix bt;
  std::vector<std::int64_t> alpha;

  /// Shape checks and full row rank. Throws ValidationError.
  void validate() const;

  /// Bt x with checked arithmetic.
  std::vector<std::int64_t> apply(std::span<const std::int64_t> x) const;

  /// The diagonal circle in T^n at alpha = (1): fibers are the degree-k monomials.
  static SubtorusData diagonal_circle(std::size_t n);
  /// T^n itself (Bt = identity).
  static SubtorusData full_torus(std::vector<std::int64_t> alpha);
};

/// All beta in N^n with |beta| = k, graded-lex order.
std::vector<MultiIndex> enumerate_degree(std::size_t n, std::int64_t k);

/// True when {x >= 0 : Bt x = 0} = {0}, i.e. every fiber polytope is compact.
bool fibers_bounded(const SubtorusData& sub);

/// Vertices of P_alpha = {x >= 0 : Bt x = alpha}, each with its support.
/// Throws UnboundedFiberError when P_alpha is not compact. Empty if P_alpha is.
struct PolytopeVertex {
  RationalVector point;
  std::vector<std::size_t> support;
};
std::vector<PolytopeVertex> fiber_vertices(const SubtorusData& sub);

/// d columns of Bt with nonzero minor, preferring a unimodular choice.
std::vector<std::size_t> pivot_columns(const SubtorusData& sub);

/// All beta in N^n with Bt beta = k alpha, in descending lexicographic order.
std::vector<MultiIndex> enumerate_fiber(const SubtorusData& sub, std::int64_t k);

std::vector<std::pair<std::int64_t, std::int64_t>> fiber_count_growth(const SubtorusData& sub,
                                                                      std::span<const std::int64_t> ks);

}  // namespace toeplab
