#pragma once

#include "toeplab/multiindex.hpp"
#include "toeplab/rational.hpp"

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace toeplab {

/// One term coeff * z^gamma zbar^delta / |z|^(|gamma|+|delta|).
struct SymbolTerm {
  MultiIndex gamma;
  MultiIndex delta;
  std::complex<double> coeff;
};

/// Degree-zero, circle-invariant, Hermitian polynomial symbol on C^n - 0.
/// Multiplication by it, compressed to the Hardy space, preserves every
/// degree-k weight space.
class SymbolPoly {
 public:
  SymbolPoly() = default;
  SymbolPoly(std::size_t n, std::vector<SymbolTerm> terms) : n_(n), terms_(std::move(terms)) {}

  static SymbolPoly constant(std::size_t n, double c);

  std::size_t dimension() const { return n_; }
  const std::vector<SymbolTerm>& terms() const { return terms_; }

  /// Throws ValidationError unless every term has |gamma| = |delta| and the
  /// conjugate partner (delta, gamma, conj(c)) of every term is present.
  void validate() const;

  /// True when every term has gamma = delta (T^n-invariant symbol).
  bool is_invariant() const;

  /// Value at z / |z|; z must be nonzero. Real part only (the symbol is real).
  double evaluate(std::span<const std::complex<double>> z) const;

  /// Relabels coordinates: coordinate i of this symbol becomes perm[i].
  SymbolPoly permuted(std::span<const std::size_t> perm) const;

 private:
  std::size_t n_ = 0;
  std::vector<SymbolTerm> terms_;
};

struct InvariantTerm {
  MultiIndex gamma;
  Rational coeff;
};

/// Real function of a = (|z_1|^2, ..., |z_n|^2) / |z|^2 on the simplex,
/// optionally carrying an exact polynomial form sum c_gamma a^gamma.
class InvariantSymbol {
 public:
  using Evaluator = std::function<double(std::span<const double>)>;

  static InvariantSymbol polynomial(std::size_t n, std::vector<InvariantTerm> terms);
  static InvariantSymbol from_function(std::size_t n, Evaluator f);

  /// a_j
  static InvariantSymbol coordinate(std::size_t n, std::size_t j);
  /// c * a^gamma
  static InvariantSymbol monomial(MultiIndex gamma, Rational c = 1);
  static InvariantSymbol constant(std::size_t n, Rational c = 1);

  std::size_t dimension() const { return n_; }
  bool has_polynomial() const { return has_polynomial_; }
  const std::vector<InvariantTerm>& terms() const { return terms_; }

  double operator()(std::span<const double> a) const;

  /// Same function as a SymbolPoly with terms (gamma, gamma, c).
  SymbolPoly to_symbol_poly() const;

  InvariantSymbol operator+(const InvariantSymbol& other) const;
  InvariantSymbol permuted(std::span<const std::size_t> perm) const;

 private:
  std::size_t n_ = 0;
  bool has_polynomial_ = false;
  std::vector<InvariantTerm> terms_;
  Evaluator evaluator_;
};

/// Matrix of Pi M_F Pi on the orthonormalized degree-k monomial basis.
struct ToeplitzBlock {
  std::size_t n = 0;
  std::int64_t k = 0;
  std::vector<MultiIndex> basis;
  Eigen::MatrixXcd matrix;

  std::size_t dim() const { return basis.size(); }
  bool is_diagonal() const;
};

/// Entry of an exactly assembled block: (re + i im) * sqrt(radicand).
struct ExactEntry {
  std::size_t row = 0;
  std::size_t col = 0;
  Rational re;
  Rational im;
  Rational radicand = 1;

  std::complex<double> value() const;
};

struct ExactToeplitzBlock {
  std::size_t n = 0;
  std::int64_t k = 0;
  std::vector<MultiIndex> basis;
  std::vector<ExactEntry> entries;  // nonzero entries, row-major

  const ExactEntry* find(std::size_t row, std::size_t col) const;
  ToeplitzBlock to_block() const;
};

/// h(mu) = (n-1)! mu! / (n-1+|mu|)!, the normalized squared L^2 norm of z^mu
/// on S^{2n-1}; n is mu.size().
Rational monomial_norm(const MultiIndex& mu, std::size_t n);

/// h(mu + shift) / h(mu), exactly.
Rational monomial_norm_ratio(const MultiIndex& mu, const MultiIndex& shift);

/// Same ratio in double precision by a direct product.
double monomial_norm_ratio_double(const MultiIndex& mu, const MultiIndex& shift);

ToeplitzBlock assemble_block(const SymbolPoly& symbol, std::size_t n, std::int64_t k);

/// Exact assembly; coefficients are converted to rationals exactly.
ExactToeplitzBlock assemble_block_exact(const SymbolPoly& symbol, std::size_t n, std::int64_t k);

/// Eigenvalue of Pi M_F Pi on z^alpha for an invariant polynomial symbol.
Rational invariant_eigenvalue(const InvariantSymbol& symbol, const MultiIndex& alpha);

}  // namespace toeplab
