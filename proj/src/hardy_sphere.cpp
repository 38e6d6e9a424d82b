#include "toeplab/hardy_sphere.hpp"

#include "toeplab/errors.hpp"

#include <boost/multiprecision/integer.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <unordered_map>

namespace toeplab {

SymbolPoly SymbolPoly::constant(std::size_t n, double c) {
  return SymbolPoly(n, {SymbolTerm{MultiIndex(n), MultiIndex(n), {c, 0.0}}});
}

void SymbolPoly::validate() const {
  if (n_ == 0) throw ValidationError("SymbolPoly: dimension must be >= 1");
  std::map<std::pair<MultiIndex, MultiIndex>, std::complex<double>> combined;
  for (const auto& t : terms_) {
    if (t.gamma.size() != n_ || t.delta.size() != n_)
      throw ValidationError("SymbolPoly: term exponent has wrong length");
    if (t.gamma.degree() != t.delta.degree())
      throw ValidationError("SymbolPoly: term with |gamma| != |delta| is not circle-invariant");
    if (!std::isfinite(t.coeff.real()) || !std::isfinite(t.coeff.imag()))
      throw ValidationError("SymbolPoly: non-finite coefficient");
    combined[{t.gamma, t.delta}] += t.coeff;
  }
  for (const auto& [key, c] : combined) {
    auto partner = combined.find({key.second, key.first});
    if (partner == combined.end() || partner->second != std::conj(c))
      throw ValidationError("SymbolPoly: missing Hermitian partner (delta, gamma, conj(c)) for a term");
  }
}

bool SymbolPoly::is_invariant() const {
  return std::all_of(terms_.begin(), terms_.end(), [](const SymbolTerm& t) { return t.gamma == t.delta; });
}

double SymbolPoly::evaluate(std::span<const std::complex<double>> z) const {
  if (z.size() != n_) throw ValidationError("SymbolPoly::evaluate: point has wrong dimension");
  double norm2 = 0.0;
  for (const auto& zi : z) norm2 += std::norm(zi);
  if (norm2 == 0.0) throw ValidationError("SymbolPoly::evaluate: symbol undefined at z = 0");
  const double inv_norm = 1.0 / std::sqrt(norm2);
  std::complex<double> total = 0.0;
  for (const auto& t : terms_) {
    std::complex<double> v = t.coeff;
    for (std::size_t i = 0; i < n_; ++i) {
      const std::complex<double> u = z[i] * inv_norm;
      for (std::int64_t p = 0; p < t.gamma[i]; ++p) v *= u;
      for (std::int64_t p = 0; p < t.delta[i]; ++p) v *= std::conj(u);
    }
    total += v;
  }
  return total.real();
}

SymbolPoly SymbolPoly::permuted(std::span<const std::size_t> perm) const {
  std::vector<SymbolTerm> terms;
  terms.reserve(terms_.size());
  for (const auto& t : terms_) terms.push_back({t.gamma.permuted(perm), t.delta.permuted(perm), t.coeff});
  return SymbolPoly(n_, std::move(terms));
}

InvariantSymbol InvariantSymbol::polynomial(std::size_t n, std::vector<InvariantTerm> terms) {
  if (n == 0) throw ValidationError("InvariantSymbol: dimension must be >= 1");
  for (const auto& t : terms)
    if (t.gamma.size() != n) throw ValidationError("InvariantSymbol: term exponent has wrong length");
  InvariantSymbol s;
  s.n_ = n;
  s.has_polynomial_ = true;
  s.terms_ = std::move(terms);
  std::vector<std::pair<MultiIndex, double>> numeric;
  for (const auto& t : s.terms_) numeric.emplace_back(t.gamma, to_double(t.coeff));
  s.evaluator_ = [numeric](std::span<const double> a) {
    double total = 0.0;
    for (const auto& [gamma, c] : numeric) {
      double v = c;
      for (std::size_t i = 0; i < gamma.size(); ++i)
        for (std::int64_t p = 0; p < gamma[i]; ++p) v *= a[i];
      total += v;
    }
    return total;
  };
  return s;
}

InvariantSymbol InvariantSymbol::from_function(std::size_t n, Evaluator f) {
  if (n == 0) throw ValidationError("InvariantSymbol: dimension must be >= 1");
  InvariantSymbol s;
  s.n_ = n;
  s.evaluator_ = std::move(f);
  return s;
}

InvariantSymbol InvariantSymbol::coordinate(std::size_t n, std::size_t j) {
  return polynomial(n, {InvariantTerm{MultiIndex::unit(n, j), Rational(1)}});
}

InvariantSymbol InvariantSymbol::monomial(MultiIndex gamma, Rational c) {
  const std::size_t n = gamma.size();
  return polynomial(n, {InvariantTerm{std::move(gamma), std::move(c)}});
}

InvariantSymbol InvariantSymbol::constant(std::size_t n, Rational c) {
  return polynomial(n, {InvariantTerm{MultiIndex(n), std::move(c)}});
}

double InvariantSymbol::operator()(std::span<const double> a) const {
  if (a.size() != n_) throw ValidationError("InvariantSymbol: point has wrong dimension");
  return evaluator_(a);
}

SymbolPoly InvariantSymbol::to_symbol_poly() const {
  if (!has_polynomial_) throw ValidationError("InvariantSymbol::to_symbol_poly: no polynomial form");
  std::vector<SymbolTerm> terms;
  for (const auto& t : terms_) terms.push_back({t.gamma, t.gamma, {to_double(t.coeff), 0.0}});
  return SymbolPoly(n_, std::move(terms));
}

InvariantSymbol InvariantSymbol::operator+(const InvariantSymbol& other) const {
  if (other.n_ != n_) throw ValidationError("InvariantSymbol: dimension mismatch in sum");
  if (has_polynomial_ && other.has_polynomial_) {
    auto terms = terms_;
    terms.insert(terms.end(), other.terms_.begin(), other.terms_.end());
    return polynomial(n_, std::move(terms));
  }
  return from_function(n_, [lhs = evaluator_, rhs = other.evaluator_](std::span<const double> a) {
    return lhs(a) + rhs(a);
  });
}

InvariantSymbol InvariantSymbol::permuted(std::span<const std::size_t> perm) const {
  if (perm.size() != n_) throw ValidationError("InvariantSymbol: permutation size mismatch");
  if (has_polynomial_) {
    std::vector<InvariantTerm> terms;
    for (const auto& t : terms_) terms.push_back({t.gamma.permuted(perm), t.coeff});
    return polynomial(n_, std::move(terms));
  }
  std::vector<std::size_t> p(perm.begin(), perm.end());
  return from_function(n_, [f = evaluator_, p](std::span<const double> a) {
    std::vector<double> pulled(a.size());
    for (std::size_t i = 0; i < p.size(); ++i) pulled[i] = a[p[i]];
    return f(pulled);
  });
}

bool ToeplitzBlock::is_diagonal() const {
  for (Eigen::Index c = 0; c < matrix.cols(); ++c)
    for (Eigen::Index r = 0; r < matrix.rows(); ++r)
      if (r != c && matrix(r, c) != std::complex<double>(0.0, 0.0)) return false;
  return true;
}

std::complex<double> ExactEntry::value() const {
  const double scale = radicand == 1 ? 1.0 : std::sqrt(to_double(radicand));
  return {to_double(re) * scale, to_double(im) * scale};
}

const ExactEntry* ExactToeplitzBlock::find(std::size_t row, std::size_t col) const {
  auto it = std::lower_bound(entries.begin(), entries.end(), std::pair{row, col},
                             [](const ExactEntry& e, const std::pair<std::size_t, std::size_t>& key) {
                               return std::pair{e.row, e.col} < key;
                             });
  if (it == entries.end() || it->row != row || it->col != col) return nullptr;
  return &*it;
}

ToeplitzBlock ExactToeplitzBlock::to_block() const {
  ToeplitzBlock b{n, k, basis, Eigen::MatrixXcd::Zero(basis.size(), basis.size())};
  for (const auto& e : entries) b.matrix(e.row, e.col) = e.value();
  return b;
}

Rational monomial_norm(const MultiIndex& mu, std::size_t n) {
  if (n == 0) throw ValidationError("hardy_sphere::monomial_norm: n must be >= 1");
  if (mu.size() != n) throw ValidationError("hardy_sphere::monomial_norm: mu must have n entries");
  return monomial_norm_ratio(MultiIndex(n), mu);
}

Rational monomial_norm_ratio(const MultiIndex& mu, const MultiIndex& shift) {
  if (mu.size() != shift.size() || mu.size() == 0)
    throw ValidationError("hardy_sphere::monomial_norm_ratio: size mismatch");
  const std::int64_t n = static_cast<std::int64_t>(mu.size());
  Integer num = 1;
  for (std::size_t j = 0; j < mu.size(); ++j)
    for (std::int64_t t = 1; t <= shift[j]; ++t) num *= mu[j] + t;
  Integer den = 1;
  const std::int64_t base = n - 1 + mu.degree();
  const std::int64_t steps = shift.degree();
  for (std::int64_t t = 1; t <= steps; ++t) den *= base + t;
  return Rational(num, den);
}

double monomial_norm_ratio_double(const MultiIndex& mu, const MultiIndex& shift) {
  if (mu.size() != shift.size() || mu.size() == 0)
    throw ValidationError("hardy_sphere::monomial_norm_ratio: size mismatch");
  const double base = static_cast<double>(mu.size()) - 1.0 + static_cast<double>(mu.degree());
  double r = 1.0;
  std::int64_t s = 0;
  for (std::size_t j = 0; j < mu.size(); ++j)
    for (std::int64_t t = 1; t <= shift[j]; ++t) {
      ++s;
      r *= static_cast<double>(mu[j] + t) / (base + static_cast<double>(s));
    }
  return r;
}

namespace {

void check_block_args(const SymbolPoly& symbol, std::size_t n, std::int64_t k, const char* op) {
  if (symbol.dimension() != n)
    throw ValidationError(std::string("hardy_sphere::") + op + ": symbol dimension differs from n");
  if (k < 0) throw ValidationError(std::string("hardy_sphere::") + op + ": k must be >= 0");
  symbol.validate();
}

std::unordered_map<MultiIndex, std::size_t, MultiIndexHash> index_of(const std::vector<MultiIndex>& basis) {
  std::unordered_map<MultiIndex, std::size_t, MultiIndexHash> idx;
  idx.reserve(basis.size());
  for (std::size_t i = 0; i < basis.size(); ++i) idx.emplace(basis[i], i);
  return idx;
}

// Folds sqrt(radicand) into the multiplier when the radicand is a rational square.
void canonicalize(ExactEntry& e) {
  const Integer num = numerator(e.radicand);
  const Integer den = denominator(e.radicand);
  const Integer sn = boost::multiprecision::sqrt(num);
  const Integer sd = boost::multiprecision::sqrt(den);
  if (sn * sn == num && sd * sd == den) {
    const Rational root(sn, sd);
    e.re *= root;
    e.im *= root;
    e.radicand = 1;
  }
}

}  // namespace

ToeplitzBlock assemble_block(const SymbolPoly& symbol, std::size_t n, std::int64_t k) {
  check_block_args(symbol, n, k, "assemble_block");
  ToeplitzBlock block{n, k, enumerate_degree(n, k), {}};
  const auto dim = static_cast<Eigen::Index>(block.basis.size());
  block.matrix = Eigen::MatrixXcd::Zero(dim, dim);
  const auto idx = index_of(block.basis);

  // Upper triangle from the term formula; the lower triangle is its conjugate.
  for (Eigen::Index col = 0; col < dim; ++col) {
    const MultiIndex& alpha = block.basis[static_cast<std::size_t>(col)];
    for (const auto& t : symbol.terms()) {
      auto beta = alpha.shifted(t.gamma, t.delta);
      if (!beta) continue;
      const auto row = static_cast<Eigen::Index>(idx.at(*beta));
      if (row > col) continue;
      const double r_alpha = monomial_norm_ratio_double(alpha, t.gamma);
      if (row == col) {
        block.matrix(row, col) += t.coeff * r_alpha;
      } else {
        const double r_beta = monomial_norm_ratio_double(*beta, t.delta);
        block.matrix(row, col) += t.coeff * std::sqrt(r_alpha * r_beta);
      }
    }
  }
  for (Eigen::Index col = 0; col < dim; ++col)
    for (Eigen::Index row = col + 1; row < dim; ++row) block.matrix(row, col) = std::conj(block.matrix(col, row));
  return block;
}

ExactToeplitzBlock assemble_block_exact(const SymbolPoly& symbol, std::size_t n, std::int64_t k) {
  check_block_args(symbol, n, k, "assemble_block_exact");
  ExactToeplitzBlock block{n, k, enumerate_degree(n, k), {}};
  const auto idx = index_of(block.basis);
  std::vector<Rational> h;
  h.reserve(block.basis.size());
  for (const auto& b : block.basis) h.push_back(monomial_norm(b, n));

  struct Coeff {
    Rational re;
    Rational im;
  };
  std::vector<std::pair<Rational, Rational>> coeffs;
  for (const auto& t : symbol.terms())
    coeffs.emplace_back(rational_from_double(t.coeff.real()), rational_from_double(t.coeff.imag()));

  std::map<std::pair<std::size_t, std::size_t>, Coeff> acc;
  for (std::size_t col = 0; col < block.basis.size(); ++col) {
    const MultiIndex& alpha = block.basis[col];
    for (std::size_t ti = 0; ti < symbol.terms().size(); ++ti) {
      const auto& t = symbol.terms()[ti];
      auto beta = alpha.shifted(t.gamma, t.delta);
      if (!beta) continue;
      const std::size_t row = idx.at(*beta);
      const Rational weight = monomial_norm(alpha + t.gamma, n);
      auto& slot = acc[{row, col}];
      slot.re += coeffs[ti].first * weight;
      slot.im += coeffs[ti].second * weight;
    }
  }
  for (auto& [key, c] : acc) {
    if (c.re == 0 && c.im == 0) continue;
    ExactEntry e{key.first, key.second, c.re, c.im, 1 / (h[key.first] * h[key.second])};
    canonicalize(e);
    block.entries.push_back(std::move(e));
  }
  return block;
}

Rational invariant_eigenvalue(const InvariantSymbol& symbol, const MultiIndex& alpha) {
  if (!symbol.has_polynomial())
    throw ValidationError("hardy_sphere::invariant_eigenvalue: symbol has no polynomial form");
  if (alpha.size() != symbol.dimension())
    throw ValidationError("hardy_sphere::invariant_eigenvalue: alpha has wrong length");
  Rational total = 0;
  for (const auto& t : symbol.terms()) total += t.coeff * monomial_norm_ratio(alpha, t.gamma);
  return total;
}

}  // namespace toeplab
