#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "toeplab/errors.hpp"
#include "toeplab/hardy_sphere.hpp"
#include "toeplab/spectral.hpp"

using namespace toeplab;
using cd = std::complex<double>;

namespace {

SymbolPoly a1_poly(std::size_t n) { return SymbolPoly(n, {{MultiIndex::unit(n, 0), MultiIndex::unit(n, 0), 1.0}}); }

SymbolPoly offdiag_poly() {
  return SymbolPoly(2, {{MultiIndex{1, 0}, MultiIndex{0, 1}, 1.0}, {MultiIndex{0, 1}, MultiIndex{1, 0}, 1.0}});
}

// i z1 zbar2 - i z2 zbar1 plus 0.3 |z1|^2 |z2|^2 and 0.5 z1^2 zbar2^2 + conj.
SymbolPoly mixed_poly() {
  return SymbolPoly(2, {{MultiIndex{1, 0}, MultiIndex{0, 1}, cd(0.0, 1.0)},
                        {MultiIndex{0, 1}, MultiIndex{1, 0}, cd(0.0, -1.0)},
                        {MultiIndex{1, 1}, MultiIndex{1, 1}, 0.3},
                        {MultiIndex{2, 0}, MultiIndex{0, 2}, cd(0.5, 0.25)},
                        {MultiIndex{0, 2}, MultiIndex{2, 0}, cd(0.5, -0.25)}});
}

cd monomial(const MultiIndex& mu, cd z1, cd z2) { return std::pow(z1, static_cast<int>(mu[0])) * std::pow(z2, static_cast<int>(mu[1])); }

// <F z^alpha, z^beta> / sqrt(h(alpha) h(beta)) by sphere quadrature.
cd quadrature_entry(const SymbolPoly& F, const MultiIndex& beta, const MultiIndex& alpha) {
  const std::vector<std::int64_t> av(alpha.begin(), alpha.end()), bv(beta.begin(), beta.end());
  const double norm = std::sqrt(oracle::monomial_norm_lgamma(av) * oracle::monomial_norm_lgamma(bv));
  const auto value = oracle::sphere3_integral([&](cd z1, cd z2) {
    const cd z[] = {z1, z2};
    return F.evaluate(z) * monomial(alpha, z1, z2) * std::conj(monomial(beta, z1, z2));
  });
  return value / norm;
}

}  // namespace

TEST_CASE("monomial_norm examples") {
  CHECK(monomial_norm(MultiIndex{0, 0, 0}, 3) == 1);
  CHECK(monomial_norm(MultiIndex{1, 0}, 2) == Rational(1, 2));
  CHECK(monomial_norm(MultiIndex{1, 1}, 2) == Rational(1, 6));
  CHECK_THROWS_AS(monomial_norm(MultiIndex{1, 1}, 3), ValidationError);
}

TEST_CASE("monomial_norm satisfies the shift recursion and matches log-gamma (property)") {
  for (std::size_t n = 1; n <= 4; ++n)
    for (std::int64_t k = 0; k <= 30; k += (n >= 3 ? 3 : 1))
      for (const auto& mu : enumerate_degree(n, k)) {
        const Rational h = monomial_norm(mu, n);
        for (std::size_t j = 0; j < n; ++j) {
          const auto next = mu + MultiIndex::unit(n, j);
          REQUIRE(monomial_norm(next, n) == h * Rational(mu[j] + 1, static_cast<std::int64_t>(n) + k));
          REQUIRE(monomial_norm_ratio(mu, MultiIndex::unit(n, j)) == Rational(mu[j] + 1, static_cast<std::int64_t>(n) + k));
        }
        const std::vector<std::int64_t> v(mu.begin(), mu.end());
        REQUIRE(to_double(h) == doctest::Approx(oracle::monomial_norm_lgamma(v)).epsilon(1e-11));
      }
}

TEST_CASE("monomial_norm agrees with sphere quadrature") {
  for (const auto& mu : enumerate_degree(2, 3)) {
    const auto value = oracle::sphere3_integral([&](cd z1, cd z2) { return std::norm(monomial(mu, z1, z2)); });
    CHECK(value.real() == doctest::Approx(to_double(monomial_norm(mu, 2))).epsilon(1e-13));
  }
}

TEST_CASE("monomial_norm_ratio_double matches the exact ratio") {
  const MultiIndex mu{7, 3, 11};
  const MultiIndex shift{2, 0, 1};
  CHECK(monomial_norm_ratio_double(mu, shift) == doctest::Approx(to_double(monomial_norm_ratio(mu, shift))).epsilon(1e-14));
}

TEST_CASE("assemble_block examples") {
  const auto identity = assemble_block(SymbolPoly::constant(3, 1.0), 3, 4);
  CHECK(identity.matrix.isApprox(Eigen::MatrixXcd::Identity(15, 15), 0.0));

  const auto diag = assemble_block_exact(a1_poly(2), 2, 2);
  REQUIRE(diag.entries.size() == 3);
  CHECK(diag.find(0, 0)->re == Rational(3, 4));
  CHECK(diag.find(1, 1)->re == Rational(2, 4));
  CHECK(diag.find(2, 2)->re == Rational(1, 4));
  CHECK(diag.to_block().is_diagonal());

  const auto off = assemble_block(offdiag_poly(), 2, 1);
  REQUIRE(off.basis == std::vector<MultiIndex>{MultiIndex{1, 0}, MultiIndex{0, 1}});
  CHECK(std::abs(off.matrix(1, 0) - 1.0 / 3.0) < 1e-15);
  CHECK(std::abs(off.matrix(0, 1) - 1.0 / 3.0) < 1e-15);
  CHECK(std::abs(off.matrix(0, 0)) == 0.0);
  const auto off_exact = assemble_block_exact(offdiag_poly(), 2, 1);
  CHECK(off_exact.find(1, 0)->value().real() == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("assemble_block agrees entrywise with sphere quadrature") {
  for (const auto& F : {a1_poly(2), offdiag_poly(), mixed_poly()})
    for (std::int64_t k = 1; k <= 4; ++k) {
      const auto block = assemble_block(F, 2, k);
      for (std::size_t r = 0; r < block.dim(); ++r)
        for (std::size_t c = 0; c < block.dim(); ++c) {
          const cd expected = quadrature_entry(F, block.basis[r], block.basis[c]);
          REQUIRE(std::abs(block.matrix(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) - expected) < 1e-12);
        }
    }
}

TEST_CASE("exact and floating assembly agree; exact blocks are Hermitian") {
  for (std::int64_t k = 0; k <= 8; ++k) {
    const auto exact = assemble_block_exact(mixed_poly(), 2, k);
    const auto block = assemble_block(mixed_poly(), 2, k);
    CHECK((exact.to_block().matrix - block.matrix).cwiseAbs().maxCoeff() < 1e-14);
    for (const auto& e : exact.entries) {
      const auto* partner = exact.find(e.col, e.row);
      REQUIRE(partner != nullptr);
      CHECK(partner->re == e.re);
      CHECK(partner->im == -e.im);
      CHECK(partner->radicand == e.radicand);
    }
  }
}

TEST_CASE("blocks are Hermitian with spectrum inside the symbol range (property)") {
  // 0 <= a1 <= 1 and |z1 zbar2 + z2 zbar1| / |z|^2 <= 1.
  for (std::int64_t k = 0; k <= 20; ++k) {
    for (const auto& F : {a1_poly(2), offdiag_poly()}) {
      const auto block = assemble_block(F, 2, k);
      REQUIRE((block.matrix - block.matrix.adjoint()).cwiseAbs().maxCoeff() == 0.0);
      const auto ev = block_eigenvalues(block);
      REQUIRE(ev.minCoeff() >= -1.0 - 1e-12);
      REQUIRE(ev.maxCoeff() <= 1.0 + 1e-12);
    }
    const auto ev = block_eigenvalues(assemble_block(a1_poly(3), 3, k));
    REQUIRE(ev.minCoeff() >= 0.0);
    REQUIRE(ev.maxCoeff() <= 1.0);
  }
}

TEST_CASE("permuting coordinates conjugates the block by a permutation (property)") {
  const std::size_t perm[] = {1, 0};
  for (std::int64_t k = 1; k <= 10; ++k) {
    const auto a = block_eigenvalues(assemble_block(mixed_poly(), 2, k));
    const auto b = block_eigenvalues(assemble_block(mixed_poly().permuted(perm), 2, k));
    REQUIRE((a - b).cwiseAbs().maxCoeff() < 1e-12);
  }
  const std::size_t perm3[] = {2, 0, 1};
  const auto F = a1_poly(3);
  const auto block = assemble_block(F, 3, 5);
  const auto moved = assemble_block(F.permuted(perm3), 3, 5);
  for (std::size_t i = 0; i < block.dim(); ++i) {
    const auto target = block.basis[i].permuted(perm3);
    const auto j = static_cast<Eigen::Index>(std::find(moved.basis.begin(), moved.basis.end(), target) - moved.basis.begin());
    const auto ii = static_cast<Eigen::Index>(i);
    REQUIRE(std::abs(moved.matrix(j, j) - block.matrix(ii, ii)) < 1e-15);
  }
}

TEST_CASE("SymbolPoly validation") {
  CHECK_NOTHROW(mixed_poly().validate());
  CHECK_THROWS_AS(SymbolPoly(2, {{MultiIndex{1, 0}, MultiIndex{0, 1}, 1.0}}).validate(), ValidationError);
  CHECK_THROWS_AS(SymbolPoly(2, {{MultiIndex{2, 0}, MultiIndex{0, 1}, 1.0}, {MultiIndex{0, 1}, MultiIndex{2, 0}, 1.0}}).validate(),
                  ValidationError);
  CHECK_THROWS_AS(SymbolPoly(2, {{MultiIndex{1, 0}, MultiIndex{1, 0}, cd(1.0, 1.0)}}).validate(), ValidationError);
  CHECK_THROWS_AS(assemble_block(a1_poly(2), 3, 2), ValidationError);
  CHECK(a1_poly(2).is_invariant());
  CHECK_FALSE(offdiag_poly().is_invariant());
  const cd z[] = {cd(1.0, 0.0), cd(0.0, 1.0)};
  CHECK(offdiag_poly().evaluate(z) == doctest::Approx(0.0));
  const cd w[] = {cd(2.0, 0.0), cd(2.0, 0.0)};
  CHECK(offdiag_poly().evaluate(w) == doctest::Approx(1.0));
}

TEST_CASE("invariant_eigenvalue examples") {
  const auto a1 = InvariantSymbol::coordinate(2, 0);
  const auto a1sq = InvariantSymbol::monomial(MultiIndex{2, 0});
  for (std::int64_t k = 0; k <= 40; ++k)
    for (std::int64_t b = 0; b <= k; ++b) {
      const MultiIndex alpha{b, k - b};
      REQUIRE(invariant_eigenvalue(a1, alpha) == Rational(b + 1, k + 2));
      REQUIRE(invariant_eigenvalue(a1sq, alpha) == Rational((b + 2) * (b + 1), (k + 3) * (k + 2)));
      REQUIRE(invariant_eigenvalue(InvariantSymbol::constant(2), alpha) == 1);
    }
  CHECK_THROWS_AS(invariant_eigenvalue(InvariantSymbol::from_function(2, [](auto a) { return a[0]; }), MultiIndex{1, 0}),
                  ValidationError);
}

TEST_CASE("invariant eigenvalues equal the diagonal of the exact block") {
  const auto F = InvariantSymbol::polynomial(
      3, {{MultiIndex{1, 0, 0}, Rational(1, 2)}, {MultiIndex{1, 1, 0}, Rational(3)}, {MultiIndex{0, 0, 2}, Rational(-1, 8)}});  // dyadic: survives the double coefficients of SymbolPoly
  for (std::int64_t k = 0; k <= 8; ++k) {
    const auto exact = assemble_block_exact(F.to_symbol_poly(), 3, k);
    REQUIRE(exact.entries.size() <= exact.basis.size());
    for (const auto& e : exact.entries) {
      REQUIRE(e.row == e.col);
      REQUIRE(e.im == 0);
      REQUIRE(e.radicand == 1);
      REQUIRE(e.re == invariant_eigenvalue(F, exact.basis[e.row]));
    }
  }
}

TEST_CASE("InvariantSymbol evaluation, sums and permutation") {
  const auto F = InvariantSymbol::coordinate(2, 0) + InvariantSymbol::monomial(MultiIndex{0, 2}, 2);
  const double a[] = {0.25, 0.75};
  CHECK(F(a) == doctest::Approx(0.25 + 2 * 0.5625));
  const std::size_t perm[] = {1, 0};
  const double b[] = {0.75, 0.25};
  CHECK(F.permuted(perm)(b) == doctest::Approx(F(a)));
  const auto g = InvariantSymbol::from_function(2, [](std::span<const double> x) { return x[0] * x[1]; });
  CHECK_FALSE(g.has_polynomial());
  CHECK(g(a) == doctest::Approx(0.1875));
  CHECK_THROWS_AS(g.to_symbol_poly(), ValidationError);
}
