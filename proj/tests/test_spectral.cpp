#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "toeplab/errors.hpp"
#include "toeplab/hardy_sphere.hpp"
#include "toeplab/spectral.hpp"

#include <numbers>
#include <random>

using namespace toeplab;
using cd = std::complex<double>;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

SymbolPoly a1_poly() { return SymbolPoly(2, {{MultiIndex{1, 0}, MultiIndex{1, 0}, 1.0}}); }

SymbolPoly offdiag_poly() {
  return SymbolPoly(2, {{MultiIndex{1, 0}, MultiIndex{0, 1}, 1.0}, {MultiIndex{0, 1}, MultiIndex{1, 0}, 1.0}});
}

SymbolPoly mixed3_poly() {
  return SymbolPoly(3, {{MultiIndex{1, 0, 0}, MultiIndex{0, 1, 0}, cd(0.5, 0.5)},
                        {MultiIndex{0, 1, 0}, MultiIndex{1, 0, 0}, cd(0.5, -0.5)},
                        {MultiIndex{0, 0, 1}, MultiIndex{0, 0, 1}, 0.7},
                        {MultiIndex{1, 1, 0}, MultiIndex{0, 0, 2}, cd(0.0, 0.4)},
                        {MultiIndex{0, 0, 2}, MultiIndex{1, 1, 0}, cd(0.0, -0.4)}});
}

ToeplitzBlock random_hermitian(std::size_t dim, std::uint32_t seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> g;
  Eigen::MatrixXcd m(dim, dim);
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = {g(rng), g(rng)};
  ToeplitzBlock b;
  b.n = 2;
  b.k = static_cast<std::int64_t>(dim) - 1;
  b.basis = enumerate_degree(2, b.k);
  b.matrix = (m + m.adjoint()) / (2.0 * std::sqrt(static_cast<double>(dim)));
  return b;
}

std::vector<Sample> dimension_samples(std::size_t n, std::int64_t lo, std::int64_t hi) {
  std::vector<Sample> out;
  for (std::int64_t k = lo; k <= hi; ++k)
    out.push_back({k, scaled_measure(static_cast<double>(oracle::choose(k + static_cast<std::int64_t>(n) - 1,
                                                                         static_cast<std::int64_t>(n) - 1)),
                                     static_cast<int>(n) - 1, k)});
  return out;
}

}  // namespace

TEST_CASE("measure_poly examples") {
  const auto identity = assemble_block(SymbolPoly::constant(2, 1.0), 2, 6);
  CHECK(measure_poly(identity, TestFunction::one()) == 7.0);
  CHECK(measure_poly(assemble_block(a1_poly(), 2, 4), TestFunction::power(1)) == doctest::Approx(2.5).epsilon(1e-15));
  CHECK(measure_poly(assemble_block(a1_poly(), 2, 2), TestFunction::power(2)) == doctest::Approx(0.875).epsilon(1e-15));
  CHECK(measure_poly(assemble_block(offdiag_poly(), 2, 1), TestFunction::power(2)) == doctest::Approx(2.0 / 9.0).epsilon(1e-15));
  CHECK_THROWS_AS(measure_poly(identity, TestFunction::power(17)), ValidationError);
  CHECK_NOTHROW(measure_poly(identity, TestFunction::power(17), 20));
  CHECK_THROWS_AS(measure_poly(identity, TestFunction::sampled([](double x) { return x; }, 0, 1)), ValidationError);
}

TEST_CASE("measure_eigen examples") {
  const auto identity = assemble_block(SymbolPoly::constant(2, 1.0), 2, 6);
  const auto f = TestFunction::sampled([](double x) { return std::exp(x); }, -2, 2);
  CHECK(measure_eigen(identity, f) == doctest::Approx(7.0 * std::exp(1.0)).epsilon(1e-15));
  CHECK(measure_eigen(assemble_block(a1_poly(), 2, 2), TestFunction::power(1)) == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(measure_eigen(assemble_block(offdiag_poly(), 2, 1), TestFunction::power(2)) ==
        doctest::Approx(2.0 / 9.0).epsilon(1e-14));
  const auto ev = block_eigenvalues(assemble_block(offdiag_poly(), 2, 1));
  CHECK(ev[0] == doctest::Approx(-1.0 / 3.0).epsilon(1e-14));
  CHECK(ev[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("measure_poly and measure_eigen agree for polynomial f (property)") {
  const std::vector<TestFunction> fs = {TestFunction::polynomial({0.3, -1.0, 2.0}), TestFunction::power(5),
                                        TestFunction::polynomial({1, -2, 3, -4, 5, -6, 7, -8, 9})};
  for (std::int64_t k : {1, 5, 12, 25}) {
    for (const auto& block : {assemble_block(offdiag_poly(), 2, k), assemble_block(mixed3_poly(), 3, k / 2)})
      for (const auto& f : fs) {
        const double a = measure_poly(block, f);
        const double b = measure_eigen(block, f);
        double scale = 0.0;
        const auto ev = block_eigenvalues(block);
        for (std::size_t j = 0; j < f.coefficients().size(); ++j)
          scale += std::abs(f.coefficients()[j]) * ev.cwiseAbs().array().pow(static_cast<double>(j)).sum();
        REQUIRE(std::abs(a - b) <= 1e-12 * scale);
      }
  }
}

TEST_CASE("measures are linear in f (property)") {
  const auto block = assemble_block(mixed3_poly(), 3, 4);
  const auto f = TestFunction::polynomial({1.0, 0.5, -0.25});
  const auto g = TestFunction::polynomial({0.0, -2.0, 0.0, 3.0});
  const auto combo = TestFunction::polynomial({2.0 * 1.0, 2.0 * 0.5 - 3.0 * -2.0, 2.0 * -0.25, -3.0 * 3.0});
  CHECK(measure_eigen(block, combo) == doctest::Approx(2.0 * measure_eigen(block, f) - 3.0 * measure_eigen(block, g)).epsilon(1e-12));
  CHECK(measure_poly(block, combo) == doctest::Approx(2.0 * measure_poly(block, f) - 3.0 * measure_poly(block, g)).epsilon(1e-12));
}

TEST_CASE("measures are invariant under unitary conjugation (property)") {
  for (std::uint32_t seed = 1; seed <= 5; ++seed) {
    auto block = random_hermitian(12, seed);
    auto rotated = random_hermitian(12, seed + 100);
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(rotated.matrix + Eigen::MatrixXcd::Identity(12, 12) * cd(0.0, 1.0));
    const Eigen::MatrixXcd u = qr.householderQ();
    rotated.matrix = u * block.matrix * u.adjoint();
    rotated.matrix = (rotated.matrix + rotated.matrix.adjoint()).eval() / 2.0;
    const auto f = TestFunction::polynomial({0.1, 0.2, -0.3, 0.4, 0.5});
    CHECK(measure_eigen(rotated, f) == doctest::Approx(measure_eigen(block, f)).epsilon(1e-12));
    CHECK(measure_poly(rotated, f) == doctest::Approx(measure_poly(block, f)).epsilon(1e-12));
  }
}

TEST_CASE("scaled_measure examples") {
  for (std::int64_t k : {1, 10, 1000})
    CHECK(scaled_measure(static_cast<double>(k + 1), 1, k) == doctest::Approx(kTwoPi * (k + 1) / k).epsilon(1e-15));
  CHECK(scaled_measure(0.0, 3, 7) == 0.0);
  CHECK(scaled_measure(1.0, 0, 7) == 1.0);
  CHECK_THROWS_AS(scaled_measure(1.0, 1, 0), ValidationError);
  CHECK_THROWS_AS(scaled_measure(1.0, -1, 3), ValidationError);
}

TEST_CASE("fit_expansion examples") {
  const auto dims = dimension_samples(2, 10, 60);
  const auto fit = fit_expansion(dims, 2);
  CHECK(std::abs(fit.coefficients[0] - kTwoPi) < 1e-6);
  CHECK(std::abs(fit.coefficients[1] - kTwoPi) < 1e-3);
  CHECK(fit.k_range.size() == 51);
  CHECK(fit.residual_norm < 1e-12);

  std::vector<Sample> constant;
  for (std::int64_t k = 10; k <= 30; ++k) constant.push_back({k, 4.25});
  const auto cfit = fit_expansion(constant, 3);
  CHECK(cfit.coefficients[0] == doctest::Approx(4.25).epsilon(1e-12));
  for (std::size_t i = 1; i < cfit.coefficients.size(); ++i) CHECK(std::abs(cfit.coefficients[i]) < 1e-8);

  std::vector<Sample> poly;
  for (std::int64_t k = 5; k <= 40; ++k) {
    const double h = 1.0 / static_cast<double>(k);
    poly.push_back({k, 1.0 + h + h * h});
  }
  const auto pfit = fit_expansion(poly, 2);
  for (double c : pfit.coefficients) CHECK(std::abs(c - 1.0) < 1e-8);
}

TEST_CASE("fit_expansion round-trips exact models and reports a stable c0 (property)") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int trial = 0; trial < 20; ++trial) {
    const int order = 1 + trial % 3;
    std::vector<double> c(order + 1);
    for (auto& x : c) x = u(rng);
    std::vector<Sample> s;
    for (std::int64_t k = 10; k <= 60; ++k) {
      double v = 0.0, p = 1.0;
      for (double ci : c) {
        v += ci * p;
        p /= static_cast<double>(k);
      }
      s.push_back({k, v});
    }
    const auto fit = fit_expansion(s, order);
    REQUIRE(std::abs(fit.coefficients[0] - c[0]) < 1e-9);
    REQUIRE(fit.c0_uncertainty < 1e-9);
    REQUIRE(fit.residual_norm < 1e-11);
  }
}

TEST_CASE("fit_expansion rejects short or degenerate ranges") {
  const auto dims = dimension_samples(2, 10, 12);
  CHECK_THROWS_AS(fit_expansion(dims, 2), ValidationError);
  CHECK_THROWS_AS(fit_expansion(dimension_samples(2, 1, 20), 2), ValidationError);
  CHECK_THROWS_AS(fit_expansion(dims, -1), ValidationError);
  std::vector<Sample> tight;
  for (std::int64_t k = 1000000; k < 1000004; ++k) tight.push_back({k, 1.0});
  CHECK_THROWS_AS(fit_expansion(tight, 2), NumericalError);
}

TEST_CASE("richardson_table examples") {
  std::vector<Sample> s;
  for (std::int64_t k : {8, 16, 32, 64}) s.push_back({k, 2.0 + 3.0 / static_cast<double>(k)});
  const auto t1 = richardson_table(s, 1);
  CHECK(t1.limit == doctest::Approx(2.0).epsilon(1e-14));
  std::vector<Sample> q;
  for (std::int64_t k : {8, 16, 32, 64}) {
    const double h = 1.0 / static_cast<double>(k);
    q.push_back({k, 1.0 - h + 5.0 * h * h - 2.0 * h * h * h});
  }
  CHECK(richardson_table(q, 3).limit == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(richardson_table(q, 1).limit - 1.0) > 1e-4);
  CHECK_THROWS_AS(richardson_table(q, 4), ValidationError);
  CHECK_THROWS_AS(richardson_table(std::span<const Sample>(q.data(), 1), 1), ValidationError);
}

TEST_CASE("TestFunction evaluation") {
  CHECK(TestFunction::polynomial({1.0, -1.0, 0.25})(2.0) == doctest::Approx(0.0));
  CHECK(TestFunction::power(3)(0.5) == 0.125);
  CHECK(TestFunction::power(3).degree() == 3);
  const auto s = TestFunction::sampled([](double x) { return x * x; }, -1.0, 1.0);
  CHECK_FALSE(s.is_polynomial());
  CHECK(s(0.5) == 0.25);
}
