#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "toeplab/errors.hpp"
#include "toeplab/reduction.hpp"

#include <numbers>

using namespace toeplab;
using cd = std::complex<double>;

namespace {

constexpr double kPi = std::numbers::pi;

double factorial(int m) { return std::tgamma(m + 1.0); }

}  // namespace

TEST_CASE("moment_map examples") {
  const cd a[] = {1.0, 0.0};
  CHECK(moment_map(a) == std::vector<double>{1.0, 0.0});
  const cd b[] = {cd(1.0 / std::sqrt(2.0), 0.0), cd(0.0, 1.0 / std::sqrt(2.0))};
  const auto mb = moment_map(b);
  CHECK(mb[0] == doctest::Approx(0.5));
  CHECK(mb[1] == doctest::Approx(0.5));
  const cd c[] = {1.0, cd(0.0, 2.0), 0.0};
  CHECK(moment_map(c) == std::vector<double>{1.0, 4.0, 0.0});
}

TEST_CASE("full_sphere_volume and ReducedSpaceSpec") {
  CHECK(full_sphere_volume(1) == 1.0);
  CHECK(full_sphere_volume(2) == doctest::Approx(2 * kPi));
  CHECK(full_sphere_volume(4) == doctest::Approx(std::pow(2 * kPi, 3) / 6.0));
  CHECK_NOTHROW(ReducedSpaceSpec::full_sphere(3).validate());
  ReducedSpaceSpec bad = ReducedSpaceSpec::full_sphere(3);
  bad.sigma_volume = 0.0;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  ReducedSpaceSpec toric{ReducedSpaceSpec::Kind::ToricFiber, 2, std::nullopt, 1.0};
  CHECK_THROWS_AS(toric.validate(), ValidationError);
  toric.sub = SubtorusData::diagonal_circle(2);
  CHECK_NOTHROW(toric.validate());
}

TEST_CASE("c0_sphere_mc examples") {
  const auto a1 = InvariantSymbol::coordinate(2, 0);
  const auto one = c0_sphere_mc(a1, TestFunction::one(), 2, 20000, 5);
  CHECK(one.estimate == doctest::Approx(2 * kPi).epsilon(1e-15));
  CHECK(one.standard_error == 0.0);
  CHECK(one.samples == 20000);
  CHECK(one.seed == 5);

  const auto mean = c0_sphere_mc(a1, TestFunction::power(1), 2, 400000, 11);
  CHECK(std::abs(mean.estimate - kPi) < 4.0 * mean.standard_error);
  CHECK(mean.standard_error < 5e-3);

  const auto n3 = c0_sphere_mc(InvariantSymbol::coordinate(3, 0), TestFunction::power(1), 3, 400000, 12);
  CHECK(std::abs(n3.estimate - std::pow(2 * kPi, 2) / 2.0 / 3.0) < 4.0 * n3.standard_error);

  CHECK_THROWS_AS(c0_sphere_mc(a1, TestFunction::one(), 2, 9999, 1), ValidationError);
  CHECK_THROWS_AS(c0_sphere_mc(a1, TestFunction::one(), 3, 20000, 1), ValidationError);
}

TEST_CASE("sphere_average agrees with an independent sampler") {
  const std::uint64_t N = 400000;
  const auto g1 = [](std::span<const cd> z) { return std::norm(z[0]) * std::norm(z[1]); };
  const auto g2 = [](std::span<const cd> z) { return std::real(z[0] * std::conj(z[1])) * std::real(z[0] * std::conj(z[2])) + std::norm(z[2]); };
  const auto ours1 = sphere_average(2, N, 3, g1);
  const auto ours2 = sphere_average(3, N, 3, g2);
  const auto ref1 = oracle::sphere_means(2, N, 99, {[&](const std::vector<cd>& z) { return g1(z); }})[0];
  const auto ref2 = oracle::sphere_means(3, N, 98, {[&](const std::vector<cd>& z) { return g2(z); }})[0];
  CHECK(std::abs(ours1.estimate - ref1.mean) < 4.0 * std::hypot(ours1.standard_error, ref1.se));
  CHECK(std::abs(ours2.estimate - ref2.mean) < 4.0 * std::hypot(ours2.standard_error, ref2.se));
  // E[a1 a2] = 1/6 on S^3.
  CHECK(std::abs(ours1.estimate - 1.0 / 6.0) < 4.0 * ours1.standard_error);
}

TEST_CASE("Monte Carlo is reproducible and independent of the thread count (property)") {
  const auto F = InvariantSymbol::monomial(MultiIndex{1, 1, 0}, 3) + InvariantSymbol::coordinate(3, 2);
  const auto f = TestFunction::polynomial({0.1, 1.0, -0.5});
  const auto base = c0_sphere_mc(F, f, 3, 300000, 42);
  for (unsigned threads : {1u, 2u, 3u, 8u}) {
    const auto again = c0_sphere_mc(F, f, 3, 300000, 42, {threads, {}});
    CHECK(again.estimate == base.estimate);
    CHECK(again.standard_error == base.standard_error);
  }
  CHECK(c0_sphere_mc(F, f, 3, 300000, 43).estimate != base.estimate);
}

TEST_CASE("coordinate permutations relabel the symbol exactly (property)") {
  const auto a1 = InvariantSymbol::coordinate(3, 0);
  const auto a2 = InvariantSymbol::coordinate(3, 1);
  McOptions swap;
  swap.permutation = {1, 0, 2};
  const auto f = TestFunction::power(2);
  CHECK(c0_sphere_mc(a1, f, 3, 50000, 8, swap).estimate == c0_sphere_mc(a2, f, 3, 50000, 8).estimate);
  const auto plain = c0_sphere_mc(a1, f, 3, 400000, 9);
  const auto moved = c0_sphere_mc(a1, f, 3, 400000, 9, {1, {2, 0, 1}});
  CHECK(std::abs(plain.estimate - moved.estimate) < 4.0 * std::hypot(plain.standard_error, moved.standard_error));
  McOptions bad;
  bad.permutation = {0, 0, 1};
  CHECK_THROWS_AS(c0_sphere_mc(a1, f, 3, 50000, 8, bad), ValidationError);
}

TEST_CASE("c0_simplex_quad examples") {
  const auto a1 = InvariantSymbol::coordinate(2, 0);
  CHECK(c0_simplex_quad(a1, TestFunction::one(), 2, 8) == doctest::Approx(2 * kPi).epsilon(1e-14));
  CHECK(c0_simplex_quad(a1, TestFunction::power(1), 2, 8) == doctest::Approx(kPi).epsilon(1e-14));
  CHECK(std::abs(c0_simplex_quad(a1, TestFunction::power(2), 2, 256) - 2 * kPi / 3) < 1e-4);
  CHECK_THROWS_AS(c0_simplex_quad(a1, TestFunction::one(), 2, 7), ValidationError);
}

TEST_CASE("simplex_integral matches closed-form simplex moments") {
  for (std::size_t n = 2; n <= 4; ++n)
    for (int p = 0; p <= 4; ++p) {
      const double exact = oracle::simplex_moment(n, p) / factorial(static_cast<int>(n) - 1);
      const double got = simplex_integral(n, 64, [p](std::span<const double> a) { return std::pow(a[0], p); });
      CHECK(got == doctest::Approx(exact).epsilon(p <= 1 ? 1e-12 : 2e-3));
    }
}

TEST_CASE("simplex quadrature converges at second order") {
  const auto g = [](std::span<const double> a) { return std::exp(a[0]); };
  const double exact = std::exp(1.0) - 2.0;  // integral of e^x (1 - x) over [0, 1]
  const double e16 = std::abs(simplex_integral(3, 16, g) - exact);
  const double e32 = std::abs(simplex_integral(3, 32, g) - exact);
  const double e64 = std::abs(simplex_integral(3, 64, g) - exact);
  CHECK(std::log2(e16 / e32) == doctest::Approx(2.0).epsilon(0.1));
  CHECK(std::log2(e32 / e64) == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("simplex quadrature is independent of the thread count (property)") {
  const auto F = InvariantSymbol::monomial(MultiIndex{2, 1, 0, 0}, 7);
  const auto f = TestFunction::polynomial({0.0, 1.0, 1.0});
  const double base = c0_simplex_quad(F, f, 4, 24);
  for (unsigned threads : {2u, 5u}) CHECK(std::abs(c0_simplex_quad(F, f, 4, 24, threads) - base) <= 1e-12 * std::abs(base));
}

TEST_CASE("simplex quadrature and sphere Monte Carlo agree for invariant symbols") {
  const auto F = InvariantSymbol::monomial(MultiIndex{1, 1, 0}, 4);
  const auto f = TestFunction::polynomial({0.0, 1.0, -0.5});
  const auto mc = c0_sphere_mc(F, f, 3, 1000000, 77, {4, {}});
  const double quad = c0_simplex_quad(F, f, 3, 200);
  CHECK(std::abs(mc.estimate - quad) < 3.0 * mc.standard_error + 1e-4);
}

TEST_CASE("calibrate_volume examples") {
  const std::vector<std::int64_t> ks = {10, 20, 40, 60, 100};
  CHECK(calibrate_volume(1, ks) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(calibrate_volume(2, ks) - 2 * kPi) < 1e-10);
  CHECK(std::abs(calibrate_volume(3, ks) - 2 * kPi * kPi) < 1e-8);
  CHECK(std::abs(calibrate_volume(4, ks) - std::pow(2 * kPi, 3) / 6.0) < 1e-6);
  const std::vector<std::int64_t> narrow = {10, 20, 40};
  CHECK_THROWS_AS(calibrate_volume(2, narrow), ValidationError);
}
