#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "toeplab/errors.hpp"
#include "toeplab/multiindex.hpp"

#include <set>

using namespace toeplab;

namespace {

SubtorusData cp1xcp1() { return {4, 2, {{1, 1, 0, 0}, {0, 0, 1, 1}}, {1, 1}}; }

std::vector<std::vector<std::int64_t>> as_vectors(const std::vector<MultiIndex>& v) {
  std::vector<std::vector<std::int64_t>> out;
  for (const auto& m : v) out.emplace_back(m.begin(), m.end());
  return out;
}

}  // namespace

TEST_CASE("MultiIndex rejects negative entries and checks arithmetic") {
  CHECK_THROWS_AS(MultiIndex({1, -1}), ValidationError);
  const MultiIndex a{2, 3};
  CHECK(a.degree() == 5);
  CHECK((a + MultiIndex{1, 0}) == MultiIndex{3, 3});
  CHECK_FALSE(a.shifted(MultiIndex{0, 0}, MultiIndex{3, 0}).has_value());
  CHECK(*a.shifted(MultiIndex{1, 0}, MultiIndex{0, 1}) == MultiIndex{3, 2});
  const std::size_t perm[] = {1, 0};
  CHECK(a.permuted(perm) == MultiIndex{3, 2});
  CHECK_THROWS_AS(checked_add(INT64_MAX, 1), OverflowError);
  CHECK_THROWS_AS(checked_mul(INT64_MAX / 2, 3), OverflowError);
  CHECK_THROWS_AS(binomial(200, 100), OverflowError);
  CHECK(binomial(60, 30) == 118264581564861424LL);
}

TEST_CASE("enumerate_degree small cases") {
  CHECK(as_vectors(enumerate_degree(2, 2)) == std::vector<std::vector<std::int64_t>>{{2, 0}, {1, 1}, {0, 2}});
  CHECK(enumerate_degree(2, 5).size() == 6);
  CHECK(enumerate_degree(3, 2).size() == 6);
  CHECK(enumerate_degree(4, 0).size() == 1);
  CHECK_THROWS_AS(enumerate_degree(0, 3), ValidationError);
  CHECK_THROWS_AS(enumerate_degree(2, -1), ValidationError);
}

TEST_CASE("enumerate_degree length, uniqueness and graded-lex order (property)") {
  for (std::size_t n = 1; n <= 6; ++n)
    for (std::int64_t k = 0; k <= 60; k += (n >= 5 ? 7 : 1)) {
      const auto basis = enumerate_degree(n, k);
      REQUIRE(static_cast<std::int64_t>(basis.size()) == oracle::choose(k + n - 1, n - 1));
      for (std::size_t i = 0; i < basis.size(); ++i) {
        REQUIRE(basis[i].degree() == k);
        if (i > 0) REQUIRE(graded_lex_before(basis[i - 1], basis[i]));
      }
    }
}

TEST_CASE("graded_lex_before orders by degree first") {
  CHECK(graded_lex_before(MultiIndex{0, 1}, MultiIndex{2, 0}));
  CHECK(graded_lex_before(MultiIndex{2, 0}, MultiIndex{1, 1}));
  CHECK_FALSE(graded_lex_before(MultiIndex{1, 1}, MultiIndex{1, 1}));
}

TEST_CASE("SubtorusData validation") {
  CHECK_NOTHROW(cp1xcp1().validate());
  CHECK_THROWS_AS((SubtorusData{2, 2, {{1, 1}, {2, 2}}, {1, 1}}.validate()), ValidationError);
  CHECK_THROWS_AS((SubtorusData{2, 1, {{1, 1, 1}}, {1}}.validate()), ValidationError);
  CHECK_THROWS_AS((SubtorusData{2, 1, {{1, 1}}, {1, 2}}.validate()), ValidationError);
  CHECK_THROWS_AS((SubtorusData{2, 3, {{1, 1}, {1, 0}, {0, 1}}, {1, 1, 1}}.validate()), ValidationError);
  const std::int64_t x[] = {1, 2, 3, 4};
  CHECK(cp1xcp1().apply(x) == std::vector<std::int64_t>{3, 7});
}

TEST_CASE("enumerate_fiber examples") {
  CHECK(enumerate_fiber(cp1xcp1(), 3).size() == 16);
  CHECK(enumerate_fiber(SubtorusData::diagonal_circle(2), 5).size() == 6);
  const SubtorusData weighted{2, 1, {{1, 2}}, {2}};
  CHECK(as_vectors(enumerate_fiber(weighted, 1)) == std::vector<std::vector<std::int64_t>>{{2, 0}, {0, 1}});
  CHECK_THROWS_AS(enumerate_fiber(cp1xcp1(), 0), ValidationError);
}

TEST_CASE("enumerate_fiber agrees with a brute-force scan") {
  const std::vector<SubtorusData> subs = {
      cp1xcp1(),
      SubtorusData::diagonal_circle(3),
      {2, 1, {{1, 2}}, {2}},
      {4, 2, {{1, 1, 1, 0}, {0, 0, 1, 1}}, {2, 1}},
      {3, 1, {{1, 2, 3}}, {6}},
      {3, 2, {{1, 1, 0}, {0, 1, 1}}, {2, 3}},
  };
  for (const auto& sub : subs)
    for (std::int64_t k = 1; k <= 8; ++k) {
      auto expected = oracle::brute_force_fiber(sub, k);
      std::sort(expected.begin(), expected.end(), std::greater<>());
      const auto got = as_vectors(enumerate_fiber(sub, k));
      REQUIRE(got == expected);
    }
}

TEST_CASE("enumerate_fiber points satisfy Bt beta = k alpha exactly (property)") {
  const SubtorusData sub{4, 2, {{1, 1, 1, 0}, {0, 0, 1, 1}}, {2, 1}};
  for (std::int64_t k = 1; k <= 25; ++k) {
    const auto fiber = enumerate_fiber(sub, k);
    std::set<MultiIndex> seen;
    for (const auto& beta : fiber) {
      const std::vector<std::int64_t> b(beta.begin(), beta.end());
      REQUIRE(sub.apply(b) == std::vector<std::int64_t>{2 * k, k});
      REQUIRE(seen.insert(beta).second);
    }
  }
}

TEST_CASE("diagonal circle fibers coincide with degree bases element for element") {
  for (std::size_t n = 1; n <= 4; ++n)
    for (std::int64_t k = 1; k <= 12; ++k)
      REQUIRE(enumerate_fiber(SubtorusData::diagonal_circle(n), k) == enumerate_degree(n, k));
}

TEST_CASE("unbounded fibers are a distinct error") {
  const SubtorusData open{2, 1, {{1, -1}}, {1}};
  CHECK_FALSE(fibers_bounded(open));
  CHECK_THROWS_AS(enumerate_fiber(open, 2), UnboundedFiberError);
  CHECK_THROWS_AS(fiber_count_growth(open, std::vector<std::int64_t>{1, 2}), UnboundedFiberError);
  const SubtorusData half_open{3, 2, {{1, 1, 0}, {0, 0, 0}}, {1, 0}};
  CHECK_THROWS_AS(half_open.validate(), ValidationError);
  const SubtorusData mixed{3, 1, {{1, 1, 0}}, {1}};
  CHECK_THROWS_AS(enumerate_fiber(mixed, 1), UnboundedFiberError);
  CHECK(fibers_bounded(cp1xcp1()));
}

TEST_CASE("alpha outside the image cone gives empty fibers") {
  const SubtorusData outside{2, 1, {{1, 1}}, {-1}};
  CHECK(enumerate_fiber(outside, 3).empty());
  CHECK(fiber_vertices(outside).empty());
}

TEST_CASE("fiber_count_growth examples") {
  const std::vector<std::int64_t> ks = {1, 2, 3};
  const auto counts = fiber_count_growth(cp1xcp1(), ks);
  CHECK(counts == std::vector<std::pair<std::int64_t, std::int64_t>>{{1, 4}, {2, 9}, {3, 16}});
  for (std::int64_t k = 1; k <= 20; ++k) {
    const std::int64_t kk[] = {k};
    CHECK(fiber_count_growth(SubtorusData::diagonal_circle(3), kk)[0].second == oracle::choose(k + 2, 2));
    CHECK(fiber_count_growth(SubtorusData::diagonal_circle(2), kk)[0].second == k + 1);
  }
}

TEST_CASE("fiber counts are non-decreasing for interior alpha (property)") {
  const SubtorusData sub{4, 2, {{1, 1, 1, 0}, {0, 0, 1, 1}}, {2, 1}};
  std::vector<std::int64_t> ks;
  for (std::int64_t k = 1; k <= 30; ++k) ks.push_back(k);
  const auto counts = fiber_count_growth(sub, ks);
  for (std::size_t i = 1; i < counts.size(); ++i) CHECK(counts[i].second >= counts[i - 1].second);
}

TEST_CASE("fiber_vertices of the CP1 x CP1 square") {
  const auto vertices = fiber_vertices(cp1xcp1());
  CHECK(vertices.size() == 4);
  for (const auto& v : vertices) CHECK(v.support.size() == 2);
}

TEST_CASE("pivot_columns prefers a unimodular minor") {
  const SubtorusData sub{3, 1, {{2, 1, 3}}, {6}};
  CHECK(pivot_columns(sub) == std::vector<std::size_t>{1});
}
