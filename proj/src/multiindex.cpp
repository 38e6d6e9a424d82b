#include "toeplab/multiindex.hpp"

#include "toeplab/errors.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <string>

namespace toeplab {

MultiIndex::MultiIndex(std::initializer_list<value_type> entries)
    : MultiIndex(std::vector<value_type>(entries)) {}

MultiIndex::MultiIndex(std::vector<value_type> entries) : entries_(std::move(entries)) {
  for (auto e : entries_)
    if (e < 0) throw ValidationError("MultiIndex: negative entry " + std::to_string(e));
}

MultiIndex MultiIndex::unit(std::size_t n, std::size_t j) {
  MultiIndex m(n);
  m.entries_.at(j) = 1;
  return m;
}

MultiIndex::value_type MultiIndex::degree() const {
  value_type s = 0;
  for (auto e : entries_) s = checked_add(s, e);
  return s;
}

MultiIndex MultiIndex::operator+(const MultiIndex& other) const {
  if (other.size() != size()) throw ValidationError("MultiIndex: size mismatch in sum");
  MultiIndex out(size());
  for (std::size_t i = 0; i < size(); ++i) out.entries_[i] = checked_add(entries_[i], other.entries_[i]);
  return out;
}

std::optional<MultiIndex> MultiIndex::shifted(const MultiIndex& plus, const MultiIndex& minus) const {
  if (plus.size() != size() || minus.size() != size()) throw ValidationError("MultiIndex: size mismatch in shift");
  MultiIndex out(size());
  for (std::size_t i = 0; i < size(); ++i) {
    const value_type v = checked_add(entries_[i], plus.entries_[i]) - minus.entries_[i];
    if (v < 0) return std::nullopt;
    out.entries_[i] = v;
  }
  return out;
}

MultiIndex MultiIndex::permuted(std::span<const std::size_t> perm) const {
  if (perm.size() != size()) throw ValidationError("MultiIndex: permutation size mismatch");
  MultiIndex out(size());
  for (std::size_t i = 0; i < size(); ++i) out.entries_[perm[i]] = entries_[i];
  return out;
}

std::size_t MultiIndexHash::operator()(const MultiIndex& m) const noexcept {
  std::size_t h = 0x9e3779b97f4a7c15ull;
  for (auto e : m) h ^= std::hash<std::int64_t>{}(e) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  return h;
}

bool graded_lex_before(const MultiIndex& a, const MultiIndex& b) {
  const auto da = a.degree();
  const auto db = b.degree();
  if (da != db) return da < db;
  return std::lexicographical_compare(b.begin(), b.end(), a.begin(), a.end());
}

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r)) throw OverflowError("integer overflow in addition");
  return r;
}

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw OverflowError("integer overflow in multiplication");
  return r;
}

std::int64_t binomial(std::int64_t n, std::int64_t k) {
  if (k < 0 || n < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::int64_t result = 1;
  for (std::int64_t i = 1; i <= k; ++i) {
    // result * (n - k + i) is divisible by i at every step
    const std::int64_t g = std::gcd(result, i);
    result = checked_mul(result / g, (n - k + i) / (i / g));
  }
  return result;
}

void SubtorusData::validate() const {
  if (n == 0 || d == 0) throw ValidationError("SubtorusData: n and d must be positive");
  if (d > n) throw ValidationError("SubtorusData: d exceeds n");
  if (bt.size() != d) throw ValidationError("SubtorusData: Bt must have d rows");
  for (const auto& row : bt)
    if (row.size() != n) throw ValidationError("SubtorusData: every row of Bt must have n entries");
  if (alpha.size() != d) throw ValidationError("SubtorusData: alpha must have d entries");
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), 0);
  if (rank(select_columns(bt, all)) != d) throw ValidationError("SubtorusData: Bt must have full row rank");
}

std::vector<std::int64_t> SubtorusData::apply(std::span<const std::int64_t> x) const {
  std::vector<std::int64_t> out(d, 0);
  for (std::size_t r = 0; r < d; ++r)
    for (std::size_t c = 0; c < n; ++c) out[r] = checked_add(out[r], checked_mul(bt[r][c], x[c]));
  return out;
}

SubtorusData SubtorusData::diagonal_circle(std::size_t n) {
  return SubtorusData{n, 1, IntMatrix{std::vector<std::int64_t>(n, 1)}, {1}};
}

SubtorusData SubtorusData::full_torus(std::vector<std::int64_t> alpha) {
  const std::size_t n = alpha.size();
  IntMatrix bt(n, std::vector<std::int64_t>(n, 0));
  for (std::size_t i = 0; i < n; ++i) bt[i][i] = 1;
  return SubtorusData{n, n, std::move(bt), std::move(alpha)};
}

namespace {

void degree_recurse(std::size_t pos, std::int64_t remaining, std::vector<std::int64_t>& current,
                    std::vector<MultiIndex>& out) {
  if (pos + 1 == current.size()) {
    current[pos] = remaining;
    out.emplace_back(current);
    return;
  }
  for (std::int64_t v = remaining; v >= 0; --v) {
    current[pos] = v;
    degree_recurse(pos + 1, remaining - v, current, out);
  }
}

}  // namespace

std::vector<MultiIndex> enumerate_degree(std::size_t n, std::int64_t k) {
  if (n == 0) throw ValidationError("multiindex::enumerate_degree: n must be >= 1");
  if (k < 0) throw ValidationError("multiindex::enumerate_degree: k must be >= 0");
  std::vector<MultiIndex> out;
  out.reserve(static_cast<std::size_t>(binomial(checked_add(k, static_cast<std::int64_t>(n) - 1),
                                                static_cast<std::int64_t>(n) - 1)));
  std::vector<std::int64_t> current(n, 0);
  degree_recurse(0, k, current, out);
  return out;
}

bool fibers_bounded(const SubtorusData& sub) {
  sub.validate();
  // A nonzero recession direction exists iff {x >= 0 : Bt x = 0, sum x = 1}
  // has a basic feasible solution; its support has at most d+1 columns.
  IntMatrix augmented = sub.bt;
  augmented.emplace_back(sub.n, 1);
  RationalVector rhs(sub.d + 1, Rational(0));
  rhs.back() = 1;
  for (std::size_t s = 1; s <= std::min(sub.n, sub.d + 1); ++s) {
    for (const auto& support : subsets_of_size(sub.n, s)) {
      auto sol = solve_unique(select_columns(augmented, support), rhs);
      if (sol && std::all_of(sol->begin(), sol->end(), [](const Rational& r) { return r >= 0; })) return false;
    }
  }
  return true;
}

std::vector<PolytopeVertex> fiber_vertices(const SubtorusData& sub) {
  if (!fibers_bounded(sub))
    throw UnboundedFiberError("multiindex::fiber_vertices: fiber polytope is not compact (Bt x = 0 has a "
                              "non-negative nonzero solution)");
  std::vector<PolytopeVertex> out;
  RationalVector rhs(sub.alpha.begin(), sub.alpha.end());
  if (std::all_of(rhs.begin(), rhs.end(), [](const Rational& r) { return r == 0; })) {
    out.push_back({RationalVector(sub.n, Rational(0)), {}});
    return out;
  }
  for (std::size_t s = 1; s <= sub.d; ++s) {
    for (const auto& support : subsets_of_size(sub.n, s)) {
      auto sol = solve_unique(select_columns(sub.bt, support), rhs);
      if (!sol || !std::all_of(sol->begin(), sol->end(), [](const Rational& r) { return r > 0; })) continue;
      PolytopeVertex v{RationalVector(sub.n, Rational(0)), support};
      for (std::size_t j = 0; j < support.size(); ++j) v.point[support[j]] = (*sol)[j];
      out.push_back(std::move(v));
    }
  }
  return out;
}

std::vector<std::size_t> pivot_columns(const SubtorusData& sub) {
  std::vector<std::size_t> pivot;
  Rational pivot_det = 0;
  for (const auto& cols : subsets_of_size(sub.n, sub.d)) {
    Rational det = determinant(select_columns(sub.bt, cols));
    if (det == 0) continue;
    if (pivot.empty() || (abs(det) == 1 && abs(pivot_det) != 1)) {
      pivot = cols;
      pivot_det = det;
    }
    if (abs(pivot_det) == 1) break;
  }
  if (pivot.empty()) throw ValidationError("multiindex::pivot_columns: Bt has no invertible d x d minor");
  return pivot;
}

std::vector<MultiIndex> enumerate_fiber(const SubtorusData& sub, std::int64_t k) {
  if (k < 1) throw ValidationError("multiindex::enumerate_fiber: k must be >= 1");
  const auto vertices = fiber_vertices(sub);
  std::vector<MultiIndex> out;
  if (vertices.empty()) return out;

  const std::size_t n = sub.n;
  const std::size_t d = sub.d;

  std::vector<std::int64_t> upper(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    Rational best = 0;
    for (const auto& v : vertices) best = std::max(best, v.point[i]);
    upper[i] = floor_to_int64(best * k);
  }

  // Enumerate the n-d free coordinates and solve for the pivots exactly.
  const std::vector<std::size_t> pivot = pivot_columns(sub);
  const Rational pivot_det = determinant(select_columns(sub.bt, pivot));
  std::vector<std::size_t> free_cols;
  for (std::size_t i = 0; i < n; ++i)
    if (std::find(pivot.begin(), pivot.end(), i) == pivot.end()) free_cols.push_back(i);

  // Integer adjugate of the pivot block: x_J = adj * rhs / det.
  const std::int64_t det = numerator(pivot_det).convert_to<std::int64_t>();
  std::vector<std::vector<std::int64_t>> adj(d, std::vector<std::int64_t>(d, 0));
  for (std::size_t j = 0; j < d; ++j) {
    RationalVector e(d, Rational(0));
    e[j] = 1;
    auto col = solve_unique(select_columns(sub.bt, pivot), e);
    for (std::size_t i = 0; i < d; ++i) adj[i][j] = numerator(Rational((*col)[i] * pivot_det)).convert_to<std::int64_t>();
  }

  std::vector<std::int64_t> target(d);
  for (std::size_t r = 0; r < d; ++r) target[r] = checked_mul(k, sub.alpha[r]);

  std::vector<std::int64_t> x(n, 0);
  std::vector<std::int64_t> rhs(d);
  while (true) {
    for (std::size_t r = 0; r < d; ++r) {
      std::int64_t acc = target[r];
      for (auto f : free_cols) acc = checked_add(acc, -checked_mul(sub.bt[r][f], x[f]));
      rhs[r] = acc;
    }
    bool ok = true;
    for (std::size_t i = 0; i < d && ok; ++i) {
      std::int64_t acc = 0;
      for (std::size_t j = 0; j < d; ++j) acc = checked_add(acc, checked_mul(adj[i][j], rhs[j]));
      if (acc % det != 0) {
        ok = false;
        break;
      }
      const std::int64_t value = acc / det;
      if (value < 0 || value > upper[pivot[i]]) ok = false;
      x[pivot[i]] = value;
    }
    if (ok) out.emplace_back(x);

    // odometer over the free coordinates
    std::size_t pos = 0;
    while (pos < free_cols.size()) {
      auto& slot = x[free_cols[pos]];
      if (slot < upper[free_cols[pos]]) {
        ++slot;
        break;
      }
      slot = 0;
      ++pos;
    }
    if (pos == free_cols.size()) break;
  }

  std::sort(out.begin(), out.end(), [](const MultiIndex& a, const MultiIndex& b) { return b < a; });
  return out;
}

std::vector<std::pair<std::int64_t, std::int64_t>> fiber_count_growth(const SubtorusData& sub,
                                                                      std::span<const std::int64_t> ks) {
  std::vector<std::pair<std::int64_t, std::int64_t>> out;
  out.reserve(ks.size());
  for (auto k : ks) out.emplace_back(k, static_cast<std::int64_t>(enumerate_fiber(sub, k).size()));
  return out;
}

}  // namespace toeplab
