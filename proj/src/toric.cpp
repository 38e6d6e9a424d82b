#include "toeplab/toric.hpp"

#include "toeplab/errors.hpp"
#include "toeplab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

namespace toeplab {

RegularFreeReport regular_free_check(const SubtorusData& sub) {
  RegularFreeReport report;
  const auto vertices = fiber_vertices(sub);
  report.pass = !vertices.empty();
  for (const auto& v : vertices) {
    VertexCheck check;
    check.vertex = v;
    check.full_rank = rank(select_columns(sub.bt, v.support)) == sub.d;
    Integer g = 0;
    for (const auto& cols : subsets_of_size(v.support.size(), sub.d)) {
      std::vector<std::size_t> picked;
      for (auto c : cols) picked.push_back(v.support[c]);
      const Integer minor = abs(numerator(determinant(select_columns(sub.bt, picked))));
      g = boost::multiprecision::gcd(g, minor);
      // report the smallest nonzero offending minor, falling back to a zero one
      const bool better = check.violating_columns.empty() || check.violating_minor == 0 ||
                          (minor != 0 && minor < check.violating_minor);
      if (minor != 1 && better) {
        check.violating_columns = picked;
        check.violating_minor = minor;
      }
    }
    check.minor_gcd = g;
    check.pass = check.full_rank && g == 1;
    if (check.pass) {
      check.violating_columns.clear();
      check.violating_minor = 0;
    }
    report.pass = report.pass && check.pass;
    report.vertices.push_back(std::move(check));
  }
  return report;
}

const SpectrumEntry* EquivariantSpectrum::find(const MultiIndex& beta) const {
  // entries follow enumerate_fiber, i.e. descending lexicographic order
  auto it = std::lower_bound(entries.begin(), entries.end(), beta,
                             [](const SpectrumEntry& e, const MultiIndex& b) { return b < e.beta; });
  if (it == entries.end() || it->beta != beta) return nullptr;
  return &*it;
}

EquivariantSpectrum equivariant_spectrum(const SubtorusData& sub, std::int64_t k, const InvariantSymbol& symbol) {
  if (!symbol.has_polynomial())
    throw ValidationError("toric::equivariant_spectrum: symbol has no polynomial form");
  if (symbol.dimension() != sub.n)
    throw ValidationError("toric::equivariant_spectrum: symbol dimension differs from n");
  EquivariantSpectrum spec{sub, k, {}};
  for (auto& beta : enumerate_fiber(sub, k)) {
    Rational exact = invariant_eigenvalue(symbol, beta);
    const double lambda = to_double(exact);
    spec.entries.push_back({std::move(beta), std::move(exact), lambda});
  }
  return spec;
}

double fiber_measure(const EquivariantSpectrum& spec, const TestFunction& f) {
  std::vector<double> values;
  values.reserve(spec.entries.size());
  for (const auto& e : spec.entries) values.push_back(f(e.lambda));
  return pairwise_sum(values);
}

FiberVolume fiber_volume(const SubtorusData& sub) {
  const auto vertices = fiber_vertices(sub);
  if (vertices.empty()) throw ValidationError("toric::fiber_volume: alpha is outside the image cone (empty fiber)");
  Integer period = 1;
  for (const auto& v : vertices) period = boost::multiprecision::lcm(period, lcm_of_denominators(v.point));
  const int r = static_cast<int>(sub.n - sub.d);
  FiberVolume out;
  out.period = period.convert_to<std::int64_t>();
  const std::int64_t start = (std::max<std::int64_t>(10, 2 * r) + out.period - 1) / out.period;
  std::vector<Sample> samples;
  for (std::int64_t j = start; j < start + r + 5; ++j) {
    const std::int64_t k = checked_mul(j, out.period);
    const auto count = static_cast<double>(enumerate_fiber(sub, k).size());
    samples.push_back({k, scaled_measure(count, r, k)});
  }
  out.fit = fit_expansion(samples, r);
  out.volume = out.fit.coefficients.front();
  return out;
}

namespace {

struct Moments {
  double count = 0.0;
  double mean = 0.0;
  double m2 = 0.0;
};

Moments merge(const Moments& a, const Moments& b) {
  if (a.count == 0.0) return b;
  if (b.count == 0.0) return a;
  Moments out;
  out.count = a.count + b.count;
  const double delta = b.mean - a.mean;
  out.mean = a.mean + delta * b.count / out.count;
  out.m2 = a.m2 + b.m2 + delta * delta * a.count * b.count / out.count;
  return out;
}

}  // namespace

LeadingTerm theorem2_leading(const SubtorusData& sub, const InvariantSymbol& symbol, const TestFunction& f,
                             std::uint64_t samples, std::uint64_t seed, unsigned threads) {
  if (symbol.dimension() != sub.n) throw ValidationError("toric::theorem2_leading: symbol dimension differs from n");
  const auto report = regular_free_check(sub);
  if (!report.pass)
    throw ValidationError("toric::theorem2_leading: regular/free check failed; the reduced space is singular");
  const auto vertices = fiber_vertices(sub);

  LeadingTerm out;
  out.volume = fiber_volume(sub).volume;
  const std::size_t n = sub.n;
  auto symbol_at = [&](std::span<const double> x) {
    std::vector<double> a(x.begin(), x.end());
    double total = 0.0;
    for (double v : a) total += v;
    for (double& v : a) v /= total;
    return f(symbol(a));
  };

  if (sub.n == sub.d) {
    std::vector<double> x;
    for (const auto& c : vertices.front().point) x.push_back(to_double(c));
    out.value = out.volume * symbol_at(x);
    return out;
  }
  if (samples < 2) throw ValidationError("toric::theorem2_leading: need at least 2 samples");

  // x_J = B_J^{-1} (alpha - B_F x_F) on the pivot columns J.
  const auto pivot = pivot_columns(sub);
  std::vector<std::size_t> free_cols;
  for (std::size_t i = 0; i < n; ++i)
    if (std::find(pivot.begin(), pivot.end(), i) == pivot.end()) free_cols.push_back(i);
  const std::size_t d = sub.d;
  std::vector<double> base(d);
  std::vector<std::vector<double>> coupling(d, std::vector<double>(free_cols.size()));
  {
    const RationalMatrix bj = select_columns(sub.bt, pivot);
    auto b0 = solve_unique(bj, RationalVector(sub.alpha.begin(), sub.alpha.end()));
    for (std::size_t i = 0; i < d; ++i) base[i] = to_double((*b0)[i]);
    for (std::size_t f_idx = 0; f_idx < free_cols.size(); ++f_idx) {
      RationalVector column(d);
      for (std::size_t r = 0; r < d; ++r) column[r] = sub.bt[r][free_cols[f_idx]];
      auto c = solve_unique(bj, column);
      for (std::size_t i = 0; i < d; ++i) coupling[i][f_idx] = to_double((*c)[i]);
    }
  }
  std::vector<double> box(free_cols.size(), 0.0);
  for (std::size_t f_idx = 0; f_idx < free_cols.size(); ++f_idx)
    for (const auto& v : vertices) box[f_idx] = std::max(box[f_idx], to_double(v.point[free_cols[f_idx]]));

  const std::uint64_t batches = (samples + kMcBatchSize - 1) / kMcBatchSize;
  std::vector<Moments> parts(batches);
  std::vector<std::uint64_t> attempts(batches, 0);
  parallel_for(batches, threads, [&](std::size_t b) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
    std::mt19937_64 rng(seq);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const std::uint64_t target = std::min<std::uint64_t>(kMcBatchSize, samples - b * kMcBatchSize);
    const auto max_attempts = static_cast<std::uint64_t>(static_cast<double>(target) / kMinRejectionEfficiency);
    std::vector<double> x(n);
    Moments m;
    std::uint64_t tries = 0;
    while (m.count < static_cast<double>(target)) {
      if (++tries > max_attempts)
        throw NumericalError("toric::theorem2_leading: rejection-sampler efficiency below 1e-4");
      for (std::size_t f_idx = 0; f_idx < free_cols.size(); ++f_idx) x[free_cols[f_idx]] = box[f_idx] * unit(rng);
      bool inside = true;
      for (std::size_t i = 0; i < d; ++i) {
        double v = base[i];
        for (std::size_t f_idx = 0; f_idx < free_cols.size(); ++f_idx) v -= coupling[i][f_idx] * x[free_cols[f_idx]];
        if (v < 0.0) inside = false;
        x[pivot[i]] = v;
      }
      if (!inside) continue;
      const double value = symbol_at(x);
      m.count += 1.0;
      const double delta = value - m.mean;
      m.mean += delta / m.count;
      m.m2 += delta * (value - m.mean);
    }
    parts[b] = m;
    attempts[b] = tries;
  });

  Moments total;
  std::uint64_t total_attempts = 0;
  for (std::size_t b = 0; b < batches; ++b) {
    total = merge(total, parts[b]);
    total_attempts += attempts[b];
  }
  out.samples = samples;
  out.acceptance_rate = total.count / static_cast<double>(total_attempts);
  out.value = out.volume * total.mean;
  out.standard_error = out.volume * std::sqrt(total.m2 / (total.count - 1.0) / total.count);
  return out;
}

}  // namespace toeplab
