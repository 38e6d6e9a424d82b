#include "toeplab/reduction.hpp"

#include "toeplab/errors.hpp"
#include "toeplab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <string>

namespace toeplab {

std::vector<double> moment_map(std::span<const std::complex<double>> z) {
  std::vector<double> out;
  out.reserve(z.size());
  for (const auto& zi : z) out.push_back(std::norm(zi));
  return out;
}

double full_sphere_volume(std::size_t n) {
  if (n == 0) throw ValidationError("reduction::full_sphere_volume: n must be >= 1");
  double v = 1.0;
  for (std::size_t j = 1; j < n; ++j) v *= 2.0 * std::numbers::pi / static_cast<double>(j);
  return v;
}

ReducedSpaceSpec ReducedSpaceSpec::full_sphere(std::size_t n) {
  return ReducedSpaceSpec{Kind::FullSphere, n, std::nullopt, full_sphere_volume(n)};
}

void ReducedSpaceSpec::validate() const {
  if (n == 0) throw ValidationError("ReducedSpaceSpec: n must be >= 1");
  if (!(sigma_volume > 0.0)) throw ValidationError("ReducedSpaceSpec: sigma_volume must be positive");
  if (kind == Kind::ToricFiber) {
    if (!sub) throw ValidationError("ReducedSpaceSpec: toric fiber kind requires subtorus data");
    sub->validate();
    if (sub->n != n) throw ValidationError("ReducedSpaceSpec: subtorus dimension differs from n");
  }
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

Moments merge_range(std::span<const Moments> parts) {
  if (parts.empty()) return {};
  if (parts.size() == 1) return parts[0];
  const std::size_t half = parts.size() / 2;
  return merge(merge_range(parts.first(half)), merge_range(parts.subspan(half)));
}

}  // namespace

McEstimate sphere_average(std::size_t n, std::uint64_t samples, std::uint64_t seed,
                          const std::function<double(std::span<const std::complex<double>>)>& g,
                          const McOptions& options) {
  if (n == 0) throw ValidationError("reduction::sphere_average: n must be >= 1");
  if (samples < 2) throw ValidationError("reduction::sphere_average: need at least 2 samples");
  if (!options.permutation.empty()) {
    auto sorted = options.permutation;
    std::sort(sorted.begin(), sorted.end());
    if (sorted.size() != n || sorted.front() != 0 || std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end() ||
        sorted.back() != n - 1)
      throw ValidationError("reduction::sphere_average: invalid coordinate permutation");
  }
  const std::uint64_t batches = (samples + kMcBatchSize - 1) / kMcBatchSize;
  std::vector<Moments> parts(batches);

  parallel_for(batches, options.threads, [&](std::size_t b) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> normal(0.0, 1.0);
    const std::uint64_t begin = b * kMcBatchSize;
    const std::uint64_t count = std::min<std::uint64_t>(kMcBatchSize, samples - begin);
    std::vector<std::complex<double>> z(n);
    std::vector<std::complex<double>> placed(n);
    Moments m;
    for (std::uint64_t s = 0; s < count; ++s) {
      double norm2 = 0.0;
      for (auto& zi : z) {
        const double re = normal(rng);
        const double im = normal(rng);
        zi = {re, im};
        norm2 += re * re + im * im;
      }
      const double inv = 1.0 / std::sqrt(norm2);
      for (auto& zi : z) zi *= inv;
      double value;
      if (options.permutation.empty()) {
        value = g(z);
      } else {
        for (std::size_t i = 0; i < n; ++i) placed[options.permutation[i]] = z[i];
        value = g(placed);
      }
      m.count += 1.0;
      const double delta = value - m.mean;
      m.mean += delta / m.count;
      m.m2 += delta * (value - m.mean);
    }
    parts[b] = m;
  });

  const Moments total = merge_range(parts);
  McEstimate out;
  out.estimate = total.mean;
  out.standard_error = std::sqrt(total.m2 / (total.count - 1.0) / total.count);
  out.samples = samples;
  out.seed = seed;
  return out;
}

namespace {

McEstimate scale(McEstimate e, double volume) {
  e.estimate *= volume;
  e.standard_error *= volume;
  return e;
}

void check_mc_args(std::size_t n, std::size_t symbol_n, std::uint64_t samples) {
  if (symbol_n != n) throw ValidationError("reduction::c0_sphere_mc: symbol dimension differs from n");
  if (samples < kMinMcSamples) throw ValidationError("reduction::c0_sphere_mc: samples must be >= 1e4");
}

}  // namespace

McEstimate c0_sphere_mc(const SymbolPoly& symbol, const TestFunction& f, std::size_t n, std::uint64_t samples,
                        std::uint64_t seed, const McOptions& options) {
  check_mc_args(n, symbol.dimension(), samples);
  symbol.validate();
  auto g = [&](std::span<const std::complex<double>> z) { return f(symbol.evaluate(z)); };
  return scale(sphere_average(n, samples, seed, g, options), full_sphere_volume(n));
}

McEstimate c0_sphere_mc(const InvariantSymbol& symbol, const TestFunction& f, std::size_t n,
                        std::uint64_t samples, std::uint64_t seed, const McOptions& options) {
  check_mc_args(n, symbol.dimension(), samples);
  auto g = [&](std::span<const std::complex<double>> z) {
    thread_local std::vector<double> a;
    a.resize(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) a[i] = std::norm(z[i]);  // |z| = 1
    return f(symbol(a));
  };
  return scale(sphere_average(n, samples, seed, g, options), full_sphere_volume(n));
}

double simplex_integral(std::size_t n, int mesh, const std::function<double(std::span<const double>)>& g,
                        unsigned threads) {
  if (n == 0) throw ValidationError("reduction::simplex_integral: n must be >= 1");
  if (mesh < 1) throw ValidationError("reduction::simplex_integral: mesh must be >= 1");
  if (n == 1) {
    const double a[1] = {1.0};
    return g(a);
  }
  // Order simplex {1 >= x_1 >= ... >= x_D >= 0} with barycentric map
  // a = (1 - x_1, x_1 - x_2, ..., x_D); unimodular, so volumes are preserved.
  const std::size_t dim = n - 1;
  std::vector<std::vector<std::size_t>> perms;
  {
    std::vector<std::size_t> p(dim);
    std::iota(p.begin(), p.end(), 0);
    do perms.push_back(p);
    while (std::next_permutation(p.begin(), p.end()));
  }
  // rank[p][i] = position of coordinate i in permutation p
  std::vector<std::vector<std::size_t>> rank(perms.size(), std::vector<std::size_t>(dim));
  for (std::size_t p = 0; p < perms.size(); ++p)
    for (std::size_t l = 0; l < dim; ++l) rank[p][perms[p][l]] = l;

  double cell_volume = 1.0;
  for (std::size_t j = 1; j <= dim; ++j) cell_volume /= static_cast<double>(j) * mesh;

  std::vector<double> slab_sums(static_cast<std::size_t>(mesh), 0.0);
  parallel_for(static_cast<std::size_t>(mesh), threads, [&](std::size_t first) {
    std::vector<int> cube(dim, 0);
    cube[0] = static_cast<int>(first);
    std::vector<double> x(dim);
    std::vector<double> a(n);
    std::vector<double> values;
    while (true) {
      bool cube_ok = true;
      for (std::size_t i = 0; i + 1 < dim; ++i)
        if (cube[i] < cube[i + 1]) cube_ok = false;
      if (cube_ok) {
        for (std::size_t p = 0; p < perms.size(); ++p) {
          bool inside = true;
          for (std::size_t i = 0; i + 1 < dim && inside; ++i)
            if (cube[i] == cube[i + 1] && rank[p][i] > rank[p][i + 1]) inside = false;
          if (!inside) continue;
          for (std::size_t i = 0; i < dim; ++i) {
            const double offset = static_cast<double>(dim - rank[p][i]) / static_cast<double>(dim + 1);
            x[i] = (cube[i] + offset) / mesh;
          }
          a[0] = 1.0 - x[0];
          for (std::size_t i = 1; i < dim; ++i) a[i] = x[i - 1] - x[i];
          a[dim] = x[dim - 1];
          values.push_back(g(a));
        }
      }
      std::size_t pos = 1;
      while (pos < dim) {
        if (cube[pos] + 1 < mesh) {
          ++cube[pos];
          break;
        }
        cube[pos] = 0;
        ++pos;
      }
      if (pos >= dim) break;
    }
    slab_sums[first] = pairwise_sum(values);
  });
  return pairwise_sum(slab_sums) * cell_volume;
}

double c0_simplex_quad(const InvariantSymbol& symbol, const TestFunction& f, std::size_t n, int mesh,
                       unsigned threads) {
  if (symbol.dimension() != n) throw ValidationError("reduction::c0_simplex_quad: symbol dimension differs from n");
  if (mesh < kMinSimplexMesh) throw ValidationError("reduction::c0_simplex_quad: mesh must be >= 8");
  const double integral =
      simplex_integral(n, mesh, [&](std::span<const double> a) { return f(symbol(a)); }, threads);
  return std::pow(2.0 * std::numbers::pi, static_cast<double>(n - 1)) * integral;
}

double calibrate_volume(std::size_t n, std::span<const std::int64_t> ks) {
  if (n == 0) throw ValidationError("reduction::calibrate_volume: n must be >= 1");
  if (ks.empty()) throw ValidationError("reduction::calibrate_volume: empty k list");
  const auto [lo, hi] = std::minmax_element(ks.begin(), ks.end());
  if (*lo < 1 || *hi < 10 * *lo) throw ValidationError("reduction::calibrate_volume: k list must span a decade");
  const int m = static_cast<int>(n) - 1;
  std::vector<Sample> samples;
  for (auto k : ks) {
    const auto dim = binomial(checked_add(k, m), m);
    samples.push_back({k, scaled_measure(static_cast<double>(dim), m, k)});
  }
  return fit_expansion(samples, m).coefficients.front();
}

}  // namespace toeplab
