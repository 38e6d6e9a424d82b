#include "toeplab/inverse.hpp"

#include "toeplab/errors.hpp"
#include "toeplab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>

namespace toeplab {

void RaySpectrumSeries::validate() const {
  if (ks.size() != lambdas.size()) throw ValidationError("inverse::RaySpectrumSeries: ks and lambdas differ in length");
  for (std::size_t i = 0; i < ks.size(); ++i) {
    if (ks[i] < 1) throw ValidationError("inverse::RaySpectrumSeries: k must be >= 1");
    if (i > 0 && ks[i] <= ks[i - 1]) throw ValidationError("inverse::RaySpectrumSeries: ks must be strictly increasing");
    if (!std::isfinite(lambdas[i])) throw ValidationError("inverse::RaySpectrumSeries: non-finite eigenvalue");
  }
}

namespace {

// Top entry of the extrapolation tableau built on all of (h, y).
double tableau_limit(std::span<const double> h, std::span<const double> y, ExtrapolationMethod method) {
  const std::size_t m = y.size();
  std::vector<std::vector<double>> t(m, std::vector<double>(m, 0.0));
  for (std::size_t i = 0; i < m; ++i) t[i][0] = y[i];
  for (std::size_t j = 1; j < m; ++j) {
    for (std::size_t i = j; i < m; ++i) {
      const double d = t[i][j - 1] - t[i - 1][j - 1];
      if (method == ExtrapolationMethod::Richardson) {
        t[i][j] = t[i][j - 1] + d * h[i] / (h[i - j] - h[i]);
        continue;
      }
      if (d == 0.0) {
        t[i][j] = t[i][j - 1];
        continue;
      }
      const double before = j >= 2 ? t[i - 1][j - 2] : 0.0;
      const double inner = t[i][j - 1] - before;
      if (inner == 0.0) {
        t[i][j] = t[i][j - 1];
        continue;
      }
      const double den = (h[i - j] / h[i]) * (1.0 - d / inner) - 1.0;
      t[i][j] = den == 0.0 ? t[i][j - 1] : t[i][j - 1] + d / den;
    }
  }
  return t[m - 1][m - 1];
}

// Estimate of the given order from the window of order+1 samples ending at `last`.
double windowed(const RaySpectrumSeries& s, std::span<const double> h, std::size_t last, int order,
                ExtrapolationMethod method) {
  const std::size_t first = last + 1 - static_cast<std::size_t>(order + 1);
  return tableau_limit(h.subspan(first, order + 1), std::span(s.lambdas).subspan(first, order + 1), method);
}

}  // namespace

RayLimit extrapolate_ray(const RaySpectrumSeries& series, int order, ExtrapolationMethod method) {
  series.validate();
  if (order < 0 || order > kMaxExtrapolationOrder)
    throw ValidationError("inverse::extrapolate_ray: order must be in [0, 3]");
  if (series.ks.size() < static_cast<std::size_t>(order) + 2)
    throw ValidationError("inverse::extrapolate_ray: need at least order+2 entries, got " +
                          std::to_string(series.ks.size()));
  std::vector<double> h;
  for (auto k : series.ks) h.push_back(1.0 / static_cast<double>(k));
  const std::size_t last = series.ks.size() - 1;

  std::vector<double> errors;
  RayLimit out;
  for (int j = 0; j <= order; ++j) {
    const double now = windowed(series, h, last, j, method);
    const double before = windowed(series, h, last - 1, j, method);
    errors.push_back(std::abs(now - before));
    if (j == order) {
      out.limit = now;
      out.error_estimate = errors.back();
    }
  }
  const double floor = 1e-13 * std::max(1.0, std::abs(out.limit));
  for (std::size_t j = 1; j < errors.size(); ++j)
    if (errors[j] > errors[j - 1] && errors[j] > floor) out.low_confidence = true;
  out.order_used = order;
  return out;
}

SpectrumOracle invariant_oracle(const SubtorusData& sub, const InvariantSymbol& symbol) {
  return [sub, symbol](std::int64_t k) { return equivariant_spectrum(sub, k, symbol); };
}

double Reconstruction::max_error() const {
  double worst = 0.0;
  for (const auto& p : points)
    if (p.abs_err) worst = std::max(worst, *p.abs_err);
  return worst;
}

std::size_t Reconstruction::missing_count() const {
  return static_cast<std::size_t>(std::count_if(points.begin(), points.end(), [](const auto& p) { return p.missing; }));
}

Reconstruction reconstruct(const SubtorusData& sub, const SpectrumOracle& oracle, std::int64_t k_max,
                           const std::vector<RationalVector>& grid, const ReconstructOptions& options) {
  sub.validate();
  if (k_max < 1) throw ValidationError("inverse::reconstruct: k_max must be >= 1");
  if (options.order < 0 || options.order > kMaxExtrapolationOrder)
    throw ValidationError("inverse::reconstruct: order must be in [0, 3]");
  if (options.truth && options.truth->dimension() != sub.n)
    throw ValidationError("inverse::reconstruct: truth symbol dimension differs from n");

  Reconstruction out;
  out.k_max = k_max;
  out.order = options.order;
  std::vector<std::int64_t> needed;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const auto& x = grid[g];
    const std::string where = "inverse::reconstruct: grid point " + std::to_string(g);
    if (x.size() != sub.n) throw ValidationError(where + " has wrong length");
    for (const auto& c : x)
      if (c <= 0) throw ValidationError(where + " is not in the interior (entries must be positive)");
    for (std::size_t r = 0; r < sub.d; ++r) {
      Rational s = 0;
      for (std::size_t i = 0; i < sub.n; ++i) s += sub.bt[r][i] * x[i];
      if (s != sub.alpha[r]) throw ValidationError(where + " violates Bt x = alpha");
    }
    ReconstructedPoint p;
    p.point = x;
    p.period = lcm_of_denominators(x).convert_to<std::int64_t>();
    for (std::int64_t k = p.period; k <= k_max; k += p.period) p.ks.push_back(k);
    if (p.ks.empty()) {
      p.missing = true;
      p.reason = "no k <= k_max is a multiple of the denominator " + std::to_string(p.period);
    } else if (p.ks.size() < static_cast<std::size_t>(options.order) + 2) {
      p.missing = true;
      p.reason = "only " + std::to_string(p.ks.size()) + " attainable k values for order " +
                 std::to_string(options.order);
    } else {
      needed.insert(needed.end(), p.ks.begin(), p.ks.end());
    }
    if (options.truth) {
      std::vector<double> a;
      Rational total = 0;
      for (const auto& c : x) total += c;
      for (const auto& c : x) a.push_back(to_double(c / total));
      p.p_true = (*options.truth)(a);
    }
    out.points.push_back(std::move(p));
  }

  std::sort(needed.begin(), needed.end());
  needed.erase(std::unique(needed.begin(), needed.end()), needed.end());
  std::vector<EquivariantSpectrum> spectra(needed.size());
  parallel_for(needed.size(), options.threads, [&](std::size_t i) { spectra[i] = oracle(needed[i]); });
  std::map<std::int64_t, const EquivariantSpectrum*> by_k;
  for (std::size_t i = 0; i < needed.size(); ++i) by_k[needed[i]] = &spectra[i];

  for (auto& p : out.points) {
    if (p.missing) continue;
    RaySpectrumSeries series;
    series.direction = p.point;
    for (auto k : p.ks) {
      std::vector<std::int64_t> beta;
      for (const auto& c : p.point) beta.push_back(floor_to_int64(c * k));
      const auto* entry = by_k.at(k)->find(MultiIndex(beta));
      if (!entry)
        throw NumericalError("inverse::reconstruct: oracle spectrum at k=" + std::to_string(k) +
                             " lacks the ray lattice point");
      series.ks.push_back(k);
      series.lambdas.push_back(entry->lambda);
    }
    const RayLimit lim = extrapolate_ray(series, options.order, options.method);
    p.p_hat = lim.limit;
    p.error_estimate = lim.error_estimate;
    p.low_confidence = lim.low_confidence;
    if (p.p_true) p.abs_err = std::abs(p.p_hat - *p.p_true);
  }
  return out;
}

double log_log_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw ValidationError("inverse::log_log_slope: need >= 2 matched points");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw ValidationError("inverse::log_log_slope: values must be positive");
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / static_cast<double>(lx.size());
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / static_cast<double>(ly.size());
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  if (sxx == 0.0) throw ValidationError("inverse::log_log_slope: x values must differ");
  return sxy / sxx;
}

DistinguishReport spectral_distinguishability(const InvariantSymbol& a, const InvariantSymbol& b,
                                              const SubtorusData& sub, std::int64_t k_max) {
  if (!a.has_polynomial() || !b.has_polynomial())
    throw ValidationError("inverse::spectral_distinguishability: both symbols need a polynomial form");
  if (k_max < 1) throw ValidationError("inverse::spectral_distinguishability: k_max must be >= 1");
  sub.validate();
  DistinguishReport report;
  report.k_max = k_max;
  for (std::int64_t k = 1; k <= k_max; ++k) {
    const auto sa = equivariant_spectrum(sub, k, a);
    const auto sb = equivariant_spectrum(sub, k, b);
    double labeled = 0.0;
    std::vector<Rational> la, lb;
    for (std::size_t i = 0; i < sa.entries.size(); ++i) {
      labeled = std::max(labeled, std::abs(to_double(Rational(sa.entries[i].exact - sb.entries[i].exact))));
      la.push_back(sa.entries[i].exact);
      lb.push_back(sb.entries[i].exact);
    }
    std::sort(la.begin(), la.end());
    std::sort(lb.begin(), lb.end());
    double multiset = 0.0;
    for (std::size_t i = 0; i < la.size(); ++i)
      multiset = std::max(multiset, std::abs(to_double(Rational(la[i] - lb[i]))));
    report.labeled_max_diff.push_back(labeled);
    report.multiset_max_diff.push_back(multiset);
    if (!report.labeled_k && labeled > report.tolerance) report.labeled_k = k;
    if (!report.multiset_k && multiset > report.tolerance) report.multiset_k = k;
  }
  return report;
}

}  // namespace toeplab
