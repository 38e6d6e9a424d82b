#include "toeplab/exact_linalg.hpp"

#include <utility>

namespace toeplab {

RationalMatrix select_columns(const IntMatrix& m, std::span<const std::size_t> cols) {
  RationalMatrix out(m.size(), cols.size());
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j) out(i, j) = m[i][cols[j]];
  return out;
}

namespace {

// In-place reduction to row echelon form; returns the pivot columns.
std::vector<std::size_t> echelon(RationalMatrix& m, RationalVector* rhs, Rational* det_sign) {
  std::vector<std::size_t> pivots;
  std::size_t row = 0;
  for (std::size_t col = 0; col < m.cols && row < m.rows; ++col) {
    std::size_t p = row;
    while (p < m.rows && m(p, col) == 0) ++p;
    if (p == m.rows) continue;
    if (p != row) {
      for (std::size_t j = 0; j < m.cols; ++j) std::swap(m(p, j), m(row, j));
      if (rhs) std::swap((*rhs)[p], (*rhs)[row]);
      if (det_sign) *det_sign = -*det_sign;
    }
    for (std::size_t i = row + 1; i < m.rows; ++i) {
      if (m(i, col) == 0) continue;
      const Rational factor = m(i, col) / m(row, col);
      for (std::size_t j = col; j < m.cols; ++j) m(i, j) -= factor * m(row, j);
      if (rhs) (*rhs)[i] -= factor * (*rhs)[row];
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

}  // namespace

std::size_t rank(RationalMatrix m) { return echelon(m, nullptr, nullptr).size(); }

Rational determinant(RationalMatrix m) {
  if (m.rows != m.cols) return Rational(0);
  Rational sign = 1;
  const auto pivots = echelon(m, nullptr, &sign);
  if (pivots.size() < m.rows) return Rational(0);
  Rational det = sign;
  for (std::size_t i = 0; i < m.rows; ++i) det *= m(i, i);
  return det;
}

std::optional<RationalVector> solve_unique(RationalMatrix m, RationalVector rhs) {
  const auto pivots = echelon(m, &rhs, nullptr);
  if (pivots.size() < m.cols) return std::nullopt;
  for (std::size_t i = pivots.size(); i < m.rows; ++i)
    if (rhs[i] != 0) return std::nullopt;
  RationalVector x(m.cols);
  for (std::size_t r = pivots.size(); r-- > 0;) {
    const std::size_t c = pivots[r];
    Rational acc = rhs[r];
    for (std::size_t j = c + 1; j < m.cols; ++j) acc -= m(r, j) * x[j];
    x[c] = acc / m(r, c);
  }
  return x;
}

std::vector<std::vector<std::size_t>> subsets_of_size(std::size_t n, std::size_t k) {
  std::vector<std::vector<std::size_t>> out;
  if (k > n) return out;
  std::vector<std::size_t> current(k);
  for (std::size_t i = 0; i < k; ++i) current[i] = i;
  while (true) {
    out.push_back(current);
    std::size_t i = k;
    while (i > 0 && current[i - 1] == n - k + i - 1) --i;
    if (i == 0) break;
    ++current[i - 1];
    for (std::size_t j = i; j < k; ++j) current[j] = current[j - 1] + 1;
  }
  return out;
}

}  // namespace toeplab
