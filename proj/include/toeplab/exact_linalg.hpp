#pragma once

#include "toeplab/rational.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace toeplab {

/// Dense row-major rational matrix, just enough for lattice bookkeeping.
struct RationalMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<Rational> data;

  RationalMatrix() = default;
  RationalMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c) {}

  Rational& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  const Rational& operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
};

using IntMatrix = std::vector<std::vector<std::int64_t>>;

/// Columns `cols` of an integer matrix, as a rational matrix.
RationalMatrix select_columns(const IntMatrix& m, std::span<const std::size_t> cols);

std::size_t rank(RationalMatrix m);

Rational determinant(RationalMatrix m);

/// Solves m x = rhs. Returns nullopt when the columns of m are dependent or the
/// system is inconsistent; the solution is unique otherwise.
std::optional<RationalVector> solve_unique(RationalMatrix m, RationalVector rhs);

/// All k-subsets of {0..n-1} in lexicographic order.
std::vector<std::vector<std::size_t>> subsets_of_size(std::size_t n, std::size_t k);

}  // namespace toeplab
