#pragma once

#include <cstddef>
#include <cstdint>
#include <array>
#include <initializer_list>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "postlie/algebra.hpp"
#include "postlie/cochains.hpp"
#include "postlie/core/matrix.hpp"

namespace postlie {

struct NamedAlgebra {
  std::string name;
  BilinearMap product;
};

namespace detail {

inline BilinearMap from_table(std::size_t dim, std::initializer_list<std::array<long, 4>> entries) {
  BilinearMap m(dim);
  for (const auto& [i, j, k, c] : entries) m.at(i, j, k) = c;
  return m;
}

}  // namespace detail

/// Pre-Lie algebras of dimension 2 and 3: zero products, commutative and
/// noncommutative associative algebras, and extensions of a commutative
/// associative algebra A by commuting derivations D acting as X > a = D(a).
inline std::vector<NamedAlgebra> pre_lie_corpus() {
  using detail::from_table;
  std::vector<NamedAlgebra> c;
  c.push_back({"zero_dim2", BilinearMap(2)});
  c.push_back({"zero_dim3", BilinearMap(3)});
  // Q[x]/(x^2), basis {1, x}
  c.push_back({"dual_numbers", from_table(2, {{0, 0, 0, 1}, {0, 1, 1, 1}, {1, 0, 1, 1}})});
  // Q x Q, e_i e_j = delta_ij e_i
  c.push_back({"idempotents_dim2", from_table(2, {{0, 0, 0, 1}, {1, 1, 1, 1}})});
  // Q[x]/(x^3), basis {1, x, x^2}
  c.push_back({"truncated_poly_dim3", from_table(3, {{0, 0, 0, 1},
                                                     {0, 1, 1, 1},
                                                     {1, 0, 1, 1},
                                                     {0, 2, 2, 1},
                                                     {2, 0, 2, 1},
                                                     {1, 1, 2, 1}})});
  c.push_back({"idempotents_dim3", from_table(3, {{0, 0, 0, 1}, {1, 1, 1, 1}, {2, 2, 2, 1}})});
  // upper triangular 2x2 matrices, basis {E11, E12, E22}
  c.push_back({"upper_triangular", from_table(3, {{0, 0, 0, 1}, {0, 1, 1, 1}, {1, 2, 1, 1}, {2, 2, 2, 1}})});
  // A = Q e with zero product, D = id; basis {X, e}
  c.push_back({"derivation_ext_line", from_table(2, {{0, 1, 1, 1}})});
  // A = Q[x]/(x^2), D(1) = 0, D(x) = x; basis {1, x, X}
  c.push_back({"derivation_ext_dual", from_table(3, {{0, 0, 0, 1}, {0, 1, 1, 1}, {1, 0, 1, 1}, {2, 1, 1, 1}})});
  // A = Q^2 with zero product, D = diag(1, 2); basis {e1, e2, X}
  c.push_back({"derivation_ext_diag", from_table(3, {{2, 0, 0, 1}, {2, 1, 1, 2}})});
  // Q x Q[x]/(x^2), basis {(1,0), (0,1), (0,x)}
  c.push_back({"idempotent_times_dual", from_table(3, {{0, 0, 0, 1}, {1, 1, 1, 1}, {1, 2, 2, 1}, {2, 1, 2, 1}})});
  return c;
}

/// Deterministic source of small random exact data.
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed) : rng_(seed) {}

  long integer(long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(rng_); }
  bool chance(double p) { return std::bernoulli_distribution(p)(rng_); }

  /// Integer-valued entries in [-range, range], each nonzero with probability `density`.
  Rational scalar(long range = 2, double density = 1.0) {
    if (!chance(density)) return 0;
    return integer(-range, range);
  }

  BilinearMap bilinear(std::size_t dim, long range = 2, double density = 0.5) {
    BilinearMap m(dim);
    for (auto i = 0u; i < dim; ++i)
      for (auto j = 0u; j < dim; ++j)
        for (auto k = 0u; k < dim; ++k) m.at(i, j, k) = scalar(range, density);
    return m;
  }

  BilinearMap antisymmetric(std::size_t dim, long range = 2, double density = 0.5) {
    BilinearMap m(dim, Symmetry::antisymmetric);
    for (auto i = 0u; i < dim; ++i)
      for (auto j = i + 1; j < dim; ++j)
        for (auto k = 0u; k < dim; ++k) m.set(i, j, k, scalar(range, density));
    return m;
  }

  ExactMatrix matrix(std::size_t rows, std::size_t cols, long range = 2, double density = 0.6) {
    ExactMatrix m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < cols; ++c) m(r, c) = scalar(range, density);
    return m;
  }

  /// Invertible matrix: unit lower times unit upper triangular factors.
  ExactMatrix invertible(std::size_t n, long range = 2) {
    ExactMatrix l = ExactMatrix::identity(n), u = ExactMatrix::identity(n);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c) {
        if (r > c) l(r, c) = scalar(range, 0.6);
        if (r < c) u(r, c) = scalar(range, 0.6);
      }
    return l * u;
  }

  MultiCochain cochain(std::size_t dim, int degree, long range = 2, double density = 0.5) {
    MultiCochain f(dim, degree);
    for (int i = 0; i <= degree; ++i)
      for (auto& x : f.component(i)) x = scalar(range, density);
    return f;
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

}  // namespace postlie
