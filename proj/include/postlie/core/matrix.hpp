#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "postlie/core/rational.hpp"

namespace postlie {

/// Dense row-major matrix over Q. Rank, kernels and solves are exact.
class ExactMatrix {
 public:
  ExactMatrix() = default;
  ExactMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  static ExactMatrix identity(std::size_t n) {
    ExactMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }

  /// Matrix whose columns are the given vectors (all of length `rows`).
  static ExactMatrix from_columns(std::size_t rows, const std::vector<Vec>& columns) {
    ExactMatrix m(rows, columns.size());
    for (std::size_t c = 0; c < columns.size(); ++c) {
      if (columns[c].size() != rows) throw std::invalid_argument("column length mismatch");
      for (std::size_t r = 0; r < rows; ++r) m(r, c) = columns[c][r];
    }
    return m;
  }

  static ExactMatrix from_rows(std::size_t cols, const std::vector<Vec>& rows) {
    ExactMatrix m(rows.size(), cols);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].size() != cols) throw std::invalid_argument("row length mismatch");
      for (std::size_t c = 0; c < cols; ++c) m(r, c) = rows[r][c];
    }
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  Rational& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const Rational& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  Vec row(std::size_t r) const { return Vec(data_.begin() + r * cols_, data_.begin() + (r + 1) * cols_); }
  Vec column(std::size_t c) const {
    Vec v(rows_);
    for (std::size_t r = 0; r < rows_; ++r) v[r] = (*this)(r, c);
    return v;
  }
  void set_column(std::size_t c, const Vec& v) {
    for (std::size_t r = 0; r < rows_; ++r) (*this)(r, c) = v[r];
  }

  bool is_zero() const {
    for (const auto& x : data_)
      if (x != 0) return false;
    return true;
  }

  bool operator==(const ExactMatrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
  }

  ExactMatrix transpose() const {
    ExactMatrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
  }

  ExactMatrix operator*(const ExactMatrix& o) const {
    if (cols_ != o.rows_) throw std::invalid_argument("matrix product shape mismatch");
    ExactMatrix p(rows_, o.cols_);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t k = 0; k < cols_; ++k) {
        const Rational& a = (*this)(r, k);
        if (a == 0) continue;
        for (std::size_t c = 0; c < o.cols_; ++c)
          if (o(k, c) != 0) p(r, c) += a * o(k, c);
      }
    return p;
  }

  Vec operator*(const Vec& v) const {
    if (v.size() != cols_) throw std::invalid_argument("matrix-vector shape mismatch");
    Vec out = zero_vec(rows_);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c)
        if (v[c] != 0 && (*this)(r, c) != 0) out[r] += (*this)(r, c) * v[c];
    return out;
  }

  ExactMatrix& operator+=(const ExactMatrix& o) {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw std::invalid_argument("shape mismatch");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
  }
  ExactMatrix operator+(const ExactMatrix& o) const {
    ExactMatrix s = *this;
    return s += o;
  }
  friend ExactMatrix operator*(const Rational& s, ExactMatrix m) {
    for (auto& x : m.data_) x *= s;
    return m;
  }

  ExactMatrix operator-(const ExactMatrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw std::invalid_argument("shape mismatch");
    ExactMatrix d = *this;
    for (std::size_t i = 0; i < data_.size(); ++i) d.data_[i] -= o.data_[i];
    return d;
  }

  ExactMatrix operator-() const {
    ExactMatrix d = *this;
    for (auto& x : d.data_) x = -x;
    return d;
  }

  struct Echelon;

  /// Reduced row echelon form. Forward elimination is fraction-free (Bareiss)
  /// on the row-wise denominator-cleared integer matrix; only the final
  /// normalisation and back substitution touch rationals.
  Echelon rref() const;
  std::size_t rank() const;
  /// Basis of the null space: one vector per free column, read off the RREF.
  std::vector<Vec> kernel_basis() const;
  /// Some x with A x = b, or nullopt when b is not in the column space.
  std::optional<Vec> solve(const Vec& b) const;
  std::optional<ExactMatrix> inverse() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Rational> data_;
};

struct ExactMatrix::Echelon {
  ExactMatrix reduced;              // reduced row echelon form, zero rows dropped
  std::vector<std::size_t> pivots;  // pivot column of each row of `reduced`
};

inline ExactMatrix::Echelon ExactMatrix::rref() const {
  std::vector<std::vector<mpz_class>> a(rows_, std::vector<mpz_class>(cols_));
  for (std::size_t r = 0; r < rows_; ++r) {
    mpz_class lcm = 1;
    for (std::size_t c = 0; c < cols_; ++c) {
      const auto& q = (*this)(r, c);
      if (q != 0) mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), q.get_den_mpz_t());
    }
    for (std::size_t c = 0; c < cols_; ++c) {
      const auto& q = (*this)(r, c);
      if (q != 0) a[r][c] = q.get_num() * (lcm / q.get_den());
    }
  }
  std::vector<std::size_t> pivots;
  mpz_class prev = 1;
  std::size_t rank = 0;
  for (std::size_t c = 0; c < cols_ && rank < rows_; ++c) {
    std::size_t p = rank;
    while (p < rows_ && a[p][c] == 0) ++p;
    if (p == rows_) continue;
    std::swap(a[p], a[rank]);
    const mpz_class pivot = a[rank][c];
    for (std::size_t i = rank + 1; i < rows_; ++i) {
      const mpz_class factor = a[i][c];
      for (std::size_t j = c + 1; j < cols_; ++j) {
        mpz_class v = pivot * a[i][j] - factor * a[rank][j];
        mpz_divexact(v.get_mpz_t(), v.get_mpz_t(), prev.get_mpz_t());
        a[i][j] = std::move(v);
      }
      a[i][c] = 0;
    }
    prev = pivot;
    pivots.push_back(c);
    ++rank;
  }
  ExactMatrix red(rank, cols_);
  for (std::size_t r = 0; r < rank; ++r) {
    const mpz_class& lead = a[r][pivots[r]];
    for (std::size_t c = pivots[r]; c < cols_; ++c)
      if (a[r][c] != 0) red(r, c) = Rational(a[r][c], lead);
    for (std::size_t c = pivots[r]; c < cols_; ++c) red(r, c).canonicalize();
  }
  for (std::size_t r = rank; r-- > 0;) {
    for (std::size_t up = 0; up < r; ++up) {
      const Rational f = red(up, pivots[r]);
      if (f == 0) continue;
      for (std::size_t c = pivots[r]; c < cols_; ++c)
        if (red(r, c) != 0) red(up, c) -= f * red(r, c);
    }
  }
  return {std::move(red), std::move(pivots)};
}

inline std::size_t ExactMatrix::rank() const { return rref().pivots.size(); }

inline std::vector<Vec> ExactMatrix::kernel_basis() const {
  const Echelon e = rref();
  std::vector<char> is_pivot(cols_, 0);
  for (auto p : e.pivots) is_pivot[p] = 1;
  std::vector<Vec> basis;
  for (std::size_t free = 0; free < cols_; ++free) {
    if (is_pivot[free]) continue;
    Vec v = zero_vec(cols_);
    v[free] = 1;
    for (std::size_t r = 0; r < e.pivots.size(); ++r) v[e.pivots[r]] = -e.reduced(r, free);
    basis.push_back(std::move(v));
  }
  return basis;
}

inline std::optional<Vec> ExactMatrix::solve(const Vec& b) const {
  if (b.size() != rows_) throw std::invalid_argument("right-hand side length mismatch");
  ExactMatrix aug(rows_, cols_ + 1);
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t c = 0; c < cols_; ++c) aug(r, c) = (*this)(r, c);
    aug(r, cols_) = b[r];
  }
  const Echelon e = aug.rref();
  Vec x = zero_vec(cols_);
  for (std::size_t r = 0; r < e.pivots.size(); ++r) {
    if (e.pivots[r] == cols_) return std::nullopt;
    x[e.pivots[r]] = e.reduced(r, cols_);
  }
  return x;
}

inline std::optional<ExactMatrix> ExactMatrix::inverse() const {
  if (rows_ != cols_) throw std::invalid_argument("inverse of a non-square matrix");
  ExactMatrix aug(rows_, 2 * cols_);
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t c = 0; c < cols_; ++c) aug(r, c) = (*this)(r, c);
    aug(r, cols_ + r) = 1;
  }
  const Echelon e = aug.rref();
  if (e.pivots.size() < rows_ || (rows_ > 0 && e.pivots[rows_ - 1] >= cols_)) return std::nullopt;
  ExactMatrix inv(rows_, cols_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) inv(r, c) = e.reduced(r, cols_ + c);
  return inv;
}

/// Rank of the span of a family of vectors of common length n.
inline std::size_t span_rank(std::size_t n, const std::vector<Vec>& vectors) {
  if (vectors.empty()) return 0;
  return ExactMatrix::from_rows(n, vectors).rank();
}

/// Canonical description of a subspace W of Q^n: its RREF basis rows.
/// Reducing a vector against it gives a normal form for Q^n / W.
class SubspaceReducer {
 public:
  SubspaceReducer(std::size_t n, const std::vector<Vec>& spanning) : n_(n) {
    if (!spanning.empty()) {
      auto e = ExactMatrix::from_rows(n, spanning).rref();
      for (std::size_t r = 0; r < e.pivots.size(); ++r) rows_.push_back(e.reduced.row(r));
      pivots_ = std::move(e.pivots);
    }
  }

  std::size_t dimension() const { return rows_.size(); }
  const std::vector<Vec>& basis() const { return rows_; }
  const std::vector<std::size_t>& pivots() const { return pivots_; }

  /// Normal form of v modulo the subspace: zero at every pivot column.
  Vec reduce(Vec v) const {
    for (std::size_t r = 0; r < rows_.size(); ++r) {
      const Rational f = v[pivots_[r]];
      if (f != 0) axpy(-f, rows_[r], v);
    }
    return v;
  }

  bool contains(const Vec& v) const { return is_zero(reduce(v)); }

 private:
  std::size_t n_;
  std::vector<Vec> rows_;
  std::vector<std::size_t> pivots_;
};

}  // namespace postlie
