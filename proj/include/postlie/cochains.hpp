#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "postlie/algebra.hpp"
#include "postlie/core/combinatorics.hpp"
#include "postlie/core/rational.hpp"

namespace postlie {

/// Sparse coordinate vector: (basis index, coefficient) pairs.
using SparseVec = std::vector<std::pair<int, Rational>>;

inline SparseVec basis_arg(int i) { return {{i, Rational(1)}}; }

inline SparseVec sparse(const Vec& v) {
  SparseVec s;
  for (std::size_t i = 0; i < v.size(); ++i)
    if (v[i] != 0) s.emplace_back(static_cast<int>(i), v[i]);
  return s;
}

namespace detail {

inline long small_binom(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0;
  long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Lexicographic rank of a strictly increasing k-subset of {0..n-1}.
inline std::size_t combination_rank(std::span<const int> c, int n) {
  const int k = static_cast<int>(c.size());
  std::size_t rank = 0;
  int prev = -1;
  for (int pos = 0; pos < k; ++pos) {
    for (int v = prev + 1; v < c[pos]; ++v) rank += small_binom(n - 1 - v, k - 1 - pos);
    prev = c[pos];
  }
  return rank;
}

}  // namespace detail

/// Element of C^n(V,V) = sum_{i=0}^{n} Hom(wedge^i V (x) wedge^{n+1-i} V, V).
///
/// Component f_i is stored on strictly increasing (left, right) index tuples;
/// the storage order (component, left tuple, right tuple, output index), all
/// lexicographic, is also the coordinate order of to_vector().
class MultiCochain {
 public:
  MultiCochain() = default;
  MultiCochain(std::size_t dim, int degree) : dim_(dim), degree_(degree) {
    if (degree < 0) throw std::invalid_argument("cochain degree must be nonnegative");
    comps_.resize(degree + 1);
    for (int i = 0; i <= degree; ++i) comps_[i].assign(component_size(i), Rational(0));
  }

  std::size_t dim() const { return dim_; }
  int degree() const { return degree_; }
  int arity() const { return degree_ + 1; }
  int left_arity(int i) const { return i; }
  int right_arity(int i) const { return degree_ + 1 - i; }

  std::size_t left_count(int i) const { return detail::small_binom(static_cast<int>(dim_), i); }
  std::size_t right_count(int i) const { return detail::small_binom(static_cast<int>(dim_), right_arity(i)); }
  std::size_t component_size(int i) const { return left_count(i) * right_count(i) * dim_; }
  std::size_t total_size() const {
    std::size_t s = 0;
    for (int i = 0; i <= degree_; ++i) s += component_size(i);
    return s;
  }
  std::size_t component_offset(int i) const {
    std::size_t s = 0;
    for (int c = 0; c < i; ++c) s += component_size(c);
    return s;
  }

  std::vector<Rational>& component(int i) { return comps_.at(i); }
  const std::vector<Rational>& component(int i) const { return comps_.at(i); }

  /// Coefficient of e_out in f_i(e_left ; e_right) for sorted tuples.
  Rational& coeff(int i, std::span<const int> left, std::span<const int> right, std::size_t out) {
    return comps_[i][slot(i, left, right) + out];
  }
  const Rational& coeff(int i, std::span<const int> left, std::span<const int> right, std::size_t out) const {
    return comps_[i][slot(i, left, right) + out];
  }

  /// Stores f_i(e_left ; e_right) = value for tuples in any order, applying
  /// the sorting signs of both blocks. Tuples with repeats are rejected.
  void set(int i, std::vector<int> left, std::vector<int> right, const Vec& value) {
    check_arity(i, left.size(), right.size());
    check_range(left);
    check_range(right);
    const int s = sort_with_sign(left) * sort_with_sign(right);
    if (s == 0) throw std::invalid_argument("alternating block with a repeated index");
    const std::size_t base = slot(i, left, right);
    for (std::size_t o = 0; o < dim_; ++o) comps_[i][base + o] = s * value.at(o);
  }

  /// Blockwise-alternating evaluation on basis vectors.
  Vec eval_component(int i, std::vector<int> left, std::vector<int> right) const {
    if (i < 0 || i > degree_) throw std::out_of_range("component index out of range");
    check_arity(i, left.size(), right.size());
    check_range(left);
    check_range(right);
    Vec out = zero_vec(dim_);
    const int s = sort_with_sign(left) * sort_with_sign(right);
    if (s == 0) return out;
    const std::size_t base = slot(i, left, right);
    for (std::size_t o = 0; o < dim_; ++o) out[o] = s * comps_[i][base + o];
    return out;
  }

  /// out += coef * f_i(left ; right) for arbitrary vector arguments.
  void accumulate(int i, std::span<const SparseVec> left, std::span<const SparseVec> right, const Rational& coef,
                  Vec& out) const {
    std::vector<int> l(left.size()), r(right.size());
    expand(i, left, right, 0, coef, l, r, out);
  }

  Vec to_vector() const {
    Vec v;
    v.reserve(total_size());
    for (const auto& c : comps_) v.insert(v.end(), c.begin(), c.end());
    return v;
  }

  static MultiCochain from_vector(std::size_t dim, int degree, const Vec& v) {
    MultiCochain f(dim, degree);
    if (v.size() != f.total_size()) throw std::invalid_argument("cochain vector has wrong length");
    std::size_t p = 0;
    for (auto& c : f.comps_)
      for (auto& x : c) x = v[p++];
    return f;
  }

  bool is_zero() const {
    for (const auto& c : comps_)
      for (const auto& x : c)
        if (x != 0) return false;
    return true;
  }

  bool operator==(const MultiCochain& o) const {
    return dim_ == o.dim_ && degree_ == o.degree_ && comps_ == o.comps_;
  }

  MultiCochain& operator+=(const MultiCochain& o) {
    require_same_shape(o);
    for (std::size_t c = 0; c < comps_.size(); ++c)
      for (std::size_t n = 0; n < comps_[c].size(); ++n) comps_[c][n] += o.comps_[c][n];
    return *this;
  }
  MultiCochain& operator-=(const MultiCochain& o) {
    require_same_shape(o);
    for (std::size_t c = 0; c < comps_.size(); ++c)
      for (std::size_t n = 0; n < comps_[c].size(); ++n) comps_[c][n] -= o.comps_[c][n];
    return *this;
  }
  MultiCochain& operator*=(const Rational& s) {
    for (auto& c : comps_)
      for (auto& x : c) x *= s;
    return *this;
  }
  friend MultiCochain operator+(MultiCochain a, const MultiCochain& b) { return a += b; }
  friend MultiCochain operator-(MultiCochain a, const MultiCochain& b) { return a -= b; }
  friend MultiCochain operator*(const Rational& s, MultiCochain a) { return a *= s; }

  /// Visits every stored coefficient: fn(component, left, right, out, value).
  template <typename Fn>
  void for_each_entry(Fn fn) const {
    for (int i = 0; i <= degree_; ++i) {
      const auto lefts = combinations(static_cast<int>(dim_), i);
      const auto rights = combinations(static_cast<int>(dim_), right_arity(i));
      std::size_t p = 0;
      for (const auto& l : lefts)
        for (const auto& r : rights)
          for (std::size_t o = 0; o < dim_; ++o, ++p) fn(i, l, r, o, comps_[i][p]);
    }
  }

 private:
  std::size_t slot(int i, std::span<const int> left, std::span<const int> right) const {
    const int d = static_cast<int>(dim_);
    return (detail::combination_rank(left, d) * right_count(i) + detail::combination_rank(right, d)) * dim_;
  }

  void check_arity(int i, std::size_t l, std::size_t r) const {
    if (static_cast<int>(l) != i || static_cast<int>(r) != right_arity(i))
      throw std::invalid_argument("wrong tuple arity for cochain component " + std::to_string(i));
  }
  void check_range(const std::vector<int>& t) const {
    for (int x : t)
      if (x < 0 || static_cast<std::size_t>(x) >= dim_) throw std::out_of_range("basis index out of range");
  }
  void require_same_shape(const MultiCochain& o) const {
    if (o.dim_ != dim_ || o.degree_ != degree_) throw std::invalid_argument("cochain shape mismatch");
  }

  void expand(int i, std::span<const SparseVec> left, std::span<const SparseVec> right, std::size_t pos,
              const Rational& coef, std::vector<int>& l, std::vector<int>& r, Vec& out) const {
    const std::size_t nl = left.size();
    if (pos == nl + right.size()) {
      std::vector<int> ls = l, rs = r;
      const int s = sort_with_sign(ls) * sort_with_sign(rs);
      if (s == 0) return;
      const std::size_t base = slot(i, ls, rs);
      for (std::size_t o = 0; o < dim_; ++o) {
        const Rational& c = comps_[i][base + o];
        if (c != 0) {
          if (s > 0)
            out[o] += coef * c;
          else
            out[o] -= coef * c;
        }
      }
      return;
    }
    const SparseVec& arg = pos < nl ? left[pos] : right[pos - nl];
    for (const auto& [idx, val] : arg) {
      if (pos < nl)
        l[pos] = idx;
      else
        r[pos - nl] = idx;
      expand(i, left, right, pos + 1, coef * val, l, r, out);
    }
  }

  std::size_t dim_ = 0;
  int degree_ = 0;
  std::vector<std::vector<Rational>> comps_;
};

namespace detail {

inline const std::vector<Permutation>& cached_shuffles(std::map<std::vector<int>, std::vector<Permutation>>& cache,
                                                       std::vector<int> parts) {
  auto it = cache.find(parts);
  if (it == cache.end()) it = cache.emplace(parts, multi_shuffles(std::span<const int>(parts))).first;
  return it->second;
}

}  // namespace detail

/// f o g for f of degree n and g of degree m, both index-range branches.
inline MultiCochain circle_product(const MultiCochain& f, const MultiCochain& g) {
  if (f.dim() != g.dim()) throw std::invalid_argument("circle_product: dimension mismatch");
  const int d = static_cast<int>(f.dim());
  const int n = f.degree(), m = g.degree();
  const int total = n + m + 1;
  MultiCochain out(f.dim(), n + m);
  std::map<std::vector<int>, std::vector<Permutation>> cache;

  for (int k = 0; k <= n + m; ++k) {
    const auto lefts = combinations(d, k);
    const auto rights = combinations(d, total - k);
    if (lefts.empty() || rights.empty()) continue;
    auto& comp = out.component(k);

    // x_1..x_total are basis indices: x[p - 1] for position p.
    auto value_at = [&](const std::vector<int>& x) {
      Vec acc = zero_vec(f.dim());
      for (int j = std::max(0, k - n); j <= std::min(k, m); ++j) {
        const auto& sigmas = detail::cached_shuffles(cache, {k - j, j});
        const auto& taus = detail::cached_shuffles(cache, {m + 1 - j, n + j - k});
        const int sign_m = (m * (k - j)) % 2 == 0 ? 1 : -1;
        for (const auto& sigma : sigmas) {
          std::vector<SparseVec> g_left, f_left;
          for (int p = 0; p < k - j; ++p) f_left.push_back(basis_arg(x[sigma[p] - 1]));
          for (int p = k - j; p < k; ++p) g_left.push_back(basis_arg(x[sigma[p] - 1]));
          const int s_sigma = perm_sign(sigma);
          for (const auto& tau : taus) {
            std::vector<SparseVec> g_right, f_right;
            for (int p = 0; p < m + 1 - j; ++p) g_right.push_back(basis_arg(x[k + tau[p] - 1]));
            Vec gv = zero_vec(f.dim());
            g.accumulate(j, g_left, g_right, Rational(1), gv);
            if (is_zero(gv)) continue;
            f_right.push_back(sparse(gv));
            for (int p = m + 1 - j; p < total - k; ++p) f_right.push_back(basis_arg(x[k + tau[p] - 1]));
            f.accumulate(k - j, f_left, f_right, Rational(s_sigma * perm_sign(tau) * sign_m), acc);
          }
        }
      }
      if (k >= m + 1) {
        for (int j = 0; j <= m; ++j) {
          const auto& sigmas = detail::cached_shuffles(cache, {j, m + 1 - j, k - m - 1});
          std::vector<SparseVec> f_right;
          for (int p = k; p < total; ++p) f_right.push_back(basis_arg(x[p]));
          for (const auto& sigma : sigmas) {
            std::vector<SparseVec> g_left, g_right, f_left;
            for (int p = 0; p < j; ++p) g_left.push_back(basis_arg(x[sigma[p] - 1]));
            for (int p = j; p < m + 1; ++p) g_right.push_back(basis_arg(x[sigma[p] - 1]));
            Vec gv = zero_vec(f.dim());
            g.accumulate(j, g_left, g_right, Rational(1), gv);
            if (is_zero(gv)) continue;
            f_left.push_back(sparse(gv));
            for (int p = m + 1; p < k; ++p) f_left.push_back(basis_arg(x[sigma[p] - 1]));
            f.accumulate(k - m, f_left, f_right, Rational(perm_sign(sigma)), acc);
          }
        }
      }
      return acc;
    };

    std::size_t slot = 0;
    for (const auto& l : lefts)
      for (const auto& r : rights) {
        std::vector<int> x = l;
        x.insert(x.end(), r.begin(), r.end());
        Vec v = value_at(x);
        for (std::size_t o = 0; o < f.dim(); ++o) comp[slot + o] = std::move(v[o]);
        slot += f.dim();
      }
  }
  return out;
}

/// [f, g] = f o g - (-1)^{nm} g o f.
inline MultiCochain graded_bracket(const MultiCochain& f, const MultiCochain& g) {
  if (f.dim() != g.dim()) throw std::invalid_argument("graded_bracket: dimension mismatch");
  MultiCochain a = circle_product(f, g);
  MultiCochain b = circle_product(g, f);
  if ((f.degree() * g.degree()) % 2 == 0)
    a -= b;
  else
    a += b;
  return a;
}

/// Degree-1 cochain (pi, rho): f_0 in Hom(wedge^0 (x) wedge^2, V) carries the
/// antisymmetric pi(x ^ y); f_1 in Hom(V (x) V, V) carries rho with the first
/// argument in the left block.
struct MaurerCartanElement {
  BilinearMap pi;
  BilinearMap rho;

  MultiCochain as_cochain() const {
    require_antisymmetric(pi, "MaurerCartanElement");
    const std::size_t d = pi.dim();
    if (rho.dim() != d) throw std::invalid_argument("MaurerCartanElement: dimension mismatch");
    MultiCochain f(d, 1);
    for (int a = 0; a < static_cast<int>(d); ++a)
      for (int b = 0; b < static_cast<int>(d); ++b) {
        if (a < b) f.set(0, {}, {a, b}, pi.basis_product(a, b));
        f.set(1, {a}, {b}, rho.basis_product(a, b));
      }
    return f;
  }

  static MaurerCartanElement from_cochain(const MultiCochain& f) {
    if (f.degree() != 1) throw std::invalid_argument("MaurerCartanElement: cochain must have degree 1");
    const std::size_t d = f.dim();
    MaurerCartanElement e{BilinearMap(d, Symmetry::antisymmetric), BilinearMap(d)};
    for (int a = 0; a < static_cast<int>(d); ++a)
      for (int b = 0; b < static_cast<int>(d); ++b) {
        const Vec p = f.eval_component(0, {}, {a, b});
        const Vec r = f.eval_component(1, {a}, {b});
        for (std::size_t k = 0; k < d; ++k) {
          e.pi.at(a, b, k) = p[k];
          e.rho.at(a, b, k) = r[k];
        }
      }
    return e;
  }
};

/// Base product embedded as the degree-1 cochain (0, tri).
inline MultiCochain embed_product(const BilinearMap& tri) {
  return MaurerCartanElement{BilinearMap(tri.dim(), Symmetry::antisymmetric), tri}.as_cochain();
}

inline void require_pre_lie(const BilinearMap& tri, const char* who) {
  AxiomReport r = check_pre_lie(tri);
  if (!r.holds) throw PreconditionError(std::string(who) + ": base product is not pre-Lie", r);
}

/// d(f) = [tri, f].
inline MultiCochain differential(const BilinearMap& tri, const MultiCochain& f) {
  require_pre_lie(tri, "differential");
  if (tri.dim() != f.dim()) throw std::invalid_argument("differential: dimension mismatch");
  return graded_bracket(embed_product(tri), f);
}

/// d(Pi) + 1/2 [Pi, Pi]; vanishes exactly when (pi, tri + omega) is post-Lie.
inline MultiCochain mc_residual(const BilinearMap& tri, const MaurerCartanElement& pert) {
  require_pre_lie(tri, "mc_residual");
  const MultiCochain p = pert.as_cochain();
  if (p.dim() != tri.dim()) throw std::invalid_argument("mc_residual: dimension mismatch");
  MultiCochain r = graded_bracket(embed_product(tri), p);
  r += Rational(1, 2) * graded_bracket(p, p);
  return r;
}

}  // namespace postlie
