#pragma once

#include <cstddef>
#include <initializer_list>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "postlie/algebra.hpp"
#include "postlie/cochains.hpp"
#include "postlie/core/matrix.hpp"

namespace postlie {

/// n-cochain of the complex: components f_0..f_{n-1}, f_k in
/// Hom(wedge^k (x) wedge^{n-k}, V). As a vector space this is the degree
/// n-1 MultiCochain space, and the wrapped body uses exactly that layout.
class CohomologyCochain {
 public:
  CohomologyCochain() = default;
  CohomologyCochain(std::size_t dim, int n) : body_(dim, check_degree(n) - 1) {}
  explicit CohomologyCochain(MultiCochain body) : body_(std::move(body)) {}

  static CohomologyCochain from_vector(std::size_t dim, int n, const Vec& v) {
    return CohomologyCochain(MultiCochain::from_vector(dim, check_degree(n) - 1, v));
  }

  std::size_t dim() const { return body_.dim(); }
  int degree() const { return body_.degree() + 1; }
  const MultiCochain& body() const { return body_; }
  MultiCochain& body() { return body_; }

  /// f_k at (left ; right), |left| = k, |right| = n - k.
  Vec eval(int k, std::vector<int> left, std::vector<int> right) const {
    return body_.eval_component(k, std::move(left), std::move(right));
  }
  void set(int k, std::vector<int> left, std::vector<int> right, const Vec& value) {
    body_.set(k, std::move(left), std::move(right), value);
  }

  Vec to_vector() const { return body_.to_vector(); }
  std::size_t size() const { return body_.total_size(); }
  std::size_t component_size(int k) const { return body_.component_size(k); }
  std::size_t component_offset(int k) const { return body_.component_offset(k); }
  bool is_zero() const { return body_.is_zero(); }
  bool operator==(const CohomologyCochain& o) const { return body_ == o.body_; }
  CohomologyCochain& operator+=(const CohomologyCochain& o) {
    body_ += o.body_;
    return *this;
  }
  friend CohomologyCochain operator+(CohomologyCochain a, const CohomologyCochain& b) { return a += b; }
  friend CohomologyCochain operator-(CohomologyCochain a, const CohomologyCochain& b) {
    a.body_ -= b.body_;
    return a;
  }
  friend CohomologyCochain operator*(const Rational& s, CohomologyCochain a) {
    a.body_ *= s;
    return a;
  }

 private:
  static int check_degree(int n) {
    if (n < 1) throw std::invalid_argument("cohomology cochains have degree >= 1");
    return n;
  }
  MultiCochain body_;
};

/// dim of the n-cochain space; 0 for n = 0.
inline std::size_t cochain_space_dim(std::size_t dim, int n) {
  return n <= 0 ? 0 : MultiCochain(dim, n - 1).total_size();
}

/// (pi, omega) as a 2-cochain: f_0 = pi on wedge^2, f_1 = omega on V (x) V.
inline CohomologyCochain two_cochain(const BilinearMap& pi, const BilinearMap& omega) {
  return CohomologyCochain(MaurerCartanElement{pi, omega}.as_cochain());
}

/// phi in Hom(V, V) as a 1-cochain f_0( ; x) = phi(x).
inline CohomologyCochain one_cochain(const ExactMatrix& phi) {
  const std::size_t d = phi.rows();
  CohomologyCochain f(d, 1);
  for (int x = 0; x < static_cast<int>(d); ++x) f.set(0, {}, {x}, phi.column(x));
  return f;
}

inline ExactMatrix as_endomorphism(const CohomologyCochain& f) {
  if (f.degree() != 1) throw std::invalid_argument("as_endomorphism: expected a 1-cochain");
  const std::size_t d = f.dim();
  ExactMatrix m(d, d);
  for (int x = 0; x < static_cast<int>(d); ++x) m.set_column(x, f.eval(0, {}, {x}));
  return m;
}

/// Which part of the coboundary a piece belongs to.
enum class Piece { next, top };

namespace detail {

inline Vec act(const BilinearMap& tri, int x, const Vec& v) { return tri(unit_vec(tri.dim(), x), v); }
inline Vec act(const BilinearMap& tri, const Vec& v, int x) { return tri(v, unit_vec(tri.dim(), x)); }

inline std::vector<SparseVec> args(const std::vector<int>& xs) {
  std::vector<SparseVec> a;
  a.reserve(xs.size());
  for (int x : xs) a.push_back(basis_arg(x));
  return a;
}

// x[p - 1] for p in [from, to] skipping the listed 1-based positions.
inline std::vector<int> slice(const std::vector<int>& x, int from, int to, std::initializer_list<int> skip = {}) {
  std::vector<int> out;
  for (int p = from; p <= to; ++p) {
    bool skipped = false;
    for (int s : skip) skipped = skipped || s == p;
    if (!skipped) out.push_back(x[p - 1]);
  }
  return out;
}

inline Rational pm(int e) { return e % 2 == 0 ? Rational(1) : Rational(-1); }

// (d^k_{k+1} f_k)(x_1..x_{k+1} ; x_{k+2}..x_{n+1}), k <= n-2.
inline Vec next_piece(const BilinearMap& tri, const CohomologyCochain& f, int k, const std::vector<int>& x) {
  const int n = f.degree();
  const MultiCochain& b = f.body();
  const std::size_t d = f.dim();
  Vec acc = zero_vec(d);
  const auto right = args(slice(x, k + 2, n + 1));
  for (int i = 1; i <= k + 1; ++i) {
    Vec v = zero_vec(d);
    b.accumulate(k, args(slice(x, 1, k + 1, {i})), right, Rational(1), v);
    axpy(pm(i - 1), act(tri, x[i - 1], v), acc);
  }
  for (int i = 1; i <= k + 1; ++i)
    for (int j = i + 1; j <= k + 1; ++j) {
      Vec c = tri.basis_product(x[i - 1], x[j - 1]) - tri.basis_product(x[j - 1], x[i - 1]);
      if (is_zero(c)) continue;
      std::vector<SparseVec> left{sparse(c)};
      for (int y : slice(x, 1, k + 1, {i, j})) left.push_back(basis_arg(y));
      b.accumulate(k, left, right, pm(i + j), acc);
    }
  for (int i = 1; i <= k + 1; ++i)
    for (int j = k + 2; j <= n + 1; ++j) {
      Vec c = tri.basis_product(x[i - 1], x[j - 1]);
      if (is_zero(c)) continue;
      std::vector<SparseVec> r{sparse(c)};
      for (int y : slice(x, k + 2, n + 1, {j})) r.push_back(basis_arg(y));
      b.accumulate(k, args(slice(x, 1, k + 1, {i})), r, -pm(i + j + k + 1), acc);
    }
  return acc;
}

// (d^k_n f_k)(x_1..x_n ; x_{n+1}), k <= n-2.
inline Vec top_piece(const BilinearMap& tri, const CohomologyCochain& f, int k, const std::vector<int>& x,
                     const std::vector<Permutation>& sigmas) {
  const int n = f.degree();
  Vec v = zero_vec(f.dim());
  for (const auto& sigma : sigmas) {
    std::vector<int> l, r;
    for (int p = 0; p < k; ++p) l.push_back(x[sigma[p] - 1]);
    for (int p = k; p < n; ++p) r.push_back(x[sigma[p] - 1]);
    f.body().accumulate(k, args(l), args(r), pm(n - 1) * perm_sign(sigma), v);
  }
  return act(tri, v, x[n]);
}

// (d^{n-1}_n f_{n-1})(x_1..x_n ; x_{n+1}).
inline Vec last_piece(const BilinearMap& tri, const CohomologyCochain& f, const std::vector<int>& x) {
  const int n = f.degree();
  const MultiCochain& b = f.body();
  const std::size_t d = f.dim();
  Vec acc = zero_vec(d);
  const auto last = args({x[n]});
  for (int i = 1; i <= n; ++i) {
    const auto hat = args(slice(x, 1, n, {i}));
    Vec v = zero_vec(d);
    b.accumulate(n - 1, hat, last, Rational(1), v);
    axpy(pm(i + 1), act(tri, x[i - 1], v), acc);
    Vec w = zero_vec(d);
    b.accumulate(n - 1, hat, args({x[i - 1]}), Rational(1), w);
    axpy(pm(i + 1), act(tri, w, x[n]), acc);
    Vec c = tri.basis_product(x[i - 1], x[n]);
    if (!is_zero(c)) b.accumulate(n - 1, hat, std::vector<SparseVec>{sparse(c)}, -pm(i + 1), acc);
  }
  for (int i = 1; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j) {
      Vec c = tri.basis_product(x[i - 1], x[j - 1]) - tri.basis_product(x[j - 1], x[i - 1]);
      if (is_zero(c)) continue;
      std::vector<SparseVec> left{sparse(c)};
      for (int y : slice(x, 1, n, {i, j})) left.push_back(basis_arg(y));
      b.accumulate(n - 1, left, last, pm(i + j), acc);
    }
  return acc;
}

inline void check_base(const BilinearMap& tri, std::size_t dim, const char* who) {
  if (tri.dim() != dim) throw std::invalid_argument(std::string(who) + ": dimension mismatch");
  require_pre_lie(tri, who);
}

}  // namespace detail

/// One summand of the coboundary applied to the component f_k of f:
/// Piece::next is d^k_{k+1} (k <= n-2), Piece::top is d^k_n (k <= n-2) or
/// d^{n-1}_n (k = n-1). The result has only its target component filled.
inline CohomologyCochain coboundary_piece(const BilinearMap& tri, const CohomologyCochain& f, int k, Piece piece) {
  const int n = f.degree();
  if (k < 0 || k > n - 1) throw std::out_of_range("coboundary_piece: component index out of range");
  if (piece == Piece::next && k == n - 1) throw std::invalid_argument("coboundary_piece: no d^{n-1}_n next piece");
  const int target = piece == Piece::next ? k + 1 : n;
  const int d = static_cast<int>(f.dim());
  CohomologyCochain out(f.dim(), n + 1);
  auto& comp = out.body().component(target);
  std::vector<Permutation> sigmas;
  if (piece == Piece::top && k < n - 1) sigmas = shuffles(k, n - k);
  std::size_t slot = 0;
  for (const auto& l : combinations(d, target))
    for (const auto& r : combinations(d, n + 1 - target)) {
      std::vector<int> x = l;
      x.insert(x.end(), r.begin(), r.end());
      Vec v = piece == Piece::next  ? detail::next_piece(tri, f, k, x)
              : k < n - 1           ? detail::top_piece(tri, f, k, x, sigmas)
                                    : detail::last_piece(tri, f, x);
      for (std::size_t o = 0; o < f.dim(); ++o) comp[slot + o] = std::move(v[o]);
      slot += f.dim();
    }
  return out;
}

/// Full coboundary: sum over k <= n-2 of d^k_{k+1} f_k + d^k_n f_k, plus d^{n-1}_n f_{n-1}.
inline CohomologyCochain coboundary_apply(const BilinearMap& tri, const CohomologyCochain& f) {
  detail::check_base(tri, f.dim(), "coboundary_apply");
  const int n = f.degree();
  CohomologyCochain out(f.dim(), n + 1);
  for (int k = 0; k <= n - 2; ++k) {
    out += coboundary_piece(tri, f, k, Piece::next);
    out += coboundary_piece(tri, f, k, Piece::top);
  }
  out += coboundary_piece(tri, f, n - 1, Piece::top);
  return out;
}

/// Matrix of the coboundary C^n -> C^{n+1} in the canonical bases (n >= 1).
inline ExactMatrix coboundary_matrix(const BilinearMap& tri, int n) {
  const std::size_t d = tri.dim();
  if (n < 1) throw std::invalid_argument("coboundary_matrix: degree must be >= 1");
  detail::check_base(tri, d, "coboundary_matrix");
  const std::size_t cols = cochain_space_dim(d, n), rows = cochain_space_dim(d, n + 1);
  ExactMatrix m(rows, cols);
  for (std::size_t c = 0; c < cols; ++c) {
    Vec e = unit_vec(cols, c);
    m.set_column(c, coboundary_apply(tri, CohomologyCochain::from_vector(d, n, e)).to_vector());
  }
  return m;
}

/// Matrix of a single piece, from the component k of C^n to its target
/// component of C^{n+1}, in the canonical bases of those components.
inline ExactMatrix piece_matrix(const BilinearMap& tri, int n, int k, Piece piece) {
  const std::size_t d = tri.dim();
  detail::check_base(tri, d, "piece_matrix");
  CohomologyCochain shape_in(d, n), shape_out(d, n + 1);
  const int target = piece == Piece::next ? k + 1 : n;
  const std::size_t cols = shape_in.component_size(k), rows = shape_out.component_size(target);
  const std::size_t in_off = shape_in.component_offset(k), out_off = shape_out.component_offset(target);
  ExactMatrix m(rows, cols);
  for (std::size_t c = 0; c < cols; ++c) {
    Vec e = zero_vec(shape_in.size());
    e[in_off + c] = 1;
    Vec img = coboundary_piece(tri, CohomologyCochain::from_vector(d, n, e), k, piece).to_vector();
    for (std::size_t r = 0; r < rows; ++r) m(r, c) = img[out_off + r];
  }
  return m;
}

/// Cohomology ker(out) / im(in) of a complex at one spot, in coordinates.
class Quotient {
 public:
  Quotient() = default;
  /// in: C^{prev} -> C (dim x prev), out: C -> C^{next} (next x dim).
  Quotient(std::size_t dim, const ExactMatrix& in, const ExactMatrix& out)
      : dim_(dim), boundaries_(dim, columns_of(in)) {
    if ((in.cols() > 0 && in.rows() != dim) || (out.rows() > 0 && out.cols() != dim))
      throw std::invalid_argument("Quotient: shape mismatch");
    rank_in_ = boundaries_.dimension();
    ExactMatrix o = out.rows() > 0 ? out : ExactMatrix(0, dim);
    const auto kernel = o.kernel_basis();
    rank_out_ = dim - kernel.size();
    std::vector<Vec> forms;
    for (const auto& z : kernel) forms.push_back(boundaries_.reduce(z));
    if (!forms.empty()) {
      auto e = ExactMatrix::from_rows(dim, forms).rref();
      for (std::size_t r = 0; r < e.pivots.size(); ++r) reps_.push_back(e.reduced.row(r));
      rep_pivots_ = e.pivots;
    }
    if (reps_.size() + rank_in_ + rank_out_ != dim) throw std::logic_error("Quotient: rank bookkeeping failed");
  }

  std::size_t dim_cochains() const { return dim_; }
  std::size_t rank_in() const { return rank_in_; }
  std::size_t rank_out() const { return rank_out_; }
  std::size_t betti() const { return reps_.size(); }
  const std::vector<Vec>& representatives() const { return reps_; }
  const SubspaceReducer& boundaries() const { return boundaries_; }

  /// Class coordinates of a cocycle in the representative basis. Throws if
  /// the vector is not a combination of representatives and boundaries.
  Vec coordinates(const Vec& cocycle) const {
    Vec nf = boundaries_.reduce(cocycle);
    Vec c = zero_vec(reps_.size());
    Vec rest = nf;
    for (std::size_t r = 0; r < reps_.size(); ++r) {
      c[r] = nf[rep_pivots_[r]];
      axpy(-c[r], reps_[r], rest);
    }
    if (!is_zero(rest)) throw std::invalid_argument("Quotient::coordinates: vector is not a cocycle");
    return c;
  }

 private:
  static std::vector<Vec> columns_of(const ExactMatrix& m) {
    std::vector<Vec> c;
    for (std::size_t j = 0; j < m.cols(); ++j) c.push_back(m.column(j));
    return c;
  }

  std::size_t dim_ = 0, rank_in_ = 0, rank_out_ = 0;
  SubspaceReducer boundaries_{0, {}};
  std::vector<Vec> reps_;
  std::vector<std::size_t> rep_pivots_;
};

struct CohomologyReport {
  int degree = 0;
  std::size_t dim_cochains = 0;
  std::size_t rank_in = 0;
  std::size_t rank_out = 0;
  std::size_t betti = 0;
  std::vector<CohomologyCochain> representatives;
};

/// The incoming coboundary matrix into C^n (an empty map for n = 1).
inline ExactMatrix incoming_matrix(const BilinearMap& tri, int n) {
  if (n <= 1) return ExactMatrix(cochain_space_dim(tri.dim(), n), 0);
  return coboundary_matrix(tri, n - 1);
}

inline Quotient post_lie_quotient(const BilinearMap& tri, int n) {
  return Quotient(cochain_space_dim(tri.dim(), n), incoming_matrix(tri, n), coboundary_matrix(tri, n));
}

/// H^n = ker d_n / im d_{n-1} with canonical echelon representatives.
inline CohomologyReport cohomology_basis(const BilinearMap& tri, int n) {
  if (n < 1) throw std::invalid_argument("cohomology_basis: degree must be >= 1");
  Quotient q = post_lie_quotient(tri, n);
  CohomologyReport r;
  r.degree = n;
  r.dim_cochains = q.dim_cochains();
  r.rank_in = q.rank_in();
  r.rank_out = q.rank_out();
  r.betti = q.betti();
  for (const auto& v : q.representatives()) r.representatives.push_back(CohomologyCochain::from_vector(tri.dim(), n, v));
  return r;
}

/// Basis of Der = {D : D(x > y) = D(x) > y + x > D(y)}, solved directly.
/// Unknowns are the entries D(a, b) with D(e_b) = sum_a D(a, b) e_a.
inline std::vector<ExactMatrix> derivation_space(const BilinearMap& tri) {
  const std::size_t d = tri.dim();
  ExactMatrix sys(d * d * d, d * d);
  auto col = [d](std::size_t a, std::size_t b) { return a * d + b; };
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j)
      for (std::size_t k = 0; k < d; ++k) {
        const std::size_t row = (i * d + j) * d + k;
        // D(e_i > e_j)_k = sum_m c^m_ij D(k, m)
        for (std::size_t m = 0; m < d; ++m) sys(row, col(k, m)) += tri.at(i, j, m);
        // (D e_i) > e_j = sum_a D(a, i) c^k_aj
        for (std::size_t a = 0; a < d; ++a) sys(row, col(a, i)) -= tri.at(a, j, k);
        // e_i > (D e_j) = sum_a D(a, j) c^k_ia
        for (std::size_t a = 0; a < d; ++a) sys(row, col(a, j)) -= tri.at(i, a, k);
      }
  std::vector<ExactMatrix> out;
  for (const auto& v : sys.kernel_basis()) {
    ExactMatrix m(d, d);
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = 0; b < d; ++b) m(a, b) = v[col(a, b)];
    out.push_back(std::move(m));
  }
  return out;
}

inline std::vector<ExactMatrix> derivation_space(const FiniteAlgebra& a) { return derivation_space(a.product("triangle")); }

/// The two defect families of a 2-cochain (pi, omega):
/// first(x; y, z)  = x > pi(y,z) - pi(x > y, z) + pi(x > z, y),
/// second(x, y; z) = -(omega(x,y) - omega(y,x) + pi(x,y)) > z - omega(x > y - y > x, z)
///                   + omega(x, y > z) + x > omega(y,z) - omega(y, x > z) - y > omega(x,z).
inline std::pair<Trilinear, Trilinear> two_cocycle_residual(const BilinearMap& tri, const BilinearMap& pi,
                                                            const BilinearMap& omega) {
  require_antisymmetric(pi, "two_cocycle_residual");
  if (tri.dim() != pi.dim() || tri.dim() != omega.dim())
    throw std::invalid_argument("two_cocycle_residual: dimension mismatch");
  const std::size_t d = tri.dim();
  Trilinear first(d), second(d);
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = 0; b < d; ++b)
      for (std::size_t c = 0; c < d; ++c) {
        const Vec x = unit_vec(d, a), y = unit_vec(d, b), z = unit_vec(d, c);
        Vec f = tri(x, pi(y, z)) - pi(tri(x, y), z) + pi(tri(x, z), y);
        Vec br = omega(x, y) - omega(y, x) + pi(x, y);
        Vec s = omega(x, tri(y, z)) + tri(x, omega(y, z)) - omega(y, tri(x, z)) - tri(y, omega(x, z));
        s = s - tri(br, z);
        s = s - omega(tri(x, y) - tri(y, x), z);
        for (std::size_t o = 0; o < d; ++o) {
          first.at(a, b, c, o) = f[o];
          second.at(a, b, c, o) = s[o];
        }
      }
  return {first, second};
}

/// Exactness data for one node X of the long exact sequence, A -> X -> B.
struct LesNode {
  std::string name;
  std::size_t dim = 0;
  std::size_t rank_in = 0;
  std::size_t rank_out = 0;
  bool composition_zero = true;
  bool exact = false;
};

struct LesReport {
  int max_degree = 0;
  std::map<int, std::size_t> betti_post_lie;
  std::map<int, std::size_t> betti_pre_lie;
  std::map<std::pair<int, int>, std::size_t> betti_pre_lie_arity;  // (n, s) with s the right wedge arity
  std::vector<LesNode> nodes;                                      // with c^n as stated
  std::vector<LesNode> nodes_flipped;                              // with -c^n
  bool exact = false;
  bool exact_flipped = false;
};

namespace detail {

inline ExactMatrix class_map(const Quotient& from, const Quotient& to, const std::vector<Vec>& images) {
  ExactMatrix m(to.betti(), from.betti());
  for (std::size_t c = 0; c < images.size(); ++c) m.set_column(c, to.coordinates(images[c]));
  return m;
}

inline std::vector<LesNode> exactness(const std::vector<std::string>& names, const std::vector<std::size_t>& dims,
                                      const std::vector<ExactMatrix>& maps) {
  // maps[i] : node i -> node i + 1; the final node is only a target
  std::vector<LesNode> out;
  for (std::size_t i = 0; i < maps.size(); ++i) {
    LesNode node;
    node.name = names[i];
    node.dim = dims[i];
    node.rank_in = i == 0 ? 0 : maps[i - 1].rank();
    node.rank_out = maps[i].rank();
    node.composition_zero = i == 0 || (maps[i] * maps[i - 1]).is_zero();
    node.exact = node.composition_zero && node.rank_in + node.rank_out == node.dim;
    out.push_back(node);
  }
  return out;
}

}  // namespace detail

/// Long exact sequence H_PLie -> H_postLie -> sum_s H_PLie_s -> H_PLie[+1]
/// through degree max_degree; exactness is checked at every node up to and
/// including H^{max+1}_PLie, once with c^n and once with -c^n.
/// H^n_PLie_s is indexed by total degree n: cochains C^{n-s,s}.
inline LesReport les_verify(const BilinearMap& tri, int max_degree) {
  if (max_degree < 1) throw std::invalid_argument("les_verify: max_degree must be >= 1");
  require_pre_lie(tri, "les_verify");
  const std::size_t d = tri.dim();
  const int top = max_degree + 1;
  std::map<int, Quotient> plie, post;
  std::map<std::pair<int, int>, Quotient> quot;  // (n, k), k = n - s
  std::map<int, ExactMatrix> cob;
  for (int n = 1; n <= top + 1; ++n) cob[n] = coboundary_matrix(tri, n);
  for (int n = 1; n <= top; ++n) {
    CohomologyCochain shape(d, n);
    const std::size_t pdim = shape.component_size(n - 1);
    ExactMatrix in = n >= 2 ? piece_matrix(tri, n - 1, n - 2, Piece::top) : ExactMatrix(pdim, 0);
    plie.emplace(n, Quotient(pdim, in, piece_matrix(tri, n, n - 1, Piece::top)));
    post.emplace(n, Quotient(shape.size(), n >= 2 ? cob[n - 1] : ExactMatrix(shape.size(), 0), cob[n]));
    if (n > max_degree) continue;
    for (int k = 0; k <= n - 2; ++k) {
      const std::size_t qdim = shape.component_size(k);
      ExactMatrix qin = k >= 1 ? piece_matrix(tri, n - 1, k - 1, Piece::next) : ExactMatrix(qdim, 0);
      quot.emplace(std::make_pair(n, k), Quotient(qdim, qin, piece_matrix(tri, n, k, Piece::next)));
    }
  }

  LesReport rep;
  rep.max_degree = max_degree;
  std::vector<std::string> names;
  std::vector<std::size_t> dims;
  std::vector<ExactMatrix> maps, maps_flipped;
  for (int n = 1; n <= top; ++n) {
    CohomologyCochain shape(d, n);
    const Quotient& pl = plie.at(n);
    const Quotient& po = post.at(n);
    rep.betti_pre_lie[n] = pl.betti();
    rep.betti_post_lie[n] = po.betti();
    // iota
    std::vector<Vec> img;
    for (const auto& r : pl.representatives()) {
      Vec v = zero_vec(shape.size());
      for (std::size_t i = 0; i < r.size(); ++i) v[shape.component_offset(n - 1) + i] = r[i];
      img.push_back(v);
    }
    names.push_back("H^" + std::to_string(n) + "_PLie");
    dims.push_back(pl.betti());
    maps.push_back(detail::class_map(pl, po, img));
    maps_flipped.push_back(maps.back());
    names.push_back("H^" + std::to_string(n) + "_postLie");
    dims.push_back(po.betti());
    if (n > max_degree) break;
    // p: post -> sum over k of Q_(n,k), blocks in increasing k
    std::size_t qdim_total = 0;
    for (int k = 0; k <= n - 2; ++k) qdim_total += quot.at({n, k}).betti();
    ExactMatrix pmat(qdim_total, po.betti());
    for (std::size_t c = 0; c < po.betti(); ++c) {
      const Vec& r = po.representatives()[c];
      std::size_t row = 0;
      for (int k = 0; k <= n - 2; ++k) {
        const Quotient& q = quot.at({n, k});
        Vec part(r.begin() + shape.component_offset(k), r.begin() + shape.component_offset(k) + shape.component_size(k));
        Vec coords = q.coordinates(part);
        for (std::size_t i = 0; i < coords.size(); ++i) pmat(row + i, c) = coords[i];
        row += coords.size();
      }
    }
    maps.push_back(pmat);
    maps_flipped.push_back(pmat);
    std::string qname = "sum_s H^" + std::to_string(n) + "_PLie_s";
    names.push_back(qname);
    dims.push_back(qdim_total);
    for (int k = 0; k <= n - 2; ++k) rep.betti_pre_lie_arity[{n, n - k}] = quot.at({n, k}).betti();
    // connecting map into H^{n+1}_PLie
    std::vector<Vec> cimg;
    for (int k = 0; k <= n - 2; ++k) {
      ExactMatrix cp = piece_matrix(tri, n, k, Piece::top);
      for (const auto& r : quot.at({n, k}).representatives()) cimg.push_back(cp * r);
    }
    ExactMatrix cmat(plie.at(n + 1).betti(), qdim_total);
    for (std::size_t c = 0; c < cimg.size(); ++c) cmat.set_column(c, plie.at(n + 1).coordinates(cimg[c]));
    maps.push_back(cmat);
    maps_flipped.push_back(-cmat);
  }
  rep.nodes = detail::exactness(names, dims, maps);
  rep.nodes_flipped = detail::exactness(names, dims, maps_flipped);
  rep.exact = true;
  for (const auto& n : rep.nodes) rep.exact = rep.exact && n.exact;
  rep.exact_flipped = true;
  for (const auto& n : rep.nodes_flipped) rep.exact_flipped = rep.exact_flipped && n.exact;
  return rep;
}

/// Cochain-level short exact sequence 0 -> PLie -> postLie -> sum_s PLie_s -> 0
/// in degree n: dimension count, injectivity, surjectivity, p o iota = 0, and
/// both chain-map squares against the full coboundary.
struct ShortExactReport {
  int degree = 0;
  std::size_t dim_sub = 0, dim_total = 0, dim_quotient = 0;
  bool injective = false, surjective = false, composition_zero = false, dims_add = false;
  bool iota_chain_map = false, p_chain_map = false;
  bool holds() const {
    return injective && surjective && composition_zero && dims_add && iota_chain_map && p_chain_map;
  }
};

namespace detail {

inline ExactMatrix inclusion_matrix(std::size_t d, int n) {
  CohomologyCochain shape(d, n);
  ExactMatrix m(shape.size(), shape.component_size(n - 1));
  for (std::size_t i = 0; i < m.cols(); ++i) m(shape.component_offset(n - 1) + i, i) = 1;
  return m;
}

inline ExactMatrix projection_matrix(std::size_t d, int n) {
  CohomologyCochain shape(d, n);
  const std::size_t qdim = shape.component_offset(n - 1);
  ExactMatrix m(qdim, shape.size());
  for (std::size_t i = 0; i < qdim; ++i) m(i, i) = 1;
  return m;
}

}  // namespace detail

inline ShortExactReport short_exact_verify(const BilinearMap& tri, int n) {
  require_pre_lie(tri, "short_exact_verify");
  const std::size_t d = tri.dim();
  ShortExactReport r;
  r.degree = n;
  ExactMatrix iota = detail::inclusion_matrix(d, n), p = detail::projection_matrix(d, n);
  r.dim_sub = iota.cols();
  r.dim_total = iota.rows();
  r.dim_quotient = p.rows();
  r.injective = iota.rank() == r.dim_sub;
  r.surjective = p.rank() == r.dim_quotient;
  r.composition_zero = (p * iota).is_zero();
  r.dims_add = r.dim_sub + r.dim_quotient == r.dim_total;
  ExactMatrix full = coboundary_matrix(tri, n);
  r.iota_chain_map = full * iota == detail::inclusion_matrix(d, n + 1) * piece_matrix(tri, n, n - 1, Piece::top);
  // differential of the quotient: d^k_{k+1} from C^{k,n-k} into C^{k+1,n-k}
  CohomologyCochain in_shape(d, n), out_shape(d, n + 1);
  ExactMatrix dq(out_shape.component_offset(n), in_shape.component_offset(n - 1));
  for (int k = 0; k <= n - 2; ++k) {
    ExactMatrix b = piece_matrix(tri, n, k, Piece::next);
    for (std::size_t i = 0; i < b.rows(); ++i)
      for (std::size_t j = 0; j < b.cols(); ++j)
        dq(out_shape.component_offset(k + 1) + i, in_shape.component_offset(k) + j) = b(i, j);
  }
  r.p_chain_map = detail::projection_matrix(d, n + 1) * full == dq * p;
  return r;
}

/// How the coboundary of C^n compares with [tri, .] on the same vector
/// space, C^n = C^{n-1}_postLie: "plus", "minus", "zero" (both vanish) or
/// "neither", overall and per target component.
struct BracketSignDiagnostic {
  int degree = 0;
  std::string overall;
  std::vector<std::string> per_component;
};

inline BracketSignDiagnostic bracket_sign_diagnostic(const BilinearMap& tri, int n) {
  require_pre_lie(tri, "bracket_sign_diagnostic");
  const std::size_t d = tri.dim();
  const MultiCochain t = embed_product(tri);
  ExactMatrix cob = coboundary_matrix(tri, n);
  const std::size_t cols = cochain_space_dim(d, n);
  ExactMatrix br(cob.rows(), cols);
  for (std::size_t c = 0; c < cols; ++c) {
    MultiCochain f = MultiCochain::from_vector(d, n - 1, unit_vec(cols, c));
    br.set_column(c, graded_bracket(t, f).to_vector());
  }
  auto classify = [](const ExactMatrix& a, const ExactMatrix& b) -> std::string {
    if (a.is_zero() && b.is_zero()) return "zero";
    if (a == b) return "plus";
    if (a == -b) return "minus";
    return "neither";
  };
  BracketSignDiagnostic out;
  out.degree = n;
  out.overall = classify(cob, br);
  CohomologyCochain shape(d, n + 1);
  for (int k = 0; k <= n; ++k) {
    const std::size_t off = shape.component_offset(k), sz = shape.component_size(k);
    ExactMatrix a(sz, cols), b(sz, cols);
    for (std::size_t i = 0; i < sz; ++i)
      for (std::size_t c = 0; c < cols; ++c) {
        a(i, c) = cob(off + i, c);
        b(i, c) = br(off + i, c);
      }
    out.per_component.push_back(classify(a, b));
  }
  return out;
}

}  // namespace postlie
