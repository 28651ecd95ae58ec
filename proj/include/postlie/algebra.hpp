#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "postlie/core/matrix.hpp"
#include "postlie/core/rational.hpp"

namespace postlie {

enum class Symmetry { none, antisymmetric };

/// Bilinear map V x V -> V given by structure constants:
/// product(e_i, e_j) = sum_k c^k_{ij} e_k.
class BilinearMap {
 public:
  BilinearMap() = default;
  explicit BilinearMap(std::size_t dim, Symmetry tag = Symmetry::none)
      : dim_(dim), tag_(tag), coeffs_(dim * dim * dim) {}

  std::size_t dim() const { return dim_; }
  Symmetry tag() const { return tag_; }

  /// Re-tags the map; tagging as antisymmetric validates the constants.
  BilinearMap& set_tag(Symmetry tag) {
    if (tag == Symmetry::antisymmetric && !is_antisymmetric())
      throw std::invalid_argument("structure constants are not antisymmetric");
    tag_ = tag;
    return *this;
  }

  Rational& at(std::size_t i, std::size_t j, std::size_t k) { return coeffs_[(i * dim_ + j) * dim_ + k]; }
  const Rational& at(std::size_t i, std::size_t j, std::size_t k) const { return coeffs_[(i * dim_ + j) * dim_ + k]; }

  /// Sets c_{ij} and, for antisymmetric maps, c_{ji} = -c_{ij}.
  void set(std::size_t i, std::size_t j, std::size_t k, const Rational& v) {
    at(i, j, k) = v;
    if (tag_ == Symmetry::antisymmetric) {
      if (i == j && v != 0) throw std::invalid_argument("antisymmetric map with nonzero diagonal");
      at(j, i, k) = -v;
    }
  }

  Vec basis_product(std::size_t i, std::size_t j) const {
    return Vec(coeffs_.begin() + (i * dim_ + j) * dim_, coeffs_.begin() + (i * dim_ + j + 1) * dim_);
  }

  Vec operator()(const Vec& x, const Vec& y) const {
    Vec out = zero_vec(dim_);
    for (std::size_t i = 0; i < dim_; ++i) {
      if (x[i] == 0) continue;
      for (std::size_t j = 0; j < dim_; ++j) {
        if (y[j] == 0) continue;
        const Rational s = x[i] * y[j];
        for (std::size_t k = 0; k < dim_; ++k)
          if (at(i, j, k) != 0) out[k] += s * at(i, j, k);
      }
    }
    return out;
  }

  bool is_antisymmetric() const {
    for (std::size_t i = 0; i < dim_; ++i)
      for (std::size_t j = 0; j < dim_; ++j)
        for (std::size_t k = 0; k < dim_; ++k)
          if (at(i, j, k) != -at(j, i, k)) return false;
    return true;
  }

  bool is_zero() const {
    for (const auto& c : coeffs_)
      if (c != 0) return false;
    return true;
  }

  /// (x, y) -> product(y, x).
  BilinearMap opposite() const {
    BilinearMap o(dim_);
    for (std::size_t i = 0; i < dim_; ++i)
      for (std::size_t j = 0; j < dim_; ++j)
        for (std::size_t k = 0; k < dim_; ++k) o.at(i, j, k) = at(j, i, k);
    return o;
  }

  BilinearMap operator+(const BilinearMap& o) const { return combine(o, 1); }
  BilinearMap operator-(const BilinearMap& o) const { return combine(o, -1); }
  BilinearMap operator-() const { return scaled(-1); }

  BilinearMap scaled(const Rational& s) const {
    BilinearMap r = *this;
    for (auto& c : r.coeffs_) c *= s;
    return r;
  }

  /// Compares structure constants only.
  bool operator==(const BilinearMap& o) const { return dim_ == o.dim_ && coeffs_ == o.coeffs_; }

  const std::vector<Rational>& coefficients() const { return coeffs_; }

 private:
  BilinearMap combine(const BilinearMap& o, int sign) const {
    if (o.dim_ != dim_) throw std::invalid_argument("bilinear map dimension mismatch");
    BilinearMap r(dim_, tag_ == o.tag_ ? tag_ : Symmetry::none);
    for (std::size_t n = 0; n < coeffs_.size(); ++n)
      r.coeffs_[n] = sign > 0 ? Rational(coeffs_[n] + o.coeffs_[n]) : Rational(coeffs_[n] - o.coeffs_[n]);
    return r;
  }

  std::size_t dim_ = 0;
  Symmetry tag_ = Symmetry::none;
  std::vector<Rational> coeffs_;
};

/// Finite-dimensional space with named products ("triangle", "bracket", ...).
struct FiniteAlgebra {
  std::size_t dim = 0;
  std::vector<std::string> basis_labels;
  std::map<std::string, BilinearMap> products;

  FiniteAlgebra() = default;
  FiniteAlgebra(std::size_t d, std::vector<std::string> labels = {}) : dim(d), basis_labels(std::move(labels)) {
    if (basis_labels.empty())
      for (std::size_t i = 0; i < d; ++i) basis_labels.push_back("e" + std::to_string(i + 1));
    validate();
  }

  void validate() const {
    if (basis_labels.size() != dim) throw std::invalid_argument("basis label count differs from dim");
    std::set<std::string> seen(basis_labels.begin(), basis_labels.end());
    if (seen.size() != basis_labels.size()) throw std::invalid_argument("basis labels must be distinct");
    for (const auto& [name, p] : products)
      if (p.dim() != dim) throw std::invalid_argument("product '" + name + "' has wrong dimension");
  }

  const BilinearMap& product(const std::string& name) const {
    auto it = products.find(name);
    if (it == products.end()) throw std::invalid_argument("algebra has no product named '" + name + "'");
    return it->second;
  }
};

/// Trilinear V^3 -> V table, used to evaluate three-argument identities.
class Trilinear {
 public:
  explicit Trilinear(std::size_t dim) : dim_(dim), data_(dim * dim * dim * dim) {}

  std::size_t dim() const { return dim_; }
  Rational& at(std::size_t i, std::size_t j, std::size_t k, std::size_t o) {
    return data_[((i * dim_ + j) * dim_ + k) * dim_ + o];
  }
  const Rational& at(std::size_t i, std::size_t j, std::size_t k, std::size_t o) const {
    return data_[((i * dim_ + j) * dim_ + k) * dim_ + o];
  }
  Vec value(std::size_t i, std::size_t j, std::size_t k) const {
    auto b = data_.begin() + ((i * dim_ + j) * dim_ + k) * dim_;
    return Vec(b, b + dim_);
  }

  /// (x, y, z) -> outer(inner(x, y), z)
  static Trilinear nest_left(const BilinearMap& outer, const BilinearMap& inner) {
    const std::size_t d = outer.dim();
    Trilinear t(d);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j)
        for (std::size_t p = 0; p < d; ++p) {
          const Rational& c = inner.at(i, j, p);
          if (c == 0) continue;
          for (std::size_t k = 0; k < d; ++k)
            for (std::size_t o = 0; o < d; ++o)
              if (outer.at(p, k, o) != 0) t.at(i, j, k, o) += c * outer.at(p, k, o);
        }
    return t;
  }

  /// (x, y, z) -> outer(x, inner(y, z))
  static Trilinear nest_right(const BilinearMap& outer, const BilinearMap& inner) {
    const std::size_t d = outer.dim();
    Trilinear t(d);
    for (std::size_t j = 0; j < d; ++j)
      for (std::size_t k = 0; k < d; ++k)
        for (std::size_t p = 0; p < d; ++p) {
          const Rational& c = inner.at(j, k, p);
          if (c == 0) continue;
          for (std::size_t i = 0; i < d; ++i)
            for (std::size_t o = 0; o < d; ++o)
              if (outer.at(i, p, o) != 0) t.at(i, j, k, o) += c * outer.at(i, p, o);
        }
    return t;
  }

  /// Result r with r(x_0, x_1, x_2) = this(x_{p[0]}, x_{p[1]}, x_{p[2]}).
  Trilinear permuted(std::array<int, 3> p) const {
    Trilinear r(dim_);
    std::array<std::size_t, 3> idx{};
    for (idx[0] = 0; idx[0] < dim_; ++idx[0])
      for (idx[1] = 0; idx[1] < dim_; ++idx[1])
        for (idx[2] = 0; idx[2] < dim_; ++idx[2])
          for (std::size_t o = 0; o < dim_; ++o)
            r.at(idx[0], idx[1], idx[2], o) = at(idx[p[0]], idx[p[1]], idx[p[2]], o);
    return r;
  }

  Trilinear& operator+=(const Trilinear& o) {
    for (std::size_t n = 0; n < data_.size(); ++n) data_[n] += o.data_[n];
    return *this;
  }
  Trilinear& operator-=(const Trilinear& o) {
    for (std::size_t n = 0; n < data_.size(); ++n) data_[n] -= o.data_[n];
    return *this;
  }

  bool is_zero() const {
    for (const auto& c : data_)
      if (c != 0) return false;
    return true;
  }

 private:
  std::size_t dim_;
  std::vector<Rational> data_;
};

struct Witness {
  std::string axiom;
  std::array<std::size_t, 3> triple{};
  Vec defect;

  bool operator==(const Witness&) const = default;
};

/// holds <=> witnesses empty; every witness carries a nonzero defect.
struct AxiomReport {
  bool holds = true;
  std::vector<Witness> witnesses;

  void merge(const AxiomReport& other) {
    witnesses.insert(witnesses.end(), other.witnesses.begin(), other.witnesses.end());
    holds = witnesses.empty();
  }

  bool failed(const std::string& axiom) const {
    for (const auto& w : witnesses)
      if (w.axiom == axiom) return true;
    return false;
  }
};

/// Input rejected by an operation's precondition; carries the offending
/// witnesses when the violated precondition is itself an axiom.
class PreconditionError : public std::invalid_argument {
 public:
  explicit PreconditionError(const std::string& what, AxiomReport report = {})
      : std::invalid_argument(what), report_(std::move(report)) {}
  const AxiomReport& report() const { return report_; }

 private:
  AxiomReport report_;
};

/// Collects nonzero values of t over ordered basis triples (i, j, k).
inline AxiomReport report_defects(const std::string& axiom, const Trilinear& t) {
  AxiomReport r;
  const std::size_t d = t.dim();
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j)
      for (std::size_t k = 0; k < d; ++k) {
        Vec v = t.value(i, j, k);
        if (!is_zero(v)) r.witnesses.push_back({axiom, {i, j, k}, std::move(v)});
      }
  r.holds = r.witnesses.empty();
  return r;
}

inline void require_antisymmetric(const BilinearMap& pi, const char* who) {
  if (!pi.is_antisymmetric())
    throw PreconditionError(std::string(who) + ": bracket is not antisymmetric");
}

namespace detail {

constexpr std::array<int, 3> cyc1{1, 2, 0};
constexpr std::array<int, 3> cyc2{2, 0, 1};
constexpr std::array<int, 3> swap01{1, 0, 2};

inline Trilinear jacobi_defect(const BilinearMap& pi) {
  Trilinear base = Trilinear::nest_left(pi, pi);
  Trilinear t = base;
  t += base.permuted(cyc1);
  t += base.permuted(cyc2);
  return t;
}

// (x>y - y>x) > z - x>(y>z) + y>(x>z)
inline Trilinear left_symmetry_defect(const BilinearMap& tri) {
  Trilinear l = Trilinear::nest_left(tri, tri);
  Trilinear r = Trilinear::nest_right(tri, tri);
  Trilinear t = l;
  t -= l.permuted(swap01);
  t -= r;
  t += r.permuted(swap01);
  return t;
}

// x>[y,z] - [x>y,z] - [y,x>z]
inline Trilinear post1_defect(const BilinearMap& pi, const BilinearMap& rho) {
  Trilinear t = Trilinear::nest_right(rho, pi);
  t -= Trilinear::nest_left(pi, rho);
  t -= Trilinear::nest_right(pi, rho).permuted(swap01);
  return t;
}

// ([x,y] + x>y - y>x) > z - x>(y>z) + y>(x>z)
inline Trilinear post2_defect(const BilinearMap& pi, const BilinearMap& rho) {
  Trilinear t = Trilinear::nest_left(rho, pi);
  t += left_symmetry_defect(rho);
  return t;
}

}  // namespace detail

/// Jacobi identity on all basis triples.
inline AxiomReport check_jacobi(const BilinearMap& pi) {
  require_antisymmetric(pi, "check_jacobi");
  return report_defects("jacobi", detail::jacobi_defect(pi));
}

/// Left-symmetry (x>y)>z - x>(y>z) = (y>x)>z - y>(x>z) on all basis triples.
inline AxiomReport check_pre_lie(const BilinearMap& tri) {
  return report_defects("pre_lie", detail::left_symmetry_defect(tri));
}

/// Jacobi for pi plus both post-Lie compatibility axioms for rho.
inline AxiomReport check_post_lie(const BilinearMap& pi, const BilinearMap& rho) {
  require_antisymmetric(pi, "check_post_lie");
  if (pi.dim() != rho.dim()) throw std::invalid_argument("check_post_lie: dimension mismatch");
  AxiomReport r = report_defects("jacobi", detail::jacobi_defect(pi));
  r.merge(report_defects("post1", detail::post1_defect(pi, rho)));
  r.merge(report_defects("post2", detail::post2_defect(pi, rho)));
  return r;
}

/// [x,y] = x>y - y>x + pi(x,y).
inline BilinearMap sub_adjacent(const BilinearMap& pi, const BilinearMap& rho) {
  BilinearMap b = rho - rho.opposite() + pi;
  return b.set_tag(Symmetry::antisymmetric);
}

/// (x, y) -> a m(b x, b y), keeping the symmetry tag.
inline BilinearMap transform(const BilinearMap& m, const ExactMatrix& a, const ExactMatrix& b) {
  const std::size_t d = m.dim();
  if (a.rows() != d || a.cols() != d || b.rows() != d || b.cols() != d)
    throw std::invalid_argument("transform: matrix shape mismatch");
  BilinearMap out(d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      Vec v = a * m(b.column(i), b.column(j));
      for (std::size_t k = 0; k < d; ++k) out.at(i, j, k) = v[k];
    }
  if (m.tag() == Symmetry::antisymmetric) out.set_tag(Symmetry::antisymmetric);
  return out;
}

/// Conditions (i)-(iii) for (pi, tri + omega) to be post-Lie, written out
/// term by term in the base product and the perturbation.
inline AxiomReport check_deformation_conditions(const BilinearMap& tri, const BilinearMap& pi,
                                                const BilinearMap& omega) {
  require_antisymmetric(pi, "check_deformation_conditions");
  if (tri.dim() != pi.dim() || tri.dim() != omega.dim())
    throw std::invalid_argument("check_deformation_conditions: dimension mismatch");
  AxiomReport base = check_pre_lie(tri);
  if (!base.holds) throw PreconditionError("check_deformation_conditions: base product is not pre-Lie", base);

  using detail::swap01;
  AxiomReport r = report_defects("condition_i", detail::jacobi_defect(pi));

  // x>pi(y,z) + w(x,pi(y,z)) - pi(x>y,z) - pi(y,x>z) - pi(w(x,y),z) - pi(y,w(x,z))
  Trilinear c2 = Trilinear::nest_right(tri, pi);
  c2 += Trilinear::nest_right(omega, pi);
  c2 -= Trilinear::nest_left(pi, tri);
  c2 -= Trilinear::nest_right(pi, tri).permuted(swap01);
  c2 -= Trilinear::nest_left(pi, omega);
  c2 -= Trilinear::nest_right(pi, omega).permuted(swap01);
  r.merge(report_defects("condition_ii", c2));

  // (w(x,y) - w(y,x) + pi(x,y)) > z + w(x>y - y>x, z) + w(w(x,y) - w(y,x) + pi(x,y), z)
  //   - w(x,y>z) - x>w(y,z) + w(y,x>z) + y>w(x,z) - w(x,w(y,z)) + w(y,w(x,z))
  Trilinear c3(tri.dim());
  auto add_left_antisym = [&](const BilinearMap& outer, const BilinearMap& inner) {
    Trilinear l = Trilinear::nest_left(outer, inner);
    c3 += l;
    c3 -= l.permuted(swap01);
  };
  add_left_antisym(tri, omega);
  c3 += Trilinear::nest_left(tri, pi);
  add_left_antisym(omega, tri);
  add_left_antisym(omega, omega);
  c3 += Trilinear::nest_left(omega, pi);
  auto sub_right_antisym = [&](const BilinearMap& outer, const BilinearMap& inner) {
    Trilinear rr = Trilinear::nest_right(outer, inner);
    c3 -= rr;
    c3 += rr.permuted(swap01);
  };
  sub_right_antisym(omega, tri);
  sub_right_antisym(tri, omega);
  sub_right_antisym(omega, omega);
  r.merge(report_defects("condition_iii", c3));
  return r;
}

}  // namespace postlie
