#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "postlie/algebra.hpp"
#include "postlie/cohomology.hpp"
#include "postlie/core/matrix.hpp"
#include "postlie/corpus.hpp"

namespace postlie {

/// pi_t = sum pi_i t^i and omega_t = sum omega_i t^i modulo t^{N+1}, with
/// pi_0 = 0 and omega_0 the base pre-Lie product.
struct FormalDeformation {
  std::size_t dim = 0;
  int order = 0;
  std::vector<BilinearMap> pi;
  std::vector<BilinearMap> omega;

  FormalDeformation() = default;
  /// The undeformed pair (0, tri) to order N.
  FormalDeformation(const BilinearMap& tri, int order_) : dim(tri.dim()), order(order_) {
    if (order_ < 0) throw std::invalid_argument("FormalDeformation: negative order");
    for (int i = 0; i <= order; ++i) {
      pi.emplace_back(dim, Symmetry::antisymmetric);
      omega.emplace_back(i == 0 ? tri : BilinearMap(dim));
    }
  }

  const BilinearMap& base() const { return omega.at(0); }

  /// Throws PreconditionError on a broken invariant.
  void validate() const {
    if (order < 0 || pi.size() != static_cast<std::size_t>(order + 1) || omega.size() != pi.size())
      throw PreconditionError("FormalDeformation: coefficient count does not match the order");
    for (int i = 0; i <= order; ++i) {
      if (pi[i].dim() != dim || omega[i].dim() != dim)
        throw PreconditionError("FormalDeformation: coefficient dimension mismatch");
      require_antisymmetric(pi[i], "FormalDeformation");
    }
    if (!pi[0].is_zero()) throw PreconditionError("FormalDeformation: pi_0 must vanish");
  }

  void validate(const BilinearMap& tri) const {
    validate();
    if (!(omega[0] == tri)) throw PreconditionError("FormalDeformation: omega_0 is not the base product");
  }

  bool operator==(const FormalDeformation& o) const {
    return dim == o.dim && order == o.order && pi == o.pi && omega == o.omega;
  }
};

/// Phi_t = sum phi_i t^i with phi_0 = Id, truncated at order N.
struct FormalIsomorphism {
  std::size_t dim = 0;
  int order = 0;
  std::vector<ExactMatrix> phi;

  FormalIsomorphism() = default;
  FormalIsomorphism(std::size_t dim_, int order_) : dim(dim_), order(order_) {
    if (order_ < 0) throw std::invalid_argument("FormalIsomorphism: negative order");
    phi.push_back(ExactMatrix::identity(dim));
    for (int i = 1; i <= order; ++i) phi.emplace_back(dim, dim);
  }

  /// Id + p t^n, truncated at order N.
  static FormalIsomorphism elementary(const ExactMatrix& p, int n, int order) {
    FormalIsomorphism f(p.rows(), order);
    if (n < 1) throw std::invalid_argument("FormalIsomorphism: elementary term must have positive order");
    if (n <= order) f.phi[n] = p;
    return f;
  }

  void validate() const {
    if (phi.size() != static_cast<std::size_t>(order + 1))
      throw PreconditionError("FormalIsomorphism: coefficient count does not match the order");
    for (const auto& m : phi)
      if (m.rows() != dim || m.cols() != dim) throw PreconditionError("FormalIsomorphism: dimension mismatch");
    if (!(phi[0] == ExactMatrix::identity(dim))) throw PreconditionError("FormalIsomorphism: phi_0 must be Id");
  }

  /// Psi with Phi o Psi = Id mod t^{N+1}: psi_n = -sum_{i=1..n} phi_i psi_{n-i}.
  FormalIsomorphism inverse() const {
    validate();
    FormalIsomorphism inv(dim, order);
    for (int n = 1; n <= order; ++n) {
      ExactMatrix acc(dim, dim);
      for (int i = 1; i <= n; ++i) acc += phi[i] * inv.phi[n - i];
      inv.phi[n] = -acc;
    }
    return inv;
  }

  bool operator==(const FormalIsomorphism& o) const { return dim == o.dim && order == o.order && phi == o.phi; }
};

/// (Phi o Psi)_t truncated at the common order.
inline FormalIsomorphism compose(const FormalIsomorphism& a, const FormalIsomorphism& b) {
  if (a.dim != b.dim || a.order != b.order) throw std::invalid_argument("compose: dimension/order mismatch");
  FormalIsomorphism c(a.dim, a.order);
  for (int n = 1; n <= a.order; ++n) {
    ExactMatrix acc(a.dim, a.dim);
    for (int i = 0; i <= n; ++i) acc += a.phi[i] * b.phi[n - i];
    c.phi[n] = acc;
  }
  return c;
}

/// Defect tables of one order: Jacobi-type, Post-1-type and Post-2-type sums.
struct OrderResidual {
  int order = 0;
  Trilinear deformation4{0};
  Trilinear deformation5{0};
  Trilinear deformation6{0};

  bool is_zero() const { return deformation4.is_zero() && deformation5.is_zero() && deformation6.is_zero(); }
};

namespace detail {

inline Trilinear jacobi_convolution(const BilinearMap& outer, const BilinearMap& inner) {
  Trilinear base = Trilinear::nest_left(outer, inner);
  Trilinear t = base;
  t += base.permuted(cyc1);
  t += base.permuted(cyc2);
  return t;
}

// w(x, p(y,z)) - p(w(x,y), z) - p(y, w(x,z))
inline Trilinear derivation_convolution(const BilinearMap& w, const BilinearMap& p) {
  Trilinear t = Trilinear::nest_right(w, p);
  t -= Trilinear::nest_left(p, w);
  t -= Trilinear::nest_right(p, w).permuted(swap01);
  return t;
}

// w_i(w_j(x,y) - w_j(y,x) + p_j(x,y), z) - w_i(x, w_j(y,z)) + w_i(y, w_j(x,z))
inline Trilinear action_convolution(const BilinearMap& wi, const BilinearMap& wj, const BilinearMap& pj) {
  Trilinear l = Trilinear::nest_left(wi, wj);
  Trilinear r = Trilinear::nest_right(wi, wj);
  Trilinear t = l;
  t -= l.permuted(swap01);
  t += Trilinear::nest_left(wi, pj);
  t -= r;
  t += r.permuted(swap01);
  return t;
}

inline OrderResidual residual_at(const FormalDeformation& D, int n) {
  OrderResidual r{n, Trilinear(D.dim), Trilinear(D.dim), Trilinear(D.dim)};
  for (int i = 0; i <= n; ++i) {
    const int j = n - i;
    if (!D.pi[i].is_zero() && !D.pi[j].is_zero()) r.deformation4 += jacobi_convolution(D.pi[i], D.pi[j]);
    if (!D.omega[i].is_zero() && !D.pi[j].is_zero()) r.deformation5 += derivation_convolution(D.omega[i], D.pi[j]);
    if (!D.omega[i].is_zero()) r.deformation6 += action_convolution(D.omega[i], D.omega[j], D.pi[j]);
  }
  return r;
}

}  // namespace detail

/// Coefficients of t^0..t^N in the three post-Lie conditions for (pi_t, omega_t).
inline std::vector<OrderResidual> residuals_by_order(const FormalDeformation& D) {
  D.validate();
  std::vector<OrderResidual> out;
  for (int n = 0; n <= D.order; ++n) out.push_back(detail::residual_at(D, n));
  return out;
}

inline bool is_valid_deformation(const FormalDeformation& D) {
  for (const auto& r : residuals_by_order(D))
    if (!r.is_zero()) return false;
  return true;
}

inline AxiomReport residual_report(const OrderResidual& r) {
  const std::string o = std::to_string(r.order);
  AxiomReport rep = report_defects("deformation4@" + o, r.deformation4);
  rep.merge(report_defects("deformation5@" + o, r.deformation5));
  rep.merge(report_defects("deformation6@" + o, r.deformation6));
  return rep;
}

/// (pi_1, omega_1); rejects deformations whose order-1 residual is nonzero.
inline std::pair<BilinearMap, BilinearMap> infinitesimal(const FormalDeformation& D) {
  D.validate();
  if (D.order < 1) throw std::invalid_argument("infinitesimal: order must be >= 1");
  for (int n = 0; n <= 1; ++n) {
    OrderResidual r = detail::residual_at(D, n);
    if (!r.is_zero()) throw PreconditionError("infinitesimal: residual at order " + std::to_string(n) + " is nonzero",
                                              residual_report(r));
  }
  return {D.pi[1], D.omega[1]};
}

namespace detail {

// (x, y) -> a m(b x, c y)
inline BilinearMap sandwich(const BilinearMap& m, const ExactMatrix& a, const ExactMatrix& b, const ExactMatrix& c) {
  const std::size_t d = m.dim();
  BilinearMap out(d);
  for (std::size_t x = 0; x < d; ++x)
    for (std::size_t y = 0; y < d; ++y) {
      Vec v = a * m(b.column(x), c.column(y));
      for (std::size_t o = 0; o < d; ++o) out.at(x, y, o) = v[o];
    }
  return out;
}

inline std::vector<BilinearMap> conjugate_series(const std::vector<BilinearMap>& m, const FormalIsomorphism& phi,
                                                 const FormalIsomorphism& psi, bool antisymmetric) {
  const int N = phi.order;
  std::vector<BilinearMap> out;
  for (int n = 0; n <= N; ++n) {
    BilinearMap acc(phi.dim);
    for (int a = 0; a <= n; ++a)
      for (int b = 0; a + b <= n; ++b) {
        if (m[b].is_zero()) continue;
        for (int c = 0; a + b + c <= n; ++c) acc = acc + sandwich(m[b], psi.phi[a], phi.phi[c], phi.phi[n - a - b - c]);
      }
    if (antisymmetric) acc.set_tag(Symmetry::antisymmetric);
    out.push_back(std::move(acc));
  }
  return out;
}

}  // namespace detail

/// D-bar with pi-bar_t = Phi^{-1} o pi_t o (Phi x Phi) and likewise for omega.
inline FormalDeformation conjugate(const FormalIsomorphism& phi, const FormalDeformation& D) {
  D.validate();
  phi.validate();
  if (phi.dim != D.dim || phi.order != D.order) throw std::invalid_argument("conjugate: dimension/order mismatch");
  FormalIsomorphism psi = phi.inverse();
  FormalDeformation out;
  out.dim = D.dim;
  out.order = D.order;
  out.pi = detail::conjugate_series(D.pi, phi, psi, true);
  out.omega = detail::conjugate_series(D.omega, phi, psi, false);
  return out;
}

/// Some phi with d(phi) = (pi, omega), or nullopt when the pair is not a coboundary.
inline std::optional<ExactMatrix> solve_coboundary(const BilinearMap& tri, const BilinearMap& pi,
                                                   const BilinearMap& omega) {
  auto x = coboundary_matrix(tri, 1).solve(two_cochain(pi, omega).to_vector());
  if (!x) return std::nullopt;
  return as_endomorphism(CohomologyCochain::from_vector(tri.dim(), 1, *x));
}

/// Class of a 2-cocycle: coordinates in the echelon representative basis and
/// the normal form modulo coboundaries.
struct Obstruction {
  int order = 0;
  Vec class_coordinates;
  CohomologyCochain representative;
};

struct TrivializeStep {
  std::optional<FormalIsomorphism> phi;  // set on success
  std::optional<FormalDeformation> result;
  std::optional<Obstruction> obstruction;  // set on failure
  bool succeeded() const { return phi.has_value(); }
};

namespace detail {

inline void require_valid(const FormalDeformation& D, const char* who) {
  for (const auto& r : residuals_by_order(D))
    if (!r.is_zero())
      throw PreconditionError(std::string(who) + ": deformation residual at order " + std::to_string(r.order) +
                                  " is nonzero",
                              residual_report(r));
}

}  // namespace detail

/// Clears order n of a valid deformation whose orders 1..n-1 vanish: solves
/// d(phi) = -(pi_n, omega_n) and conjugates by Id + phi t^n.
inline TrivializeStep trivialize_step(const BilinearMap& tri, const FormalDeformation& D, int n) {
  D.validate(tri);
  if (n < 1 || n > D.order) throw std::invalid_argument("trivialize_step: order out of range");
  for (int i = 1; i < n; ++i)
    if (!D.pi[i].is_zero() || !D.omega[i].is_zero())
      throw PreconditionError("trivialize_step: order " + std::to_string(i) + " is not cleared");
  detail::require_valid(D, "trivialize_step");
  TrivializeStep step;
  auto phi = solve_coboundary(tri, -D.pi[n], -D.omega[n]);
  if (phi) {
    step.phi = FormalIsomorphism::elementary(*phi, n, D.order);
    step.result = conjugate(*step.phi, D);
    return step;
  }
  Quotient q = post_lie_quotient(tri, 2);
  Vec v = two_cochain(D.pi[n], D.omega[n]).to_vector();
  step.obstruction =
      Obstruction{n, q.coordinates(v), CohomologyCochain::from_vector(tri.dim(), 2, q.boundaries().reduce(v))};
  return step;
}

struct TrivializeResult {
  FormalIsomorphism phi;  // accumulated: result = conjugate(phi, input)
  FormalDeformation result;
  std::optional<Obstruction> obstruction;
  bool trivial() const { return !obstruction.has_value(); }
};

/// Iterates trivialize_step over orders 1..N; stops at the first obstruction.
inline TrivializeResult trivialize(const BilinearMap& tri, const FormalDeformation& D) {
  TrivializeResult r{FormalIsomorphism(D.dim, D.order), D, std::nullopt};
  for (int n = 1; n <= D.order; ++n) {
    TrivializeStep s = trivialize_step(tri, r.result, n);
    if (!s.succeeded()) {
      r.obstruction = s.obstruction;
      return r;
    }
    r.phi = compose(r.phi, *s.phi);
    r.result = std::move(*s.result);
  }
  return r;
}

/// The order-n equations are affine in (pi_n, omega_n) once lower orders are
/// fixed: L u = -q with u the 2-cochain vector of (pi_n, omega_n).
struct OrderSystem {
  ExactMatrix linear;
  Vec constant;
};

namespace detail {

inline Vec flatten(const OrderResidual& r) {
  Vec v;
  for (const Trilinear* t : {&r.deformation4, &r.deformation5, &r.deformation6}) {
    const std::size_t d = t->dim();
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j)
        for (std::size_t k = 0; k < d; ++k) {
          Vec x = t->value(i, j, k);
          v.insert(v.end(), x.begin(), x.end());
        }
  }
  return v;
}

}  // namespace detail

inline OrderSystem order_system(const FormalDeformation& D, int n) {
  D.validate();
  if (n < 1 || n > D.order) throw std::invalid_argument("order_system: order out of range");
  const std::size_t d = D.dim, size = cochain_space_dim(d, 2);
  FormalDeformation fixed = D;
  fixed.pi[n] = BilinearMap(d, Symmetry::antisymmetric);
  fixed.omega[n] = BilinearMap(d);
  OrderSystem sys{ExactMatrix(3 * d * d * d * d, size), detail::flatten(detail::residual_at(fixed, n))};
  FormalDeformation probe(D.base(), n);
  for (std::size_t c = 0; c < size; ++c) {
    MaurerCartanElement e = MaurerCartanElement::from_cochain(CohomologyCochain::from_vector(d, 2, unit_vec(size, c)).body());
    probe.pi[n] = e.pi;
    probe.omega[n] = e.rho;
    sys.linear.set_column(c, detail::flatten(detail::residual_at(probe, n)));
  }
  return sys;
}

/// Random deformation valid to order N: each order is a particular solution
/// of its order system plus a random cocycle. nullopt when some order is
/// obstructed for every attempt.
inline std::optional<FormalDeformation> random_deformation(const BilinearMap& tri, int order, RandomSource& rs,
                                                           int attempts = 8, long range = 1) {
  require_pre_lie(tri, "random_deformation");
  const std::size_t d = tri.dim();
  for (int attempt = 0; attempt < attempts; ++attempt) {
    FormalDeformation D(tri, order);
    bool ok = true;
    for (int n = 1; n <= order && ok; ++n) {
      OrderSystem sys = order_system(D, n);
      Vec rhs = sys.constant;
      for (auto& x : rhs) x = -x;
      auto particular = sys.linear.solve(rhs);
      if (!particular) {
        ok = false;
        break;
      }
      Vec u = *particular;
      for (const auto& z : sys.linear.kernel_basis()) axpy(rs.scalar(range, 0.5), z, u);
      MaurerCartanElement e = MaurerCartanElement::from_cochain(CohomologyCochain::from_vector(d, 2, u).body());
      D.pi[n] = e.pi;
      D.omega[n] = e.rho;
    }
    if (ok) return D;
  }
  return std::nullopt;
}

}  // namespace postlie
