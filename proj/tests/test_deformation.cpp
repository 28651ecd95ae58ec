#include <gtest/gtest.h>

#include "oracles.hpp"
#include "postlie/corpus.hpp"
#include "postlie/deformation.hpp"

using namespace postlie;

namespace {

const BilinearMap& named(const std::string& name) {
  static const auto corpus = pre_lie_corpus();
  for (const auto& a : corpus)
    if (a.name == name) return a.product;
  throw std::out_of_range(name);
}

FormalIsomorphism random_isomorphism(RandomSource& rs, std::size_t d, int order) {
  FormalIsomorphism f(d, order);
  for (int i = 1; i <= order; ++i) f.phi[i] = rs.matrix(d, d, 1, 0.4);
  return f;
}

// Random order-1 deformation (pi t, tri + omega t): half the time a cocycle.
FormalDeformation order_one(RandomSource& rs, const BilinearMap& tri, bool cocycle) {
  FormalDeformation D(tri, 1);
  if (cocycle) {
    Quotient q = post_lie_quotient(tri, 2);
    Vec u = zero_vec(q.dim_cochains());
    for (const auto& r : q.representatives()) axpy(rs.scalar(2, 0.7), r, u);
    for (const auto& b : q.boundaries().basis()) axpy(rs.scalar(2, 0.7), b, u);
    MaurerCartanElement e = MaurerCartanElement::from_cochain(CohomologyCochain::from_vector(tri.dim(), 2, u).body());
    D.pi[1] = e.pi;
    D.omega[1] = e.rho;
  } else {
    D.pi[1] = rs.antisymmetric(tri.dim(), 2, 0.3);
    D.omega[1] = rs.bilinear(tri.dim(), 2, 0.3);
  }
  return D;
}

// The undeformed pair with all orders 1..N zero.
bool undeformed(const FormalDeformation& D) {
  for (int i = 1; i <= D.order; ++i)
    if (!D.pi[i].is_zero() || !D.omega[i].is_zero()) return false;
  return true;
}

}  // namespace

TEST(Residuals, UndeformedVanishes) {
  for (const auto& a : pre_lie_corpus()) {
    FormalDeformation D(a.product, 4);
    auto res = residuals_by_order(D);
    ASSERT_EQ(res.size(), 5u);
    for (const auto& r : res) EXPECT_TRUE(r.is_zero()) << a.name;
    auto [p, w] = infinitesimal(D);
    EXPECT_TRUE(p.is_zero());
    EXPECT_TRUE(w.is_zero());
  }
}

TEST(Residuals, OrderZeroIsLeftSymmetryOfBase) {
  BilinearMap bad(2);
  bad.at(0, 0, 1) = 1;
  bad.at(1, 0, 0) = 1;
  FormalDeformation D(bad, 1);
  auto res = residuals_by_order(D);
  EXPECT_TRUE(res[0].deformation4.is_zero());
  EXPECT_TRUE(res[0].deformation5.is_zero());
  EXPECT_FALSE(res[0].deformation6.is_zero());
  EXPECT_THROW(infinitesimal(D), PreconditionError);
}

TEST(Residuals, OrderTwoJacobiTermIsJacobiOfPiOne) {
  RandomSource rs(51);
  int holds = 0;
  for (int trial = 0; trial < 60; ++trial) {
    FormalDeformation D(BilinearMap(3), 2);
    D.pi[1] = rs.antisymmetric(3, 1, 0.4);
    Trilinear jac = detail::jacobi_defect(D.pi[1]);
    const OrderResidual r = residuals_by_order(D)[2];
    EXPECT_TRUE((jac -= r.deformation4).is_zero());
    EXPECT_EQ(r.deformation4.is_zero(), check_jacobi(D.pi[1]).holds);
    holds += check_jacobi(D.pi[1]).holds;
  }
  EXPECT_GT(holds, 0);
}

// Order 1: the Post-1 sum is the first defect family, the Post-2 sum is minus the second.
TEST(Residuals, OrderOneMatchesTwoCocycleResidual) {
  RandomSource rs(52);
  std::vector<BilinearMap> plane;
  for (const auto& a : pre_lie_corpus())
    if (a.product.dim() == 2) plane.push_back(a.product);
  int positives = 0, samples = 0;
  for (int t = 0; t < 500; ++t) {
    const auto& tri = plane[t % plane.size()];
    FormalDeformation D = order_one(rs, tri, t % 2 == 0);
    const OrderResidual r = residuals_by_order(D)[1];
    auto [first, second] = two_cocycle_residual(tri, D.pi[1], D.omega[1]);
    Trilinear sum = r.deformation6;
    sum += second;
    Trilinear diff = r.deformation5;
    diff -= first;
    EXPECT_TRUE(r.deformation4.is_zero());
    EXPECT_TRUE(diff.is_zero());
    EXPECT_TRUE(sum.is_zero());
    EXPECT_EQ(r.is_zero(), first.is_zero() && second.is_zero());
    positives += r.is_zero();
    ++samples;
  }
  EXPECT_EQ(samples, 500);
  EXPECT_GT(positives, 100);
}

TEST(Residuals, InvariantViolationsAreRejected) {
  FormalDeformation D(named("dual_numbers"), 2);
  D.pi[0].set(0, 1, 0, 1);
  EXPECT_THROW(residuals_by_order(D), PreconditionError);
  FormalDeformation E(named("dual_numbers"), 2);
  EXPECT_THROW(E.validate(named("idempotents_dim2")), PreconditionError);
  E.omega.pop_back();
  EXPECT_THROW(E.validate(), PreconditionError);
}

TEST(FormalIsomorphism, TruncatedInverse) {
  RandomSource rs(53);
  ExactMatrix p = rs.matrix(2, 2);
  FormalIsomorphism f = FormalIsomorphism::elementary(p, 1, 4);
  FormalIsomorphism inv = f.inverse();
  // (Id + p t)^{-1} = Id - p t + p^2 t^2 - p^3 t^3 + p^4 t^4
  EXPECT_EQ(inv.phi[1], -p);
  EXPECT_EQ(inv.phi[2], p * p);
  EXPECT_EQ(inv.phi[3], -(p * p * p));
  EXPECT_EQ(inv.phi[4], p * p * p * p);
  for (int trial = 0; trial < 20; ++trial) {
    FormalIsomorphism g = random_isomorphism(rs, 3, 4);
    FormalIsomorphism id(3, 4);
    EXPECT_EQ(compose(g, g.inverse()), id);
    EXPECT_EQ(compose(g.inverse(), g), id);
  }
  FormalIsomorphism bad(2, 1);
  bad.phi[0](0, 0) = 2;
  EXPECT_THROW(bad.inverse(), PreconditionError);
}

TEST(Conjugate, IdentityAndComposition) {
  RandomSource rs(54);
  const auto& tri = named("upper_triangular");
  for (int trial = 0; trial < 5; ++trial) {
    auto D = random_deformation(tri, 3, rs);
    ASSERT_TRUE(D.has_value());
    EXPECT_EQ(conjugate(FormalIsomorphism(3, 3), *D), *D);
    FormalIsomorphism f = random_isomorphism(rs, 3, 3), g = random_isomorphism(rs, 3, 3);
    EXPECT_EQ(conjugate(g, conjugate(f, *D)), conjugate(compose(f, g), *D));
    EXPECT_EQ(conjugate(f.inverse(), conjugate(f, *D)), *D);
  }
  EXPECT_THROW(conjugate(FormalIsomorphism(3, 2), FormalDeformation(tri, 3)), std::invalid_argument);
}

TEST(Conjugate, PreservesValidity) {
  RandomSource rs(55);
  for (const auto& a : pre_lie_corpus()) {
    auto D = random_deformation(a.product, 3, rs);
    if (!D) continue;
    ASSERT_TRUE(is_valid_deformation(*D)) << a.name;
    FormalDeformation E = conjugate(random_isomorphism(rs, a.product.dim(), 3), *D);
    EXPECT_TRUE(is_valid_deformation(E)) << a.name;
    EXPECT_EQ(E.omega[0], a.product);
  }
}

// Expanding (Id - p t)(tri(x + p x t, y + p y t)) to order 1 by hand.
TEST(Conjugate, OrderOneEffectIsCoboundary) {
  RandomSource rs(56);
  for (const auto& a : pre_lie_corpus()) {
    const std::size_t d = a.product.dim();
    ExactMatrix p = rs.matrix(d, d);
    FormalDeformation E = conjugate(FormalIsomorphism::elementary(p, 1, 2), FormalDeformation(a.product, 2));
    EXPECT_TRUE(E.pi[1].is_zero());
    EXPECT_EQ(two_cochain(E.pi[1], E.omega[1]), coboundary_apply(a.product, one_cochain(p))) << a.name;
    for (std::size_t x = 0; x < d; ++x)
      for (std::size_t y = 0; y < d; ++y) {
        Vec hand = a.product(p.column(x), unit_vec(d, y)) + a.product(unit_vec(d, x), p.column(y)) -
                   p * a.product.basis_product(x, y);
        EXPECT_EQ(E.omega[1].basis_product(x, y), hand);
      }
    auto D = random_deformation(a.product, 2, rs);
    if (!D) continue;
    FormalDeformation F = conjugate(FormalIsomorphism::elementary(p, 1, 2), *D);
    EXPECT_EQ(F.pi[1], D->pi[1]);
    EXPECT_EQ(two_cochain(F.pi[1], F.omega[1]),
              two_cochain(D->pi[1], D->omega[1]) + coboundary_apply(a.product, one_cochain(p)));
  }
}

TEST(Equivalence, InfinitesimalsDifferByCoboundary) {
  RandomSource rs(57);
  auto corpus = pre_lie_corpus();
  int pairs = 0;
  for (int t = 0; pairs < 100; ++t) {
    const auto& tri = corpus[t % corpus.size()].product;
    auto D = random_deformation(tri, 2, rs);
    if (!D) continue;
    FormalIsomorphism f = random_isomorphism(rs, tri.dim(), 2);
    auto [p0, w0] = infinitesimal(*D);
    auto [p1, w1] = infinitesimal(conjugate(f, *D));
    auto phi = solve_coboundary(tri, p1 - p0, w1 - w0);
    ASSERT_TRUE(phi.has_value());
    EXPECT_EQ(coboundary_apply(tri, one_cochain(*phi)), two_cochain(p1 - p0, w1 - w0));
    ++pairs;
  }
}

TEST(Trivialize, SolvableStepClearsOrderAndKeepsLowerOrders) {
  RandomSource rs(58);
  for (const auto& a : pre_lie_corpus()) {
    const std::size_t d = a.product.dim();
    ExactMatrix p = rs.matrix(d, d);
    FormalDeformation D = conjugate(FormalIsomorphism::elementary(p, 2, 3), FormalDeformation(a.product, 3));
    ASSERT_TRUE(D.pi[1].is_zero() && D.omega[1].is_zero());
    TrivializeStep s = trivialize_step(a.product, D, 2);
    ASSERT_TRUE(s.succeeded()) << a.name;
    EXPECT_TRUE(s.result->pi[2].is_zero());
    EXPECT_TRUE(s.result->omega[2].is_zero());
    EXPECT_EQ(s.result->omega[1], D.omega[1]);
    EXPECT_EQ(s.result->omega[0], D.omega[0]);
    EXPECT_TRUE(is_valid_deformation(*s.result));
  }
}

TEST(Trivialize, ZeroProductObstructsEveryNonzeroCocycle) {
  BilinearMap lie(3, Symmetry::antisymmetric);  // cross product
  lie.set(0, 1, 2, 1);
  lie.set(1, 2, 0, 1);
  lie.set(2, 0, 1, 1);
  FormalDeformation D(BilinearMap(3), 3);
  D.pi[1] = lie;
  ASSERT_TRUE(is_valid_deformation(D));
  TrivializeStep s = trivialize_step(BilinearMap(3), D, 1);
  ASSERT_FALSE(s.succeeded());
  EXPECT_EQ(s.obstruction->order, 1);
  EXPECT_FALSE(is_zero(s.obstruction->class_coordinates));
  // nothing bounds, so the normal form is the cocycle itself
  EXPECT_EQ(s.obstruction->representative, two_cochain(lie, BilinearMap(3)));
  TrivializeResult r = trivialize(BilinearMap(3), D);
  EXPECT_FALSE(r.trivial());
}

TEST(Trivialize, PreconditionsAreEnforced) {
  const auto& tri = named("idempotents_dim2");
  FormalDeformation D(tri, 2);
  D.omega[1].at(0, 0, 1) = 1;  // not a cocycle
  EXPECT_THROW(trivialize_step(tri, D, 1), PreconditionError);
  FormalDeformation E(tri, 2);
  E.omega[1].at(0, 0, 0) = 1;
  EXPECT_THROW(trivialize_step(tri, E, 2), PreconditionError);  // order 1 not cleared
  EXPECT_THROW(trivialize_step(tri, E, 3), std::invalid_argument);
}

// H^2 = 0 for products of idempotent lines; every sampled deformation, also
// after a random change of coordinates, reduces to the undeformed pair.
TEST(Trivialize, RigidAlgebraReducesToUndeformed) {
  RandomSource rs(59);
  for (const char* name : {"idempotents_dim2", "idempotents_dim3"}) {
    const auto& tri = named(name);
    ASSERT_EQ(cohomology_basis(tri, 2).betti, 0u);
    for (int trial = 0; trial < 6; ++trial) {
      auto D = random_deformation(tri, 4, rs);
      ASSERT_TRUE(D.has_value());
      FormalDeformation E = conjugate(random_isomorphism(rs, tri.dim(), 4), *D);
      for (const auto& input : {*D, E}) {
        TrivializeResult r = trivialize(tri, input);
        ASSERT_TRUE(r.trivial()) << name;
        EXPECT_TRUE(undeformed(r.result)) << name;
        EXPECT_EQ(conjugate(r.phi, input), r.result);
      }
    }
  }
}

TEST(RandomDeformation, ValidThroughRequestedOrder) {
  RandomSource rs(60);
  int built = 0;
  for (const auto& a : pre_lie_corpus()) {
    auto D = random_deformation(a.product, 3, rs);
    if (!D) continue;
    ++built;
    EXPECT_TRUE(is_valid_deformation(*D)) << a.name;
    EXPECT_EQ(D->omega[0], a.product);
  }
  EXPECT_GE(built, 6);  // the remaining ones hit order-2 or order-3 obstructions
}
