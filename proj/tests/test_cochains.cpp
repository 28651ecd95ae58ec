#include <gtest/gtest.h>

#include "oracles.hpp"
#include "postlie/cochains.hpp"
#include "postlie/corpus.hpp"

using namespace postlie;

namespace {

MultiCochain sign_twisted(const MultiCochain& f, int n, int m) { return Rational((n * m) % 2 ? -1 : 1) * f; }

}  // namespace

TEST(MultiCochain, Shapes) {
  MultiCochain f(3, 2);
  EXPECT_EQ(f.arity(), 3);
  EXPECT_EQ(f.component_size(0), 1u * 1 * 3);  // wedge^0 (x) wedge^3
  EXPECT_EQ(f.component_size(1), 3u * 3 * 3);
  EXPECT_EQ(f.component_size(2), 3u * 3 * 3);
  EXPECT_EQ(f.total_size(), 57u);
  EXPECT_EQ(MultiCochain(2, 1).total_size(), 2u + 8u);
  EXPECT_EQ(MultiCochain(2, 2).component_size(0), 0u);  // wedge^3 of a plane
  EXPECT_THROW(MultiCochain(2, -1), std::invalid_argument);
}

TEST(MultiCochain, EvalComponentExamples) {
  MultiCochain f(2, 1);
  f.set(1, {0}, {1}, {1, 0});  // f_1(e1 ; e2) = e1
  EXPECT_EQ(f.eval_component(1, {0}, {1}), (Vec{1, 0}));
  // blocks are independent: no sign relates (e2 ; e1) to (e1 ; e2)
  EXPECT_EQ(f.eval_component(1, {1}, {0}), (Vec{0, 0}));
  f.set(0, {}, {1, 0}, {2, 3});  // f_0(e2 ^ e1) = 2 e1 + 3 e2
  EXPECT_EQ(f.eval_component(0, {}, {0, 1}), (Vec{-2, -3}));
  EXPECT_EQ(f.eval_component(0, {}, {1, 1}), (Vec{0, 0}));
  MultiCochain g(3, 2);
  EXPECT_TRUE(is_zero(g.eval_component(2, {1, 1}, {0})));
  EXPECT_THROW(f.eval_component(1, {0, 1}, {}), std::invalid_argument);
  EXPECT_THROW(f.eval_component(1, {0}, {2}), std::out_of_range);
  EXPECT_THROW(f.eval_component(2, {0}, {1}), std::out_of_range);
  EXPECT_THROW(f.set(0, {}, {1, 1}, {1, 0}), std::invalid_argument);
}

TEST(MultiCochain, EvalMatchesOracleOnAllTuples) {
  RandomSource rs(3);
  MultiCochain f = rs.cochain(3, 2, 3, 0.8);
  for (int i = 0; i <= 2; ++i)
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        for (int c = 0; c < 3; ++c) {
          std::vector<int> x{a, b, c};
          std::vector<int> l(x.begin(), x.begin() + i), r(x.begin() + i, x.end());
          EXPECT_EQ(f.eval_component(i, l, r), oracle::eval(f, i, l, r));
        }
}

TEST(MultiCochain, VectorRoundTripFollowsBasisOrder) {
  RandomSource rs(4);
  MultiCochain f = rs.cochain(2, 2);
  EXPECT_EQ(MultiCochain::from_vector(2, 2, f.to_vector()), f);
  Vec v = f.to_vector();
  std::size_t p = 0;
  f.for_each_entry([&](int, const std::vector<int>&, const std::vector<int>&, std::size_t, const Rational& c) {
    EXPECT_EQ(c, v[p++]);
  });
  EXPECT_EQ(p, v.size());
}

TEST(CircleProduct, GoldenTwoDimensionalExample) {
  // f_1(e1 ; e2) = e1 and g_1(e2 ; e1) = e2, all other values zero.
  MultiCochain f(2, 1), g(2, 1);
  f.set(1, {0}, {1}, {1, 0});
  g.set(1, {1}, {0}, {0, 1});
  MultiCochain fg = circle_product(f, g);
  EXPECT_EQ(fg, oracle::circle(f, g));
  ASSERT_EQ(fg.degree(), 2);
  // frozen from the filtered-shuffle expansion
  EXPECT_TRUE(std::all_of(fg.component(0).begin(), fg.component(0).end(), [](auto& x) { return x == 0; }));
  EXPECT_TRUE(std::all_of(fg.component(1).begin(), fg.component(1).end(), [](auto& x) { return x == 0; }));
  MultiCochain expect(2, 2);
  expect.set(2, {0, 1}, {0}, {-1, 0});
  EXPECT_EQ(fg, expect);
}

TEST(CircleProduct, MatchesBruteForceOracle) {
  RandomSource rs(7);
  for (int trial = 0; trial < 12; ++trial)
    for (int n = 0; n <= 2; ++n)
      for (int m = 0; m <= 2; ++m) {
        const std::size_t d = (n + m <= 2 && trial % 2) ? 3 : 2;
        MultiCochain f = rs.cochain(d, n, 2, 0.6), g = rs.cochain(d, m, 2, 0.6);
        MultiCochain fg = circle_product(f, g);
        ASSERT_EQ(fg.degree(), n + m);
        ASSERT_EQ(fg.total_size(), MultiCochain(d, n + m).total_size());
        EXPECT_EQ(fg, oracle::circle(f, g)) << "n=" << n << " m=" << m << " d=" << d;
      }
}

TEST(CircleProduct, ZeroAndMismatch) {
  RandomSource rs(8);
  MultiCochain f = rs.cochain(2, 1);
  EXPECT_TRUE(circle_product(f, MultiCochain(2, 2)).is_zero());
  EXPECT_TRUE(circle_product(MultiCochain(2, 0), f).is_zero());
  EXPECT_THROW(circle_product(f, MultiCochain(3, 1)), std::invalid_argument);
}

TEST(GradedBracket, EvenDegreeSelfBracketIsTwiceSquare) {
  RandomSource rs(12);
  for (int deg : {0, 2}) {
    MultiCochain f = rs.cochain(2, deg);
    EXPECT_EQ(graded_bracket(f, f), Rational(2) * circle_product(f, f));
  }
  MultiCochain g = rs.cochain(2, 1);
  EXPECT_TRUE(graded_bracket(g, MultiCochain(2, 1)).is_zero());
}

TEST(GradedBracket, Antisymmetry) {
  RandomSource rs(13);
  for (int trial = 0; trial < 4; ++trial)
    for (int n = 0; n <= 2; ++n)
      for (int m = 0; m <= 2; ++m) {
        const std::size_t d = n + m <= 2 ? 3 : 2;
        MultiCochain f = rs.cochain(d, n), g = rs.cochain(d, m);
        EXPECT_TRUE((graded_bracket(f, g) + sign_twisted(graded_bracket(g, f), n, m)).is_zero());
      }
}

TEST(GradedBracket, Jacobi) {
  RandomSource rs(14);
  for (auto [n, m, k] : {std::array<int, 3>{1, 1, 1}, std::array<int, 3>{1, 1, 2}, std::array<int, 3>{0, 1, 2}})
    for (int trial = 0; trial < 6; ++trial) {
      MultiCochain f = rs.cochain(2, n), g = rs.cochain(2, m), h = rs.cochain(2, k);
      MultiCochain j = sign_twisted(graded_bracket(graded_bracket(f, g), h), n, k);
      j += sign_twisted(graded_bracket(graded_bracket(g, h), f), m, n);
      j += sign_twisted(graded_bracket(graded_bracket(h, f), g), k, m);
      EXPECT_TRUE(j.is_zero()) << n << m << k;
    }
}

TEST(GradedBracket, SelfBracketOfProductDetectsPreLie) {
  for (const auto& a : pre_lie_corpus()) {
    MultiCochain t = embed_product(a.product);
    EXPECT_TRUE(graded_bracket(t, t).is_zero()) << a.name;
  }
  BilinearMap bad(2);
  bad.at(0, 0, 1) = 1;
  bad.at(1, 0, 0) = 1;
  MultiCochain t = embed_product(bad);
  EXPECT_FALSE(graded_bracket(t, t).is_zero());
  RandomSource rs(15);
  for (int trial = 0; trial < 40; ++trial) {
    BilinearMap m = rs.bilinear(2, 1, 0.3);
    MultiCochain e = embed_product(m);
    EXPECT_EQ(graded_bracket(e, e).is_zero(), check_pre_lie(m).holds);
  }
}

TEST(MaurerCartanElement, RoundTrip) {
  RandomSource rs(16);
  MaurerCartanElement e{rs.antisymmetric(3), rs.bilinear(3)};
  MultiCochain c = e.as_cochain();
  MaurerCartanElement back = MaurerCartanElement::from_cochain(c);
  EXPECT_EQ(back.pi, e.pi);
  EXPECT_EQ(back.rho, e.rho);
  EXPECT_EQ(c.eval_component(1, {2}, {0}), e.rho.basis_product(2, 0));
  EXPECT_EQ(c.eval_component(0, {}, {2, 0}), e.pi.basis_product(2, 0));
  EXPECT_THROW(MaurerCartanElement::from_cochain(MultiCochain(3, 2)), std::invalid_argument);
}

TEST(Differential, SquaresToZero) {
  RandomSource rs(17);
  for (const auto& a : pre_lie_corpus()) {
    if (a.product.dim() != 2) continue;
    for (int trial = 0; trial < 20; ++trial) {
      MultiCochain f = rs.cochain(2, 1);
      EXPECT_TRUE(differential(a.product, differential(a.product, f)).is_zero()) << a.name;
    }
  }
  MultiCochain f = rs.cochain(3, 1);
  EXPECT_TRUE(differential(pre_lie_corpus()[6].product, differential(pre_lie_corpus()[6].product, f)).is_zero());
}

TEST(Differential, TrivialCasesAndErrors) {
  RandomSource rs(18);
  MultiCochain f = rs.cochain(2, 1);
  EXPECT_TRUE(differential(BilinearMap(2), f).is_zero());
  EXPECT_TRUE(differential(pre_lie_corpus()[2].product, MultiCochain(2, 1)).is_zero());
  BilinearMap bad(2);
  bad.at(0, 0, 1) = 1;
  bad.at(1, 0, 0) = 1;
  EXPECT_THROW(differential(bad, f), PreconditionError);
}

TEST(McResidual, TrivialExamples) {
  for (const auto& a : pre_lie_corpus()) {
    const std::size_t d = a.product.dim();
    BilinearMap zero_pi(d, Symmetry::antisymmetric);
    EXPECT_TRUE(mc_residual(a.product, {zero_pi, BilinearMap(d)}).is_zero());
    EXPECT_TRUE(mc_residual(a.product, {zero_pi, -a.product}).is_zero()) << a.name;
  }
}

// The residual equals half the self-bracket of (pi, tri + omega); its three
// components are the Jacobi, Post-1 and Post-2 defects on sorted tuples.
TEST(McResidual, ComponentsAreAxiomDefects) {
  RandomSource rs(19);
  auto corpus = pre_lie_corpus();
  for (int trial = 0; trial < 60; ++trial) {
    const auto& base = corpus[trial % corpus.size()].product;
    const int d = static_cast<int>(base.dim());
    MaurerCartanElement pert{rs.antisymmetric(d, 1, 0.4), rs.bilinear(d, 1, 0.4)};
    MultiCochain r = mc_residual(base, pert);
    BilinearMap rho = base + pert.rho;
    Trilinear jac = detail::jacobi_defect(pert.pi), p1 = detail::post1_defect(pert.pi, rho),
              p2 = detail::post2_defect(pert.pi, rho);
    for (int x = 0; x < d; ++x)
      for (int y = 0; y < d; ++y)
        for (int z = 0; z < d; ++z) {
          if (x < y && y < z) EXPECT_EQ(r.eval_component(0, {}, {x, y, z}), jac.value(x, y, z));
          if (y < z) EXPECT_EQ(r.eval_component(1, {x}, {y, z}), Rational(-1) * p1.value(x, y, z));
          if (x < y) EXPECT_EQ(r.eval_component(2, {x, y}, {z}), p2.value(x, y, z));
        }
    EXPECT_EQ(r.is_zero(), check_post_lie(pert.pi, rho).holds);
  }
}

TEST(McResidual, RejectsNonPreLieBase) {
  BilinearMap bad(2);
  bad.at(0, 0, 1) = 1;
  bad.at(1, 0, 0) = 1;
  EXPECT_THROW(mc_residual(bad, {BilinearMap(2, Symmetry::antisymmetric), BilinearMap(2)}), PreconditionError);
}
