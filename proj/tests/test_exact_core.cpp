#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "oracles.hpp"
#include "postlie/core/combinatorics.hpp"
#include "postlie/core/matrix.hpp"
#include "postlie/core/parallel.hpp"
#include "postlie/corpus.hpp"

using namespace postlie;

namespace {

std::set<Permutation> as_set(const std::vector<Permutation>& v) { return {v.begin(), v.end()}; }

}  // namespace

TEST(Rational, CanonicalStringForm) {
  EXPECT_EQ(to_string(make_rational(6, -4)), "-3/2");
  EXPECT_EQ(to_string(Rational(5)), "5/1");
  EXPECT_EQ(to_string(Rational(0)), "0/1");
  EXPECT_EQ(parse_rational("4/6"), make_rational(2, 3));
  EXPECT_EQ(parse_rational("-7"), Rational(-7));
  EXPECT_THROW(parse_rational("1/0"), std::invalid_argument);
  EXPECT_THROW(parse_rational("1/-2"), std::invalid_argument);
  EXPECT_THROW(parse_rational("x"), std::invalid_argument);
  EXPECT_THROW(parse_rational("1.5"), std::invalid_argument);
  EXPECT_THROW(make_rational(1, 0), std::invalid_argument);
}

TEST(Rational, ArithmeticIsExact) {
  Rational third = make_rational(1, 3);
  EXPECT_EQ(third + third + third, Rational(1));
  EXPECT_EQ(to_string(make_rational(1, 3) - make_rational(1, 2)), "-1/6");
}

TEST(MultiIndex, SubtractionNeverWraps) {
  MultiIndex a{2, 1}, b{1, 2};
  EXPECT_FALSE(a.checked_sub(b).has_value());
  EXPECT_EQ(*a.checked_sub(MultiIndex{1, 0}), (MultiIndex{1, 1}));
  EXPECT_FALSE(a.shifted({-3, 0}).has_value());
  EXPECT_EQ(*a.shifted({-1, 0}), (MultiIndex{1, 1}));
  EXPECT_THROW(MultiIndex({-1, 0}), std::invalid_argument);
  EXPECT_THROW((void)(a + MultiIndex{1}), std::invalid_argument);
  EXPECT_EQ(multi_indices_below(MultiIndex{1, 2}).size(), 6u);
  EXPECT_EQ(multi_indices_up_to(3, 2).size(), 27u);
}

TEST(Shuffles, Examples) {
  auto s03 = shuffles(0, 3);
  ASSERT_EQ(s03.size(), 1u);
  EXPECT_EQ(s03[0], (Permutation{1, 2, 3}));
  EXPECT_EQ(as_set(shuffles(1, 1)), (std::set<Permutation>{{1, 2}, {2, 1}}));
  EXPECT_EQ(shuffles(2, 2).size(), 6u);
  EXPECT_EQ(as_set(shuffles(2, 2)), as_set(oracle::filtered_shuffles({2, 2})));
}

TEST(Shuffles, MatchFilteredSymmetricGroupAndBinomialCount) {
  for (int i = 0; i <= 4; ++i)
    for (int j = 0; j <= 4; ++j) {
      auto s = shuffles(i, j);
      EXPECT_EQ(mpz_class(s.size()), binomial(i + j, i)) << i << "," << j;
      EXPECT_EQ(as_set(s), as_set(oracle::filtered_shuffles({i, j}))) << i << "," << j;
      EXPECT_EQ(as_set(s).size(), s.size());
    }
}

TEST(MultiShuffles, Examples) {
  EXPECT_EQ(as_set(multi_shuffles({1, 1, 1})), as_set(oracle::all_permutations(3)));
  EXPECT_EQ(as_set(multi_shuffles({2, 0, 1})), as_set(shuffles(2, 1)));
  EXPECT_EQ(multi_shuffles({1, 2, 1}).size(), 12u);
  EXPECT_EQ(as_set(multi_shuffles({1, 2, 1})), as_set(oracle::filtered_shuffles({1, 2, 1})));
  EXPECT_THROW(multi_shuffles({1, -1}), std::invalid_argument);
}

TEST(MultiShuffles, MultinomialCounts) {
  for (int a = 0; a <= 3; ++a)
    for (int b = 0; b <= 3; ++b)
      for (int c = 0; c <= 2; ++c) {
        auto s = multi_shuffles({a, b, c});
        mpz_class expect = binomial(a + b + c, a) * binomial(b + c, b);
        EXPECT_EQ(mpz_class(s.size()), expect);
        EXPECT_EQ(as_set(s), as_set(oracle::filtered_shuffles({a, b, c})));
      }
}

TEST(PermSign, Examples) {
  EXPECT_EQ(perm_sign(Permutation{1, 2, 3, 4}), 1);
  EXPECT_EQ(perm_sign(Permutation{2, 1, 3}), -1);
  EXPECT_EQ(perm_sign(Permutation{2, 3, 1}), 1);
  EXPECT_EQ(perm_sign(Permutation{0, 2, 1}), -1);  // 0-based input
  for (auto& p : oracle::all_permutations(5)) EXPECT_EQ(perm_sign(p), oracle::inversion_sign(p));
}

TEST(PermSign, Multiplicative) {
  auto all = oracle::all_permutations(4);
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<std::size_t> pick(0, all.size() - 1);
  for (int trial = 0; trial < 200; ++trial) {
    const auto& s = all[pick(rng)];
    const auto& t = all[pick(rng)];
    Permutation st(4);
    for (int p = 0; p < 4; ++p) st[p] = s[t[p] - 1];
    EXPECT_EQ(perm_sign(st), perm_sign(s) * perm_sign(t));
  }
}

TEST(SortWithSign, RepeatsAndOrder) {
  std::vector<int> v{3, 1, 2};
  EXPECT_EQ(sort_with_sign(v), 1);
  EXPECT_EQ(v, (std::vector<int>{1, 2, 3}));
  std::vector<int> w{2, 1};
  EXPECT_EQ(sort_with_sign(w), -1);
  std::vector<int> r{1, 3, 1};
  EXPECT_EQ(sort_with_sign(r), 0);
}

TEST(MultiBinom, Examples) {
  EXPECT_EQ(multi_binom(MultiIndex{2, 1}, MultiIndex{1, 0}), Rational(2));
  EXPECT_EQ(multi_binom(MultiIndex{0, 0}, MultiIndex{0, 0}), Rational(1));
  EXPECT_EQ(multi_binom(MultiIndex{1, 0}, MultiIndex{0, 2}), Rational(0));
  EXPECT_THROW(multi_binom(MultiIndex{1}, MultiIndex{1, 0}), std::invalid_argument);
}

TEST(MultiBinom, Vandermonde) {
  for (const auto& n : multi_indices_up_to(2, 3))
    for (const auto& m : multi_indices_up_to(2, 3))
      for (const auto& k : multi_indices_up_to(2, 3)) {
        Rational sum = 0;
        for (const auto& l : multi_indices_below(k)) sum += multi_binom(n, l) * multi_binom(m, *k.checked_sub(l));
        EXPECT_EQ(sum, multi_binom(n + m, k));
      }
}

TEST(ExactMatrix, KernelExamples) {
  EXPECT_EQ(ExactMatrix(2, 2).kernel_basis().size(), 2u);
  EXPECT_TRUE(ExactMatrix::identity(3).kernel_basis().empty());
  ExactMatrix m = ExactMatrix::from_rows(2, {{1, 1}, {2, 2}});
  auto k = m.kernel_basis();
  ASSERT_EQ(k.size(), 1u);
  EXPECT_EQ(k[0][0], -k[0][1]);
  EXPECT_NE(k[0][0], 0);
}

TEST(ExactMatrix, RandomKernelRankNullity) {
  RandomSource rs(5);
  for (int trial = 0; trial < 60; ++trial) {
    std::size_t rows = rs.integer(1, 7), cols = rs.integer(1, 7);
    ExactMatrix m = rs.matrix(rows, cols, 3, 0.5);
    if (trial % 3 == 0 && rows > 1)  // force dependent rows
      for (std::size_t c = 0; c < cols; ++c) m(rows - 1, c) = 2 * m(0, c) - m(rows / 2, c);
    auto k = m.kernel_basis();
    EXPECT_EQ(m.rank() + k.size(), cols);
    for (auto& v : k) EXPECT_TRUE(is_zero(m * v));
    EXPECT_EQ(span_rank(cols, k), k.size());
    EXPECT_EQ(m.rank(), m.transpose().rank());
  }
}

TEST(ExactMatrix, RrefIsReducedAndSolveIsExact) {
  RandomSource rs(9);
  for (int trial = 0; trial < 40; ++trial) {
    ExactMatrix m = rs.matrix(4, 5, 4, 0.7);
    auto e = m.rref();
    for (std::size_t r = 0; r < e.pivots.size(); ++r) {
      EXPECT_EQ(e.reduced(r, e.pivots[r]), 1);
      for (std::size_t q = 0; q < e.pivots.size(); ++q)
        if (q != r) EXPECT_EQ(e.reduced(q, e.pivots[r]), 0);
    }
    Vec x = zero_vec(5);
    for (auto& v : x) v = make_rational(rs.integer(-5, 5), rs.integer(1, 4));
    Vec b = m * x;
    auto sol = m.solve(b);
    ASSERT_TRUE(sol.has_value());
    EXPECT_EQ(m * *sol, b);
  }
  ExactMatrix z = ExactMatrix::from_rows(2, {{1, 0}, {0, 0}});
  EXPECT_FALSE(z.solve({0, 1}).has_value());
}

TEST(SubspaceReducer, NormalFormsAreCanonical) {
  SubspaceReducer w(3, {{1, 1, 0}, {2, 2, 0}});
  EXPECT_EQ(w.dimension(), 1u);
  EXPECT_TRUE(w.contains({3, 3, 0}));
  EXPECT_FALSE(w.contains({1, 0, 0}));
  EXPECT_EQ(w.reduce({1, 0, 5}), w.reduce({0, -1, 5}));
}

TEST(Parallel, DeterministicOrdering) {
  auto f = [](std::size_t i) { return static_cast<int>(i * i); };
  EXPECT_EQ(parallel_map(50, 1, f), parallel_map(50, 4, f));
  EXPECT_THROW(parallel_map(10, 3, [](std::size_t i) -> int {
                 if (i == 7) throw std::runtime_error("boom");
                 return 0;
               }),
               std::runtime_error);
}
