#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "postlie/core/multi_index.hpp"
#include "postlie/core/rational.hpp"

namespace postlie {

/// One-line notation, 1-indexed: perm[p - 1] = sigma(p).
using Permutation = std::vector<int>;

namespace detail {

// Lexicographic successor of a strictly increasing tuple drawn from [lo, lo + n).
inline bool next_combination(std::vector<int>& c, int n, int lo = 0) {
  const int k = static_cast<int>(c.size());
  for (int pos = k - 1; pos >= 0; --pos) {
    if (c[pos] < lo + n - k + pos) {
      ++c[pos];
      for (int q = pos + 1; q < k; ++q) c[q] = c[q - 1] + 1;
      return true;
    }
  }
  return false;
}

inline void multi_shuffle_rec(std::span<const int> parts, std::vector<int>& remaining,
                              Permutation& prefix, std::vector<Permutation>& out) {
  if (parts.empty()) {
    out.push_back(prefix);
    return;
  }
  const int k = parts.front();
  const int n = static_cast<int>(remaining.size());
  std::vector<int> pick(k);
  std::iota(pick.begin(), pick.end(), 0);
  do {
    std::vector<int> rest;
    rest.reserve(n - k);
    std::size_t q = 0;
    for (int p = 0; p < n; ++p) {
      if (q < pick.size() && pick[q] == p) {
        prefix.push_back(remaining[p]);
        ++q;
      } else {
        rest.push_back(remaining[p]);
      }
    }
    multi_shuffle_rec(parts.subspan(1), rest, prefix, out);
    prefix.resize(prefix.size() - k);
  } while (detail::next_combination(pick, n));
}

}  // namespace detail

/// Strictly increasing k-subsets of {0..n-1} in lexicographic order.
inline std::vector<std::vector<int>> combinations(int n, int k) {
  std::vector<std::vector<int>> out;
  if (k < 0 || k > n) return out;
  std::vector<int> c(k);
  std::iota(c.begin(), c.end(), 0);
  do {
    out.push_back(c);
  } while (detail::next_combination(c, n));
  return out;
}

/// (i_1,...,i_k)-shuffles of {1..n}, n = sum of parts: sigma increasing on each
/// consecutive block of positions. Enumerated by choosing each block's values.
inline std::vector<Permutation> multi_shuffles(std::span<const int> parts) {
  int n = 0;
  for (int p : parts) {
    if (p < 0) throw std::invalid_argument("shuffle block sizes must be nonnegative");
    n += p;
  }
  std::vector<int> values(n);
  std::iota(values.begin(), values.end(), 1);
  std::vector<Permutation> out;
  Permutation prefix;
  prefix.reserve(n);
  detail::multi_shuffle_rec(parts, values, prefix, out);
  return out;
}

inline std::vector<Permutation> multi_shuffles(std::initializer_list<int> parts) {
  std::vector<int> v(parts);
  return multi_shuffles(std::span<const int>(v));
}

/// (i,j)-shuffles; only the identity when i = 0 or j = 0.
inline std::vector<Permutation> shuffles(int i, int j) {
  const int parts[2] = {i, j};
  return multi_shuffles(std::span<const int>(parts, 2));
}

/// Signature of a permutation in one-line notation (any consistent indexing base).
inline int perm_sign(std::span<const int> perm) {
  const std::size_t n = perm.size();
  int base = n ? *std::min_element(perm.begin(), perm.end()) : 0;
  std::vector<char> seen(n, 0);
  int sign = 1;
  for (std::size_t s = 0; s < n; ++s) {
    if (seen[s]) continue;
    std::size_t len = 0;
    for (std::size_t p = s; !seen[p]; p = static_cast<std::size_t>(perm[p] - base)) {
      if (perm[p] - base < 0 || static_cast<std::size_t>(perm[p] - base) >= n)
        throw std::invalid_argument("not a permutation");
      seen[p] = 1;
      ++len;
    }
    if (len % 2 == 0) sign = -sign;
  }
  return sign;
}

/// Sorts a tuple in place; returns the sign of the sorting permutation, or 0
/// when an entry repeats.
inline int sort_with_sign(std::vector<int>& v) {
  int sign = 1;
  for (std::size_t i = 1; i < v.size(); ++i) {
    for (std::size_t j = i; j > 0 && v[j - 1] >= v[j]; --j) {
      if (v[j - 1] == v[j]) return 0;
      std::swap(v[j - 1], v[j]);
      sign = -sign;
    }
  }
  return sign;
}

inline mpz_class binomial(long n, long k) {
  if (k < 0 || n < 0 || k > n) return 0;
  mpz_class r;
  mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
  return r;
}

/// prod_i binom(n_i, l_i); zero as soon as some l_i exceeds n_i.
inline Rational multi_binom(const MultiIndex& n, const MultiIndex& l) {
  if (n.size() != l.size()) throw std::invalid_argument("multi-index length mismatch");
  mpz_class r = 1;
  for (std::size_t i = 0; i < n.size(); ++i) {
    if (l[i] > n[i]) return 0;
    r *= binomial(n[i], l[i]);
  }
  return Rational(r);
}

}  // namespace postlie
