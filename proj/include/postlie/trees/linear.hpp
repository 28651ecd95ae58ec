#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "postlie/core/combinatorics.hpp"
#include "postlie/core/rational.hpp"
#include "postlie/trees/tree.hpp"

namespace postlie {

template <class T>
struct IdentityLess;

template <>
struct IdentityLess<DecoratedTree> {
  bool operator()(const DecoratedTree& a, const DecoratedTree& b) const {
    return std::less<const void*>()(a.handle(), b.handle());
  }
};

/// Finite formal sum with exact coefficients; zero coefficients are never stored.
/// Storage is ordered by identity; terms() gives the canonical order.
template <class T>
class Combination {
 public:
  using Map = std::map<T, Rational, IdentityLess<T>>;

  Combination() = default;
  explicit Combination(const T& t, const Rational& c = 1) { add(t, c); }

  void add(const T& t, const Rational& c) {
    if (c == 0) return;
    auto [it, inserted] = terms_.try_emplace(t, c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0) terms_.erase(it);
    }
  }

  Combination& operator+=(const Combination& o) {
    for (const auto& [t, c] : o.terms_) add(t, c);
    return *this;
  }
  Combination& operator-=(const Combination& o) {
    for (const auto& [t, c] : o.terms_) subtract(t, c);
    return *this;
  }
  void subtract(const T& t, const Rational& c) {
    if (c == 0) return;
    auto [it, inserted] = terms_.try_emplace(t);
    if (inserted) {
      mpq_neg(it->second.get_mpq_t(), c.get_mpq_t());
    } else {
      it->second -= c;
      if (it->second == 0) terms_.erase(it);
    }
  }
  void add_scaled(const Combination& o, const Rational& s) {
    if (s == 0) return;
    if (s == 1) {
      *this += o;
    } else if (s == -1) {
      *this -= o;
    } else {
      Rational p;
      for (const auto& [t, c] : o.terms_) {
        mpq_mul(p.get_mpq_t(), s.get_mpq_t(), c.get_mpq_t());
        add(t, p);
      }
    }
  }
  Combination scaled(const Rational& s) const {
    Combination r;
    r.add_scaled(*this, s);
    return r;
  }
  friend Combination operator+(Combination a, const Combination& b) { return a += b; }
  friend Combination operator-(Combination a, const Combination& b) { return a -= b; }
  Combination operator-() const { return scaled(-1); }

  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }
  const Map& map() const { return terms_; }

  Rational coefficient(const T& t) const {
    auto it = terms_.find(t);
    return it == terms_.end() ? Rational(0) : it->second;
  }

  std::vector<std::pair<T, Rational>> terms() const {
    std::vector<std::pair<T, Rational>> out(terms_.begin(), terms_.end());
    std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return x.first.key() < y.first.key(); });
    return out;
  }

  bool operator==(const Combination& o) const { return terms_ == o.terms_; }

 private:
  Map terms_;
};

using TreeSum = Combination<DecoratedTree>;

/// Generator of V: a planted tree I_a(tau) or a coordinate monomial X_i.
class BasisElement {
 public:
  static BasisElement planted(const MultiIndex& a, const DecoratedTree& tau) {
    if (a.size() != tau.length()) throw std::invalid_argument("decoration lengths differ");
    BasisElement b;
    b.length_ = tau.length();
    b.tree_ = tau.handle();
    b.edge_ = a;
    return b;
  }
  static BasisElement poly(std::size_t i, std::size_t length) {
    if (i >= length) throw std::out_of_range("coordinate index outside 0..d");
    BasisElement b;
    b.coord_ = i;
    b.length_ = length;
    return b;
  }

  bool is_planted() const { return tree_ != nullptr; }
  bool is_poly() const { return tree_ == nullptr; }
  std::size_t length() const { return length_; }
  const MultiIndex& edge() const {
    require_planted();
    return edge_;
  }
  DecoratedTree tree() const { return DecoratedTree::from_node(tree_handle()); }
  const detail::TreeNode* tree_handle() const {
    require_planted();
    return tree_;
  }
  std::size_t coordinate() const {
    if (is_planted()) throw std::logic_error("planted element has no coordinate");
    return coord_;
  }

  std::string key() const {
    if (is_poly()) return "X" + std::to_string(coord_) + "/" + std::to_string(length_);
    return "I" + edge_.str() + tree_->key;
  }

  std::size_t edge_count() const { return is_poly() ? 0 : 1 + tree_->edges; }

  bool operator==(const BasisElement& o) const {
    return tree_ == o.tree_ && coord_ == o.coord_ && length_ == o.length_ && edge_ == o.edge_;
  }
  bool identity_less(const BasisElement& o) const {
    if (tree_ != o.tree_) return std::less<const void*>()(tree_, o.tree_);
    if (coord_ != o.coord_) return coord_ < o.coord_;
    if (length_ != o.length_) return length_ < o.length_;
    return edge_ < o.edge_;
  }
  std::size_t hash() const {
    std::size_t h = std::hash<const void*>()(tree_) ^ (coord_ * 0x9e3779b97f4a7c15ULL) ^ (length_ << 7);
    for (std::size_t i = 0; i < edge_.size(); ++i) h = h * 1000003u + static_cast<std::size_t>(edge_[i]);
    return h;
  }

 private:
  void require_planted() const {
    if (!tree_) throw std::logic_error("X_i is not a planted tree");
  }

  const detail::TreeNode* tree_ = nullptr;
  MultiIndex edge_;
  std::size_t coord_ = 0;
  std::size_t length_ = 0;
};

template <>
struct IdentityLess<BasisElement> {
  bool operator()(const BasisElement& a, const BasisElement& b) const { return a.identity_less(b); }
};

using TreeVector = Combination<BasisElement>;

inline long grading(const BasisElement& b, const Scaling& s) {
  return b.is_poly() ? 0 : s.weight(b.edge()) + grading(b.tree(), s);
}

/// Deliberate departures from the tree calculus. Used only to confirm that
/// the axiom sweeps notice broken conventions.
struct Mutations {
  bool graft_onto_noise_leaves = false;  // Xi leaves become grafting targets
  bool uparrow_noise_leaves = false;     // up-arrows also raise Xi leaves
  bool clamp_edge_cutoff = false;        // l not <= a keeps the term with edge max(a - l, 0)
  bool unit_binomials = false;           // binomial weights replaced by 1

  bool any() const { return graft_onto_noise_leaves || uparrow_noise_leaves || clamp_edge_cutoff || unit_binomials; }
};

namespace detail {

// Calls f(|l|, coefficient, tree) for every term of the deformed graft; only
// l = 0 when `deformed` is false.
template <class F>
void graft_terms(const TreeNode* sigma, const MultiIndex& a, const TreeNode* tau, bool deformed, const Mutations& m,
                 F&& f) {
  const bool checked = !m.any();
  static const Rational one(1);
  for (std::size_t v = 0; v < tau->nodes; ++v) {
    if (tau->noise_leaf[v] && !m.graft_onto_noise_leaves) continue;
    const MultiIndex& n = tau->decorations[v];
    if (!deformed) {
      f(0, one, graft_with_decoration(sigma, a, tau, v, n, checked));
      continue;
    }
    for (const MultiIndex& l : multi_indices_below(n)) {
      std::optional<MultiIndex> edge = a.checked_sub(l);
      if (!edge) {
        if (!m.clamp_edge_cutoff) continue;
        std::vector<int> e(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) e[i] = std::max(a[i] - l[i], 0);
        edge = MultiIndex(std::move(e));
      }
      const Rational coef = m.unit_binomials || l.is_zero() ? one : multi_binom(n, l);
      f(l.length(), coef, graft_with_decoration(sigma, *edge, tau, v, *n.checked_sub(l), checked));
    }
  }
}

template <class F>
void uparrow_terms(const TreeNode* tau, std::size_t i, const Mutations& m, F&& f) {
  const bool checked = !m.any();
  for (std::size_t v = 0; v < tau->nodes; ++v) {
    if (tau->noise_leaf[v] && !m.uparrow_noise_leaves) continue;
    MultiIndex n = tau->decorations[v] + MultiIndex::unit(tau->node.size(), i);
    f(with_decoration(tau, v, n, checked));
  }
}

template <class Term>
TreeSum bilinear(const TreeSum& x, const TreeSum& y, Term&& term) {
  TreeSum out;
  for (const auto& [s, cs] : x.map())
    for (const auto& [t, ct] : y.map()) term(s.handle(), t.handle(), Rational(cs * ct), out);
  return out;
}

}  // namespace detail

/// sigma ->^a tau: sum over the nodes of tau, Xi leaves excluded.
inline TreeSum graft(const TreeSum& sigma, const MultiIndex& a, const TreeSum& tau, const Mutations& m = {}) {
  return detail::bilinear(sigma, tau, [&](auto s, auto t, const Rational& c, TreeSum& out) {
    detail::graft_terms(s, a, t, false, m,
                        [&](int, const Rational& w, const detail::TreeNode* r) { out.add(DecoratedTree::from_node(r), c * w); });
  });
}

inline TreeSum graft(const DecoratedTree& sigma, const MultiIndex& a, const DecoratedTree& tau,
                     const Mutations& m = {}) {
  return graft(TreeSum(sigma), a, TreeSum(tau), m);
}

/// Deformed grafting: node v also hands l <= n_v over to the new edge, weight (n_v choose l).
inline TreeSum deformed_graft(const TreeSum& sigma, const MultiIndex& a, const TreeSum& tau, const Mutations& m = {}) {
  return detail::bilinear(sigma, tau, [&](auto s, auto t, const Rational& c, TreeSum& out) {
    detail::graft_terms(s, a, t, true, m,
                        [&](int, const Rational& w, const detail::TreeNode* r) { out.add(DecoratedTree::from_node(r), c * w); });
  });
}

inline TreeSum deformed_graft(const DecoratedTree& sigma, const MultiIndex& a, const DecoratedTree& tau,
                              const Mutations& m = {}) {
  return deformed_graft(TreeSum(sigma), a, TreeSum(tau), m);
}

/// Terms of the deformed graft with |l| = k (unscaled length).
inline TreeSum deformed_graft_stratum(const TreeSum& sigma, const MultiIndex& a, const TreeSum& tau, int k,
                                      const Mutations& m = {}) {
  return detail::bilinear(sigma, tau, [&](auto s, auto t, const Rational& c, TreeSum& out) {
    detail::graft_terms(s, a, t, true, m, [&](int len, const Rational& w, const detail::TreeNode* r) {
      if (len == k) out.add(DecoratedTree::from_node(r), c * w);
    });
  });
}

/// Deformed graft with each term weighted by t^{|l|}.
inline TreeSum deformed_graft_t(const TreeSum& sigma, const MultiIndex& a, const TreeSum& tau, const Rational& t,
                                const Mutations& m = {}) {
  return detail::bilinear(sigma, tau, [&](auto s, auto u, const Rational& c, TreeSum& out) {
    detail::graft_terms(s, a, u, true, m, [&](int len, const Rational& w, const detail::TreeNode* r) {
      Rational p = 1;
      for (int j = 0; j < len; ++j) p *= t;
      out.add(DecoratedTree::from_node(r), c * w * p);
    });
  });
}

/// Shift of the decoration at v; zero when an entry would become negative.
inline TreeSum uparrow_at(const DecoratedTree& tau, std::size_t v, const std::vector<int>& delta) {
  if (v >= tau.node_count()) throw std::out_of_range("node id outside the tree");
  std::optional<MultiIndex> n = tau.decoration(v).shifted(delta);
  if (!n) return {};
  return TreeSum(DecoratedTree::from_node(detail::with_decoration(tau.handle(), v, *n, true)));
}

/// Sum of +e_i shifts over all nodes except Xi leaves.
inline TreeSum uparrow_i(const TreeSum& tau, std::size_t i, const Mutations& m = {}) {
  TreeSum out;
  for (const auto& [t, c] : tau.map()) {
    if (i >= t.length()) throw std::out_of_range("coordinate index outside 0..d");
    detail::uparrow_terms(t.handle(), i, m, [&](const detail::TreeNode* r) { out.add(DecoratedTree::from_node(r), c); });
  }
  return out;
}

inline TreeSum uparrow_i(const DecoratedTree& tau, std::size_t i, const Mutations& m = {}) {
  return uparrow_i(TreeSum(tau), i, m);
}

}  // namespace postlie

namespace std {
template <>
struct hash<postlie::BasisElement> {
  size_t operator()(const postlie::BasisElement& b) const noexcept { return b.hash(); }
};
}  // namespace std
