#pragma once

#include <memory>
#include <mutex>
#include <unordered_map>
#include <vector>

#include "postlie/trees/linear.hpp"

namespace postlie {

enum class TreeProduct { triangle, hat_triangle, bracket0, bracket1 };
enum class TFamilyProduct { hat_triangle_t, bracket1_t };

/// Order-i part of the deformation of (0, triangle) into (bracket1, hat_triangle).
struct DeformationComponent {
  TreeVector pi;
  TreeVector omega;
};

/// Products on V = span{planted trees} + span{X_0..X_d}. Basis-pair results
/// are cached; the cache is private to the instance.
class TreeAlgebra {
 public:
  explicit TreeAlgebra(Mutations m = {}) : mutations_(m) {}

  const Mutations& mutations() const { return mutations_; }

  const TreeVector& product(const BasisElement& x, const BasisElement& y, TreeProduct mode) const {
    auto& cache = caches_[static_cast<int>(mode)];
    const PairKey key{x, y};
    {
      std::lock_guard lock(mutex_);
      auto it = cache.find(key);
      if (it != cache.end()) return it->second;
    }
    TreeVector r = compute(x, y, mode);
    keep(x);
    keep(y);
    keep(r);
    std::lock_guard lock(mutex_);
    return cache.try_emplace(key, std::move(r)).first->second;
  }

  /// Uncached evaluation; for one-off products of large trees.
  TreeVector product_uncached(const BasisElement& x, const BasisElement& y, TreeProduct mode) const {
    return compute(x, y, mode);
  }

  TreeVector product(const TreeVector& x, const TreeVector& y, TreeProduct mode, bool cache = true) const {
    TreeVector out;
    for (const auto& [a, ca] : x.map())
      for (const auto& [b, cb] : y.map())
        out.add_scaled(cache ? product(a, b, mode) : product_uncached(a, b, mode), ca * cb);
    return out;
  }

  /// omega_k(x, y) for k = 0, 1, ...; omega_0 is the triangle product.
  /// Trailing zero strata are dropped.
  const std::vector<TreeVector>& strata(const BasisElement& x, const BasisElement& y) const {
    const PairKey key{x, y};
    {
      std::lock_guard lock(mutex_);
      auto it = strata_.find(key);
      if (it != strata_.end()) return it->second;
    }
    std::vector<TreeVector> r = compute_strata(x, y);
    keep(x);
    keep(y);
    for (const auto& part : r) keep(part);
    std::lock_guard lock(mutex_);
    return strata_.try_emplace(key, std::move(r)).first->second;
  }

  std::vector<TreeVector> strata_uncached(const BasisElement& x, const BasisElement& y) const {
    return compute_strata(x, y);
  }

  std::vector<TreeVector> strata(const TreeVector& x, const TreeVector& y, bool cache = true) const {
    std::vector<TreeVector> out;
    for (const auto& [a, ca] : x.map())
      for (const auto& [b, cb] : y.map()) {
        std::vector<TreeVector> fresh;
        if (!cache) fresh = compute_strata(a, b);
        const auto& s = cache ? strata(a, b) : fresh;
        if (out.size() < s.size()) out.resize(s.size());
        for (std::size_t k = 0; k < s.size(); ++k) out[k].add_scaled(s[k], ca * cb);
      }
    return out;
  }

  TreeVector omega(const BasisElement& x, const BasisElement& y, std::size_t k) const {
    const auto& s = strata(x, y);
    return k < s.size() ? s[k] : TreeVector();
  }

  DeformationComponent component(const BasisElement& x, const BasisElement& y, std::size_t order) const {
    if (order == 0) throw std::invalid_argument("deformation components start at order 1");
    DeformationComponent c;
    if (order == 1) c.pi = pi(x, y);
    c.omega = omega(x, y, order);
    return c;
  }

  /// pi(I_a(tau), X_i) = I_{a-e_i}(tau) = -pi(X_i, I_a(tau)); zero on all other pairs.
  TreeVector pi(const BasisElement& x, const BasisElement& y) const {
    require_same_length(x, y);
    TreeVector out;
    if (x.is_poly() == y.is_poly()) return out;
    const BasisElement& p = x.is_planted() ? x : y;
    const std::size_t i = x.is_planted() ? y.coordinate() : x.coordinate();
    if (p.edge()[i] == 0) return out;
    std::vector<int> e = p.edge().entries();
    --e[i];
    out.add(BasisElement::planted(MultiIndex(std::move(e)), p.tree()), x.is_planted() ? 1 : -1);
    return out;
  }

  TreeVector pi(const TreeVector& x, const TreeVector& y) const {
    TreeVector out;
    for (const auto& [a, ca] : x.map())
      for (const auto& [b, cb] : y.map()) out.add_scaled(pi(a, b), ca * cb);
    return out;
  }

  /// Weighted products: strata weighted by t^k, bracket scaled by t.
  TreeVector t_product(const BasisElement& x, const BasisElement& y, const Rational& t, TFamilyProduct mode) const {
    if (mode == TFamilyProduct::bracket1_t) return product(x, y, TreeProduct::bracket1).scaled(t);
    TreeVector out;
    Rational w = 1;
    for (const auto& s : strata(x, y)) {
      out.add_scaled(s, w);
      w *= t;
    }
    return out;
  }

  TreeVector t_product(const TreeVector& x, const TreeVector& y, const Rational& t, TFamilyProduct mode,
                       bool cache = true) const {
    if (mode == TFamilyProduct::bracket1_t) return product(x, y, TreeProduct::bracket1, cache).scaled(t);
    TreeVector out;
    Rational w = 1;
    for (const auto& s : strata(x, y, cache)) {
      out.add_scaled(s, w);
      w *= t;
    }
    return out;
  }

  void clear_cache() const {
    std::lock_guard lock(mutex_);
    for (auto& c : caches_) c.clear();
    strata_.clear();
  }

 private:
  static void keep(const BasisElement& b) {
    if (b.is_planted()) detail::TreeStore::instance().keep(b.tree_handle());
  }
  static void keep(const TreeVector& v) {
    for (const auto& [b, c] : v.map()) keep(b);
  }

  struct PairKey {
    BasisElement x, y;
    bool operator==(const PairKey&) const = default;
  };
  struct PairHash {
    std::size_t operator()(const PairKey& k) const { return k.x.hash() * 31 + k.y.hash(); }
  };

  static void require_same_length(const BasisElement& x, const BasisElement& y) {
    if (x.length() != y.length()) throw std::invalid_argument("basis elements of different d");
  }

  TreeVector compute(const BasisElement& x, const BasisElement& y, TreeProduct mode) const {
    require_same_length(x, y);
    TreeVector out;
    switch (mode) {
      case TreeProduct::bracket0:
        break;
      case TreeProduct::bracket1:
        if (x.is_planted() && y.is_poly()) {
          if (auto e = x.edge().checked_sub(MultiIndex::unit(x.length(), y.coordinate())))
            out.add(BasisElement::planted(*e, x.tree()), 1);
        } else if (x.is_poly() && y.is_planted()) {
          if (auto e = y.edge().checked_sub(MultiIndex::unit(y.length(), x.coordinate())))
            out.add(BasisElement::planted(*e, y.tree()), -1);
        }
        break;
      case TreeProduct::triangle:
      case TreeProduct::hat_triangle:
        if (y.is_poly()) break;
        if (x.is_poly()) {
          detail::uparrow_terms(y.tree_handle(), x.coordinate(), mutations_, [&](const detail::TreeNode* r) {
            out.add(BasisElement::planted(y.edge(), DecoratedTree::from_node(r)), 1);
          });
        } else {
          detail::graft_terms(x.tree_handle(), x.edge(), y.tree_handle(), mode == TreeProduct::hat_triangle,
                              mutations_, [&](int, const Rational& w, const detail::TreeNode* r) {
                                out.add(BasisElement::planted(y.edge(), DecoratedTree::from_node(r)), w);
                              });
        }
        break;
    }
    return out;
  }

  std::vector<TreeVector> compute_strata(const BasisElement& x, const BasisElement& y) const {
    require_same_length(x, y);
    std::vector<TreeVector> out;
    if (y.is_poly()) return out;
    if (x.is_poly()) {
      TreeVector s0 = compute(x, y, TreeProduct::triangle);
      if (!s0.is_zero()) out.push_back(std::move(s0));
      return out;
    }
    detail::graft_terms(x.tree_handle(), x.edge(), y.tree_handle(), true, mutations_,
                        [&](int len, const Rational& w, const detail::TreeNode* r) {
                          if (out.size() <= static_cast<std::size_t>(len)) out.resize(len + 1);
                          out[len].add(BasisElement::planted(y.edge(), DecoratedTree::from_node(r)), w);
                        });
    while (!out.empty() && out.back().is_zero()) out.pop_back();
    return out;
  }

  Mutations mutations_;
  mutable std::mutex mutex_;
  mutable std::unordered_map<PairKey, TreeVector, PairHash> caches_[4];
  mutable std::unordered_map<PairKey, std::vector<TreeVector>, PairHash> strata_;
};

namespace detail {
inline const TreeAlgebra& default_tree_algebra() {
  static const TreeAlgebra algebra;
  return algebra;
}
}  // namespace detail

inline TreeVector v_products(const BasisElement& x, const BasisElement& y, TreeProduct mode) {
  return detail::default_tree_algebra().product(x, y, mode);
}

inline DeformationComponent deformation_components(const BasisElement& x, const BasisElement& y, std::size_t order) {
  return detail::default_tree_algebra().component(x, y, order);
}

inline TreeVector t_family(const BasisElement& x, const BasisElement& y, const Rational& t, TFamilyProduct mode) {
  return detail::default_tree_algebra().t_product(x, y, t, mode);
}

}  // namespace postlie
