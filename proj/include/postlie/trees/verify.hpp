#pragma once

#include <algorithm>
#include <array>
#include <map>
#include <set>
#include <unordered_map>
#include <string>
#include <utility>
#include <vector>

#include "postlie/trees/products.hpp"

namespace postlie {

/// All trees with at most `max_edges` edges and every decoration <= max_decoration.
inline std::vector<DecoratedTree> enumerate_trees(std::size_t length, std::size_t max_edges, int max_decoration) {
  const MultiIndex top(std::vector<int>(length, max_decoration));
  const std::vector<MultiIndex> labels = multi_indices_below(top);
  // by_budget[e]: trees with at most e edges
  std::vector<std::vector<DecoratedTree>> by_budget(max_edges + 1);
  for (std::size_t budget = 0; budget <= max_edges; ++budget) {
    struct Option {
      EdgeLabel edge;
      DecoratedTree tree;
      std::size_t cost;
    };
    std::vector<Option> options;
    if (budget >= 1) {
      options.push_back({EdgeLabel::Xi(), DecoratedTree::unit(length), 1});
      for (const auto& sub : by_budget[budget - 1])
        for (const auto& a : labels) options.push_back({EdgeLabel::I(a), sub, 1 + sub.edge_count()});
    }
    std::set<DecoratedTree, KeyLess> found;
    std::vector<std::pair<EdgeLabel, DecoratedTree>> kids;
    // nondecreasing option indices give each multiset once
    auto extend = [&](auto&& self, std::size_t first, std::size_t used, bool noise) -> void {
      for (const auto& root : labels) found.insert(DecoratedTree::make(root, kids));
      for (std::size_t o = first; o < options.size(); ++o) {
        const Option& opt = options[o];
        if (used + opt.cost > budget) continue;
        if (opt.edge.noise && noise) continue;
        kids.emplace_back(opt.edge, opt.tree);
        self(self, opt.edge.noise ? o + 1 : o, used + opt.cost, noise || opt.edge.noise);
        kids.pop_back();
      }
    };
    extend(extend, 0, 0, false);
    by_budget[budget].assign(found.begin(), found.end());
  }
  std::vector<DecoratedTree> out = by_budget[max_edges];
  std::stable_sort(out.begin(), out.end(), [](const DecoratedTree& a, const DecoratedTree& b) {
    if (a.edge_count() != b.edge_count()) return a.edge_count() < b.edge_count();
    return a.key() < b.key();
  });
  return out;
}

/// Planted trees with at most max_edges edges (planting edge included) and
/// X_0..X_d, ordered by edge count, then canonical encoding.
inline std::vector<BasisElement> enumerate_basis(std::size_t d, std::size_t max_edges, int max_decoration) {
  const std::size_t length = d + 1;
  std::vector<BasisElement> out;
  for (std::size_t i = 0; i < length; ++i) out.push_back(BasisElement::poly(i, length));
  if (max_edges >= 1) {
    const MultiIndex top(std::vector<int>(length, max_decoration));
    for (const auto& tau : enumerate_trees(length, max_edges - 1, max_decoration))
      for (const auto& a : multi_indices_below(top)) out.push_back(BasisElement::planted(a, tau));
  }
  std::stable_sort(out.begin(), out.end(), [](const BasisElement& a, const BasisElement& b) {
    if (a.edge_count() != b.edge_count()) return a.edge_count() < b.edge_count();
    return a.key() < b.key();
  });
  return out;
}

/// Which pair the Post-1/Post-2 checks use: (bracket1, hat_triangle) or (bracket0, triangle).
enum class TreeSweepMode { post_lie, pre_lie };

struct TreeVerifyConfig {
  std::size_t d = 0;
  std::size_t max_edges = 2;
  int max_decoration = 2;
  bool pre_lie = true;          // triangle is pre-Lie
  bool post_lie = true;         // the pair selected by `mode` is post-Lie
  TreeSweepMode mode = TreeSweepMode::post_lie;
  bool reconstruction = true;   // hat = sum of strata, bracket1 = bracket0 + pi
  bool filtration = true;       // strata k >= 1 lower the grading
  bool closure = true;          // products of basis elements are trees of V
  std::vector<Rational> t_samples{0, 1, Rational(1, 2), -1, 3};
  int deformation_order = 4;    // per-order residuals 0..order; negative disables
  std::vector<Scaling> scalings;  // empty: parabolic and uniform
  Mutations mutations;
  bool antisymmetry = true;     // evaluate antisymmetric identities once per unordered pair
  std::size_t max_witnesses = 16;
  bool stop_at_first_failure = false;
};

struct TreeWitness {
  std::string axiom;
  std::array<std::size_t, 3> triple{};  // basis indices; pairs leave the last at 0
  TreeVector defect;
};

struct TreeAxiomReport {
  std::size_t basis_size = 0;
  std::size_t pairs = 0;
  std::size_t triples = 0;
  std::map<std::string, std::size_t> evaluations;
  std::map<std::string, std::size_t> failures;
  std::vector<TreeWitness> witnesses;
  bool holds = true;

  bool failed(const std::string& axiom) const { return failures.count(axiom) && failures.at(axiom) > 0; }
};

namespace detail {

inline std::string t_label(const Rational& t) { return "t=" + t.get_str(); }

class TreeSweep {
 public:
  TreeSweep(const TreeVerifyConfig& cfg, TreeAxiomReport& rep)
      : cfg_(cfg), rep_(rep), alg_(cfg.mutations), basis_(enumerate_basis(cfg.d, cfg.max_edges, cfg.max_decoration)) {
    rep_.basis_size = basis_.size();
  }

  void run() {
    const std::size_t n = basis_.size();
    rep_.pairs = n * n;
    rep_.triples = n * n * n;
    build_slots();
    if (cfg_.reconstruction || cfg_.filtration || cfg_.closure)
      for (std::size_t x = 0; x < n && !done(); ++x)
        for (std::size_t y = 0; y < n && !done(); ++y) pair_checks(x, y);
    for (std::size_t x = 0; x < n && !done(); ++x) {
      detail::TreeScope scope;
      scope_x_ = x;
      x_strata_.clear();
      for (std::size_t y = 0; y < n && !done(); ++y)
        for (std::size_t z = 0; z < n && !done(); ++z) triple_checks(x, y, z);
      x_strata_.clear();
      left_memo_.clear();
      y_memo_.clear();
    }
    rep_.holds = true;
    for (const auto& [name, count] : rep_.failures)
      if (count) rep_.holds = false;
  }

 private:
  using P = TreeProduct;

  bool done() const { return cfg_.stop_at_first_failure && !rep_.witnesses.empty(); }

  // report counters for one axiom label (std::map references are stable)
  struct Slot {
    const std::string* name;
    std::size_t* evaluations;
    std::size_t* failures;
  };
  Slot slot(const std::string& axiom) {
    auto& e = rep_.evaluations[axiom];
    auto it = rep_.failures.try_emplace(axiom, 0).first;
    return {&it->first, &e, &it->second};
  }

  void record(const Slot& s, std::array<std::size_t, 3> idx, const TreeVector& defect) {
    ++*s.evaluations;
    if (defect.is_zero()) return;
    ++*s.failures;
    if (rep_.witnesses.size() < cfg_.max_witnesses) {
      for (const auto& [b, c] : defect.map())
        if (b.is_planted()) detail::TreeStore::instance().keep(b.tree_handle());
      rep_.witnesses.push_back({*s.name, idx, defect});
    }
  }
  void record(const std::string& axiom, std::array<std::size_t, 3> idx, const TreeVector& defect) {
    record(slot(axiom), idx, defect);
  }

  // per-order and per-sample labels, built once
  std::array<std::vector<Slot>, 3> order_slots_;
  std::array<std::vector<Slot>, 3> t_slots_;
  Slot pre_lie_{}, jacobi_{}, post1_{}, post2_{};
  void build_slots() {
    if (cfg_.pre_lie) pre_lie_ = slot("pre_lie");
    if (cfg_.post_lie) {
      jacobi_ = slot("jacobi");
      post1_ = slot("post1");
      post2_ = slot("post2");
    }
    static const char* deformation[] = {"deformation4", "deformation5", "deformation6"};
    static const char* family[] = {"jacobi@", "post1@", "post2@"};
    for (int k = 0; k < 3; ++k) {
      for (int n = 0; n <= cfg_.deformation_order; ++n)
        // Jacobi of pi and Post-1 have no order-0 part
        order_slots_[k].push_back(k < 2 && n == 0 ? Slot{} : slot(std::string(deformation[k]) + "@" + std::to_string(n)));
      for (const Rational& t : cfg_.t_samples) t_slots_[k].push_back(slot(family[k] + t_label(t)));
    }
  }

  const TreeVector& prod(std::size_t x, std::size_t y, P mode) { return alg_.product(basis_[x], basis_[y], mode); }

  void pair_checks(std::size_t xi, std::size_t yi) {
    const BasisElement& x = basis_[xi];
    const BasisElement& y = basis_[yi];
    const auto& s = alg_.strata(x, y);
    if (cfg_.reconstruction) {
      TreeVector sum;
      for (const auto& part : s) sum += part;
      record("reconstruct_hat", {xi, yi, 0}, prod(xi, yi, P::hat_triangle) - sum);
      TreeVector base = s.empty() ? TreeVector() : s[0];
      record("reconstruct_triangle", {xi, yi, 0}, prod(xi, yi, P::triangle) - base);
      record("reconstruct_bracket", {xi, yi, 0},
             prod(xi, yi, P::bracket1) - (prod(xi, yi, P::bracket0) + alg_.component(x, y, 1).pi));
    }
    if (cfg_.closure) {
      // products of basis elements must stay in V
      TreeVector outside;
      auto scan = [&](const TreeVector& v) {
        for (const auto& [b, c] : v.map())
          if (b.is_planted() && !detail::obeys_noise_rules(b.tree_handle())) outside.add(b, c);
      };
      for (P mode : {P::triangle, P::hat_triangle, P::bracket1}) scan(prod(xi, yi, mode));
      for (const auto& part : s) scan(part);
      record("closure", {xi, yi, 0}, outside);
    }
    if (cfg_.filtration) {
      std::vector<Scaling> scalings = cfg_.scalings;
      if (scalings.empty()) scalings = {Scaling::parabolic(cfg_.d + 1), Scaling::uniform(cfg_.d + 1)};
      for (const auto& sc : scalings) {
        long floor = -1;  // minimal grading among the l = 0 terms
        if (!s.empty())
          for (const auto& [b, c] : s[0].map()) floor = floor < 0 ? grading(b, sc) : std::min(floor, grading(b, sc));
        TreeVector bad;
        for (std::size_t k = 1; k < s.size(); ++k)
          for (const auto& [b, c] : s[k].map())
            if (floor < 0 || grading(b, sc) >= floor) bad.add(b, c);
        record("filtration", {xi, yi, 0}, bad);
      }
    }
  }

  using Poly = std::vector<TreeVector>;  // coefficient of t^k at index k

  static const TreeVector& coeff(const Poly& p, std::size_t k) {
    static const TreeVector zero;
    return k < p.size() ? p[k] : zero;
  }
  static void add_poly(Poly& out, const Poly& p, const Rational& c, std::size_t shift = 0) {
    if (out.size() < p.size() + shift) out.resize(p.size() + shift);
    for (std::size_t k = 0; k < p.size(); ++k) out[k + shift].add_scaled(p[k], c);
  }
  static TreeVector evaluate(const Poly& p, const Rational& t) {
    TreeVector out;
    Rational w = 1;
    for (const auto& c : p) {
      out.add_scaled(c, w);
      w *= t;
    }
    return out;
  }

  // Second-level products stay out of the algebra cache; their trees live in
  // the current scope. Triangle and hat products are read off the strata
  // (stratum 0 and the sum), so each second-level graft is done once.
  using StrataMemo = std::unordered_map<BasisElement, Poly>;
  std::size_t scope_x_ = static_cast<std::size_t>(-1);
  StrataMemo x_strata_;  // strata(x, b) for the scope's x
  StrataMemo left_memo_, y_memo_;  // per triple: strata(b, z), strata(y, b)
  std::size_t triple_y_ = 0;

  const Poly& strata_of(const BasisElement& a, const BasisElement& b, StrataMemo& memo, const BasisElement& key) {
    auto it = memo.find(key);
    if (it == memo.end()) it = memo.emplace(key, alg_.strata_uncached(a, b)).first;
    return it->second;
  }
  const Poly& left_strata(const BasisElement& b, std::size_t z) { return strata_of(b, basis_[z], left_memo_, b); }
  const Poly& right_strata(std::size_t w, const BasisElement& b) {
    if (w == scope_x_) return strata_of(basis_[w], b, x_strata_, b);
    if (w != triple_y_) throw std::logic_error("second-level memo used outside its triple");
    return strata_of(basis_[w], b, y_memo_, b);
  }

  static void add_collapsed(TreeVector& out, const Poly& p, const Rational& c, P mode) {
    if (mode == P::triangle) {
      if (!p.empty()) out.add_scaled(p[0], c);
      return;
    }
    for (const auto& part : p) out.add_scaled(part, c);
  }

  TreeVector left(const TreeVector& u, std::size_t z, P mode) {
    if (mode != P::triangle && mode != P::hat_triangle) return alg_.product(u, TreeVector(basis_[z]), mode, false);
    TreeVector out;
    for (const auto& [b, c] : u.map()) add_collapsed(out, left_strata(b, z), c, mode);
    return out;
  }
  TreeVector right(std::size_t w, const TreeVector& u, P mode) {
    if (mode != P::triangle && mode != P::hat_triangle) return alg_.product(TreeVector(basis_[w]), u, mode, false);
    TreeVector out;
    for (const auto& [b, c] : u.map()) add_collapsed(out, right_strata(w, b), c, mode);
    return out;
  }

  // strata of (u, z) and of (w, u) as polynomials in t
  Poly strata_left(const TreeVector& u, std::size_t z) {
    Poly out;
    for (const auto& [b, c] : u.map()) add_poly(out, left_strata(b, z), c);
    return out;
  }
  Poly strata_right(std::size_t w, const TreeVector& u) {
    Poly out;
    for (const auto& [b, c] : u.map()) add_poly(out, right_strata(w, b), c);
    return out;
  }

  // f applied to each coefficient of p
  template <class F>
  static Poly map_poly(const Poly& p, F&& f) {
    Poly out;
    for (const auto& c : p) out.push_back(f(c));
    return out;
  }

  void triple_checks(std::size_t x, std::size_t y, std::size_t z) {
    const bool xy = !cfg_.antisymmetry || x <= y;
    const bool yz = !cfg_.antisymmetry || y <= z;
    const bool xyz = !cfg_.antisymmetry || (x <= y && y <= z);
    if (!xy && !yz) return;
    const std::array<std::size_t, 3> idx{x, y, z};
    left_memo_.clear();
    y_memo_.clear();
    triple_y_ = y;
    const BasisElement& X = basis_[x];
    const BasisElement& Y = basis_[y];

    if (cfg_.pre_lie && xy) {
      TreeVector assoc = left(prod(x, y, P::triangle), z, P::triangle) - right(x, prod(y, z, P::triangle), P::triangle);
      assoc -= left(prod(y, x, P::triangle), z, P::triangle) - right(y, prod(x, z, P::triangle), P::triangle);
      record(pre_lie_, idx, assoc);
    }

    if (cfg_.post_lie) {
      // pre-Lie mode: the undeformed pair (bracket0, triangle)
      const bool pre = cfg_.mode == TreeSweepMode::pre_lie;
      const P B = pre ? P::bracket0 : P::bracket1;
      const P H = pre ? P::triangle : P::hat_triangle;
      if (xyz) {
        TreeVector jac = left(prod(x, y, B), z, B) + left(prod(y, z, B), x, B) + left(prod(z, x, B), y, B);
        record(jacobi_, idx, jac);
      }
      if (yz) {
        TreeVector p1 = right(x, prod(y, z, B), H) - left(prod(x, y, H), z, B) - right(y, prod(x, z, H), B);
        record(post1_, idx, p1);
      }
      if (xy) {
        TreeVector u = prod(x, y, B) + prod(x, y, H) - prod(y, x, H);
        TreeVector p2 = left(u, z, H) - right(x, prod(y, z, H), H) + right(y, prod(x, z, H), H);
        record(post2_, idx, p2);
      }
    }

    const bool orders = cfg_.deformation_order >= 0;
    if (!orders && cfg_.t_samples.empty()) return;

    // (pi_t, omega_t) = (t pi, sum_k t^k omega_k); all identities become
    // polynomials in t. The t-family uses bracket1 where the deformation uses pi.
    const Poly sxy = alg_.strata(X, Y), syx = alg_.strata(Y, X);
    const Poly sxz = alg_.strata(X, basis_[z]), syz = alg_.strata(Y, basis_[z]);
    auto pi = [&](const TreeVector& a, const TreeVector& b) { return alg_.pi(a, b); };
    auto br = [&](const TreeVector& a, const TreeVector& b) { return alg_.product(a, b, P::bracket1, false); };
    const TreeVector vx(X), vy(Y), vz(basis_[z]);

    auto jacobi_poly = [&](auto&& bracket) {
      Poly p(3);
      p[2] = bracket(bracket(vx, vy), vz) + bracket(bracket(vy, vz), vx) + bracket(bracket(vz, vx), vy);
      return p;
    };
    auto post1_poly = [&](auto&& bracket) {
      Poly p;
      add_poly(p, strata_right(x, bracket(vy, vz)), 1, 1);
      add_poly(p, map_poly(sxy, [&](const TreeVector& c) { return bracket(c, vz); }), -1, 1);
      add_poly(p, map_poly(sxz, [&](const TreeVector& c) { return bracket(vy, c); }), -1, 1);
      return p;
    };
    // bracket-free part of Post-2, shared by both families
    Poly post2_shared;
    if (xy) {
      Poly a = sxy;
      add_poly(a, syx, -1);
      for (std::size_t j = 0; j < a.size(); ++j) add_poly(post2_shared, strata_left(a[j], z), 1, j);
      for (std::size_t j = 0; j < syz.size(); ++j) add_poly(post2_shared, strata_right(x, syz[j]), -1, j);
      for (std::size_t j = 0; j < sxz.size(); ++j) add_poly(post2_shared, strata_right(y, sxz[j]), 1, j);
    }
    auto post2_poly = [&](const TreeVector& bracket_xy) {
      Poly p = post2_shared;
      add_poly(p, strata_left(bracket_xy, z), 1, 1);
      return p;
    };

    Poly d4, d5, d6;
    if (xyz) d4 = jacobi_poly(pi);
    if (yz) d5 = post1_poly(pi);
    if (xy) d6 = post2_poly(pi(vx, vy));

    if (orders) {
      const std::size_t N = static_cast<std::size_t>(cfg_.deformation_order);
      for (std::size_t n = 0; n <= N; ++n) {
        if (xyz && n >= 1) record(order_slots_[0][n], idx, coeff(d4, n));
        if (yz && n >= 1) record(order_slots_[1][n], idx, coeff(d5, n));
        if (xy) record(order_slots_[2][n], idx, coeff(d6, n));
      }
    }

    if (cfg_.t_samples.empty()) return;
    Poly j_t, p1_t, p2_t;
    if (xyz) j_t = jacobi_poly(br);
    if (yz) p1_t = post1_poly(br);
    if (xy) p2_t = post2_poly(prod(x, y, P::bracket1));
    for (std::size_t k = 0; k < cfg_.t_samples.size(); ++k) {
      const Rational& t = cfg_.t_samples[k];
      if (xyz) record(t_slots_[0][k], idx, evaluate(j_t, t));
      if (yz) record(t_slots_[1][k], idx, evaluate(p1_t, t));
      if (xy) record(t_slots_[2][k], idx, evaluate(p2_t, t));
    }
  }

  const TreeVerifyConfig& cfg_;
  TreeAxiomReport& rep_;
  TreeAlgebra alg_;
  std::vector<BasisElement> basis_;
};

}  // namespace detail

/// Exhaustive identity checks over the enumerated basis of V.
inline TreeAxiomReport verify_axioms_truncated(const TreeVerifyConfig& cfg) {
  TreeAxiomReport rep;
  detail::TreeSweep sweep(cfg, rep);
  sweep.run();
  return rep;
}

}  // namespace postlie
