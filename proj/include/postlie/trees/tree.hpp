#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <cstddef>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <boost/container/small_vector.hpp>
#include <boost/container_hash/hash.hpp>

#include "postlie/core/multi_index.hpp"

namespace postlie {

/// Edge label: I(a) or the noise symbol Xi (which carries no decoration).
struct EdgeLabel {
  bool noise = false;
  MultiIndex index;

  static EdgeLabel I(MultiIndex a) { return {false, std::move(a)}; }
  static EdgeLabel Xi() { return {true, MultiIndex()}; }

  std::string key() const { return noise ? std::string("Xi") : "I" + index.str(); }
  bool operator==(const EdgeLabel&) const = default;
};

/// Uncanonicalized tree as read from input; children in arbitrary order.
struct RawTree {
  MultiIndex node;
  std::vector<std::pair<EdgeLabel, RawTree>> children;
};

namespace detail {

inline void append_index(std::string& out, const MultiIndex& n) {
  char buf[16];
  out += '(';
  for (std::size_t i = 0; i < n.size(); ++i) {
    if (i) out += ',';
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, n[i]);
    out.append(buf, end);
  }
  out += ')';
}

struct TreeNode {
  MultiIndex node;
  std::vector<std::pair<EdgeLabel, const TreeNode*>> children;  // canonical order
  std::string key;
  std::vector<std::int64_t> structure;  // interning key
  std::size_t nodes = 1, edges = 0;
  // preorder over canonical children, root first
  std::vector<MultiIndex> decorations;
  std::vector<char> noise_leaf;
  std::vector<char> noise_node;  // reached through a Xi edge
  mutable int generation = 0;    // 0: permanent
};

/// Interning table. Trees built inside a scope are released when the scope
/// closes unless kept; scopes assume a single thread touches the store.
class TreeStore {
 public:
  static TreeStore& instance() {
    static TreeStore store;
    return store;
  }

  // Children need not be sorted. `checked` enforces the Xi constraints.
  const TreeNode* intern(const MultiIndex& node, std::vector<std::pair<EdgeLabel, const TreeNode*>> children,
                         bool checked) {
    const std::size_t len = node.size();
    std::size_t noise_edges = 0;
    for (const auto& [edge, child] : children) {
      if (child->node.size() != len || (!edge.noise && edge.index.size() != len))
        throw std::invalid_argument("decoration lengths differ within one tree");
      if (edge.noise) {
        ++noise_edges;
        if (checked && !child->children.empty()) throw std::invalid_argument("Xi edge is not terminal");
        if (checked && !child->node.is_zero()) throw std::invalid_argument("Xi leaf carries a nonzero decoration");
      }
    }
    if (checked && noise_edges > 1) throw std::invalid_argument("two Xi edges at one node");

    // Children are interned already, so (node, {(edge, child)}) identifies
    // the tree; the canonical string is only built for new entries.
    StructKey probe;
    probe.assign(node.begin(), node.end());
    boost::container::small_vector<std::size_t, 8> order(children.size());
    for (std::size_t c = 0; c < order.size(); ++c) order[c] = c;
    auto edge_less = [&](std::size_t x, std::size_t y) {
      const auto& [ex, cx] = children[x];
      const auto& [ey, cy] = children[y];
      if (ex.noise != ey.noise) return ex.noise < ey.noise;
      if (ex.index != ey.index) return ex.index < ey.index;
      return std::less<const TreeNode*>()(cx, cy);
    };
    std::sort(order.begin(), order.end(), edge_less);
    for (std::size_t c : order) {
      const auto& [edge, child] = children[c];
      probe.push_back(edge.noise ? -1 : static_cast<std::int64_t>(edge.index.size()));
      probe.insert(probe.end(), edge.index.begin(), edge.index.end());
      probe.push_back(static_cast<std::int64_t>(reinterpret_cast<std::uintptr_t>(child)));
    }

    std::lock_guard lock(mutex_);
    auto it = table_.find(KeyView(probe.data(), probe.size()));
    if (it != table_.end()) return it->second.get();

    // canonical order: bytes of "edge + subtree" keys
    std::string buf;
    boost::container::small_vector<std::pair<std::size_t, std::size_t>, 8> spans;
    for (const auto& [edge, child] : children) {
      const std::size_t start = buf.size();
      if (edge.noise)
        buf += "Xi";
      else {
        buf += 'I';
        append_index(buf, edge.index);
      }
      buf += child->key;
      spans.emplace_back(start, buf.size() - start);
    }
    auto view = [&](std::size_t c) { return std::string_view(buf).substr(spans[c].first, spans[c].second); };
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return view(x) < view(y); });
    std::string key;
    key.reserve(buf.size() + 16);
    key += '[';
    append_index(key, node);
    for (std::size_t c : order) key += view(c);
    key += ']';

    auto entry = std::make_unique<TreeNode>();
    entry->node = node;
    entry->key = std::move(key);
    entry->structure.assign(probe.begin(), probe.end());
    entry->generation = generation_;
    entry->decorations.push_back(entry->node);
    entry->noise_leaf.push_back(0);
    entry->noise_node.push_back(0);
    entry->children.reserve(children.size());
    for (std::size_t c : order) {
      const auto& [edge, child] = children[c];
      entry->children.emplace_back(edge, child);
      entry->nodes += child->nodes;
      entry->edges += child->edges + 1;
      for (std::size_t v = 0; v < child->nodes; ++v) {
        entry->decorations.push_back(child->decorations[v]);
        if (v == 0) {
          entry->noise_leaf.push_back(edge.noise && child->children.empty());
          entry->noise_node.push_back(edge.noise);
        } else {
          entry->noise_leaf.push_back(child->noise_leaf[v]);
          entry->noise_node.push_back(child->noise_node[v]);
        }
      }
    }
    const TreeNode* out = entry.get();
    table_.emplace(KeyView(out->structure.data(), out->structure.size()), std::move(entry));
    if (generation_) scoped_.push_back(out);
    return out;
  }

  /// Exempts a tree (and its subtrees) from release at the end of the scope.
  void keep(const TreeNode* n) {
    std::lock_guard lock(mutex_);
    keep_locked(n);
  }

  void begin_scope() {
    std::lock_guard lock(mutex_);
    if (generation_) throw std::logic_error("tree scopes do not nest");
    generation_ = ++last_generation_;
  }

  void end_scope() {
    std::lock_guard lock(mutex_);
    for (const TreeNode* n : scoped_)
      if (n->generation == generation_) table_.erase(KeyView(n->structure.data(), n->structure.size()));
    scoped_.clear();
    generation_ = 0;
  }

  std::size_t size() const {
    std::lock_guard lock(mutex_);
    return table_.size();
  }

 private:
  void keep_locked(const TreeNode* n) {
    if (n->generation == 0) return;
    n->generation = 0;
    for (const auto& [e, c] : n->children) keep_locked(c);
  }

  using StructKey = boost::container::small_vector<std::int64_t, 24>;
  using KeyView = std::span<const std::int64_t>;
  struct KeyHash {
    std::size_t operator()(KeyView k) const { return boost::hash_range(k.begin(), k.end()); }
  };
  struct KeyEqual {
    bool operator()(KeyView a, KeyView b) const { return std::equal(a.begin(), a.end(), b.begin(), b.end()); }
  };

  mutable std::mutex mutex_;
  std::unordered_map<KeyView, std::unique_ptr<TreeNode>, KeyHash, KeyEqual> table_;
  std::vector<const TreeNode*> scoped_;
  int generation_ = 0;
  int last_generation_ = 0;
};

/// RAII scope for transient trees.
class TreeScope {
 public:
  TreeScope() { TreeStore::instance().begin_scope(); }
  ~TreeScope() { TreeStore::instance().end_scope(); }
  TreeScope(const TreeScope&) = delete;
  TreeScope& operator=(const TreeScope&) = delete;
};

}  // namespace detail

/// Non-planar decorated tree. Instances are interned: equal trees share one
/// node, so equality and hashing are by identity.
class DecoratedTree {
 public:
  DecoratedTree() = default;

  /// Canonicalizing constructor; enforces the Xi constraints.
  static DecoratedTree make(MultiIndex node, std::vector<std::pair<EdgeLabel, DecoratedTree>> children) {
    return from_children(std::move(node), children, true);
  }
  /// Same without the Xi constraints; used only by mutation experiments.
  static DecoratedTree make_unchecked(MultiIndex node, std::vector<std::pair<EdgeLabel, DecoratedTree>> children) {
    return from_children(std::move(node), children, false);
  }
  static DecoratedTree leaf(MultiIndex node) { return make(std::move(node), {}); }
  static DecoratedTree unit(std::size_t length) { return leaf(MultiIndex(length)); }

  static DecoratedTree from_node(const detail::TreeNode* n) { return DecoratedTree(n); }
  const detail::TreeNode* handle() const { return node_; }
  bool valid() const { return node_ != nullptr; }

  const MultiIndex& node() const { return get().node; }
  std::size_t length() const { return get().node.size(); }
  const std::string& key() const { return get().key; }
  std::size_t node_count() const { return get().nodes; }
  std::size_t edge_count() const { return get().edges; }

  std::vector<std::pair<EdgeLabel, DecoratedTree>> children() const {
    std::vector<std::pair<EdgeLabel, DecoratedTree>> out;
    for (const auto& [e, c] : get().children) out.emplace_back(e, DecoratedTree(c));
    return out;
  }

  /// Node ids are preorder positions in the canonical serialization.
  const MultiIndex& decoration(std::size_t v) const { return get().decorations.at(v); }
  bool is_noise_leaf(std::size_t v) const { return get().noise_leaf.at(v) != 0; }
  bool is_noise_node(std::size_t v) const { return get().noise_node.at(v) != 0; }

  RawTree raw() const {
    RawTree r{node(), {}};
    for (const auto& [e, c] : get().children) r.children.emplace_back(e, DecoratedTree(c).raw());
    return r;
  }

  bool operator==(const DecoratedTree& o) const { return node_ == o.node_; }

 private:
  explicit DecoratedTree(const detail::TreeNode* n) : node_(n) {}

  const detail::TreeNode& get() const {
    if (!node_) throw std::logic_error("empty tree handle");
    return *node_;
  }

  static DecoratedTree from_children(MultiIndex node, const std::vector<std::pair<EdgeLabel, DecoratedTree>>& children,
                                     bool checked) {
    std::vector<std::pair<EdgeLabel, const detail::TreeNode*>> kids;
    kids.reserve(children.size());
    for (const auto& [e, c] : children) kids.emplace_back(e, &c.get());
    return DecoratedTree(detail::TreeStore::instance().intern(node, std::move(kids), checked));
  }

  const detail::TreeNode* node_ = nullptr;
};

/// Deterministic order: canonical key bytes.
struct KeyLess {
  bool operator()(const DecoratedTree& a, const DecoratedTree& b) const { return a.key() < b.key(); }
};

inline DecoratedTree canonicalize(const RawTree& raw) {
  std::vector<std::pair<EdgeLabel, DecoratedTree>> kids;
  for (const auto& [e, c] : raw.children) kids.emplace_back(e, canonicalize(c));
  return DecoratedTree::make(raw.node, std::move(kids));
}

/// Factor of the root decomposition X^l Xi^m prod I_a(tau).
struct TreeFactor {
  enum class Kind { monomial, noise, planted };
  Kind kind;
  MultiIndex index;  // l for monomials, a for planted factors
  DecoratedTree tree;

  static TreeFactor monomial(MultiIndex l) { return {Kind::monomial, std::move(l), {}}; }
  static TreeFactor noise() { return {Kind::noise, {}, {}}; }
  static TreeFactor planted(MultiIndex a, DecoratedTree t) { return {Kind::planted, std::move(a), t}; }
  bool operator==(const TreeFactor&) const = default;
};

inline DecoratedTree tree_product(const std::vector<TreeFactor>& factors) {
  std::optional<MultiIndex> root;
  std::vector<std::pair<EdgeLabel, DecoratedTree>> kids;
  std::size_t noise = 0;
  for (const auto& f : factors) {
    switch (f.kind) {
      case TreeFactor::Kind::monomial:
        if (root && *root != f.index) throw std::invalid_argument("conflicting root decorations");
        root = f.index;
        break;
      case TreeFactor::Kind::noise:
        if (++noise > 1) throw std::invalid_argument("two Xi factors in one product");
        break;
      case TreeFactor::Kind::planted:
        kids.emplace_back(EdgeLabel::I(f.index), f.tree);
        break;
    }
  }
  if (!root) throw std::invalid_argument("tree product without a monomial factor");
  if (noise) kids.emplace_back(EdgeLabel::Xi(), DecoratedTree::unit(root->size()));
  return DecoratedTree::make(*root, std::move(kids));
}

/// Monomial first, then Xi if present, then planted factors in canonical order.
inline std::vector<TreeFactor> decompose(const DecoratedTree& t) {
  std::vector<TreeFactor> out{TreeFactor::monomial(t.node())};
  std::vector<TreeFactor> planted;
  for (const auto& [e, c] : t.children()) {
    if (e.noise)
      out.push_back(TreeFactor::noise());
    else
      planted.push_back(TreeFactor::planted(e.index, c));
  }
  out.insert(out.end(), planted.begin(), planted.end());
  return out;
}

namespace detail {

// Xi edges are terminal, their leaves undecorated, at most one per node.
inline bool obeys_noise_rules(const TreeNode* t) {
  std::size_t noise = 0;
  for (const auto& [e, c] : t->children) {
    if (e.noise && (++noise > 1 || !c->children.empty() || !c->node.is_zero())) return false;
    if (!obeys_noise_rules(c)) return false;
  }
  return true;
}

// Rebuilds the path from the root to node v, replacing v by f(v).
template <class F>
const TreeNode* modify_at(const TreeNode* t, std::size_t v, F&& f, bool checked) {
  if (v == 0) return f(t);
  std::size_t offset = 1;
  for (std::size_t c = 0; c < t->children.size(); ++c) {
    const TreeNode* child = t->children[c].second;
    if (v < offset + child->nodes) {
      auto kids = t->children;
      kids[c].second = modify_at(child, v - offset, f, checked);
      return TreeStore::instance().intern(t->node, std::move(kids), checked);
    }
    offset += child->nodes;
  }
  throw std::out_of_range("node id outside the tree");
}

// v gets decoration `node` and the extra child (I(a), sigma).
inline const TreeNode* graft_with_decoration(const TreeNode* sigma, const MultiIndex& a, const TreeNode* tau,
                                             std::size_t v, const MultiIndex& node, bool checked) {
  return modify_at(
      tau, v,
      [&](const TreeNode* n) {
        auto kids = n->children;
        kids.emplace_back(EdgeLabel::I(a), sigma);
        return TreeStore::instance().intern(node, std::move(kids), checked);
      },
      checked);
}

inline const TreeNode* with_decoration(const TreeNode* tau, std::size_t v, const MultiIndex& node, bool checked) {
  return modify_at(
      tau, v, [&](const TreeNode* n) { return TreeStore::instance().intern(node, n->children, checked); }, checked);
}

}  // namespace detail

/// sigma grafted onto node v of tau along a new edge I(a).
inline DecoratedTree graft_at(const DecoratedTree& sigma, const MultiIndex& a, const DecoratedTree& tau,
                              std::size_t v) {
  if (v >= tau.node_count()) throw std::out_of_range("node id outside the tree");
  if (tau.is_noise_leaf(v)) throw std::invalid_argument("grafting onto a Xi leaf");
  if (a.size() != tau.length() || sigma.length() != tau.length())
    throw std::invalid_argument("decoration lengths differ");
  return DecoratedTree::from_node(
      detail::graft_with_decoration(sigma.handle(), a, tau.handle(), v, tau.decoration(v), true));
}

/// Positive integer weights s_0..s_d; |n|_s = sum_i s_i n_i.
struct Scaling {
  std::vector<int> s;

  explicit Scaling(std::vector<int> weights) : s(std::move(weights)) {
    for (int w : s)
      if (w < 1) throw std::invalid_argument("scaling entries must be >= 1");
  }
  static Scaling parabolic(std::size_t length) {
    std::vector<int> w(length, 1);
    if (length) w[0] = 2;
    return Scaling(std::move(w));
  }
  static Scaling uniform(std::size_t length) { return Scaling(std::vector<int>(length, 1)); }

  long weight(const MultiIndex& n) const {
    if (n.size() != s.size()) throw std::invalid_argument("scaling length mismatch");
    long r = 0;
    for (std::size_t i = 0; i < s.size(); ++i) r += static_cast<long>(s[i]) * n[i];
    return r;
  }
};

/// Sum of |e|_s over I edges; Xi edges contribute nothing.
inline long grading(const DecoratedTree& t, const Scaling& s) {
  long r = 0;
  for (const auto& [e, c] : t.children()) {
    if (!e.noise) r += s.weight(e.index);
    r += grading(c, s);
  }
  return r;
}

}  // namespace postlie

namespace std {
template <>
struct hash<postlie::DecoratedTree> {
  size_t operator()(const postlie::DecoratedTree& t) const noexcept { return hash<const void*>()(t.handle()); }
};
}  // namespace std
