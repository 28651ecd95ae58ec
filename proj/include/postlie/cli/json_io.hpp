#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "postlie/algebra.hpp"
#include "postlie/cochains.hpp"
#include "postlie/core/matrix.hpp"
#include "postlie/core/rational.hpp"
#include "postlie/trees.hpp"

namespace postlie::cli {

using Json = nlohmann::json;

/// Input that does not match its schema; `path` is a JSON pointer.
class SchemaError : public std::runtime_error {
 public:
  SchemaError(std::string path, const std::string& message)
      : std::runtime_error((path.empty() ? std::string("/") : path) + ": " + message),
        path_(path.empty() ? "/" : std::move(path)),
        message_(message) {}
  const std::string& path() const { return path_; }
  const std::string& message() const { return message_; }

 private:
  std::string path_;
  std::string message_;
};

inline std::string join(const std::string& path, const std::string& key) {
  std::string escaped;
  for (char c : key) {
    if (c == '~')
      escaped += "~0";
    else if (c == '/')
      escaped += "~1";
    else
      escaped += c;
  }
  return path + "/" + escaped;
}
inline std::string join(const std::string& path, std::size_t i) { return path + "/" + std::to_string(i); }

inline Json parse_document(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw SchemaError("/", std::string("not valid JSON (") + e.what() + ")");
  }
}

inline const Json& require_object(const Json& j, const std::string& path) {
  if (!j.is_object()) throw SchemaError(path, "expected an object");
  return j;
}
inline const Json& require_array(const Json& j, const std::string& path) {
  if (!j.is_array()) throw SchemaError(path, "expected an array");
  return j;
}
inline const Json& member(const Json& obj, const std::string& path, const std::string& key) {
  require_object(obj, path);
  auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError(path, "missing required key \"" + key + "\"");
  return *it;
}

inline long as_int(const Json& j, const std::string& path, long lo, long hi) {
  if (!j.is_number_integer()) throw SchemaError(path, "expected an integer");
  const auto v = j.get<std::int64_t>();
  if (v < lo || v > hi)
    throw SchemaError(path, "value " + std::to_string(v) + " outside " + std::to_string(lo) + ".." + std::to_string(hi));
  return static_cast<long>(v);
}

/// "p/q" or "p" strings; plain JSON integers are also accepted.
inline Rational as_rational(const Json& j, const std::string& path) {
  if (j.is_number_integer()) return Rational(static_cast<long>(j.get<std::int64_t>()));
  if (!j.is_string()) throw SchemaError(path, "expected a rational string \"p/q\"");
  try {
    return parse_rational(j.get<std::string>());
  } catch (const std::invalid_argument& e) {
    throw SchemaError(path, e.what());
  }
}

inline Json to_json(const Rational& q) { return to_string(q); }

inline Json to_json(const Vec& v) {
  Json out = Json::array();
  for (const auto& x : v) out.push_back(to_string(x));
  return out;
}

// ---------------------------------------------------------------- algebras

/// Sparse structure constants [[i, j, k, "p/q"], ...], indices 0-based.
inline BilinearMap parse_quads(const Json& j, const std::string& path, std::size_t dim) {
  require_array(j, path);
  BilinearMap m(dim);
  const long hi = static_cast<long>(dim) - 1;
  for (std::size_t n = 0; n < j.size(); ++n) {
    const std::string p = join(path, n);
    const Json& q = require_array(j[n], p);
    if (q.size() != 4) throw SchemaError(p, "expected [i, j, k, \"p/q\"]");
    if (dim == 0) throw SchemaError(p, "dimension 0 has no structure constants");
    const auto a = as_int(q[0], join(p, 0), 0, hi), b = as_int(q[1], join(p, 1), 0, hi),
               c = as_int(q[2], join(p, 2), 0, hi);
    m.at(a, b, c) += as_rational(q[3], join(p, 3));
  }
  return m;
}

inline Json quads(const BilinearMap& m) {
  Json out = Json::array();
  const std::size_t d = m.dim();
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j)
      for (std::size_t k = 0; k < d; ++k)
        if (m.at(i, j, k) != 0) out.push_back(Json::array({i, j, k, to_string(m.at(i, j, k))}));
  return out;
}

/// Product names the commands understand. "bracket" and "pi" must be antisymmetric.
inline const std::vector<std::string>& known_products() {
  static const std::vector<std::string> names{"bracket", "omega", "pi", "triangle"};
  return names;
}

/// Antisymmetric input: an entry (i, j, k) without its mirror (j, i, k) implies
/// the mirror; both present must be negatives of each other.
inline BilinearMap tag_antisymmetric(const BilinearMap& raw, const std::string& path) {
  const std::size_t d = raw.dim();
  BilinearMap m(d, Symmetry::antisymmetric);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t k = 0; k < d; ++k)
      if (raw.at(i, i, k) != 0)
        throw SchemaError(path, "antisymmetric product has a nonzero entry at (" + std::to_string(i) + ", " +
                                    std::to_string(i) + ", " + std::to_string(k) + ")");
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i + 1; j < d; ++j)
      for (std::size_t k = 0; k < d; ++k) {
        const Rational& a = raw.at(i, j, k);
        const Rational& b = raw.at(j, i, k);
        if (a != 0 && b != 0 && a != -b)
          throw SchemaError(path, "entries (" + std::to_string(i) + ", " + std::to_string(j) + ", " +
                                      std::to_string(k) + ") and (" + std::to_string(j) + ", " + std::to_string(i) +
                                      ", " + std::to_string(k) + ") are not antisymmetric");
        m.set(i, j, k, a != 0 ? a : Rational(-b));
      }
  return m;
}

/// {"dim": n, "basis": [names], "products": {name: quads}}; "basis" is optional.
inline FiniteAlgebra parse_algebra(const Json& j, const std::string& path = "") {
  require_object(j, path);
  const auto dim = static_cast<std::size_t>(as_int(member(j, path, "dim"), join(path, "dim"), 0, 64));
  std::vector<std::string> labels;
  if (auto it = j.find("basis"); it != j.end()) {
    const std::string p = join(path, "basis");
    require_array(*it, p);
    if (it->size() != dim) throw SchemaError(p, "expected " + std::to_string(dim) + " names, got " + std::to_string(it->size()));
    for (std::size_t n = 0; n < it->size(); ++n) {
      if (!(*it)[n].is_string()) throw SchemaError(join(p, n), "expected a string");
      labels.push_back((*it)[n].get<std::string>());
    }
  }
  FiniteAlgebra a;
  try {
    a = FiniteAlgebra(dim, labels);
  } catch (const std::invalid_argument& e) {
    throw SchemaError(join(path, "basis"), e.what());
  }
  if (auto it = j.find("products"); it != j.end()) {
    const std::string p = join(path, "products");
    require_object(*it, p);
    for (const auto& [name, table] : it->items()) {
      const std::string q = join(p, name);
      const auto& known = known_products();
      if (std::find(known.begin(), known.end(), name) == known.end())
        throw SchemaError(q, "unknown product name (expected bracket, omega, pi or triangle)");
      BilinearMap m = parse_quads(table, q, dim);
      if (name == "bracket" || name == "pi") m = tag_antisymmetric(m, q);
      a.products.emplace(name, std::move(m));
    }
  }
  for (const auto& key : j.items())
    if (key.key() != "dim" && key.key() != "basis" && key.key() != "products")
      throw SchemaError(join(path, key.key()), "unexpected key");
  return a;
}

/// The named product, or the zero map when absent.
inline BilinearMap product_or_zero(const FiniteAlgebra& a, const std::string& name) {
  auto it = a.products.find(name);
  if (it != a.products.end()) return it->second;
  const bool anti = name == "bracket" || name == "pi";
  return BilinearMap(a.dim, anti ? Symmetry::antisymmetric : Symmetry::none);
}

inline Json to_json(const Witness& w) {
  return Json{{"axiom", w.axiom}, {"triple", Json::array({w.triple[0], w.triple[1], w.triple[2]})},
              {"defect", to_json(w.defect)}};
}

inline Json to_json(const AxiomReport& r) {
  Json ws = Json::array();
  for (const auto& w : r.witnesses) ws.push_back(to_json(w));
  return Json{{"holds", r.holds}, {"witnesses", ws}};
}

inline Json to_json(const ExactMatrix& m) {
  Json rows = Json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(to_string(m(r, c)));
    rows.push_back(row);
  }
  return rows;
}

// ------------------------------------------------------------------- trees

inline MultiIndex parse_index(const Json& j, const std::string& path, std::size_t expected_length = 0) {
  require_array(j, path);
  if (j.empty()) throw SchemaError(path, "multi-index must have at least one entry");
  if (expected_length && j.size() != expected_length)
    throw SchemaError(path, "expected " + std::to_string(expected_length) + " entries, got " + std::to_string(j.size()));
  std::vector<int> e;
  for (std::size_t n = 0; n < j.size(); ++n) e.push_back(static_cast<int>(as_int(j[n], join(path, n), 0, 1 << 20)));
  return MultiIndex(std::move(e));
}

inline Json to_json(const MultiIndex& m) {
  Json out = Json::array();
  for (int x : m) out.push_back(x);
  return out;
}

namespace detail {

inline RawTree parse_raw_tree(const Json& j, const std::string& path, std::size_t& length) {
  require_object(j, path);
  RawTree t{parse_index(member(j, path, "node"), join(path, "node"), length), {}};
  length = t.node.size();
  for (const auto& key : j.items())
    if (key.key() != "node" && key.key() != "children") throw SchemaError(join(path, key.key()), "unexpected key");
  auto it = j.find("children");
  if (it == j.end()) return t;
  const std::string cp = join(path, "children");
  require_array(*it, cp);
  for (std::size_t n = 0; n < it->size(); ++n) {
    const std::string p = join(cp, n);
    const Json& child = require_object((*it)[n], p);
    const Json& edge = member(child, p, "edge");
    const std::string ep = join(p, "edge");
    require_object(edge, ep);
    if (edge.size() != 1) throw SchemaError(ep, "expected exactly one of \"I\" or \"Xi\"");
    EdgeLabel label;
    if (edge.contains("I")) {
      label = EdgeLabel::I(parse_index(edge["I"], join(ep, "I"), length));
    } else if (edge.contains("Xi")) {
      if (!edge["Xi"].is_null()) throw SchemaError(join(ep, "Xi"), "expected null");
      label = EdgeLabel::Xi();
    } else {
      throw SchemaError(ep, "expected exactly one of \"I\" or \"Xi\"");
    }
    RawTree sub = parse_raw_tree(member(child, p, "tree"), join(p, "tree"), length);
    if (label.noise) {
      if (!sub.children.empty()) throw SchemaError(join(p, "tree"), "a Xi edge must end in a leaf");
      for (int x : sub.node)
        if (x != 0) throw SchemaError(join(join(p, "tree"), "node"), "a Xi leaf carries no decoration");
    }
    t.children.emplace_back(std::move(label), std::move(sub));
  }
  std::size_t noise = 0;
  for (const auto& [e, c] : t.children) noise += e.noise;
  if (noise > 1) throw SchemaError(cp, "at most one Xi edge per node");
  return t;
}

}  // namespace detail

/// {"node": [ints], "children": [{"edge": {"I": [ints]} | {"Xi": null}, "tree": {...}}]}
inline DecoratedTree parse_tree(const Json& j, const std::string& path, std::size_t length = 0) {
  RawTree raw = detail::parse_raw_tree(j, path, length);
  try {
    return canonicalize(raw);
  } catch (const std::invalid_argument& e) {
    throw SchemaError(path, e.what());
  }
}

/// Canonical JSON: children ordered by the bytes of their serialized entries.
inline Json to_json(const DecoratedTree& t) {
  std::vector<std::pair<std::string, Json>> kids;
  for (const auto& [e, c] : t.children()) {
    Json edge = e.noise ? Json{{"Xi", nullptr}} : Json{{"I", to_json(e.index)}};
    Json entry{{"edge", edge}, {"tree", to_json(c)}};
    kids.emplace_back(entry.dump(), std::move(entry));
  }
  std::sort(kids.begin(), kids.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  Json children = Json::array();
  for (auto& [s, entry] : kids) children.push_back(std::move(entry));
  return Json{{"node", to_json(t.node())}, {"children", children}};
}

/// {"edge": [ints], "tree": tree} for I_a(tau); {"X": i, "length": d + 1} for X_i.
inline BasisElement parse_basis(const Json& j, const std::string& path, std::size_t length = 0) {
  require_object(j, path);
  if (j.contains("X")) {
    const auto n = static_cast<std::size_t>(as_int(member(j, path, "length"), join(path, "length"), 1, 64));
    if (length && n != length) throw SchemaError(join(path, "length"), "expected " + std::to_string(length));
    const auto i = as_int(j["X"], join(path, "X"), 0, static_cast<long>(n) - 1);
    return BasisElement::poly(static_cast<std::size_t>(i), n);
  }
  const MultiIndex a = parse_index(member(j, path, "edge"), join(path, "edge"), length);
  const DecoratedTree tau = parse_tree(member(j, path, "tree"), join(path, "tree"), a.size());
  return BasisElement::planted(a, tau);
}

inline Json to_json(const BasisElement& b) {
  if (b.is_poly()) return Json{{"X", b.coordinate()}, {"length", b.length()}};
  return Json{{"edge", to_json(b.edge())}, {"tree", to_json(b.tree())}};
}

/// [{"basis": basis element, "coefficient": "p/q"}, ...]
inline TreeVector parse_tree_vector(const Json& j, const std::string& path, std::size_t length = 0) {
  require_array(j, path);
  TreeVector v;
  for (std::size_t n = 0; n < j.size(); ++n) {
    const std::string p = join(path, n);
    const BasisElement b = parse_basis(member(j[n], p, "basis"), join(p, "basis"), length);
    length = b.length();
    v.add(b, as_rational(member(j[n], p, "coefficient"), join(p, "coefficient")));
  }
  return v;
}

inline Json to_json(const TreeVector& v) {
  Json out = Json::array();
  for (const auto& [b, c] : v.terms()) out.push_back(Json{{"basis", to_json(b)}, {"coefficient", to_string(c)}});
  return out;
}

inline Json to_json(const TreeSum& s) {
  Json out = Json::array();
  for (const auto& [t, c] : s.terms()) out.push_back(Json{{"tree", to_json(t)}, {"coefficient", to_string(c)}});
  return out;
}

}  // namespace postlie::cli
