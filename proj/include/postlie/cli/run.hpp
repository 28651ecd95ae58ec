#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "postlie/cli/json_io.hpp"
#include "postlie/cohomology.hpp"
#include "postlie/corpus.hpp"
#include "postlie/core/parallel.hpp"
#include "postlie/deformation.hpp"

namespace postlie::cli {

inline constexpr const char* kVersion = "0.1.0";

struct RunConfig {
  std::string command;  // check, mc, cohomology, deform, trees, trees-verify
  std::string action;   // deform: residuals|infinitesimal|trivialize; trees: graft|deform-graft|uparrow|products
  std::string input = "-";
  std::string output = "-";
  unsigned threads = 0;  // 0: POSTLIE_THREADS or 1
  std::uint64_t seed = 1;

  std::vector<int> degrees{1};  // cohomology
  int les = 0;                  // cohomology: long exact sequence through this degree; 0 skips
  int random_order = 0;         // deform: sample a valid deformation of this order

  // trees-verify
  std::size_t d = 0;
  std::size_t max_edges = 2;
  int max_decoration = 2;
  std::string mode = "post-lie";
  std::vector<std::string> t_samples{"0", "1", "1/2", "-1", "3"};
  int deformation_order = 4;
  std::vector<int> scaling;  // empty: parabolic and uniform
  std::vector<std::string> mutations;
  bool antisymmetry = true;
  std::size_t max_witnesses = 16;
};

struct RunResult {
  int exit_code = 0;
  Json report;
  std::string text() const { return report.dump(2) + "\n"; }
};

/// FNV-1a, 64 bit; stable across platforms.
inline std::string fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline bool needs_input(const std::string& command) { return command != "trees-verify"; }

namespace detail {

/// Knobs that influence the report; paths and thread counts do not.
inline Json config_json(const RunConfig& c, const std::string& input) {
  Json j{{"command", c.command}};
  if (!c.action.empty()) j["action"] = c.action;
  if (needs_input(c.command)) j["input_fnv1a64"] = fnv1a64(input);
  if (c.command == "cohomology") {
    j["degrees"] = c.degrees;
    j["les"] = c.les;
  } else if (c.command == "deform") {
    j["random_order"] = c.random_order;
    if (c.random_order > 0) j["seed"] = c.seed;
  } else if (c.command == "trees-verify") {
    j["d"] = c.d;
    j["max_edges"] = c.max_edges;
    j["max_decoration"] = c.max_decoration;
    j["mode"] = c.mode;
    j["t_samples"] = c.t_samples;
    j["deformation_order"] = c.deformation_order;
    j["scaling"] = c.scaling;
    j["mutations"] = c.mutations;
    j["antisymmetry"] = c.antisymmetry;
    j["max_witnesses"] = c.max_witnesses;
  }
  return j;
}

inline Json envelope(const RunConfig& c, const std::string& input) {
  const Json config = config_json(c, input);
  return Json{{"tool", "postlie"}, {"version", kVersion}, {"config", config}, {"config_hash", fnv1a64(config.dump())}};
}

inline Json deformation_json(const FormalDeformation& D) {
  Json pi = Json::array(), omega = Json::array();
  for (int n = 1; n <= D.order; ++n) {
    pi.push_back(quads(D.pi[n]));
    omega.push_back(quads(D.omega[n]));
  }
  return Json{{"pi", pi}, {"omega", omega}};
}

/// {"algebra": algebra, "pi": [quads per order 1..N], "omega": [same]}
inline FormalDeformation parse_deformation(const Json& j, const BilinearMap& tri) {
  const Json& pi = require_array(member(j, "", "pi"), "/pi");
  const Json& omega = require_array(member(j, "", "omega"), "/omega");
  if (pi.size() != omega.size()) throw SchemaError("/omega", "expected as many orders as /pi");
  FormalDeformation D(tri, static_cast<int>(pi.size()));
  for (std::size_t n = 0; n < pi.size(); ++n) {
    D.pi[n + 1] = tag_antisymmetric(parse_quads(pi[n], join("/pi", n), tri.dim()), join("/pi", n));
    D.omega[n + 1] = parse_quads(omega[n], join("/omega", n), tri.dim());
  }
  for (const auto& key : j.items())
    if (key.key() != "algebra" && key.key() != "pi" && key.key() != "omega")
      throw SchemaError(join("", key.key()), "unexpected key");
  return D;
}

inline Json residuals_json(const FormalDeformation& D, bool& holds) {
  Json out = Json::array();
  for (const auto& r : residuals_by_order(D)) {
    const AxiomReport rep = residual_report(r);
    holds = holds && rep.holds;
    Json entry = to_json(rep);
    entry["order"] = r.order;
    out.push_back(entry);
  }
  return out;
}

inline Json run_check(const FiniteAlgebra& a, bool& holds) {
  const BilinearMap tri = product_or_zero(a, "triangle");
  Json checks = Json::object();
  auto add = [&](const std::string& name, const AxiomReport& r) {
    holds = holds && r.holds;
    checks[name] = to_json(r);
  };
  add("pre_lie", check_pre_lie(tri));
  if (a.products.count("bracket")) {
    const BilinearMap& br = a.product("bracket");
    add("jacobi", check_jacobi(br));
    add("post_lie", check_post_lie(br, tri));
  }
  if (a.products.count("pi") || a.products.count("omega"))
    add("deformation_conditions",
        check_deformation_conditions(tri, product_or_zero(a, "pi"), product_or_zero(a, "omega")));
  return checks;
}

inline Json run_mc(const FiniteAlgebra& a, bool& holds) {
  const BilinearMap tri = product_or_zero(a, "triangle");
  const MaurerCartanElement e{product_or_zero(a, "pi"), product_or_zero(a, "omega")};
  const MultiCochain r = mc_residual(tri, e);
  const Vec v = r.to_vector();
  std::size_t nonzero = 0;
  for (const auto& x : v) nonzero += x != 0;
  const bool conditions = check_deformation_conditions(tri, e.pi, e.rho).holds;
  const bool post_lie = check_post_lie(e.pi, tri + e.rho).holds;
  holds = nonzero == 0;
  return Json{{"residual", Json{{"degree", r.degree()}, {"vector", to_json(v)}, {"nonzero", nonzero}}},
              {"residual_zero", nonzero == 0},
              {"conditions_hold", conditions},
              {"post_lie_holds", post_lie},
              {"predicates_agree", (nonzero == 0) == conditions && conditions == post_lie}};
}

inline Json run_cohomology(const RunConfig& c, const FiniteAlgebra& a, bool& holds) {
  const BilinearMap tri = product_or_zero(a, "triangle");
  for (std::size_t n = 0; n < c.degrees.size(); ++n)
    if (c.degrees[n] < 1 || c.degrees[n] > 4)
      throw std::invalid_argument("cohomology degree must be in 1..4, got " + std::to_string(c.degrees[n]));
  require_pre_lie(tri, "cohomology");
  const auto reports = parallel_map(c.degrees.size(), resolve_threads(c.threads),
                                    [&](std::size_t i) { return cohomology_basis(tri, c.degrees[i]); });
  Json out{{"degrees", Json::array()}};
  for (const auto& r : reports) {
    Json reps = Json::array();
    for (const auto& f : r.representatives) reps.push_back(to_json(f.to_vector()));
    Json entry{{"degree", r.degree},     {"dim_cochains", r.dim_cochains}, {"rank_in", r.rank_in},
               {"rank_out", r.rank_out}, {"betti", r.betti},               {"representatives", reps}};
    if (r.degree == 1) {
      const std::size_t der = derivation_space(tri).size();
      entry["derivation_dim"] = der;
      entry["betti_equals_derivation_dim"] = der == r.betti;
      holds = holds && der == r.betti;
    }
    out["degrees"].push_back(entry);
  }
  if (c.les > 0) {
    const LesReport l = les_verify(tri, c.les);
    auto nodes = [](const std::vector<LesNode>& ns) {
      Json arr = Json::array();
      for (const auto& n : ns)
        arr.push_back(Json{{"name", n.name},
                           {"dim", n.dim},
                           {"rank_in", n.rank_in},
                           {"rank_out", n.rank_out},
                           {"composition_zero", n.composition_zero},
                           {"exact", n.exact}});
      return arr;
    };
    Json post = Json::object(), pre = Json::object();
    for (const auto& [n, b] : l.betti_post_lie) post[std::to_string(n)] = b;
    for (const auto& [n, b] : l.betti_pre_lie) pre[std::to_string(n)] = b;
    out["les"] = Json{{"max_degree", l.max_degree}, {"betti_post_lie", post}, {"betti_pre_lie", pre},
                      {"nodes", nodes(l.nodes)},    {"exact", l.exact},       {"exact_with_negated_connecting_map", l.exact_flipped}};
    holds = holds && l.exact;
  }
  return out;
}

inline Json run_deform(const RunConfig& c, const Json& doc, bool& holds) {
  const bool has_deformation = doc.is_object() && doc.contains("algebra");
  const FiniteAlgebra a = parse_algebra(has_deformation ? doc["algebra"] : doc, has_deformation ? "/algebra" : "");
  const BilinearMap tri = product_or_zero(a, "triangle");
  Json out = Json::object();
  FormalDeformation D;
  if (has_deformation) {
    if (c.random_order > 0) throw SchemaError("/", "--random-order expects a bare algebra, not a deformation");
    D = parse_deformation(doc, tri);
  } else {
    if (c.random_order < 1) throw SchemaError("/", "expected {\"algebra\", \"pi\", \"omega\"} (or pass --random-order)");
    RandomSource rs(c.seed);
    auto sample = random_deformation(tri, c.random_order, rs);
    if (!sample) throw PreconditionError("deform: no valid deformation found at order " + std::to_string(c.random_order));
    D = std::move(*sample);
    out["deformation"] = deformation_json(D);
  }
  out["order"] = D.order;
  const std::string action = c.action.empty() ? "residuals" : c.action;
  if (action == "residuals") {
    out["residuals"] = residuals_json(D, holds);
  } else if (action == "infinitesimal") {
    const auto [pi, omega] = infinitesimal(D);
    const auto [first, second] = two_cocycle_residual(tri, pi, omega);
    const bool cocycle = first.is_zero() && second.is_zero();
    holds = cocycle;
    out["infinitesimal"] = Json{{"pi", quads(pi)}, {"omega", quads(omega)}};
    out["two_cocycle"] = cocycle;
  } else if (action == "trivialize") {
    const TrivializeResult r = trivialize(tri, D);
    holds = r.trivial();
    Json phi = Json::array();
    for (int n = 1; n <= r.phi.order; ++n) phi.push_back(to_json(r.phi.phi[n]));
    out["trivial"] = r.trivial();
    out["phi"] = phi;
    out["result"] = deformation_json(r.result);
    if (r.obstruction)
      out["obstruction"] = Json{{"order", r.obstruction->order},
                                {"class_coordinates", to_json(r.obstruction->class_coordinates)},
                                {"representative", to_json(r.obstruction->representative.to_vector())}};
  } else {
    throw std::invalid_argument("unknown deform action '" + action + "'");
  }
  return out;
}

inline int decoration_mass(const DecoratedTree& t) {
  int m = 0;
  for (std::size_t v = 0; v < t.node_count(); ++v)
    for (int x : t.decoration(v)) m += x;
  return m;
}

inline Json run_trees(const RunConfig& c, const Json& doc) {
  const std::string action = c.action;
  Json out = Json::object();
  if (action == "graft" || action == "deform-graft") {
    const DecoratedTree sigma = parse_tree(member(doc, "", "sigma"), "/sigma");
    const MultiIndex a = parse_index(member(doc, "", "a"), "/a", sigma.length());
    const DecoratedTree tau = parse_tree(member(doc, "", "tau"), "/tau", sigma.length());
    if (action == "graft") {
      out["result"] = to_json(graft(sigma, a, tau));
    } else {
      const TreeSum s(sigma), t(tau);
      out["result"] = to_json(deformed_graft(sigma, a, tau));
      Json strata = Json::array();
      for (int k = 0; k <= decoration_mass(tau); ++k) strata.push_back(to_json(deformed_graft_stratum(s, a, t, k)));
      while (!strata.empty() && strata.back().empty()) strata.erase(strata.end() - 1);
      out["strata"] = strata;
      if (auto it = doc.find("t"); it != doc.end()) out["t_weighted"] = to_json(deformed_graft_t(s, a, t, as_rational(*it, "/t")));
    }
    for (const auto& key : doc.items())
      if (key.key() != "sigma" && key.key() != "a" && key.key() != "tau" && !(key.key() == "t" && action == "deform-graft"))
        throw SchemaError(join("", key.key()), "unexpected key");
  } else if (action == "uparrow") {
    const DecoratedTree tau = parse_tree(member(doc, "", "tau"), "/tau");
    const auto i = as_int(member(doc, "", "i"), "/i", 0, static_cast<long>(tau.length()) - 1);
    out["result"] = to_json(uparrow_i(tau, static_cast<std::size_t>(i)));
    for (const auto& key : doc.items())
      if (key.key() != "tau" && key.key() != "i") throw SchemaError(join("", key.key()), "unexpected key");
  } else if (action == "products") {
    const BasisElement x = parse_basis(member(doc, "", "x"), "/x");
    const BasisElement y = parse_basis(member(doc, "", "y"), "/y", x.length());
    out["triangle"] = to_json(v_products(x, y, TreeProduct::triangle));
    out["hat_triangle"] = to_json(v_products(x, y, TreeProduct::hat_triangle));
    out["bracket0"] = to_json(v_products(x, y, TreeProduct::bracket0));
    out["bracket1"] = to_json(v_products(x, y, TreeProduct::bracket1));
    const auto& alg = postlie::detail::default_tree_algebra();
    out["pi"] = to_json(alg.pi(x, y));
    Json omega = Json::array();
    const auto& strata = alg.strata(x, y);
    for (std::size_t k = 1; k < strata.size(); ++k) omega.push_back(to_json(strata[k]));
    out["omega"] = omega;
    if (auto it = doc.find("t"); it != doc.end()) {
      require_array(*it, "/t");
      Json fam = Json::array();
      for (std::size_t n = 0; n < it->size(); ++n) {
        const Rational t = as_rational((*it)[n], join("/t", n));
        fam.push_back(Json{{"t", to_string(t)},
                           {"hat_triangle_t", to_json(t_family(x, y, t, TFamilyProduct::hat_triangle_t))},
                           {"bracket1_t", to_json(t_family(x, y, t, TFamilyProduct::bracket1_t))}});
      }
      out["t_family"] = fam;
    }
    for (const auto& key : doc.items())
      if (key.key() != "x" && key.key() != "y" && key.key() != "t") throw SchemaError(join("", key.key()), "unexpected key");
  } else {
    throw std::invalid_argument("unknown trees action '" + action + "' (graft, deform-graft, uparrow, products)");
  }
  return out;
}

inline Mutations parse_mutations(const std::vector<std::string>& names) {
  Mutations m;
  for (const auto& n : names) {
    if (n == "graft-onto-noise-leaves")
      m.graft_onto_noise_leaves = true;
    else if (n == "uparrow-noise-leaves")
      m.uparrow_noise_leaves = true;
    else if (n == "clamp-edge-cutoff")
      m.clamp_edge_cutoff = true;
    else if (n == "unit-binomials")
      m.unit_binomials = true;
    else
      throw std::invalid_argument("unknown mutation '" + n + "'");
  }
  return m;
}

inline Json run_trees_verify(const RunConfig& c, bool& holds) {
  TreeVerifyConfig cfg;
  cfg.d = c.d;
  cfg.max_edges = c.max_edges;
  cfg.max_decoration = c.max_decoration;
  if (c.mode == "post-lie")
    cfg.mode = TreeSweepMode::post_lie;
  else if (c.mode == "pre-lie")
    cfg.mode = TreeSweepMode::pre_lie;
  else
    throw std::invalid_argument("unknown mode '" + c.mode + "' (post-lie, pre-lie)");
  cfg.t_samples.clear();
  for (const auto& t : c.t_samples) cfg.t_samples.push_back(parse_rational(t));
  cfg.deformation_order = c.deformation_order;
  if (!c.scaling.empty()) {
    if (c.scaling.size() != c.d + 1) throw std::invalid_argument("scaling needs d + 1 entries");
    cfg.scalings.push_back(Scaling(c.scaling));
  }
  cfg.mutations = parse_mutations(c.mutations);
  cfg.antisymmetry = c.antisymmetry;
  cfg.max_witnesses = c.max_witnesses;

  const TreeAxiomReport r = verify_axioms_truncated(cfg);
  holds = r.holds;
  Json basis = Json::array();
  for (const auto& b : enumerate_basis(c.d, c.max_edges, c.max_decoration)) basis.push_back(b.key());
  Json witnesses = Json::array();
  for (const auto& w : r.witnesses)
    witnesses.push_back(Json{{"axiom", w.axiom},
                             {"triple", Json::array({w.triple[0], w.triple[1], w.triple[2]})},
                             {"defect", to_json(w.defect)}});
  return Json{{"basis_size", r.basis_size}, {"basis", basis},         {"pairs", r.pairs},
              {"triples", r.triples},       {"evaluations", r.evaluations}, {"failures", r.failures},
              {"witnesses", witnesses}};
}

}  // namespace detail

/// Runs one command on the given input text. Never throws for bad input:
/// schema violations give exit 2, failed checks and rejected preconditions exit 1.
inline RunResult run(const RunConfig& c, const std::string& input) {
  RunResult res;
  res.report = detail::envelope(c, input);
  bool holds = true;
  try {
    Json body;
    if (c.command == "trees-verify") {
      body = detail::run_trees_verify(c, holds);
    } else if (c.command == "check" || c.command == "mc" || c.command == "cohomology" || c.command == "deform" ||
               c.command == "trees") {
      const Json doc = parse_document(input);
      if (c.command == "check")
        body = Json{{"checks", detail::run_check(parse_algebra(doc), holds)}};
      else if (c.command == "mc")
        body = detail::run_mc(parse_algebra(doc), holds);
      else if (c.command == "cohomology")
        body = detail::run_cohomology(c, parse_algebra(doc), holds);
      else if (c.command == "deform")
        body = detail::run_deform(c, doc, holds);
      else
        body = detail::run_trees(c, doc);
    } else {
      throw std::invalid_argument("unknown command '" + c.command + "'");
    }
    for (auto& [k, v] : body.items()) res.report[k] = v;
    res.report["holds"] = holds;
    res.exit_code = holds ? 0 : 1;
  } catch (const SchemaError& e) {
    res.report["holds"] = false;
    res.report["error"] = Json{{"kind", "schema"}, {"path", e.path()}, {"message", e.message()}};
    res.exit_code = 2;
  } catch (const PreconditionError& e) {
    res.report["holds"] = false;
    res.report["error"] = Json{{"kind", "precondition"}, {"message", e.what()}, {"witnesses", to_json(e.report())["witnesses"]}};
    res.exit_code = 1;
  } catch (const std::invalid_argument& e) {
    res.report["holds"] = false;
    res.report["error"] = Json{{"kind", "invalid_argument"}, {"message", e.what()}};
    res.exit_code = 2;
  }
  return res;
}

inline std::string read_input(const std::string& path) {
  if (path == "-") return std::string(std::istreambuf_iterator<char>(std::cin), {});
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

/// File/stdin wrapper around run(); the report is written in every case.
inline int run_io(const RunConfig& c) {
  std::string input;
  RunResult r;
  try {
    if (needs_input(c.command)) input = read_input(c.input);
    r = run(c, input);
  } catch (const std::runtime_error& e) {
    r.report = detail::envelope(c, input);
    r.report["holds"] = false;
    r.report["error"] = Json{{"kind", "io"}, {"message", e.what()}};
    r.exit_code = 2;
  }
  if (r.report.contains("error")) {
    const Json& err = r.report["error"];
    std::cerr << "postlie: ";
    if (err.contains("path")) std::cerr << err["path"].get<std::string>() << ": ";
    std::cerr << err["message"].get<std::string>() << "\n";
  }
  const std::string text = r.text();
  if (c.output == "-") {
    std::cout << text;
  } else {
    std::ofstream out(c.output, std::ios::binary);
    if (!out) {
      std::cerr << "postlie: cannot write " << c.output << "\n";
      std::cout << text;
      return 2;
    }
    out << text;
  }
  return r.exit_code;
}

}  // namespace postlie::cli
