#pragma once

#include <fstream>
#include <future>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dgeom/atlas.hpp"
#include "dgeom/corners.hpp"
#include "dgeom/orientcount.hpp"

namespace dgeom {

using Json = nlohmann::json;

struct SceneError : std::runtime_error {
  explicit SceneError(const std::string& what) : std::runtime_error(what) {}
};

// ---------------------------------------------------------------------------
// serialization: rationals as "p/q" strings, polynomials as sparse term
// lists [[num, den, [e_1 .. e_n]], ...]
// ---------------------------------------------------------------------------

inline Rat rat_from_json(const Json& j) {
  if (j.is_number_integer()) return Rat(static_cast<long long>(j.get<long long>()));
  if (j.is_string()) return parse_rat(j.get<std::string>());
  throw SceneError("rational must be an integer or a 'p/q' string");
}

inline Json rat_to_json(const Rat& r) { return format_rat(r); }

inline Polynomial poly_from_json(const Json& j, int nvars) {
  if (!j.is_array()) throw SceneError("polynomial must be a term list");
  Polynomial p(nvars);
  for (const auto& term : j) {
    if (!term.is_array() || term.size() != 3)
      throw SceneError("polynomial term must be [num, den, [exponents]]");
    Rat num = rat_from_json(term[0]);
    Rat den = rat_from_json(term[1]);
    if (den == 0) throw SceneError("polynomial term has zero denominator");
    const auto& ev = term[2];
    if (!ev.is_array() || static_cast<int>(ev.size()) != nvars)
      throw SceneError("polynomial exponent vector has the wrong length");
    Exp e;
    for (const auto& x : ev) e.push_back(x.get<unsigned>());
    p.add_term(e, num / den);
  }
  return p;
}

inline Json poly_to_json(const Polynomial& p) {
  Json out = Json::array();
  for (const auto& [e, c] : p.terms()) {
    Json ev = Json::array();
    for (unsigned x : e) ev.push_back(x);
    out.push_back(Json::array({numerator(c).str(), denominator(c).str(), ev}));
  }
  return out;
}

inline std::vector<Polynomial> polys_from_json(const Json& j, int nvars) {
  std::vector<Polynomial> out;
  for (const auto& pj : j) out.push_back(poly_from_json(pj, nvars));
  return out;
}

inline PolyMat polymat_from_json(const Json& j, int rows, int cols, int nvars) {
  if (!j.is_array() || static_cast<int>(j.size()) != rows)
    throw SceneError("matrix row count mismatch");
  PolyMat m(rows, cols, nvars);
  for (int r = 0; r < rows; ++r) {
    if (!j[static_cast<size_t>(r)].is_array() ||
        static_cast<int>(j[static_cast<size_t>(r)].size()) != cols)
      throw SceneError("matrix column count mismatch");
    for (int c = 0; c < cols; ++c)
      m.at(r, c) = poly_from_json(j[static_cast<size_t>(r)][static_cast<size_t>(c)], nvars);
  }
  return m;
}

inline Json polymat_to_json(const PolyMat& m) {
  Json out = Json::array();
  for (int r = 0; r < m.rows; ++r) {
    Json row = Json::array();
    for (int c = 0; c < m.cols; ++c) row.push_back(poly_to_json(m.at(r, c)));
    out.push_back(std::move(row));
  }
  return out;
}

inline Json qmat_to_json(const QMat& m) {
  Json out = Json::array();
  for (int r = 0; r < m.rows; ++r) {
    Json row = Json::array();
    for (int c = 0; c < m.cols; ++c) row.push_back(rat_to_json(m.at(r, c)));
    out.push_back(std::move(row));
  }
  return out;
}

inline QVec point_from_json(const Json& j) {
  QVec v;
  for (const auto& x : j) v.push_back(rat_from_json(x));
  return v;
}

inline Json point_to_json(const QVec& v) {
  Json out = Json::array();
  for (const auto& x : v) out.push_back(rat_to_json(x));
  return out;
}

// ---------------------------------------------------------------------------
// scene: named declarations plus an ordered task list
// ---------------------------------------------------------------------------

struct NamedOneMor {
  std::string src, dst;
  StdOneMor mor;
};

struct NamedTwoMor {
  std::string m1, m2;  // endpoint morphism names
  StdTwoMor two;
};

struct NamedWitnesses {
  std::string model;
  WitnessSet w;
};

struct NamedAction {
  std::string model;
  GroupAction action;
};

struct Scene {
  std::map<std::string, StdModel> models;
  std::map<std::string, PolyMap> poly_maps;
  std::map<std::string, NamedOneMor> one_mors;
  std::map<std::string, NamedTwoMor> two_mors;
  std::map<std::string, NamedWitnesses> witnesses;
  std::map<std::string, OrientedStdModel> oriented;
  std::map<std::string, CornerModel> corner_models;
  std::map<std::string, CornerMap> corner_maps;
  std::map<std::string, NamedAction> actions;
  std::map<std::string, Atlas> atlases;
  std::vector<Json> tasks;
  Json canonical = Json::object();  // normalized declaration forms

  template <typename M>
  const typename M::mapped_type& get(const M& m, const std::string& name,
                                     const char* kind) const {
    auto it = m.find(name);
    if (it == m.end()) throw SceneError(std::string("unresolved ") + kind + ": " + name);
    return it->second;
  }

  const StdModel& model(const std::string& n) const { return get(models, n, "model"); }
  const NamedOneMor& one_mor(const std::string& n) const { return get(one_mors, n, "morphism"); }
  const NamedWitnesses& witness(const std::string& n) const {
    return get(witnesses, n, "witness set");
  }
};

/// Parses declarations layer by layer (models first, then everything that
/// refers to them), so declaration order in the file never matters and
/// cyclic definitions cannot arise.
inline Scene parse_scene(const Json& root) {
  if (!root.is_object()) throw SceneError("scene must be a JSON object");
  Scene s;
  const Json decls = root.value("declarations", Json::object());

  auto of_type = [&](const char* t) {
    std::vector<std::pair<std::string, Json>> out;
    for (auto it = decls.begin(); it != decls.end(); ++it) {
      if (!it.value().is_object()) throw SceneError("declaration must be an object: " + it.key());
      if (it.value().value("type", "") == t) out.emplace_back(it.key(), it.value());
    }
    return out;
  };

  for (auto& [name, d] : of_type("std_model")) {
    int n = d.at("n"), k = d.at("k");
    const StdModel& m =
        s.models.emplace(name, make_std_model(n, k, polys_from_json(d.at("s"), n))).first->second;
    Json sj = Json::array();
    for (const auto& c : m.s) sj.push_back(poly_to_json(c));
    s.canonical[name] = Json{{"type", "std_model"}, {"n", n}, {"k", k}, {"s", sj}};
  }
  for (auto& [name, d] : of_type("poly_map")) {
    int n = d.at("n");
    const PolyMap& pm =
        s.poly_maps.emplace(name, PolyMap(n, polys_from_json(d.at("components"), n)))
            .first->second;
    Json cj = Json::array();
    for (const auto& c : pm.components) cj.push_back(poly_to_json(c));
    s.canonical[name] = Json{{"type", "poly_map"}, {"n", n}, {"components", cj}};
  }
  for (auto& [name, d] : of_type("corner_model")) {
    const CornerModel& m =
        s.corner_models.emplace(name, CornerModel(d.at("k"), d.at("n"))).first->second;
    s.canonical[name] = Json{{"type", "corner_model"}, {"k", m.k}, {"n", m.n}};
  }
  for (auto& [name, d] : of_type("one_mor")) {
    const StdModel& X = s.model(d.at("src"));
    const StdModel& Y = s.model(d.at("dst"));
    StdOneMor m{PolyMap(X.n, polys_from_json(d.at("f"), X.n)),
                polymat_from_json(d.at("fhat"), Y.k, X.k, X.n)};
    Json fj = Json::array();
    for (const auto& c : m.f.components) fj.push_back(poly_to_json(c));
    s.canonical[name] = Json{{"type", "one_mor"},
                             {"src", d.at("src")},
                             {"dst", d.at("dst")},
                             {"f", fj},
                             {"fhat", polymat_to_json(m.fhat)}};
    s.one_mors.emplace(name, NamedOneMor{d.at("src"), d.at("dst"), std::move(m)});
  }
  for (auto& [name, d] : of_type("witness_set")) {
    const StdModel& X = s.model(d.at("model"));
    std::vector<QVec> pts;
    for (const auto& pj : d.at("points")) pts.push_back(point_from_json(pj));
    Json ptj = Json::array();
    for (const auto& p : pts) ptj.push_back(point_to_json(p));
    s.canonical[name] =
        Json{{"type", "witness_set"}, {"model", d.at("model")}, {"points", ptj}};
    s.witnesses.emplace(name, NamedWitnesses{d.at("model"), make_witness_set(X, pts)});
  }
  for (auto& [name, d] : of_type("two_mor")) {
    const NamedOneMor& m1 = s.one_mor(d.at("m1"));
    const NamedOneMor& m2 = s.one_mor(d.at("m2"));
    if (m1.src != m2.src || m1.dst != m2.dst)
      throw SceneError("two_mor endpoints disagree: " + name);
    const StdModel& X = s.model(m1.src);
    const StdModel& Y = s.model(m1.dst);
    StdTwoMor two{polymat_from_json(d.at("lambda"), Y.n, X.k, X.n)};
    s.canonical[name] = Json{{"type", "two_mor"},
                             {"m1", d.at("m1")},
                             {"m2", d.at("m2")},
                             {"lambda", polymat_to_json(two.lambda)}};
    s.two_mors.emplace(name, NamedTwoMor{d.at("m1"), d.at("m2"), std::move(two)});
  }
  for (auto& [name, d] : of_type("oriented_model")) {
    int sign = d.value("sign", 1);
    s.canonical[name] =
        Json{{"type", "oriented_model"}, {"model", d.at("model")}, {"sign", sign}};
    s.oriented.emplace(name, oriented(s.model(d.at("model")), sign));
  }
  for (auto& [name, d] : of_type("corner_map")) {
    const CornerModel& src = s.get(s.corner_models, d.at("src"), "corner model");
    const CornerModel& dst = s.get(s.corner_models, d.at("dst"), "corner model");
    std::vector<QVec> wit;
    for (const auto& pj : d.value("witnesses", Json::array())) wit.push_back(point_from_json(pj));
    CornerMapCheck chk =
        validate_corner_map(src, dst, PolyMap(src.n, polys_from_json(d.at("f"), src.n)), wit);
    if (!chk) throw SceneError("corner map '" + name + "' rejected: " + chk.rejection);
    Json fj = Json::array();
    for (const auto& c : chk.map->f.components) fj.push_back(poly_to_json(c));
    Json wj = Json::array();
    for (const auto& p : wit) wj.push_back(point_to_json(p));
    s.canonical[name] = Json{
        {"type", "corner_map"}, {"src", d.at("src")}, {"dst", d.at("dst")}, {"f", fj},
        {"witnesses", wj}};
    s.corner_maps.emplace(name, *chk.map);
  }
  for (auto& [name, d] : of_type("group_action")) {
    const CornerModel& m = s.get(s.corner_models, d.at("model"), "corner model");
    GroupAction a;
    for (const auto& ej : d.at("elements")) {
      GroupAction::Elem e;
      for (const auto& p : ej.at("perm")) e.perm.push_back(p.get<int>());
      int free_dim = m.n - m.k;
      e.mat = QMat(free_dim, free_dim);
      const auto& rows = ej.value("mat", Json::array());
      for (int r = 0; r < free_dim; ++r)
        for (int c = 0; c < free_dim; ++c)
          e.mat.at(r, c) = rat_from_json(rows.at(static_cast<size_t>(r)).at(static_cast<size_t>(c)));
      a.elems.push_back(std::move(e));
    }
    Json ej = Json::array();
    for (const auto& e : a.elems)
      ej.push_back(Json{{"perm", e.perm}, {"mat", qmat_to_json(e.mat)}});
    s.canonical[name] =
        Json{{"type", "group_action"}, {"model", d.at("model")}, {"elements", ej}};
    s.actions.emplace(name, NamedAction{d.at("model"), std::move(a)});
  }
  for (auto& [name, d] : of_type("atlas")) {
    Atlas a;
    for (const auto& cj : d.at("charts")) a.charts.push_back(s.model(cj.get<std::string>()));
    for (const auto& oj : d.value("overlaps", Json::array())) {
      Overlap ov;
      ov.i = oj.at("i");
      ov.j = oj.at("j");
      const StdModel& Xi = a.charts.at(static_cast<size_t>(ov.i));
      const StdModel& Xj = a.charts.at(static_cast<size_t>(ov.j));
      if (oj.contains("principal_open"))
        ov.dom = OverlapDomain::principal(poly_from_json(oj.at("principal_open"), Xi.n));
      ov.e = PolyMap(Xi.n, polys_from_json(oj.at("e"), Xi.n));
      ov.ehat = polymat_from_json(oj.at("ehat"), Xj.k, Xi.k, Xi.n);
      for (const auto& pj : oj.value("witnesses", Json::array()))
        ov.witnesses.push_back(point_from_json(pj));
      a.overlaps.push_back(std::move(ov));
    }
    for (const auto& tj : d.value("assertions", Json::array()))
      a.assertions.push_back(tj.get<std::string>());
    Json ovj = Json::array();
    for (const auto& ov : a.overlaps) {
      Json oj{{"i", ov.i}, {"j", ov.j}, {"ehat", polymat_to_json(ov.ehat)}};
      Json ej = Json::array();
      for (const auto& c : ov.e.components) ej.push_back(poly_to_json(c));
      oj["e"] = ej;
      if (!ov.dom.whole) oj["principal_open"] = poly_to_json(ov.dom.p);
      Json wj = Json::array();
      for (const auto& p : ov.witnesses) wj.push_back(point_to_json(p));
      oj["witnesses"] = wj;
      ovj.push_back(std::move(oj));
    }
    s.canonical[name] = Json{{"type", "atlas"},
                             {"charts", d.at("charts")},
                             {"overlaps", ovj},
                             {"assertions", a.assertions}};
    s.atlases.emplace(name, std::move(a));
  }

  // reject declarations of unknown type
  for (auto it = decls.begin(); it != decls.end(); ++it) {
    std::string t = it.value().value("type", "");
    static const std::vector<std::string> known = {
        "std_model", "poly_map", "corner_model", "one_mor", "witness_set", "two_mor",
        "oriented_model", "corner_map", "group_action", "atlas"};
    if (std::find(known.begin(), known.end(), t) == known.end())
      throw SceneError("unknown declaration type '" + t + "' for " + it.key());
  }

  for (const auto& t : root.value("tasks", Json::array())) s.tasks.push_back(t);
  return s;
}

/// Canonical form of a parsed scene: rationals normalized, polynomial terms
/// in canonical order, defaults filled. A fixed point of parse-then-serialize.
inline Json serialize_scene(const Scene& s) {
  Json out;
  out["declarations"] = s.canonical;
  out["tasks"] = s.tasks;
  return out;
}

inline Scene load_scene(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SceneError("cannot open scene file: " + path);
  Json j;
  try {
    in >> j;
  } catch (const Json::exception& e) {
    throw SceneError(std::string("scene parse error: ") + e.what());
  }
  return parse_scene(j);
}

struct RunOptions {
  int jobs = 1;
  bool emit_certificates = false;
  int max_degree = 8;          // localization cap for atlas checks
  uint64_t seed = 0;           // randomized property tasks
  std::string task_filter;     // run only the named task when nonempty
};

namespace scene_detail {

// deterministic generator for property tasks (splitmix64)
struct Rng64 {
  uint64_t state;
  uint64_t next() {
    uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  int below(int n) { return n <= 1 ? 0 : static_cast<int>(next() % static_cast<uint64_t>(n)); }
  int range(int lo, int hi) { return lo + below(hi - lo + 1); }
};

inline bool subset_match(const Json& expect, const Json& result) {
  if (expect.is_object()) {
    if (!result.is_object()) return false;
    for (auto it = expect.begin(); it != expect.end(); ++it) {
      if (!result.contains(it.key())) return false;
      if (!subset_match(it.value(), result.at(it.key()))) return false;
    }
    return true;
  }
  return expect == result;
}

}  // namespace scene_detail

/// Executes one task object and returns its result payload.
inline Json run_task(const Scene& s, const Json& t, const RunOptions& opt) {
  std::string op = t.at("op");
  Json r;
  r["op"] = op;

  auto point_base_of = [&](const std::string& wname) {
    const NamedWitnesses& nw = s.witness(wname);
    return point_base(s.model(nw.model), nw.w);
  };

  if (op == "validate_one_mor") {
    const NamedOneMor& m = s.one_mor(t.at("morphism"));
    Verdict v = validate_one_mor(s.model(m.src), s.model(m.dst), m.mor);
    r["pass"] = v.ok;
    if (!v.ok && opt.emit_certificates) {
      r["reason"] = v.reason;
      if (v.remainder) r["remainder"] = poly_to_json(*v.remainder);
    }
  } else if (op == "one_mor_equal") {
    const NamedOneMor& a = s.one_mor(t.at("m1"));
    const NamedOneMor& b = s.one_mor(t.at("m2"));
    r["equal"] = one_mor_equal(s.model(a.src), s.model(a.dst), a.mor, b.mor);
  } else if (op == "validate_two_mor") {
    const NamedTwoMor& tw = s.get(s.two_mors, t.at("two"), "two-morphism");
    const NamedOneMor& m1 = s.one_mor(tw.m1);
    const NamedOneMor& m2 = s.one_mor(tw.m2);
    Verdict v = validate_two_mor(s.model(m1.src), s.model(m1.dst), m1.mor, m2.mor, tw.two);
    r["pass"] = v.ok;
    if (!v.ok && opt.emit_certificates && v.remainder) r["remainder"] = poly_to_json(*v.remainder);
  } else if (op == "compose_one") {
    const NamedOneMor& g = s.one_mor(t.at("g"));
    const NamedOneMor& f = s.one_mor(t.at("f"));
    if (f.dst != g.src) throw SceneError("compose_one: morphisms are not composable");
    StdOneMor out = compose_one(s.model(f.src), s.model(f.dst), s.model(g.dst), g.mor, f.mor);
    r["pass"] = true;
    Json fj = Json::array();
    for (const auto& c : out.f.components) fj.push_back(poly_to_json(c));
    r["f"] = fj;
    r["fhat"] = polymat_to_json(out.fhat);
  } else if (op == "etale") {
    const NamedOneMor& m = s.one_mor(t.at("morphism"));
    const NamedWitnesses& w = s.witness(t.at("witnesses"));
    EtaleVerdict v = etale_at(s.model(m.src), s.model(m.dst), m.mor, w.w);
    r["etale"] = v.etale;
    Json pts = Json::array();
    for (size_t i = 0; i < v.per_point.size(); ++i) {
      Json pj;
      pj["etale"] = static_cast<bool>(v.per_point[i]);
      if (!v.reasons[i].empty()) pj["reason"] = v.reasons[i];
      pts.push_back(pj);
    }
    r["points"] = pts;
    if (opt.emit_certificates) {
      // splitting data of the induced map on cotangent complexes, per point
      BaseContext base = point_base(s.model(m.src), w.w);
      OmegaMorphism om = omega_of_morphism(s.model(m.src), s.model(m.dst), m.mor, base);
      auto witness = is_equivalence(om.pullback, om.cotangent, om.mor, base);
      if (witness) {
        Json wj = Json::array();
        for (size_t i = 0; i < base.pts().size(); ++i)
          wj.push_back(Json{{"gamma", qmat_to_json(witness->gamma.per_point[i])},
                            {"delta", qmat_to_json(witness->delta.per_point[i])}});
        r["splitting"] = wj;
      }
    }
  } else if (op == "is_equivalence") {
    const NamedOneMor& m = s.one_mor(t.at("morphism"));
    const NamedWitnesses& wx = s.witness(t.at("wx"));
    const NamedWitnesses& wy = s.witness(t.at("wy"));
    r["equivalence"] = is_equivalence_std(s.model(m.src), s.model(m.dst), m.mor, wx.w, wy.w);
  } else if (op == "classify_morphism") {
    const NamedOneMor& m = s.one_mor(t.at("morphism"));
    BaseContext base = t.contains("witnesses") ? point_base_of(t.at("witnesses"))
                                               : s.model(m.src).ring_base();
    MorphismClass c = classify_morphism(s.model(m.src), s.model(m.dst), m.mor, base);
    r["w_submersion"] = c.w_submersion;
    r["submersion"] = c.submersion;
    r["w_immersion"] = c.w_immersion;
    r["immersion"] = c.immersion;
  } else if (op == "is_manifold") {
    const StdModel& m = s.model(t.at("model"));
    BaseContext base =
        t.contains("witnesses") ? point_base_of(t.at("witnesses")) : m.ring_base();
    r["manifold"] = is_manifold(m, base);
  } else if (op == "fibre_product") {
    const StdModel& X = s.model(t.at("x"));
    const StdModel& Y = s.model(t.at("y"));
    const PolyMap& gX = s.get(s.poly_maps, t.at("gx"), "polynomial map");
    const PolyMap& gY = s.get(s.poly_maps, t.at("gy"), "polynomial map");
    FibreSquare sq = fibre_product_affine(X, gX, Y, gY);
    r["vdim"] = sq.W.vdim();
    r["n"] = sq.W.n;
    r["k"] = sq.W.k;
    r["vdim_check"] = vdim_check(sq);
    // provenance: the inputs and the block layout of the stacked section
    r["inputs"] = Json{{"x", t.at("x")}, {"gx", t.at("gx")}, {"y", t.at("y")}, {"gy", t.at("gy")}};
    r["blocks"] = Json{{"x_section", Json::array({0, X.k})},
                       {"y_section", Json::array({X.k, X.k + Y.k})},
                       {"leg_difference", Json::array({X.k + Y.k, sq.W.k})},
                       {"x_vars", Json::array({0, X.n})},
                       {"y_vars", Json::array({X.n, sq.W.n})}};
    if (opt.emit_certificates) {
      Json sj = Json::array();
      for (const auto& c : sq.W.s) sj.push_back(poly_to_json(c));
      r["section"] = sj;
    }
  } else if (op == "signed_count") {
    const OrientedStdModel& o = s.get(s.oriented, t.at("oriented"), "oriented model");
    const NamedWitnesses& w = s.witness(t.at("witnesses"));
    CountCertificate c = signed_count(o, w.w);
    r["value"] = c.value;
    Json zs = Json::array();
    for (const auto& [pt, sg] : c.zero_signs)
      zs.push_back(Json{{"point", point_to_json(pt)}, {"sign", sg}});
    r["zero_signs"] = zs;
  } else if (op == "degree_1d") {
    Polynomial p = poly_from_json(t.at("s"), 1);
    CountCertificate c = degree_1d(p, rat_from_json(t.at("window").at(0)),
                                   rat_from_json(t.at("window").at(1)));
    r["value"] = c.value;
  } else if (op == "intersection_number") {
    const OrientedStdModel& ox = s.get(s.oriented, t.at("ox"), "oriented model");
    const OrientedStdModel& oy = s.get(s.oriented, t.at("oy"), "oriented model");
    const PolyMap& gX = s.get(s.poly_maps, t.at("gx"), "polynomial map");
    const PolyMap& gY = s.get(s.poly_maps, t.at("gy"), "polynomial map");
    std::vector<std::pair<QVec, QVec>> pairs;
    for (const auto& pj : t.value("pairs", Json::array()))
      pairs.emplace_back(point_from_json(pj.at(0)), point_from_json(pj.at(1)));
    r["value"] = intersection_number(ox, gX, oy, gY, pairs).value;
  } else if (op == "boundary") {
    const CornerModel& m = s.get(s.corner_models, t.at("model"), "corner model");
    PieceObject b = boundary(m);
    r["faces"] = b.size();
    if (t.contains("multiplicity_at"))
      r["multiplicity"] = boundary_multiplicity(m, point_from_json(t.at("multiplicity_at")));
  } else if (op == "corners") {
    const CornerModel& m = s.get(s.corner_models, t.at("model"), "corner model");
    PieceObject c = corners(m);
    r["pieces"] = c.size();
    std::map<int, int> by_degree;
    for (const auto& p : c.pieces) by_degree[static_cast<int>(p.subset.size())]++;
    Json dj = Json::object();
    for (const auto& [deg, cnt] : by_degree) dj[std::to_string(deg)] = cnt;
    r["by_degree"] = dj;
  } else if (op == "classify_corner_map") {
    const CornerMap& cm = s.get(s.corner_maps, t.at("map"), "corner map");
    CornerClass c = classify_map(cm);
    r["simple"] = c.simple;
    r["semisimple"] = c.semisimple;
    r["flat"] = c.flat;
    Json ftj = Json::array();
    for (const auto& fe : cm.face_table) {
      if (fe.kind == FaceEntry::Kind::Zero)
        ftj.push_back(Json{{"kind", "zero"}});
      else
        ftj.push_back(Json{{"kind", "face"}, {"i", fe.i}, {"unit", poly_to_json(fe.u)}});
    }
    r["face_table"] = ftj;
  } else if (op == "corner_functor") {
    const CornerMap& cm = s.get(s.corner_maps, t.at("map"), "corner map");
    CornerVariant variant =
        t.value("variant", "C") == std::string("hat") ? CornerVariant::Hat : CornerVariant::Plain;
    CornerImage img = corner_functor(cm, variant);
    Json pieces = Json::array();
    for (const auto& p : img.pieces)
      pieces.push_back(Json{{"src", p.src_subset}, {"dst", p.dst_subset}});
    r["pieces"] = pieces;
  } else if (op == "transverse_check") {
    const CornerMap& g = s.get(s.corner_maps, t.at("g"), "corner map");
    const CornerMap& h = s.get(s.corner_maps, t.at("h"), "corner map");
    std::vector<std::pair<QVec, QVec>> pairs;
    for (const auto& pj : t.at("pairs"))
      pairs.emplace_back(point_from_json(pj.at(0)), point_from_json(pj.at(1)));
    TransversalityVerdict v = transverse_check(g, h, pairs);
    r["transverse"] = v.transverse;
    r["strongly_transverse"] = v.strongly_transverse;
  } else if (op == "fibre_boundary_terms") {
    const CornerMap& g = s.get(s.corner_maps, t.at("g"), "corner map");
    const CornerMap& h = s.get(s.corner_maps, t.at("h"), "corner map");
    FibreTerms ft = fibre_boundary_terms(g, h);
    r["dim_w"] = ft.dim_w;
    r["formula"] = ft.boundary_formula;
    Json bt = Json::array();
    for (const auto& term : ft.boundary_terms)
      bt.push_back(Json{{"description", term.description},
                        {"x_face", term.x_face},
                        {"y_face", term.y_face},
                        {"sign", term.sign}});
    r["boundary_terms"] = bt;
    bool degree_ok = true;
    Json ct = Json::array();
    for (const auto& term : ft.corner_table) {
      degree_ok = degree_ok &&
                  term.degree == static_cast<int>(term.x_subset.size() + term.y_subset.size() -
                                                  term.z_subset.size()) &&
                  term.formal_dim == ft.dim_w - term.degree;
      ct.push_back(Json{{"x", term.x_subset},
                        {"y", term.y_subset},
                        {"z", term.z_subset},
                        {"degree", term.degree},
                        {"dim", term.formal_dim}});
    }
    r["corner_table"] = ct;
    r["degree_check"] = degree_ok;
  } else if (op == "fixed_locus") {
    const CornerModel& m = s.get(s.corner_models, t.at("model"), "corner model");
    const NamedAction& a = s.get(s.actions, t.at("action"), "group action");
    FixedLocus fl = fixed_locus(m, a.action);
    r["fixed_k"] = fl.fixed.pieces[0].model.k;
    r["fixed_n"] = fl.fixed.pieces[0].model.n;
    r["boundary_fixed_pieces"] = fl.boundary_fixed.size();
    r["fixed_boundary_pieces"] = fl.fixed_boundary.size();
    Json degs = Json::array();
    for (const auto& p : fl.fixed_boundary.pieces) degs.push_back(p.subset.size());
    r["fixed_boundary_ambient_degrees"] = degs;
  } else if (op == "atlas_check") {
    const Atlas& a = s.get(s.atlases, t.at("atlas"), "atlas");
    AtlasReport rep = atlas_report(a, opt.max_degree);
    r["pass"] = rep.pass;
    r["vdim"] = rep.vdim;
    Json ovs = Json::array();
    for (const auto& ov : rep.overlaps) {
      Json oj{{"i", ov.i},
              {"j", ov.j},
              {"congruence", ov.congruence_ok},
              {"exactness", ov.exactness_ok}};
      if (opt.emit_certificates && ov.remainder) oj["remainder"] = poly_to_json(*ov.remainder);
      if (opt.emit_certificates && !ov.exactness_ok) oj["witness_reasons"] = ov.witness_reasons;
      ovs.push_back(oj);
    }
    r["overlaps"] = ovs;
    Json trs = Json::array();
    for (const auto& tr : rep.triples) {
      Json tj{{"i", tr.i}, {"j", tr.j}, {"k", tr.k}, {"pass", tr.pass()}};
      if (opt.emit_certificates && tr.remainder) tj["remainder"] = poly_to_json(*tr.remainder);
      trs.push_back(tj);
    }
    r["triples"] = trs;
    r["assertions"] = rep.assertions;
  } else if (op == "prop_vdim_additivity") {
    // seeded randomized audit of dimension additivity for fibre squares
    int count = t.value("count", 100);
    scene_detail::Rng64 rng{opt.seed + 0x5eedull};
    bool all = true;
    for (int trial = 0; trial < count; ++trial) {
      int n = rng.range(0, 4), m2 = rng.range(0, 4), k = rng.range(0, 4), l = rng.range(0, 4),
          d = rng.range(0, 4);
      std::vector<Polynomial> sx, sy, gx, gy;
      auto mono = [&](int nv) {
        Exp e(static_cast<size_t>(nv), 0u);
        if (nv > 0) e[static_cast<size_t>(rng.below(nv))] = static_cast<unsigned>(rng.range(1, 2));
        return Polynomial::monomial(nv, e, Rat(rng.range(1, 3)));
      };
      for (int i = 0; i < k; ++i) sx.push_back(mono(n));
      for (int i = 0; i < l; ++i) sy.push_back(mono(m2));
      for (int j = 0; j < d; ++j) {
        gx.push_back(mono(n));
        gy.push_back(mono(m2));
      }
      FibreSquare sq = fibre_product_affine(make_std_model(n, k, sx), PolyMap(n, gx),
                                            make_std_model(m2, l, sy), PolyMap(m2, gy));
      all = all && vdim_check(sq) && sq.W.vdim() == (n - k) + (m2 - l) - d;
    }
    r["count"] = count;
    r["pass"] = all;
  } else {
    throw SceneError("unknown task op: " + op);
  }
  return r;
}

struct Report {
  Json doc;
  bool pass = true;

  std::string dump() const { return doc.dump(2) + "\n"; }
};

/// Runs a scene's tasks in order (optionally in parallel; the report always
/// preserves task order) and checks each task's embedded expectations.
inline Report run_scene(const Scene& s, const RunOptions& opt = {}) {
  Report rep;
  rep.doc["tasks"] = Json::array();

  std::vector<size_t> selected;
  for (size_t i = 0; i < s.tasks.size(); ++i) {
    if (!opt.task_filter.empty() && s.tasks[i].value("name", "") != opt.task_filter) continue;
    selected.push_back(i);
  }
  if (!opt.task_filter.empty() && selected.empty())
    throw SceneError("no task named '" + opt.task_filter + "'");

  auto execute = [&](size_t idx) -> Json {
    const Json& t = s.tasks[idx];
    Json entry;
    entry["index"] = idx;
    if (t.contains("name")) entry["name"] = t.at("name");
    try {
      Json result = run_task(s, t, opt);
      entry["result"] = result;
      entry["ok"] = true;
      if (t.contains("expect"))
        entry["expected_met"] = scene_detail::subset_match(t.at("expect"), result);
      else
        entry["expected_met"] = true;
    } catch (const std::exception& e) {
      entry["ok"] = false;
      entry["error"] = e.what();
      entry["expected_met"] = false;
    }
    return entry;
  };

  std::vector<Json> entries(selected.size());
  if (opt.jobs > 1) {
    std::vector<std::future<Json>> futs;
    futs.reserve(selected.size());
    for (size_t i = 0; i < selected.size(); ++i)
      futs.push_back(std::async(std::launch::async, execute, selected[i]));
    for (size_t i = 0; i < selected.size(); ++i) entries[i] = futs[i].get();
  } else {
    for (size_t i = 0; i < selected.size(); ++i) entries[i] = execute(selected[i]);
  }

  for (auto& e : entries) {
    if (!e.value("expected_met", false)) rep.pass = false;
    rep.doc["tasks"].push_back(std::move(e));
  }
  rep.doc["pass"] = rep.pass;
  return rep;
}

}  // namespace dgeom
