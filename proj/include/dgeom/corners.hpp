#pragma once

#include <algorithm>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dgeom/quotient.hpp"

namespace dgeom {

/// Model domain [0,inf)^k x R^(n-k); the first k variables are the corner
/// coordinates.
struct CornerModel {
  int k = 0, n = 0;

  CornerModel() = default;
  CornerModel(int k_, int n_) : k(k_), n(n_) {
    if (k < 0 || n < k) throw std::invalid_argument("CornerModel: need 0 <= k <= n");
  }

  friend bool operator==(const CornerModel& a, const CornerModel& b) {
    return a.k == b.k && a.n == b.n;
  }
};

/// One constituent of a disjoint union of models, tagged by the subset of
/// corner indices it came from.
struct Piece {
  std::vector<int> subset;  // 0-based corner indices, ascending
  CornerModel model;

  friend bool operator==(const Piece& a, const Piece& b) {
    return a.subset == b.subset && a.model == b.model;
  }
};

struct PieceObject {
  std::vector<Piece> pieces;

  bool empty() const { return pieces.empty(); }
  size_t size() const { return pieces.size(); }
};

namespace detail {

inline std::vector<std::vector<int>> subsets_sorted(int k) {
  if (k > 16) throw std::invalid_argument("corner enumeration: corner count too large");
  std::vector<std::vector<int>> out;
  for (unsigned mask = 0; mask < (1u << k); ++mask) {
    std::vector<int> s;
    for (int i = 0; i < k; ++i)
      if (mask & (1u << i)) s.push_back(i);
    out.push_back(std::move(s));
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  });
  return out;
}

}  // namespace detail

/// Number of vanishing corner coordinates; the point must lie in the domain.
inline int depth(const CornerModel& m, const QVec& pt) {
  if (static_cast<int>(pt.size()) != m.n) throw std::invalid_argument("depth: point dimension");
  int d = 0;
  for (int i = 0; i < m.k; ++i) {
    if (pt[static_cast<size_t>(i)] < 0) throw std::invalid_argument("depth: point outside domain");
    if (pt[static_cast<size_t>(i)] == 0) ++d;
  }
  return d;
}

/// The k boundary faces; face i is the locus where corner coordinate i
/// vanishes. The attaching map hits a point of depth d exactly d times.
inline PieceObject boundary(const CornerModel& m) {
  PieceObject out;
  for (int i = 0; i < m.k; ++i) out.pieces.push_back({{i}, CornerModel(m.k - 1, m.n - 1)});
  return out;
}

inline int boundary_multiplicity(const CornerModel& m, const QVec& pt) { return depth(m, pt); }

/// All corner pieces: one per subset of the corner indices, graded by subset
/// size; degree 0 is the model itself and degree 1 its boundary.
inline PieceObject corners(const CornerModel& m) {
  PieceObject out;
  for (auto& s : detail::subsets_sorted(m.k)) {
    int l = static_cast<int>(s.size());
    out.pieces.push_back({std::move(s), CornerModel(m.k - l, m.n - l)});
  }
  return out;
}

inline CornerModel product(const CornerModel& a, const CornerModel& b) {
  return CornerModel(a.k + b.k, a.n + b.n);
}

/// Entry of the face table of a validated map: a target corner component is
/// either identically zero or factors exactly as x_i * u with u(0) > 0.
struct FaceEntry {
  enum class Kind { Zero, Face };
  Kind kind = Kind::Zero;
  int i = -1;     // source corner index, Face only
  Polynomial u;   // unit factor, Face only
};

struct CornerMap {
  CornerModel src, dst;
  PolyMap f;
  std::vector<FaceEntry> face_table;      // one entry per target corner index
  std::vector<std::string> assumptions;   // positivity recorded, not proved
};

struct CornerMapCheck {
  std::optional<CornerMap> map;
  std::string rejection;

  explicit operator bool() const { return map.has_value(); }
};

namespace detail {

// exact division by the corner variable, or nullopt
inline std::optional<Polynomial> divide_by_var(const Polynomial& p, int var) {
  Polynomial out(p.nvars());
  for (const auto& [e, c] : p.terms()) {
    if (e[static_cast<size_t>(var)] == 0) return std::nullopt;
    Exp e2 = e;
    --e2[static_cast<size_t>(var)];
    out.add_term(e2, c);
  }
  return out;
}

inline Rat constant_term(const Polynomial& p) {
  auto it = p.terms().find(Exp(static_cast<size_t>(p.nvars()), 0u));
  return it == p.terms().end() ? Rat(0) : it->second;
}

}  // namespace detail

/// Checks the uniform normal form of a weakly smooth polynomial map between
/// model domains: every target corner component must be identically zero or
/// exactly x_i * u with u(0) > 0 and i unique. Positivity of u away from the
/// origin is recorded as an assumption and spot-checked at the witnesses.
inline CornerMapCheck validate_corner_map(const CornerModel& src, const CornerModel& dst,
                                          const PolyMap& f,
                                          const std::vector<QVec>& witnesses = {}) {
  if (f.source_vars != src.n || f.target_vars() != dst.n)
    return {std::nullopt, "map arity does not match the models"};
  CornerMap cm;
  cm.src = src;
  cm.dst = dst;
  cm.f = f;
  for (int j = 0; j < dst.k; ++j) {
    const Polynomial& p = f.components[static_cast<size_t>(j)];
    if (p.is_zero()) {
      cm.face_table.push_back(FaceEntry{FaceEntry::Kind::Zero, -1, Polynomial(src.n)});
      continue;
    }
    std::vector<int> divisors;
    for (int i = 0; i < src.k; ++i)
      if (detail::divide_by_var(p, i)) divisors.push_back(i);
    if (divisors.empty())
      return {std::nullopt, "target corner component " + std::to_string(j) +
                                " is neither zero nor divisible by a corner variable"};
    if (divisors.size() > 1)
      return {std::nullopt, "target corner component " + std::to_string(j) +
                                " is divisible by two distinct corner variables"};
    int i = divisors[0];
    Polynomial u = *detail::divide_by_var(p, i);
    if (detail::divide_by_var(u, i))
      return {std::nullopt, "target corner component " + std::to_string(j) +
                                " vanishes to second order on its face"};
    if (!(detail::constant_term(u) > 0))
      return {std::nullopt, "unit factor of target corner component " + std::to_string(j) +
                                " has nonpositive constant term"};
    for (const auto& w : witnesses) {
      if (static_cast<int>(w.size()) != src.n)
        return {std::nullopt, "witness dimension mismatch"};
      if (!(u.evaluate(w) > 0))
        return {std::nullopt, "unit factor of target corner component " + std::to_string(j) +
                                  " is nonpositive at a witness"};
    }
    if (!u.is_constant())
      cm.assumptions.push_back("unit of target corner component " + std::to_string(j) +
                               " assumed positive on the whole domain");
    cm.face_table.push_back(FaceEntry{FaceEntry::Kind::Face, i, std::move(u)});
  }
  return {std::move(cm), ""};
}

struct CornerClass {
  bool simple = false;
  bool semisimple = false;
  bool flat = false;
};

/// Face-table classification: semisimple when assigned source faces are
/// pairwise distinct, simple when additionally every source face is
/// assigned, flat when no component vanishes identically.
inline CornerClass classify_map(const CornerMap& cm) {
  CornerClass out;
  std::vector<int> assigned;
  bool any_zero = false;
  for (const auto& fe : cm.face_table) {
    if (fe.kind == FaceEntry::Kind::Face)
      assigned.push_back(fe.i);
    else
      any_zero = true;
  }
  std::vector<int> sorted = assigned;
  std::sort(sorted.begin(), sorted.end());
  out.semisimple = std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end();
  out.simple = out.semisimple && static_cast<int>(sorted.size()) == cm.src.k;
  out.flat = !any_zero;
  return out;
}

struct DifferentialClass {
  bool submersion = true;
  bool immersion = true;
};

namespace detail {

inline std::vector<int> vanishing_corners(const CornerModel& m, const QVec& pt) {
  std::vector<int> v;
  for (int i = 0; i < m.k; ++i)
    if (pt[static_cast<size_t>(i)] == 0) v.push_back(i);
  return v;
}

}  // namespace detail

/// Submersion/immersion flags from differential ranks at the witnesses;
/// submersions must also be surjective stratum to stratum.
inline DifferentialClass classify_differential(const CornerMap& cm,
                                               const std::vector<QVec>& witnesses) {
  DifferentialClass out;
  PolyMat jf = jacobian(cm.f);
  for (const auto& x : witnesses) {
    QVec y = cm.f.evaluate(x);
    QMat j = evaluate(jf, x);
    int r_full = rank(j);
    if (r_full < cm.dst.n) out.submersion = false;
    if (r_full < cm.src.n) out.immersion = false;

    std::vector<int> vx = detail::vanishing_corners(cm.src, x);
    std::vector<int> vy = detail::vanishing_corners(cm.dst, y);
    QMat js(cm.dst.n - static_cast<int>(vy.size()), cm.src.n - static_cast<int>(vx.size()));
    int rr = 0;
    for (int r = 0; r < cm.dst.n; ++r) {
      if (std::find(vy.begin(), vy.end(), r) != vy.end()) continue;
      int cc = 0;
      for (int c = 0; c < cm.src.n; ++c) {
        if (std::find(vx.begin(), vx.end(), c) != vx.end()) continue;
        js.at(rr, cc) = j.at(r, c);
        ++cc;
      }
      ++rr;
    }
    if (rank(js) < js.rows) out.submersion = false;
  }
  return out;
}

struct MinusFace {
  int src_face = -1;
  int dst_face = -1;
  CornerMap induced;
};

struct BoundaryDecomposition {
  std::vector<int> plus_faces;
  std::vector<MinusFace> minus_faces;
};

namespace detail {

// substitution dropping the source variables in `drop` (set to zero), into
// the model with those variables removed
inline std::vector<Polynomial> drop_vars_images(int n, const std::vector<int>& drop) {
  int m = n - static_cast<int>(drop.size());
  std::vector<Polynomial> images;
  images.reserve(static_cast<size_t>(n));
  for (int t = 0; t < n; ++t) {
    if (std::find(drop.begin(), drop.end(), t) != drop.end()) {
      images.push_back(Polynomial(m));
    } else {
      int shift = 0;
      for (int s : drop)
        if (s < t) ++shift;
      images.push_back(Polynomial::variable(m, t - shift));
    }
  }
  return images;
}

// restriction of a corner map to a source piece S and target piece T
inline PolyMap restrict_map(const CornerMap& cm, const std::vector<int>& S,
                            const std::vector<int>& T) {
  int m = cm.src.n - static_cast<int>(S.size());
  std::vector<Polynomial> images = drop_vars_images(cm.src.n, S);
  std::vector<Polynomial> comps;
  for (int j = 0; j < cm.dst.n; ++j) {
    if (std::find(T.begin(), T.end(), j) != T.end()) continue;
    comps.push_back(cm.f.components[static_cast<size_t>(j)].substitute(images, m));
  }
  return PolyMap(m, std::move(comps));
}

}  // namespace detail

/// Boundary decomposition of a semisimple map: the matched faces carry
/// induced maps to the corresponding target faces, and the commuting square
/// with the attaching maps is verified as an exact polynomial identity.
inline BoundaryDecomposition boundary_decomposition(const CornerMap& cm) {
  CornerClass cls = classify_map(cm);
  if (!cls.semisimple)
    throw std::invalid_argument("boundary_decomposition: map is not semisimple");
  BoundaryDecomposition out;
  std::vector<int> matched(static_cast<size_t>(cm.src.k), -1);
  for (int j = 0; j < cm.dst.k; ++j)
    if (cm.face_table[static_cast<size_t>(j)].kind == FaceEntry::Kind::Face)
      matched[static_cast<size_t>(cm.face_table[static_cast<size_t>(j)].i)] = j;
  for (int i = 0; i < cm.src.k; ++i) {
    if (matched[static_cast<size_t>(i)] < 0) {
      out.plus_faces.push_back(i);
      continue;
    }
    int j = matched[static_cast<size_t>(i)];
    CornerModel fsrc(cm.src.k - 1, cm.src.n - 1);
    CornerModel fdst(cm.dst.k - 1, cm.dst.n - 1);
    PolyMap restricted = detail::restrict_map(cm, {i}, {j});
    CornerMapCheck chk = validate_corner_map(fsrc, fdst, restricted);
    if (!chk)
      throw std::logic_error("boundary_decomposition: induced face map failed validation: " +
                             chk.rejection);

    // f restricted to the face equals the target attaching map after f_minus
    std::vector<Polynomial> incl_src = detail::drop_vars_images(cm.src.n, {i});
    for (int t = 0; t < cm.dst.n; ++t) {
      Polynomial lhs = cm.f.components[static_cast<size_t>(t)].substitute(incl_src, cm.src.n - 1);
      Polynomial rhs =
          t == j ? Polynomial(cm.src.n - 1)
                 : restricted.components[static_cast<size_t>(t - (t > j ? 1 : 0))];
      if (lhs != rhs)
        throw std::logic_error("boundary_decomposition: commuting square fails on component " +
                               std::to_string(t));
    }
    out.minus_faces.push_back(MinusFace{i, j, *chk.map});
  }
  return out;
}

enum class CornerVariant { Plain, Hat };

struct CornerPieceImage {
  std::vector<int> src_subset;
  std::vector<int> dst_subset;
  CornerMap induced;
};

struct CornerImage {
  CornerVariant variant = CornerVariant::Plain;
  std::vector<CornerPieceImage> pieces;  // ordered like corners(src)

  const CornerPieceImage& at(const std::vector<int>& subset) const {
    for (const auto& p : pieces)
      if (p.src_subset == subset) return p;
    throw std::invalid_argument("CornerImage: no such piece");
  }
};

/// Image of a validated map under the corner functor: piece S goes to the
/// set of target components whose assigned source face lies in S; the hatted
/// variant additionally collects the identically vanishing components.
inline CornerImage corner_functor(const CornerMap& cm, CornerVariant variant) {
  CornerImage out;
  out.variant = variant;
  for (const auto& S : detail::subsets_sorted(cm.src.k)) {
    std::vector<int> T;
    for (int j = 0; j < cm.dst.k; ++j) {
      const FaceEntry& fe = cm.face_table[static_cast<size_t>(j)];
      bool in = (fe.kind == FaceEntry::Kind::Face &&
                 std::find(S.begin(), S.end(), fe.i) != S.end()) ||
                (variant == CornerVariant::Hat && fe.kind == FaceEntry::Kind::Zero);
      if (in) T.push_back(j);
    }
    CornerModel psrc(cm.src.k - static_cast<int>(S.size()), cm.src.n - static_cast<int>(S.size()));
    CornerModel pdst(cm.dst.k - static_cast<int>(T.size()), cm.dst.n - static_cast<int>(T.size()));
    PolyMap restricted = detail::restrict_map(cm, S, T);
    CornerMapCheck chk = validate_corner_map(psrc, pdst, restricted);
    if (!chk)
      throw std::logic_error("corner_functor: induced piece map failed validation: " +
                             chk.rejection);
    out.pieces.push_back(CornerPieceImage{S, T, *chk.map});
  }
  return out;
}

struct TransversalityVerdict {
  bool transverse = true;
  bool strongly_transverse = true;
};

/// Pointwise (strong) transversality of two validated maps into a common
/// target. The tangent and stratum-tangent span conditions are checked at
/// each witness pair; the strong form adds the combinatorial condition over
/// the face tables.
inline TransversalityVerdict transverse_check(const CornerMap& g, const CornerMap& h,
                                              const std::vector<std::pair<QVec, QVec>>& pairs) {
  if (!(g.dst == h.dst)) throw std::invalid_argument("transverse_check: targets differ");
  TransversalityVerdict out;
  PolyMat jg = jacobian(g.f), jh = jacobian(h.f);
  for (const auto& [x, y] : pairs) {
    QVec zg = g.f.evaluate(x), zh = h.f.evaluate(y);
    if (zg != zh) throw std::invalid_argument("transverse_check: witness images differ");
    QMat mg = evaluate(jg, x);
    QMat mh = evaluate(jh, y);
    if (rank(QMat::hcat(mg, mh)) < g.dst.n) out.transverse = false;

    std::vector<int> vx = detail::vanishing_corners(g.src, x);
    std::vector<int> vy = detail::vanishing_corners(h.src, y);
    std::vector<int> vz = detail::vanishing_corners(g.dst, zg);
    auto strata_cols = [](const QMat& m, const std::vector<int>& vanish_rows,
                          const std::vector<int>& vanish_cols) {
      QMat s(m.rows - static_cast<int>(vanish_rows.size()),
             m.cols - static_cast<int>(vanish_cols.size()));
      int rr = 0;
      for (int r = 0; r < m.rows; ++r) {
        if (std::find(vanish_rows.begin(), vanish_rows.end(), r) != vanish_rows.end()) continue;
        int cc = 0;
        for (int c = 0; c < m.cols; ++c) {
          if (std::find(vanish_cols.begin(), vanish_cols.end(), c) != vanish_cols.end()) continue;
          s.at(rr, cc) = m.at(r, c);
          ++cc;
        }
        ++rr;
      }
      return s;
    };
    QMat sg = strata_cols(mg, vz, vx), sh = strata_cols(mh, vz, vy);
    if (rank(QMat::hcat(sg, sh)) < g.dst.n - static_cast<int>(vz.size()))
      out.transverse = false;

    // combinatorial condition over the face tables
    auto image_subset = [](const CornerMap& cm, const std::vector<int>& S) {
      std::vector<int> T;
      for (int j = 0; j < cm.dst.k; ++j) {
        const FaceEntry& fe = cm.face_table[static_cast<size_t>(j)];
        if (fe.kind == FaceEntry::Kind::Face &&
            std::find(S.begin(), S.end(), fe.i) != S.end())
          T.push_back(j);
      }
      return T;
    };
    for (unsigned ms = 0; ms < (1u << vx.size()); ++ms)
      for (unsigned mt = 0; mt < (1u << vy.size()); ++mt) {
        std::vector<int> S, Sp;
        for (size_t b = 0; b < vx.size(); ++b)
          if (ms & (1u << b)) S.push_back(vx[b]);
        for (size_t b = 0; b < vy.size(); ++b)
          if (mt & (1u << b)) Sp.push_back(vy[b]);
        std::vector<int> Tg = image_subset(g, S), Th = image_subset(h, Sp);
        if (Tg != Th) continue;
        size_t j = S.size(), kk = Sp.size(), l = Tg.size();
        if (!(j + kk > l || (j == 0 && kk == 0 && l == 0))) out.strongly_transverse = false;
      }
  }
  if (!out.transverse) out.strongly_transverse = false;
  return out;
}

/// One (j,k,l) term of the corner-degree table of a fibre product.
struct CornerTerm {
  std::vector<int> x_subset, y_subset, z_subset;
  int degree = 0;      // j + k - l
  int formal_dim = 0;  // dim W - degree
};

struct BoundaryTerm {
  std::string description;
  int x_face = -1;  // face index when the term restricts X
  int y_face = -1;  // face index when the term restricts Y
  int sign = 1;     // oriented variant
};

struct FibreTerms {
  int dim_w = 0;
  std::vector<CornerTerm> corner_table;
  std::vector<BoundaryTerm> boundary_terms;
  std::string boundary_formula;  // which decomposition case applied
};

/// Formal boundary and corner bookkeeping of the fibre product of two
/// validated transverse maps. Corner terms pair pieces with equal images in
/// the target corners; boundary terms follow the semisimple case analysis.
/// Everything here is descriptor-level: no new charts are constructed.
inline FibreTerms fibre_boundary_terms(const CornerMap& g, const CornerMap& h) {
  if (!(g.dst == h.dst)) throw std::invalid_argument("fibre_boundary_terms: targets differ");
  FibreTerms out;
  out.dim_w = g.src.n + h.src.n - g.dst.n;

  auto image_subset = [](const CornerMap& cm, const std::vector<int>& S) {
    std::vector<int> T;
    for (int j = 0; j < cm.dst.k; ++j) {
      const FaceEntry& fe = cm.face_table[static_cast<size_t>(j)];
      if (fe.kind == FaceEntry::Kind::Face && std::find(S.begin(), S.end(), fe.i) != S.end())
        T.push_back(j);
    }
    return T;
  };

  for (const auto& S : detail::subsets_sorted(g.src.k))
    for (const auto& Sp : detail::subsets_sorted(h.src.k)) {
      std::vector<int> Tg = image_subset(g, S), Th = image_subset(h, Sp);
      if (Tg != Th) continue;
      CornerTerm term;
      term.x_subset = S;
      term.y_subset = Sp;
      term.z_subset = Tg;
      term.degree = static_cast<int>(S.size() + Sp.size() - Tg.size());
      term.formal_dim = out.dim_w - term.degree;
      out.corner_table.push_back(std::move(term));
    }
  std::stable_sort(out.corner_table.begin(), out.corner_table.end(),
                   [](const CornerTerm& a, const CornerTerm& b) { return a.degree < b.degree; });

  CornerClass cg = classify_map(g), ch = classify_map(h);
  int ori = ((g.src.n + g.dst.n) % 2 == 0) ? 1 : -1;  // sign on the Y-boundary block
  if (g.dst.k == 0) {
    out.boundary_formula = "boundary-free target";
    for (int i = 0; i < g.src.k; ++i)
      out.boundary_terms.push_back({"(face " + std::to_string(i) + " of X) x_Z Y", i, -1, 1});
    for (int i = 0; i < h.src.k; ++i)
      out.boundary_terms.push_back({"X x_Z (face " + std::to_string(i) + " of Y)", -1, i, ori});
  } else if (cg.semisimple && ch.semisimple) {
    out.boundary_formula = "both legs semisimple";
    BoundaryDecomposition bg = boundary_decomposition(g);
    BoundaryDecomposition bh = boundary_decomposition(h);
    for (int i : bg.plus_faces)
      out.boundary_terms.push_back({"(unmatched face " + std::to_string(i) + " of X) x_Z Y", i, -1, 1});
    for (int i : bh.plus_faces)
      out.boundary_terms.push_back({"X x_Z (unmatched face " + std::to_string(i) + " of Y)", -1, i, ori});
    for (const auto& mf : bg.minus_faces)
      for (const auto& nf : bh.minus_faces)
        if (mf.dst_face == nf.dst_face)
          out.boundary_terms.push_back(
              {"(face " + std::to_string(mf.src_face) + " of X) x_{dZ} (face " +
                   std::to_string(nf.src_face) + " of Y)",
               mf.src_face, nf.src_face, 1});
  } else if (cg.semisimple) {
    out.boundary_formula = "first leg semisimple";
    BoundaryDecomposition bg = boundary_decomposition(g);
    for (int i : bg.plus_faces)
      out.boundary_terms.push_back({"(unmatched face " + std::to_string(i) + " of X) x_Z Y", i, -1, 1});
    for (int i = 0; i < h.src.k; ++i)
      out.boundary_terms.push_back({"X x_Z (face " + std::to_string(i) + " of Y)", -1, i, ori});
  } else {
    out.boundary_formula = "general (corner-degree table only)";
  }
  return out;
}

/// Finite group acting on a model domain: a corner-coordinate permutation
/// plus a rational linear map on the free block.
struct GroupAction {
  struct Elem {
    std::vector<int> perm;  // permutation of 0..k-1
    QMat mat;               // (n-k) x (n-k)
  };
  std::vector<Elem> elems;
};

namespace detail {

inline bool same_elem(const GroupAction::Elem& a, const GroupAction::Elem& b) {
  return a.perm == b.perm && a.mat == b.mat;
}

inline void validate_action(const CornerModel& m, const GroupAction& a) {
  if (a.elems.empty()) throw std::invalid_argument("group action: no elements");
  int free_dim = m.n - m.k;
  for (const auto& e : a.elems) {
    if (static_cast<int>(e.perm.size()) != m.k || e.mat.rows != free_dim ||
        e.mat.cols != free_dim)
      throw std::invalid_argument("group action: element shape mismatch");
    std::vector<int> sorted = e.perm;
    std::sort(sorted.begin(), sorted.end());
    for (int i = 0; i < m.k; ++i)
      if (sorted[static_cast<size_t>(i)] != i)
        throw std::invalid_argument("group action: not a permutation of the corner block");
    if (det(e.mat) == 0)
      throw std::invalid_argument("group action: singular linear part");
  }
  // closure (and hence inverses and identity, in a finite set)
  for (const auto& x : a.elems)
    for (const auto& y : a.elems) {
      GroupAction::Elem z;
      z.perm.resize(x.perm.size());
      for (size_t i = 0; i < x.perm.size(); ++i)
        z.perm[i] = x.perm[static_cast<size_t>(y.perm[i])];
      z.mat = x.mat * y.mat;
      bool found = false;
      for (const auto& w : a.elems)
        if (same_elem(w, z)) found = true;
      if (!found) throw std::invalid_argument("group action: not closed under composition");
    }
  bool has_id = false;
  for (const auto& e : a.elems) {
    bool id = e.mat == QMat::identity(free_dim);
    for (size_t i = 0; id && i < e.perm.size(); ++i)
      if (e.perm[i] != static_cast<int>(i)) id = false;
    if (id) has_id = true;
  }
  if (!has_id) throw std::invalid_argument("group action: missing identity");
}

inline std::vector<std::vector<int>> corner_orbits(const CornerModel& m, const GroupAction& a) {
  std::vector<int> parent(static_cast<size_t>(m.k));
  for (int i = 0; i < m.k; ++i) parent[static_cast<size_t>(i)] = i;
  std::function<int(int)> find = [&](int i) {
    while (parent[static_cast<size_t>(i)] != i) i = parent[static_cast<size_t>(i)];
    return i;
  };
  for (const auto& e : a.elems)
    for (int i = 0; i < m.k; ++i) {
      int ra = find(i), rb = find(e.perm[static_cast<size_t>(i)]);
      if (ra != rb) parent[static_cast<size_t>(std::max(ra, rb))] = std::min(ra, rb);
    }
  std::vector<std::vector<int>> orbits;
  for (int root = 0; root < m.k; ++root) {
    if (find(root) != root) continue;
    std::vector<int> orbit;
    for (int i = 0; i < m.k; ++i)
      if (find(i) == root) orbit.push_back(i);
    orbits.push_back(std::move(orbit));
  }
  std::sort(orbits.begin(), orbits.end());
  return orbits;
}

inline int fixed_free_dim(const CornerModel& m, const GroupAction& a) {
  int free_dim = m.n - m.k;
  if (free_dim == 0) return 0;
  QMat stacked(0, free_dim);
  for (const auto& e : a.elems) stacked = QMat::vcat(stacked, e.mat - QMat::identity(free_dim));
  return kernel(stacked).cols;
}

}  // namespace detail

struct FixedPieceMatch {
  std::vector<int> orbit_subset;    // orbits selected, as ambient index sets
  std::vector<int> ambient_subset;  // their union in the ambient corner set
  int fixed_degree = 0;             // corner degree in the fixed locus
  int ambient_degree = 0;           // corner degree in the ambient model
};

struct FixedLocus {
  PieceObject fixed;           // the fixed locus itself (one piece)
  PieceObject boundary_fixed;  // fixed points of the boundary
  PieceObject fixed_boundary;  // boundary of the fixed locus, tagged by orbit
  std::vector<FixedPieceMatch> matching;  // corner pieces matched degreewise
};

/// Fixed locus of a finite group action: one corner coordinate per
/// permutation orbit, the fixed subspace of the free block, and the
/// degree-shifting identification of its corners inside the ambient corner
/// pieces.
inline FixedLocus fixed_locus(const CornerModel& m, const GroupAction& a) {
  detail::validate_action(m, a);
  auto orbits = detail::corner_orbits(m, a);
  int o = static_cast<int>(orbits.size());
  int f = detail::fixed_free_dim(m, a);

  FixedLocus out;
  out.fixed.pieces.push_back({{}, CornerModel(o, o + f)});

  // fixed points of the boundary: only faces whose index is a singleton orbit
  for (const auto& orbit : orbits)
    if (orbit.size() == 1)
      out.boundary_fixed.pieces.push_back({{orbit[0]}, CornerModel(o - 1, o - 1 + f)});

  // boundary of the fixed locus: one face per orbit, tagged by the orbit
  for (const auto& orbit : orbits)
    out.fixed_boundary.pieces.push_back({orbit, CornerModel(o - 1, o - 1 + f)});

  // corner pieces of the fixed locus match invariant ambient pieces with a
  // degree shift: a set of orbits occupies degree (number of orbits) on the
  // fixed side and degree (total size) in the ambient model
  for (unsigned mask = 0; mask < (1u << o); ++mask) {
    FixedPieceMatch match;
    for (int b = 0; b < o; ++b)
      if (mask & (1u << b)) {
        match.orbit_subset.push_back(b);
        match.ambient_subset.insert(match.ambient_subset.end(), orbits[static_cast<size_t>(b)].begin(),
                                    orbits[static_cast<size_t>(b)].end());
        ++match.fixed_degree;
      }
    std::sort(match.ambient_subset.begin(), match.ambient_subset.end());
    match.ambient_degree = static_cast<int>(match.ambient_subset.size());
    out.matching.push_back(std::move(match));
  }
  std::stable_sort(out.matching.begin(), out.matching.end(),
                   [](const FixedPieceMatch& x, const FixedPieceMatch& y) {
                     if (x.fixed_degree != y.fixed_degree) return x.fixed_degree < y.fixed_degree;
                     return x.orbit_subset < y.orbit_subset;
                   });
  return out;
}

}  // namespace dgeom
