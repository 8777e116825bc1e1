#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "dgeom/vvb.hpp"

namespace dgeom {

/// A standard model: ambient R^n, trivial rank-k bundle, polynomial section
/// s. Congruence data (the ideal of s and its square) is computed once at
/// construction and shared by every check against this model.
struct StdModel {
  int n = 0;  // ambient dimension
  int k = 0;  // bundle rank
  std::vector<Polynomial> s;
  GroebnerBasis gb_s;
  GroebnerBasis gb_s2;
  QuotientPresentation quo_s;  // quotient by the ideal of s

  int vdim() const { return n - k; }
  bool artinian() const { return quo_s.artinian; }

  /// Ring base on the quotient by the ideal of s; throws NotArtinianError.
  BaseContext ring_base() const { return BaseContext::ring(quo_s); }

  PolyMap section_map() const { return PolyMap(n, s); }
};

inline StdModel make_std_model(int n, int k, std::vector<Polynomial> s) {
  if (static_cast<int>(s.size()) != k)
    throw std::invalid_argument("make_std_model: section arity mismatch");
  for (const auto& c : s)
    if (c.nvars() != n) throw std::invalid_argument("make_std_model: section variable count");
  StdModel m;
  m.n = n;
  m.k = k;
  m.s = std::move(s);
  m.gb_s = groebner(m.s, MonomialOrder::GrevLex, n);
  m.gb_s2 = groebner(ideal_square(m.s), MonomialOrder::GrevLex, n);
  m.quo_s = quotient_basis(m.gb_s);
  return m;
}

/// Zero-obstruction model of R^n itself.
inline StdModel affine_model(int n) { return make_std_model(n, 0, {}); }

/// 1-morphism data (f, fhat): base polynomial map plus bundle comparison,
/// an l x k matrix over the source's ambient variables.
struct StdOneMor {
  PolyMap f;
  PolyMat fhat;
};

/// 2-morphism data: an m x k matrix over the source variables (target
/// ambient dimension by source bundle rank).
struct StdTwoMor {
  PolyMat lambda;
};

struct WitnessSet {
  std::vector<QVec> points;
};

/// Points asserted (and checked) to annihilate the section. Completeness of
/// the enumeration is the caller's assertion, not verified here.
inline WitnessSet make_witness_set(const StdModel& X, std::vector<QVec> pts) {
  for (const auto& p : pts) {
    if (static_cast<int>(p.size()) != X.n)
      throw std::invalid_argument("make_witness_set: point dimension");
    for (const auto& c : X.s)
      if (c.evaluate(p) != 0)
        throw std::invalid_argument("make_witness_set: point is not a zero of the section");
  }
  return WitnessSet{std::move(pts)};
}

inline BaseContext point_base(const StdModel& X, const WitnessSet& w) {
  return BaseContext::points(w.points, X.s);
}

inline StdOneMor identity_one_mor(const StdModel& X) {
  return StdOneMor{PolyMap::identity(X.n), PolyMat::identity(X.k, X.n)};
}

namespace detail {

inline void check_one_mor_arity(const StdModel& X, const StdModel& Y, const StdOneMor& m) {
  if (m.f.source_vars != X.n || m.f.target_vars() != Y.n)
    throw std::invalid_argument("one-morphism base map arity mismatch");
  if (m.fhat.rows != Y.k || m.fhat.cols != X.k || m.fhat.nvars != X.n)
    throw std::invalid_argument("one-morphism bundle matrix shape mismatch");
}

}  // namespace detail

/// The defining congruence: every component of fhat s - t f must lie in the
/// square of the source ideal.
inline Verdict validate_one_mor(const StdModel& X, const StdModel& Y, const StdOneMor& m) {
  detail::check_one_mor_arity(X, Y, m);
  std::vector<Polynomial> lhs = m.fhat.apply(X.s);
  for (int j = 0; j < Y.k; ++j) {
    Polynomial diff = lhs[static_cast<size_t>(j)] - compose(Y.s[static_cast<size_t>(j)], m.f);
    Polynomial r = normal_form(diff, X.gb_s2);
    if (!r.is_zero())
      return Verdict::fail("component " + std::to_string(j) +
                               " of the section congruence has nonzero remainder",
                           r);
  }
  return Verdict::pass();
}

/// Morphisms agree iff base maps agree modulo the squared ideal and bundle
/// parts agree modulo the ideal.
inline bool one_mor_equal(const StdModel& X, const StdModel& Y, const StdOneMor& m1,
                          const StdOneMor& m2) {
  detail::check_one_mor_arity(X, Y, m1);
  detail::check_one_mor_arity(X, Y, m2);
  for (int j = 0; j < Y.n; ++j)
    if (!member(m1.f.components[static_cast<size_t>(j)] - m2.f.components[static_cast<size_t>(j)],
                X.gb_s2))
      return false;
  for (size_t i = 0; i < m1.fhat.e.size(); ++i)
    if (!member(m1.fhat.e[i] - m2.fhat.e[i], X.gb_s)) return false;
  return true;
}

/// Checks that lambda realizes a 2-morphism m1 => m2: the base maps differ by
/// lambda s (mod the squared ideal) and the bundle parts by (dt f) lambda
/// (mod the ideal).
inline Verdict validate_two_mor(const StdModel& X, const StdModel& Y, const StdOneMor& m1,
                                const StdOneMor& m2, const StdTwoMor& t) {
  detail::check_one_mor_arity(X, Y, m1);
  detail::check_one_mor_arity(X, Y, m2);
  if (t.lambda.rows != Y.n || t.lambda.cols != X.k || t.lambda.nvars != X.n)
    throw std::invalid_argument("two-morphism matrix shape mismatch");
  std::vector<Polynomial> shift = t.lambda.apply(X.s);
  for (int j = 0; j < Y.n; ++j) {
    Polynomial diff = m2.f.components[static_cast<size_t>(j)] -
                      m1.f.components[static_cast<size_t>(j)] - shift[static_cast<size_t>(j)];
    Polynomial r = normal_form(diff, X.gb_s2);
    if (!r.is_zero()) return Verdict::fail("base-map congruence fails", r);
  }
  PolyMat dt_f = jacobian(Y.section_map()).substitute(m1.f);
  PolyMat rhs = m1.fhat + dt_f * t.lambda;
  for (size_t i = 0; i < rhs.e.size(); ++i) {
    Polynomial r = normal_form(m2.fhat.e[i] - rhs.e[i], X.gb_s);
    if (!r.is_zero()) return Verdict::fail("bundle congruence fails", r);
  }
  return Verdict::pass();
}

inline bool two_mor_equal(const StdModel& X, const StdTwoMor& t1, const StdTwoMor& t2) {
  if (t1.lambda.rows != t2.lambda.rows || t1.lambda.cols != t2.lambda.cols)
    throw std::invalid_argument("two_mor_equal: shape mismatch");
  for (size_t i = 0; i < t1.lambda.e.size(); ++i)
    if (!member(t1.lambda.e[i] - t2.lambda.e[i], X.gb_s)) return false;
  return true;
}

/// Composite of g: Y -> Z after f: X -> Y. The bundle part is the pullback of
/// g's bundle matrix times f's; the result is revalidated as a consistency
/// trap.
inline StdOneMor compose_one(const StdModel& X, const StdModel& Y, const StdModel& Z,
                             const StdOneMor& g, const StdOneMor& f) {
  detail::check_one_mor_arity(X, Y, f);
  detail::check_one_mor_arity(Y, Z, g);
  StdOneMor out{compose(g.f, f.f), g.fhat.substitute(f.f) * f.fhat};
  if (!validate_one_mor(X, Z, out))
    throw std::logic_error("compose_one: composite failed validation");
  return out;
}

inline StdTwoMor vertical_compose(const StdTwoMor& t2, const StdTwoMor& t1) {
  return StdTwoMor{t2.lambda + t1.lambda};
}

/// Horizontal composite of z: g => g' (on Y -> Z) with t: f => f' (on
/// X -> Y), landing on g f => g' f'. The matrix form pulls everything back to
/// the source:
///   (dg f) L_t + (M_z f) fhat + (M_z f) (dt f) L_t.
inline StdTwoMor horizontal_compose(const StdModel& X, const StdModel& Y, const StdModel& Z,
                                    const StdTwoMor& z, const StdOneMor& g, const StdTwoMor& t,
                                    const StdOneMor& f) {
  detail::check_one_mor_arity(X, Y, f);
  detail::check_one_mor_arity(Y, Z, g);
  PolyMat dg_f = jacobian(g.f).substitute(f.f);
  PolyMat mz_f = z.lambda.substitute(f.f);
  PolyMat dt_f = jacobian(Y.section_map()).substitute(f.f);
  return StdTwoMor{dg_f * t.lambda + mz_f * f.fhat + mz_f * (dt_f * t.lambda)};
}

/// The two-term complex (ds)^T : E* -> T*V restricted to the base (the
/// trivial connection is fixed; verdicts over the base do not depend on this
/// choice because any two connection matrices differ by sections of the
/// ideal).
inline VVB cotangent_complex(const StdModel& X, const BaseContext& base) {
  if (base.nvars() != X.n) throw std::invalid_argument("cotangent_complex: base variable count");
  PolyMat phi = jacobian(X.section_map()).transpose();  // n x k
  return make_vvb(X.k, X.n, phi, base);
}

struct OmegaMorphism {
  VVB pullback;   // f*(T*Y) restricted to the base of X
  VVB cotangent;  // T*X over the same base
  VVBMor mor;
};

/// The induced map on cotangent complexes: (fhat^T, (df)^T) from the pullback
/// of the target complex to the source complex. Fails loudly if the commuting
/// square does not close over the base, which would indicate an invalid input
/// morphism or an internal inconsistency.
inline OmegaMorphism omega_of_morphism(const StdModel& X, const StdModel& Y, const StdOneMor& m,
                                       const BaseContext& base) {
  detail::check_one_mor_arity(X, Y, m);
  PolyMat dt_f = jacobian(Y.section_map()).substitute(m.f);  // l x m over X vars
  OmegaMorphism out{make_vvb(Y.k, Y.n, dt_f.transpose(), base), cotangent_complex(X, base),
                    make_vvb_mor(m.fhat.transpose(), jacobian(m.f).transpose(), base)};
  Verdict v = validate_mor(out.pullback, out.cotangent, out.mor, base);
  if (!v) throw std::logic_error("omega_of_morphism: commuting square failed: " + v.reason);
  return out;
}

struct EtaleVerdict {
  bool etale = false;                 // all points pass
  std::vector<bool> per_point;
  std::vector<std::string> reasons;   // empty string when a point passes
};

/// Pointwise four-term exactness test at every witness zero:
///   0 -> T_v V -> E_v (+) T_w W -> F_w -> 0
/// with maps (ds(v), df(v)) and (fhat(v), -dt(w)).
inline EtaleVerdict etale_at(const StdModel& X, const StdModel& Y, const StdOneMor& m,
                             const WitnessSet& w) {
  detail::check_one_mor_arity(X, Y, m);
  PolyMat ds = jacobian(X.section_map());
  PolyMat df = jacobian(m.f);
  PolyMat dt = jacobian(Y.section_map());

  EtaleVerdict out;
  out.etale = true;
  for (const auto& v : w.points) {
    for (const auto& c : X.s)
      if (c.evaluate(v) != 0)
        throw std::invalid_argument("etale_at: witness is not a zero of the section");
    QVec fv = m.f.evaluate(v);
    QMat first = QMat::vcat(evaluate(ds, v), evaluate(df, v));
    QMat second = QMat::hcat(evaluate(m.fhat, v), -evaluate(dt, fv));

    std::string why;
    if (!(second * first).is_zero()) {
      why = "composite is nonzero at the witness";
    } else {
      int r1 = rank(first), r2 = rank(second);
      if (r1 < X.n)
        why = "first map is not injective";
      else if (r2 < Y.k)
        why = "second map is not surjective";
      else if (r1 + r2 != X.k + Y.n)
        why = "sequence is not exact in the middle";
    }
    out.per_point.push_back(why.empty());
    out.reasons.push_back(why);
    if (!why.empty()) out.etale = false;
  }
  return out;
}

/// Etale everywhere on the supplied witnesses plus a bijection between the
/// asserted zero enumerations.
inline bool is_equivalence_std(const StdModel& X, const StdModel& Y, const StdOneMor& m,
                               const WitnessSet& wX, const WitnessSet& wY) {
  EtaleVerdict e = etale_at(X, Y, m, wX);
  if (!e.etale) return false;
  std::vector<QVec> images;
  for (const auto& v : wX.points) images.push_back(m.f.evaluate(v));
  // images must be pairwise distinct and exhaust wY
  std::vector<QVec> targets = wY.points;
  if (images.size() != targets.size()) return false;
  for (const auto& im : images) {
    auto it = std::find(targets.begin(), targets.end(), im);
    if (it == targets.end()) return false;
    targets.erase(it);
  }
  return targets.empty();
}

struct MorphismClass {
  bool w_submersion = false;
  bool submersion = false;
  bool w_immersion = false;
  bool immersion = false;
};

/// Submersion and immersion flags read off the induced cotangent morphism.
inline MorphismClass classify_morphism(const StdModel& X, const StdModel& Y, const StdOneMor& m,
                                       const BaseContext& base) {
  OmegaMorphism om = omega_of_morphism(X, Y, m, base);
  MorClass c = classify(om.pullback, om.cotangent, om.mor, base);
  return MorphismClass{c.weakly_injective, c.injective, c.weakly_surjective, c.surjective};
}

/// A model is a manifold over the base iff the cotangent complex splits:
/// gamma phi = id has an exact solution.
inline bool is_manifold(const StdModel& X, const BaseContext& base) {
  VVB cot = cotangent_complex(X, base);
  CtxMat id_k = CtxMat::identity(X.k, base);
  std::vector<detail::UnknownShape> shapes = {{X.k, X.n}};
  std::vector<detail::MatEq> eqs = {detail::MatEq{{detail::MatTerm{0, id_k, cot.phi}}, id_k}};
  return detail::solve_mat_eqs(shapes, eqs, base).has_value();
}

}  // namespace dgeom
