#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dgeom/stdmodel.hpp"

namespace dgeom {

/// Overlap domain: the whole chart or the principal open where p does not
/// vanish.
struct OverlapDomain {
  bool whole = true;
  Polynomial p;

  static OverlapDomain principal(Polynomial q) { return {false, std::move(q)}; }
};

/// Transition data from chart i into chart j on the overlap domain.
struct Overlap {
  int i = 0, j = 0;
  OverlapDomain dom;
  PolyMap e;       // base transition, chart i vars -> chart j vars
  PolyMat ehat;    // bundle comparison, k_j x k_i over chart i vars
  std::vector<QVec> witnesses;  // overlap zeros used for the exactness check
};

struct Atlas {
  std::vector<StdModel> charts;
  std::vector<Overlap> overlaps;
  std::vector<std::string> assertions;  // topological hypotheses, echoed only
};

struct LocalizedMembership {
  bool ok = false;
  int power = 0;           // smallest clearing exponent that worked
  Polynomial remainder;    // nonzero certificate at the cap on failure
};

/// Membership in an ideal after clearing denominators: looks for the least
/// N <= cap with p^N q in the ideal. On the whole chart this is plain
/// membership.
inline LocalizedMembership member_localized(const Polynomial& q, const GroebnerBasis& gb,
                                            const OverlapDomain& dom, int cap) {
  LocalizedMembership out;
  Polynomial cleared = q;
  for (int n = 0; n <= (dom.whole ? 0 : cap); ++n) {
    Polynomial r = normal_form(cleared, gb);
    if (r.is_zero()) {
      out.ok = true;
      out.power = n;
      return out;
    }
    out.remainder = r;
    if (!dom.whole) cleared = cleared * dom.p;
  }
  return out;
}

struct OverlapVerdict {
  int i = 0, j = 0;
  bool congruence_ok = true;
  bool exactness_ok = true;
  std::optional<Polynomial> remainder;       // failing congruence certificate
  std::vector<std::string> witness_reasons;  // per witness, empty when fine
  int max_power = 0;                         // largest clearing exponent used

  bool pass() const { return congruence_ok && exactness_ok; }
};

/// Checks one overlap: the section congruence up to the squared ideal
/// (localized on principal opens) and four-term exactness at every witness.
inline OverlapVerdict validate_overlap(const Atlas& atlas, const Overlap& ov, int cap) {
  const StdModel& Xi = atlas.charts.at(static_cast<size_t>(ov.i));
  const StdModel& Xj = atlas.charts.at(static_cast<size_t>(ov.j));
  if (ov.e.source_vars != Xi.n || ov.e.target_vars() != Xj.n ||
      ov.ehat.rows != Xj.k || ov.ehat.cols != Xi.k)
    throw std::invalid_argument("validate_overlap: transition arity mismatch");

  OverlapVerdict out;
  out.i = ov.i;
  out.j = ov.j;

  std::vector<Polynomial> lhs = ov.ehat.apply(Xi.s);
  for (int c = 0; c < Xj.k; ++c) {
    Polynomial diff = lhs[static_cast<size_t>(c)] - compose(Xj.s[static_cast<size_t>(c)], ov.e);
    LocalizedMembership m = member_localized(diff, Xi.gb_s2, ov.dom, cap);
    if (!m.ok) {
      out.congruence_ok = false;
      out.remainder = m.remainder;
      break;
    }
    out.max_power = std::max(out.max_power, m.power);
  }

  for (const auto& v : ov.witnesses) {
    if (!ov.dom.whole && ov.dom.p.evaluate(v) == 0)
      throw std::invalid_argument("validate_overlap: witness outside the principal open");
  }
  if (!ov.witnesses.empty()) {
    WitnessSet w = make_witness_set(Xi, ov.witnesses);
    EtaleVerdict e = etale_at(Xi, Xj, StdOneMor{ov.e, ov.ehat}, w);
    out.exactness_ok = e.etale;
    out.witness_reasons = e.reasons;
  }
  return out;
}

struct TripleVerdict {
  int i = 0, j = 0, k = 0;
  bool base_ok = true;
  bool bundle_ok = true;
  std::optional<Polynomial> remainder;
  int max_power = 0;

  bool pass() const { return base_ok && bundle_ok; }
};

namespace detail {

inline const Overlap* find_overlap(const Atlas& atlas, int i, int j) {
  for (const auto& ov : atlas.overlaps)
    if (ov.i == i && ov.j == j) return &ov;
  return nullptr;
}

}  // namespace detail

/// Cocycle check on a chart triple: the two transition routes must agree up
/// to the squared ideal on bases and the plain ideal on bundle parts,
/// after clearing all three principal-open denominators.
inline TripleVerdict validate_triple(const Atlas& atlas, int i, int j, int k, int cap) {
  const Overlap* oij = detail::find_overlap(atlas, i, j);
  const Overlap* oik = detail::find_overlap(atlas, i, k);
  const Overlap* ojk = detail::find_overlap(atlas, j, k);
  if (!oij || !oik || !ojk)
    throw std::invalid_argument("validate_triple: unresolvable domain intersection");
  const StdModel& Xi = atlas.charts.at(static_cast<size_t>(i));

  // combined denominator on the triple overlap
  OverlapDomain dom;
  dom.whole = true;
  dom.p = Polynomial::constant(Xi.n, 1);
  auto mix = [&](const Polynomial& q) {
    dom.whole = false;
    dom.p = dom.p * q;
  };
  if (!oij->dom.whole) mix(oij->dom.p);
  if (!oik->dom.whole) mix(oik->dom.p);
  if (!ojk->dom.whole) mix(compose(ojk->dom.p, oij->e));

  TripleVerdict out;
  out.i = i;
  out.j = j;
  out.k = k;

  PolyMap two_step = compose(ojk->e, oij->e);
  for (int c = 0; c < atlas.charts.at(static_cast<size_t>(k)).n; ++c) {
    Polynomial diff =
        oik->e.components[static_cast<size_t>(c)] - two_step.components[static_cast<size_t>(c)];
    LocalizedMembership m = member_localized(diff, Xi.gb_s2, dom, cap);
    if (!m.ok) {
      out.base_ok = false;
      out.remainder = m.remainder;
      return out;
    }
    out.max_power = std::max(out.max_power, m.power);
  }

  PolyMat two_step_hat = ojk->ehat.substitute(oij->e) * oij->ehat;
  for (size_t idx = 0; idx < oik->ehat.e.size(); ++idx) {
    Polynomial diff = oik->ehat.e[idx] - two_step_hat.e[idx];
    LocalizedMembership m = member_localized(diff, Xi.gb_s, dom, cap);
    if (!m.ok) {
      out.bundle_ok = false;
      out.remainder = m.remainder;
      return out;
    }
    out.max_power = std::max(out.max_power, m.power);
  }
  return out;
}

struct AtlasReport {
  bool pass = true;
  int vdim = 0;
  std::vector<int> vdim_offenders;  // chart indices with the wrong dimension
  std::vector<OverlapVerdict> overlaps;
  std::vector<TripleVerdict> triples;
  std::vector<std::string> assertions;  // echoed, never verified
  std::vector<std::string> warnings;
  int localization_cap = 0;
};

/// Aggregates dimension consistency, every declared overlap, and every chart
/// triple whose three overlaps are declared. The topological hypotheses are
/// listed verbatim; only the algebra is verified.
inline AtlasReport atlas_report(const Atlas& atlas, int cap = 8) {
  AtlasReport rep;
  rep.localization_cap = cap;
  rep.assertions = atlas.assertions;
  if (atlas.charts.empty()) {
    rep.warnings.push_back("empty atlas: vacuous pass");
    return rep;
  }
  rep.vdim = atlas.charts[0].vdim();
  for (size_t c = 0; c < atlas.charts.size(); ++c)
    if (atlas.charts[c].vdim() != rep.vdim) {
      rep.vdim_offenders.push_back(static_cast<int>(c));
      rep.pass = false;
    }
  for (const auto& ov : atlas.overlaps) {
    rep.overlaps.push_back(validate_overlap(atlas, ov, cap));
    if (!rep.overlaps.back().pass()) rep.pass = false;
  }
  int n = static_cast<int>(atlas.charts.size());
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = j + 1; k < n; ++k) {
        if (!detail::find_overlap(atlas, i, j) || !detail::find_overlap(atlas, i, k) ||
            !detail::find_overlap(atlas, j, k))
          continue;
        rep.triples.push_back(validate_triple(atlas, i, j, k, cap));
        if (!rep.triples.back().pass()) rep.pass = false;
      }
  return rep;
}

}  // namespace dgeom
