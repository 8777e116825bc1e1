#pragma once

#include <stdexcept>
#include <vector>

#include "dgeom/stdmodel.hpp"

namespace dgeom {

namespace detail {

// pad a polynomial in n vars into n + m vars (left block)
inline Polynomial lift_left(const Polynomial& p, int total) {
  Polynomial out(total);
  for (const auto& [e, c] : p.terms()) {
    Exp e2(static_cast<size_t>(total), 0u);
    for (size_t i = 0; i < e.size(); ++i) e2[i] = e[i];
    out.add_term(e2, c);
  }
  return out;
}

// shift a polynomial in m vars into n + m vars (right block)
inline Polynomial lift_right(const Polynomial& p, int offset, int total) {
  Polynomial out(total);
  for (const auto& [e, c] : p.terms()) {
    Exp e2(static_cast<size_t>(total), 0u);
    for (size_t i = 0; i < e.size(); ++i) e2[static_cast<size_t>(offset) + i] = e[i];
    out.add_term(e2, c);
  }
  return out;
}

}  // namespace detail

/// A 2-Cartesian square over the affine target R^d: the explicit model of
/// X x_Z Y together with its projections and the comparison 2-morphism
/// between the two legs into Z.
struct FibreSquare {
  StdModel X, Y, W;
  PolyMap gX, gY;  // the legs into R^d
  int d = 0;
  StdOneMor e;   // W -> X
  StdOneMor f;   // W -> Y
  StdTwoMor eta;  // (gX legs) compose e  =>  (gY legs) compose f

  StdModel target() const { return affine_model(d); }
  StdOneMor leg_x() const { return StdOneMor{gX, PolyMat(0, X.k, X.n)}; }
  StdOneMor leg_y() const { return StdOneMor{gY, PolyMat(0, Y.k, Y.n)}; }
};

/// Builds the fibre product of two standard models over R^d. The section of
/// W stacks the two pulled-back sections with the leg difference; the
/// comparison 2-morphism is -id on the new block, which makes all the
/// validation congruences close exactly.
inline FibreSquare fibre_product_affine(const StdModel& X, const PolyMap& gX, const StdModel& Y,
                                        const PolyMap& gY) {
  if (gX.source_vars != X.n || gY.source_vars != Y.n)
    throw std::invalid_argument("fibre_product_affine: leg source arity");
  if (gX.target_vars() != gY.target_vars())
    throw std::invalid_argument("fibre_product_affine: leg targets disagree");
  int d = gX.target_vars();
  int N = X.n + Y.n;

  std::vector<Polynomial> s;
  s.reserve(static_cast<size_t>(X.k + Y.k + d));
  for (const auto& c : X.s) s.push_back(detail::lift_left(c, N));
  for (const auto& c : Y.s) s.push_back(detail::lift_right(c, X.n, N));
  for (int j = 0; j < d; ++j)
    s.push_back(detail::lift_left(gX.components[static_cast<size_t>(j)], N) -
                detail::lift_right(gY.components[static_cast<size_t>(j)], X.n, N));

  FibreSquare sq;
  sq.X = X;
  sq.Y = Y;
  sq.gX = gX;
  sq.gY = gY;
  sq.d = d;
  sq.W = make_std_model(N, X.k + Y.k + d, std::move(s));

  // projection to X: first block of coordinates, identity on the s-block
  {
    std::vector<Polynomial> comps;
    for (int i = 0; i < X.n; ++i) comps.push_back(Polynomial::variable(N, i));
    PolyMat fhat(X.k, sq.W.k, N);
    for (int i = 0; i < X.k; ++i) fhat.at(i, i) = Polynomial::constant(N, 1);
    sq.e = StdOneMor{PolyMap(N, std::move(comps)), std::move(fhat)};
  }
  // projection to Y
  {
    std::vector<Polynomial> comps;
    for (int i = 0; i < Y.n; ++i) comps.push_back(Polynomial::variable(N, X.n + i));
    PolyMat fhat(Y.k, sq.W.k, N);
    for (int i = 0; i < Y.k; ++i) fhat.at(i, X.k + i) = Polynomial::constant(N, 1);
    sq.f = StdOneMor{PolyMap(N, std::move(comps)), std::move(fhat)};
  }
  // comparison 2-morphism: -identity on the leg-difference block
  {
    PolyMat lam(d, sq.W.k, N);
    for (int j = 0; j < d; ++j) lam.at(j, X.k + Y.k + j) = Polynomial::constant(N, -1);
    sq.eta = StdTwoMor{std::move(lam)};
  }
  return sq;
}

/// The virtual-dimension additivity audit; true by construction, exposed so
/// scenes and reports can record it.
inline bool vdim_check(const FibreSquare& sq) {
  return sq.W.vdim() == sq.X.vdim() + sq.Y.vdim() - sq.d;
}

/// Per-pair d-transversality of two legs into a common standard model: the
/// stacked dual-obstruction matrix must be injective at each pair.
inline std::vector<bool> d_transverse_at(const StdModel& X, const StdOneMor& g, const StdModel& Y,
                                         const StdOneMor& h, const StdModel& Z,
                                         const std::vector<std::pair<QVec, QVec>>& pairs) {
  detail::check_one_mor_arity(X, Z, g);
  detail::check_one_mor_arity(Y, Z, h);
  PolyMat du = jacobian(Z.section_map());
  std::vector<bool> out;
  for (const auto& [v, w] : pairs) {
    for (const auto& c : X.s)
      if (c.evaluate(v) != 0) throw std::invalid_argument("d_transverse_at: v is not a zero");
    for (const auto& c : Y.s)
      if (c.evaluate(w) != 0) throw std::invalid_argument("d_transverse_at: w is not a zero");
    QVec zg = g.f.evaluate(v), zh = h.f.evaluate(w);
    if (zg != zh) throw std::invalid_argument("d_transverse_at: legs disagree at the pair");
    for (const auto& c : Z.s)
      if (c.evaluate(zg) != 0)
        throw std::invalid_argument("d_transverse_at: image is not a zero of the target section");

    QMat m(X.k + Y.k + Z.n, Z.k);
    for (int r = 0; r < X.k; ++r)
      for (int c = 0; c < Z.k; ++c) m.at(r, c) = g.fhat.at(c, r).evaluate(v);
    for (int r = 0; r < Y.k; ++r)
      for (int c = 0; c < Z.k; ++c) m.at(X.k + r, c) = -h.fhat.at(c, r).evaluate(w);
    for (int r = 0; r < Z.n; ++r)
      for (int c = 0; c < Z.k; ++c) m.at(X.k + Y.k + r, c) = du.at(c, r).evaluate(zg);
    out.push_back(rank(m) == Z.k);
  }
  return out;
}

/// The same square with the two factors exchanged (the model of Y x_Z X).
inline FibreSquare swap_square(const FibreSquare& sq) {
  return fibre_product_affine(sq.Y, sq.gY, sq.X, sq.gX);
}

/// Witness pairs (v, w) with s(v) = 0, t(w) = 0 and matching leg values give
/// zeros of the product section; used to build witness sets on W.
inline WitnessSet product_witnesses(const FibreSquare& sq,
                                    const std::vector<std::pair<QVec, QVec>>& pairs) {
  std::vector<QVec> pts;
  for (const auto& [v, w] : pairs) {
    QVec joint = v;
    joint.insert(joint.end(), w.begin(), w.end());
    pts.push_back(std::move(joint));
  }
  return make_witness_set(sq.W, std::move(pts));
}

}  // namespace dgeom
