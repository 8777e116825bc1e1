#pragma once

#include <algorithm>
#include <optional>
#include <set>
#include <stdexcept>
#include <vector>

#include "dgeom/polynomial.hpp"

namespace dgeom {

/// Reduced Groebner basis of an ideal in Q[x_1..x_n]. Generators are monic,
/// mutually reduced, and sorted by leading monomial, so the representation is
/// canonical for a given ideal and order.
struct GroebnerBasis {
  int n = 0;
  MonomialOrder order = MonomialOrder::GrevLex;
  std::vector<Polynomial> gens;

  bool is_zero_ideal() const { return gens.empty(); }
  bool is_unit_ideal() const { return gens.size() == 1 && gens[0].is_constant() && !gens[0].is_zero(); }
};

/// Remainder of p under multivariate division by `basis`; no term of the
/// result is divisible by any leading monomial of the basis.
inline Polynomial normal_form(const Polynomial& p, const std::vector<Polynomial>& basis,
                              MonomialOrder order) {
  struct Lead {
    const Polynomial* g;
    const Exp* lm;
    Rat lc;
  };
  std::vector<Lead> leads;
  leads.reserve(basis.size());
  for (const auto& g : basis) {
    if (g.is_zero()) continue;
    const Exp& lm = g.leading_exp(order);
    leads.push_back({&g, &lm, g.leading_coeff(order)});
  }
  Polynomial h = p;
  Polynomial r(p.nvars());
  while (!h.is_zero()) {
    const Exp& lm_h = h.leading_exp(order);
    Rat lc_h = h.terms().at(lm_h);
    bool divided = false;
    for (const auto& L : leads) {
      if (!exp_divides(*L.lm, lm_h)) continue;
      Exp q = exp_div(lm_h, *L.lm);
      Polynomial factor = Polynomial::monomial(p.nvars(), q, lc_h / L.lc);
      h = h - factor * *L.g;
      divided = true;
      break;
    }
    if (!divided) {
      r.add_term(lm_h, lc_h);
      Polynomial t = Polynomial::monomial(p.nvars(), lm_h, lc_h);
      h = h - t;
    }
  }
  return r;
}

inline Polynomial normal_form(const Polynomial& p, const GroebnerBasis& gb) {
  if (p.nvars() != gb.n) throw std::invalid_argument("normal_form: variable count mismatch");
  return normal_form(p, gb.gens, gb.order);
}

inline Polynomial s_polynomial(const Polynomial& f, const Polynomial& g, MonomialOrder order) {
  const Exp& lf = f.leading_exp(order);
  const Exp& lg = g.leading_exp(order);
  Exp l = exp_lcm(lf, lg);
  Polynomial mf = Polynomial::monomial(f.nvars(), exp_div(l, lf), Rat(1) / f.leading_coeff(order));
  Polynomial mg = Polynomial::monomial(g.nvars(), exp_div(l, lg), Rat(1) / g.leading_coeff(order));
  return mf * f - mg * g;
}

/// Buchberger with the coprime-leading-term criterion, followed by
/// autoreduction. Returns the unique reduced basis; the empty input (or all
/// zero generators) yields the zero ideal's empty basis.
inline GroebnerBasis groebner(const std::vector<Polynomial>& gens,
                              MonomialOrder order = MonomialOrder::GrevLex, int nvars = -1) {
  int n = nvars >= 0 ? nvars : (gens.empty() ? 0 : gens[0].nvars());
  for (const auto& g : gens)
    if (g.nvars() != n) throw std::invalid_argument("groebner: variable count mismatch");

  std::vector<Polynomial> basis;
  for (const auto& g : gens)
    if (!g.is_zero()) basis.push_back(g);

  // pair queue, processed in a deterministic order
  std::vector<std::pair<size_t, size_t>> pairs;
  for (size_t i = 0; i < basis.size(); ++i)
    for (size_t j = i + 1; j < basis.size(); ++j) pairs.emplace_back(i, j);

  size_t next = 0;
  while (next < pairs.size()) {
    auto [i, j] = pairs[next++];
    const Exp& li = basis[i].leading_exp(order);
    const Exp& lj = basis[j].leading_exp(order);
    // product criterion: coprime leading monomials reduce to zero
    Exp l = exp_lcm(li, lj);
    if (exp_total_degree(l) == exp_total_degree(li) + exp_total_degree(lj)) continue;
    Polynomial s = s_polynomial(basis[i], basis[j], order);
    Polynomial r = normal_form(s, basis, order);
    if (!r.is_zero()) {
      basis.push_back(r);
      for (size_t k = 0; k + 1 < basis.size(); ++k) pairs.emplace_back(k, basis.size() - 1);
    }
  }

  // autoreduce to the canonical reduced basis
  bool changed = true;
  while (changed) {
    changed = false;
    for (size_t i = 0; i < basis.size(); ++i) {
      std::vector<Polynomial> others;
      others.reserve(basis.size() - 1);
      for (size_t j = 0; j < basis.size(); ++j)
        if (j != i) others.push_back(basis[j]);
      Polynomial r = normal_form(basis[i], others, order);
      if (r != basis[i]) changed = true;
      if (r.is_zero()) {
        basis.erase(basis.begin() + static_cast<long>(i));
        --i;
        changed = true;
      } else {
        basis[i] = r;
      }
    }
  }
  for (auto& g : basis) g = (Rat(1) / g.leading_coeff(order)) * g;
  std::sort(basis.begin(), basis.end(), [&](const Polynomial& a, const Polynomial& b) {
    return monomial_cmp(order, a.leading_exp(order), b.leading_exp(order)) < 0;
  });

  GroebnerBasis gb;
  gb.n = n;
  gb.order = order;
  gb.gens = std::move(basis);
  return gb;
}

/// Ideal membership: p lies in the ideal iff its normal form vanishes.
inline bool member(const Polynomial& p, const GroebnerBasis& gb) {
  return normal_form(p, gb).is_zero();
}

/// Generators of I^2 for I = (gens): all products g_i g_j with i <= j.
inline std::vector<Polynomial> ideal_square(const std::vector<Polynomial>& gens) {
  std::vector<Polynomial> out;
  out.reserve(gens.size() * (gens.size() + 1) / 2);
  for (size_t i = 0; i < gens.size(); ++i)
    for (size_t j = i; j < gens.size(); ++j) out.push_back(gens[i] * gens[j]);
  return out;
}

/// Quotient ring Q[x]/I presented by a reduced basis. When the quotient is
/// finite-dimensional over Q (Artinian), `monomial_basis` lists the standard
/// monomials under the staircase, in increasing monomial order.
struct QuotientPresentation {
  GroebnerBasis gb;
  bool artinian = false;
  std::vector<Exp> monomial_basis;

  int dimension() const { return static_cast<int>(monomial_basis.size()); }
};

/// Finite-dimensionality is decided by the staircase criterion: every
/// variable must have a pure power among the leading monomials.
inline QuotientPresentation quotient_basis(const GroebnerBasis& gb) {
  QuotientPresentation q;
  q.gb = gb;

  if (gb.is_unit_ideal()) {
    q.artinian = true;  // zero ring
    return q;
  }

  std::vector<Exp> lms;
  for (const auto& g : gb.gens) lms.push_back(g.leading_exp(gb.order));

  std::vector<unsigned> bound(static_cast<size_t>(gb.n), 0);
  for (int v = 0; v < gb.n; ++v) {
    bool found = false;
    for (const auto& lm : lms) {
      bool pure = lm[static_cast<size_t>(v)] > 0;
      for (int u = 0; pure && u < gb.n; ++u)
        if (u != v && lm[static_cast<size_t>(u)] > 0) pure = false;
      if (pure) {
        bound[static_cast<size_t>(v)] = lm[static_cast<size_t>(v)];
        found = true;
        break;
      }
    }
    if (!found) {
      q.artinian = false;
      return q;
    }
  }

  // enumerate monomials under the staircase
  q.artinian = true;
  Exp cur(static_cast<size_t>(gb.n), 0u);
  std::vector<Exp> all;
  while (true) {
    bool standard = true;
    for (const auto& lm : lms)
      if (exp_divides(lm, cur)) {
        standard = false;
        break;
      }
    if (standard) all.push_back(cur);
    // odometer over the box prod [0, bound_v)
    int v = 0;
    for (; v < gb.n; ++v) {
      if (cur[static_cast<size_t>(v)] + 1 < bound[static_cast<size_t>(v)]) {
        ++cur[static_cast<size_t>(v)];
        break;
      }
      cur[static_cast<size_t>(v)] = 0;
    }
    if (v == gb.n) break;
  }
  std::sort(all.begin(), all.end(), [&](const Exp& a, const Exp& b) {
    return monomial_cmp(gb.order, a, b) < 0;
  });
  q.monomial_basis = std::move(all);
  return q;
}

}  // namespace dgeom
