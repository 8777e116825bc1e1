#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "dgeom/groebner.hpp"
#include "dgeom/linalg.hpp"

namespace dgeom {

struct NotArtinianError : std::runtime_error {
  NotArtinianError() : std::runtime_error("quotient ring is not Artinian") {}
};

/// Exact entrywise evaluation of a polynomial matrix at a rational point.
inline QMat evaluate(const PolyMat& m, const QVec& pt) {
  QMat out(m.rows, m.cols);
  for (int r = 0; r < m.rows; ++r)
    for (int c = 0; c < m.cols; ++c) out.at(r, c) = m.at(r, c).evaluate(pt);
  return out;
}

/// A finite-dimensional quotient Q[x]/I with its standard-monomial basis.
/// Ring elements are held in normal form; linear problems over the ring are
/// solved exactly by expanding over the Q-basis.
class ArtinianAlgebra {
 public:
  explicit ArtinianAlgebra(QuotientPresentation pres) : pres_(std::move(pres)) {
    if (!pres_.artinian) throw NotArtinianError();
    for (size_t i = 0; i < pres_.monomial_basis.size(); ++i)
      index_[pres_.monomial_basis[i]] = static_cast<int>(i);
  }

  const QuotientPresentation& presentation() const { return pres_; }
  int dim() const { return pres_.dimension(); }
  int nvars() const { return pres_.gb.n; }

  Polynomial reduce(const Polynomial& p) const { return normal_form(p, pres_.gb); }

  /// Coordinates of the class of p over the monomial basis.
  QVec coords(const Polynomial& p) const {
    Polynomial r = reduce(p);
    QVec v(static_cast<size_t>(dim()), Rat(0));
    for (const auto& [e, c] : r.terms()) {
      auto it = index_.find(e);
      if (it == index_.end())
        throw std::logic_error("ArtinianAlgebra: normal form outside the staircase");
      v[static_cast<size_t>(it->second)] = c;
    }
    return v;
  }

  Polynomial element(const QVec& v) const {
    if (static_cast<int>(v.size()) != dim())
      throw std::invalid_argument("ArtinianAlgebra::element: size");
    Polynomial p(nvars());
    for (size_t i = 0; i < v.size(); ++i) p.add_term(pres_.monomial_basis[i], v[i]);
    return p;
  }

  /// Matrix of multiplication by p on the quotient, over the monomial basis.
  QMat mult_matrix(const Polynomial& p) const {
    QMat m(dim(), dim());
    for (int j = 0; j < dim(); ++j) {
      Polynomial bj = Polynomial::monomial(nvars(), pres_.monomial_basis[static_cast<size_t>(j)], 1);
      QVec col = coords(p * bj);
      for (int i = 0; i < dim(); ++i) m.at(i, j) = col[static_cast<size_t>(i)];
    }
    return m;
  }

 private:
  QuotientPresentation pres_;
  std::map<Exp, int, ExpLess> index_;
};

/// Q-linear expansion of an m x n matrix over the quotient: block (i,j) is
/// the multiplication matrix of entry (i,j).
inline QMat linearize(const PolyMat& m, const ArtinianAlgebra& alg) {
  int d = alg.dim();
  QMat big(m.rows * d, m.cols * d);
  for (int r = 0; r < m.rows; ++r)
    for (int c = 0; c < m.cols; ++c) {
      if (m.at(r, c).is_zero()) continue;
      QMat block = alg.mult_matrix(m.at(r, c));
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) big.at(r * d + i, c * d + j) = block.at(i, j);
    }
  return big;
}

inline QVec linearize_vec(const std::vector<Polynomial>& v, const ArtinianAlgebra& alg) {
  int d = alg.dim();
  QVec out;
  out.reserve(v.size() * static_cast<size_t>(d));
  for (const auto& p : v) {
    QVec c = alg.coords(p);
    out.insert(out.end(), c.begin(), c.end());
  }
  return out;
}

inline std::vector<Polynomial> delinearize_vec(const QVec& v, int count, const ArtinianAlgebra& alg) {
  int d = alg.dim();
  if (static_cast<int>(v.size()) != count * d)
    throw std::invalid_argument("delinearize_vec: size");
  std::vector<Polynomial> out;
  out.reserve(static_cast<size_t>(count));
  for (int i = 0; i < count; ++i)
    out.push_back(alg.element(QVec(v.begin() + static_cast<long>(i) * d,
                                   v.begin() + static_cast<long>(i + 1) * d)));
  return out;
}

/// Exact solve of M xi = b over the quotient ring. Returns a ring-element
/// solution vector, or nullopt when the linearized rational system is
/// inconsistent (a definitive no).
inline std::optional<std::vector<Polynomial>> ring_solve(const PolyMat& m,
                                                         const std::vector<Polynomial>& b,
                                                         const ArtinianAlgebra& alg) {
  if (static_cast<int>(b.size()) != m.rows) throw std::invalid_argument("ring_solve: rhs size");
  QMat big = linearize(m, alg);
  QVec rhs = linearize_vec(b, alg);
  auto x = solve_vec(big, rhs);
  if (!x) return std::nullopt;
  return delinearize_vec(*x, m.cols, alg);
}

/// Q-basis of the kernel of M acting on the quotient-module column space,
/// returned as ring-element vectors.
inline std::vector<std::vector<Polynomial>> ring_kernel(const PolyMat& m,
                                                        const ArtinianAlgebra& alg) {
  QMat big = linearize(m, alg);
  QMat k = kernel(big);
  std::vector<std::vector<Polynomial>> out;
  for (int c = 0; c < k.cols; ++c) {
    QVec col(static_cast<size_t>(k.rows));
    for (int r = 0; r < k.rows; ++r) col[static_cast<size_t>(r)] = k.at(r, c);
    out.push_back(delinearize_vec(col, m.cols, alg));
  }
  return out;
}

inline int ring_rank(const PolyMat& m, const ArtinianAlgebra& alg) {
  QMat big = linearize(m, alg);
  return rank(big);
}

}  // namespace dgeom
