#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "dgeom/rational.hpp"

namespace dgeom {

/// Dense rational matrix, row-major. Everything below is exact Gaussian
/// elimination; pivoting is deterministic (first nonzero in column order).
struct QMat {
  int rows = 0, cols = 0;
  QVec e;

  QMat() = default;
  QMat(int r, int c) : rows(r), cols(c), e(static_cast<size_t>(r) * c, Rat(0)) {
    if (r < 0 || c < 0) throw std::invalid_argument("QMat: negative shape");
  }

  Rat& at(int r, int c) { return e[static_cast<size_t>(r) * cols + c]; }
  const Rat& at(int r, int c) const { return e[static_cast<size_t>(r) * cols + c]; }

  static QMat identity(int n) {
    QMat m(n, n);
    for (int i = 0; i < n; ++i) m.at(i, i) = 1;
    return m;
  }

  static QMat from_rows(const std::vector<QVec>& rs) {
    QMat m(static_cast<int>(rs.size()), rs.empty() ? 0 : static_cast<int>(rs[0].size()));
    for (int r = 0; r < m.rows; ++r) {
      if (static_cast<int>(rs[static_cast<size_t>(r)].size()) != m.cols)
        throw std::invalid_argument("QMat::from_rows: ragged input");
      for (int c = 0; c < m.cols; ++c) m.at(r, c) = rs[static_cast<size_t>(r)][static_cast<size_t>(c)];
    }
    return m;
  }

  QMat transpose() const {
    QMat m(cols, rows);
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) m.at(c, r) = at(r, c);
    return m;
  }

  bool is_zero() const {
    for (const auto& x : e)
      if (x != 0) return false;
    return true;
  }

  friend QMat operator*(const QMat& a, const QMat& b) {
    if (a.cols != b.rows) throw std::invalid_argument("QMat mul: shape");
    QMat m(a.rows, b.cols);
    for (int r = 0; r < a.rows; ++r)
      for (int k = 0; k < a.cols; ++k) {
        if (a.at(r, k) == 0) continue;
        for (int c = 0; c < b.cols; ++c) m.at(r, c) += a.at(r, k) * b.at(k, c);
      }
    return m;
  }

  friend QMat operator+(const QMat& a, const QMat& b) {
    if (a.rows != b.rows || a.cols != b.cols) throw std::invalid_argument("QMat add: shape");
    QMat m = a;
    for (size_t i = 0; i < m.e.size(); ++i) m.e[i] += b.e[i];
    return m;
  }

  friend QMat operator-(const QMat& a, const QMat& b) {
    if (a.rows != b.rows || a.cols != b.cols) throw std::invalid_argument("QMat sub: shape");
    QMat m = a;
    for (size_t i = 0; i < m.e.size(); ++i) m.e[i] -= b.e[i];
    return m;
  }

  QMat operator-() const {
    QMat m = *this;
    for (auto& x : m.e) x = -x;
    return m;
  }

  friend QMat operator*(const Rat& c, const QMat& a) {
    QMat m = a;
    for (auto& x : m.e) x *= c;
    return m;
  }

  friend bool operator==(const QMat& a, const QMat& b) {
    return a.rows == b.rows && a.cols == b.cols && a.e == b.e;
  }

  QVec apply(const QVec& v) const {
    if (static_cast<int>(v.size()) != cols) throw std::invalid_argument("QMat::apply: size");
    QVec out(static_cast<size_t>(rows), Rat(0));
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) out[static_cast<size_t>(r)] += at(r, c) * v[static_cast<size_t>(c)];
    return out;
  }

  /// Horizontal concatenation [a | b].
  static QMat hcat(const QMat& a, const QMat& b) {
    if (a.rows != b.rows) throw std::invalid_argument("QMat::hcat: rows");
    QMat m(a.rows, a.cols + b.cols);
    for (int r = 0; r < a.rows; ++r) {
      for (int c = 0; c < a.cols; ++c) m.at(r, c) = a.at(r, c);
      for (int c = 0; c < b.cols; ++c) m.at(r, a.cols + c) = b.at(r, c);
    }
    return m;
  }

  /// Vertical concatenation [a ; b].
  static QMat vcat(const QMat& a, const QMat& b) {
    if (a.cols != b.cols) throw std::invalid_argument("QMat::vcat: cols");
    QMat m(a.rows + b.rows, a.cols);
    for (int r = 0; r < a.rows; ++r)
      for (int c = 0; c < a.cols; ++c) m.at(r, c) = a.at(r, c);
    for (int r = 0; r < b.rows; ++r)
      for (int c = 0; c < a.cols; ++c) m.at(a.rows + r, c) = b.at(r, c);
    return m;
  }

  QMat block(int r0, int c0, int r, int c) const {
    QMat m(r, c);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) m.at(i, j) = at(r0 + i, c0 + j);
    return m;
  }
};

/// In-place reduced row echelon form; returns the pivot columns.
inline std::vector<int> rref(QMat& m) {
  std::vector<int> pivots;
  int row = 0;
  for (int col = 0; col < m.cols && row < m.rows; ++col) {
    int pr = -1;
    for (int r = row; r < m.rows; ++r)
      if (m.at(r, col) != 0) {
        pr = r;
        break;
      }
    if (pr < 0) continue;
    if (pr != row)
      for (int c = 0; c < m.cols; ++c) std::swap(m.at(pr, c), m.at(row, c));
    Rat inv = Rat(1) / m.at(row, col);
    for (int c = col; c < m.cols; ++c) m.at(row, c) *= inv;
    for (int r = 0; r < m.rows; ++r) {
      if (r == row || m.at(r, col) == 0) continue;
      Rat f = m.at(r, col);
      for (int c = col; c < m.cols; ++c) m.at(r, c) -= f * m.at(row, c);
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

inline int rank(const QMat& m) {
  QMat t = m;
  return static_cast<int>(rref(t).size());
}

/// Any exact solution of A X = B (X has B.cols columns), or nullopt when the
/// system is inconsistent. Free variables are set to zero.
inline std::optional<QMat> solve(const QMat& a, const QMat& b) {
  if (a.rows != b.rows) throw std::invalid_argument("solve: row mismatch");
  QMat aug = QMat::hcat(a, b);
  std::vector<int> piv = rref(aug);
  for (int p : piv)
    if (p >= a.cols) return std::nullopt;  // pivot in the RHS block
  QMat x(a.cols, b.cols);
  for (size_t i = 0; i < piv.size(); ++i)
    for (int c = 0; c < b.cols; ++c)
      x.at(piv[i], c) = aug.at(static_cast<int>(i), a.cols + c);
  return x;
}

inline std::optional<QVec> solve_vec(const QMat& a, const QVec& b) {
  QMat bm(static_cast<int>(b.size()), 1);
  for (size_t i = 0; i < b.size(); ++i) bm.at(static_cast<int>(i), 0) = b[i];
  auto x = solve(a, bm);
  if (!x) return std::nullopt;
  QVec v(static_cast<size_t>(a.cols));
  for (int i = 0; i < a.cols; ++i) v[static_cast<size_t>(i)] = x->at(i, 0);
  return v;
}

/// Kernel basis of A returned as matrix columns (standard free-variable basis;
/// deterministic).
inline QMat kernel(const QMat& a) {
  QMat r = a;
  std::vector<int> piv = rref(r);
  std::vector<bool> is_piv(static_cast<size_t>(a.cols), false);
  for (int p : piv) is_piv[static_cast<size_t>(p)] = true;
  int nfree = a.cols - static_cast<int>(piv.size());
  QMat k(a.cols, nfree);
  int fc = 0;
  for (int c = 0; c < a.cols; ++c) {
    if (is_piv[static_cast<size_t>(c)]) continue;
    k.at(c, fc) = 1;
    for (size_t i = 0; i < piv.size(); ++i) k.at(piv[i], fc) = -r.at(static_cast<int>(i), c);
    ++fc;
  }
  return k;
}

inline std::optional<QMat> inverse(const QMat& m) {
  if (m.rows != m.cols) throw std::invalid_argument("inverse: not square");
  auto x = solve(m, QMat::identity(m.rows));
  if (!x || rank(m) != m.rows) return std::nullopt;
  return x;
}

inline Rat det(const QMat& m) {
  if (m.rows != m.cols) throw std::invalid_argument("det: not square");
  QMat a = m;
  Rat d(1);
  for (int col = 0; col < a.cols; ++col) {
    int pr = -1;
    for (int r = col; r < a.rows; ++r)
      if (a.at(r, col) != 0) {
        pr = r;
        break;
      }
    if (pr < 0) return Rat(0);
    if (pr != col) {
      for (int c = 0; c < a.cols; ++c) std::swap(a.at(pr, c), a.at(col, c));
      d = -d;
    }
    d *= a.at(col, col);
    Rat inv = Rat(1) / a.at(col, col);
    for (int r = col + 1; r < a.rows; ++r) {
      if (a.at(r, col) == 0) continue;
      Rat f = a.at(r, col) * inv;
      for (int c = col; c < a.cols; ++c) a.at(r, c) -= f * a.at(col, c);
    }
  }
  return d;
}

}  // namespace dgeom
