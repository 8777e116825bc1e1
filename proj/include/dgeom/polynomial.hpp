#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "dgeom/rational.hpp"

namespace dgeom {

/// Exponent vector of a monomial; length is the ambient variable count.
using Exp = std::vector<unsigned>;

inline unsigned exp_total_degree(const Exp& e) {
  return std::accumulate(e.begin(), e.end(), 0u);
}

inline bool exp_divides(const Exp& a, const Exp& b) {
  // a | b
  for (size_t i = 0; i < a.size(); ++i)
    if (a[i] > b[i]) return false;
  return true;
}

inline Exp exp_mul(const Exp& a, const Exp& b) {
  Exp r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

inline Exp exp_div(const Exp& a, const Exp& b) {
  Exp r(a.size());
  for (size_t i = 0; i < a.size(); ++i) {
    if (b[i] > a[i]) throw std::invalid_argument("exp_div: not divisible");
    r[i] = a[i] - b[i];
  }
  return r;
}

inline Exp exp_lcm(const Exp& a, const Exp& b) {
  Exp r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = std::max(a[i], b[i]);
  return r;
}

enum class MonomialOrder { GrevLex, Lex };

/// Three-way monomial comparison under the given order: negative when a < b.
inline int monomial_cmp(MonomialOrder order, const Exp& a, const Exp& b) {
  if (order == MonomialOrder::Lex) {
    for (size_t i = 0; i < a.size(); ++i) {
      if (a[i] != b[i]) return a[i] < b[i] ? -1 : 1;
    }
    return 0;
  }
  // graded reverse lexicographic
  unsigned da = exp_total_degree(a), db = exp_total_degree(b);
  if (da != db) return da < db ? -1 : 1;
  for (size_t i = a.size(); i-- > 0;) {
    if (a[i] != b[i]) return a[i] > b[i] ? -1 : 1;
  }
  return 0;
}

/// Structural ordering used for canonical term storage (not a monomial order).
struct ExpLess {
  bool operator()(const Exp& a, const Exp& b) const {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
  }
};

/// Sparse multivariate polynomial over the rationals. Terms are stored in a
/// canonical ordered map with no zero coefficients, so equal polynomials have
/// identical representations and iteration order is deterministic.
class Polynomial {
 public:
  using TermMap = std::map<Exp, Rat, ExpLess>;

  Polynomial() : n_(0) {}
  explicit Polynomial(int nvars) : n_(nvars) {
    if (nvars < 0) throw std::invalid_argument("Polynomial: negative nvars");
  }

  static Polynomial constant(int nvars, const Rat& c) {
    Polynomial p(nvars);
    if (c != 0) p.terms_[Exp(static_cast<size_t>(nvars), 0u)] = c;
    return p;
  }

  static Polynomial variable(int nvars, int i) {
    if (i < 0 || i >= nvars) throw std::invalid_argument("Polynomial::variable: index");
    Exp e(static_cast<size_t>(nvars), 0u);
    e[static_cast<size_t>(i)] = 1;
    Polynomial p(nvars);
    p.terms_[e] = 1;
    return p;
  }

  static Polynomial monomial(int nvars, Exp e, const Rat& c) {
    if (static_cast<int>(e.size()) != nvars)
      throw std::invalid_argument("Polynomial::monomial: exponent length");
    Polynomial p(nvars);
    if (c != 0) p.terms_[std::move(e)] = c;
    return p;
  }

  int nvars() const { return n_; }
  bool is_zero() const { return terms_.empty(); }
  const TermMap& terms() const { return terms_; }
  size_t term_count() const { return terms_.size(); }

  /// -1 for the zero polynomial.
  int total_degree() const {
    int d = -1;
    for (const auto& [e, c] : terms_) d = std::max(d, static_cast<int>(exp_total_degree(e)));
    return d;
  }

  bool is_constant() const {
    return terms_.empty() || (terms_.size() == 1 && exp_total_degree(terms_.begin()->first) == 0);
  }

  Rat constant_value() const {
    if (terms_.empty()) return Rat(0);
    if (!is_constant()) throw std::invalid_argument("constant_value: not constant");
    return terms_.begin()->second;
  }

  void add_term(const Exp& e, const Rat& c) {
    if (static_cast<int>(e.size()) != n_)
      throw std::invalid_argument("add_term: exponent length");
    if (c == 0) return;
    auto it = terms_.find(e);
    if (it == terms_.end()) {
      terms_.emplace(e, c);
    } else {
      it->second += c;
      if (it->second == 0) terms_.erase(it);
    }
  }

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b) {
    check_same_vars(a, b);
    Polynomial r = a;
    for (const auto& [e, c] : b.terms_) r.add_term(e, c);
    return r;
  }

  friend Polynomial operator-(const Polynomial& a, const Polynomial& b) {
    check_same_vars(a, b);
    Polynomial r = a;
    for (const auto& [e, c] : b.terms_) r.add_term(e, -c);
    return r;
  }

  Polynomial operator-() const {
    Polynomial r(n_);
    for (const auto& [e, c] : terms_) r.terms_[e] = -c;
    return r;
  }

  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    check_same_vars(a, b);
    Polynomial r(a.n_);
    for (const auto& [ea, ca] : a.terms_)
      for (const auto& [eb, cb] : b.terms_) r.add_term(exp_mul(ea, eb), ca * cb);
    return r;
  }

  friend Polynomial operator*(const Rat& c, const Polynomial& a) {
    Polynomial r(a.n_);
    if (c == 0) return r;
    for (const auto& [e, k] : a.terms_) r.terms_[e] = c * k;
    return r;
  }

  friend Polynomial operator*(const Polynomial& a, const Rat& c) { return c * a; }

  Polynomial& operator+=(const Polynomial& b) { return *this = *this + b; }
  Polynomial& operator-=(const Polynomial& b) { return *this = *this - b; }
  Polynomial& operator*=(const Polynomial& b) { return *this = *this * b; }

  friend bool operator==(const Polynomial& a, const Polynomial& b) {
    return a.n_ == b.n_ && a.terms_ == b.terms_;
  }
  friend bool operator!=(const Polynomial& a, const Polynomial& b) { return !(a == b); }

  Polynomial pow(unsigned e) const {
    Polynomial r = constant(n_, 1);
    for (unsigned i = 0; i < e; ++i) r = r * *this;
    return r;
  }

  Polynomial derivative(int var) const {
    if (var < 0 || var >= n_) throw std::invalid_argument("derivative: variable index");
    Polynomial r(n_);
    for (const auto& [e, c] : terms_) {
      unsigned k = e[static_cast<size_t>(var)];
      if (k == 0) continue;
      Exp e2 = e;
      e2[static_cast<size_t>(var)] = k - 1;
      r.add_term(e2, c * Rat(k));
    }
    return r;
  }

  Rat evaluate(const QVec& pt) const {
    if (static_cast<int>(pt.size()) != n_)
      throw std::invalid_argument("evaluate: point dimension mismatch");
    Rat acc(0);
    for (const auto& [e, c] : terms_) {
      Rat t = c;
      for (size_t i = 0; i < e.size(); ++i)
        for (unsigned j = 0; j < e[i]; ++j) t *= pt[i];
      acc += t;
    }
    return acc;
  }

  /// Substitution: images[i] replaces variable i. All images must live in
  /// `target_vars` variables (which must be passed explicitly when there are
  /// no images to infer it from).
  Polynomial substitute(const std::vector<Polynomial>& images, int target_vars = -1) const {
    if (static_cast<int>(images.size()) != n_)
      throw std::invalid_argument("substitute: image count mismatch");
    int m = target_vars >= 0 ? target_vars : (n_ == 0 ? 0 : images[0].nvars());
    for (const auto& im : images)
      if (im.nvars() != m) throw std::invalid_argument("substitute: mixed variable counts");
    // memoized powers of each image
    std::vector<std::vector<Polynomial>> pows(images.size());
    for (size_t i = 0; i < images.size(); ++i) pows[i].push_back(constant(m, 1));
    auto power = [&](size_t i, unsigned e) -> const Polynomial& {
      while (pows[i].size() <= e) pows[i].push_back(pows[i].back() * images[i]);
      return pows[i][e];
    };
    Polynomial r(m);
    for (const auto& [e, c] : terms_) {
      Polynomial t = constant(m, c);
      for (size_t i = 0; i < e.size(); ++i)
        if (e[i] > 0) t = t * power(i, e[i]);
      r += t;
    }
    return r;
  }

  /// Leading exponent under the given monomial order; throws on zero.
  const Exp& leading_exp(MonomialOrder order) const {
    if (terms_.empty()) throw std::invalid_argument("leading_exp: zero polynomial");
    const Exp* best = &terms_.begin()->first;
    for (const auto& [e, c] : terms_)
      if (monomial_cmp(order, e, *best) > 0) best = &e;
    return *best;
  }

  const Rat& leading_coeff(MonomialOrder order) const { return terms_.at(leading_exp(order)); }

  std::string str(const std::vector<std::string>& names = {}) const;

 private:
  static void check_same_vars(const Polynomial& a, const Polynomial& b) {
    if (a.n_ != b.n_) throw std::invalid_argument("polynomial arithmetic: variable counts differ");
  }

  int n_;
  TermMap terms_;
};

inline std::string default_var_name(int i, int n) {
  static const char* few[] = {"x", "y", "z", "w"};
  if (n <= 4) return few[i];
  return "x" + std::to_string(i);
}

inline std::string Polynomial::str(const std::vector<std::string>& names) const {
  if (terms_.empty()) return "0";
  // print highest grevlex terms first
  std::vector<const std::pair<const Exp, Rat>*> ts;
  for (const auto& t : terms_) ts.push_back(&t);
  std::sort(ts.begin(), ts.end(), [](auto* a, auto* b) {
    return monomial_cmp(MonomialOrder::GrevLex, a->first, b->first) > 0;
  });
  std::string out;
  for (auto* t : ts) {
    const auto& [e, c] = *t;
    std::string mono;
    for (size_t i = 0; i < e.size(); ++i) {
      if (e[i] == 0) continue;
      if (!mono.empty()) mono += "*";
      mono += names.empty() ? default_var_name(static_cast<int>(i), n_) : names[i];
      if (e[i] > 1) mono += "^" + std::to_string(e[i]);
    }
    Rat a = c;
    std::string sep = out.empty() ? (a < 0 ? "-" : "") : (a < 0 ? " - " : " + ");
    if (a < 0) a = -a;
    std::string coeff = format_rat(a);
    if (mono.empty())
      out += sep + coeff;
    else if (coeff == "1")
      out += sep + mono;
    else
      out += sep + coeff + "*" + mono;
  }
  return out;
}

/// A polynomial map between affine spaces: `components[j]` is the j-th
/// coordinate of the image, a polynomial in `source_vars` variables.
struct PolyMap {
  int source_vars = 0;
  std::vector<Polynomial> components;

  PolyMap() = default;
  PolyMap(int src, std::vector<Polynomial> comps) : source_vars(src), components(std::move(comps)) {
    for (const auto& c : components)
      if (c.nvars() != source_vars)
        throw std::invalid_argument("PolyMap: component variable count mismatch");
  }

  int target_vars() const { return static_cast<int>(components.size()); }

  static PolyMap identity(int n) {
    std::vector<Polynomial> comps;
    comps.reserve(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) comps.push_back(Polynomial::variable(n, i));
    return PolyMap(n, std::move(comps));
  }

  QVec evaluate(const QVec& pt) const {
    QVec out;
    out.reserve(components.size());
    for (const auto& c : components) out.push_back(c.evaluate(pt));
    return out;
  }

  friend bool operator==(const PolyMap& a, const PolyMap& b) {
    return a.source_vars == b.source_vars && a.components == b.components;
  }
};

/// g after f; requires f's target arity to match g's source arity.
inline PolyMap compose(const PolyMap& g, const PolyMap& f) {
  if (g.source_vars != f.target_vars())
    throw std::invalid_argument("compose: arity mismatch");
  std::vector<Polynomial> comps;
  comps.reserve(g.components.size());
  for (const auto& c : g.components) comps.push_back(c.substitute(f.components, f.source_vars));
  return PolyMap(f.source_vars, std::move(comps));
}

inline Polynomial compose(const Polynomial& p, const PolyMap& f) {
  if (p.nvars() != f.target_vars()) throw std::invalid_argument("compose: arity mismatch");
  return p.substitute(f.components, f.source_vars);
}

/// Dense matrix of polynomials, row-major.
struct PolyMat {
  int rows = 0, cols = 0, nvars = 0;
  std::vector<Polynomial> e;

  PolyMat() = default;
  PolyMat(int r, int c, int nv)
      : rows(r), cols(c), nvars(nv), e(static_cast<size_t>(r) * c, Polynomial(nv)) {
    if (r < 0 || c < 0) throw std::invalid_argument("PolyMat: negative shape");
  }

  Polynomial& at(int r, int c) { return e[static_cast<size_t>(r) * cols + c]; }
  const Polynomial& at(int r, int c) const { return e[static_cast<size_t>(r) * cols + c]; }

  static PolyMat identity(int n, int nv) {
    PolyMat m(n, n, nv);
    for (int i = 0; i < n; ++i) m.at(i, i) = Polynomial::constant(nv, 1);
    return m;
  }

  PolyMat transpose() const {
    PolyMat m(cols, rows, nvars);
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) m.at(c, r) = at(r, c);
    return m;
  }

  /// Entrywise composition with a polynomial map (pullback of the matrix).
  PolyMat substitute(const PolyMap& f) const {
    if (f.target_vars() != nvars) throw std::invalid_argument("PolyMat::substitute: arity");
    PolyMat m(rows, cols, f.source_vars);
    for (size_t i = 0; i < e.size(); ++i) m.e[i] = e[i].substitute(f.components, f.source_vars);
    return m;
  }

  friend PolyMat operator*(const PolyMat& a, const PolyMat& b) {
    if (a.cols != b.rows) throw std::invalid_argument("PolyMat mul: shape");
    if (a.nvars != b.nvars) throw std::invalid_argument("PolyMat mul: nvars");
    PolyMat m(a.rows, b.cols, a.nvars);
    for (int r = 0; r < a.rows; ++r)
      for (int k = 0; k < a.cols; ++k) {
        if (a.at(r, k).is_zero()) continue;
        for (int c = 0; c < b.cols; ++c) {
          if (b.at(k, c).is_zero()) continue;
          m.at(r, c) += a.at(r, k) * b.at(k, c);
        }
      }
    return m;
  }

  friend PolyMat operator+(const PolyMat& a, const PolyMat& b) {
    if (a.rows != b.rows || a.cols != b.cols || a.nvars != b.nvars)
      throw std::invalid_argument("PolyMat add: shape");
    PolyMat m(a.rows, a.cols, a.nvars);
    for (size_t i = 0; i < a.e.size(); ++i) m.e[i] = a.e[i] + b.e[i];
    return m;
  }

  friend PolyMat operator-(const PolyMat& a, const PolyMat& b) {
    if (a.rows != b.rows || a.cols != b.cols || a.nvars != b.nvars)
      throw std::invalid_argument("PolyMat sub: shape");
    PolyMat m(a.rows, a.cols, a.nvars);
    for (size_t i = 0; i < a.e.size(); ++i) m.e[i] = a.e[i] - b.e[i];
    return m;
  }

  PolyMat operator-() const {
    PolyMat m(rows, cols, nvars);
    for (size_t i = 0; i < e.size(); ++i) m.e[i] = -e[i];
    return m;
  }

  bool is_zero() const {
    return std::all_of(e.begin(), e.end(), [](const Polynomial& p) { return p.is_zero(); });
  }

  friend bool operator==(const PolyMat& a, const PolyMat& b) {
    return a.rows == b.rows && a.cols == b.cols && a.nvars == b.nvars && a.e == b.e;
  }

  /// Column action on a vector of polynomials.
  std::vector<Polynomial> apply(const std::vector<Polynomial>& v) const {
    if (static_cast<int>(v.size()) != cols) throw std::invalid_argument("PolyMat::apply: size");
    std::vector<Polynomial> out(static_cast<size_t>(rows), Polynomial(nvars));
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) out[static_cast<size_t>(r)] += at(r, c) * v[static_cast<size_t>(c)];
    return out;
  }
};

/// Entry (j,i) is the i-th partial of the j-th component.
inline PolyMat jacobian(const PolyMap& f) {
  PolyMat m(f.target_vars(), f.source_vars, f.source_vars);
  for (int j = 0; j < f.target_vars(); ++j)
    for (int i = 0; i < f.source_vars; ++i)
      m.at(j, i) = f.components[static_cast<size_t>(j)].derivative(i);
  return m;
}

}  // namespace dgeom
