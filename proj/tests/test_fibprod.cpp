#include <catch2/catch_amalgamated.hpp>

#include "dgeom/fibprod.hpp"
#include "testutil.hpp"

using namespace dgeom;

namespace {
Polynomial xv(int n = 1, int i = 0) { return Polynomial::variable(n, i); }
Polynomial cn(int n, int v) { return Polynomial::constant(n, Rat(v)); }
}  // namespace

TEST_CASE("line cut out by a function: R x_{f,R,0} point") {
  StdModel X = affine_model(1);
  StdModel Y = affine_model(0);
  PolyMap gX(1, {xv()});
  PolyMap gY(0, {Polynomial::constant(0, 0)});
  FibreSquare sq = fibre_product_affine(X, gX, Y, gY);
  CHECK(sq.W.n == 1);
  CHECK(sq.W.k == 1);
  CHECK(sq.W.s[0] == xv());
  CHECK(sq.W.vdim() == 0);
  CHECK(vdim_check(sq));
  CHECK(validate_one_mor(sq.W, X, sq.e).ok);
  CHECK(validate_one_mor(sq.W, Y, sq.f).ok);
}

TEST_CASE("point x_R point has virtual dimension -1") {
  StdModel pt = affine_model(0);
  PolyMap zero(0, {Polynomial::constant(0, 0)});
  FibreSquare sq = fibre_product_affine(pt, zero, pt, zero);
  CHECK(sq.W.n == 0);
  CHECK(sq.W.k == 1);
  CHECK(sq.W.vdim() == -1);
  CHECK(sq.W.s[0].is_zero());
  CHECK(vdim_check(sq));

  // swapping two copies of the point gives the identical model
  FibreSquare sw = swap_square(sq);
  CHECK(sw.W.n == sq.W.n);
  CHECK(sw.W.s == sq.W.s);
}

TEST_CASE("obstructed point over the line") {
  auto x = xv();
  StdModel X = make_std_model(1, 1, {x * x});
  StdModel pt = affine_model(0);
  FibreSquare sq =
      fibre_product_affine(X, PolyMap(1, {x}), pt, PolyMap(0, {Polynomial::constant(0, 0)}));
  CHECK(sq.W.n == 1);
  CHECK(sq.W.k == 2);
  CHECK(sq.W.vdim() == -1);
  CHECK(sq.W.s[0] == x * x);
  CHECK(sq.W.s[1] == x);
  // the only zero is the origin
  WitnessSet w = product_witnesses(sq, {{{Rat(0)}, {}}});
  CHECK(w.points.size() == 1);
}

TEST_CASE("projections and the comparison 2-morphism always validate") {
  Rng rng(307);
  for (int trial = 0; trial < 25; ++trial) {
    int n = rng.range(0, 2), m = rng.range(0, 2), k = rng.range(0, 2), l = rng.range(0, 2),
        d = rng.range(0, 2);
    std::vector<Polynomial> s, t;
    for (int i = 0; i < k; ++i) s.push_back(random_poly(rng, n, 2, 2, 2));
    for (int i = 0; i < l; ++i) t.push_back(random_poly(rng, m, 2, 2, 2));
    StdModel X = make_std_model(n, k, s);
    StdModel Y = make_std_model(m, l, t);
    std::vector<Polynomial> gx, gy;
    for (int j = 0; j < d; ++j) {
      gx.push_back(random_poly(rng, n, 2, 2, 2));
      gy.push_back(random_poly(rng, m, 2, 2, 2));
    }
    FibreSquare sq = fibre_product_affine(X, PolyMap(n, gx), Y, PolyMap(m, gy));
    CHECK(vdim_check(sq));
    CHECK(validate_one_mor(sq.W, X, sq.e).ok);
    CHECK(validate_one_mor(sq.W, Y, sq.f).ok);
    StdModel Z = sq.target();
    StdOneMor left = compose_one(sq.W, X, Z, sq.leg_x(), sq.e);
    StdOneMor right = compose_one(sq.W, Y, Z, sq.leg_y(), sq.f);
    CHECK(validate_two_mor(sq.W, Z, left, right, sq.eta).ok);
  }
}

TEST_CASE("pointwise zeros of the product agree with matching pairs") {
  auto x = xv();
  StdModel X = make_std_model(1, 1, {x * x - cn(1, 1)});  // zeros +-1
  StdModel Y = affine_model(1);
  PolyMap gX(1, {x});
  PolyMap gY(1, {Rat(2) * x});  // matching: v = 2w
  FibreSquare sq = fibre_product_affine(X, gX, Y, gY);

  // (1, 1/2) and (-1, -1/2) are zeros; (1, 1) is not
  CHECK_NOTHROW(product_witnesses(sq, {{{Rat(1)}, {Rat(1, 2)}}, {{Rat(-1)}, {Rat(-1, 2)}}}));
  CHECK_THROWS_AS(product_witnesses(sq, {{{Rat(1)}, {Rat(1)}}}), std::invalid_argument);
}

TEST_CASE("d-transversality examples") {
  auto x = xv();
  StdModel line = affine_model(1);
  StdModel pt = affine_model(0);

  // manifold target: rank-0 obstruction, vacuously transverse
  {
    StdModel Z = affine_model(1);
    StdOneMor g{PolyMap(1, {x}), PolyMat(0, 0, 1)};
    StdOneMor h{PolyMap(0, {Polynomial::constant(0, 0)}), PolyMat(0, 0, 0)};
    auto verdicts = d_transverse_at(line, g, pt, h, Z, {{{Rat(0)}, {}}});
    REQUIRE(verdicts.size() == 1);
    CHECK(verdicts[0]);
  }

  // target (1,1,z): du = (1) at 0, still injective with zero bundle parts
  {
    StdModel Z = make_std_model(1, 1, {x});
    StdOneMor g{PolyMap(1, {Polynomial(1)}), PolyMat(1, 0, 1)};
    StdOneMor h{PolyMap(0, {Polynomial::constant(0, 0)}), PolyMat(1, 0, 0)};
    REQUIRE(validate_one_mor(line, Z, g).ok);
    auto verdicts = d_transverse_at(line, g, pt, h, Z, {{{Rat(0)}, {}}});
    CHECK(verdicts[0]);
  }

  // target (1,1,z^2): du vanishes at 0, nothing left to be injective
  {
    StdModel Z = make_std_model(1, 1, {x * x});
    StdOneMor g{PolyMap(1, {Polynomial(1)}), PolyMat(1, 0, 1)};
    StdOneMor h{PolyMap(0, {Polynomial::constant(0, 0)}), PolyMat(1, 0, 0)};
    auto verdicts = d_transverse_at(line, g, pt, h, Z, {{{Rat(0)}, {}}});
    CHECK_FALSE(verdicts[0]);
  }
}

TEST_CASE("vdim additivity on randomized squares") {
  Rng rng(311);
  for (int trial = 0; trial < 50; ++trial) {
    int n = rng.range(0, 4), m = rng.range(0, 4), k = rng.range(0, 4), l = rng.range(0, 4),
        d = rng.range(0, 4);
    std::vector<Polynomial> s, t, gx, gy;
    for (int i = 0; i < k; ++i)
      s.push_back(Polynomial::monomial(
          n, [&] { Exp e(static_cast<size_t>(n), 0u); if (n > 0) e[static_cast<size_t>(rng.below(n))] = static_cast<unsigned>(rng.range(1, 2)); return e; }(), rng.nonzero_rat(2)));
    for (int i = 0; i < l; ++i)
      t.push_back(Polynomial::monomial(
          m, [&] { Exp e(static_cast<size_t>(m), 0u); if (m > 0) e[static_cast<size_t>(rng.below(m))] = static_cast<unsigned>(rng.range(1, 2)); return e; }(), rng.nonzero_rat(2)));
    for (int j = 0; j < d; ++j) {
      gx.push_back(random_poly(rng, n, 1, 1, 2));
      gy.push_back(random_poly(rng, m, 1, 1, 2));
    }
    FibreSquare sq = fibre_product_affine(make_std_model(n, k, s), PolyMap(n, gx),
                                          make_std_model(m, l, t), PolyMap(m, gy));
    CHECK(sq.W.vdim() == (n - k) + (m - l) - d);
    CHECK(vdim_check(sq));
  }
}

TEST_CASE("swap is an involution on presentations") {
  Rng rng(313);
  auto x = xv();
  StdModel X = make_std_model(1, 1, {x * x});
  StdModel Y = affine_model(2);
  PolyMap gX(1, {x});
  PolyMap gY(2, {Polynomial::variable(2, 0) + Polynomial::variable(2, 1)});
  FibreSquare sq = fibre_product_affine(X, gX, Y, gY);
  FibreSquare back = swap_square(swap_square(sq));
  CHECK(back.W.n == sq.W.n);
  CHECK(back.W.k == sq.W.k);
  CHECK(back.W.s == sq.W.s);
  CHECK(back.e.f == sq.e.f);
  CHECK(back.f.f == sq.f.f);
  (void)rng;
}

TEST_CASE("iterated products associate up to variable blocks") {
  // (V x_Y W) x_Z X and V x_Y (W x_Z X) share coordinates in the same order;
  // the bundle components differ only by the documented block permutation.
  auto x = xv();
  StdModel V = affine_model(1), W = affine_model(1), X = affine_model(1);
  PolyMap e(1, {x});               // V -> R
  PolyMap fw(1, {Rat(2) * x});     // W -> R (matching e)
  PolyMap g(1, {x * x});           // W -> R
  PolyMap h(1, {x + cn(1, 1)});    // X -> R

  FibreSquare inner_right = fibre_product_affine(W, g, X, h);
  FibreSquare left = fibre_product_affine(
      V, e, inner_right.W, PolyMap(2, {detail::lift_left(fw.components[0], 2)}));

  FibreSquare inner_left = fibre_product_affine(V, e, W, fw);
  FibreSquare right = fibre_product_affine(
      inner_left.W, PolyMap(2, {detail::lift_right(g.components[0], 1, 2)}), X, h);

  CHECK(left.W.n == right.W.n);
  CHECK(left.W.vdim() == right.W.vdim());
  // same component multiset, permuted blocks
  std::vector<Polynomial> a = left.W.s, b = right.W.s;
  std::sort(a.begin(), a.end(), [](const Polynomial& p, const Polynomial& q) {
    return p.str() < q.str();
  });
  std::sort(b.begin(), b.end(), [](const Polynomial& p, const Polynomial& q) {
    return p.str() < q.str();
  });
  CHECK(a == b);
}
