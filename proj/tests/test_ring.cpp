#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "wittlab/ring.hpp"

using namespace wittlab;

TEST_CASE("make_zmod basics") {
  auto r8 = FpkAlgebra::make_zmod(2, 3);
  CHECK(r8->rank == 1);
  CHECK(r8->mod == 8);
  CHECK(r8->card() == 8);
  auto f3 = FpkAlgebra::make_zmod(3, 1);
  CHECK(f3->mod == 3);
  CHECK_THROWS(FpkAlgebra::make_zmod(4, 1));
  CHECK_THROWS(FpkAlgebra::make_zmod(2, 0));
  CHECK(r8->model.has_value());
}

TEST_CASE("Z/4 nilradical is (2), by exhaustion") {
  auto r = FpkAlgebra::make_zmod(2, 2);
  auto nil = nilradical(r);
  CHECK(nil.contains(r->from_int(2)));
  CHECK(nil.contains(r->from_int(0)));
  CHECK_FALSE(nil.contains(r->from_int(1)));
  CHECK_FALSE(nil.contains(r->from_int(3)));
  CHECK(nil.span_size() == 2);
}

TEST_CASE("F4 arithmetic and Frobenius") {
  auto f4 = FpkAlgebra::make_field(2, {1, 1});  // a^2 + a + 1
  REQUIRE(f4->rank == 2);
  RingElement a = f4->basis_elem(1);
  // a^2 = a + 1
  CHECK(f4->mul(a, a) == f4->add(a, f4->one_elem()));
  CHECK(f4->is_unit(a));
  CHECK(f4->mul(a, f4->inv(a)) == f4->one_elem());
  // Frobenius: a -> a^2 = a + 1
  RingHom fr = frobenius_endo(f4);
  CHECK(fr.apply(a) == f4->add(a, f4->one_elem()));
  // nilradical of a field is zero
  CHECK(nilradical(f4).span_size() == 1);
  CHECK(f4->model.has_value());
}

TEST_CASE("make_field rejects reducible polynomials") {
  CHECK_THROWS(FpkAlgebra::make_field(2, {0, 0}));  // x^2 = x*x
  CHECK_THROWS(FpkAlgebra::make_field(3, {2, 0}));  // x^2 - 1 = (x-1)(x+1)
  CHECK_NOTHROW(FpkAlgebra::make_field(3, {1, 0}));  // x^2 + 1 irreducible over F3
}

TEST_CASE("extend_nilpotent: F2[t]/(t^3)") {
  auto f2 = FpkAlgebra::make_zmod(2, 1);
  auto r = FpkAlgebra::extend_nilpotent(f2, 3, "t");
  REQUIRE(r->rank == 3);
  RingElement t = r->basis_elem(1);
  CHECK(r->mul(t, t) == r->basis_elem(2));
  CHECK(r->is_zero(r->mul(t, r->mul(t, t))));
  CHECK(r->is_nilpotent(t));
  CHECK_FALSE(r->is_nilpotent(r->add(r->one_elem(), t)));
  CHECK(r->is_unit(r->add(r->one_elem(), t)));
  // Frobenius t -> t^2
  RingHom fr = frobenius_endo(r);
  CHECK(fr.apply(t) == r->basis_elem(2));
  // nilradical = (t)
  auto nil = nilradical(r);
  CHECK(nil.contains(t));
  CHECK(nil.span_size() == 4);
  CHECK(r->model.has_value());
}

TEST_CASE("quotient: F2[t]/(t^3) by (t^2) is F2[t]/(t^2)") {
  auto f2 = FpkAlgebra::make_zmod(2, 1);
  auto r = FpkAlgebra::extend_nilpotent(f2, 3, "t");
  auto I = RingIdeal::make(r, {r->basis_elem(2)});
  auto [q, pr] = make_quotient(r, I);
  CHECK(q->rank == 2);
  CHECK(q->card() == 4);
  RingElement tbar = pr.apply(r->basis_elem(1));
  CHECK_FALSE(q->is_zero(tbar));
  CHECK(q->is_zero(q->mul(tbar, tbar)));
}

TEST_CASE("quotient: Z/4 by (2) is F2") {
  auto r = FpkAlgebra::make_zmod(2, 2);
  auto I = RingIdeal::make(r, {r->from_int(2)});
  auto [q, pr] = make_quotient(r, I);
  CHECK(q->card() == 2);
  CHECK(q->k == 1);
  CHECK(pr.apply(r->from_int(3)) == q->one_elem());
}

TEST_CASE("quotient: F2[x,y]/(x^2,y^2) by (xy) is 3-dimensional") {
  // Howell-form oracle on the 4-dimensional module
  auto f2 = FpkAlgebra::make_zmod(2, 1);
  auto rx = FpkAlgebra::extend_nilpotent(f2, 2, "x");
  auto r = FpkAlgebra::extend_nilpotent(rx, 2, "y");  // basis 1, x, y, xy
  RingElement x = r->basis_elem(1), y = r->basis_elem(2);
  auto I = RingIdeal::make(r, {r->mul(x, y)});
  CHECK(I.span_size() == 2);
  auto [q, pr] = make_quotient(r, I);
  CHECK(q->rank == 3);
  RingElement xb = pr.apply(x), yb = pr.apply(y);
  CHECK(q->is_zero(q->mul(xb, yb)));
  CHECK(q->is_zero(q->mul(xb, xb)));
  CHECK_FALSE(q->is_zero(xb));
  // the quotient is a square-zero extension of F2, so the naive integer lift
  // of its structure constants is already a Z-algebra
  CHECK(q->model.has_value());
}

TEST_CASE("residue_section: F2[t]/(t^2)") {
  auto f2 = FpkAlgebra::make_zmod(2, 1);
  auto r = FpkAlgebra::extend_nilpotent(f2, 2, "t");
  auto rs = residue_section(r);
  CHECK(rs.field->card() == 2);
  CHECK(rs.section.apply(rs.field->one_elem()) == r->one_elem());
}

TEST_CASE("residue_section: F4[t]/(t^2) finds the multiplicative lift") {
  auto f4 = FpkAlgebra::make_field(2, {1, 1});
  auto r = FpkAlgebra::extend_nilpotent(f4, 2, "t");
  auto rs = residue_section(r);
  CHECK(rs.field->card() == 4);
  // section image of any z satisfies z^4 = z
  for (bigint i = 0; i < 4; ++i) {
    RingElement z = rs.section.apply(rs.field->elem_by_index(i));
    CHECK(r->pow(z, 4) == z);
    CHECK(rs.projection.apply(z) == rs.field->elem_by_index(i));
  }
}

TEST_CASE("residue_section rejects Z/4") {
  auto r = FpkAlgebra::make_zmod(2, 2);
  CHECK_THROWS(residue_section(r));
}

TEST_CASE("ring json round trip") {
  auto f4 = FpkAlgebra::make_field(2, {1, 1});
  auto j = f4->to_json();
  auto back = FpkAlgebra::from_json(j);
  CHECK(back->same_as(*f4));
  CHECK(back->to_json() == j);
}

TEST_CASE("frobenius_endo rejects k > 1") {
  CHECK_THROWS(frobenius_endo(FpkAlgebra::make_zmod(2, 2)));
}

TEST_CASE("F9 model reduces correctly and element enumeration covers the ring") {
  auto f9 = FpkAlgebra::make_field(3, {1, 0});  // a^2 + 1
  CHECK(f9->card() == 9);
  REQUIRE(f9->model.has_value());
  // model reduces to structure constants mod 3
  for (std::size_t t = 0; t < f9->sc.size(); ++t) {
    i64 v = f9->model->sc[t] % 3;
    if (v < 0) v += 3;
    CHECK(u64(v) == f9->sc[t]);
  }
  std::set<std::vector<u64>> seen;
  for (bigint i = 0; i < 9; ++i) seen.insert(f9->elem_by_index(i).c);
  CHECK(seen.size() == 9);
}
