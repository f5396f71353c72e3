#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "wittlab/frame_instances.hpp"
#include "wittlab/frames.hpp"
#include "wittlab/witt.hpp"

using namespace wittlab;

namespace {

RingPtr f2() { return FpkAlgebra::make_zmod(2, 1); }
RingPtr f3() { return FpkAlgebra::make_zmod(3, 1); }
RingPtr f2_eps() { return FpkAlgebra::extend_nilpotent(f2(), 2); }
RingPtr f3_eps() { return FpkAlgebra::extend_nilpotent(f3(), 2); }

PdIdeal socle_ideal(const RingPtr& Rp, std::size_t basis_index) {
  return PdIdeal::make(Rp, RingIdeal::make(Rp, {Rp->basis_elem(basis_index)}));
}

// random invertible matrix by rejection
Mat0 random_window_matrix(const FramePtr& F, std::size_t h, std::mt19937_64& rng) {
  for (int tries = 0; tries < 200; ++tries) {
    Mat0 m = m0_random(F, h, h, rng);
    try {
      (void)m0_inv(m);
      return m;
    } catch (const std::invalid_argument&) {
    }
  }
  throw std::runtime_error("random_window_matrix: no invertible sample");
}

Window random_window(const FramePtr& F, std::size_t r0, std::size_t r1,
                     std::mt19937_64& rng) {
  return make_window(F, r0, r1, random_window_matrix(F, r0 + r1, rng));
}

// identity blocks viewed as a candidate morphism m -> mp (same ranks)
WindowMorphism identity_blocks(const Window& m, const Window& mp) {
  WindowMorphism f;
  f.src = &m;
  f.dst = &mp;
  f.a = m0_identity(m.F, m.r0);
  f.b = m1_zero(m.F, m.r0, m.r1);
  f.c = m0_zero(m.F, m.r1, m.r0);
  f.e = m0_identity(m.F, m.r1);
  return f;
}

// add ideal-valued noise to a degree-0 block
Mat0 perturb(const Mat0& a, const LeveledIdeal& K, std::mt19937_64& rng) {
  Mat0 out = a;
  for (auto& x : out.e) x = a.F->add0(x, K.sample(rng));
  return out;
}

bool morphism_eq(const WindowMorphism& f, const WindowMorphism& g) {
  return m0_eq(f.a, g.a) && m0_eq(f.c, g.c) && m0_eq(f.e, g.e) && m1_eq(f.b, g.b);
}

}  // namespace

TEST_CASE("matrix inversion over frame carriers") {
  auto F = truncated_witt_frame(f2_eps(), 3);
  std::mt19937_64 rng(11);
  for (int t = 0; t < 10; ++t) {
    Mat0 m = random_window_matrix(F, 3, rng);
    CHECK(m0_eq(m0_mul(m0_inv(m), m), m0_identity(F, 3)));
    CHECK(m0_eq(m0_mul(m, m0_inv(m)), m0_identity(F, 3)));
  }
  // singular matrices are rejected by make_window
  Mat0 z = m0_zero(F, 2, 2);
  z.at(0, 0) = F->one0();
  CHECK_THROWS_AS(make_window(F, 1, 1, z), std::invalid_argument);
}

TEST_CASE("identity, scalar, and composed morphisms") {
  auto F = witt_prec_frame(f3_eps(), 2);
  std::mt19937_64 rng(12);
  Window m = random_window(F, 1, 2, rng);
  WindowMorphism id = identity_morphism(m);
  CHECK(is_morphism(id).ok);
  CHECK(is_morphism(compose(id, id)).ok);
  CHECK(morphism_eq(compose(id, id), id));

  // multiplication by an integer scalar commutes with the structure maps
  WindowMorphism two = identity_morphism(m);
  A0Elem s = F->from_int0(2);
  two.a = m0_scale(s, two.a);
  two.e = m0_scale(s, two.e);
  CHECK(is_morphism(two).ok);
  CHECK(is_morphism(compose(two, two)).ok);
  CHECK(morphism_eq(compose(two, id), two));
}

TEST_CASE("dual windows") {
  auto F = witt_prec_frame(f2_eps(), 2);
  Window u = unit_window(F);
  Window t = twist_window(F);
  Window du = dual_window(u);
  CHECK(du.r0 == t.r0);
  CHECK(du.r1 == t.r1);
  CHECK(m0_eq(du.psi, t.psi));
  CHECK(m0_eq(dual_window(t).psi, u.psi));

  std::mt19937_64 rng(13);
  for (int k = 0; k < 5; ++k) {
    Window m = random_window(F, 2, 1, rng);
    Window dd = dual_window(dual_window(m));
    CHECK(dd.r0 == m.r0);
    CHECK(dd.r1 == m.r1);
    CHECK(m0_eq(dd.psi, m.psi));
  }
}

TEST_CASE("window JSON round trip") {
  auto F = sheared_frame(f2_eps(), 3);
  std::mt19937_64 rng(14);
  Window m = random_window(F, 1, 1, rng);
  nlohmann::json j = window_to_json(m);
  Window back = window_from_json(F, j);
  CHECK(back.r0 == m.r0);
  CHECK(back.r1 == m.r1);
  CHECK(m0_eq(back.psi, m.psi));

  // a tampered singular matrix is rejected on load
  nlohmann::json bad = j;
  bad["psi"][0][0] = F->a0_to_json(F->zero0());
  bad["psi"][0][1] = F->a0_to_json(F->zero0());
  CHECK_THROWS_AS(window_from_json(F, bad), std::invalid_argument);
}

TEST_CASE("base change along identity and quotient homs") {
  auto F = witt_prec_frame(f2_eps(), 2);
  std::mt19937_64 rng(15);
  Window m = random_window(F, 1, 1, rng);
  Window same = base_change(m, FrameHom::identity(F));
  CHECK(m0_eq(same.psi, m.psi));

  auto rel = relative_witt_frame(socle_ideal(f2_eps(), 1), 2);
  std::mt19937_64 rng2(16);
  Window n = random_window(rel, 1, 1, rng2);
  FrameHom q = relative_quotient_hom(rel);
  Window nq = base_change(n, q);
  CHECK(nq.F == q.dst);
  CHECK(nq.r0 == n.r0);
  CHECK(nq.r1 == n.r1);
}

TEST_CASE("inclusion homomorphism into relative frames") {
  RingPtr Rp = f2_eps();
  auto rw = relative_witt_frame(socle_ideal(Rp, 1), 3);
  FrameHom iw = relative_inclusion_hom(rw);
  verify_frame_hom(iw, 60, 17);
  CHECK(iw.dst == rw);

  auto rs = relative_sheared_frame(socle_ideal(f3_eps(), 1), 2);
  FrameHom is = relative_inclusion_hom(rs);
  verify_frame_hom(is, 60, 18);

  // degree-1 images have zero ideal coordinate, so tau factors through V
  std::mt19937_64 rng(19);
  A1Elem x = iw.src->random1(rng);
  A1Elem gx = iw.g1(x);
  REQUIRE(gx.aux.has_value());
  CHECK(Rp->is_zero(*gx.aux));
}

TEST_CASE("morphism lifting over a relative Witt frame") {
  auto rel = relative_witt_frame(socle_ideal(f2_eps(), 1), 3);
  LeveledIdeal K = relative_leveled_ideal(rel);
  CHECK(K.nu == 3);
  std::mt19937_64 rng(21);
  for (int t = 0; t < 8; ++t) {
    Window m = random_window(rel, 1, 1, rng);
    Window mp = make_window(rel, 1, 1, perturb(m.psi, K, rng));
    WindowMorphism f0 = identity_blocks(m, mp);
    WindowMorphism f = lift_morphism(m, mp, f0, K);
    CHECK(is_morphism(f).ok);

    // uniqueness: a perturbed initialization reaches the same lift
    WindowMorphism g0 = f0;
    g0.a = perturb(g0.a, K, rng);
    g0.e = perturb(g0.e, K, rng);
    WindowMorphism g = lift_morphism(m, mp, g0, K);
    CHECK(morphism_eq(f, g));
  }

  // an initialization that is not a morphism modulo K is rejected
  Window m = random_window(rel, 1, 1, rng);
  Window mp = make_window(rel, 1, 1, perturb(m.psi, K, rng));
  WindowMorphism bad = identity_blocks(m, mp);
  bad.a.at(0, 0) = rel->add0(bad.a.at(0, 0), rel->one0());
  CHECK_THROWS_AS(lift_morphism(m, mp, bad, K), std::invalid_argument);
}

TEST_CASE("morphism lifting over a relative sheared frame") {
  auto rel = relative_sheared_frame(socle_ideal(f2_eps(), 1), 2);
  LeveledIdeal K = relative_leveled_ideal(rel);
  std::mt19937_64 rng(22);
  for (int t = 0; t < 6; ++t) {
    Window m = random_window(rel, 1, 1, rng);
    Window mp = make_window(rel, 1, 1, perturb(m.psi, K, rng));
    WindowMorphism f0 = identity_blocks(m, mp);
    WindowMorphism f = lift_morphism(m, mp, f0, K);
    CHECK(is_morphism(f).ok);
    WindowMorphism g0 = f0;
    g0.c = perturb(g0.c, K, rng);
    WindowMorphism g = lift_morphism(m, mp, g0, K);
    CHECK(morphism_eq(f, g));
  }
}

TEST_CASE("Hodge filtration lifting") {
  auto rel = relative_witt_frame(socle_ideal(f2_eps(), 1), 2);
  FrameHom incl = relative_inclusion_hom(rel);
  const FramePtr& A = incl.src;

  std::mt19937_64 rng(23);
  Window n = random_window(rel, 1, 1, rng);

  // column lifting the filtration: reduction of the top entry vanishes
  RingPtr Rp = f2_eps();
  WittVec cvec{Rp, {Rp->basis_elem(1), Rp->zero_elem()}};
  A0Elem c{cvec};
  Mat0 u = m0_identity(rel, 2);
  u.at(0, 1) = c;

  Window m = hodge_lift(A, n, u);
  CHECK(m.F == A);
  CHECK(m.r0 == 1);
  CHECK(m.r1 == 1);

  // the change of basis is an isomorphism from the base change of m back to n
  Window mB = base_change(m, incl);
  WindowMorphism iso;
  iso.src = &mB;
  iso.dst = &n;
  iso.a = m0_zero(rel, 1, 1);
  iso.a.at(0, 0) = u.at(0, 0);
  iso.b = m1_zero(rel, 1, 1);
  iso.b.at(0, 0) = rel->tau_preimage(u.at(0, 1));
  iso.c = m0_zero(rel, 1, 1);
  iso.c.at(0, 0) = u.at(1, 0);
  iso.e = m0_zero(rel, 1, 1);
  iso.e.at(0, 0) = u.at(1, 1);
  CHECK(is_morphism(iso).ok);
  CHECK(rel->is_unit0(iso.a.at(0, 0)));
  CHECK(rel->is_unit0(iso.e.at(0, 0)));

  // a column with nonzero reduction does not lift the filtration
  Mat0 ubad = m0_identity(rel, 2);
  ubad.at(0, 1) = rel->one0();
  CHECK_THROWS_AS(hodge_lift(A, n, ubad), std::invalid_argument);
}

TEST_CASE("section complex map") {
  auto F = witt_prec_frame(f3_eps(), 2);
  std::mt19937_64 rng(24);
  Window m = random_window(F, 1, 1, rng);
  A1Elem x1 = F->random1(rng);
  A0Elem x0 = F->random0(rng);
  std::vector<A0Elem> out = gamma_apply(m, {x1}, {x0});
  REQUIRE(out.size() == 2);
  A0Elem top = F->sub0(
      F->add0(F->mul0(m.psi.at(0, 0), F->sigma1(x1)), F->mul0(m.psi.at(0, 1), F->sigma0(x0))),
      F->tau(x1));
  A0Elem bot = F->sub0(
      F->add0(F->mul0(m.psi.at(1, 0), F->sigma1(x1)), F->mul0(m.psi.at(1, 1), F->sigma0(x0))),
      x0);
  CHECK(F->eq0(out[0], top));
  CHECK(F->eq0(out[1], bot));

  // gamma(0, 0) = 0
  std::vector<A0Elem> z = gamma_apply(m, {F->zero1()}, {F->zero0()});
  CHECK(F->is_zero0(z[0]));
  CHECK(F->is_zero0(z[1]));
}
