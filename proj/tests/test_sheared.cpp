#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "wittlab/sheared.hpp"

using namespace wittlab;

namespace {

RingPtr f2() { return FpkAlgebra::make_zmod(2, 1); }
RingPtr f4() { return FpkAlgebra::make_field(2, {1, 1}); }
RingPtr f9() { return FpkAlgebra::make_field(3, {1, 0}); }

std::vector<SRingPtr> grid_rings(std::size_t N = 4, std::size_t B = 12) {
  return {
      ShearedWittRing::make(FpkAlgebra::extend_nilpotent(f2(), 2), N, B),
      ShearedWittRing::make(FpkAlgebra::extend_nilpotent(f2(), 3), N, B),
      ShearedWittRing::make(FpkAlgebra::extend_nilpotent(f4(), 2), N, B),
      ShearedWittRing::make(FpkAlgebra::extend_nilpotent(FpkAlgebra::make_zmod(3, 1), 2), N, B),
      ShearedWittRing::make(FpkAlgebra::extend_nilpotent(f9(), 2), N, B),
  };
}

}  // namespace

TEST_CASE("ring acceptance") {
  CHECK_THROWS(ShearedWittRing::make(FpkAlgebra::make_zmod(2, 2), 4, 12));  // Z/4: not F_p
  CHECK_THROWS(ShearedWittRing::make(f2(), 4, 2));                          // B < N
  auto S = ShearedWittRing::make(f4(), 3, 8);
  CHECK(S->perfect);
  auto T = ShearedWittRing::make(FpkAlgebra::extend_nilpotent(f2(), 2), 4, 12);
  CHECK_FALSE(T->perfect);
}

TEST_CASE("embed and split basics") {
  auto R = FpkAlgebra::extend_nilpotent(f2(), 2);  // F2[t]/t^2
  auto S = ShearedWittRing::make(R, 4, 12);
  RingElement t = R->basis_elem(1);

  // unit embeds as the unit
  CHECK(s_embed(s_one(S), 4) == witt_one(R, 4));

  // lambda=0, eta=V([t]) embeds as (0, t, 0, ...)
  ShearedWitt x = s_make(S, witt_zero(S->rs.field, 4), hat_make(R, {{1, t}}));
  WittVec d = s_embed(x, 4);
  CHECK(d.c[0] == R->zero_elem());
  CHECK(d.c[1] == t);
  CHECK(d.c[2] == R->zero_elem());

  // split of [t]: lambda = 0, eta = [t]
  ShearedWitt st = s_teich(S, t);
  CHECK(witt_is_zero(st.lambda));
  CHECK(st.eta == hat_make(R, {{0, t}}));

  // split of [s(a)]: lambda = [a], eta = 0
  RingElement a = S->rs.field->one_elem();
  ShearedWitt sa = s_teich(S, S->rs.section.apply(a));
  CHECK(sa.lambda == teichmuller(a, 4));
  CHECK(sa.eta.is_zero());

  // split of V(1): lambda = (0,1,0,...), eta = 0
  ShearedWitt v1 = s_split(S, verschiebung_V(witt_one(R, 6)));
  CHECK(v1.lambda == verschiebung_V(witt_one(S->rs.field, 4)));
  CHECK(v1.eta.is_zero());

  // round trip on random elements
  std::mt19937_64 rng(11);
  for (int it = 0; it < 50; ++it) {
    ShearedWitt y = s_random(S, rng);
    CHECK(s_split(S, s_rep(y, S->work_len())) == y);
  }

  // support overflow is reported
  WittVec far = witt_zero(R, S->B + 2);
  far.c[S->B] = t;
  CHECK_THROWS_WITH_AS(s_split(S, far), doctest::Contains("not representably sheared"),
                       std::invalid_argument);
}

TEST_CASE("subring closure and ring laws on samples") {
  std::mt19937_64 rng(221);
  for (const auto& S : grid_rings()) {
    for (int it = 0; it < 40; ++it) {
      ShearedWitt x = s_random(S, rng), y = s_random(S, rng), z = s_random(S, rng);
      CHECK(s_add(x, y) == s_add(y, x));
      CHECK(s_add(s_add(x, y), z) == s_add(x, s_add(y, z)));
      CHECK(s_mul(x, s_one(S)) == x);
      CHECK(s_add(x, s_neg(x)) == s_zero(S));
      CHECK(s_sub(x, y) == s_add(x, s_neg(y)));
      // distributivity at precision N (products are exact below N)
      WittVec lhs = witt_truncate(s_rep(s_mul(x, s_add(y, z)), S->work_len()), S->N);
      WittVec rhs = witt_truncate(
          s_rep(s_add(s_mul(x, y), s_mul(x, z)), S->work_len()), S->N);
      CHECK(lhs == rhs);
    }
  }
}

TEST_CASE("F Vt = ptilde and Vt F = V(u0) on samples") {
  std::mt19937_64 rng(333);
  for (const auto& S : grid_rings()) {
    std::size_t L = S->work_len();
    WittVec pt = ptilde_in(S->R, L);
    WittVec vu0 = verschiebung_V(u0_in(S->R, L));
    for (int it = 0; it < 30; ++it) {
      ShearedWitt x = s_random(S, rng);
      ShearedWitt lhs = s_F(s_Vtilde(x));
      ShearedWitt rhs = s_split(S, witt_mul(pt, s_rep(x, L)));
      CHECK(lhs == rhs);
      ShearedWitt lhs2 = s_Vtilde(s_F(x));
      ShearedWitt rhs2 = s_split(S, witt_mul(vu0, s_rep(x, L)));
      CHECK(lhs2 == rhs2);
    }
  }
}

TEST_CASE("perfect base: ops coincide with W_N") {
  std::mt19937_64 rng(444);
  for (const auto& R : {f2(), f4(), f9()}) {
    auto S = ShearedWittRing::make(R, 4, 12);
    for (int it = 0; it < 30; ++it) {
      ShearedWitt x = s_random(S, rng), y = s_random(S, rng);
      CHECK(x.eta.is_zero());
      WittVec dx = s_embed(x, 4), dy = s_embed(y, 4);
      CHECK(s_embed(s_add(x, y), 4) == witt_add(dx, dy));
      CHECK(s_embed(s_mul(x, y), 4) == witt_mul(dx, dy));
      CHECK(s_embed(s_F(x), 4) == frobenius_F(dx));
    }
  }
}

TEST_CASE("Vt injectivity on samples") {
  // Vt pushes the top lambda component past the precision cutoff, so two
  // inputs may only collide if they agree on eta and on lambda below the top
  // component.
  std::mt19937_64 rng(555);
  for (const auto& S : grid_rings()) {
    std::map<std::string, ShearedWitt> images;
    for (int it = 0; it < 60; ++it) {
      ShearedWitt x = s_random(S, rng);
      ShearedWitt vx = s_Vtilde(x);
      std::string ik;
      for (const auto& e : s_rep(vx, S->work_len()).c) ik += S->R->show(e) + "|";
      auto [pos, fresh] = images.emplace(ik, x);
      if (!fresh) {
        const ShearedWitt& y = pos->second;
        CHECK(witt_truncate(x.lambda, S->N - 1) == witt_truncate(y.lambda, S->N - 1));
        CHECK(x.eta == y.eta);
      }
    }
  }
}

TEST_CASE("unit inversion") {
  std::mt19937_64 rng(616);
  for (const auto& S : grid_rings()) {
    int done = 0;
    while (done < 10) {
      ShearedWitt x = s_random(S, rng);
      if (!s_is_unit(x)) continue;
      ShearedWitt y = s_inv(x);
      // exact at precision N
      WittVec prod = witt_truncate(
          s_rep(s_mul(x, y), S->work_len()), S->N);
      CHECK(prod == witt_one(S->R, S->N));
      ++done;
    }
  }
}

TEST_CASE("kernel sequence 0 -> Hat(I) -> sW(R) -> sW(R/I)") {
  // F2[t]/t^2 with I = (t)
  {
    auto R = FpkAlgebra::extend_nilpotent(f2(), 2);
    auto S = ShearedWittRing::make(R, 4, 12);
    auto I = RingIdeal::make(R, {R->basis_elem(1)});
    auto rep = check_kernel_sequence(S, I, 50, 7);
    INFO(rep.to_json().dump());
    CHECK(rep.ok);
  }
  // F4[t]/t^3 with I = (t^2): the surjectivity example
  {
    auto R = FpkAlgebra::extend_nilpotent(f4(), 3);
    auto S = ShearedWittRing::make(R, 4, 12);
    auto I = RingIdeal::make(R, {R->basis_elem(4)});  // t^2
    auto rep = check_kernel_sequence(S, I, 50, 7);
    INFO(rep.to_json().dump());
    CHECK(rep.ok);
  }
  // I = 0: the map is injective, kernel trivial
  {
    auto R = FpkAlgebra::extend_nilpotent(f2(), 2);
    auto S = ShearedWittRing::make(R, 4, 12);
    auto I = RingIdeal::make(R, {});
    auto rep = check_kernel_sequence(S, I, 20, 7);
    INFO(rep.to_json().dump());
    CHECK(rep.ok);
  }
}

TEST_CASE("Vt^n / W_n sequence") {
  // n=1 over F_p: coker = W_1 = F_p
  {
    auto S = ShearedWittRing::make(f2(), 4, 12);
    auto rep = check_Vn_Wn_sequence(S, 1, 30, 9);
    INFO(rep.to_json().dump());
    CHECK(rep.ok);
  }
  // n=2 over F2[t]/t^2: 50 random W_2 elements lifted
  {
    auto R = FpkAlgebra::extend_nilpotent(f2(), 2);
    auto S = ShearedWittRing::make(R, 4, 12);
    auto rep = check_Vn_Wn_sequence(S, 2, 50, 9);
    INFO(rep.to_json().dump());
    CHECK(rep.ok);
  }
  for (const auto& S : grid_rings()) {
    auto rep = check_Vn_Wn_sequence(S, 2, 25, 10);
    INFO(rep.to_json().dump());
    CHECK(rep.ok);
  }
}

TEST_CASE("projection pi: ring hom with kernel = image of Vt") {
  for (const auto& S : grid_rings()) {
    auto rep = check_pi_kernel(S, 30, 13);
    INFO(rep.to_json().dump());
    CHECK(rep.ok);
  }
}

TEST_CASE("F-invariants are cyclic of order p^N") {
  for (std::size_t N : {2, 3, 4}) {
    for (const auto& S : grid_rings(N, N + 8)) {
      auto rep = check_f_invariants(S, 25, 17);
      INFO(rep.to_json().dump());
      CHECK(rep.ok);
    }
  }
}
