#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "wittlab/witt.hpp"

using namespace wittlab;

namespace {

RingElement rnd_elem(std::mt19937_64& rng, const RingPtr& R) {
  std::vector<u64> c(R->rank);
  for (auto& v : c) v = rng() % R->mod;
  return R->elem(std::move(c));
}

WittVec rnd_witt(std::mt19937_64& rng, const RingPtr& R, std::size_t n) {
  WittVec w{R, {}};
  for (std::size_t i = 0; i < n; ++i) w.c.push_back(rnd_elem(rng, R));
  return w;
}

RingElement rnd_nilpotent(std::mt19937_64& rng, const RingPtr& R) {
  for (int tries = 0; tries < 4096; ++tries) {
    RingElement x = rnd_elem(rng, R);
    if (R->is_nilpotent(x)) return x;
  }
  return R->zero_elem();
}

std::vector<RingPtr> test_rings() {
  auto f4 = FpkAlgebra::make_field(2, {1, 1});
  auto f9 = FpkAlgebra::make_field(3, {1, 0});
  return {
      FpkAlgebra::make_zmod(2, 3),
      FpkAlgebra::make_zmod(3, 2),
      f4,
      f9,
      FpkAlgebra::extend_nilpotent(FpkAlgebra::make_zmod(2, 1), 2),
      FpkAlgebra::extend_nilpotent(FpkAlgebra::make_zmod(3, 1), 2),
      FpkAlgebra::extend_nilpotent(f4, 2),
      FpkAlgebra::extend_nilpotent(f9, 2),
  };
}

}  // namespace

TEST_CASE("universal polynomials: closed forms at p=2") {
  // (x+y)_1 = x1 + y1 - x0*y0
  MPoly x0 = MPoly::var(0), y0 = MPoly::var(1), x1 = MPoly::var(2), y1 = MPoly::var(3);
  MPoly want = x1 + y1 - x0 * y0;
  CHECK(WittPolyCache::sum(2, 1).t == want.t);
  // (x*y)_1 = x0^2*y1 + x1*y0^2 + 2*x1*y1
  MPoly wantp = x0.pow(2) * y1 + x1 * y0.pow(2) + (x1 * y1).scaled(2);
  CHECK(WittPolyCache::prod(2, 1).t == wantp.t);
  // (-x)_1 = -x0^2 - x1
  MPoly wantn = MPoly::var(0).pow(2).scaled(-1) - MPoly::var(1);
  CHECK(WittPolyCache::neg(2, 1).t == wantn.t);
}

TEST_CASE("universal polynomials: odd negation is componentwise") {
  for (std::size_t m = 0; m < 4; ++m) {
    MPoly want = MPoly::var(m).scaled(-1);
    CHECK(WittPolyCache::neg(3, m).t == want.t);
  }
}

TEST_CASE("[1]+[1] at length 2") {
  // ghost oracle over Z: solve 2 + 2 x1 = w1([1])+w1([1]) = 2, so x1 = -1
  auto z8 = FpkAlgebra::make_zmod(2, 3);
  WittVec s = witt_add(witt_one(z8, 2), witt_one(z8, 2));
  CHECK(s.c[0] == z8->from_int(2));
  CHECK(s.c[1] == z8->from_int(-1));

  // p=3: integer result (2,-2), reduced mod 3 gives (2,1)
  auto f3 = FpkAlgebra::make_zmod(3, 1);
  WittVec t = witt_add(witt_one(f3, 2), witt_one(f3, 2));
  CHECK(t.c[0] == f3->from_int(2));
  CHECK(t.c[1] == f3->from_int(1));
}

TEST_CASE("ring axioms on random triples") {
  std::mt19937_64 rng(12345);
  for (const auto& R : test_rings()) {
    std::size_t n = 3;
    for (int it = 0; it < 100; ++it) {
      WittVec x = rnd_witt(rng, R, n), y = rnd_witt(rng, R, n), z = rnd_witt(rng, R, n);
      CHECK(witt_add(x, y) == witt_add(y, x));
      CHECK(witt_add(witt_add(x, y), z) == witt_add(x, witt_add(y, z)));
      CHECK(witt_mul(x, y) == witt_mul(y, x));
      CHECK(witt_mul(witt_mul(x, y), z) == witt_mul(x, witt_mul(y, z)));
      CHECK(witt_mul(x, witt_add(y, z)) == witt_add(witt_mul(x, y), witt_mul(x, z)));
      CHECK(witt_add(x, witt_neg(x)) == witt_zero(R, n));
      CHECK(witt_mul(x, witt_one(R, n)) == x);
      CHECK(witt_mul(x, witt_zero(R, n)) == witt_zero(R, n));
      CHECK(witt_sub(x, y) == witt_add(x, witt_neg(y)));
    }
  }
}

TEST_CASE("model route agrees with universal polynomials") {
  std::mt19937_64 rng(777);
  for (const auto& R : test_rings()) {
    std::size_t n = R->p == 2 ? 4 : 4;
    for (int it = 0; it < 20; ++it) {
      WittVec x = rnd_witt(rng, R, n), y = rnd_witt(rng, R, n);
      CHECK(witt_add(x, y) == witt_add_sym(x, y));
      CHECK(witt_mul(x, y) == witt_mul_sym(x, y));
      CHECK(witt_neg(x) == witt_neg_sym(x));
      if (!R->is_fp_algebra()) CHECK(frobenius_F(x) == frobenius_F_sym(x));
    }
  }
}

TEST_CASE("ghost compatibility over Z/p^k") {
  std::mt19937_64 rng(31);
  for (u64 p : {2, 3}) {
    auto R = FpkAlgebra::make_zmod(p, 3);
    bigint mod = bigint(R->mod);
    for (int it = 0; it < 30; ++it) {
      WittVec x = rnd_witt(rng, R, 4), y = rnd_witt(rng, R, 4);
      auto gx = ghost_bigint(x), gy = ghost_bigint(y);
      auto gs = ghost_bigint(witt_add(x, y)), gp = ghost_bigint(witt_mul(x, y));
      for (std::size_t m = 0; m < 4; ++m) {
        CHECK((gs[m] - gx[m] - gy[m]) % mod == 0);
        CHECK((gp[m] - gx[m] * gy[m]) % mod == 0);
      }
    }
  }
}

TEST_CASE("F, V, Teichmuller identities") {
  std::mt19937_64 rng(99);
  for (const auto& R : test_rings()) {
    std::size_t n = 4;
    for (int it = 0; it < 30; ++it) {
      WittVec x = rnd_witt(rng, R, n), y = rnd_witt(rng, R, n);
      RingElement a = rnd_elem(rng, R), b = rnd_elem(rng, R);
      // [a][b] = [ab]
      CHECK(witt_mul(teichmuller(a, n), teichmuller(b, n)) == teichmuller(R->mul(a, b), n));
      // F[a] = [a^p]
      WittVec fa = frobenius_F(teichmuller(a, n));
      CHECK(fa == witt_truncate(teichmuller(R->pow(a, R->p), n), fa.len()));
      // x V(y) = V(F(x) y): the right side only needs F(x) y at length n-1
      WittVec lhs = witt_mul(x, verschiebung_V(y));
      WittVec fx = frobenius_F(x);
      WittVec w = witt_mul(witt_truncate(fx, n - 1), witt_truncate(y, n - 1));
      WittVec rhs = witt_zero(R, n);
      for (std::size_t i = 0; i + 1 < n; ++i) rhs.c[i + 1] = w.c[i];
      CHECK(lhs == rhs);
      // FV = p.id, VF = V(1).x
      WittVec fv = frobenius_F(verschiebung_V(x));
      WittVec px = witt_mul(witt_from_int(R, n, i64(R->p)), x);
      CHECK(fv == witt_truncate(px, fv.len()));
      WittVec vf_in = witt_truncate(x, R->is_fp_algebra() ? n : n);
      WittVec vf = verschiebung_V(witt_truncate(frobenius_F(x), n - 1));
      WittVec v1x = witt_mul(verschiebung_V(witt_one(R, n)), x);
      CHECK(witt_truncate(vf, n - 1) == witt_truncate(v1x, n - 1));
      (void)vf_in;
    }
  }
}

TEST_CASE("Fp-algebra Frobenius shortcut matches universal polynomials") {
  std::mt19937_64 rng(4242);
  auto f4 = FpkAlgebra::make_field(2, {1, 1});
  for (const auto& R : {f4, FpkAlgebra::extend_nilpotent(f4, 2)}) {
    for (int it = 0; it < 25; ++it) {
      WittVec x = rnd_witt(rng, R, 4);
      WittVec quick = frobenius_F(x);  // length 4
      WittVec sym = frobenius_F_sym(x);  // length 3
      CHECK(witt_truncate(quick, 3) == sym);
    }
  }
  // the distilled example: over F4, F((a,a)) = (a^2, a^2)
  RingElement a = f4->basis_elem(1);
  WittVec x{f4, {a, a}};
  WittVec fx = frobenius_F(x);
  CHECK(fx.c[0] == f4->mul(a, a));
  CHECK(fx.c[1] == f4->mul(a, a));
}

TEST_CASE("inverses of units") {
  std::mt19937_64 rng(2025);
  for (const auto& R : test_rings()) {
    std::size_t n = 3;
    int done = 0;
    while (done < 15) {
      WittVec x = rnd_witt(rng, R, n);
      if (!witt_is_unit(x)) continue;
      WittVec y = witt_inv(x);
      CHECK(witt_mul(x, y) == witt_one(R, n));
      ++done;
    }
    CHECK_FALSE(witt_is_unit(verschiebung_V(witt_one(R, n))));
  }
}

TEST_CASE("modified Verschiebung constants") {
  // p >= 3: u0 = alpha = 1, ptilde = p
  const WittConstants& c3 = witt_constants(3, 4);
  CHECK(c3.u0 == witt_one(c3.coeff, 4));
  CHECK(c3.alpha == witt_one(c3.coeff, 4));
  CHECK(c3.ptilde == witt_from_int(c3.coeff, 4, 3));

  // p = 2: V(u0) = 2 - [2], ptilde = 2 - [4], alpha = u0 * F(alpha)
  const WittConstants& c2 = witt_constants(2, 4);
  const RingPtr& z = c2.coeff;
  CHECK(verschiebung_V(c2.u0) ==
        witt_sub(witt_from_int(z, 4, 2), teichmuller(z->from_int(2), 4)));
  CHECK(c2.ptilde == witt_sub(witt_from_int(z, 4, 2), teichmuller(z->from_int(4), 4)));
  CHECK(c2.u0.c[0] == z->from_int(-1));

  // alpha is consistent across precisions
  const WittConstants& c2b = witt_constants(2, 6);
  CHECK(witt_truncate(c2b.alpha, 4) == c2.alpha);
  CHECK(witt_truncate(c2b.u0, 4) == c2.u0);
}

TEST_CASE("Vt F = V(u0).id and F Vt = ptilde.id") {
  std::mt19937_64 rng(555);
  for (u64 p : {2, 3}) {
    auto R = FpkAlgebra::make_zmod(p, 3);
    std::size_t n = 4;
    WittVec vu0 = verschiebung_V(u0_in(R, n));
    WittVec pt = ptilde_in(R, n);
    for (int it = 0; it < 25; ++it) {
      WittVec x = rnd_witt(rng, R, n);
      WittVec lhs = vtilde(witt_truncate(frobenius_F(x), n - 1));
      // Vt on a shorter vector: compare up to length n-1... work at full length
      WittVec fx = frobenius_F(x);  // length n-1
      WittVec vt_fx = vtilde(fx);   // length n-1
      WittVec want = witt_truncate(witt_mul(vu0, x), n - 1);
      CHECK(vt_fx == want);
      (void)lhs;
      WittVec f_vt = frobenius_F(vtilde(x));  // length n-1
      WittVec want2 = witt_truncate(witt_mul(pt, x), n - 1);
      CHECK(f_vt == want2);
    }
  }
}

TEST_CASE("divided powers on the Vt-ideal") {
  std::mt19937_64 rng(31337);
  for (const auto& R :
       {FpkAlgebra::make_zmod(2, 3), FpkAlgebra::make_zmod(3, 3),
        FpkAlgebra::extend_nilpotent(FpkAlgebra::make_field(2, {1, 1}), 2)}) {
    u64 p = R->p;
    std::size_t n = 4;
    // scalars act through Z/p^(k+n)
    u64 mod = upow_checked(p, R->k + n);
    for (int it = 0; it < 10; ++it) {
      WittVec u = rnd_witt(rng, R, n), v = rnd_witt(rng, R, n);
      // gamma_1 is the identity on Vt(u)
      CHECK(divided_gamma(1, u) == vtilde(u));
      // the defining relation, checked without reference to the formula:
      // p! gamma_p(Vt(u)) = (Vt u)^p
      auto [pv, pu] = factorial_vu(p, p, mod);
      CHECK(pv == 1);
      WittVec lhs = witt_mul(witt_from_int(R, n, i64(mulmod(pu, p % mod, mod))),
                             divided_gamma(p, u));
      CHECK(lhs == witt_pow(vtilde(u), p));
      // closed form: (p-1)! gamma_p(Vt(u)) = p^(p-2) Vt(u0^(p-1) u^p)
      auto [fv_, fu] = factorial_vu(p - 1, p, mod);
      CHECK(fv_ == 0);
      WittVec lhs2a = witt_mul(witt_from_int(R, n, i64(fu)), divided_gamma(p, u));
      WittVec rhs2a =
          witt_mul(witt_from_int(R, n, i64(powmod(p, p - 2, mod))),
                   vtilde(witt_mul(witt_pow(u0_in(R, n), p - 1), witt_pow(u, p))));
      CHECK(lhs2a == rhs2a);
      // gamma_m(x+y) = sum_{i+j=m} gamma_i(x) gamma_j(y), for m up to p^2
      for (u64 m : {u64(2), p, p + 1, p * p}) {
        WittVec total = witt_zero(R, n);
        for (u64 i = 0; i <= m; ++i)
          total = witt_add(total, witt_mul(divided_gamma(i, u), divided_gamma(m - i, v)));
        CHECK(divided_gamma(m, witt_add(u, v)) == total);
      }
      // gamma_i(x) gamma_j(x) = binom(i+j,i) gamma_{i+j}(x)
      for (auto [i, j] : {std::pair<u64, u64>{1, 1}, {1, p}, {2, p}, {p, p}}) {
        WittVec lhs2 = witt_mul(divided_gamma(i, u), divided_gamma(j, u));
        WittVec rhs2 = witt_mul(witt_from_int(R, n, i64(binom_mod(i + j, i, mod))),
                                divided_gamma(i + j, u));
        CHECK(lhs2 == rhs2);
      }
      // gamma_m(a x) = a^m gamma_m(x) for a dense scalar a: a Vt(u) = Vt(F(a) u)
      WittVec a = rnd_witt(rng, R, n);
      WittVec fa = frobenius_F(a);  // length n-1 unless R is an F_p-algebra
      std::size_t nn = fa.len();
      WittVec ut = witt_truncate(u, nn), at = witt_truncate(a, nn);
      WittVec fat = witt_truncate(fa, nn);
      for (u64 m : {u64(2), p}) {
        WittVec lhs3 = divided_gamma(m, witt_mul(fat, ut));
        WittVec rhs3 = witt_mul(witt_pow(at, m), witt_truncate(divided_gamma(m, u), nn));
        CHECK(lhs3 == rhs3);
      }
    }
  }
}

TEST_CASE("sparse vectors against the dense oracle") {
  std::mt19937_64 rng(808);
  auto f4 = FpkAlgebra::make_field(2, {1, 1});
  std::vector<RingPtr> rings = {
      FpkAlgebra::extend_nilpotent(FpkAlgebra::make_zmod(2, 1), 2),
      FpkAlgebra::extend_nilpotent(FpkAlgebra::make_zmod(3, 1), 3),
      FpkAlgebra::extend_nilpotent(f4, 2),
  };
  for (const auto& R : rings) {
    for (int it = 0; it < 20; ++it) {
      std::map<u64, RingElement> ex, ey;
      for (int s = 0; s < 3; ++s) {
        ex.emplace(rng() % 6, rnd_nilpotent(rng, R));
        ey.emplace(rng() % 6, rnd_nilpotent(rng, R));
      }
      HatWittVec x = hat_make(R, ex), y = hat_make(R, ey);
      std::size_t L = 6 + 2 * hat_carry_margin(R) + 2;
      WittVec dx = hat_to_dense(x, L), dy = hat_to_dense(y, L);

      CHECK(hat_to_dense(hat_add(x, y), L) == witt_add(dx, dy));
      CHECK(hat_to_dense(hat_neg(x), L) == witt_neg(dx));
      CHECK(hat_to_dense(hat_sub(x, y), L) == witt_sub(dx, dy));
      CHECK(hat_to_dense(hat_V(x), L) == verschiebung_V(dx));
      CHECK(hat_to_dense(hat_F(x), L) == frobenius_F(hat_to_dense(x, L)));

      WittVec w = rnd_witt(rng, R, 5);
      HatWittVec wx = hat_scal(w, x);
      // dense oracle: zero-extend w, multiply, compare
      WittVec dw = witt_zero(R, L);
      for (std::size_t i = 0; i < 5; ++i) dw.c[i] = w.c[i];
      CHECK(hat_to_dense(wx, L) == witt_mul(dw, dx));
    }
    // Teichmuller of a nilpotent and shift bookkeeping (top basis element is
    // the highest t-power times the last field basis vector, always nilpotent)
    RingElement t = R->basis_elem(R->rank - 1);
    REQUIRE(R->is_nilpotent(t));
    HatWittVec ht = hat_teich(t);
    CHECK(ht.support_end() == 1);
    CHECK(hat_V(ht).support_end() == 2);
    CHECK(hat_make(R, {{3, R->zero_elem()}}).is_zero());
    CHECK_THROWS(hat_make(R, {{0, R->one_elem()}}));
  }
}
