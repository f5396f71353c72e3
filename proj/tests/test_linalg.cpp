#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "wittlab/linalg.hpp"

using namespace wittlab;

namespace {

IntMat mk(std::size_t r, std::size_t c, std::vector<long> v) {
  IntMat m(r, c);
  for (std::size_t i = 0; i < r * c; ++i) m.a[i] = v[i];
  return m;
}

void check_witnesses(const IntMat& m) {
  SmithResult s = smith_normal_form(m);
  IntMat lhs = mat_mul(mat_mul(s.u, m), s.v);
  for (std::size_t i = 0; i < lhs.rows; ++i)
    for (std::size_t j = 0; j < lhs.cols; ++j)
      CHECK(lhs.at(i, j) == s.s.at(i, j));
  // divisibility chain
  for (std::size_t t = 1; t < std::min(m.rows, m.cols); ++t) {
    if (s.s.at(t, t) == 0) continue;
    CHECK(s.s.at(t, t) % s.s.at(t - 1, t - 1) == 0);
  }
}

}  // namespace

TEST_CASE("smith: identity") {
  SmithResult s = smith_normal_form(IntMat::identity(2));
  CHECK(s.s.at(0, 0) == 1);
  CHECK(s.s.at(1, 1) == 1);
}

TEST_CASE("smith: determinant-divisor oracle for [[2,4],[6,8]]") {
  // d1 = gcd of entries = 2, d1*d2 = |det| = 8 -> diag(2,4)
  IntMat m = mk(2, 2, {2, 4, 6, 8});
  SmithResult s = smith_normal_form(m);
  CHECK(s.s.at(0, 0) == 2);
  CHECK(s.s.at(1, 1) == 4);
  check_witnesses(m);
}

TEST_CASE("smith: zero matrix") {
  IntMat m(2, 3);
  SmithResult s = smith_normal_form(m);
  CHECK(s.s.at(0, 0) == 0);
  CHECK(s.s.at(1, 1) == 0);
}

TEST_CASE("smith: witnesses on assorted shapes") {
  check_witnesses(mk(2, 3, {1, 2, 3, 4, 5, 6}));
  check_witnesses(mk(3, 2, {0, 4, 6, 0, 2, 2}));
  check_witnesses(mk(3, 3, {4, 0, 0, 0, 6, 0, 0, 0, 10}));
  check_witnesses(mk(1, 1, {-7}));
  // deterministic pseudo-random small matrices
  u64 state = 12345;
  auto rnd = [&] { state = state * 6364136223846793005ull + 1442695040888963407ull; return long(state >> 48) - 32768; };
  for (int rep = 0; rep < 25; ++rep) {
    std::vector<long> v(9);
    for (auto& x : v) x = rnd() % 20;
    check_witnesses(mk(3, 3, v));
  }
}

TEST_CASE("howell: [[2]] over Z/4") {
  ZkMat m(ZmodCtx(2, 2), 1, 1);
  m.at(0, 0) = 2;
  ZkMat h = howell_form(m);
  REQUIRE(h.rows == 1);
  CHECK(h.at(0, 0) == 2);
}

TEST_CASE("howell: [[1,2],[0,2]] over Z/4 -> [[1,0],[0,2]]") {
  // oracle: row span has 8 elements; canonical form from the enumerated span
  ZkMat m(ZmodCtx(2, 2), 2, 2);
  m.at(0, 0) = 1;
  m.at(0, 1) = 2;
  m.at(1, 0) = 0;
  m.at(1, 1) = 2;
  ZkMat h = howell_form(m);
  REQUIRE(h.rows == 2);
  CHECK(h.at(0, 0) == 1);
  CHECK(h.at(0, 1) == 0);
  CHECK(h.at(1, 0) == 0);
  CHECK(h.at(1, 1) == 2);
  CHECK(howell_span_size(h) == 8);
}

TEST_CASE("howell: [[3]] over Z/9") {
  ZkMat m(ZmodCtx(3, 2), 1, 1);
  m.at(0, 0) = 3;
  ZkMat h = howell_form(m);
  REQUIRE(h.rows == 1);
  CHECK(h.at(0, 0) == 3);
}

TEST_CASE("howell: canonical for equal row spans, membership correct") {
  // span of {(2,0),(0,2)} over Z/8 in two presentations
  ZmodCtx c(2, 3);
  ZkMat m1(c, 2, 2), m2(c, 3, 2);
  m1.at(0, 0) = 2; m1.at(1, 1) = 2;
  m2.at(0, 0) = 2; m2.at(0, 1) = 2; m2.at(1, 1) = 2; m2.at(2, 0) = 6;
  ZkMat h1 = howell_form(m1), h2 = howell_form(m2);
  REQUIRE(h1.rows == h2.rows);
  CHECK(h1.a == h2.a);
  // enumeration oracle: exactly the vectors with both coords even are in span
  for (u64 x = 0; x < 8; ++x)
    for (u64 y = 0; y < 8; ++y) {
      bool want = (x % 2 == 0) && (y % 2 == 0);
      auto r = howell_reduce(h1, {x, y});
      bool got = r[0] == 0 && r[1] == 0;
      CHECK(want == got);
    }
}

TEST_CASE("howell_solve recovers membership coefficients") {
  ZmodCtx c(3, 2);
  ZkMat m(c, 2, 3);
  m.at(0, 0) = 1; m.at(0, 1) = 2; m.at(0, 2) = 3;
  m.at(1, 1) = 3; m.at(1, 2) = 6;
  ZkMat h = howell_form(m);
  std::vector<u64> v = {2, 7, 3}, x;
  // v = 2*row0 + row1 of m; check membership via h
  REQUIRE(howell_solve(h, v, x));
  std::vector<u64> back(3, 0);
  for (std::size_t i = 0; i < h.rows; ++i)
    for (std::size_t j = 0; j < 3; ++j) back[j] = c.add(back[j], c.mul(x[i], h.at(i, j)));
  CHECK(back == v);
  CHECK_FALSE(howell_solve(h, {0, 1, 0}, x));
}

namespace {

AbGroup cyclic(u64 p, u64 n) {  // Z/n as 1-coordinate encodings, n a p-power
  AbGroup g;
  g.p = p;
  for (u64 i = 0; i < n; ++i) g.elems.push_back({i});
  g.add = [n](const Enc& a, const Enc& b) { return Enc{(a[0] + b[0]) % n}; };
  g.neg = [n](const Enc& a) { return Enc{(n - a[0]) % n}; };
  return g;
}

}  // namespace

TEST_CASE("homology: zero map Z/p -> Z/p") {
  auto g = cyclic(5, 5);
  auto h = two_term_homology(g, g, [&](const Enc&) { return g.zero(); });
  CHECK(h.h0_inv == std::vector<u64>{1});
  CHECK(h.h1_inv == std::vector<u64>{1});
}

TEST_CASE("homology: identity map") {
  auto g = cyclic(2, 8);
  auto h = two_term_homology(g, g, [](const Enc& x) { return x; });
  CHECK(h.h0_inv.empty());
  CHECK(h.h1_inv.empty());
}

TEST_CASE("homology: multiplication by p on Z/p^2") {
  auto g = cyclic(3, 9);
  auto h = two_term_homology(g, g, [](const Enc& x) { return Enc{(x[0] * 3) % 9}; });
  CHECK(h.h0_inv == std::vector<u64>{1});
  CHECK(h.h1_inv == std::vector<u64>{1});
}

TEST_CASE("homology: product group, non-cyclic kernel") {
  // f : Z/4 x Z/2 -> Z/4, (a,b) -> 2a; ker = Z/2 x Z/2, coker = Z/2
  AbGroup src, dst = cyclic(2, 4);
  src.p = 2;
  for (u64 a = 0; a < 4; ++a)
    for (u64 b = 0; b < 2; ++b) src.elems.push_back({a, b});
  std::swap(src.elems[0], src.elems[0]);  // (0,0) already first
  src.add = [](const Enc& x, const Enc& y) { return Enc{(x[0] + y[0]) % 4, (x[1] + y[1]) % 2}; };
  src.neg = [](const Enc& x) { return Enc{(4 - x[0]) % 4, (2 - x[1]) % 2}; };
  auto h = two_term_homology(src, dst, [](const Enc& x) { return Enc{(2 * x[0]) % 4}; });
  CHECK(h.h0_inv == std::vector<u64>{1, 1});
  CHECK(h.h1_inv == std::vector<u64>{1});
}

TEST_CASE("homology: invariant classification matches brute force on order <= p^6") {
  // all abelian 2-groups of order up to 64 as products of cyclics: verify
  // order statistics of the constructed group reproduce the partition
  std::vector<std::vector<u64>> parts = {
      {1}, {2}, {1, 1}, {3}, {2, 1}, {1, 1, 1}, {4}, {3, 1}, {2, 2}, {2, 1, 1},
      {1, 1, 1, 1}, {5}, {4, 1}, {3, 2}, {3, 1, 1}, {2, 2, 1}, {6}, {3, 3}, {2, 2, 2}};
  for (const auto& part : parts) {
    std::vector<u64> mods;
    for (u64 e : part) mods.push_back(u64(1) << e);
    AbGroup g;
    g.p = 2;
    std::vector<Enc> todo = {Enc(mods.size(), 0)};
    // enumerate the product lexicographically
    std::function<void(std::size_t, Enc&)> rec = [&](std::size_t i, Enc& cur) {
      if (i == mods.size()) {
        if (cur != Enc(mods.size(), 0)) g.elems.push_back(cur);
        return;
      }
      for (u64 v = 0; v < mods[i]; ++v) {
        cur[i] = v;
        rec(i + 1, cur);
      }
      cur[i] = 0;
    };
    Enc cur(mods.size(), 0);
    g.elems.push_back(cur);
    rec(0, cur);
    g.add = [mods](const Enc& a, const Enc& b) {
      Enc r(a.size());
      for (std::size_t i = 0; i < a.size(); ++i) r[i] = (a[i] + b[i]) % mods[i];
      return r;
    };
    g.neg = [mods](const Enc& a) {
      Enc r(a.size());
      for (std::size_t i = 0; i < a.size(); ++i) r[i] = (mods[i] - a[i]) % mods[i];
      return r;
    };
    std::vector<u64> orders;
    for (const auto& x : g.elems) orders.push_back(elem_order(g, x));
    auto inv = invariants_from_orders(2, orders);
    auto want = part;
    std::sort(want.rbegin(), want.rend());
    CHECK(inv == want);
  }
}

TEST_CASE("homology: budget error is structured") {
  auto g = cyclic(2, 16);
  CHECK_THROWS_AS(two_term_homology(g, g, [](const Enc& x) { return x; }, 8),
                  HomologyBudgetError);
}
