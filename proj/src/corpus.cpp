#include "wittlab/corpus.hpp"

#include <sstream>
#include <stdexcept>

namespace wittlab {

namespace {

u64 upow(u64 b, u64 e) {
  u64 r = 1;
  while (e--) r *= b;
  return r;
}

}  // namespace

RingPtr corpus_field(u64 p, u64 m) {
  if (m == 1) return FpkAlgebra::make_zmod(p, 1);
  if (m < 1 || m > 3) throw std::invalid_argument("corpus_field: degree 1..3 supported");
  // degree 2 or 3: irreducible over F_p iff no roots; search lexicographically
  for (u64 code = 0; code < upow(p, m); ++code) {
    std::vector<u64> f(m);
    u64 c = code;
    for (u64 i = 0; i < m; ++i) {
      f[i] = c % p;
      c /= p;
    }
    bool has_root = false;
    for (u64 x = 0; x < p && !has_root; ++x) {
      u64 v = 1;  // x^m
      for (u64 i = 0; i < m; ++i) v = v * x % p;
      for (u64 i = 0; i < m; ++i) {
        u64 xi = 1;
        for (u64 j = 0; j < i; ++j) xi = xi * x % p;
        v = (v + f[i] * xi) % p;
      }
      has_root = v == 0;
    }
    if (has_root) continue;
    return FpkAlgebra::make_field(p, f);
  }
  throw std::logic_error("corpus_field: no irreducible polynomial found");
}

RingPtr corpus_nilpotent(const RingPtr& k, u64 j) {
  return FpkAlgebra::extend_nilpotent(k, j);
}

RingPtr corpus_square_zero_plane(u64 p) {
  std::size_t r = 3;
  std::vector<u64> sc(r * r * r, 0);
  auto set = [&](std::size_t i, std::size_t j, std::size_t m, u64 v) {
    sc[(i * r + j) * r + m] = v;
  };
  for (std::size_t i = 0; i < r; ++i) {
    set(0, i, i, 1);  // 1 * e_i = e_i
    set(i, 0, i, 1);
  }
  // x*x = x*y = y*y = 0: already zero
  return FpkAlgebra::make(p, 1, {"1", "x", "y"}, std::move(sc), {1, 0, 0},
                          "F" + std::to_string(p) + "[x,y]/(x,y)^2");
}

RingPtr corpus_ring(const std::string& name) {
  // "F<q>", "F<q>[t]/t<j>", "F<p>[x,y]/(x,y)^2"
  if (name.size() < 2 || name[0] != 'F') throw std::invalid_argument("corpus_ring: " + name);
  std::size_t pos = 1;
  u64 q = 0;
  while (pos < name.size() && isdigit(name[pos])) q = q * 10 + (name[pos++] - '0');
  if (q < 2) throw std::invalid_argument("corpus_ring: " + name);
  u64 p = 2;
  while (true) {
    bool div = q % p == 0;
    if (div) break;
    ++p;
    if (p * p > q) {
      p = q;
      break;
    }
  }
  u64 m = 0, qq = 1;
  while (qq < q) {
    qq *= p;
    ++m;
  }
  if (qq != q) throw std::invalid_argument("corpus_ring: not a prime power: " + name);
  RingPtr k = corpus_field(p, m);
  std::string rest = name.substr(pos);
  if (rest.empty()) return k;
  if (rest == "[x,y]/(x,y)^2") {
    if (m != 1) throw std::invalid_argument("corpus_ring: plane over prime field only");
    return corpus_square_zero_plane(p);
  }
  if (rest.rfind("[t]/t", 0) == 0) {
    u64 j = std::stoull(rest.substr(5));
    return corpus_nilpotent(k, j);
  }
  throw std::invalid_argument("corpus_ring: " + name);
}

std::vector<std::string> corpus_ring_names() {
  return {"F2",       "F4",       "F8",       "F3",      "F9",
          "F2[t]/t2", "F2[t]/t3", "F4[t]/t2", "F3[t]/t2", "F9[t]/t2",
          "F2[x,y]/(x,y)^2"};
}

std::vector<std::string> corpus_window_names() {
  return {"unit", "twist", "ordinary", "supersingular"};
}

Window corpus_window(const FramePtr& F, const std::string& name) {
  if (name == "unit") return unit_window(F);
  if (name == "twist") return twist_window(F);
  if (name == "ordinary") return direct_sum(unit_window(F), twist_window(F));
  if (name == "supersingular") {
    Mat0 psi = m0_zero(F, 2, 2);
    psi.e[0 * 2 + 1] = F->one0();
    psi.e[1 * 2 + 0] = F->one0();
    return make_window(F, 1, 1, std::move(psi));
  }
  throw std::invalid_argument("corpus_window: unknown window " + name);
}

TestRing corpus_test_ring(const RingPtr& base, const RingPtr& S, std::string id,
                          std::size_t budget) {
  return make_test_ring(base, S, std::move(id), budget);
}

std::optional<bigint> corpus_oracle(const std::string& window_id, const TestRing& T, u64 n) {
  const RingPtr& S = T.S;
  if (nilradical(S).span_size() != 1) return std::nullopt;
  auto mu_count = [&]() {
    // p^n-th roots of unity in S, counted directly
    bigint c = 0;
    bigint card = S->card();
    for (bigint i = 0; i < card; ++i) {
      RingElement x = S->elem_by_index(i);
      RingElement y = x;
      for (u64 e = 0; e < n; ++e) y = S->pow(y, S->p);
      if (y == S->one_elem()) c += 1;
    }
    return c;
  };
  if (window_id == "unit") return mu_count();
  if (window_id == "twist") {
    bigint c = 1;
    for (u64 e = 0; e < n; ++e) c *= S->p;
    return c;
  }
  if (window_id == "ordinary") {
    bigint c = mu_count();
    for (u64 e = 0; e < n; ++e) c *= S->p;
    return c;
  }
  if (window_id == "supersingular") {
    // solutions of F(x) = V(x) on W_n(S), enumerated with plain Witt ops
    bigint c = 0;
    bigint card = S->card();
    bigint total = 1;
    for (u64 e = 0; e < n; ++e) total *= card;
    for (bigint i = 0; i < total; ++i) {
      WittVec x{S, {}};
      bigint rem = i;
      for (u64 e = 0; e < n; ++e) {
        x.c.push_back(S->elem_by_index(rem % card));
        rem /= card;
      }
      // over an F_p-algebra, F is componentwise p-th power (length n); V is
      // the shift truncated back to length n
      if (frobenius_F(x) == witt_truncate(verschiebung_V(x), n)) c += 1;
    }
    return c;
  }
  return std::nullopt;
}

}  // namespace wittlab
