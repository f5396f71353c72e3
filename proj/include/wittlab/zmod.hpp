#pragma once
// Arithmetic helpers for Z/p^k with machine-word residues.

#include <cstdint>
#include <stdexcept>
#include <string>

namespace wittlab {

using u64 = std::uint64_t;
using i64 = std::int64_t;
using u128 = unsigned __int128;

// p^e, throwing if it does not fit comfortably in 63 bits.
inline u64 upow_checked(u64 p, u64 e) {
  u64 r = 1;
  for (u64 i = 0; i < e; ++i) {
    if (r > (u64(1) << 62) / p)
      throw std::overflow_error("upow_checked: p^" + std::to_string(e) + " overflows");
    r *= p;
  }
  return r;
}

inline u64 mulmod(u64 a, u64 b, u64 m) { return u64((u128(a) * b) % m); }

inline u64 powmod(u64 a, u64 e, u64 m) {
  u64 r = 1 % m;
  a %= m;
  while (e) {
    if (e & 1) r = mulmod(r, a, m);
    a = mulmod(a, a, m);
    e >>= 1;
  }
  return r;
}

// Extended gcd; returns g and writes x with a*x == g (mod m0 context not needed).
inline i64 exgcd(i64 a, i64 b, i64& x, i64& y) {
  if (b == 0) { x = 1; y = 0; return a; }
  i64 x1, y1;
  i64 g = exgcd(b, a % b, x1, y1);
  x = y1;
  y = x1 - (a / b) * y1;
  return g;
}

// Inverse of a unit mod m; throws if gcd(a, m) != 1.
inline u64 invmod(u64 a, u64 m) {
  i64 x, y;
  i64 g = exgcd(i64(a % m), i64(m), x, y);
  if (g != 1 && g != -1) throw std::domain_error("invmod: not a unit");
  i64 r = x % i64(m);
  if (r < 0) r += i64(m);
  return u64(r);
}

// p-adic valuation of a (a != 0) together with the unit part u: a = p^v * u.
inline u64 pval(u64 a, u64 p, u64* unit = nullptr) {
  if (a == 0) throw std::domain_error("pval(0)");
  u64 v = 0;
  while (a % p == 0) { a /= p; ++v; }
  if (unit) *unit = a;
  return v;
}

struct ZmodCtx {
  u64 p = 0, k = 0, mod = 0;
  ZmodCtx() = default;
  ZmodCtx(u64 p_, u64 k_) : p(p_), k(k_), mod(upow_checked(p_, k_)) {}
  u64 add(u64 a, u64 b) const { return (a + b) % mod; }
  u64 sub(u64 a, u64 b) const { return (a + mod - b % mod) % mod; }
  u64 mul(u64 a, u64 b) const { return mulmod(a, b, mod); }
  u64 neg(u64 a) const { return (mod - a % mod) % mod; }
  u64 inv(u64 a) const { return invmod(a, mod); }
  bool is_unit(u64 a) const { return a % p != 0; }
};

}  // namespace wittlab
