#include "wittlab/witt.hpp"

#include <algorithm>
#include <mutex>

namespace wittlab {

namespace {

void check_pair(const WittVec& x, const WittVec& y) {
  if (x.ring.get() != y.ring.get() && !x.ring->same_as(*y.ring))
    throw std::invalid_argument("witt op: different rings");
  if (x.len() != y.len()) throw std::invalid_argument("witt op: different lengths");
}

// --- ghost-solve route over an integral model --------------------------------

using MElem = std::vector<u64>;

struct ModelCtx {
  const FpkAlgebra* R;
  u64 K, mod;  // p^K with K = k + n
  std::size_t rank;
  std::vector<u64> sc, one;

  ModelCtx(const FpkAlgebra& ring, u64 extra) : R(&ring) {
    K = ring.k + extra;
    mod = upow_checked(ring.p, K);
    rank = ring.rank;
    const IntegralModel& m = *ring.model;
    sc.resize(m.sc.size());
    for (std::size_t i = 0; i < m.sc.size(); ++i) {
      i64 v = m.sc[i] % i64(mod);
      if (v < 0) v += i64(mod);
      sc[i] = u64(v);
    }
    one.resize(rank);
    for (std::size_t i = 0; i < rank; ++i) {
      i64 v = m.one[i] % i64(mod);
      if (v < 0) v += i64(mod);
      one[i] = u64(v);
    }
  }

  MElem lift(const RingElement& x) const { return MElem(x.c.begin(), x.c.end()); }
  RingElement project(const MElem& x) const {
    std::vector<u64> c(rank);
    for (std::size_t i = 0; i < rank; ++i) c[i] = x[i] % R->mod;
    return R->elem(std::move(c));
  }
  MElem zero() const { return MElem(rank, 0); }
  MElem add(const MElem& a, const MElem& b) const {
    MElem r(rank);
    for (std::size_t i = 0; i < rank; ++i) r[i] = (a[i] + b[i]) % mod;
    return r;
  }
  MElem sub(const MElem& a, const MElem& b) const {
    MElem r(rank);
    for (std::size_t i = 0; i < rank; ++i) r[i] = (a[i] + mod - b[i]) % mod;
    return r;
  }
  MElem neg(const MElem& a) const {
    MElem r(rank);
    for (std::size_t i = 0; i < rank; ++i) r[i] = (mod - a[i]) % mod;
    return r;
  }
  MElem mul(const MElem& a, const MElem& b) const {
    MElem r(rank, 0);
    for (std::size_t i = 0; i < rank; ++i) {
      if (a[i] == 0) continue;
      for (std::size_t j = 0; j < rank; ++j) {
        if (b[j] == 0) continue;
        u64 ab = mulmod(a[i], b[j], mod);
        const u64* row = &sc[(i * rank + j) * rank];
        for (std::size_t m = 0; m < rank; ++m) r[m] = (r[m] + mulmod(ab, row[m], mod)) % mod;
      }
    }
    return r;
  }
  MElem pow(MElem a, u64 e) const {
    MElem r = one;
    while (e) {
      if (e & 1) r = mul(r, a);
      e >>= 1;
      if (e) a = mul(a, a);
    }
    return r;
  }
  MElem scal(u64 s, const MElem& a) const {
    MElem r(rank);
    for (std::size_t i = 0; i < rank; ++i) r[i] = mulmod(s % mod, a[i], mod);
    return r;
  }
};

// ghost components g[0..n-1] of x in the model, mod p^K
std::vector<MElem> model_ghost(const ModelCtx& ctx, const WittVec& x) {
  std::size_t n = x.len();
  u64 p = x.ring->p;
  std::vector<MElem> pw(n), g(n);
  for (std::size_t i = 0; i < n; ++i) pw[i] = ctx.lift(x.c[i]);
  for (std::size_t m = 0; m < n; ++m) {
    MElem s = ctx.zero();
    u64 pi = 1;
    for (std::size_t i = 0; i <= m; ++i) {
      s = ctx.add(s, ctx.scal(pi, pw[i]));
      pi = mulmod(pi, p, ctx.mod);
    }
    g[m] = std::move(s);
    // refresh: at step m+1, pw[i] must hold x_i^(p^(m+1-i)) for i <= m+1
    if (m + 1 < n)
      for (std::size_t i = 0; i <= m; ++i) pw[i] = ctx.pow(pw[i], p);
  }
  return g;
}

// Solve sum_{i<=m} p^i z_i^(p^(m-i)) = G_m for z, keeping raw representatives
// mod p^K through the recursion (each z_i is only determined mod p^(K-i), and
// the error terms cancel against the p^i factors).
WittVec model_solve(const ModelCtx& ctx, const std::vector<MElem>& G, const RingPtr& R) {
  std::size_t n = G.size();
  u64 p = R->p;
  std::vector<MElem> z(n), pwz(n);
  WittVec out{R, {}};
  u64 pm = 1;
  for (std::size_t m = 0; m < n; ++m) {
    MElem num = G[m];
    u64 pi = 1;
    for (std::size_t i = 0; i < m; ++i) {
      num = ctx.sub(num, ctx.scal(pi, pwz[i]));
      pi = mulmod(pi, p, ctx.mod);
    }
    MElem zm(ctx.rank);
    for (std::size_t t = 0; t < ctx.rank; ++t) {
      if (num[t] % pm != 0) throw std::logic_error("model_solve: ghost not divisible");
      zm[t] = num[t] / pm;
    }
    z[m] = zm;
    out.c.push_back(ctx.project(zm));
    // refresh power table: after step m, pwz[i] must hold z_i^(p^(m+1-i))
    pwz[m] = std::move(zm);
    if (m + 1 < n)
      for (std::size_t i = 0; i <= m; ++i) pwz[i] = ctx.pow(pwz[i], p);
    pm *= p;
  }
  return out;
}

enum class BinOp { Add, Sub, Mul };

WittVec model_binop(BinOp op, const WittVec& x, const WittVec& y) {
  ModelCtx ctx(*x.ring, x.len());
  auto gx = model_ghost(ctx, x), gy = model_ghost(ctx, y);
  std::vector<MElem> g(x.len());
  for (std::size_t m = 0; m < x.len(); ++m)
    g[m] = op == BinOp::Add   ? ctx.add(gx[m], gy[m])
           : op == BinOp::Sub ? ctx.sub(gx[m], gy[m])
                              : ctx.mul(gx[m], gy[m]);
  return model_solve(ctx, g, x.ring);
}

WittVec model_neg(const WittVec& x) {
  ModelCtx ctx(*x.ring, x.len());
  auto gx = model_ghost(ctx, x);
  for (auto& g : gx) g = ctx.neg(g);
  return model_solve(ctx, gx, x.ring);
}

WittVec model_frob(const WittVec& x) {
  ModelCtx ctx(*x.ring, x.len());
  auto gx = model_ghost(ctx, x);
  std::vector<MElem> g(gx.begin() + 1, gx.end());
  return model_solve(ctx, g, x.ring);
}

// --- universal-polynomial route ----------------------------------------------

RingElement eval_mpoly(const RingPtr& R, const MPoly& poly, const std::vector<RingElement>& args) {
  RingElement s = R->zero_elem();
  for (const auto& [e, coef] : poly.t) {
    bigint cm = coef % R->mod;
    if (cm < 0) cm += R->mod;
    if (cm == 0) continue;
    RingElement term = R->scal(u64(cm), R->one_elem());
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (e[i] == 0) continue;
      term = R->mul(term, R->pow(args[i], e[i]));
    }
    s = R->add(s, term);
  }
  return s;
}

WittVec sym_binop(BinOp op, const WittVec& x, const WittVec& y) {
  const RingPtr& R = x.ring;
  std::size_t n = x.len();
  WittVec yy = op == BinOp::Sub ? witt_neg_sym(y) : y;
  std::vector<RingElement> args;
  for (std::size_t i = 0; i < n; ++i) {
    args.push_back(x.c[i]);
    args.push_back(yy.c[i]);
  }
  WittVec out{R, {}};
  for (std::size_t m = 0; m < n; ++m) {
    const MPoly& P = op == BinOp::Mul ? WittPolyCache::prod(R->p, m) : WittPolyCache::sum(R->p, m);
    out.c.push_back(eval_mpoly(R, P, args));
  }
  return out;
}

bool has_model(const WittVec& x) { return x.ring->model.has_value(); }

}  // namespace

bool WittVec::operator==(const WittVec& o) const {
  return len() == o.len() && c == o.c;
}

WittVec witt_zero(const RingPtr& R, std::size_t n) {
  WittVec w{R, {}};
  for (std::size_t i = 0; i < n; ++i) w.c.push_back(R->zero_elem());
  return w;
}

WittVec witt_one(const RingPtr& R, std::size_t n) { return teichmuller(R->one_elem(), n); }

WittVec teichmuller(const RingElement& a, std::size_t n) {
  WittVec w = witt_zero(a.ring, n);
  if (n == 0) throw std::invalid_argument("teichmuller: length 0");
  w.c[0] = a;
  return w;
}

WittVec witt_from_int(const RingPtr& R, std::size_t n, i64 v) {
  // v * 1 in W_n(R): double-and-add on Teichmuller of 1
  bool negate = v < 0;
  u64 e = negate ? u64(-v) : u64(v);
  WittVec acc = witt_zero(R, n), base = witt_one(R, n);
  while (e) {
    if (e & 1) acc = witt_add(acc, base);
    e >>= 1;
    if (e) base = witt_add(base, base);
  }
  return negate ? witt_neg(acc) : acc;
}

bool witt_is_zero(const WittVec& x) {
  return std::all_of(x.c.begin(), x.c.end(), [&](const RingElement& e) { return x.ring->is_zero(e); });
}

WittVec witt_add(const WittVec& x, const WittVec& y) {
  check_pair(x, y);
  return has_model(x) ? model_binop(BinOp::Add, x, y) : sym_binop(BinOp::Add, x, y);
}
WittVec witt_sub(const WittVec& x, const WittVec& y) {
  check_pair(x, y);
  return has_model(x) ? model_binop(BinOp::Sub, x, y) : sym_binop(BinOp::Sub, x, y);
}
WittVec witt_mul(const WittVec& x, const WittVec& y) {
  check_pair(x, y);
  return has_model(x) ? model_binop(BinOp::Mul, x, y) : sym_binop(BinOp::Mul, x, y);
}
WittVec witt_neg(const WittVec& x) {
  if (has_model(x)) return model_neg(x);
  return witt_neg_sym(x);
}

WittVec witt_add_sym(const WittVec& x, const WittVec& y) {
  check_pair(x, y);
  return sym_binop(BinOp::Add, x, y);
}
WittVec witt_mul_sym(const WittVec& x, const WittVec& y) {
  check_pair(x, y);
  return sym_binop(BinOp::Mul, x, y);
}
WittVec witt_neg_sym(const WittVec& x) {
  WittVec out{x.ring, {}};
  for (std::size_t m = 0; m < x.len(); ++m)
    out.c.push_back(eval_mpoly(x.ring, WittPolyCache::neg(x.ring->p, m), x.c));
  return out;
}
WittVec frobenius_F_sym(const WittVec& x) {
  if (x.len() < 2) throw std::invalid_argument("frobenius_F_sym: need length >= 2");
  WittVec out{x.ring, {}};
  for (std::size_t m = 0; m + 1 < x.len(); ++m)
    out.c.push_back(eval_mpoly(x.ring, WittPolyCache::frob(x.ring->p, m), x.c));
  return out;
}

WittVec witt_pow(const WittVec& x, u64 e) {
  WittVec r = witt_one(x.ring, x.len()), b = x;
  while (e) {
    if (e & 1) r = witt_mul(r, b);
    e >>= 1;
    if (e) b = witt_mul(b, b);
  }
  return r;
}

bool witt_is_unit(const WittVec& x) { return x.ring->is_unit(x.c[0]); }

WittVec witt_inv(const WittVec& x) {
  const RingPtr& R = x.ring;
  std::size_t n = x.len();
  // start from the Teichmuller inverse of the leading unit; the error
  // 1 - x*y0 sits in VW_n(R), which lies in the Jacobson radical of the
  // finite ring W_n(R), so the geometric series terminates.
  WittVec y0 = teichmuller(R->inv(x.c[0]), n);
  WittVec err = witt_sub(witt_one(R, n), witt_mul(x, y0));
  WittVec series = witt_one(R, n), term = err;
  std::size_t guard = 4 * n * R->k * R->rank + 16;
  while (!witt_is_zero(term)) {
    series = witt_add(series, term);
    term = witt_mul(term, err);
    if (guard-- == 0) throw std::logic_error("witt_inv: series did not terminate");
  }
  WittVec y = witt_mul(y0, series);
  if (!witt_is_zero(witt_sub(witt_mul(x, y), witt_one(R, n))))
    throw std::logic_error("witt_inv: verification failed");
  return y;
}

WittVec frobenius_F(const WittVec& x) {
  if (x.ring->is_fp_algebra()) {
    // componentwise p-power, same length
    WittVec out{x.ring, {}};
    for (const auto& e : x.c) out.c.push_back(x.ring->pow(e, x.ring->p));
    return out;
  }
  if (x.len() < 2) throw std::invalid_argument("frobenius_F: length-1 over non-F_p-algebra");
  return has_model(x) ? model_frob(x) : frobenius_F_sym(x);
}

WittVec verschiebung_V(const WittVec& x) {
  WittVec out = witt_zero(x.ring, x.len());
  for (std::size_t i = 0; i + 1 < x.len(); ++i) out.c[i + 1] = x.c[i];
  return out;
}

WittVec witt_truncate(const WittVec& x, std::size_t n) {
  if (n > x.len()) throw std::invalid_argument("witt_truncate: cannot extend");
  WittVec out{x.ring, {x.c.begin(), x.c.begin() + long(n)}};
  return out;
}

WittVec witt_map(const RingHom& f, const WittVec& x) {
  WittVec out{f.dst, {}};
  for (const auto& e : x.c) out.c.push_back(f.apply(e));
  return out;
}

WittVec witt_int_to(const RingPtr& R, const WittVec& w) {
  if (w.ring->rank != 1) throw std::invalid_argument("witt_int_to: source must be Z/p^K");
  if (w.ring->p != R->p || w.ring->k < R->k)
    throw std::invalid_argument("witt_int_to: no canonical map");
  WittVec out{R, {}};
  for (const auto& e : w.c) out.c.push_back(R->from_int(i64(e.c[0] % R->mod)));
  return out;
}

std::vector<bigint> ghost_bigint(const WittVec& x) {
  if (x.ring->rank != 1) throw std::invalid_argument("ghost_bigint: rank-1 rings only");
  std::size_t n = x.len();
  u64 p = x.ring->p;
  std::vector<bigint> g(n);
  for (std::size_t m = 0; m < n; ++m) {
    bigint s = 0, pi = 1;
    for (std::size_t i = 0; i <= m; ++i) {
      bigint b = x.c[i].c[0], acc = 1;
      u64 e = upow_checked(p, m - i);
      for (u64 j = 0; j < e; ++j) acc *= b;
      s += pi * acc;
      pi *= p;
    }
    g[m] = s;
  }
  return g;
}

// --- constants -----------------------------------------------------------------

namespace {

// u0 over Z/p^K at length n: components 1..n of (p - [p]) at length n+1
WittVec compute_u0(const RingPtr& zpk, std::size_t n) {
  WittVec d = witt_sub(witt_from_int(zpk, n + 1, i64(zpk->p)),
                       teichmuller(zpk->from_int(i64(zpk->p)), n + 1));
  if (!zpk->is_zero(d.c[0])) throw std::logic_error("compute_u0: p - [p] has nonzero head");
  WittVec u{zpk, {d.c.begin() + 1, d.c.end()}};
  return u;
}

std::mutex const_mu;
std::map<std::pair<u64, std::size_t>, WittConstants> const_cache;

}  // namespace

const WittConstants& witt_constants(u64 p, std::size_t n) {
  std::lock_guard<std::mutex> lock(const_mu);
  auto key = std::make_pair(p, n);
  auto it = const_cache.find(key);
  if (it != const_cache.end()) return it->second;

  WittConstants wc;
  wc.p = p;
  wc.n = n;
  if (p >= 3) {
    wc.coeff = FpkAlgebra::make_zmod(p, 4);
    wc.u0 = witt_one(wc.coeff, n);
    wc.alpha = witt_one(wc.coeff, n);
    wc.ptilde = witt_from_int(wc.coeff, n, i64(p));
  } else {
    // fixed coefficient precision: the constants are only ever reduced into
    // algebras with small k, and 2^8 keeps the internal model modulus within
    // 64 bits at every length the sparse-vector bridge asks for
    u64 K = 8;
    auto z = FpkAlgebra::make_zmod(2, K);
    wc.coeff = z;
    wc.u0 = compute_u0(z, n);
    // check V(u0) = 2 - [2] at the working precision
    {
      WittVec d = witt_sub(witt_from_int(z, n, 2), teichmuller(z->from_int(2), n));
      if (verschiebung_V(wc.u0) != d) throw std::logic_error("witt_constants: V(u0) != p - [p]");
    }
    wc.ptilde = witt_mul(witt_from_int(z, n, 2), wc.u0);  // F(Vt(1)) = FV(u0) = p*u0
    {
      WittVec want = witt_sub(witt_from_int(z, n, 2), teichmuller(z->from_int(4), n));
      if (wc.ptilde != want) throw std::logic_error("witt_constants: ptilde != p - [p^2]");
    }
    // alpha = prod_{m>=0} F^m(u0), computed at internal length n+1 until the
    // degree-(n+1) truncation stabilizes; then alpha = u0 * F(alpha) is checked
    std::size_t M = 12;
    std::size_t L0 = n + 1 + M;
    WittVec fm = compute_u0(z, L0);
    WittVec prod = witt_one(z, L0);
    WittVec prev = witt_truncate(prod, n + 1);
    bool stable = false;
    for (std::size_t m = 0; m <= M; ++m) {
      prod = witt_mul(witt_truncate(prod, fm.len()), fm);
      WittVec cur = witt_truncate(prod, n + 1);
      if (m > 0 && cur == prev) { stable = true; break; }
      prev = cur;
      if (fm.len() < 2) break;
      fm = frobenius_F(fm);
    }
    if (!stable) throw std::logic_error("witt_constants: alpha product did not stabilize");
    WittVec alpha_full = prev;  // length n+1
    wc.alpha = witt_truncate(alpha_full, n);
    WittVec falpha = frobenius_F(alpha_full);  // length n
    if (wc.alpha != witt_mul(witt_truncate(wc.u0, n), falpha))
      throw std::logic_error("witt_constants: alpha != u0 * F(alpha)");
  }
  return const_cache.emplace(key, std::move(wc)).first->second;
}

WittVec u0_in(const RingPtr& R, std::size_t n) {
  if (R->p >= 3) return witt_one(R, n);
  return witt_int_to(R, witt_constants(R->p, n).u0);
}
WittVec ptilde_in(const RingPtr& R, std::size_t n) {
  if (R->p >= 3) return witt_from_int(R, n, i64(R->p));
  return witt_int_to(R, witt_constants(R->p, n).ptilde);
}
WittVec alpha_in(const RingPtr& R, std::size_t n) {
  if (R->p >= 3) return witt_one(R, n);
  return witt_int_to(R, witt_constants(R->p, n).alpha);
}

WittVec vtilde(const WittVec& x) {
  if (x.ring->p >= 3) return verschiebung_V(x);
  return verschiebung_V(witt_mul(u0_in(x.ring, x.len()), x));
}

// --- divided powers --------------------------------------------------------------

u64 binom_mod(u64 n, u64 r, u64 mod) {
  if (r > n) return 0;
  std::vector<u64> row(n + 1, 0);
  row[0] = 1;
  for (u64 i = 1; i <= n; ++i)
    for (u64 j = std::min(i, r); j > 0; --j) row[j] = (row[j] + row[j - 1]) % mod;
  return row[r];
}

std::pair<u64, u64> factorial_vu(u64 n, u64 p, u64 mod) {
  u64 v = 0, u = 1 % mod;
  for (u64 i = 2; i <= n; ++i) {
    u64 t = i;
    while (t % p == 0) { t /= p; ++v; }
    u = mulmod(u, t % mod, mod);
  }
  return {v, u};
}

WittVec divided_gamma(u64 m, const WittVec& y) {
  const RingPtr& R = y.ring;
  u64 p = R->p;
  std::size_t n = y.len();
  if (m == 0) return witt_one(R, n);
  if (m == 1) return vtilde(y);
  // integer scalars act through Z/p^(k+n) (the characteristic of W_n(R)
  // divides p^(k+n)), so all unit corrections are taken mod p^(k+n)
  u64 mod = upow_checked(p, R->k + n);

  // gamma_p(Vt(z)) = c * Vt(u0^(p-1) z^p) with c = p^(p-2)/(p-1)!, since
  // (Vt z)^p = Vt(pt^(p-1) z^p) and pt = p*u0; the u0 twist is trivial for p>=3
  u64 c = mulmod(powmod(p, p - 2, mod), invmod(factorial_vu(p - 1, p, mod).second, mod), mod);
  WittVec u0pow = witt_pow(u0_in(R, n), p - 1);

  // base-p digits of m
  std::vector<u64> digits;
  for (u64 t = m; t > 0; t /= p) digits.push_back(t % p);

  // tower of Vt-preimages: t_0 = y, gamma_{p^{i+1}} = gamma_p(gamma_{p^i}) / C_{p,p^i}
  std::vector<WittVec> pre = {y};
  for (std::size_t i = 0; i + 1 < digits.size(); ++i) {
    u64 pi = upow_checked(p, i);
    // C_{p,p^i} = (p^{i+1})! / (p! * (p^i!)^p), a p-adic unit
    auto [vn, un] = factorial_vu(pi * p, p, mod);
    auto [vp, up] = factorial_vu(p, p, mod);
    auto [vi, ui] = factorial_vu(pi, p, mod);
    if (vn != vp + p * vi) throw std::logic_error("divided_gamma: C valuation mismatch");
    u64 C = mulmod(un, invmod(mulmod(up, powmod(ui, p, mod), mod), mod), mod);
    WittVec next = witt_mul(witt_from_int(R, n, i64(mulmod(c, invmod(C, mod), mod))),
                            witt_mul(u0pow, witt_pow(pre.back(), p)));
    pre.push_back(std::move(next));
  }

  // gamma_m = (prod_i gamma_{p^i}^{a_i}) / E with E = m! / prod (p^i!)^{a_i}, a unit
  WittVec result = witt_one(R, n);
  for (std::size_t i = 0; i < digits.size(); ++i) {
    if (digits[i] == 0) continue;
    WittVec gi = vtilde(pre[i]);
    result = witt_mul(result, witt_pow(gi, digits[i]));
  }
  auto [vm, um] = factorial_vu(m, p, mod);
  u64 vE = vm, uE = um;
  for (std::size_t i = 0; i < digits.size(); ++i) {
    if (digits[i] == 0) continue;
    auto [vi, ui] = factorial_vu(upow_checked(p, i), p, mod);
    vE -= digits[i] * vi;
    uE = mulmod(uE, invmod(powmod(ui, digits[i], mod), mod), mod);
  }
  if (vE != 0) throw std::logic_error("divided_gamma: E is not a unit");
  return witt_mul(result, witt_from_int(R, n, i64(invmod(uE, mod))));
}

// --- sparse vectors ---------------------------------------------------------------

void HatWittVec::normalize() {
  for (auto it = e.begin(); it != e.end();) {
    if (ring->is_zero(it->second))
      it = e.erase(it);
    else {
      if (!ring->is_nilpotent(it->second))
        throw std::invalid_argument("HatWittVec: entry is not nilpotent");
      ++it;
    }
  }
}

HatWittVec hat_make(const RingPtr& R, std::map<u64, RingElement> entries) {
  HatWittVec x{R, std::move(entries)};
  x.normalize();
  return x;
}

HatWittVec hat_teich(const RingElement& a, u64 index) {
  return hat_make(a.ring, {{index, a}});
}

WittVec hat_to_dense(const HatWittVec& x, std::size_t L) {
  if (x.support_end() > L) throw std::invalid_argument("hat_to_dense: support exceeds length");
  WittVec w = witt_zero(x.ring, L);
  for (const auto& [i, v] : x.e) w.c[i] = v;
  return w;
}

HatWittVec dense_to_hat(const WittVec& w) {
  std::map<u64, RingElement> m;
  for (std::size_t i = 0; i < w.len(); ++i)
    if (!w.ring->is_zero(w.c[i])) m.emplace(i, w.c[i]);
  return hat_make(w.ring, std::move(m));
}

std::size_t hat_carry_margin(const RingPtr& R) {
  // Nil(R)^t = 0 with t <= rank*(D-1)+1, D = p^k*rank the elementwise
  // nilpotency bound; carries at distance j involve products of total degree
  // >= p^j in the entries, so they die once p^j >= t.
  u64 t = R->rank * (R->mod * R->rank - 1) + 1;
  std::size_t j = 0;
  u64 pj = 1;
  while (pj < t) { pj *= R->p; ++j; }
  return j + 2;
}

namespace {

HatWittVec hat_via_dense(const HatWittVec& a, const HatWittVec& b, bool negate_b) {
  std::size_t margin = hat_carry_margin(a.ring);
  std::size_t L = std::max(a.support_end(), b.support_end()) + margin;
  WittVec da = hat_to_dense(a, L), db = hat_to_dense(b, L);
  WittVec r = negate_b ? witt_sub(da, db) : witt_add(da, db);
  if (!a.ring->is_zero(r.c[L - 1]))
    throw std::logic_error("hat op: carry escaped the safety margin");
  return dense_to_hat(r);
}

}  // namespace

HatWittVec hat_add(const HatWittVec& x, const HatWittVec& y) {
  if (x.ring.get() != y.ring.get() && !x.ring->same_as(*y.ring))
    throw std::invalid_argument("hat_add: different rings");
  if (x.e.empty()) return y;
  if (y.e.empty()) return x;
  return hat_via_dense(x, y, false);
}

HatWittVec hat_sub(const HatWittVec& x, const HatWittVec& y) {
  if (x.e.empty()) return hat_neg(y);
  if (y.e.empty()) return x;
  return hat_via_dense(x, y, true);
}

HatWittVec hat_neg(const HatWittVec& x) {
  if (x.e.empty()) return x;
  std::size_t margin = hat_carry_margin(x.ring);
  std::size_t L = x.support_end() + margin;
  WittVec r = witt_neg(hat_to_dense(x, L));
  if (!x.ring->is_zero(r.c[L - 1])) throw std::logic_error("hat_neg: carry escaped the margin");
  return dense_to_hat(r);
}

HatWittVec hat_scal(const WittVec& w, const HatWittVec& x) {
  if (w.ring.get() != x.ring.get() && !w.ring->same_as(*x.ring))
    throw std::invalid_argument("hat_scal: different rings");
  if (x.e.empty()) return x;
  const RingPtr& R = x.ring;
  std::size_t margin = hat_carry_margin(R);
  // the action is insensitive to components of w beyond the index where
  // F^j kills all nilpotent entries; require w to be long enough for that
  u64 t = R->rank * (R->mod * R->rank - 1) + 1;
  u64 pj = 1;
  std::size_t need = 0;
  while (pj < t) { pj *= R->p; ++need; }
  if (w.len() < need)
    throw std::invalid_argument("hat_scal: scalar truncated too short for this ring");
  std::size_t L = x.support_end() + w.len() + margin;
  WittVec dw = witt_zero(R, L);
  for (std::size_t i = 0; i < w.len(); ++i) dw.c[i] = w.c[i];
  WittVec r = witt_mul(dw, hat_to_dense(x, L));
  if (!R->is_zero(r.c[L - 1])) throw std::logic_error("hat_scal: carry escaped the margin");
  return dense_to_hat(r);
}

HatWittVec hat_F(const HatWittVec& x) {
  const RingPtr& R = x.ring;
  if (R->is_fp_algebra()) {
    std::map<u64, RingElement> m;
    for (const auto& [i, v] : x.e) m.emplace(i, R->pow(v, R->p));
    return hat_make(R, std::move(m));
  }
  if (x.e.empty()) return x;
  std::size_t L = x.support_end() + hat_carry_margin(R) + 1;
  return dense_to_hat(frobenius_F(hat_to_dense(x, L)));
}

HatWittVec hat_V(const HatWittVec& x) {
  std::map<u64, RingElement> m;
  for (const auto& [i, v] : x.e) m.emplace(i + 1, v);
  return hat_make(x.ring, std::move(m));
}

}  // namespace wittlab
