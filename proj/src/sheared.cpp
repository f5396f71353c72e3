#include "wittlab/sheared.hpp"

#include <algorithm>
#include <set>

namespace wittlab {

namespace {

// dense representative at length L: zero-extend lambda past N, add eta
WittVec dense_rep(const ShearedWitt& x, std::size_t L) {
  const auto& S = *x.s;
  if (x.eta.support_end() > L) throw std::invalid_argument("sheared: support exceeds length");
  WittVec lam_ext = witt_zero(S.rs.field, L);
  for (std::size_t i = 0; i < std::min(L, x.lambda.len()); ++i) lam_ext.c[i] = x.lambda.c[i];
  return witt_add(witt_map(S.rs.section, lam_ext), hat_to_dense(x.eta, L));
}

ShearedWitt split_impl(const SRingPtr& S, const WittVec& w, std::size_t target_len) {
  WittVec wl = w;
  if (wl.len() < target_len) {
    WittVec ext = witt_zero(S->R, target_len);
    for (std::size_t i = 0; i < wl.len(); ++i) ext.c[i] = wl.c[i];
    wl = std::move(ext);
  }
  WittVec rho = witt_map(S->rs.projection, wl);          // residue, full length
  WittVec back = witt_map(S->rs.section, rho);           // s-subring component
  WittVec diff = witt_sub(wl, back);                     // the sparse part
  HatWittVec eta = dense_to_hat(diff);
  if (eta.support_end() > S->B)
    throw std::invalid_argument("not representably sheared at this bound (support " +
                                std::to_string(eta.support_end()) + " > " +
                                std::to_string(S->B) + ")");
  return ShearedWitt{S, witt_truncate(rho, S->N), std::move(eta)};
}

void check_same(const ShearedWitt& x, const ShearedWitt& y) {
  if (x.s.get() != y.s.get())
    throw std::invalid_argument("sheared op: different sheared rings");
}

}  // namespace

SRingPtr ShearedWittRing::make(const RingPtr& R, std::size_t N, std::size_t B) {
  if (N < 1 || B < N) throw std::invalid_argument("ShearedWittRing: need 1 <= N <= B");
  auto S = std::make_shared<ShearedWittRing>();
  S->R = R;
  S->rs = residue_section(R);  // validates Artinian local F_p-algebra
  S->N = N;
  S->B = B;
  S->margin = hat_carry_margin(R);
  S->perfect = (S->rs.field->rank == R->rank);
  return S;
}

ShearedWitt s_make(const SRingPtr& S, WittVec lambda, HatWittVec eta) {
  if (lambda.len() != S->N) throw std::invalid_argument("s_make: lambda length != N");
  if (!lambda.ring->same_as(*S->rs.field))
    throw std::invalid_argument("s_make: lambda not over the residue field");
  eta.normalize();
  if (eta.support_end() > S->B) throw std::invalid_argument("s_make: eta support exceeds B");
  if (S->perfect && !eta.is_zero())
    throw std::invalid_argument("s_make: nonzero sparse part over a perfect field");
  return ShearedWitt{S, std::move(lambda), std::move(eta)};
}

ShearedWitt s_zero(const SRingPtr& S) {
  return ShearedWitt{S, witt_zero(S->rs.field, S->N), HatWittVec{S->R, {}}};
}
ShearedWitt s_one(const SRingPtr& S) {
  return ShearedWitt{S, witt_one(S->rs.field, S->N), HatWittVec{S->R, {}}};
}
ShearedWitt s_from_int(const SRingPtr& S, i64 v) {
  return ShearedWitt{S, witt_from_int(S->rs.field, S->N, v), HatWittVec{S->R, {}}};
}

ShearedWitt s_teich(const SRingPtr& S, const RingElement& a) {
  // The dense Teichmuller [a] is NOT in the sheared subring when a has both a
  // unit and a nilpotent part ([s(x)+e] - [s(x)] has infinite Hat-support).
  // The canonical sheared lift of a with pi = a is [residue] + (a - s(residue))
  // placed at index 0; it agrees with [a] when a is nilpotent or in s(k).
  RingElement rho = S->rs.projection.apply(a);
  RingElement nil = S->R->sub(a, S->rs.section.apply(rho));
  std::map<u64, RingElement> ee;
  if (!S->R->is_zero(nil)) ee.emplace(0, nil);
  return s_make(S, teichmuller(rho, S->N), hat_make(S->R, std::move(ee)));
}

WittVec s_embed(const ShearedWitt& x, std::size_t L) {
  if (L > std::min(x.s->N, x.s->B)) throw std::invalid_argument("s_embed: length too large");
  std::size_t LL = std::max<std::size_t>(L, x.eta.support_end());
  return witt_truncate(dense_rep(x, LL), L);
}

WittVec s_rep(const ShearedWitt& x, std::size_t L) { return dense_rep(x, L); }

ShearedWitt s_split(const SRingPtr& S, const WittVec& w) {
  if (!w.ring->same_as(*S->R)) throw std::invalid_argument("s_split: wrong ring");
  return split_impl(S, w, S->work_len());
}

ShearedWitt s_add(const ShearedWitt& x, const ShearedWitt& y) {
  check_same(x, y);
  std::size_t L = x.s->work_len();
  return split_impl(x.s, witt_add(dense_rep(x, L), dense_rep(y, L)), L);
}
ShearedWitt s_sub(const ShearedWitt& x, const ShearedWitt& y) {
  check_same(x, y);
  std::size_t L = x.s->work_len();
  return split_impl(x.s, witt_sub(dense_rep(x, L), dense_rep(y, L)), L);
}
ShearedWitt s_neg(const ShearedWitt& x) {
  std::size_t L = x.s->work_len();
  return split_impl(x.s, witt_neg(dense_rep(x, L)), L);
}
ShearedWitt s_mul(const ShearedWitt& x, const ShearedWitt& y) {
  check_same(x, y);
  std::size_t L = x.s->work_len();
  return split_impl(x.s, witt_mul(dense_rep(x, L), dense_rep(y, L)), L);
}
ShearedWitt s_F(const ShearedWitt& x) {
  std::size_t L = x.s->work_len();
  return split_impl(x.s, frobenius_F(dense_rep(x, L)), L);  // F_p-algebra: same length
}
ShearedWitt s_Vtilde(const ShearedWitt& x) {
  std::size_t L = x.s->work_len();
  return split_impl(x.s, vtilde(dense_rep(x, L)), L);
}
bool s_is_unit(const ShearedWitt& x) { return x.s->R->is_unit(s_pi(x)); }
ShearedWitt s_inv(const ShearedWitt& x) {
  std::size_t L = x.s->work_len();
  return split_impl(x.s, witt_inv(dense_rep(x, L)), L);
}

RingElement s_pi(const ShearedWitt& x) {
  RingElement head = x.s->rs.section.apply(x.lambda.c[0]);
  auto it = x.eta.e.find(0);
  if (it != x.eta.e.end()) head = x.s->R->add(head, it->second);
  return head;
}

ShearedWitt s_random(const SRingPtr& S, std::mt19937_64& rng) {
  const auto& k = S->rs.field;
  WittVec lam{k, {}};
  for (std::size_t i = 0; i < S->N; ++i) {
    std::vector<u64> c(k->rank);
    for (auto& v : c) v = rng() % k->mod;
    lam.c.push_back(k->elem(std::move(c)));
  }
  std::map<u64, RingElement> ee;
  if (!S->perfect) {
    // entries: random multiples of nilpotent basis directions
    std::size_t count = rng() % 3;
    for (std::size_t j = 0; j < count; ++j) {
      u64 idx = rng() % (S->N + 2);
      for (int tries = 0; tries < 64; ++tries) {
        std::vector<u64> c(S->R->rank);
        for (auto& v : c) v = rng() % S->R->mod;
        RingElement cand = S->R->elem(std::move(c));
        if (S->R->is_nilpotent(cand)) {
          ee.emplace(idx, cand);
          break;
        }
      }
    }
  }
  return s_make(S, std::move(lam), hat_make(S->R, std::move(ee)));
}

// --- verifiers ------------------------------------------------------------

nlohmann::json SampleReport::to_json() const {
  return nlohmann::json{{"check", check},   {"ok", ok},
                        {"seed", seed},     {"samples", samples},
                        {"params", params}, {"failures", failures}};
}

namespace {

std::string show_sheared(const ShearedWitt& x) {
  std::string out = "lambda=[";
  for (std::size_t i = 0; i < x.lambda.len(); ++i) {
    if (i) out += ",";
    out += x.lambda.ring->show(x.lambda.c[i]);
  }
  out += "] eta={";
  bool first = true;
  for (const auto& [i, v] : x.eta.e) {
    if (!first) out += ",";
    first = false;
    out += std::to_string(i) + ":" + x.s->R->show(v);
  }
  return out + "}";
}

// invert a bijective hom between rank-equal rings (entries solved per row)
RingHom hom_inverse(const RingHom& f) {
  std::size_t n = f.src->rank;
  if (f.dst->rank != n) throw std::invalid_argument("hom_inverse: rank mismatch");
  std::vector<u64> inv_mat(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<u64> e(n, 0);
    e[i] = 1;
    std::vector<u64> row;
    if (!zk_solve_left(f.src->mod, n, n, f.mat, e, row))
      throw std::invalid_argument("hom_inverse: not bijective");
    std::copy(row.begin(), row.end(), inv_mat.begin() + long(i * n));
  }
  RingHom g{f.dst, f.src, std::move(inv_mat)};
  g.verify();
  return g;
}

}  // namespace

SampleReport check_kernel_sequence(const SRingPtr& S, const RingIdeal& I, std::size_t samples,
                                   u64 seed) {
  SampleReport rep;
  rep.check = "kernel-sequence";
  rep.seed = seed;
  rep.samples = samples;
  rep.params = {{"ring", S->R->name}, {"N", S->N}, {"B", S->B}, {"ideal_size", 0}};
  std::mt19937_64 rng(seed);

  if (!I.is_nilpotent_ideal()) {
    rep.ok = false;
    rep.failures.push_back("ideal is not nilpotent");
    return rep;
  }
  auto qr = make_quotient(S->R, I);
  auto SQ = ShearedWittRing::make(qr.quotient, S->N, S->B);
  std::size_t L = S->work_len();

  auto to_quotient = [&](const ShearedWitt& x) {
    return split_impl(SQ, witt_map(qr.projection, dense_rep(x, L)), SQ->work_len());
  };

  // field identification k_R -> k_Q: rho_Q . proj . s_R, inverted for lifting
  RingHom kRtokQ = S->rs.section.compose(qr.projection).compose(SQ->rs.projection);
  RingHom kQtokR = hom_inverse(kRtokQ);

  for (std::size_t it = 0; it < samples; ++it) {
    // (a) Hat(I) maps to zero
    std::map<u64, RingElement> ee;
    for (int j = 0; j < 2; ++j) {
      RingElement g = I.gens.empty() ? S->R->zero_elem()
                                     : I.gens[rng() % I.gens.size()];
      std::vector<u64> c(S->R->rank);
      for (auto& v : c) v = rng() % S->R->mod;
      ee.emplace(rng() % S->N, S->R->mul(g, S->R->elem(std::move(c))));
    }
    ShearedWitt kx = s_make(S, witt_zero(S->rs.field, S->N), hat_make(S->R, ee));
    ShearedWitt im = to_quotient(kx);
    if (!(im == s_zero(SQ))) {
      rep.ok = false;
      rep.failures.push_back("Hat(I) element has nonzero image: " + show_sheared(kx));
    }

    // (b) random kernel element: lambda part must vanish, eta entries in I
    ShearedWitt x = s_random(S, rng);
    ShearedWitt xq = to_quotient(x);
    if (xq == s_zero(SQ)) {
      bool inside = witt_is_zero(x.lambda);
      for (const auto& [i, v] : x.eta.e) inside = inside && I.contains(v);
      if (!inside) {
        rep.ok = false;
        rep.failures.push_back("kernel element outside Hat(I): " + show_sheared(x));
      }
    }

    // (c) surjectivity: constructive lift of a random target
    ShearedWitt y = s_random(SQ, rng);
    WittVec lam_lift = witt_map(kQtokR, y.lambda);
    std::map<u64, RingElement> eta_lift;
    bool lift_ok = true;
    for (const auto& [i, v] : y.eta.e) {
      std::vector<u64> pre;
      if (!zk_solve_left(S->R->mod, S->R->rank, qr.quotient->rank, qr.projection.mat, v.c, pre)) {
        lift_ok = false;
        break;
      }
      eta_lift.emplace(i, S->R->elem(std::move(pre)));
    }
    if (!lift_ok) {
      rep.ok = false;
      rep.failures.push_back("no preimage for eta entry of " + show_sheared(y));
      continue;
    }
    ShearedWitt xl = s_make(S, std::move(lam_lift), hat_make(S->R, std::move(eta_lift)));
    if (!(to_quotient(xl) == y)) {
      rep.ok = false;
      rep.failures.push_back("lift does not map back to target: " + show_sheared(y));
    }
  }
  return rep;
}

SampleReport check_Vn_Wn_sequence(const SRingPtr& S, std::size_t n, std::size_t samples,
                                  u64 seed) {
  SampleReport rep;
  rep.check = "Vn-Wn-sequence";
  rep.seed = seed;
  rep.samples = samples;
  rep.params = {{"ring", S->R->name}, {"N", S->N}, {"B", S->B}, {"n", n}};
  std::mt19937_64 rng(seed);
  if (n > S->N) throw std::invalid_argument("check_Vn_Wn_sequence: n > precision");
  std::size_t L = S->work_len();

  auto vtn = [&](const ShearedWitt& x) {
    ShearedWitt r = x;
    for (std::size_t i = 0; i < n; ++i) r = s_Vtilde(r);
    return r;
  };
  auto drop = [&](const ShearedWitt& x) { return witt_truncate(dense_rep(x, L), n); };

  WittVec u0L = u0_in(S->R, L);
  WittVec u0inv = witt_inv(u0L);

  for (std::size_t it = 0; it < samples; ++it) {
    ShearedWitt x = s_random(S, rng), y = s_random(S, rng);
    // injectivity of Vt^n up to the n top lambda components it pushes past
    // the precision cutoff
    if (vtn(x) == vtn(y) &&
        !(witt_truncate(x.lambda, S->N - n) == witt_truncate(y.lambda, S->N - n) &&
          x.eta == y.eta)) {
      rep.ok = false;
      rep.failures.push_back("Vt^n collision: " + show_sheared(x) + " vs " + show_sheared(y));
    }
    // Vt^n lands in the kernel of the n-component drop
    if (!witt_is_zero(drop(vtn(x)))) {
      rep.ok = false;
      rep.failures.push_back("Vt^n image visible in W_n: " + show_sheared(x));
    }
    // surjectivity of the drop: lift a random element of W_n(R) greedily.
    // Adding Vt^i(z) leaves components < i untouched and adds exactly
    // u0_0^{1+p+...+p^(i-1)} * z_0 to component i, so each component is
    // matched in turn by one canonical lift.
    WittVec w{S->R, {}};
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<u64> c(S->R->rank);
      for (auto& v : c) v = rng() % S->R->mod;
      w.c.push_back(S->R->elem(std::move(c)));
    }
    RingElement u0c = u0_in(S->R, 1).c[0];
    ShearedWitt lift = s_teich(S, w.c[0]);
    for (std::size_t i = 1; i < n; ++i) {
      WittVec cur = witt_truncate(dense_rep(lift, L), n);
      RingElement di = S->R->sub(w.c[i], cur.c[i]);
      u64 exp = (upow_checked(S->R->p, i) - 1) / (S->R->p - 1);
      RingElement uc = S->R->pow(u0c, exp);
      ShearedWitt z = s_teich(S, S->R->mul(S->R->inv(uc), di));
      for (std::size_t j = 0; j < i; ++j) z = s_Vtilde(z);
      lift = s_add(lift, z);
    }
    if (!(drop(lift) == w)) {
      rep.ok = false;
      rep.failures.push_back("drop(lift) != target in W_n");
    }
    // kernel c image(Vt^n): constructive Vt-preimages by dividing out u0
    // and shifting, n times
    ShearedWitt kx = vtn(x);
    WittVec cur = dense_rep(kx, L);
    bool pre_ok = true;
    for (std::size_t i = 0; i < n && pre_ok; ++i) {
      if (!S->R->is_zero(cur.c[0])) {
        pre_ok = false;
        break;
      }
      WittVec shifted{S->R, {cur.c.begin() + 1, cur.c.end()}};  // V-preimage candidate
      WittVec u0s = witt_truncate(u0inv, shifted.len());
      cur = witt_mul(u0s, shifted);
    }
    if (!pre_ok) {
      rep.ok = false;
      rep.failures.push_back("kernel element with no Vt-preimage chain");
      continue;
    }
    ShearedWitt z = split_impl(S, cur, cur.len());  // top components are unknown, not zero
    // re-apply and compare at precision N (the shift chain lost top data)
    WittVec lhs = witt_truncate(dense_rep(vtn(z), L), S->N);
    WittVec rhs = witt_truncate(dense_rep(kx, L), S->N);
    if (!(lhs == rhs)) {
      rep.ok = false;
      rep.failures.push_back("Vt^n(preimage) != kernel element at precision");
    }
  }
  return rep;
}

SampleReport check_f_invariants(const SRingPtr& S, std::size_t samples, u64 seed) {
  SampleReport rep;
  rep.check = "f-invariants";
  rep.seed = seed;
  rep.samples = samples;
  rep.params = {{"ring", S->R->name}, {"N", S->N}, {"B", S->B}};
  std::mt19937_64 rng(seed);
  u64 p = S->R->p;
  u64 order = upow_checked(p, S->N);

  // multiples of 1 are p^N distinct F-invariants, i.e. a cyclic subgroup
  std::set<std::string> seen;
  ShearedWitt one = s_one(S), acc = s_zero(S);
  for (u64 m = 0; m < order; ++m) {
    if (!(s_F(acc) == acc)) {
      rep.ok = false;
      rep.failures.push_back("multiple of 1 not F-invariant: m=" + std::to_string(m));
    }
    if (!seen.insert(show_sheared(acc)).second) {
      rep.ok = false;
      rep.failures.push_back("multiples of 1 collide before p^N: m=" + std::to_string(m));
    }
    acc = s_add(acc, one);
  }
  if (!(acc == s_zero(S))) {
    rep.ok = false;
    rep.failures.push_back("p^N * 1 != 0 at precision");
  }

  // completeness: any F-invariant has lambda components in F_p and eta = 0,
  // so the fixed set is exactly the p^N multiples of 1 counted above.
  // Exhaustive over lambda with prime-field components; sampled eta != 0.
  const auto& k = S->rs.field;
  for (u64 code = 0; code < order; ++code) {
    u64 t = code;
    WittVec lam{k, {}};
    for (std::size_t i = 0; i < S->N; ++i) {
      lam.c.push_back(k->from_int(i64(t % p)));
      t /= p;
    }
    ShearedWitt x = s_make(S, std::move(lam), HatWittVec{S->R, {}});
    bool fixed = s_F(x) == x;
    bool counted = seen.count(show_sheared(x)) > 0;
    if (fixed != counted) {
      rep.ok = false;
      rep.failures.push_back("prime-field lambda fixed-set mismatch at code " +
                             std::to_string(code));
    }
  }
  for (std::size_t it = 0; it < samples; ++it) {
    ShearedWitt x = s_random(S, rng);
    if (s_F(x) == x && !seen.count(show_sheared(x))) {
      rep.ok = false;
      rep.failures.push_back("unexpected F-invariant: " + show_sheared(x));
    }
  }
  return rep;
}

SampleReport check_pi_kernel(const SRingPtr& S, std::size_t samples, u64 seed) {
  SampleReport rep;
  rep.check = "pi-kernel";
  rep.seed = seed;
  rep.samples = samples;
  rep.params = {{"ring", S->R->name}, {"N", S->N}, {"B", S->B}};
  std::mt19937_64 rng(seed);
  std::size_t L = S->work_len();
  WittVec u0inv = witt_inv(u0_in(S->R, L));

  for (std::size_t it = 0; it < samples; ++it) {
    ShearedWitt x = s_random(S, rng), y = s_random(S, rng);
    if (!(s_pi(s_add(x, y)) == S->R->add(s_pi(x), s_pi(y))) ||
        !(s_pi(s_mul(x, y)) == S->R->mul(s_pi(x), s_pi(y)))) {
      rep.ok = false;
      rep.failures.push_back("pi is not a ring hom on sample");
    }
    // image of Vt has pi = 0
    if (!S->R->is_zero(s_pi(s_Vtilde(x)))) {
      rep.ok = false;
      rep.failures.push_back("pi(Vt(x)) != 0");
    }
    // pi(z) = 0 => z = Vt(w) constructively
    ShearedWitt z = s_sub(x, s_teich(S, s_pi(x)));
    if (!S->R->is_zero(s_pi(z))) {
      rep.ok = false;
      rep.failures.push_back("constructed kernel element has pi != 0");
      continue;
    }
    WittVec d = dense_rep(z, L);
    WittVec shifted{S->R, {d.c.begin() + 1, d.c.end()}};
    WittVec w = witt_mul(witt_truncate(u0inv, shifted.len()), shifted);
    ShearedWitt wz = split_impl(S, w, w.len());  // top components are unknown, not zero
    WittVec lhs = witt_truncate(dense_rep(s_Vtilde(wz), L), S->N);
    WittVec rhs = witt_truncate(d, S->N);
    if (!(lhs == rhs)) {
      rep.ok = false;
      rep.failures.push_back("Vt-preimage reconstruction failed");
    }
  }
  return rep;
}

}  // namespace wittlab
