#pragma once
// Truncated Witt vectors W_n(R) over finite Z/p^k-algebras: ring arithmetic,
// Frobenius, Verschiebung, Teichmuller lifts, the modified Verschiebung and
// its constants (u0, ptilde, alpha), divided powers on V-images, and sparse
// finitely-supported vectors with nilpotent entries.
//
// Two arithmetic routes:
//  - rings with an IntegralModel: exact ghost computation in the model reduced
//    mod p^(k+n), then triangular solve; fast, works at any length.
//  - otherwise: evaluation of the universal polynomials (WittPolyCache),
//    subject to the per-prime length caps.

#include <map>

#include "wittlab/ring.hpp"
#include "wittlab/wittpoly.hpp"

namespace wittlab {

struct WittVec {
  RingPtr ring;
  std::vector<RingElement> c;

  std::size_t len() const { return c.size(); }
  bool operator==(const WittVec& o) const;
  bool operator!=(const WittVec& o) const { return !(*this == o); }
};

WittVec witt_zero(const RingPtr& R, std::size_t n);
WittVec witt_one(const RingPtr& R, std::size_t n);
WittVec witt_from_int(const RingPtr& R, std::size_t n, i64 v);
WittVec teichmuller(const RingElement& a, std::size_t n);
bool witt_is_zero(const WittVec& x);

WittVec witt_add(const WittVec& x, const WittVec& y);
WittVec witt_sub(const WittVec& x, const WittVec& y);
WittVec witt_neg(const WittVec& x);
WittVec witt_mul(const WittVec& x, const WittVec& y);
WittVec witt_pow(const WittVec& x, u64 e);
// multiplicative inverse; x0 must be a unit of R (units of W_n(R) for local R)
WittVec witt_inv(const WittVec& x);
bool witt_is_unit(const WittVec& x);

// Frobenius: length n-1 in general; over F_p-algebras the componentwise
// p-power keeps length n.
WittVec frobenius_F(const WittVec& x);
WittVec verschiebung_V(const WittVec& x);  // truncated shift
WittVec witt_truncate(const WittVec& x, std::size_t n);

// componentwise functoriality W_n(f)
WittVec witt_map(const RingHom& f, const WittVec& x);
// canonical W_n(Z/p^K) -> W_n(R) along Z/p^K -> Z/p^k -> R (requires K >= k)
WittVec witt_int_to(const RingPtr& R, const WittVec& w);

// force the universal-polynomial route (oracle / cross-check)
WittVec witt_add_sym(const WittVec& x, const WittVec& y);
WittVec witt_mul_sym(const WittVec& x, const WittVec& y);
WittVec witt_neg_sym(const WittVec& x);
WittVec frobenius_F_sym(const WittVec& x);

// ghost components over Z, for rank-1 rings lifted coordinatewise (oracle)
std::vector<bigint> ghost_bigint(const WittVec& x);

// --- modified Verschiebung ---------------------------------------------------

struct WittConstants {
  u64 p = 0;
  std::size_t n = 0;  // precision
  RingPtr coeff;      // Z/p^K at a fixed internal precision K
  WittVec u0, alpha, ptilde;
};

// memoized; verifies V(u0) = p - [p], ptilde = p - [p^2] (p = 2), and
// alpha = u0 * F(alpha) at precision.
const WittConstants& witt_constants(u64 p, std::size_t n);

WittVec u0_in(const RingPtr& R, std::size_t n);
WittVec ptilde_in(const RingPtr& R, std::size_t n);
WittVec alpha_in(const RingPtr& R, std::size_t n);
// Vt(x) = V(u0 * x)
WittVec vtilde(const WittVec& x);

// gamma_m applied to Vt(y), given the preimage y; returns gamma_m(Vt(y)).
// gamma_p(Vt(y)) = (p^(p-2)/(p-1)!) * Vt(y^p); general m via p-power towers
// and factorial-unit corrections.
WittVec divided_gamma(u64 m, const WittVec& y);

// binomial coefficient mod p^k via Pascal's rule
u64 binom_mod(u64 n, u64 r, u64 mod);
// n! = p^v * u: returns (v, u mod `mod`) where mod is a p-power
std::pair<u64, u64> factorial_vu(u64 n, u64 p, u64 mod);

// --- sparse vectors with nilpotent entries ------------------------------------

struct HatWittVec {
  RingPtr ring;
  std::map<u64, RingElement> e;  // index -> nonzero nilpotent entry

  bool operator==(const HatWittVec& o) const { return e == o.e; }
  bool is_zero() const { return e.empty(); }
  // largest occupied index + 1, or 0 when empty
  u64 support_end() const { return e.empty() ? 0 : e.rbegin()->first + 1; }
  void normalize();  // drop zeros, verify nilpotency
};

HatWittVec hat_make(const RingPtr& R, std::map<u64, RingElement> entries);
HatWittVec hat_teich(const RingElement& a, u64 index = 0);
WittVec hat_to_dense(const HatWittVec& x, std::size_t L);
HatWittVec dense_to_hat(const WittVec& w);

HatWittVec hat_add(const HatWittVec& x, const HatWittVec& y);
HatWittVec hat_neg(const HatWittVec& x);
HatWittVec hat_sub(const HatWittVec& x, const HatWittVec& y);
// scalar action of a dense Witt vector; support bound is tracked internally
HatWittVec hat_scal(const WittVec& w, const HatWittVec& x);
HatWittVec hat_F(const HatWittVec& x);
HatWittVec hat_V(const HatWittVec& x);

// number of extra dense components needed to absorb carries of sums/products
// of vectors with nilpotent entries over R
std::size_t hat_carry_margin(const RingPtr& R);

}  // namespace wittlab
