#pragma once
// Sheared Witt vectors over Artinian local F_p-algebras with perfect residue
// field (and perfect fields as the degenerate case), in the split
// representation W(k) + Hat-part with nilpotent entries.  Elements store a
// length-N Witt vector over the residue field k and a sparse vector over R
// whose entries lie in the maximal ideal; the embedding into W(R) is
// W(section)(lambda) + eta, and all arithmetic goes through a dense bridge at
// the support bound plus a carry margin, then splits back.

#include <functional>
#include <random>

#include "wittlab/witt.hpp"

namespace wittlab {

struct ShearedWittRing;
using SRingPtr = std::shared_ptr<const ShearedWittRing>;

struct ShearedWittRing {
  RingPtr R;
  ResidueSection rs;   // k, projection, multiplicative section
  std::size_t N = 0;   // precision of the W(k)-part
  std::size_t B = 0;   // support bound for the sparse part, B >= N
  std::size_t margin = 0;  // dense carry margin for R
  bool perfect = false;    // R is itself a field (sparse part always 0)

  // validates R (Artinian local F_p-algebra via residue_section) and B >= N
  static SRingPtr make(const RingPtr& R, std::size_t N, std::size_t B);
  std::size_t work_len() const { return B + margin; }
};

struct ShearedWitt {
  SRingPtr s;
  WittVec lambda;   // length N over k
  HatWittVec eta;   // over R, entries in Nil(R), support < B

  bool operator==(const ShearedWitt& o) const { return lambda == o.lambda && eta == o.eta; }
  bool operator!=(const ShearedWitt& o) const { return !(*this == o); }
};

ShearedWitt s_make(const SRingPtr& S, WittVec lambda, HatWittVec eta);
ShearedWitt s_zero(const SRingPtr& S);
ShearedWitt s_one(const SRingPtr& S);
ShearedWitt s_from_int(const SRingPtr& S, i64 v);
// Teichmuller lift of any a in R: splits as [residue(a)] + nilpotent part
ShearedWitt s_teich(const SRingPtr& S, const RingElement& a);

// W(section)(lambda) + eta at length L; requires L <= min(N, B) per the
// external contract (internal ops use the zero-extended representative)
WittVec s_embed(const ShearedWitt& x, std::size_t L);
// the zero-extended dense representative at any length >= the eta support;
// exact below N in the lambda direction, exact everywhere in the sparse part
WittVec s_rep(const ShearedWitt& x, std::size_t L);
// splits a dense vector (zero-extended beyond its length); throws
// std::invalid_argument("not representably sheared...") on support overflow
ShearedWitt s_split(const SRingPtr& S, const WittVec& w);

ShearedWitt s_add(const ShearedWitt& x, const ShearedWitt& y);
ShearedWitt s_sub(const ShearedWitt& x, const ShearedWitt& y);
ShearedWitt s_neg(const ShearedWitt& x);
ShearedWitt s_mul(const ShearedWitt& x, const ShearedWitt& y);
ShearedWitt s_F(const ShearedWitt& x);
ShearedWitt s_Vtilde(const ShearedWitt& x);
bool s_is_unit(const ShearedWitt& x);
ShearedWitt s_inv(const ShearedWitt& x);
// projection to R (first component of the embedding); a ring homomorphism
RingElement s_pi(const ShearedWitt& x);

// seeded random element (lambda uniform, eta with a few nilpotent entries)
ShearedWitt s_random(const SRingPtr& S, std::mt19937_64& rng);

// --- pointwise exact-sequence verifiers -----------------------------------

struct SampleReport {
  std::string check;
  bool ok = true;
  u64 seed = 0;
  std::size_t samples = 0;
  nlohmann::json params;
  std::vector<std::string> failures;
  nlohmann::json to_json() const;
};

// 0 -> Hat(I) -> sW(R) -> sW(R/I): kernel membership both directions and
// constructive surjectivity at the shared precision
SampleReport check_kernel_sequence(const SRingPtr& S, const RingIdeal& I, std::size_t samples,
                                   u64 seed);

// 0 -> sW --Vt^n--> sW -> W_n -> 0 on points: Vt^n injectivity on samples,
// surjectivity of the n-component drop with constructive lifts, and kernel =
// image(Vt^n) with constructive Vt-preimages
SampleReport check_Vn_Wn_sequence(const SRingPtr& S, std::size_t n, std::size_t samples,
                                  u64 seed);

// F-invariants at precision N: exactly p^N elements, cyclic generated by 1
SampleReport check_f_invariants(const SRingPtr& S, std::size_t samples, u64 seed);

// projection pi is a ring hom and ker(pi) = image(Vt) on samples
SampleReport check_pi_kernel(const SRingPtr& S, std::size_t samples, u64 seed);

}  // namespace wittlab
