#pragma once
// Concrete frames over finite rings: truncated and precision-truncated Witt
// frames, sheared Witt frames, and relative frames for square-zero divided
// power thickenings, together with the frame homomorphisms between them and
// the leveled ideals that drive morphism lifting.

#include "wittlab/frames.hpp"

namespace wittlab {

// --- divided power ideals -----------------------------------------------------

struct PdIdeal {
  RingPtr Rp;      // the thickening R'
  RingIdeal ideal; // the kernel, with gamma_m(x) in the ideal for m >= 1
  // gamma(m, x) for m >= 2 (gamma_0 = 1 and gamma_1 = id are implicit)
  std::function<RingElement(u64, const RingElement&)> gamma;
  bool compat_canonical = true;

  // default divided powers on a square-zero ideal with p*ideal = 0:
  // gamma_m = 0 for m >= 2; validates the pd axioms exhaustively
  static PdIdeal make(const RingPtr& Rp, RingIdeal ideal);
  static PdIdeal make_with_gamma(const RingPtr& Rp, RingIdeal ideal,
                                 std::function<RingElement(u64, const RingElement&)> gamma);

  RingElement gamma_at(u64 m, const RingElement& x) const;
};

// checks gamma_m(x) in the ideal, gamma additivity/scaling/product axioms
// exhaustively over the ideal (or on samples when the ideal is large);
// throws std::invalid_argument on failure
void validate_pd(const PdIdeal& I, std::size_t max_enumerate = 4096);

// --- divided Witt coordinates --------------------------------------------------

// Coefficients c_{n,i} = p^{i-n} * (p^{n-i})! stored as (p-adic valuation,
// unit mod p); the valuation is nonnegative and c_{n,n} = 1.
struct DividedWittCoords {
  u64 p = 0;
  std::size_t len = 0;
  std::vector<std::vector<std::pair<u64, u64>>> c;  // c[n][i] = (val, unit mod p)

  static DividedWittCoords make(u64 p, std::size_t len);
  // c_{n,i} reduced into a char-p ring: zero unless the valuation vanishes
  u64 c_mod_p(std::size_t n, std::size_t i) const;
};

// coordinates of a vector with entries in the pd ideal:
//   out_n = sum_{i<=n} c_{n,i} * gamma_{p^(n-i)}(x_i)
std::vector<RingElement> wprime(const DividedWittCoords& C, const PdIdeal& I, const WittVec& x);
// triangular inverse; wprime(wprime_inv(b)) == b
WittVec wprime_inv(const DividedWittCoords& C, const PdIdeal& I,
                   const std::vector<RingElement>& b);
// the pd embedding of a single ideal element: component 0 equals a, higher
// components solved from wprime_n = 0
WittVec pd_embed(const DividedWittCoords& C, const PdIdeal& I, const RingElement& a,
                 std::size_t len);

// --- concrete frame classes ----------------------------------------------------

class WittFrame : public Frame {
 public:
  RingPtr carrier;        // coefficient ring of the vectors (R' for relative)
  std::size_t n = 0;      // carrier length
  bool truncated = true;  // "witt-n" semantics vs "witt-prec" stand-in for W(R)

  A0Elem wrap(WittVec w) const;
  const WittVec& unwrap(const A0Elem& x) const;

  A0Elem zero0() const override;
  A0Elem one0() const override;
  A0Elem from_int0(i64 v) const override;
  A0Elem add0(const A0Elem& x, const A0Elem& y) const override;
  A0Elem neg0(const A0Elem& x) const override;
  A0Elem mul0(const A0Elem& x, const A0Elem& y) const override;
  bool eq0(const A0Elem& x, const A0Elem& y) const override;
  bool is_unit0(const A0Elem& x) const override;
  A0Elem inv0(const A0Elem& x) const override;
  A1Elem zero1() const override;
  A1Elem add1(const A1Elem& x, const A1Elem& y) const override;
  A1Elem neg1(const A1Elem& x) const override;
  bool eq1(const A1Elem& x, const A1Elem& y) const override;
  A1Elem act(const A0Elem& a, const A1Elem& m) const override;
  A0Elem tau(const A1Elem& x) const override;
  A0Elem sigma0(const A0Elem& x) const override;
  A0Elem sigma1(const A1Elem& x) const override;
  A0Elem d() const override;
  RingElement project(const A0Elem& x) const override;
  A1Elem tau_preimage(const A0Elem& x) const override;
  A0Elem random0(std::mt19937_64& rng) const override;
  A1Elem random1(std::mt19937_64& rng) const override;
  std::string show0(const A0Elem& x) const override;
  nlohmann::json a0_to_json(const A0Elem& x) const override;
  A0Elem a0_from_json(const nlohmann::json& j) const override;
};

class ShearedFrame : public Frame {
 public:
  SRingPtr S;

  A0Elem wrap(ShearedWitt w) const;
  const ShearedWitt& unwrap(const A0Elem& x) const;

  A0Elem zero0() const override;
  A0Elem one0() const override;
  A0Elem from_int0(i64 v) const override;
  A0Elem add0(const A0Elem& x, const A0Elem& y) const override;
  A0Elem neg0(const A0Elem& x) const override;
  A0Elem mul0(const A0Elem& x, const A0Elem& y) const override;
  // equality at the working precision N (dense embeddings compared at N)
  bool eq0(const A0Elem& x, const A0Elem& y) const override;
  bool is_unit0(const A0Elem& x) const override;
  A0Elem inv0(const A0Elem& x) const override;
  A1Elem zero1() const override;
  A1Elem add1(const A1Elem& x, const A1Elem& y) const override;
  A1Elem neg1(const A1Elem& x) const override;
  bool eq1(const A1Elem& x, const A1Elem& y) const override;
  A1Elem act(const A0Elem& a, const A1Elem& m) const override;
  A0Elem tau(const A1Elem& x) const override;
  A0Elem sigma0(const A0Elem& x) const override;
  A0Elem sigma1(const A1Elem& x) const override;
  A0Elem d() const override;
  RingElement project(const A0Elem& x) const override;
  A1Elem tau_preimage(const A0Elem& x) const override;
  A0Elem random0(std::mt19937_64& rng) const override;
  A1Elem random1(std::mt19937_64& rng) const override;
  std::string show0(const A0Elem& x) const override;
  nlohmann::json a0_to_json(const A0Elem& x) const override;
  A0Elem a0_from_json(const nlohmann::json& j) const override;
};

// Relative frames: same degree-0 carrier as the absolute frame over R', with
// the degree-1 carrier enlarged by the pd ideal (aux coordinate of A1Elem);
// tau adds the pd embedding of the aux part, sigma1 kills it, and the base
// ring is R = R'/ideal.
class RelativeWittFrame : public WittFrame {
 public:
  PdIdeal I;
  RingHom quot;  // R' -> R
  DividedWittCoords coords;

  A1Elem zero1() const override;
  A1Elem add1(const A1Elem& x, const A1Elem& y) const override;
  A1Elem neg1(const A1Elem& x) const override;
  bool eq1(const A1Elem& x, const A1Elem& y) const override;
  A1Elem act(const A0Elem& a, const A1Elem& m) const override;
  A0Elem tau(const A1Elem& x) const override;
  A0Elem sigma1(const A1Elem& x) const override;
  RingElement project(const A0Elem& x) const override;
  A1Elem tau_preimage(const A0Elem& x) const override;
  A1Elem random1(std::mt19937_64& rng) const override;
};

class RelativeShearedFrame : public ShearedFrame {
 public:
  PdIdeal I;
  RingHom quot;
  DividedWittCoords coords;

  A1Elem zero1() const override;
  A1Elem add1(const A1Elem& x, const A1Elem& y) const override;
  A1Elem neg1(const A1Elem& x) const override;
  bool eq1(const A1Elem& x, const A1Elem& y) const override;
  A1Elem act(const A0Elem& a, const A1Elem& m) const override;
  A0Elem tau(const A1Elem& x) const override;
  A0Elem sigma1(const A1Elem& x) const override;
  RingElement project(const A0Elem& x) const override;
  A1Elem tau_preimage(const A0Elem& x) const override;
  A1Elem random1(std::mt19937_64& rng) const override;
};

// --- constructors ---------------------------------------------------------------

// A0 = W_n(R) over an F_p-algebra, tau = V, sigma0 = F, sigma1 = id, d = p.
FramePtr truncated_witt_frame(const RingPtr& R, std::size_t n);
// identical carrier used as a finite-precision stand-in for W(R)
FramePtr witt_prec_frame(const RingPtr& R, std::size_t prec);
// A0 = sheared Witt ring at (N, B), tau = modified Verschiebung, d = ptilde
FramePtr sheared_frame(const RingPtr& R, std::size_t N, std::size_t B = 0);
// thickening R' -> R'/ideal; A1 gains the ideal coordinate
FramePtr relative_witt_frame(const PdIdeal& I, std::size_t prec);
FramePtr relative_sheared_frame(const PdIdeal& I, std::size_t N, std::size_t B = 0);

// --- frame homomorphisms ---------------------------------------------------------

// strict surjection from a relative frame onto the matching absolute frame
// over the quotient base R; for the sheared flavor the map is exact at the
// working precision
FrameHom relative_quotient_hom(const FramePtr& rel);

// inclusion of the absolute frame over the thickened ring R' into the
// relative frame: identity on degree 0, x -> (x, 0) in degree 1, u = 1
FrameHom relative_inclusion_hom(const FramePtr& rel);

// the embedding of the sheared frame into the Witt frame over the same ring,
// with unit u0; alpha satisfies alpha = u0 * F(alpha) at precision
struct EmbedHom {
  FrameHom hom;
  A0Elem alpha;  // element of the Witt frame
};
EmbedHom frame_hom_c(const FramePtr& shearedF, const FramePtr& wittF);

// --- leveled ideals ----------------------------------------------------------------

// K = vectors with entries in the pd ideal; sigma_dot acts as the coordinate
// shift (in divided coordinates), nilpotent within the carrier bound
LeveledIdeal relative_leveled_ideal(const FramePtr& rel);

}  // namespace wittlab
