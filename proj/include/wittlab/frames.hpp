#pragma once
// Frames as abstract coefficient structures: a degree-0 carrier A0 with exact
// ring ops, a degree-1 carrier A1 with tau: A1 -> A0, an A0-module action, a
// Frobenius lift sigma0 on A0, a divided map sigma1: A1 -> A0, and a
// distinguished element d with sigma0(tau(x)) = d * sigma1(x).  Windows are
// stored in normal representation (r0, r1, Psi) with a cached inverse; all
// operations on windows are matrix computations over A0/A1.

#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <variant>

#include <json.hpp>

#include "wittlab/sheared.hpp"

namespace wittlab {

// Degree-0 carrier element: a truncated dense Witt vector or a sheared one.
struct A0Elem {
  std::variant<WittVec, ShearedWitt> v;
};

// Degree-1 carrier element: the main part (same shape as A0, with the module
// action restricted along the Frobenius), plus an optional ideal coordinate
// used by the relative frames.
struct A1Elem {
  A0Elem main;
  std::optional<RingElement> aux;
};

class Frame;
using FramePtr = std::shared_ptr<const Frame>;

class Frame : public std::enable_shared_from_this<Frame> {
 public:
  virtual ~Frame() = default;

  std::string kind;  // "witt-n", "witt-prec", "sheared", "rel-witt", "rel-sheared"
  std::string id;    // display handle for reports
  RingPtr base;      // R = A0 / tau(A1), with project() the quotient map
  u64 p = 0;

  // --- A0 ring ops (exact) ---
  virtual A0Elem zero0() const = 0;
  virtual A0Elem one0() const = 0;
  virtual A0Elem from_int0(i64 n) const = 0;
  virtual A0Elem add0(const A0Elem& x, const A0Elem& y) const = 0;
  virtual A0Elem neg0(const A0Elem& x) const = 0;
  virtual A0Elem mul0(const A0Elem& x, const A0Elem& y) const = 0;
  virtual bool eq0(const A0Elem& x, const A0Elem& y) const = 0;
  virtual bool is_unit0(const A0Elem& x) const = 0;
  virtual A0Elem inv0(const A0Elem& x) const = 0;
  A0Elem sub0(const A0Elem& x, const A0Elem& y) const { return add0(x, neg0(y)); }
  bool is_zero0(const A0Elem& x) const { return eq0(x, zero0()); }

  // --- A1 module ops ---
  virtual A1Elem zero1() const = 0;
  virtual A1Elem add1(const A1Elem& x, const A1Elem& y) const = 0;
  virtual A1Elem neg1(const A1Elem& x) const = 0;
  virtual bool eq1(const A1Elem& x, const A1Elem& y) const = 0;
  // module action A0 x A1 -> A1
  virtual A1Elem act(const A0Elem& a, const A1Elem& m) const = 0;

  // --- structure maps ---
  virtual A0Elem tau(const A1Elem& x) const = 0;
  virtual A0Elem sigma0(const A0Elem& x) const = 0;
  virtual A0Elem sigma1(const A1Elem& x) const = 0;
  virtual A0Elem d() const = 0;
  // projection A0 -> R; tau(A1) is its kernel
  virtual RingElement project(const A0Elem& x) const = 0;
  // section of tau on its image: defined for x with project(x) = 0;
  // tau(tau_preimage(x)) == x.  Throws if x is not in the filtration ideal.
  virtual A1Elem tau_preimage(const A0Elem& x) const = 0;

  // --- sampling and encoding ---
  virtual A0Elem random0(std::mt19937_64& rng) const = 0;
  virtual A1Elem random1(std::mt19937_64& rng) const = 0;
  virtual std::string show0(const A0Elem& x) const = 0;
  virtual nlohmann::json a0_to_json(const A0Elem& x) const = 0;
  virtual A0Elem a0_from_json(const nlohmann::json& j) const = 0;
};

// Verifies sigma0(tau(x)) = d * sigma1(x) and sigma0 = Frobenius mod p on
// random samples; throws std::logic_error on failure.
void verify_frame_axioms(const FramePtr& F, std::size_t samples, u64 seed);

// --- matrices over the carriers -------------------------------------------

struct Mat0 {
  FramePtr F;
  std::size_t rows = 0, cols = 0;
  std::vector<A0Elem> e;  // row-major

  A0Elem& at(std::size_t i, std::size_t j) { return e[i * cols + j]; }
  const A0Elem& at(std::size_t i, std::size_t j) const { return e[i * cols + j]; }
};

struct Mat1 {
  FramePtr F;
  std::size_t rows = 0, cols = 0;
  std::vector<A1Elem> e;

  A1Elem& at(std::size_t i, std::size_t j) { return e[i * cols + j]; }
  const A1Elem& at(std::size_t i, std::size_t j) const { return e[i * cols + j]; }
};

Mat0 m0_zero(const FramePtr& F, std::size_t r, std::size_t c);
Mat0 m0_identity(const FramePtr& F, std::size_t n);
Mat0 m0_add(const Mat0& a, const Mat0& b);
Mat0 m0_sub(const Mat0& a, const Mat0& b);
Mat0 m0_neg(const Mat0& a);
Mat0 m0_mul(const Mat0& a, const Mat0& b);
Mat0 m0_scale(const A0Elem& s, const Mat0& a);
bool m0_eq(const Mat0& a, const Mat0& b);
bool m0_is_zero(const Mat0& a);
Mat0 m0_map(const Mat0& a, const std::function<A0Elem(const A0Elem&)>& f);
// Gauss inversion with unit pivots (A0 is local in all instances);
// throws std::invalid_argument if no unit pivot is available.
Mat0 m0_inv(const Mat0& a);
Mat0 m0_random(const FramePtr& F, std::size_t r, std::size_t c, std::mt19937_64& rng);

Mat1 m1_zero(const FramePtr& F, std::size_t r, std::size_t c);
Mat1 m1_add(const Mat1& a, const Mat1& b);
Mat1 m1_neg(const Mat1& a);
bool m1_eq(const Mat1& a, const Mat1& b);
// entrywise tau and sigma1
Mat0 m0_tau(const Mat1& a);
Mat0 m0_sigma1(const Mat1& a);
// products mixing the carriers through the module action
Mat1 m1_act_left(const Mat0& a, const Mat1& b);   // (a*b)_ij = sum_k a_ik . b_kj
Mat1 m1_act_right(const Mat1& a, const Mat0& b);  // (a*b)_ij = sum_k b_kj . a_ik
Mat1 m1_random(const FramePtr& F, std::size_t r, std::size_t c, std::mt19937_64& rng);

// --- windows ----------------------------------------------------------------

struct Window {
  FramePtr F;
  std::size_t r0 = 0, r1 = 0;  // height = r0 + r1, dimension = r0
  Mat0 psi, psi_inv;

  std::size_t height() const { return r0 + r1; }
  std::size_t dim() const { return r0; }
};

// Validates invertibility (computes and caches the inverse).
Window make_window(const FramePtr& F, std::size_t r0, std::size_t r1, Mat0 psi);
Window unit_window(const FramePtr& F);   // (1, 0, (1))
Window twist_window(const FramePtr& F);  // (0, 1, (1))
Window direct_sum(const Window& a, const Window& b);
nlohmann::json window_to_json(const Window& w);
Window window_from_json(const FramePtr& F, const nlohmann::json& j);

// Morphism in block form.  For f : M -> M' the blocks have shapes
//   a : r0' x r0 over A0,  b : r0' x r1 over A1,
//   c : r1' x r0 over A0,  e : r1' x r1 over A0,
// acting on column coordinates.
struct WindowMorphism {
  const Window* src = nullptr;
  const Window* dst = nullptr;
  Mat0 a, c, e;
  Mat1 b;
};

struct MorphismCheck {
  bool ok = false;
  Mat0 residual;  // [[a,tau b],[c,e]] Psi - Psi' [[s0 a, s1 b],[d s0 c, s0 e]]
};
MorphismCheck is_morphism(const WindowMorphism& f);
WindowMorphism identity_morphism(const Window& m);
// g after f; shapes must chain
WindowMorphism compose(const WindowMorphism& g, const WindowMorphism& f);

// dual: ranks swapped, structure matrix = block-swapped transpose of psi^{-1}
Window dual_window(const Window& m);

// --- frame homomorphisms and base change ------------------------------------

struct FrameHom {
  FramePtr src, dst;
  std::function<A0Elem(const A0Elem&)> g0;
  std::function<A1Elem(const A1Elem&)> g1;
  A0Elem u;  // unit with g0(d_src) = u * d_dst

  static FrameHom identity(const FramePtr& F);
  FrameHom compose_with(const FrameHom& then) const;  // this followed by then
};
// samples the defining relations; throws std::logic_error on failure
void verify_frame_hom(const FrameHom& h, std::size_t samples, u64 seed);
// psi_B = g0(psi) * diag(I_{r0}, u I_{r1})
Window base_change(const Window& m, const FrameHom& h);

// --- leveled ideals and morphism lifting ------------------------------------

// An ideal K of A0 on which tau has an inverse; sigma_dot = sigma1 o tau^{-1}
// restricted to K is nilpotent with certified bound nu.
struct LeveledIdeal {
  FramePtr F;
  std::function<A1Elem(const A0Elem&)> tau_inv_K;
  std::size_t nu = 0;
  std::function<bool(const A0Elem&)> contains;
  std::function<A0Elem(std::mt19937_64&)> sample;

  A0Elem sigma_dot(const A0Elem& k) const { return F->sigma1(tau_inv_K(k)); }
};

// Given windows m, m' over the frame and blocks (f0) of a morphism valid
// modulo K, returns the unique morphism lift.  The correction D solves
//   D = R0 + Psi' * diag(1, d) * sigma_dot(D) * diag(d, 1) * Psi^{-1},
// iterated exactly K.nu times (sigma_dot is nilpotent, so nu steps reach the
// fixed point).  R0 = (Psi' Y0 - X0 Psi) Psi^{-1} has entries in K.
WindowMorphism lift_morphism(const Window& m, const Window& mp, const WindowMorphism& f0,
                             const LeveledIdeal& K);

// --- Hodge filtration lifting ------------------------------------------------

// Inverse of the forgetful direction along a frame homomorphism A -> B that is
// the identity on the degree-0 carrier while the filtration of A is smaller
// (so base(A) is a quotient of base(B)).  Given a window n over B (the frame
// with the larger filtration) and an invertible matrix u over A0 whose
// reduction maps the standard degree-1 summand onto a lift of the Hodge
// filtration of n, returns the window over A determined by (n, u).
Window hodge_lift(const FramePtr& A, const Window& n, const Mat0& u);

// --- section complex ---------------------------------------------------------

// gamma(x1, x0) = Psi * (sigma1(x1), sigma0(x0)) - (tau(x1), x0) on column
// coordinates; the degree-1 carrier of the window is A1^{r0} x A0^{r1}.
std::vector<A0Elem> gamma_apply(const Window& m, const std::vector<A1Elem>& x1,
                                const std::vector<A0Elem>& x0);

}  // namespace wittlab
