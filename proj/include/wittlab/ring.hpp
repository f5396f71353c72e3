#pragma once
// Finite commutative Z/p^k-algebras presented by structure constants, with
// ideals (Howell bases), quotients, nilradical, Frobenius, and the ring
// section of the residue field for Artinian local F_p-algebras.

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "wittlab/linalg.hpp"
#include "wittlab/zmod.hpp"

namespace wittlab {

class FpkAlgebra;
using RingPtr = std::shared_ptr<const FpkAlgebra>;

// A torsion-free lift of the algebra: same basis, integer structure constants
// that are associative/commutative/unital over Z and reduce to the algebra's
// structure constants mod p^k.  Lets Witt arithmetic run by exact ghost
// computations at any modulus p^K instead of via universal polynomials.
struct IntegralModel {
  std::vector<i64> sc;   // rank^3
  std::vector<i64> one;  // rank
};

struct RingElement {
  RingPtr ring;
  std::vector<u64> c;

  bool operator==(const RingElement& o) const { return c == o.c; }
  bool operator!=(const RingElement& o) const { return c != o.c; }
};

class FpkAlgebra : public std::enable_shared_from_this<FpkAlgebra> {
 public:
  u64 p = 0, k = 0, mod = 0;
  std::size_t rank = 0;
  std::vector<std::string> labels;
  std::vector<u64> sc;  // sc[(i*rank + j)*rank + m] = coord m of e_i * e_j
  std::vector<u64> one_coords;
  std::optional<IntegralModel> model;
  std::string name;  // display handle, not part of structural identity

  // Constructs and verifies commutativity, associativity and the unit law on
  // all basis tuples; throws std::invalid_argument on violation.
  static RingPtr make(u64 p, u64 k, std::vector<std::string> labels, std::vector<u64> sc,
                      std::vector<u64> one, std::string name = "");

  static RingPtr make_zmod(u64 p, u64 k);
  // F_{p^d} = F_p[a]/(f), f monic irreducible given by coefficients
  // f = x^d + f[d-1] x^{d-1} + ... + f[0]; irreducibility is verified.
  static RingPtr make_field(u64 p, const std::vector<u64>& f, const std::string& var = "a");
  // R[x]/(x^m)
  static RingPtr extend_nilpotent(const RingPtr& R, u64 m, const std::string& var = "t");

  // --- element ops ---
  RingElement zero_elem() const;
  RingElement one_elem() const;
  RingElement basis_elem(std::size_t i) const;
  RingElement from_int(i64 n) const;
  RingElement elem(std::vector<u64> coords) const;
  RingElement add(const RingElement& x, const RingElement& y) const;
  RingElement sub(const RingElement& x, const RingElement& y) const;
  RingElement neg(const RingElement& x) const;
  RingElement mul(const RingElement& x, const RingElement& y) const;
  RingElement scal(u64 a, const RingElement& x) const;
  RingElement pow(const RingElement& x, u64 e) const;
  bool is_zero(const RingElement& x) const;
  bool is_unit(const RingElement& x) const;
  RingElement inv(const RingElement& x) const;  // throws if not a unit
  bool is_nilpotent(const RingElement& x) const;

  bool is_fp_algebra() const { return k == 1; }
  bigint card() const;
  // element with index i in the lexicographic enumeration, i < card()
  RingElement elem_by_index(bigint i) const;

  std::string show(const RingElement& x) const;
  std::string digest() const;  // structural identity string

  nlohmann::json to_json() const;
  static RingPtr from_json(const nlohmann::json& j);

  bool same_as(const FpkAlgebra& other) const;

 private:
  void verify_axioms() const;
  void infer_model();
};

// Verified ring homomorphism between algebras with the same p (k may drop).
// The map is Z-linear on coordinates: x -> lift(x) * mat, reduced mod dst.
struct RingHom {
  RingPtr src, dst;
  std::vector<u64> mat;  // src.rank x dst.rank, row-major, entries mod dst.mod

  RingElement apply(const RingElement& x) const;
  // exhaustive on basis pairs + unit; throws on failure
  void verify() const;
  static RingHom identity(const RingPtr& r);
  RingHom compose(const RingHom& then) const;  // this followed by then
};

struct RingIdeal {
  RingPtr ring;
  std::vector<RingElement> gens;
  ZkMat basis;  // Howell form of the spanned ideal

  static RingIdeal make(const RingPtr& R, std::vector<RingElement> gens);
  bool contains(const RingElement& x) const;
  bigint span_size() const { return howell_span_size(basis); }
  bool is_nilpotent_ideal() const;
};

RingIdeal nilradical(const RingPtr& R);

struct QuotientResult {
  RingPtr quotient;
  RingHom projection;
};
// Throws if the quotient is not free over Z/p^k' (cannot be presented here).
QuotientResult make_quotient(const RingPtr& R, const RingIdeal& I);

struct ResidueSection {
  RingPtr field;      // k = R/Nil(R)
  RingHom projection; // R -> k
  RingHom section;    // k -> R, the unique ring section
};
// R must be an Artinian local F_p-algebra; throws otherwise.
ResidueSection residue_section(const RingPtr& R);

// x -> x^p on an F_p-algebra, tabulated on the basis and verified.
RingHom frobenius_endo(const RingPtr& R);

// Solve y * M = b over Z/p^k where M is given row-major (rows x cols).
// Returns false if no solution.
bool zk_solve_left(u64 mod, std::size_t rows, std::size_t cols, const std::vector<u64>& M,
                   const std::vector<u64>& b, std::vector<u64>& y);

}  // namespace wittlab
