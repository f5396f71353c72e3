#pragma once
// Exact linear algebra: Smith normal form over Z (with unimodular witnesses),
// Howell canonical form over Z/p^k, and finite-abelian-group homology of a
// two-term complex given by enumerated carriers.

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <functional>
#include <unordered_map>
#include <vector>

#include "wittlab/zmod.hpp"

namespace wittlab {

using bigint = boost::multiprecision::cpp_int;

struct IntMat {
  std::size_t rows = 0, cols = 0;
  std::vector<bigint> a;  // row-major
  IntMat() = default;
  IntMat(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c) {}
  bigint& at(std::size_t i, std::size_t j) { return a[i * cols + j]; }
  const bigint& at(std::size_t i, std::size_t j) const { return a[i * cols + j]; }
  static IntMat identity(std::size_t n);
};

IntMat mat_mul(const IntMat& x, const IntMat& y);

// U * A * V = S with U, V unimodular and S diagonal, d1 | d2 | ... | dr >= 0.
struct SmithResult {
  IntMat s, u, v;
};
SmithResult smith_normal_form(const IntMat& m);

// --- Z/p^k matrices -------------------------------------------------------

struct ZkMat {
  ZmodCtx ctx;
  std::size_t rows = 0, cols = 0;
  std::vector<u64> a;
  ZkMat() = default;
  ZkMat(ZmodCtx c, std::size_t r, std::size_t cc) : ctx(c), rows(r), cols(cc), a(r * cc, 0) {}
  u64& at(std::size_t i, std::size_t j) { return a[i * cols + j]; }
  u64 at(std::size_t i, std::size_t j) const { return a[i * cols + j]; }
};

// Howell canonical form of the row span.  The result's rows are a canonical
// generating set of the row module: membership and equality of row spans can
// be decided by reduction.  Zero rows are dropped.
ZkMat howell_form(const ZkMat& m);

// Reduce v against a Howell-form basis h; returns the canonical remainder.
// remainder == 0 iff v lies in the row span.
std::vector<u64> howell_reduce(const ZkMat& h, std::vector<u64> v);

// Solve x * h = v for h in Howell form (x over Z/p^k); returns false if v is
// not in the row span, else writes one solution.
bool howell_solve(const ZkMat& h, const std::vector<u64>& v, std::vector<u64>& x);

// Number of elements in the row span of a Howell-form matrix.
bigint howell_span_size(const ZkMat& h);

// --- finite abelian p-group homology --------------------------------------

// Elements are opaque encodings.  Orders are p-powers throughout.
using Enc = std::vector<u64>;

struct EncHash {
  std::size_t operator()(const Enc& e) const {
    std::size_t h = 1469598103934665603ull;
    for (u64 x : e) {
      h ^= std::size_t(x);
      h *= 1099511628211ull;
    }
    return h;
  }
};

struct AbGroup {
  u64 p = 0;
  std::vector<Enc> elems;  // all elements; elems[0] must be zero
  std::function<Enc(const Enc&, const Enc&)> add;
  std::function<Enc(const Enc&)> neg;

  std::size_t size() const { return elems.size(); }
  const Enc& zero() const { return elems[0]; }
};

// Invariant factors as exponents e1 >= e2 >= ... (group = prod Z/p^{e_i}),
// computed from the multiset of element orders.
std::vector<u64> invariants_from_orders(u64 p, const std::vector<u64>& order_of_elem);

struct HomologyBudgetError : std::runtime_error {
  std::size_t needed;
  explicit HomologyBudgetError(std::size_t n)
      : std::runtime_error("carrier enumeration exceeds budget (needs " + std::to_string(n) +
                           " elements)"),
        needed(n) {}
};

struct TwoTermHomology {
  std::vector<u64> h0_inv;  // invariant factors of ker(f)
  std::vector<u64> h1_inv;  // invariant factors of coker(f)
  bigint h0_order = 1, h1_order = 1;
  std::size_t image_order = 1;
};

// f : src -> dst is additive.  Computes ker(f) and coker(f) with invariant
// factors.  Throws HomologyBudgetError when |src| or |dst| exceeds budget.
TwoTermHomology two_term_homology(const AbGroup& src, const AbGroup& dst,
                                  const std::function<Enc(const Enc&)>& f,
                                  std::size_t budget = (std::size_t(1) << 20));

// Order of x in g (a power of g.p).
u64 elem_order(const AbGroup& g, Enc x);

}  // namespace wittlab
