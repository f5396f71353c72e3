#pragma once
// Universal Witt polynomials over Z, computed by the ghost recursion
//   w_m = sum_{i<=m} p^i x_i^(p^(m-i))
// and memoized per prime.  Used as the generic arithmetic path for rings
// without an integral model and as the oracle for the fast ghost-solve path.

#include <cstdint>
#include <map>
#include <vector>

#include "wittlab/linalg.hpp"

namespace wittlab {

// Sparse multivariate polynomial over Z.  Keys are exponent vectors with
// trailing zeros trimmed (canonical); map keeps iteration deterministic.
struct MPoly {
  std::map<std::vector<std::uint16_t>, bigint> t;

  static MPoly zero() { return {}; }
  static MPoly constant(bigint c);
  static MPoly var(std::size_t i);

  MPoly operator+(const MPoly& o) const;
  MPoly operator-(const MPoly& o) const;
  MPoly operator*(const MPoly& o) const;
  MPoly pow(u64 e) const;
  MPoly scaled(const bigint& c) const;
  // divide every coefficient by d; throws if not exact
  MPoly divexact(const bigint& d) const;
  bigint eval(const std::vector<bigint>& point) const;
  std::size_t nterms() const { return t.size(); }
  bool is_zero() const { return t.empty(); }
};

// Memoized universal polynomials for one prime.
// Variable conventions: binary families (sum, prod) use x_i -> 2i, y_i -> 2i+1;
// unary families (frob, neg) use x_i -> i.
class WittPolyCache {
 public:
  // default length caps: fast-growing polynomial size
  static std::size_t default_cap(u64 p) { return p == 2 ? 8 : (p == 3 ? 6 : 4); }

  // thread-safe accessor; lazily extends the cached families to index m
  static const MPoly& sum(u64 p, std::size_t m);
  static const MPoly& prod(u64 p, std::size_t m);
  static const MPoly& frob(u64 p, std::size_t m);   // w_m(F(x)) = w_{m+1}(x)
  static const MPoly& neg(u64 p, std::size_t m);

  // ghost polynomial w_m in variables x_i -> varmap(i)
  static MPoly ghost(u64 p, std::size_t m, const std::vector<std::size_t>& varmap);
};

}  // namespace wittlab
