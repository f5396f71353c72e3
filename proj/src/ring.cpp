#include "wittlab/ring.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace wittlab {

namespace {

bool is_prime(u64 p) {
  if (p < 2) return false;
  for (u64 d = 2; d * d <= p; ++d)
    if (p % d == 0) return false;
  return true;
}

// Associativity/commutativity/unit over Z for integer structure constants.
bool check_model_axioms(std::size_t rank, const std::vector<i64>& sc, const std::vector<i64>& one) {
  auto at = [&](std::size_t i, std::size_t j, std::size_t m) -> i64 {
    return sc[(i * rank + j) * rank + m];
  };
  for (std::size_t i = 0; i < rank; ++i)
    for (std::size_t j = 0; j < i; ++j)
      for (std::size_t m = 0; m < rank; ++m)
        if (at(i, j, m) != at(j, i, m)) return false;
  // unit law: one * e_j = e_j
  for (std::size_t j = 0; j < rank; ++j)
    for (std::size_t m = 0; m < rank; ++m) {
      i64 s = 0;
      for (std::size_t i = 0; i < rank; ++i) s += one[i] * at(i, j, m);
      if (s != (m == j ? 1 : 0)) return false;
    }
  // associativity on basis triples, exact over Z (values stay tiny)
  for (std::size_t i = 0; i < rank; ++i)
    for (std::size_t j = 0; j < rank; ++j)
      for (std::size_t l = 0; l < rank; ++l)
        for (std::size_t m = 0; m < rank; ++m) {
          i64 lhs = 0, rhs = 0;
          for (std::size_t t = 0; t < rank; ++t) {
            lhs += at(i, j, t) * at(t, l, m);
            rhs += at(j, l, t) * at(i, t, m);
          }
          if (lhs != rhs) return false;
        }
  return true;
}

}  // namespace

void FpkAlgebra::verify_axioms() const {
  if (!is_prime(p)) throw std::invalid_argument("p must be prime");
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  if (labels.size() != rank || sc.size() != rank * rank * rank || one_coords.size() != rank)
    throw std::invalid_argument("algebra data has wrong shape");
  for (u64 v : sc)
    if (v >= mod) throw std::invalid_argument("structure constant out of range");
  auto at = [&](std::size_t i, std::size_t j, std::size_t m) { return sc[(i * rank + j) * rank + m]; };
  for (std::size_t i = 0; i < rank; ++i)
    for (std::size_t j = 0; j < i; ++j)
      for (std::size_t m = 0; m < rank; ++m)
        if (at(i, j, m) != at(j, i, m)) throw std::invalid_argument("multiplication not commutative");
  for (std::size_t j = 0; j < rank; ++j)
    for (std::size_t m = 0; m < rank; ++m) {
      u64 s = 0;
      for (std::size_t i = 0; i < rank; ++i) s = (s + mulmod(one_coords[i], at(i, j, m), mod)) % mod;
      if (s != (m == j ? 1u : 0u)) throw std::invalid_argument("unit law fails");
    }
  for (std::size_t i = 0; i < rank; ++i)
    for (std::size_t j = 0; j < rank; ++j)
      for (std::size_t l = 0; l < rank; ++l)
        for (std::size_t m = 0; m < rank; ++m) {
          u64 lhs = 0, rhs = 0;
          for (std::size_t t = 0; t < rank; ++t) {
            lhs = (lhs + mulmod(at(i, j, t), at(t, l, m), mod)) % mod;
            rhs = (rhs + mulmod(at(j, l, t), at(i, t, m), mod)) % mod;
          }
          if (lhs != rhs) throw std::invalid_argument("multiplication not associative");
        }
}

void FpkAlgebra::infer_model() {
  // naive lift: take representatives in [0, p^k); keep it only if the lifted
  // constants already form a Z-algebra (covers Z/p^k, truncated polynomial
  // extensions, square-zero quotients; fields get an explicit model instead)
  std::vector<i64> msc(sc.begin(), sc.end());
  std::vector<i64> mone(one_coords.begin(), one_coords.end());
  if (check_model_axioms(rank, msc, mone)) model = IntegralModel{std::move(msc), std::move(mone)};
}

RingPtr FpkAlgebra::make(u64 p, u64 k, std::vector<std::string> labels, std::vector<u64> sc,
                         std::vector<u64> one, std::string name) {
  auto r = std::make_shared<FpkAlgebra>();
  r->p = p;
  r->k = k;
  r->mod = upow_checked(p, k);
  r->rank = labels.size();
  r->labels = std::move(labels);
  r->sc = std::move(sc);
  for (auto& v : r->sc) v %= r->mod;
  r->one_coords = std::move(one);
  for (auto& v : r->one_coords) v %= r->mod;
  r->name = std::move(name);
  r->verify_axioms();
  r->infer_model();
  if (r->model &&
      !check_model_axioms(r->rank, r->model->sc, r->model->one))
    throw std::logic_error("integral model fails Z-axioms");
  return r;
}

RingPtr FpkAlgebra::make_zmod(u64 p, u64 k) {
  return make(p, k, {"1"}, {1}, {1}, k == 1 ? "F" + std::to_string(p) : "Z/" + std::to_string(upow_checked(p, k)));
}

RingPtr FpkAlgebra::make_field(u64 p, const std::vector<u64>& f, const std::string& var) {
  std::size_t d = f.size();
  if (d < 1) throw std::invalid_argument("make_field: need degree >= 1");
  // integer model Z[a]/(x^d + f~[d-1] x^{d-1} + ... + f~[0]), f~ = lift to [0,p)
  std::vector<i64> ft(f.begin(), f.end());
  for (auto& c : ft) c %= i64(p);
  auto reduce = [&](std::vector<i64> poly) {  // reduce degree < d over Z
    while (poly.size() > d) {
      i64 lead = poly.back();
      poly.pop_back();
      for (std::size_t i = 0; i < d; ++i) poly[poly.size() - d + i] -= lead * ft[i];
    }
    poly.resize(d, 0);
    return poly;
  };
  std::vector<i64> msc(d * d * d, 0);
  std::vector<u64> sc(d * d * d, 0);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      std::vector<i64> prod(i + j + 1, 0);
      prod[i + j] = 1;
      auto red = reduce(std::move(prod));
      for (std::size_t m = 0; m < d; ++m) {
        msc[(i * d + j) * d + m] = red[m];
        i64 v = red[m] % i64(p);
        if (v < 0) v += i64(p);
        sc[(i * d + j) * d + m] = u64(v);
      }
    }
  std::vector<std::string> labels(d);
  std::vector<u64> one(d, 0);
  std::vector<i64> mone(d, 0);
  one[0] = 1;
  mone[0] = 1;
  for (std::size_t i = 0; i < d; ++i)
    labels[i] = i == 0 ? "1" : (i == 1 ? var : var + "^" + std::to_string(i));
  std::string nm = "F" + std::to_string(upow_checked(p, d));
  auto r = make(p, 1, std::move(labels), std::move(sc), std::move(one), nm);
  auto* rw = const_cast<FpkAlgebra*>(r.get());
  IntegralModel im{std::move(msc), std::move(mone)};
  if (!check_model_axioms(d, im.sc, im.one)) throw std::logic_error("field model fails Z-axioms");
  rw->model = std::move(im);
  // field check: every nonzero element must be a unit (also certifies f irreducible)
  bigint n = r->card();
  if (n > 4096) throw std::invalid_argument("make_field: degree too large to certify");
  for (bigint i = 1; i < n; ++i)
    if (!r->is_unit(r->elem_by_index(i)))
      throw std::invalid_argument("make_field: polynomial is not irreducible");
  return r;
}

RingPtr FpkAlgebra::extend_nilpotent(const RingPtr& R, u64 m, const std::string& var) {
  if (m < 1) throw std::invalid_argument("extend_nilpotent: m >= 1 required");
  std::size_t r0 = R->rank, rank = r0 * m;
  auto idx = [&](std::size_t deg, std::size_t i) { return deg * r0 + i; };
  std::vector<u64> sc(rank * rank * rank, 0);
  for (std::size_t di = 0; di < m; ++di)
    for (std::size_t dj = 0; dj < m; ++dj)
      for (std::size_t i = 0; i < r0; ++i)
        for (std::size_t j = 0; j < r0; ++j) {
          if (di + dj >= m) continue;
          for (std::size_t t = 0; t < r0; ++t)
            sc[(idx(di, i) * rank + idx(dj, j)) * rank + idx(di + dj, t)] =
                R->sc[(i * r0 + j) * r0 + t];
        }
  std::vector<std::string> labels(rank);
  for (std::size_t d = 0; d < m; ++d)
    for (std::size_t i = 0; i < r0; ++i) {
      std::string base = R->labels[i] == "1" ? "" : R->labels[i];
      std::string pw = d == 0 ? "" : (d == 1 ? var : var + "^" + std::to_string(d));
      std::string l = base.empty() ? pw : (pw.empty() ? base : base + "*" + pw);
      labels[idx(d, i)] = l.empty() ? "1" : l;
    }
  std::vector<u64> one(rank, 0);
  for (std::size_t i = 0; i < r0; ++i) one[i] = R->one_coords[i];
  std::string nm = (R->name.empty() ? "R" : R->name) + "[" + var + "]/(" + var + "^" +
                   std::to_string(m) + ")";
  auto out = make(R->p, R->k, std::move(labels), std::move(sc), std::move(one), nm);
  if (R->model && !out->model) {
    std::vector<i64> msc(rank * rank * rank, 0);
    for (std::size_t di = 0; di < m; ++di)
      for (std::size_t dj = 0; dj + di < m; ++dj)
        for (std::size_t i = 0; i < r0; ++i)
          for (std::size_t j = 0; j < r0; ++j)
            for (std::size_t t = 0; t < r0; ++t)
              msc[(idx(di, i) * rank + idx(dj, j)) * rank + idx(di + dj, t)] =
                  R->model->sc[(i * r0 + j) * r0 + t];
    std::vector<i64> mone(rank, 0);
    for (std::size_t i = 0; i < r0; ++i) mone[i] = R->model->one[i];
    IntegralModel im{std::move(msc), std::move(mone)};
    if (check_model_axioms(rank, im.sc, im.one))
      const_cast<FpkAlgebra*>(out.get())->model = std::move(im);
  }
  return out;
}

RingElement FpkAlgebra::zero_elem() const {
  return {shared_from_this(), std::vector<u64>(rank, 0)};
}
RingElement FpkAlgebra::one_elem() const { return {shared_from_this(), one_coords}; }
RingElement FpkAlgebra::basis_elem(std::size_t i) const {
  std::vector<u64> c(rank, 0);
  c[i] = 1;
  return {shared_from_this(), std::move(c)};
}
RingElement FpkAlgebra::from_int(i64 n) const {
  i64 r = n % i64(mod);
  if (r < 0) r += i64(mod);
  return scal(u64(r), one_elem());
}
RingElement FpkAlgebra::elem(std::vector<u64> coords) const {
  if (coords.size() != rank) throw std::invalid_argument("elem: wrong coordinate count");
  for (auto& v : coords) v %= mod;
  return {shared_from_this(), std::move(coords)};
}

RingElement FpkAlgebra::add(const RingElement& x, const RingElement& y) const {
  RingElement z{shared_from_this(), std::vector<u64>(rank)};
  for (std::size_t i = 0; i < rank; ++i) z.c[i] = (x.c[i] + y.c[i]) % mod;
  return z;
}
RingElement FpkAlgebra::sub(const RingElement& x, const RingElement& y) const {
  RingElement z{shared_from_this(), std::vector<u64>(rank)};
  for (std::size_t i = 0; i < rank; ++i) z.c[i] = (x.c[i] + mod - y.c[i]) % mod;
  return z;
}
RingElement FpkAlgebra::neg(const RingElement& x) const {
  RingElement z{shared_from_this(), std::vector<u64>(rank)};
  for (std::size_t i = 0; i < rank; ++i) z.c[i] = (mod - x.c[i]) % mod;
  return z;
}
RingElement FpkAlgebra::mul(const RingElement& x, const RingElement& y) const {
  RingElement z{shared_from_this(), std::vector<u64>(rank, 0)};
  for (std::size_t i = 0; i < rank; ++i) {
    if (x.c[i] == 0) continue;
    for (std::size_t j = 0; j < rank; ++j) {
      if (y.c[j] == 0) continue;
      u64 xy = mulmod(x.c[i], y.c[j], mod);
      const u64* row = &sc[(i * rank + j) * rank];
      for (std::size_t m = 0; m < rank; ++m) z.c[m] = (z.c[m] + mulmod(xy, row[m], mod)) % mod;
    }
  }
  return z;
}
RingElement FpkAlgebra::scal(u64 a, const RingElement& x) const {
  RingElement z{shared_from_this(), std::vector<u64>(rank)};
  for (std::size_t i = 0; i < rank; ++i) z.c[i] = mulmod(a % mod, x.c[i], mod);
  return z;
}
RingElement FpkAlgebra::pow(const RingElement& x, u64 e) const {
  RingElement r = one_elem(), b = x;
  while (e) {
    if (e & 1) r = mul(r, b);
    e >>= 1;
    if (e) b = mul(b, b);
  }
  return r;
}
bool FpkAlgebra::is_zero(const RingElement& x) const {
  return std::all_of(x.c.begin(), x.c.end(), [](u64 v) { return v == 0; });
}

bool FpkAlgebra::is_unit(const RingElement& x) const {
  std::vector<u64> M(rank * rank), y;
  for (std::size_t i = 0; i < rank; ++i) {
    RingElement r = mul(basis_elem(i), x);
    for (std::size_t m = 0; m < rank; ++m) M[i * rank + m] = r.c[m];
  }
  return zk_solve_left(mod, rank, rank, M, one_coords, y);
}

RingElement FpkAlgebra::inv(const RingElement& x) const {
  std::vector<u64> M(rank * rank), y;
  for (std::size_t i = 0; i < rank; ++i) {
    RingElement r = mul(basis_elem(i), x);
    for (std::size_t m = 0; m < rank; ++m) M[i * rank + m] = r.c[m];
  }
  if (!zk_solve_left(mod, rank, rank, M, one_coords, y))
    throw std::domain_error("inv: not a unit");
  return elem(std::move(y));
}

bool FpkAlgebra::is_nilpotent(const RingElement& x) const {
  // safe exponent p^k * rank; square past it
  u64 bound = mod * rank;
  RingElement y = x;
  u64 e = 1;
  while (e < bound) {
    y = mul(y, y);
    e *= 2;
  }
  return is_zero(y);
}

bigint FpkAlgebra::card() const {
  bigint n = 1;
  for (std::size_t i = 0; i < rank; ++i) n *= mod;
  return n;
}

RingElement FpkAlgebra::elem_by_index(bigint i) const {
  std::vector<u64> c(rank);
  for (std::size_t t = 0; t < rank; ++t) {
    c[t] = u64(i % mod);
    i /= mod;
  }
  return {shared_from_this(), std::move(c)};
}

std::string FpkAlgebra::show(const RingElement& x) const {
  std::ostringstream os;
  bool first = true;
  for (std::size_t i = 0; i < rank; ++i) {
    if (x.c[i] == 0) continue;
    if (!first) os << "+";
    first = false;
    if (x.c[i] != 1 || labels[i] == "1") os << x.c[i];
    if (labels[i] != "1") {
      if (x.c[i] != 1) os << "*";
      os << labels[i];
    }
  }
  if (first) os << "0";
  return os.str();
}

std::string FpkAlgebra::digest() const {
  std::ostringstream os;
  os << p << "/" << k << "/" << rank << ":";
  for (u64 v : sc) os << v << ",";
  os << ";";
  for (u64 v : one_coords) os << v << ",";
  return os.str();
}

bool FpkAlgebra::same_as(const FpkAlgebra& o) const {
  return p == o.p && k == o.k && rank == o.rank && sc == o.sc && one_coords == o.one_coords;
}

nlohmann::json FpkAlgebra::to_json() const {
  nlohmann::json j;
  j["p"] = p;
  j["k"] = k;
  j["rank"] = rank;
  j["labels"] = labels;
  j["struct_consts"] = sc;
  j["one_coords"] = one_coords;
  if (!name.empty()) j["name"] = name;
  return j;
}

RingPtr FpkAlgebra::from_json(const nlohmann::json& j) {
  std::vector<std::string> labels = j.at("labels").get<std::vector<std::string>>();
  if (j.at("rank").get<std::size_t>() != labels.size())
    throw std::invalid_argument("ring json: rank/labels mismatch");
  return make(j.at("p").get<u64>(), j.at("k").get<u64>(), std::move(labels),
              j.at("struct_consts").get<std::vector<u64>>(),
              j.at("one_coords").get<std::vector<u64>>(), j.value("name", ""));
}

// --- homomorphisms ----------------------------------------------------------

RingElement RingHom::apply(const RingElement& x) const {
  if (x.ring.get() != src.get() && !x.ring->same_as(*src))
    throw std::invalid_argument("RingHom::apply: wrong source ring");
  std::vector<u64> y(dst->rank, 0);
  for (std::size_t i = 0; i < src->rank; ++i) {
    if (x.c[i] == 0) continue;
    for (std::size_t m = 0; m < dst->rank; ++m)
      y[m] = (y[m] + mulmod(x.c[i] % dst->mod, mat[i * dst->rank + m], dst->mod)) % dst->mod;
  }
  return dst->elem(std::move(y));
}

void RingHom::verify() const {
  if (src->p != dst->p) throw std::invalid_argument("RingHom: different primes");
  if (mat.size() != src->rank * dst->rank) throw std::invalid_argument("RingHom: bad matrix shape");
  if (apply(src->one_elem()) != dst->one_elem()) throw std::invalid_argument("RingHom: 1 -> 1 fails");
  for (std::size_t i = 0; i < src->rank; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      RingElement lhs = apply(src->mul(src->basis_elem(i), src->basis_elem(j)));
      RingElement rhs = dst->mul(apply(src->basis_elem(i)), apply(src->basis_elem(j)));
      if (lhs != rhs) throw std::invalid_argument("RingHom: multiplicativity fails on basis");
    }
}

RingHom RingHom::identity(const RingPtr& r) {
  RingHom h{r, r, std::vector<u64>(r->rank * r->rank, 0)};
  for (std::size_t i = 0; i < r->rank; ++i) h.mat[i * r->rank + i] = 1;
  return h;
}

RingHom RingHom::compose(const RingHom& then) const {
  if (!dst->same_as(*then.src)) throw std::invalid_argument("RingHom::compose: mismatch");
  RingHom h{src, then.dst, std::vector<u64>(src->rank * then.dst->rank, 0)};
  for (std::size_t i = 0; i < src->rank; ++i) {
    RingElement img = then.apply(apply(src->basis_elem(i)));
    for (std::size_t m = 0; m < then.dst->rank; ++m) h.mat[i * then.dst->rank + m] = img.c[m];
  }
  return h;
}

// --- linear solving over Z/p^k via Smith form over Z ------------------------

bool zk_solve_left(u64 mod, std::size_t rows, std::size_t cols, const std::vector<u64>& M,
                   const std::vector<u64>& b, std::vector<u64>& y) {
  // y*M = b (mod `mod`): solve x*A = b over Z with A = [M; mod*I] stacked.
  IntMat A(rows + cols, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) A.at(i, j) = M[i * cols + j];
  for (std::size_t j = 0; j < cols; ++j) A.at(rows + j, j) = mod;
  SmithResult s = smith_normal_form(A);
  // want t with t*S = b*V, then x = t*U
  std::vector<bigint> bv(cols, 0);
  for (std::size_t j = 0; j < cols; ++j)
    for (std::size_t t = 0; t < cols; ++t) bv[j] += bigint(b[t]) * s.v.at(t, j);
  std::vector<bigint> t(rows + cols, 0);
  for (std::size_t j = 0; j < cols; ++j) {
    bigint d = s.s.at(j, j);
    if (d == 0) {
      if (bv[j] != 0) return false;
    } else {
      if (bv[j] % d != 0) return false;
      t[j] = bv[j] / d;
    }
  }
  y.assign(rows, 0);
  for (std::size_t i = 0; i < rows; ++i) {
    bigint x = 0;
    for (std::size_t j = 0; j < rows + cols; ++j) x += t[j] * s.u.at(j, i);
    bigint r = x % mod;
    if (r < 0) r += mod;
    y[i] = u64(r);
  }
  return true;
}

// --- ideals ------------------------------------------------------------------

RingIdeal RingIdeal::make(const RingPtr& R, std::vector<RingElement> gens) {
  // span of {g * e_i} is already an ideal: (g e_i) e_j lands back in the span
  ZkMat m(ZmodCtx(R->p, R->k), gens.size() * R->rank, R->rank);
  std::size_t row = 0;
  for (const auto& g : gens) {
    if (!g.ring->same_as(*R)) throw std::invalid_argument("ideal generator from wrong ring");
    for (std::size_t i = 0; i < R->rank; ++i, ++row) {
      RingElement ge = R->mul(g, R->basis_elem(i));
      for (std::size_t t = 0; t < R->rank; ++t) m.at(row, t) = ge.c[t];
    }
  }
  RingIdeal I{R, std::move(gens), howell_form(m)};
  return I;
}

bool RingIdeal::contains(const RingElement& x) const {
  auto r = howell_reduce(basis, x.c);
  return std::all_of(r.begin(), r.end(), [](u64 v) { return v == 0; });
}

bool RingIdeal::is_nilpotent_ideal() const {
  for (std::size_t i = 0; i < basis.rows; ++i) {
    std::vector<u64> c(ring->rank);
    for (std::size_t j = 0; j < ring->rank; ++j) c[j] = basis.at(i, j);
    if (!ring->is_nilpotent(ring->elem(std::move(c)))) return false;
  }
  return true;
}

RingIdeal nilradical(const RingPtr& R) {
  bigint n = R->card();
  if (n > (1 << 20)) throw std::runtime_error("nilradical: ring too large to enumerate");
  std::vector<RingElement> nil;
  for (bigint i = 0; i < n; ++i) {
    RingElement x = R->elem_by_index(i);
    if (R->is_nilpotent(x) && !R->is_zero(x)) nil.push_back(std::move(x));
  }
  return RingIdeal::make(R, std::move(nil));
}

// --- quotients ----------------------------------------------------------------

QuotientResult make_quotient(const RingPtr& R, const RingIdeal& I) {
  if (!I.ring->same_as(*R)) throw std::invalid_argument("make_quotient: ideal over wrong ring");
  std::size_t r = R->rank;
  // relation lattice in Z^r: ideal basis rows plus p^k * I
  IntMat A(I.basis.rows + r, r);
  for (std::size_t i = 0; i < I.basis.rows; ++i)
    for (std::size_t j = 0; j < r; ++j) A.at(i, j) = I.basis.at(i, j);
  for (std::size_t j = 0; j < r; ++j) A.at(I.basis.rows + j, j) = R->mod;
  SmithResult s = smith_normal_form(A);
  // Z^r / rowspan(A) = sum Z/s_i in coordinates y = x*V
  std::vector<std::size_t> keep;
  u64 kq = 0;
  for (std::size_t j = 0; j < r; ++j) {
    bigint d = s.s.at(j, j);
    if (d == 1) continue;
    if (d == 0) throw std::logic_error("make_quotient: quotient not finite");
    // d must be p^k' with a single k' shared by all kept coordinates
    bigint t = d;
    u64 e = 0;
    while (t % R->p == 0) { t /= R->p; ++e; }
    if (t != 1) throw std::logic_error("make_quotient: invariant not a p-power");
    if (keep.empty()) kq = e;
    else if (e != kq)
      throw std::invalid_argument("make_quotient: quotient is not free over Z/p^k'");
    keep.push_back(j);
  }
  if (keep.empty()) throw std::invalid_argument("make_quotient: quotient is the zero ring");
  u64 qmod = upow_checked(R->p, kq);

  // projection matrix: x -> (x*V)|keep mod p^k'
  std::vector<u64> proj(r * keep.size());
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t m = 0; m < keep.size(); ++m) {
      bigint v = s.v.at(i, keep[m]) % qmod;
      if (v < 0) v += qmod;
      proj[i * keep.size() + m] = u64(v);
    }
  // lift of quotient basis element m: row keep[m] of V^{-1}
  // V^{-1} via Smith of V (unimodular): U_v * V * V_v = I => V^{-1} = V_v * U_v
  SmithResult sv = smith_normal_form(s.v);
  for (std::size_t j = 0; j < r; ++j)
    if (sv.s.at(j, j) != 1) throw std::logic_error("make_quotient: V not unimodular");
  IntMat vinv = mat_mul(sv.v, sv.u);
  auto lift = [&](std::size_t m) {
    std::vector<u64> c(r);
    for (std::size_t j = 0; j < r; ++j) {
      bigint v = vinv.at(keep[m], j) % R->mod;
      if (v < 0) v += R->mod;
      c[j] = u64(v);
    }
    return R->elem(std::move(c));
  };
  auto project = [&](const RingElement& x) {
    std::vector<u64> y(keep.size(), 0);
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t m = 0; m < keep.size(); ++m)
        y[m] = (y[m] + mulmod(x.c[i] % qmod, proj[i * keep.size() + m], qmod)) % qmod;
    return y;
  };

  std::size_t qr = keep.size();
  std::vector<u64> qsc(qr * qr * qr);
  for (std::size_t i = 0; i < qr; ++i)
    for (std::size_t j = 0; j < qr; ++j) {
      auto pij = project(R->mul(lift(i), lift(j)));
      for (std::size_t m = 0; m < qr; ++m) qsc[(i * qr + j) * qr + m] = pij[m];
    }
  std::vector<std::string> qlabels(qr);
  for (std::size_t m = 0; m < qr; ++m) qlabels[m] = "q" + std::to_string(m);
  auto qone = project(R->one_elem());
  auto Q = FpkAlgebra::make(R->p, kq, std::move(qlabels), std::move(qsc), std::move(qone),
                            (R->name.empty() ? "R" : R->name) + "/I");
  RingHom pr{R, Q, std::move(proj)};
  pr.verify();
  // kernel == ideal: each ideal basis row dies, and order bookkeeping matches
  for (std::size_t i = 0; i < I.basis.rows; ++i) {
    std::vector<u64> c(r);
    for (std::size_t j = 0; j < r; ++j) c[j] = I.basis.at(i, j);
    if (!Q->is_zero(pr.apply(R->elem(std::move(c)))))
      throw std::logic_error("make_quotient: ideal does not die");
  }
  if (Q->card() * I.span_size() != R->card())
    throw std::logic_error("make_quotient: kernel is larger than the ideal");
  return {Q, std::move(pr)};
}

// --- residue field section -----------------------------------------------------

ResidueSection residue_section(const RingPtr& R) {
  if (!R->is_fp_algebra())
    throw std::invalid_argument("residue_section: not an F_p-algebra");
  RingIdeal nil = nilradical(R);
  auto [Q, pr] = make_quotient(R, nil);
  bigint n = Q->card();
  if (n > 4096) throw std::runtime_error("residue_section: residue ring too large to certify");
  for (bigint i = 1; i < n; ++i)
    if (!Q->is_unit(Q->elem_by_index(i)))
      throw std::invalid_argument("residue_section: not local (residue ring is not a field)");
  u64 d = Q->rank;  // |k| = p^d
  u64 q = upow_checked(R->p, d);

  std::vector<u64> smat(Q->rank * R->rank);
  for (std::size_t i = 0; i < Q->rank; ++i) {
    // any preimage of e_i, then iterate x -> x^(p^d) to the multiplicative lift
    std::vector<u64> y;
    std::vector<u64> target(Q->rank, 0);
    target[i] = 1;
    if (!zk_solve_left(Q->mod, R->rank, Q->rank, pr.mat, target, y))
      throw std::logic_error("residue_section: projection not surjective");
    RingElement x = R->elem(std::move(y));
    bool stable = false;
    for (int it = 0; it < 64; ++it) {
      RingElement nx = R->pow(x, q);
      if (nx == x) { stable = true; break; }
      x = std::move(nx);
    }
    if (!stable) throw std::logic_error("residue_section: iteration did not stabilize");
    for (std::size_t m = 0; m < R->rank; ++m) smat[i * R->rank + m] = x.c[m];
  }
  RingHom sec{Q, R, std::move(smat)};
  sec.verify();
  RingHom comp = sec.compose(pr);  // must be identity on k
  for (std::size_t i = 0; i < Q->rank; ++i)
    if (comp.apply(Q->basis_elem(i)) != Q->basis_elem(i))
      throw std::logic_error("residue_section: projection(section) != id");
  return {Q, std::move(pr), std::move(sec)};
}

RingHom frobenius_endo(const RingPtr& R) {
  if (!R->is_fp_algebra()) throw std::invalid_argument("frobenius_endo: needs k = 1");
  RingHom f{R, R, std::vector<u64>(R->rank * R->rank)};
  for (std::size_t i = 0; i < R->rank; ++i) {
    RingElement xi = R->pow(R->basis_elem(i), R->p);
    for (std::size_t m = 0; m < R->rank; ++m) f.mat[i * R->rank + m] = xi.c[m];
  }
  f.verify();
  return f;
}

}  // namespace wittlab
