#include "wittlab/linalg.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <numeric>

namespace wittlab {

IntMat IntMat::identity(std::size_t n) {
  IntMat m(n, n);
  for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1;
  return m;
}

IntMat mat_mul(const IntMat& x, const IntMat& y) {
  if (x.cols != y.rows) throw std::invalid_argument("mat_mul: shape mismatch");
  IntMat r(x.rows, y.cols);
  for (std::size_t i = 0; i < x.rows; ++i)
    for (std::size_t k = 0; k < x.cols; ++k) {
      if (x.at(i, k) == 0) continue;
      for (std::size_t j = 0; j < y.cols; ++j) r.at(i, j) += x.at(i, k) * y.at(k, j);
    }
  return r;
}

namespace {

void row_op(IntMat& m, IntMat& u, std::size_t i, std::size_t j, const bigint& q) {
  // row_i -= q * row_j, mirrored in u
  for (std::size_t c = 0; c < m.cols; ++c) m.at(i, c) -= q * m.at(j, c);
  for (std::size_t c = 0; c < u.cols; ++c) u.at(i, c) -= q * u.at(j, c);
}

void col_op(IntMat& m, IntMat& v, std::size_t i, std::size_t j, const bigint& q) {
  // col_i -= q * col_j, mirrored in v
  for (std::size_t r = 0; r < m.rows; ++r) m.at(r, i) -= q * m.at(r, j);
  for (std::size_t r = 0; r < v.rows; ++r) v.at(r, i) -= q * v.at(r, j);
}

void swap_rows(IntMat& m, IntMat& u, std::size_t i, std::size_t j) {
  if (i == j) return;
  for (std::size_t c = 0; c < m.cols; ++c) std::swap(m.at(i, c), m.at(j, c));
  for (std::size_t c = 0; c < u.cols; ++c) std::swap(u.at(i, c), u.at(j, c));
}

void swap_cols(IntMat& m, IntMat& v, std::size_t i, std::size_t j) {
  if (i == j) return;
  for (std::size_t r = 0; r < m.rows; ++r) std::swap(m.at(r, i), m.at(r, j));
  for (std::size_t r = 0; r < v.rows; ++r) std::swap(v.at(r, i), v.at(r, j));
}

}  // namespace

SmithResult smith_normal_form(const IntMat& input) {
  SmithResult res;
  res.s = input;
  res.u = IntMat::identity(input.rows);
  res.v = IntMat::identity(input.cols);
  IntMat& s = res.s;
  std::size_t n = std::min(s.rows, s.cols);

  for (std::size_t t = 0; t < n; ++t) {
    // find a nonzero pivot with minimal absolute value in the trailing block
    std::size_t pi = t, pj = t;
    bigint best = 0;
    for (std::size_t i = t; i < s.rows; ++i)
      for (std::size_t j = t; j < s.cols; ++j) {
        bigint v = abs(s.at(i, j));
        if (v != 0 && (best == 0 || v < best)) { best = v; pi = i; pj = j; }
      }
    if (best == 0) break;
    swap_rows(s, res.u, t, pi);
    swap_cols(s, res.v, t, pj);

    bool dirty = true;
    while (dirty) {
      dirty = false;
      for (std::size_t i = t + 1; i < s.rows; ++i) {
        if (s.at(i, t) == 0) continue;
        bigint q = s.at(i, t) / s.at(t, t);
        row_op(s, res.u, i, t, q);
        if (s.at(i, t) != 0) {  // remainder smaller than pivot; swap up and redo
          swap_rows(s, res.u, t, i);
          dirty = true;
        }
      }
      for (std::size_t j = t + 1; j < s.cols; ++j) {
        if (s.at(t, j) == 0) continue;
        bigint q = s.at(t, j) / s.at(t, t);
        col_op(s, res.v, j, t, q);
        if (s.at(t, j) != 0) {
          swap_cols(s, res.v, t, j);
          dirty = true;
        }
      }
    }

    // enforce divisibility d_t | entries of the trailing block
    for (std::size_t i = t + 1; i < s.rows; ++i)
      for (std::size_t j = t + 1; j < s.cols; ++j)
        if (s.at(i, j) % s.at(t, t) != 0) {
          // add row i to row t, restart this pivot
          for (std::size_t c = 0; c < s.cols; ++c) s.at(t, c) += s.at(i, c);
          for (std::size_t c = 0; c < res.u.cols; ++c) res.u.at(t, c) += res.u.at(i, c);
          --t;
          i = s.rows;  // break both loops
          break;
        }
  }
  for (std::size_t t = 0; t < n; ++t)
    if (s.at(t, t) < 0) {
      for (std::size_t r = 0; r < s.rows; ++r) s.at(r, t) = -s.at(r, t);
      for (std::size_t r = 0; r < res.v.rows; ++r) res.v.at(r, t) = -res.v.at(r, t);
    }
  return res;
}

// --- Howell form over Z/p^k -------------------------------------------------

ZkMat howell_form(const ZkMat& input) {
  const ZmodCtx& c = input.ctx;
  std::vector<std::vector<u64>> rows;
  rows.reserve(input.rows);
  for (std::size_t i = 0; i < input.rows; ++i) {
    std::vector<u64> r(input.cols);
    for (std::size_t j = 0; j < input.cols; ++j) r[j] = input.at(i, j) % c.mod;
    rows.push_back(std::move(r));
  }

  std::vector<std::vector<u64>> out;
  std::vector<std::vector<u64>> work = std::move(rows);
  for (std::size_t col = 0; col < input.cols; ++col) {
    // pick the row with minimal valuation in this column
    std::size_t best = work.size();
    u64 bestval = c.k + 1;
    for (std::size_t i = 0; i < work.size(); ++i) {
      if (work[i][col] == 0) continue;
      u64 v = pval(work[i][col], c.p);
      if (v < bestval) { bestval = v; best = i; }
    }
    if (best == work.size()) continue;
    std::vector<u64> piv = work[best];
    work.erase(work.begin() + long(best));
    // normalize: leading entry becomes p^v
    u64 unit;
    pval(piv[col], c.p, &unit);
    u64 iu = c.inv(unit);
    for (auto& x : piv) x = c.mul(x, iu);
    // eliminate this column from the remaining rows
    u64 lead = piv[col];  // = p^bestval
    for (auto& r : work) {
      if (r[col] == 0) continue;
      u64 q = (r[col] / lead) % c.mod;  // exact division since val(r[col]) >= bestval
      for (std::size_t j = 0; j < input.cols; ++j) r[j] = c.sub(r[j], c.mul(q, piv[j]));
    }
    // Howell closure: the annihilator multiple of the pivot row still spans
    // part of later columns; push it back into the work list.
    if (bestval > 0) {
      u64 ann = c.mod / lead;  // p^(k-v)
      std::vector<u64> extra(input.cols);
      bool nz = false;
      for (std::size_t j = 0; j < input.cols; ++j) {
        extra[j] = c.mul(ann, piv[j]);
        nz |= extra[j] != 0;
      }
      if (nz) work.push_back(std::move(extra));
    }
    out.push_back(std::move(piv));
  }
  // back-reduce entries above each pivot
  for (std::size_t i = out.size(); i-- > 0;) {
    std::size_t col = 0;
    while (out[i][col] == 0) ++col;
    u64 lead = out[i][col];
    for (std::size_t j = 0; j < i; ++j) {
      u64 q = (out[j][col] / lead) % c.mod;
      if (q == 0) continue;
      for (std::size_t cc = 0; cc < input.cols; ++cc)
        out[j][cc] = c.sub(out[j][cc], c.mul(q, out[i][cc]));
    }
  }
  ZkMat h(c, out.size(), input.cols);
  for (std::size_t i = 0; i < out.size(); ++i)
    for (std::size_t j = 0; j < input.cols; ++j) h.at(i, j) = out[i][j];
  return h;
}

std::vector<u64> howell_reduce(const ZkMat& h, std::vector<u64> v) {
  const ZmodCtx& c = h.ctx;
  if (v.size() != h.cols) throw std::invalid_argument("howell_reduce: size mismatch");
  for (auto& x : v) x %= c.mod;
  for (std::size_t i = 0; i < h.rows; ++i) {
    std::size_t col = 0;
    while (col < h.cols && h.at(i, col) == 0) ++col;
    if (col == h.cols) continue;
    u64 lead = h.at(i, col);
    u64 q = (v[col] / lead) % c.mod;  // leaves v[col] mod lead, the canonical residue
    if (q == 0) continue;
    for (std::size_t j = 0; j < h.cols; ++j) v[j] = c.sub(v[j], c.mul(q, h.at(i, j)));
  }
  return v;
}

bool howell_solve(const ZkMat& h, const std::vector<u64>& v, std::vector<u64>& x) {
  const ZmodCtx& c = h.ctx;
  std::vector<u64> r = v;
  for (auto& t : r) t %= c.mod;
  x.assign(h.rows, 0);
  for (std::size_t i = 0; i < h.rows; ++i) {
    std::size_t col = 0;
    while (col < h.cols && h.at(i, col) == 0) ++col;
    if (col == h.cols) continue;
    u64 lead = h.at(i, col);
    u64 q = (r[col] / lead) % c.mod;
    x[i] = q;
    for (std::size_t j = 0; j < h.cols; ++j) r[j] = c.sub(r[j], c.mul(q, h.at(i, j)));
  }
  for (u64 t : r)
    if (t != 0) return false;
  return true;
}

bigint howell_span_size(const ZkMat& h) {
  const ZmodCtx& c = h.ctx;
  bigint n = 1;
  for (std::size_t i = 0; i < h.rows; ++i) {
    std::size_t col = 0;
    while (col < h.cols && h.at(i, col) == 0) ++col;
    if (col == h.cols) continue;
    n *= bigint(c.mod / h.at(i, col));  // index of <p^v> in Z/p^k is p^(k-v)
  }
  return n;
}

// --- homology ---------------------------------------------------------------

u64 elem_order(const AbGroup& g, Enc x) {
  u64 ord = 1;
  while (x != g.zero()) {
    // x <- p * x
    Enc px = g.zero();
    Enc base = x;
    u64 e = g.p;
    while (e) {
      if (e & 1) px = g.add(px, base);
      e >>= 1;
      if (e) base = g.add(base, base);
    }
    x = std::move(px);
    ord *= g.p;
  }
  return ord;
}

std::vector<u64> invariants_from_orders(u64 p, const std::vector<u64>& orders) {
  // count[j] = #elements of order dividing p^j; the multiplicity of exponent
  // >= j among invariant factors is log_p(count[j]) - log_p(count[j-1]).
  std::map<u64, std::size_t> cnt;  // order -> how many
  for (u64 o : orders) ++cnt[o];
  std::vector<u64> logs;  // logs[j] = log_p #G[p^j]
  logs.push_back(0);
  u64 pj = p;
  std::size_t total = orders.size();
  while (true) {
    std::size_t cum = 0;
    for (auto& [o, n] : cnt)
      if (o <= pj) cum += n;
    u64 lg = 0;
    std::size_t v = cum;
    while (v > 1) {
      if (v % p != 0) throw std::logic_error("invariants_from_orders: group order not a p-power");
      v /= p;
      ++lg;
    }
    logs.push_back(lg);
    if (cum == total) break;
    pj *= p;
    if (logs.size() > 64) throw std::logic_error("invariants_from_orders: runaway");
  }
  // build partition: m_j = logs[j] - logs[j-1] counts factors with exponent >= j
  std::vector<u64> inv;
  std::vector<u64> mcol;
  for (std::size_t j = 1; j < logs.size(); ++j) mcol.push_back(logs[j] - logs[j - 1]);
  if (!mcol.empty()) {
    std::size_t nfac = mcol[0];
    inv.assign(nfac, 0);
    for (std::size_t j = 0; j < mcol.size(); ++j)
      for (std::size_t i = 0; i < mcol[j]; ++i) ++inv[i];
  }
  return inv;
}

TwoTermHomology two_term_homology(const AbGroup& src, const AbGroup& dst,
                                  const std::function<Enc(const Enc&)>& f, std::size_t budget) {
  if (src.size() > budget) throw HomologyBudgetError(src.size());
  if (dst.size() > budget) throw HomologyBudgetError(dst.size());
  TwoTermHomology res;

  // kernel
  std::vector<Enc> ker;
  std::unordered_map<Enc, std::size_t, EncHash> dst_index;
  dst_index.reserve(dst.size() * 2);
  for (std::size_t i = 0; i < dst.size(); ++i) dst_index.emplace(dst.elems[i], i);

  std::unordered_map<Enc, char, EncHash> image;
  for (const auto& x : src.elems) {
    Enc y = f(x);
    if (!dst_index.count(y)) throw std::logic_error("two_term_homology: f leaves carrier");
    if (y == dst.zero()) ker.push_back(x);
    image.emplace(std::move(y), 1);
  }
  {
    std::vector<u64> orders;
    orders.reserve(ker.size());
    AbGroup probe{src.p, {src.zero()}, src.add, src.neg};
    for (const auto& x : ker) orders.push_back(elem_order(probe, x));
    res.h0_inv = invariants_from_orders(src.p, orders);
    res.h0_order = ker.size();
  }
  res.image_order = image.size();

  // cokernel: order statistics of cosets.  Each coset appears |image| times
  // when scanning all of dst, so divide counts through at the end.
  std::vector<u64> coset_orders;
  coset_orders.reserve(dst.size() / image.size() + 1);
  {
    std::vector<u64> all;
    all.reserve(dst.size());
    for (const auto& y : dst.elems) {
      // order of y + image in dst/image: smallest p^e with p^e*y in image
      Enc cur = y;
      u64 ord = 1;
      while (!image.count(cur)) {
        Enc px = dst.zero();
        Enc base = cur;
        u64 e = dst.p;
        while (e) {
          if (e & 1) px = dst.add(px, base);
          e >>= 1;
          if (e) base = dst.add(base, base);
        }
        cur = std::move(px);
        ord *= dst.p;
        if (ord > (u64(1) << 62)) throw std::logic_error("coset order runaway");
      }
      all.push_back(ord);
    }
    // compress: each coset scanned |image| times
    std::map<u64, std::size_t> cnt;
    for (u64 o : all) ++cnt[o];
    for (auto& [o, n] : cnt) {
      if (n % image.size() != 0) throw std::logic_error("coset multiplicity mismatch");
      for (std::size_t i = 0; i < n / image.size(); ++i) coset_orders.push_back(o);
    }
  }
  res.h1_inv = invariants_from_orders(dst.p, coset_orders);
  res.h1_order = coset_orders.size();

  // Euler characteristic sanity: |H0| * |dst| == |H1| * |src| * ... actually
  // |ker| * |im| = |src| and |coker| * |im| = |dst|.
  if (bigint(res.h0_order) * bigint(res.image_order) != bigint(src.size()) ||
      bigint(res.h1_order) * bigint(res.image_order) != bigint(dst.size()))
    throw std::logic_error("two_term_homology: order bookkeeping failed");
  return res;
}

}  // namespace wittlab
