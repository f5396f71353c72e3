#include "wittlab/frames.hpp"

#include <sstream>
#include <stdexcept>

namespace wittlab {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

}  // namespace

void verify_frame_axioms(const FramePtr& F, std::size_t samples, u64 seed) {
  std::mt19937_64 rng(seed);
  const A0Elem d = F->d();
  for (std::size_t s = 0; s < samples; ++s) {
    A1Elem x = F->random1(rng);
    // sigma0 o tau = d * sigma1
    if (!F->eq0(F->sigma0(F->tau(x)), F->mul0(d, F->sigma1(x))))
      throw std::logic_error(F->id + ": sigma0(tau(x)) != d*sigma1(x)");
    A0Elem a = F->random0(rng);
    // sigma0 is a Frobenius lift: project(sigma0(a)) = project(a)^p
    RingElement lhs = F->project(F->sigma0(a));
    RingElement rhs = F->base->pow(F->project(a), F->p);
    if (!(lhs == rhs)) throw std::logic_error(F->id + ": sigma0 is not a Frobenius lift");
    // tau(A1) is in the kernel of the projection, and tau_preimage sections tau
    A0Elem t = F->tau(x);
    if (!F->base->is_zero(F->project(t)))
      throw std::logic_error(F->id + ": project(tau(x)) != 0");
    if (!F->eq0(F->tau(F->tau_preimage(t)), t))
      throw std::logic_error(F->id + ": tau_preimage does not section tau");
    // additivity spot checks
    A0Elem a2 = F->random0(rng);
    if (!F->eq0(F->sigma0(F->mul0(a, a2)), F->mul0(F->sigma0(a), F->sigma0(a2))))
      throw std::logic_error(F->id + ": sigma0 not multiplicative");
    A1Elem y = F->random1(rng);
    if (!F->eq0(F->sigma1(F->add1(x, y)), F->add0(F->sigma1(x), F->sigma1(y))))
      throw std::logic_error(F->id + ": sigma1 not additive");
    // sigma1(a.x) = sigma0(a) * sigma1(x)
    if (!F->eq0(F->sigma1(F->act(a, x)), F->mul0(F->sigma0(a), F->sigma1(x))))
      throw std::logic_error(F->id + ": sigma1 not semilinear");
    // tau(a.x) = a * tau(x)
    if (!F->eq0(F->tau(F->act(a, x)), F->mul0(a, F->tau(x))))
      throw std::logic_error(F->id + ": tau not A0-linear");
  }
}

// --- Mat0 / Mat1 -------------------------------------------------------------

Mat0 m0_zero(const FramePtr& F, std::size_t r, std::size_t c) {
  Mat0 m{F, r, c, {}};
  m.e.assign(r * c, F->zero0());
  return m;
}

Mat0 m0_identity(const FramePtr& F, std::size_t n) {
  Mat0 m = m0_zero(F, n, n);
  for (std::size_t i = 0; i < n; ++i) m.at(i, i) = F->one0();
  return m;
}

Mat0 m0_add(const Mat0& a, const Mat0& b) {
  require(a.rows == b.rows && a.cols == b.cols, "m0_add: shape mismatch");
  Mat0 m{a.F, a.rows, a.cols, {}};
  m.e.reserve(a.e.size());
  for (std::size_t i = 0; i < a.e.size(); ++i) m.e.push_back(a.F->add0(a.e[i], b.e[i]));
  return m;
}

Mat0 m0_sub(const Mat0& a, const Mat0& b) { return m0_add(a, m0_neg(b)); }

Mat0 m0_neg(const Mat0& a) {
  Mat0 m{a.F, a.rows, a.cols, {}};
  m.e.reserve(a.e.size());
  for (const auto& x : a.e) m.e.push_back(a.F->neg0(x));
  return m;
}

Mat0 m0_mul(const Mat0& a, const Mat0& b) {
  require(a.cols == b.rows, "m0_mul: shape mismatch");
  Mat0 m = m0_zero(a.F, a.rows, b.cols);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t k = 0; k < a.cols; ++k) {
      const A0Elem& aik = a.at(i, k);
      for (std::size_t j = 0; j < b.cols; ++j)
        m.at(i, j) = a.F->add0(m.at(i, j), a.F->mul0(aik, b.at(k, j)));
    }
  return m;
}

Mat0 m0_scale(const A0Elem& s, const Mat0& a) {
  Mat0 m{a.F, a.rows, a.cols, {}};
  m.e.reserve(a.e.size());
  for (const auto& x : a.e) m.e.push_back(a.F->mul0(s, x));
  return m;
}

bool m0_eq(const Mat0& a, const Mat0& b) {
  if (a.rows != b.rows || a.cols != b.cols) return false;
  for (std::size_t i = 0; i < a.e.size(); ++i)
    if (!a.F->eq0(a.e[i], b.e[i])) return false;
  return true;
}

bool m0_is_zero(const Mat0& a) {
  for (const auto& x : a.e)
    if (!a.F->is_zero0(x)) return false;
  return true;
}

Mat0 m0_map(const Mat0& a, const std::function<A0Elem(const A0Elem&)>& f) {
  Mat0 m{a.F, a.rows, a.cols, {}};
  m.e.reserve(a.e.size());
  for (const auto& x : a.e) m.e.push_back(f(x));
  return m;
}

Mat0 m0_inv(const Mat0& a) {
  require(a.rows == a.cols, "m0_inv: not square");
  const FramePtr& F = a.F;
  std::size_t n = a.rows;
  Mat0 w = a;
  Mat0 inv = m0_identity(F, n);
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = n;
    for (std::size_t r = col; r < n; ++r)
      if (F->is_unit0(w.at(r, col))) {
        piv = r;
        break;
      }
    require(piv < n, "m0_inv: matrix is not invertible (no unit pivot)");
    if (piv != col)
      for (std::size_t j = 0; j < n; ++j) {
        std::swap(w.at(piv, j), w.at(col, j));
        std::swap(inv.at(piv, j), inv.at(col, j));
      }
    A0Elem s = F->inv0(w.at(col, col));
    for (std::size_t j = 0; j < n; ++j) {
      w.at(col, j) = F->mul0(s, w.at(col, j));
      inv.at(col, j) = F->mul0(s, inv.at(col, j));
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      A0Elem f = w.at(r, col);
      if (F->is_zero0(f)) continue;
      for (std::size_t j = 0; j < n; ++j) {
        w.at(r, j) = F->sub0(w.at(r, j), F->mul0(f, w.at(col, j)));
        inv.at(r, j) = F->sub0(inv.at(r, j), F->mul0(f, inv.at(col, j)));
      }
    }
  }
  return inv;
}

Mat0 m0_random(const FramePtr& F, std::size_t r, std::size_t c, std::mt19937_64& rng) {
  Mat0 m{F, r, c, {}};
  m.e.reserve(r * c);
  for (std::size_t i = 0; i < r * c; ++i) m.e.push_back(F->random0(rng));
  return m;
}

Mat1 m1_zero(const FramePtr& F, std::size_t r, std::size_t c) {
  Mat1 m{F, r, c, {}};
  m.e.assign(r * c, F->zero1());
  return m;
}

Mat1 m1_add(const Mat1& a, const Mat1& b) {
  require(a.rows == b.rows && a.cols == b.cols, "m1_add: shape mismatch");
  Mat1 m{a.F, a.rows, a.cols, {}};
  m.e.reserve(a.e.size());
  for (std::size_t i = 0; i < a.e.size(); ++i) m.e.push_back(a.F->add1(a.e[i], b.e[i]));
  return m;
}

Mat1 m1_neg(const Mat1& a) {
  Mat1 m{a.F, a.rows, a.cols, {}};
  m.e.reserve(a.e.size());
  for (const auto& x : a.e) m.e.push_back(a.F->neg1(x));
  return m;
}

bool m1_eq(const Mat1& a, const Mat1& b) {
  if (a.rows != b.rows || a.cols != b.cols) return false;
  for (std::size_t i = 0; i < a.e.size(); ++i)
    if (!a.F->eq1(a.e[i], b.e[i])) return false;
  return true;
}

Mat0 m0_tau(const Mat1& a) {
  Mat0 m{a.F, a.rows, a.cols, {}};
  m.e.reserve(a.e.size());
  for (const auto& x : a.e) m.e.push_back(a.F->tau(x));
  return m;
}

Mat0 m0_sigma1(const Mat1& a) {
  Mat0 m{a.F, a.rows, a.cols, {}};
  m.e.reserve(a.e.size());
  for (const auto& x : a.e) m.e.push_back(a.F->sigma1(x));
  return m;
}

Mat1 m1_act_left(const Mat0& a, const Mat1& b) {
  require(a.cols == b.rows, "m1_act_left: shape mismatch");
  Mat1 m = m1_zero(a.F, a.rows, b.cols);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t k = 0; k < a.cols; ++k)
      for (std::size_t j = 0; j < b.cols; ++j)
        m.at(i, j) = a.F->add1(m.at(i, j), a.F->act(a.at(i, k), b.at(k, j)));
  return m;
}

Mat1 m1_act_right(const Mat1& a, const Mat0& b) {
  require(a.cols == b.rows, "m1_act_right: shape mismatch");
  Mat1 m = m1_zero(a.F, a.rows, b.cols);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t k = 0; k < a.cols; ++k)
      for (std::size_t j = 0; j < b.cols; ++j)
        m.at(i, j) = a.F->add1(m.at(i, j), a.F->act(b.at(k, j), a.at(i, k)));
  return m;
}

Mat1 m1_random(const FramePtr& F, std::size_t r, std::size_t c, std::mt19937_64& rng) {
  Mat1 m{F, r, c, {}};
  m.e.reserve(r * c);
  for (std::size_t i = 0; i < r * c; ++i) m.e.push_back(F->random1(rng));
  return m;
}

// --- windows ----------------------------------------------------------------

Window make_window(const FramePtr& F, std::size_t r0, std::size_t r1, Mat0 psi) {
  std::size_t h = r0 + r1;
  require(psi.rows == h && psi.cols == h, "make_window: psi shape mismatch");
  Window w;
  w.F = F;
  w.r0 = r0;
  w.r1 = r1;
  w.psi_inv = m0_inv(psi);  // throws if not invertible
  w.psi = std::move(psi);
  return w;
}

Window unit_window(const FramePtr& F) { return make_window(F, 1, 0, m0_identity(F, 1)); }
Window twist_window(const FramePtr& F) { return make_window(F, 0, 1, m0_identity(F, 1)); }

Window direct_sum(const Window& a, const Window& b) {
  require(a.F == b.F, "direct_sum: different frames");
  const FramePtr& F = a.F;
  std::size_t r0 = a.r0 + b.r0, r1 = a.r1 + b.r1;
  Mat0 psi = m0_zero(F, r0 + r1, r0 + r1);
  // interleave: rows/cols [0, a.r0) from a's L0, [a.r0, r0) from b's L0, etc.
  auto newi = [&](bool from_b, std::size_t idx) {
    const Window& w = from_b ? b : a;
    std::size_t off0 = from_b ? a.r0 : 0, off1 = from_b ? a.r1 : 0;
    return idx < w.r0 ? off0 + idx : r0 + off1 + (idx - w.r0);
  };
  for (int which = 0; which < 2; ++which) {
    const Window& w = which ? b : a;
    for (std::size_t i = 0; i < w.height(); ++i)
      for (std::size_t j = 0; j < w.height(); ++j)
        psi.at(newi(which, i), newi(which, j)) = w.psi.at(i, j);
  }
  return make_window(F, r0, r1, std::move(psi));
}

nlohmann::json window_to_json(const Window& w) {
  nlohmann::json psi = nlohmann::json::array();
  for (std::size_t i = 0; i < w.height(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t j = 0; j < w.height(); ++j) row.push_back(w.F->a0_to_json(w.psi.at(i, j)));
    psi.push_back(std::move(row));
  }
  return {{"frame_id", w.F->id}, {"r0", w.r0}, {"r1", w.r1}, {"psi", std::move(psi)}};
}

Window window_from_json(const FramePtr& F, const nlohmann::json& j) {
  require(j.at("frame_id").get<std::string>() == F->id, "window_from_json: frame_id mismatch");
  std::size_t r0 = j.at("r0").get<std::size_t>(), r1 = j.at("r1").get<std::size_t>();
  std::size_t h = r0 + r1;
  const auto& psi = j.at("psi");
  require(psi.size() == h, "window_from_json: psi row count mismatch");
  Mat0 m = m0_zero(F, h, h);
  for (std::size_t i = 0; i < h; ++i) {
    require(psi[i].size() == h, "window_from_json: psi column count mismatch");
    for (std::size_t jj = 0; jj < h; ++jj) m.at(i, jj) = F->a0_from_json(psi[i][jj]);
  }
  return make_window(F, r0, r1, std::move(m));
}

namespace {

// X = [[a, tau(b)], [c, e]]
Mat0 block_X(const WindowMorphism& f) {
  const FramePtr& F = f.a.F;
  std::size_t R0 = f.dst->r0, R1 = f.dst->r1, c0 = f.src->r0, c1 = f.src->r1;
  Mat0 x = m0_zero(F, R0 + R1, c0 + c1);
  Mat0 tb = m0_tau(f.b);
  for (std::size_t i = 0; i < R0; ++i) {
    for (std::size_t j = 0; j < c0; ++j) x.at(i, j) = f.a.at(i, j);
    for (std::size_t j = 0; j < c1; ++j) x.at(i, c0 + j) = tb.at(i, j);
  }
  for (std::size_t i = 0; i < R1; ++i) {
    for (std::size_t j = 0; j < c0; ++j) x.at(R0 + i, j) = f.c.at(i, j);
    for (std::size_t j = 0; j < c1; ++j) x.at(R0 + i, c0 + j) = f.e.at(i, j);
  }
  return x;
}

// Y = [[sigma0(a), sigma1(b)], [d*sigma0(c), sigma0(e)]]
Mat0 block_Y(const WindowMorphism& f) {
  const FramePtr& F = f.a.F;
  auto s0 = [&](const A0Elem& x) { return F->sigma0(x); };
  std::size_t R0 = f.dst->r0, R1 = f.dst->r1, c0 = f.src->r0, c1 = f.src->r1;
  Mat0 y = m0_zero(F, R0 + R1, c0 + c1);
  Mat0 sa = m0_map(f.a, s0), sb = m0_sigma1(f.b), sc = m0_scale(F->d(), m0_map(f.c, s0)),
       se = m0_map(f.e, s0);
  for (std::size_t i = 0; i < R0; ++i) {
    for (std::size_t j = 0; j < c0; ++j) y.at(i, j) = sa.at(i, j);
    for (std::size_t j = 0; j < c1; ++j) y.at(i, c0 + j) = sb.at(i, j);
  }
  for (std::size_t i = 0; i < R1; ++i) {
    for (std::size_t j = 0; j < c0; ++j) y.at(R0 + i, j) = sc.at(i, j);
    for (std::size_t j = 0; j < c1; ++j) y.at(R0 + i, c0 + j) = se.at(i, j);
  }
  return y;
}

}  // namespace

MorphismCheck is_morphism(const WindowMorphism& f) {
  Mat0 res = m0_sub(m0_mul(block_X(f), f.src->psi), m0_mul(f.dst->psi, block_Y(f)));
  MorphismCheck out;
  out.ok = m0_is_zero(res);
  out.residual = std::move(res);
  return out;
}

WindowMorphism identity_morphism(const Window& m) {
  WindowMorphism f;
  f.src = &m;
  f.dst = &m;
  f.a = m0_identity(m.F, m.r0);
  f.b = m1_zero(m.F, m.r0, m.r1);
  f.c = m0_zero(m.F, m.r1, m.r0);
  f.e = m0_identity(m.F, m.r1);
  return f;
}

WindowMorphism compose(const WindowMorphism& g, const WindowMorphism& f) {
  require(g.src == f.dst, "compose: middle windows differ");
  const FramePtr& F = f.a.F;
  WindowMorphism h;
  h.src = f.src;
  h.dst = g.dst;
  h.a = m0_add(m0_mul(g.a, f.a), m0_mul(m0_tau(g.b), f.c));
  h.b = m1_add(m1_act_left(g.a, f.b), m1_act_right(g.b, f.e));
  h.c = m0_add(m0_mul(g.c, f.a), m0_mul(g.e, f.c));
  h.e = m0_add(m0_mul(g.c, m0_tau(f.b)), m0_mul(g.e, f.e));
  (void)F;
  return h;
}

Window dual_window(const Window& m) {
  const FramePtr& F = m.F;
  std::size_t r0 = m.r1, r1 = m.r0, h = m.height();
  auto old = [&](std::size_t j) { return j < m.r1 ? m.r0 + j : j - m.r1; };
  Mat0 psi = m0_zero(F, h, h);
  for (std::size_t j = 0; j < h; ++j)
    for (std::size_t k = 0; k < h; ++k) psi.at(j, k) = m.psi_inv.at(old(k), old(j));
  return make_window(F, r0, r1, std::move(psi));
}

// --- frame homomorphisms -----------------------------------------------------

FrameHom FrameHom::identity(const FramePtr& F) {
  FrameHom h;
  h.src = F;
  h.dst = F;
  h.g0 = [](const A0Elem& x) { return x; };
  h.g1 = [](const A1Elem& x) { return x; };
  h.u = F->one0();
  return h;
}

FrameHom FrameHom::compose_with(const FrameHom& then) const {
  require(dst == then.src, "FrameHom::compose_with: frames do not chain");
  FrameHom h;
  h.src = src;
  h.dst = then.dst;
  auto f0 = g0, s0 = then.g0;
  auto f1 = g1, s1 = then.g1;
  h.g0 = [f0, s0](const A0Elem& x) { return s0(f0(x)); };
  h.g1 = [f1, s1](const A1Elem& x) { return s1(f1(x)); };
  h.u = then.dst->mul0(then.g0(u), then.u);
  return h;
}

void verify_frame_hom(const FrameHom& h, std::size_t samples, u64 seed) {
  std::mt19937_64 rng(seed);
  const FramePtr& A = h.src;
  const FramePtr& B = h.dst;
  if (!B->is_unit0(h.u)) throw std::logic_error("frame hom: u is not a unit");
  if (!B->eq0(h.g0(A->d()), B->mul0(h.u, B->d())))
    throw std::logic_error("frame hom: g0(d) != u*d");
  if (!B->eq0(h.g0(A->one0()), B->one0())) throw std::logic_error("frame hom: g0(1) != 1");
  for (std::size_t s = 0; s < samples; ++s) {
    A0Elem x = A->random0(rng), y = A->random0(rng);
    if (!B->eq0(h.g0(A->add0(x, y)), B->add0(h.g0(x), h.g0(y))))
      throw std::logic_error("frame hom: g0 not additive");
    if (!B->eq0(h.g0(A->mul0(x, y)), B->mul0(h.g0(x), h.g0(y))))
      throw std::logic_error("frame hom: g0 not multiplicative");
    if (!B->eq0(h.g0(A->sigma0(x)), B->sigma0(h.g0(x))))
      throw std::logic_error("frame hom: g0 does not intertwine sigma0");
    A1Elem m = A->random1(rng);
    if (!B->eq0(h.g0(A->tau(m)), B->tau(h.g1(m))))
      throw std::logic_error("frame hom: g0(tau(x)) != tau(g1(x))");
    if (!B->eq0(B->sigma1(h.g1(m)), B->mul0(h.u, h.g0(A->sigma1(m)))))
      throw std::logic_error("frame hom: sigma1(g1(x)) != u*g0(sigma1(x))");
  }
}

Window base_change(const Window& m, const FrameHom& h) {
  require(m.F == h.src, "base_change: window frame mismatch");
  const FramePtr& B = h.dst;
  Mat0 psi = m0_map(m.psi, h.g0);
  psi.F = B;
  // absorb the unit: columns indexed by the degree-1 summand pick up u
  for (std::size_t i = 0; i < m.height(); ++i)
    for (std::size_t j = m.r0; j < m.height(); ++j)
      psi.at(i, j) = B->mul0(psi.at(i, j), h.u);
  return make_window(B, m.r0, m.r1, std::move(psi));
}

// --- morphism lifting --------------------------------------------------------

WindowMorphism lift_morphism(const Window& m, const Window& mp, const WindowMorphism& f0,
                             const LeveledIdeal& K) {
  const FramePtr& F = m.F;
  require(K.F == F, "lift_morphism: ideal frame mismatch");
  WindowMorphism f = f0;
  f.src = &m;
  f.dst = &mp;
  std::size_t h = m.height(), hp = mp.height();

  // R0 = (Psi' Y0 - X0 Psi) Psi^{-1}; entries lie in K when f0 is a morphism mod K
  Mat0 R0 = m0_mul(m0_sub(m0_mul(mp.psi, block_Y(f)), m0_mul(block_X(f), m.psi)), m.psi_inv);
  for (const auto& x : R0.e)
    if (K.contains && !K.contains(x))
      throw std::invalid_argument("lift_morphism: defect is not in the ideal");

  // D = R0 + Psi' * diag(1,d) * sigma_dot(D) * diag(d,1) * Psi^{-1}, nu steps
  const A0Elem d = F->d();
  auto twist = [&](const Mat0& D) {
    Mat0 s = m0_map(D, [&](const A0Elem& x) { return K.sigma_dot(x); });
    for (std::size_t i = mp.r0; i < hp; ++i)
      for (std::size_t j = 0; j < h; ++j) s.at(i, j) = F->mul0(d, s.at(i, j));
    for (std::size_t i = 0; i < hp; ++i)
      for (std::size_t j = 0; j < m.r0; ++j) s.at(i, j) = F->mul0(s.at(i, j), d);
    return m0_mul(m0_mul(mp.psi, s), m.psi_inv);
  };
  Mat0 D = m0_zero(F, hp, h);
  for (std::size_t step = 0; step < K.nu; ++step) D = m0_add(R0, twist(D));
  if (K.nu == 0) D = R0;  // sigma_dot == 0: the defect itself is the correction

  // add the correction blocks
  for (std::size_t i = 0; i < mp.r0; ++i) {
    for (std::size_t j = 0; j < m.r0; ++j) f.a.at(i, j) = F->add0(f.a.at(i, j), D.at(i, j));
    for (std::size_t j = 0; j < m.r1; ++j)
      f.b.at(i, j) = F->add1(f.b.at(i, j), K.tau_inv_K(D.at(i, m.r0 + j)));
  }
  for (std::size_t i = 0; i < mp.r1; ++i) {
    for (std::size_t j = 0; j < m.r0; ++j)
      f.c.at(i, j) = F->add0(f.c.at(i, j), D.at(mp.r0 + i, j));
    for (std::size_t j = 0; j < m.r1; ++j)
      f.e.at(i, j) = F->add0(f.e.at(i, j), D.at(mp.r0 + i, m.r0 + j));
  }
  return f;
}

// --- Hodge filtration lifting -------------------------------------------------

Window hodge_lift(const FramePtr& A, const Window& n, const Mat0& u) {
  const FramePtr& B = n.F;
  std::size_t r0 = n.r0, r1 = n.r1, h = r0 + r1;
  require(u.rows == h && u.cols == h, "hodge_lift: basis matrix shape mismatch");
  Mat0 uinv = m0_inv(u);  // must be invertible
  (void)uinv;

  // Columns of C: images of the new basis under the structure maps, in the
  // old basis.  Degree-0 columns: phi0(u e_i) = Psi * diag(1, d) * sigma0(u) col i.
  Mat0 C = m0_zero(B, h, h);
  Mat0 su = m0_map(u, [&](const A0Elem& x) { return B->sigma0(x); });
  const A0Elem d = B->d();
  {
    Mat0 scaled = su;
    for (std::size_t i = r0; i < h; ++i)
      for (std::size_t j = 0; j < h; ++j) scaled.at(i, j) = B->mul0(d, scaled.at(i, j));
    Mat0 c0 = m0_mul(n.psi, scaled);
    for (std::size_t i = 0; i < h; ++i)
      for (std::size_t j = 0; j < r0; ++j) C.at(i, j) = c0.at(i, j);
  }
  // Degree-1 columns: the new degree-1 basis vector u f_j has top coordinates
  // in the filtration ideal of B (its reduction lies in the Hodge filtration),
  // so phi1 applies via tau_preimage there and sigma0 on the bottom part:
  //   phi1(u f_j) = Psi * (sigma1(tau_preimage(u_top)), sigma0(u_bot)).
  for (std::size_t j = 0; j < r1; ++j) {
    Mat0 col = m0_zero(B, h, 1);
    for (std::size_t k = 0; k < r0; ++k) {
      const A0Elem& x = u.at(k, r0 + j);
      if (!B->base->is_zero(B->project(x)))
        throw std::invalid_argument("hodge_lift: column does not lift the Hodge filtration");
      col.at(k, 0) = B->sigma1(B->tau_preimage(x));
    }
    for (std::size_t k = 0; k < r1; ++k) col.at(r0 + k, 0) = B->sigma0(u.at(r0 + k, r0 + j));
    Mat0 img = m0_mul(n.psi, col);
    for (std::size_t i = 0; i < h; ++i) C.at(i, r0 + j) = img.at(i, 0);
  }
  Mat0 psiA = m0_mul(m0_inv(u), C);
  psiA.F = A;
  return make_window(A, r0, r1, std::move(psiA));
}

// --- section complex ----------------------------------------------------------

std::vector<A0Elem> gamma_apply(const Window& m, const std::vector<A1Elem>& x1,
                                const std::vector<A0Elem>& x0) {
  const FramePtr& F = m.F;
  require(x1.size() == m.r0 && x0.size() == m.r1, "gamma_apply: coordinate shape mismatch");
  std::size_t h = m.height();
  Mat0 col = m0_zero(F, h, 1);
  for (std::size_t i = 0; i < m.r0; ++i) col.at(i, 0) = F->sigma1(x1[i]);
  for (std::size_t i = 0; i < m.r1; ++i) col.at(m.r0 + i, 0) = F->sigma0(x0[i]);
  Mat0 img = m0_mul(m.psi, col);
  std::vector<A0Elem> out;
  out.reserve(h);
  for (std::size_t i = 0; i < m.r0; ++i) out.push_back(F->sub0(img.at(i, 0), F->tau(x1[i])));
  for (std::size_t i = 0; i < m.r1; ++i)
    out.push_back(F->sub0(img.at(m.r0 + i, 0), x0[i]));
  return out;
}

}  // namespace wittlab
