#include "wittlab/frame_instances.hpp"

#include <sstream>
#include <stdexcept>

#include "wittlab/witt.hpp"

namespace wittlab {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

RingElement random_elem(const RingPtr& R, std::mt19937_64& rng) {
  std::vector<u64> c(R->rank);
  for (auto& x : c) x = rng() % R->mod;
  return R->elem(std::move(c));
}

WittVec random_witt(const RingPtr& R, std::size_t n, std::mt19937_64& rng) {
  WittVec w{R, {}};
  w.c.reserve(n);
  for (std::size_t i = 0; i < n; ++i) w.c.push_back(random_elem(R, rng));
  return w;
}

std::vector<RingElement> ideal_basis_elems(const RingIdeal& I) {
  std::vector<RingElement> out;
  for (std::size_t r = 0; r < I.basis.rows; ++r) {
    std::vector<u64> c(I.basis.cols);
    bool nz = false;
    for (std::size_t j = 0; j < I.basis.cols; ++j) {
      c[j] = I.basis.at(r, j);
      nz = nz || c[j] != 0;
    }
    if (nz) out.push_back(I.ring->elem(std::move(c)));
  }
  return out;
}

RingElement random_ideal_elem(const RingIdeal& I, std::mt19937_64& rng) {
  RingElement x = I.ring->zero_elem();
  for (const auto& b : ideal_basis_elems(I))
    x = I.ring->add(x, I.ring->scal(rng() % I.ring->mod, b));
  return x;
}

std::vector<RingElement> enumerate_ideal(const RingIdeal& I, std::size_t cap) {
  std::vector<RingElement> basis = ideal_basis_elems(I);
  std::size_t total = 1;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    if (total > cap / I.ring->mod + 1) return {};
    total *= I.ring->mod;
  }
  if (total > cap) return {};
  std::vector<RingElement> out;
  out.reserve(total);
  std::vector<u64> digits(basis.size(), 0);
  for (std::size_t t = 0; t < total; ++t) {
    RingElement x = I.ring->zero_elem();
    std::size_t rem = t;
    for (std::size_t i = 0; i < basis.size(); ++i) {
      u64 d = rem % I.ring->mod;
      rem /= I.ring->mod;
      if (d) x = I.ring->add(x, I.ring->scal(d, basis[i]));
    }
    out.push_back(std::move(x));
  }
  return out;
}

// dense split at the vector's own length; the standard split zero-extends,
// which fabricates top components for vectors whose continuation is unknown
ShearedWitt split_exact(const SRingPtr& S, const WittVec& w) {
  WittVec rho = witt_map(S->rs.projection, w);
  WittVec back = witt_map(S->rs.section, rho);
  WittVec diff = witt_sub(w, back);
  HatWittVec eta = dense_to_hat(diff);
  if (eta.support_end() > S->B)
    throw std::invalid_argument("split_exact: sparse support exceeds the bound");
  return s_make(S, witt_truncate(rho, S->N), std::move(eta));
}

}  // namespace

// --- PdIdeal -------------------------------------------------------------------

RingElement PdIdeal::gamma_at(u64 m, const RingElement& x) const {
  if (m == 0) return Rp->one_elem();
  if (m == 1) return x;
  return gamma(m, x);
}

PdIdeal PdIdeal::make(const RingPtr& Rp, RingIdeal ideal) {
  RingPtr R = Rp;
  return make_with_gamma(Rp, std::move(ideal),
                         [R](u64, const RingElement&) { return R->zero_elem(); });
}

PdIdeal PdIdeal::make_with_gamma(const RingPtr& Rp, RingIdeal ideal,
                                 std::function<RingElement(u64, const RingElement&)> gamma) {
  require(Rp->k == 1, "PdIdeal: the thickening must be an F_p-algebra");
  require(ideal.is_nilpotent_ideal(), "PdIdeal: ideal is not nilpotent");
  PdIdeal I;
  I.Rp = Rp;
  I.ideal = std::move(ideal);
  I.gamma = std::move(gamma);
  validate_pd(I);
  return I;
}

void validate_pd(const PdIdeal& I, std::size_t max_enumerate) {
  const RingPtr& R = I.Rp;
  std::vector<RingElement> elems = enumerate_ideal(I.ideal, max_enumerate);
  if (elems.empty()) {
    std::mt19937_64 rng(20260826);
    for (std::size_t s = 0; s < 64; ++s) elems.push_back(random_ideal_elem(I.ideal, rng));
  }
  const u64 max_m = 2 * I.Rp->p + 2;
  for (const auto& x : elems) {
    for (u64 m = 1; m <= max_m; ++m)
      require(I.ideal.contains(I.gamma_at(m, x)), "pd: gamma_m(x) not in the ideal");
    // gamma_m(x) * gamma_n(x) = C(m+n, m) * gamma_{m+n}(x)
    for (u64 m = 1; m + 1 <= max_m; ++m)
      for (u64 nn = 1; m + nn <= max_m; ++nn) {
        RingElement lhs = R->mul(I.gamma_at(m, x), I.gamma_at(nn, x));
        RingElement rhs = R->scal(binom_mod(m + nn, m, R->mod), I.gamma_at(m + nn, x));
        require(lhs == rhs, "pd: product axiom fails");
      }
    // gamma_m(a x) = a^m gamma_m(x)
    for (std::size_t bi = 0; bi < R->rank; ++bi) {
      RingElement a = R->basis_elem(bi);
      for (u64 m = 2; m <= max_m; ++m)
        require(I.gamma_at(m, R->mul(a, x)) == R->mul(R->pow(a, m), I.gamma_at(m, x)),
                "pd: scaling axiom fails");
    }
  }
  std::size_t pairs = 0;
  for (const auto& x : elems) {
    for (const auto& y : elems) {
      if (++pairs > 4096) return;
      // gamma_m(x+y) = sum_{i+j=m} gamma_i(x) gamma_j(y)
      for (u64 m = 2; m <= max_m; ++m) {
        RingElement rhs = R->zero_elem();
        for (u64 i = 0; i <= m; ++i)
          rhs = R->add(rhs, R->mul(I.gamma_at(i, x), I.gamma_at(m - i, y)));
        require(I.gamma_at(m, R->add(x, y)) == rhs, "pd: addition axiom fails");
      }
    }
  }
}

// --- DividedWittCoords -----------------------------------------------------------

DividedWittCoords DividedWittCoords::make(u64 p, std::size_t len) {
  DividedWittCoords C;
  C.p = p;
  C.len = len;
  C.c.resize(len);
  for (std::size_t n = 0; n < len; ++n) {
    C.c[n].resize(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
      u64 m = static_cast<u64>(n - i);
      // v_p((p^m)!) = (p^m - 1)/(p - 1); unit of (p^m)! mod p is (-1)^v
      u64 pm = 1;
      for (u64 t = 0; t < m; ++t) pm *= p;
      u64 vfact = (pm - 1) / (p - 1);
      require(vfact >= m, "DividedWittCoords: coefficient is not an integer");
      u64 val = vfact - m;
      u64 unit = (vfact % 2 == 0 || p == 2) ? 1 : p - 1;
      if (pm <= 40320) {  // cross-check the closed form against the factorial
        auto vu = factorial_vu(pm, p, p);
        require(vu.first == vfact && vu.second == unit % p,
                "DividedWittCoords: factorial cross-check failed");
      }
      C.c[n][i] = {val, unit % p};
    }
    require(C.c[n][n] == std::make_pair<u64, u64>(0, 1), "DividedWittCoords: c_{n,n} != 1");
  }
  return C;
}

u64 DividedWittCoords::c_mod_p(std::size_t n, std::size_t i) const {
  const auto& [val, unit] = c[n][i];
  return val > 0 ? 0 : unit;
}

std::vector<RingElement> wprime(const DividedWittCoords& C, const PdIdeal& I, const WittVec& x) {
  const RingPtr& R = I.Rp;
  std::vector<RingElement> out;
  out.reserve(x.len());
  for (std::size_t n = 0; n < x.len(); ++n) {
    RingElement s = R->zero_elem();
    for (std::size_t i = 0; i <= n; ++i) {
      u64 cc = C.c_mod_p(n, i);
      if (cc == 0) continue;
      u64 pm = 1;
      for (std::size_t t = 0; t < n - i; ++t) pm *= C.p;
      s = R->add(s, R->scal(cc, I.gamma_at(pm, x.c[i])));
    }
    out.push_back(std::move(s));
  }
  return out;
}

WittVec wprime_inv(const DividedWittCoords& C, const PdIdeal& I,
                   const std::vector<RingElement>& b) {
  const RingPtr& R = I.Rp;
  WittVec x{R, {}};
  for (std::size_t n = 0; n < b.size(); ++n) {
    RingElement s = b[n];
    for (std::size_t i = 0; i < n; ++i) {
      u64 cc = C.c_mod_p(n, i);
      if (cc == 0) continue;
      u64 pm = 1;
      for (std::size_t t = 0; t < n - i; ++t) pm *= C.p;
      s = R->sub(s, R->scal(cc, I.gamma_at(pm, x.c[i])));
    }
    x.c.push_back(std::move(s));  // c_{n,n} = 1
  }
  return x;
}

WittVec pd_embed(const DividedWittCoords& C, const PdIdeal& I, const RingElement& a,
                 std::size_t len) {
  std::vector<RingElement> b(len, I.Rp->zero_elem());
  require(I.ideal.contains(a), "pd_embed: element is not in the ideal");
  b[0] = a;
  return wprime_inv(C, I, b);
}

// --- WittFrame -------------------------------------------------------------------

A0Elem WittFrame::wrap(WittVec w) const { return A0Elem{std::move(w)}; }
const WittVec& WittFrame::unwrap(const A0Elem& x) const { return std::get<WittVec>(x.v); }

A0Elem WittFrame::zero0() const { return wrap(witt_zero(carrier, n)); }
A0Elem WittFrame::one0() const { return wrap(witt_one(carrier, n)); }
A0Elem WittFrame::from_int0(i64 v) const { return wrap(witt_from_int(carrier, n, v)); }
A0Elem WittFrame::add0(const A0Elem& x, const A0Elem& y) const {
  return wrap(witt_add(unwrap(x), unwrap(y)));
}
A0Elem WittFrame::neg0(const A0Elem& x) const { return wrap(witt_neg(unwrap(x))); }
A0Elem WittFrame::mul0(const A0Elem& x, const A0Elem& y) const {
  return wrap(witt_mul(unwrap(x), unwrap(y)));
}
bool WittFrame::eq0(const A0Elem& x, const A0Elem& y) const { return unwrap(x) == unwrap(y); }
bool WittFrame::is_unit0(const A0Elem& x) const { return witt_is_unit(unwrap(x)); }
A0Elem WittFrame::inv0(const A0Elem& x) const { return wrap(witt_inv(unwrap(x))); }

A1Elem WittFrame::zero1() const { return A1Elem{zero0(), std::nullopt}; }
A1Elem WittFrame::add1(const A1Elem& x, const A1Elem& y) const {
  return A1Elem{add0(x.main, y.main), std::nullopt};
}
A1Elem WittFrame::neg1(const A1Elem& x) const { return A1Elem{neg0(x.main), std::nullopt}; }
bool WittFrame::eq1(const A1Elem& x, const A1Elem& y) const { return eq0(x.main, y.main); }
A1Elem WittFrame::act(const A0Elem& a, const A1Elem& m) const {
  return A1Elem{wrap(witt_mul(frobenius_F(unwrap(a)), unwrap(m.main))), std::nullopt};
}
A0Elem WittFrame::tau(const A1Elem& x) const { return wrap(verschiebung_V(unwrap(x.main))); }
A0Elem WittFrame::sigma0(const A0Elem& x) const { return wrap(frobenius_F(unwrap(x))); }
A0Elem WittFrame::sigma1(const A1Elem& x) const { return x.main; }
A0Elem WittFrame::d() const { return from_int0(static_cast<i64>(p)); }
RingElement WittFrame::project(const A0Elem& x) const { return unwrap(x).c[0]; }
A1Elem WittFrame::tau_preimage(const A0Elem& x) const {
  const WittVec& w = unwrap(x);
  require(carrier->is_zero(w.c[0]), "tau_preimage: element is not in the filtration ideal");
  WittVec y{carrier, {}};
  for (std::size_t i = 1; i < n; ++i) y.c.push_back(w.c[i]);
  y.c.push_back(carrier->zero_elem());
  return A1Elem{wrap(std::move(y)), std::nullopt};
}
A0Elem WittFrame::random0(std::mt19937_64& rng) const { return wrap(random_witt(carrier, n, rng)); }
A1Elem WittFrame::random1(std::mt19937_64& rng) const {
  return A1Elem{random0(rng), std::nullopt};
}
std::string WittFrame::show0(const A0Elem& x) const {
  const WittVec& w = unwrap(x);
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < w.len(); ++i) os << (i ? ", " : "") << carrier->show(w.c[i]);
  os << ")";
  return os.str();
}
nlohmann::json WittFrame::a0_to_json(const A0Elem& x) const {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& c : unwrap(x).c) j.push_back(c.c);
  return j;
}
A0Elem WittFrame::a0_from_json(const nlohmann::json& j) const {
  require(j.is_array() && j.size() == n, "a0_from_json: expected a length-n coordinate array");
  WittVec w{carrier, {}};
  for (const auto& cj : j) w.c.push_back(carrier->elem(cj.get<std::vector<u64>>()));
  return wrap(std::move(w));
}

// --- ShearedFrame ------------------------------------------------------------------

A0Elem ShearedFrame::wrap(ShearedWitt w) const { return A0Elem{std::move(w)}; }
const ShearedWitt& ShearedFrame::unwrap(const A0Elem& x) const {
  return std::get<ShearedWitt>(x.v);
}

A0Elem ShearedFrame::zero0() const { return wrap(s_zero(S)); }
A0Elem ShearedFrame::one0() const { return wrap(s_one(S)); }
A0Elem ShearedFrame::from_int0(i64 v) const { return wrap(s_from_int(S, v)); }
A0Elem ShearedFrame::add0(const A0Elem& x, const A0Elem& y) const {
  return wrap(s_add(unwrap(x), unwrap(y)));
}
A0Elem ShearedFrame::neg0(const A0Elem& x) const { return wrap(s_neg(unwrap(x))); }
A0Elem ShearedFrame::mul0(const A0Elem& x, const A0Elem& y) const {
  return wrap(s_mul(unwrap(x), unwrap(y)));
}
bool ShearedFrame::eq0(const A0Elem& x, const A0Elem& y) const {
  return s_embed(unwrap(x), S->N) == s_embed(unwrap(y), S->N);
}
bool ShearedFrame::is_unit0(const A0Elem& x) const { return s_is_unit(unwrap(x)); }
A0Elem ShearedFrame::inv0(const A0Elem& x) const { return wrap(s_inv(unwrap(x))); }

A1Elem ShearedFrame::zero1() const { return A1Elem{zero0(), std::nullopt}; }
A1Elem ShearedFrame::add1(const A1Elem& x, const A1Elem& y) const {
  return A1Elem{add0(x.main, y.main), std::nullopt};
}
A1Elem ShearedFrame::neg1(const A1Elem& x) const { return A1Elem{neg0(x.main), std::nullopt}; }
bool ShearedFrame::eq1(const A1Elem& x, const A1Elem& y) const { return eq0(x.main, y.main); }
A1Elem ShearedFrame::act(const A0Elem& a, const A1Elem& m) const {
  return A1Elem{wrap(s_mul(s_F(unwrap(a)), unwrap(m.main))), std::nullopt};
}
A0Elem ShearedFrame::tau(const A1Elem& x) const { return wrap(s_Vtilde(unwrap(x.main))); }
A0Elem ShearedFrame::sigma0(const A0Elem& x) const { return wrap(s_F(unwrap(x))); }
A0Elem ShearedFrame::sigma1(const A1Elem& x) const { return x.main; }
A0Elem ShearedFrame::d() const {
  // ptilde = p - [p^2]
  RingElement psq = S->R->from_int(static_cast<i64>(p * p));
  return wrap(s_sub(s_from_int(S, static_cast<i64>(p)), s_teich(S, psq)));
}
RingElement ShearedFrame::project(const A0Elem& x) const { return s_pi(unwrap(x)); }
A1Elem ShearedFrame::tau_preimage(const A0Elem& x) const {
  const ShearedWitt& z = unwrap(x);
  require(S->R->is_zero(s_pi(z)), "tau_preimage: element is not in the filtration ideal");
  std::size_t L = S->work_len();
  WittVec dense = s_rep(z, L);
  WittVec shifted{S->R, {}};
  for (std::size_t i = 1; i < L; ++i) shifted.c.push_back(dense.c[i]);
  WittVec y = witt_mul(witt_inv(u0_in(S->R, L - 1)), shifted);
  ShearedWitt pre = split_exact(S, y);  // top components are unknown, not zero
  // the self-check must use this class's tau: subclasses enlarge A1 and their
  // tau reads the aux coordinate, which is not set here
  if (!eq0(wrap(s_Vtilde(pre)), x))
    throw std::invalid_argument("tau_preimage: reconstruction failed");
  return A1Elem{wrap(std::move(pre)), std::nullopt};
}
A0Elem ShearedFrame::random0(std::mt19937_64& rng) const { return wrap(s_random(S, rng)); }
A1Elem ShearedFrame::random1(std::mt19937_64& rng) const {
  return A1Elem{random0(rng), std::nullopt};
}
std::string ShearedFrame::show0(const A0Elem& x) const {
  const ShearedWitt& z = unwrap(x);
  std::ostringstream os;
  os << "[lambda=(";
  for (std::size_t i = 0; i < z.lambda.len(); ++i)
    os << (i ? ", " : "") << S->rs.field->show(z.lambda.c[i]);
  os << "); eta={";
  bool first = true;
  for (const auto& [idx, val] : z.eta.e) {
    os << (first ? "" : ", ") << idx << ": " << S->R->show(val);
    first = false;
  }
  os << "}]";
  return os.str();
}
nlohmann::json ShearedFrame::a0_to_json(const A0Elem& x) const {
  const ShearedWitt& z = unwrap(x);
  nlohmann::json lam = nlohmann::json::array();
  for (const auto& c : z.lambda.c) lam.push_back(c.c);
  nlohmann::json eta = nlohmann::json::array();
  for (const auto& [idx, val] : z.eta.e) eta.push_back({{"i", idx}, {"v", val.c}});
  return {{"lambda", std::move(lam)}, {"eta", std::move(eta)}};
}
A0Elem ShearedFrame::a0_from_json(const nlohmann::json& j) const {
  WittVec lam{S->rs.field, {}};
  for (const auto& cj : j.at("lambda")) lam.c.push_back(S->rs.field->elem(cj.get<std::vector<u64>>()));
  require(lam.len() == S->N, "a0_from_json: lambda length mismatch");
  std::map<u64, RingElement> eta;
  for (const auto& ej : j.at("eta"))
    eta.emplace(ej.at("i").get<u64>(), S->R->elem(ej.at("v").get<std::vector<u64>>()));
  return wrap(s_make(S, std::move(lam), hat_make(S->R, std::move(eta))));
}

// --- RelativeWittFrame ---------------------------------------------------------------

A1Elem RelativeWittFrame::zero1() const { return A1Elem{WittFrame::zero0(), I.Rp->zero_elem()}; }
A1Elem RelativeWittFrame::add1(const A1Elem& x, const A1Elem& y) const {
  return A1Elem{add0(x.main, y.main), I.Rp->add(*x.aux, *y.aux)};
}
A1Elem RelativeWittFrame::neg1(const A1Elem& x) const {
  return A1Elem{neg0(x.main), I.Rp->neg(*x.aux)};
}
bool RelativeWittFrame::eq1(const A1Elem& x, const A1Elem& y) const {
  return eq0(x.main, y.main) && *x.aux == *y.aux;
}
A1Elem RelativeWittFrame::act(const A0Elem& a, const A1Elem& m) const {
  return A1Elem{wrap(witt_mul(frobenius_F(unwrap(a)), unwrap(m.main))),
                I.Rp->mul(unwrap(a).c[0], *m.aux)};
}
A0Elem RelativeWittFrame::tau(const A1Elem& x) const {
  return wrap(witt_add(verschiebung_V(unwrap(x.main)), pd_embed(coords, I, *x.aux, n)));
}
A0Elem RelativeWittFrame::sigma1(const A1Elem& x) const { return x.main; }
RingElement RelativeWittFrame::project(const A0Elem& x) const {
  return quot.apply(unwrap(x).c[0]);
}
A1Elem RelativeWittFrame::tau_preimage(const A0Elem& x) const {
  const WittVec& w = unwrap(x);
  require(I.ideal.contains(w.c[0]), "tau_preimage: component 0 is not in the pd ideal");
  WittVec rest = witt_sub(w, pd_embed(coords, I, w.c[0], n));
  require(carrier->is_zero(rest.c[0]), "tau_preimage: pd embedding did not cancel");
  WittVec y{carrier, {}};
  for (std::size_t i = 1; i < n; ++i) y.c.push_back(rest.c[i]);
  y.c.push_back(carrier->zero_elem());
  return A1Elem{wrap(std::move(y)), w.c[0]};
}
A1Elem RelativeWittFrame::random1(std::mt19937_64& rng) const {
  return A1Elem{WittFrame::random0(rng), random_ideal_elem(I.ideal, rng)};
}

// --- RelativeShearedFrame ---------------------------------------------------------------

namespace {

ShearedWitt sheared_pd_embed(const SRingPtr& S, const DividedWittCoords& C, const PdIdeal& I,
                             const RingElement& a) {
  WittVec dense = pd_embed(C, I, a, S->B);
  return s_make(S, witt_zero(S->rs.field, S->N), dense_to_hat(dense));
}

}  // namespace

A1Elem RelativeShearedFrame::zero1() const {
  return A1Elem{ShearedFrame::zero0(), I.Rp->zero_elem()};
}
A1Elem RelativeShearedFrame::add1(const A1Elem& x, const A1Elem& y) const {
  return A1Elem{add0(x.main, y.main), I.Rp->add(*x.aux, *y.aux)};
}
A1Elem RelativeShearedFrame::neg1(const A1Elem& x) const {
  return A1Elem{neg0(x.main), I.Rp->neg(*x.aux)};
}
bool RelativeShearedFrame::eq1(const A1Elem& x, const A1Elem& y) const {
  return eq0(x.main, y.main) && *x.aux == *y.aux;
}
A1Elem RelativeShearedFrame::act(const A0Elem& a, const A1Elem& m) const {
  return A1Elem{wrap(s_mul(s_F(unwrap(a)), unwrap(m.main))),
                I.Rp->mul(s_pi(unwrap(a)), *m.aux)};
}
A0Elem RelativeShearedFrame::tau(const A1Elem& x) const {
  return wrap(s_add(s_Vtilde(unwrap(x.main)), sheared_pd_embed(S, coords, I, *x.aux)));
}
A0Elem RelativeShearedFrame::sigma1(const A1Elem& x) const { return x.main; }
RingElement RelativeShearedFrame::project(const A0Elem& x) const {
  return quot.apply(s_pi(unwrap(x)));
}
A1Elem RelativeShearedFrame::tau_preimage(const A0Elem& x) const {
  RingElement a = s_pi(unwrap(x));
  require(I.ideal.contains(a), "tau_preimage: projection is not in the pd ideal");
  A0Elem rest = wrap(s_sub(unwrap(x), sheared_pd_embed(S, coords, I, a)));
  A1Elem out = ShearedFrame::tau_preimage(rest);
  out.aux = a;
  if (!eq0(tau(out), x)) throw std::invalid_argument("tau_preimage: reconstruction failed");
  return out;
}
A1Elem RelativeShearedFrame::random1(std::mt19937_64& rng) const {
  return A1Elem{ShearedFrame::random0(rng), random_ideal_elem(I.ideal, rng)};
}

// --- constructors ---------------------------------------------------------------------

FramePtr truncated_witt_frame(const RingPtr& R, std::size_t n) {
  require(R->k == 1, "truncated_witt_frame: base ring must be an F_p-algebra");
  require(n >= 1, "truncated_witt_frame: n >= 1");
  auto f = std::make_shared<WittFrame>();
  f->kind = "witt-n";
  f->id = "witt" + std::to_string(n) + "(" + R->name + ")";
  f->base = R;
  f->carrier = R;
  f->p = R->p;
  f->n = n;
  f->truncated = true;
  return f;
}

FramePtr witt_prec_frame(const RingPtr& R, std::size_t prec) {
  require(R->k == 1, "witt_prec_frame: base ring must be an F_p-algebra");
  auto f = std::make_shared<WittFrame>();
  f->kind = "witt-prec";
  f->id = "wittprec" + std::to_string(prec) + "(" + R->name + ")";
  f->base = R;
  f->carrier = R;
  f->p = R->p;
  f->n = prec;
  f->truncated = false;
  return f;
}

FramePtr sheared_frame(const RingPtr& R, std::size_t N, std::size_t B) {
  if (B == 0) B = 3 * N;
  auto f = std::make_shared<ShearedFrame>();
  f->S = ShearedWittRing::make(R, N, B);
  f->kind = "sheared";
  f->id = "sheared" + std::to_string(N) + "." + std::to_string(B) + "(" + R->name + ")";
  f->base = R;
  f->p = R->p;
  return f;
}

FramePtr relative_witt_frame(const PdIdeal& I, std::size_t prec) {
  auto f = std::make_shared<RelativeWittFrame>();
  QuotientResult q = make_quotient(I.Rp, I.ideal);
  f->kind = "rel-witt";
  f->id = "relwitt" + std::to_string(prec) + "(" + I.Rp->name + ")";
  f->base = q.quotient;
  f->carrier = I.Rp;
  f->p = I.Rp->p;
  f->n = prec;
  f->truncated = false;
  f->I = I;
  f->quot = q.projection;
  f->coords = DividedWittCoords::make(I.Rp->p, prec);
  return f;
}

FramePtr relative_sheared_frame(const PdIdeal& I, std::size_t N, std::size_t B) {
  if (B == 0) B = 3 * N;
  auto f = std::make_shared<RelativeShearedFrame>();
  QuotientResult q = make_quotient(I.Rp, I.ideal);
  f->S = ShearedWittRing::make(I.Rp, N, B);
  f->kind = "rel-sheared";
  f->id = "relsheared" + std::to_string(N) + "." + std::to_string(B) + "(" + I.Rp->name + ")";
  f->base = q.quotient;
  f->p = I.Rp->p;
  f->I = I;
  f->quot = q.projection;
  f->coords = DividedWittCoords::make(I.Rp->p, B);
  return f;
}

// --- frame homomorphisms -----------------------------------------------------------------

FrameHom relative_quotient_hom(const FramePtr& rel) {
  FrameHom h;
  h.src = rel;
  if (auto rw = std::dynamic_pointer_cast<const RelativeWittFrame>(rel)) {
    FramePtr dst = witt_prec_frame(rel->base, rw->n);
    auto dw = std::static_pointer_cast<const WittFrame>(dst);
    RingHom q = rw->quot;
    h.dst = dst;
    h.g0 = [dw, q](const A0Elem& x) { return dw->wrap(witt_map(q, std::get<WittVec>(x.v))); };
    auto g0 = h.g0;
    h.g1 = [g0](const A1Elem& x) { return A1Elem{g0(x.main), std::nullopt}; };
    h.u = dst->one0();
    return h;
  }
  auto rs = std::dynamic_pointer_cast<const RelativeShearedFrame>(rel);
  require(rs != nullptr, "relative_quotient_hom: frame is not relative");
  FramePtr dst = sheared_frame(rel->base, rs->S->N, rs->S->B);
  auto ds = std::static_pointer_cast<const ShearedFrame>(dst);
  RingHom q = rs->quot;
  SRingPtr Ssrc = rs->S;
  // map the representation structurally: the residue part through the induced
  // map of residue fields, the sparse part entrywise (nilpotents stay
  // nilpotent along a surjection of local rings)
  RingHom kmap = Ssrc->rs.section.compose(q).compose(ds->S->rs.projection);
  h.dst = dst;
  h.g0 = [ds, q, kmap](const A0Elem& x) {
    const ShearedWitt& z = std::get<ShearedWitt>(x.v);
    std::map<u64, RingElement> e;
    for (const auto& [idx, val] : z.eta.e) {
      RingElement img = q.apply(val);
      if (!q.dst->is_zero(img)) e.emplace(idx, std::move(img));
    }
    return ds->wrap(s_make(ds->S, witt_map(kmap, z.lambda), hat_make(q.dst, std::move(e))));
  };
  auto g0 = h.g0;
  h.g1 = [g0](const A1Elem& x) { return A1Elem{g0(x.main), std::nullopt}; };
  h.u = dst->one0();
  return h;
}

FrameHom relative_inclusion_hom(const FramePtr& rel) {
  FrameHom h;
  h.dst = rel;
  h.u = rel->one0();
  if (auto rw = std::dynamic_pointer_cast<const RelativeWittFrame>(rel)) {
    h.src = witt_prec_frame(rw->carrier, rw->n);
    h.g0 = [](const A0Elem& x) { return x; };
    RingPtr Rp = rw->carrier;
    h.g1 = [Rp](const A1Elem& x) { return A1Elem{x.main, Rp->zero_elem()}; };
    return h;
  }
  auto rs = std::dynamic_pointer_cast<const RelativeShearedFrame>(rel);
  require(rs != nullptr, "relative_inclusion_hom: frame is not relative");
  h.src = sheared_frame(rs->S->R, rs->S->N, rs->S->B);
  SRingPtr Sdst = rs->S;
  // rebuild on the relative frame's sheared ring so binary ops see one ring
  h.g0 = [rs, Sdst](const A0Elem& x) {
    const ShearedWitt& z = std::get<ShearedWitt>(x.v);
    return rs->wrap(s_make(Sdst, z.lambda, z.eta));
  };
  auto g0 = h.g0;
  RingPtr Rp = rs->S->R;
  h.g1 = [g0, Rp](const A1Elem& x) { return A1Elem{g0(x.main), Rp->zero_elem()}; };
  return h;
}

EmbedHom frame_hom_c(const FramePtr& shearedF, const FramePtr& wittF) {
  auto sf = std::dynamic_pointer_cast<const ShearedFrame>(shearedF);
  auto wf = std::dynamic_pointer_cast<const WittFrame>(wittF);
  require(sf && wf, "frame_hom_c: expected a sheared source and a Witt target");
  require(sf->S->R == wf->carrier && sf->S->N == wf->n,
          "frame_hom_c: ring or precision mismatch");
  const RingPtr& R = wf->carrier;
  std::size_t N = wf->n;
  WittVec u0 = u0_in(R, N);
  WittVec alpha = alpha_in(R, N);
  require(alpha == witt_mul(u0, frobenius_F(alpha)), "frame_hom_c: alpha != u0*F(alpha)");
  EmbedHom out;
  out.hom.src = shearedF;
  out.hom.dst = wittF;
  out.hom.g0 = [wf, N](const A0Elem& x) {
    return wf->wrap(s_embed(std::get<ShearedWitt>(x.v), N));
  };
  out.hom.g1 = [wf, u0, N](const A1Elem& x) {
    return A1Elem{wf->wrap(witt_mul(u0, s_embed(std::get<ShearedWitt>(x.main.v), N))),
                  std::nullopt};
  };
  out.hom.u = wf->wrap(u0);
  out.alpha = wf->wrap(alpha);
  return out;
}

// --- leveled ideals -----------------------------------------------------------------------

LeveledIdeal relative_leveled_ideal(const FramePtr& rel) {
  LeveledIdeal K;
  K.F = rel;
  if (auto rw = std::dynamic_pointer_cast<const RelativeWittFrame>(rel)) {
    RingIdeal ideal = rw->I.ideal;
    std::size_t n = rw->n;
    K.nu = n;
    K.contains = [rel, ideal](const A0Elem& x) {
      for (const auto& c : std::get<WittVec>(x.v).c)
        if (!ideal.contains(c)) return false;
      return true;
    };
    K.tau_inv_K = [rel](const A0Elem& x) { return rel->tau_preimage(x); };
    RingPtr Rp = rw->carrier;
    K.sample = [rel, ideal, Rp, n](std::mt19937_64& rng) {
      WittVec w{Rp, {}};
      for (std::size_t i = 0; i < n; ++i) w.c.push_back(random_ideal_elem(ideal, rng));
      return A0Elem{std::move(w)};
    };
    return K;
  }
  auto rs = std::dynamic_pointer_cast<const RelativeShearedFrame>(rel);
  require(rs != nullptr, "relative_leveled_ideal: frame is not relative");
  RingIdeal ideal = rs->I.ideal;
  SRingPtr S = rs->S;
  K.nu = S->B;
  K.contains = [S, ideal](const A0Elem& x) {
    const ShearedWitt& z = std::get<ShearedWitt>(x.v);
    for (const auto& c : s_embed(z, S->N).c)
      if (!ideal.contains(c)) return false;
    return true;
  };
  K.tau_inv_K = [rel](const A0Elem& x) { return rel->tau_preimage(x); };
  K.sample = [S, ideal](std::mt19937_64& rng) {
    std::map<u64, RingElement> e;
    for (int t = 0; t < 3; ++t) {
      RingElement v = random_ideal_elem(ideal, rng);
      if (!S->R->is_zero(v)) e[rng() % S->B] = v;
    }
    return A0Elem{s_make(S, witt_zero(S->rs.field, S->N), hat_make(S->R, std::move(e)))};
  };
  return K;
}

}  // namespace wittlab
