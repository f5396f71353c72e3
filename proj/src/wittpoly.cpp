#include "wittlab/wittpoly.hpp"

#include <mutex>
#include <stdexcept>

namespace wittlab {

namespace {

void trim(std::vector<std::uint16_t>& e) {
  while (!e.empty() && e.back() == 0) e.pop_back();
}

}  // namespace

MPoly MPoly::constant(bigint c) {
  MPoly r;
  if (c != 0) r.t.emplace(std::vector<std::uint16_t>{}, std::move(c));
  return r;
}

MPoly MPoly::var(std::size_t i) {
  MPoly r;
  std::vector<std::uint16_t> e(i + 1, 0);
  e[i] = 1;
  r.t.emplace(std::move(e), 1);
  return r;
}

MPoly MPoly::operator+(const MPoly& o) const {
  MPoly r = *this;
  for (const auto& [e, c] : o.t) {
    auto it = r.t.find(e);
    if (it == r.t.end())
      r.t.emplace(e, c);
    else {
      it->second += c;
      if (it->second == 0) r.t.erase(it);
    }
  }
  return r;
}

MPoly MPoly::operator-(const MPoly& o) const { return *this + o.scaled(-1); }

MPoly MPoly::scaled(const bigint& c) const {
  if (c == 0) return {};
  MPoly r;
  for (const auto& [e, v] : t) r.t.emplace(e, v * c);
  return r;
}

MPoly MPoly::operator*(const MPoly& o) const {
  MPoly r;
  for (const auto& [e1, c1] : t)
    for (const auto& [e2, c2] : o.t) {
      std::vector<std::uint16_t> e(std::max(e1.size(), e2.size()), 0);
      for (std::size_t i = 0; i < e1.size(); ++i) e[i] += e1[i];
      for (std::size_t i = 0; i < e2.size(); ++i) {
        u64 s = u64(e[i]) + e2[i];
        if (s > 0xffff) throw std::overflow_error("MPoly: exponent overflow");
        e[i] = std::uint16_t(s);
      }
      trim(e);
      auto it = r.t.find(e);
      if (it == r.t.end())
        r.t.emplace(std::move(e), c1 * c2);
      else {
        it->second += c1 * c2;
        if (it->second == 0) r.t.erase(it);
      }
    }
  return r;
}

MPoly MPoly::pow(u64 e) const {
  MPoly r = constant(1), b = *this;
  while (e) {
    if (e & 1) r = r * b;
    e >>= 1;
    if (e) b = b * b;
  }
  return r;
}

MPoly MPoly::divexact(const bigint& d) const {
  MPoly r;
  for (const auto& [e, c] : t) {
    if (c % d != 0) throw std::logic_error("MPoly::divexact: not divisible");
    r.t.emplace(e, c / d);
  }
  return r;
}

bigint MPoly::eval(const std::vector<bigint>& point) const {
  bigint s = 0;
  for (const auto& [e, c] : t) {
    bigint term = c;
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (e[i] == 0) continue;
      if (i >= point.size()) throw std::invalid_argument("MPoly::eval: missing variable");
      bigint b = point[i];
      for (std::uint16_t j = 0; j < e[i]; ++j) term *= b;
    }
    s += term;
  }
  return s;
}

MPoly WittPolyCache::ghost(u64 p, std::size_t m, const std::vector<std::size_t>& varmap) {
  MPoly g;
  bigint pi = 1;
  for (std::size_t i = 0; i <= m; ++i) {
    g = g + MPoly::var(varmap[i]).pow(upow_checked(p, m - i)).scaled(pi);
    pi *= p;
  }
  return g;
}

namespace {

struct Family {
  std::vector<MPoly> sum, prod, frob, neg;
};

std::mutex cache_mu;
std::map<u64, Family> cache;

std::vector<std::size_t> xmap(std::size_t n) {
  std::vector<std::size_t> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = 2 * i;
  return v;
}
std::vector<std::size_t> ymap(std::size_t n) {
  std::vector<std::size_t> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = 2 * i + 1;
  return v;
}
std::vector<std::size_t> imap(std::size_t n) {
  std::vector<std::size_t> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = i;
  return v;
}

// sanity: verify ghost identity by integer evaluation at a couple of points
void verify_binary(u64 p, std::size_t m, const std::vector<MPoly>& fam, bool product) {
  std::vector<bigint> pt(2 * (m + 1));
  u64 seed = 0x9e3779b97f4a7c15ull ^ (p * 1000 + m);
  for (int rep = 0; rep < 2; ++rep) {
    for (auto& v : pt) {
      seed = seed * 6364136223846793005ull + 1442695040888963407ull;
      v = bigint(i64(seed >> 57) - 64);
    }
    std::vector<bigint> zs(m + 1);
    for (std::size_t i = 0; i <= m; ++i) zs[i] = fam[i].eval(pt);
    // w_m(z) vs w_m(x) op w_m(y)
    auto wm = [&](const std::vector<bigint>& comps) {
      bigint s = 0, pi = 1;
      for (std::size_t i = 0; i <= m; ++i) {
        bigint t = comps[i];
        u64 e = upow_checked(p, m - i);
        bigint acc = 1;
        for (u64 j = 0; j < e; ++j) acc *= t;
        s += pi * acc;
        pi *= p;
      }
      return s;
    };
    std::vector<bigint> xs(m + 1), ys(m + 1);
    for (std::size_t i = 0; i <= m; ++i) {
      xs[i] = pt[2 * i];
      ys[i] = pt[2 * i + 1];
    }
    bigint lhs = wm(zs);
    bigint rhs = product ? wm(xs) * wm(ys) : wm(xs) + wm(ys);
    if (lhs != rhs) throw std::logic_error("WittPolyCache: ghost identity violated");
  }
}

void extend(u64 p, Family& f, std::size_t upto) {
  while (f.sum.size() <= upto) {
    std::size_t m = f.sum.size();
    if (m > WittPolyCache::default_cap(p))
      throw std::runtime_error("WittPolyCache: length cap exceeded for p=" + std::to_string(p));
    bigint pm = 1;
    for (std::size_t i = 0; i < m; ++i) pm *= p;
    // sum
    {
      MPoly g = WittPolyCache::ghost(p, m, xmap(m + 1)) + WittPolyCache::ghost(p, m, ymap(m + 1));
      bigint pi = 1;
      for (std::size_t i = 0; i < m; ++i) {
        g = g - f.sum[i].pow(upow_checked(p, m - i)).scaled(pi);
        pi *= p;
      }
      f.sum.push_back(g.divexact(pm));
    }
    // prod
    {
      MPoly g = WittPolyCache::ghost(p, m, xmap(m + 1)) * WittPolyCache::ghost(p, m, ymap(m + 1));
      bigint pi = 1;
      for (std::size_t i = 0; i < m; ++i) {
        g = g - f.prod[i].pow(upow_checked(p, m - i)).scaled(pi);
        pi *= p;
      }
      f.prod.push_back(g.divexact(pm));
    }
    // frobenius: w_m(F(x)) = w_{m+1}(x)
    {
      MPoly g = WittPolyCache::ghost(p, m + 1, imap(m + 2));
      bigint pi = 1;
      for (std::size_t i = 0; i < m; ++i) {
        g = g - f.frob[i].pow(upow_checked(p, m - i)).scaled(pi);
        pi *= p;
      }
      f.frob.push_back(g.divexact(pm));
    }
    // negation: w_m(N(x)) = -w_m(x)
    {
      MPoly g = WittPolyCache::ghost(p, m, imap(m + 1)).scaled(-1);
      bigint pi = 1;
      for (std::size_t i = 0; i < m; ++i) {
        g = g - f.neg[i].pow(upow_checked(p, m - i)).scaled(pi);
        pi *= p;
      }
      f.neg.push_back(g.divexact(pm));
    }
    verify_binary(p, m, f.sum, false);
    verify_binary(p, m, f.prod, true);
  }
}

const MPoly& fetch(u64 p, std::size_t m, int which) {
  std::lock_guard<std::mutex> lock(cache_mu);
  Family& f = cache[p];
  extend(p, f, m);
  switch (which) {
    case 0: return f.sum[m];
    case 1: return f.prod[m];
    case 2: return f.frob[m];
    default: return f.neg[m];
  }
}

}  // namespace

const MPoly& WittPolyCache::sum(u64 p, std::size_t m) { return fetch(p, m, 0); }
const MPoly& WittPolyCache::prod(u64 p, std::size_t m) { return fetch(p, m, 1); }
const MPoly& WittPolyCache::frob(u64 p, std::size_t m) { return fetch(p, m, 2); }
const MPoly& WittPolyCache::neg(u64 p, std::size_t m) { return fetch(p, m, 3); }

}  // namespace wittlab
