#pragma once

// Factorization of rational polynomials into irreducibles: Yun's squarefree
// decomposition, then Cantor-Zassenhaus modulo a small prime, Hensel lifting
// and subset recombination (Zassenhaus).

#include "flowmcg/errors.hpp"
#include "flowmcg/numeric.hpp"
#include "flowmcg/polynomial.hpp"

#include <algorithm>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace flowmcg {

namespace detail {

using ZPoly = std::vector<Integer>;  // low degree first, trimmed

inline void ztrim(ZPoly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

inline int zdeg(const ZPoly& a) { return static_cast<int>(a.size()) - 1; }

inline ZPoly zmul(const ZPoly& a, const ZPoly& b) {
  if (a.empty() || b.empty()) return {};
  ZPoly c(a.size() + b.size() - 1);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
  ztrim(c);
  return c;
}

inline ZPoly zsub(const ZPoly& a, const ZPoly& b) {
  ZPoly c(std::max(a.size(), b.size()));
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (i < a.size()) c[i] += a[i];
    if (i < b.size()) c[i] -= b[i];
  }
  ztrim(c);
  return c;
}

inline Integer zmod(const Integer& a, const Integer& m) {
  Integer r = a % m;
  if (r < 0) r += m;
  return r;
}

/// Reduce coefficients into the symmetric range (-m/2, m/2].
inline ZPoly zsymmetric(const ZPoly& a, const Integer& m) {
  ZPoly c = a;
  for (auto& v : c) {
    v = zmod(v, m);
    if (v * 2 > m) v -= m;
  }
  ztrim(c);
  return c;
}

inline ZPoly zreduce(const ZPoly& a, const Integer& m) {
  ZPoly c = a;
  for (auto& v : c) v = zmod(v, m);
  ztrim(c);
  return c;
}

/// Exact division over Z; returns nullopt if b does not divide a.
inline std::optional<ZPoly> zdivide_exact(const ZPoly& a, const ZPoly& b) {
  ZPoly r = a;
  int db = zdeg(b);
  if (zdeg(a) < db) {
    if (a.empty()) return ZPoly{};
    return std::nullopt;
  }
  ZPoly q(static_cast<std::size_t>(zdeg(a) - db + 1));
  for (int i = zdeg(a); i >= db; --i) {
    const Integer& top = r[static_cast<std::size_t>(i)];
    if (top % b.back() != 0) return std::nullopt;
    Integer f = top / b.back();
    q[static_cast<std::size_t>(i - db)] = f;
    if (f == 0) continue;
    for (int j = 0; j <= db; ++j) r[static_cast<std::size_t>(i - db + j)] -= f * b[static_cast<std::size_t>(j)];
  }
  ztrim(r);
  if (!r.empty()) return std::nullopt;
  ztrim(q);
  return q;
}

/// Polynomials over F_p with p a small prime.
class ModP {
 public:
  using Poly = std::vector<std::int64_t>;
  explicit ModP(std::int64_t p) : p_(p) {}
  std::int64_t prime() const { return p_; }

  std::int64_t norm(std::int64_t a) const {
    a %= p_;
    return a < 0 ? a + p_ : a;
  }
  std::int64_t inv(std::int64_t a) const { return pow(norm(a), p_ - 2); }
  std::int64_t pow(std::int64_t b, std::int64_t e) const {
    std::int64_t r = 1;
    b = norm(b);
    while (e > 0) {
      if (e & 1) r = r * b % p_;
      b = b * b % p_;
      e >>= 1;
    }
    return r;
  }
  static void trim(Poly& a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
  }
  static int deg(const Poly& a) { return static_cast<int>(a.size()) - 1; }

  Poly from_z(const ZPoly& a) const {
    Poly c(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) c[i] = static_cast<std::int64_t>(zmod(a[i], p_));
    trim(c);
    return c;
  }
  static ZPoly to_z(const Poly& a) {
    ZPoly c(a.begin(), a.end());
    ztrim(c);
    return c;
  }

  Poly add(const Poly& a, const Poly& b) const {
    Poly c(std::max(a.size(), b.size()), 0);
    for (std::size_t i = 0; i < c.size(); ++i) {
      std::int64_t v = (i < a.size() ? a[i] : 0) + (i < b.size() ? b[i] : 0);
      c[i] = norm(v);
    }
    trim(c);
    return c;
  }
  Poly sub(const Poly& a, const Poly& b) const {
    Poly c(std::max(a.size(), b.size()), 0);
    for (std::size_t i = 0; i < c.size(); ++i) {
      std::int64_t v = (i < a.size() ? a[i] : 0) - (i < b.size() ? b[i] : 0);
      c[i] = norm(v);
    }
    trim(c);
    return c;
  }
  Poly mul(const Poly& a, const Poly& b) const {
    if (a.empty() || b.empty()) return {};
    Poly c(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i)
      for (std::size_t j = 0; j < b.size(); ++j) c[i + j] = (c[i + j] + a[i] * b[j]) % p_;
    trim(c);
    return c;
  }
  std::pair<Poly, Poly> divmod(const Poly& a, const Poly& b) const {
    Poly r = a;
    int db = deg(b);
    if (deg(a) < db) return {Poly{}, r};
    Poly q(static_cast<std::size_t>(deg(a) - db + 1), 0);
    std::int64_t il = inv(b.back());
    for (int i = deg(a); i >= db; --i) {
      std::int64_t f = r[static_cast<std::size_t>(i)] * il % p_;
      q[static_cast<std::size_t>(i - db)] = f;
      if (f == 0) continue;
      for (int j = 0; j <= db; ++j) {
        auto& slot = r[static_cast<std::size_t>(i - db + j)];
        slot = norm(slot - f * b[static_cast<std::size_t>(j)]);
      }
    }
    trim(q);
    trim(r);
    return {q, r};
  }
  Poly rem(const Poly& a, const Poly& b) const { return divmod(a, b).second; }
  Poly monic(const Poly& a) const {
    if (a.empty()) return a;
    Poly c = a;
    std::int64_t il = inv(a.back());
    for (auto& v : c) v = v * il % p_;
    return c;
  }
  Poly gcd(Poly a, Poly b) const {
    while (!b.empty()) {
      Poly r = rem(a, b);
      a = std::move(b);
      b = std::move(r);
    }
    return monic(a);
  }
  /// (g, s, t) with s a + t b = g monic.
  std::tuple<Poly, Poly, Poly> xgcd(const Poly& a, const Poly& b) const {
    Poly r0 = a, r1 = b, s0{1}, s1{}, t0{}, t1{1};
    while (!r1.empty()) {
      auto [q, r] = divmod(r0, r1);
      r0 = std::move(r1);
      r1 = std::move(r);
      Poly s2 = sub(s0, mul(q, s1));
      s0 = std::move(s1);
      s1 = std::move(s2);
      Poly t2 = sub(t0, mul(q, t1));
      t0 = std::move(t1);
      t1 = std::move(t2);
    }
    std::int64_t il = inv(r0.back());
    auto scale = [&](Poly v) {
      for (auto& c : v) c = c * il % p_;
      return v;
    };
    return {scale(r0), scale(s0), scale(t0)};
  }
  Poly derivative(const Poly& a) const {
    Poly c;
    for (std::size_t i = 1; i < a.size(); ++i) c.push_back(norm(a[i] * static_cast<std::int64_t>(i)));
    trim(c);
    return c;
  }
  Poly powmod(Poly base, Integer e, const Poly& m) const {
    Poly r{1};
    base = rem(base, m);
    while (e > 0) {
      if ((e & 1) != 0) r = rem(mul(r, base), m);
      base = rem(mul(base, base), m);
      e >>= 1;
    }
    return r;
  }

 private:
  std::int64_t p_;
};

/// Distinct-degree then equal-degree factorization of a monic squarefree polynomial over F_p.
inline std::vector<ModP::Poly> factor_mod_p(const ModP& F, ModP::Poly f) {
  using Poly = ModP::Poly;
  std::vector<std::pair<Poly, int>> ddf;
  Poly x{0, 1};
  Poly h = x;
  for (int i = 1; 2 * i <= ModP::deg(f); ++i) {
    h = F.powmod(h, Integer(F.prime()), f);
    Poly g = F.gcd(f, F.sub(h, x));
    if (ModP::deg(g) > 0) {
      ddf.emplace_back(g, i);
      f = F.divmod(f, g).first;
      h = F.rem(h, f);
    }
  }
  if (ModP::deg(f) > 0) ddf.emplace_back(F.monic(f), ModP::deg(f));

  std::mt19937_64 rng(0x5eedULL);
  std::vector<Poly> out;
  for (auto& [g, d] : ddf) {
    std::vector<Poly> work{g};
    while (!work.empty()) {
      Poly w = work.back();
      work.pop_back();
      if (ModP::deg(w) == d) {
        out.push_back(F.monic(w));
        continue;
      }
      for (;;) {
        Poly a(static_cast<std::size_t>(ModP::deg(w)));
        for (auto& c : a) c = static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(F.prime()));
        ModP::trim(a);
        if (ModP::deg(a) < 1) continue;
        Integer e = (ipow(Integer(F.prime()), static_cast<unsigned>(d)) - 1) / 2;
        Poly b = F.sub(F.powmod(a, e, w), Poly{1});
        Poly s = F.gcd(w, b);
        if (ModP::deg(s) > 0 && ModP::deg(s) < ModP::deg(w)) {
          work.push_back(s);
          work.push_back(F.divmod(w, s).first);
          break;
        }
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Lift f = g*h (mod p), h monic, to a factorization modulo p^k.
inline std::pair<ZPoly, ZPoly> hensel_lift(const ModP& F, const ZPoly& f, ZPoly g, ZPoly h, unsigned k) {
  using Poly = ModP::Poly;
  auto [one, s, t] = F.xgcd(F.from_z(g), F.from_z(h));
  (void)t;
  if (one != Poly{1}) throw InconsistencyError("Hensel lift: factors not coprime modulo p");
  Integer p = F.prime();
  Integer q = p;
  for (unsigned j = 1; j < k; ++j) {
    ZPoly diff = zsub(f, zmul(g, h));
    for (auto& c : diff) {
      if (c % q != 0) throw InconsistencyError("Hensel lift: invariant broken");
      c /= q;
    }
    Poly e = F.from_z(diff);
    Poly hp = F.from_z(h);
    Poly gp = F.from_z(g);
    Poly a = F.rem(F.mul(s, e), hp);
    Poly b = F.divmod(F.sub(e, F.mul(a, gp)), hp).first;
    ZPoly aq = ModP::to_z(a), bq = ModP::to_z(b);
    for (auto& c : aq) c *= q;
    for (auto& c : bq) c *= q;
    g = zsub(g, zsub(ZPoly{}, bq));
    h = zsub(h, zsub(ZPoly{}, aq));
    q *= p;
    g = zreduce(g, q);
    h = zreduce(h, q);
  }
  return {g, h};
}

/// Lift all modular factors of f (lc(f) absorbed into the first product) modulo p^k.
inline std::vector<ZPoly> multi_lift(const ModP& F, const ZPoly& f, const std::vector<ModP::Poly>& factors, unsigned k,
                                     const Integer& modulus) {
  if (factors.size() == 1) {
    // monic version of f modulo p^k
    Integer lc = f.back();
    Integer inv_lc;
    {
      // inverse of lc modulo p^k via extended Euclid
      Integer a = zmod(lc, modulus), m = modulus, x0 = 1, x1 = 0;
      while (m != 0) {
        Integer q = a / m;
        Integer tmp = a - q * m;
        a = m;
        m = tmp;
        tmp = x0 - q * x1;
        x0 = x1;
        x1 = tmp;
      }
      inv_lc = zmod(x0, modulus);
    }
    ZPoly g = f;
    for (auto& c : g) c = zmod(c * inv_lc, modulus);
    ztrim(g);
    return {g};
  }
  std::size_t half = factors.size() / 2;
  std::vector<ModP::Poly> A(factors.begin(), factors.begin() + static_cast<std::ptrdiff_t>(half));
  std::vector<ModP::Poly> B(factors.begin() + static_cast<std::ptrdiff_t>(half), factors.end());
  ModP::Poly gp{F.norm(static_cast<std::int64_t>(zmod(f.back(), F.prime())))};
  for (const auto& a : A) gp = F.mul(gp, a);
  ModP::Poly hp{1};
  for (const auto& b : B) hp = F.mul(hp, b);
  auto [g, h] = hensel_lift(F, f, ModP::to_z(gp), ModP::to_z(hp), k);
  // g has leading coefficient lc(f) mod p^k; make it a genuine lift target for recursion.
  auto left = multi_lift(F, g, A, k, modulus);
  auto right = multi_lift(F, h, B, k, modulus);
  left.insert(left.end(), right.begin(), right.end());
  return left;
}

/// Irreducible factors over Z of a primitive squarefree integer polynomial.
inline std::vector<ZPoly> factor_squarefree_z(ZPoly f) {
  ztrim(f);
  if (zdeg(f) <= 1) return {f};
  const std::int64_t primes[] = {3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83,
                                 89, 97, 101, 103, 107, 109, 113, 127, 131, 137, 139, 149, 151, 157, 163, 167, 173};
  std::int64_t chosen = 0;
  for (auto p : primes) {
    ModP F(p);
    if (zmod(f.back(), p) == 0) continue;
    auto fp = F.from_z(f);
    if (ModP::deg(F.gcd(fp, F.derivative(fp))) == 0) {
      chosen = p;
      break;
    }
  }
  if (chosen == 0) throw ResourceError("factorization: no suitable prime below 180");
  ModP F(chosen);
  auto modular = factor_mod_p(F, F.monic(F.from_z(f)));
  if (modular.size() == 1) return {f};

  // Mignotte-style bound: any factor's coefficients are bounded by 2^n * ||f||_2.
  Integer norm2 = 0;
  for (const auto& c : f) norm2 += c * c;
  Integer normb = boost::multiprecision::sqrt(norm2) + 1;
  Integer bound = 2 * abs(f.back()) * ipow(Integer(2), static_cast<unsigned>(zdeg(f))) * normb;
  unsigned k = 1;
  Integer modulus = chosen;
  while (modulus <= bound) {
    modulus *= chosen;
    ++k;
  }
  auto lifted = multi_lift(F, f, modular, k, modulus);

  std::vector<ZPoly> result;
  std::vector<ZPoly> pool = lifted;
  ZPoly rest = f;
  std::size_t s = 1;
  while (2 * s <= pool.size()) {
    bool found = false;
    std::vector<std::size_t> idx(s);
    for (std::size_t i = 0; i < s; ++i) idx[i] = i;
    for (;;) {
      ZPoly g{rest.back()};
      for (auto i : idx) g = zreduce(zmul(g, pool[i]), modulus);
      g = zsymmetric(g, modulus);
      // primitive part
      Integer cont = 0;
      for (const auto& c : g) cont = gcd(cont, c);
      if (cont != 0) {
        for (auto& c : g) c /= cont;
        if (g.back() < 0)
          for (auto& c : g) c = -c;
        if (auto q = zdivide_exact(rest, g)) {
          result.push_back(g);
          rest = *q;
          std::vector<ZPoly> next;
          for (std::size_t i = 0; i < pool.size(); ++i)
            if (std::find(idx.begin(), idx.end(), i) == idx.end()) next.push_back(pool[i]);
          pool = std::move(next);
          found = true;
          break;
        }
      }
      // next combination
      int pos = static_cast<int>(s) - 1;
      while (pos >= 0 && idx[static_cast<std::size_t>(pos)] == pool.size() - s + static_cast<std::size_t>(pos)) --pos;
      if (pos < 0) break;
      ++idx[static_cast<std::size_t>(pos)];
      for (std::size_t i = static_cast<std::size_t>(pos) + 1; i < s; ++i) idx[i] = idx[i - 1] + 1;
    }
    if (!found) ++s;
  }
  if (zdeg(rest) > 0) {
    if (rest.back() < 0)
      for (auto& c : rest) c = -c;
    result.push_back(rest);
  }
  return result;
}

}  // namespace detail

struct PolyFactor {
  QPoly factor;  // monic irreducible over Q
  int multiplicity;
};

/// Complete factorization of a nonconstant rational polynomial into monic irreducibles,
/// ordered by (degree, coefficients).
inline std::vector<PolyFactor> factor_over_q(const QPoly& p) {
  std::vector<PolyFactor> out;
  if (p.degree() <= 0) return out;
  // Yun's squarefree decomposition over Q.
  QPoly f = p.monic();
  QPoly a = QPoly::gcd(f, f.derivative());
  QPoly b = f / a;
  QPoly c = f.derivative() / a;
  QPoly d = c - b.derivative();
  int i = 1;
  while (b.degree() > 0) {
    QPoly g = QPoly::gcd(b, d);
    if (g.degree() > 0) {
      auto z = g.primitive_integer();
      for (auto& piece : detail::factor_squarefree_z(z)) {
        out.push_back({QPoly::from_integers(piece).monic(), i});
      }
    }
    b = b / g;
    c = d / g;
    d = c - b.derivative();
    ++i;
  }
  std::sort(out.begin(), out.end(), [](const PolyFactor& x, const PolyFactor& y) {
    if (x.factor.degree() != y.factor.degree()) return x.factor.degree() < y.factor.degree();
    return x.factor.coeffs() < y.factor.coeffs();
  });
  return out;
}

}  // namespace flowmcg
