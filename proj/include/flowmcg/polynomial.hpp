#pragma once

#include "flowmcg/errors.hpp"
#include "flowmcg/numeric.hpp"

#include <algorithm>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace flowmcg {

/// Dense univariate polynomial over Q, coefficients stored low degree first.
/// The zero polynomial has no coefficients.
class QPoly {
 public:
  QPoly() = default;
  explicit QPoly(std::vector<Rational> coeffs) : c_(std::move(coeffs)) { trim(); }
  static QPoly constant(const Rational& a) { return QPoly(std::vector<Rational>{a}); }
  static QPoly x() { return QPoly(std::vector<Rational>{0, 1}); }
  static QPoly from_integers(const std::vector<Integer>& coeffs) {
    std::vector<Rational> c(coeffs.begin(), coeffs.end());
    return QPoly(std::move(c));
  }

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }
  const std::vector<Rational>& coeffs() const { return c_; }
  Rational coeff(int i) const {
    return (i >= 0 && i < static_cast<int>(c_.size())) ? c_[static_cast<std::size_t>(i)] : Rational(0);
  }
  Rational lead() const { return c_.empty() ? Rational(0) : c_.back(); }

  Rational eval(const Rational& t) const {
    Rational r = 0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) r = r * t + *it;
    return r;
  }

  QPoly monic() const {
    if (is_zero()) return *this;
    std::vector<Rational> c = c_;
    Rational l = c.back();
    for (auto& a : c) a /= l;
    return QPoly(std::move(c));
  }

  QPoly derivative() const {
    std::vector<Rational> c;
    for (std::size_t i = 1; i < c_.size(); ++i) c.push_back(c_[i] * static_cast<int>(i));
    return QPoly(std::move(c));
  }

  friend QPoly operator+(const QPoly& a, const QPoly& b) {
    std::vector<Rational> c(std::max(a.c_.size(), b.c_.size()));
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = a.coeff(static_cast<int>(i)) + b.coeff(static_cast<int>(i));
    return QPoly(std::move(c));
  }
  friend QPoly operator-(const QPoly& a) {
    std::vector<Rational> c = a.c_;
    for (auto& v : c) v = -v;
    return QPoly(std::move(c));
  }
  friend QPoly operator-(const QPoly& a, const QPoly& b) { return a + (-b); }
  friend QPoly operator*(const QPoly& a, const QPoly& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<Rational> c(a.c_.size() + b.c_.size() - 1);
    for (std::size_t i = 0; i < a.c_.size(); ++i)
      for (std::size_t j = 0; j < b.c_.size(); ++j) c[i + j] += a.c_[i] * b.c_[j];
    return QPoly(std::move(c));
  }
  friend QPoly operator*(const Rational& s, const QPoly& a) { return QPoly::constant(s) * a; }
  friend bool operator==(const QPoly& a, const QPoly& b) { return a.c_ == b.c_; }

  /// Euclidean division; returns (quotient, remainder).
  static std::pair<QPoly, QPoly> divmod(const QPoly& a, const QPoly& b) {
    if (b.is_zero()) throw ValidationError("polynomial division by zero");
    std::vector<Rational> r = a.c_;
    int db = b.degree();
    if (a.degree() < db) return {QPoly{}, a};
    std::vector<Rational> q(static_cast<std::size_t>(a.degree() - db + 1));
    for (int i = a.degree(); i >= db; --i) {
      Rational f = r[static_cast<std::size_t>(i)] / b.lead();
      q[static_cast<std::size_t>(i - db)] = f;
      if (f == 0) continue;
      for (int j = 0; j <= db; ++j) r[static_cast<std::size_t>(i - db + j)] -= f * b.c_[static_cast<std::size_t>(j)];
    }
    return {QPoly(std::move(q)), QPoly(std::move(r))};
  }
  friend QPoly operator%(const QPoly& a, const QPoly& b) { return divmod(a, b).second; }
  friend QPoly operator/(const QPoly& a, const QPoly& b) { return divmod(a, b).first; }

  /// Monic gcd.
  static QPoly gcd(QPoly a, QPoly b) {
    while (!b.is_zero()) {
      QPoly r = a % b;
      a = std::move(b);
      b = std::move(r);
    }
    return a.monic();
  }

  /// Extended Euclid: returns (g, s, t) with s*a + t*b = g, g monic.
  static std::tuple<QPoly, QPoly, QPoly> xgcd(const QPoly& a, const QPoly& b) {
    QPoly r0 = a, r1 = b, s0 = constant(1), s1{}, t0{}, t1 = constant(1);
    while (!r1.is_zero()) {
      auto [q, r] = divmod(r0, r1);
      r0 = std::move(r1);
      r1 = std::move(r);
      QPoly s2 = s0 - q * s1;
      s0 = std::move(s1);
      s1 = std::move(s2);
      QPoly t2 = t0 - q * t1;
      t0 = std::move(t1);
      t1 = std::move(t2);
    }
    Rational l = r0.lead();
    if (l == 0) return {r0, s0, t0};
    Rational inv = 1 / l;
    return {inv * r0, inv * s0, inv * t0};
  }

  QPoly squarefree_part() const {
    if (degree() <= 0) return monic();
    return (*this / gcd(*this, derivative())).monic();
  }

  /// p(x^k)
  QPoly compose_power(int k) const {
    std::vector<Rational> c(static_cast<std::size_t>(degree() * k + 1));
    for (std::size_t i = 0; i < c_.size(); ++i) c[i * static_cast<std::size_t>(k)] = c_[i];
    return QPoly(std::move(c));
  }

  /// Primitive integer polynomial with positive leading coefficient and the same roots.
  std::vector<Integer> primitive_integer() const {
    Integer l = 1;
    for (const auto& a : c_) l = lcm(l, denominator(a));
    std::vector<Integer> z;
    Integer g = 0;
    for (const auto& a : c_) {
      z.push_back(numerator(a) * (l / denominator(a)));
      g = flowmcg::gcd(g, z.back());
    }
    if (g == 0) return z;
    if (z.back() < 0) g = -g;
    for (auto& v : z) v /= g;
    return z;
  }

  std::string str(const std::string& var = "x") const {
    if (is_zero()) return "0";
    std::string out;
    for (int i = degree(); i >= 0; --i) {
      Rational a = c_[static_cast<std::size_t>(i)];
      if (a == 0) continue;
      bool neg = a < 0;
      Rational m = neg ? Rational(-a) : a;
      if (out.empty()) {
        if (neg) out += "-";
      } else {
        out += neg ? " - " : " + ";
      }
      bool unit = (m == 1) && i > 0;
      if (!unit) out += to_string(m);
      if (i > 0) out += var;
      if (i > 1) out += "^" + std::to_string(i);
    }
    return out;
  }

 private:
  void trim() {
    while (!c_.empty() && c_.back() == 0) c_.pop_back();
  }
  std::vector<Rational> c_;
};

/// Closed-open rational interval (lo, hi].
struct RationalInterval {
  Rational lo;
  Rational hi;
  Rational width() const { return hi - lo; }
  Rational mid() const { return (lo + hi) / 2; }
};

namespace detail {

inline int sign_changes(const std::vector<Rational>& values) {
  int changes = 0;
  int last = 0;
  for (const auto& v : values) {
    int s = sign(v);
    if (s == 0) continue;
    if (last != 0 && s != last) ++changes;
    last = s;
  }
  return changes;
}

}  // namespace detail

/// Sturm chain for a squarefree polynomial.
class SturmChain {
 public:
  explicit SturmChain(const QPoly& p) {
    chain_.push_back(p);
    chain_.push_back(p.derivative());
    while (!chain_.back().is_zero() && chain_.back().degree() > 0) {
      QPoly r = chain_[chain_.size() - 2] % chain_.back();
      if (r.is_zero()) break;
      chain_.push_back(-r);
    }
  }

  /// Number of distinct real roots in (a, b].
  int count(const Rational& a, const Rational& b) const { return variations(a) - variations(b); }

 private:
  int variations(const Rational& t) const {
    std::vector<Rational> v;
    v.reserve(chain_.size());
    for (const auto& q : chain_) v.push_back(q.eval(t));
    return detail::sign_changes(v);
  }
  std::vector<QPoly> chain_;
};

/// Cauchy bound: every complex root has modulus < bound.
inline Rational root_bound(const QPoly& p) {
  Rational m = 0;
  for (int i = 0; i < p.degree(); ++i) m = std::max(m, abs(p.coeff(i) / p.lead()));
  return m + 1;
}

/// Isolating intervals (lo, hi] for all real roots of a squarefree polynomial, ascending,
/// each refined until its width is at most `max_width`.
inline std::vector<RationalInterval> isolate_real_roots(const QPoly& p, const Rational& max_width = Rational(1, 4)) {
  std::vector<RationalInterval> out;
  if (p.degree() <= 0) return out;
  SturmChain sc(p);
  Rational b = root_bound(p);
  std::vector<RationalInterval> stack{{-b, b}};
  while (!stack.empty()) {
    RationalInterval iv = stack.back();
    stack.pop_back();
    int n = sc.count(iv.lo, iv.hi);
    if (n == 0) continue;
    if (n == 1 && iv.width() <= max_width) {
      out.push_back(iv);
      continue;
    }
    Rational m = iv.mid();
    stack.push_back({m, iv.hi});
    stack.push_back({iv.lo, m});
  }
  std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return x.lo < y.lo; });
  return out;
}

/// Bisect an isolating interval of a simple root of p until width <= eps.
inline RationalInterval refine_root(const QPoly& p, RationalInterval iv, const Rational& eps) {
  // Work with sign changes of p directly: the root is simple and the interval isolating.
  if (p.eval(iv.hi) == 0) return {iv.hi, iv.hi};
  while (iv.width() > eps) {
    Rational m = iv.mid();
    Rational pm = p.eval(m);
    if (pm == 0) return {m, m};
    if (sign(pm) == sign(p.eval(iv.hi)))
      iv.hi = m;
    else
      iv.lo = m;
  }
  return iv;
}

/// True iff every complex root of p has modulus strictly less than 1 (Schur-Cohn).
inline bool schur_stable(const QPoly& p) {
  QPoly q = p;
  while (q.degree() > 0) {
    Rational a0 = q.coeff(0);
    Rational an = q.lead();
    if (abs(a0) >= abs(an)) return false;
    std::vector<Rational> rev(q.coeffs().rbegin(), q.coeffs().rend());
    QPoly t = an * q - a0 * QPoly(rev);
    std::vector<Rational> shifted(t.coeffs().begin() + 1, t.coeffs().end());
    q = QPoly(shifted);
  }
  return true;
}

}  // namespace flowmcg
