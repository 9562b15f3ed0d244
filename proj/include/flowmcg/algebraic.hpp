#pragma once

#include "flowmcg/errors.hpp"
#include "flowmcg/factor.hpp"
#include "flowmcg/numeric.hpp"
#include "flowmcg/polynomial.hpp"

#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

namespace flowmcg {

/// A real algebraic number: irreducible monic minimal polynomial over Q and an
/// isolating interval (lo, hi] containing exactly one real root.
struct AlgebraicNumber {
  QPoly minpoly;
  RationalInterval interval;

  int degree() const { return minpoly.degree(); }
  bool is_rational() const { return degree() == 1; }
  Rational rational_value() const { return -minpoly.coeff(0); }
};

/// The real number field Q(theta) for a fixed real embedding of theta.
class NumberField {
 public:
  explicit NumberField(AlgebraicNumber gen) : gen_(std::move(gen)), refined_(gen_.interval) {
    if (gen_.minpoly.degree() < 1) throw ValidationError("number field: generator polynomial must be nonconstant");
    if (gen_.minpoly.lead() != 1) throw ValidationError("number field: minimal polynomial must be monic");
    if (gen_.is_rational()) refined_ = {gen_.rational_value(), gen_.rational_value()};
  }

  const AlgebraicNumber& generator() const { return gen_; }
  int degree() const { return gen_.degree(); }
  const QPoly& minpoly() const { return gen_.minpoly; }

  /// An interval for the generator of width at most eps (cached, monotone refinement).
  RationalInterval interval(const Rational& eps) const {
    std::lock_guard<std::mutex> lock(mu_);
    if (refined_.width() > eps) refined_ = refine_root(gen_.minpoly, refined_, eps);
    return refined_;
  }

  bool same_as(const NumberField& other) const {
    if (this == &other) return true;
    if (!(gen_.minpoly == other.gen_.minpoly)) return false;
    // same polynomial: same root iff the isolating intervals overlap on a root
    RationalInterval a = interval(Rational(1, 1000000)), b = other.interval(Rational(1, 1000000));
    Rational lo = std::max(a.lo, b.lo), hi = std::min(a.hi, b.hi);
    if (lo > hi) return false;
    if (lo == hi) return gen_.minpoly.eval(lo) == 0;
    return SturmChain(gen_.minpoly).count(lo, hi) == 1 || gen_.minpoly.eval(hi) == 0;
  }

 private:
  AlgebraicNumber gen_;
  mutable std::mutex mu_;
  mutable RationalInterval refined_;
};

using FieldPtr = std::shared_ptr<const NumberField>;

namespace detail {

struct Iv {
  Rational lo, hi;
};

inline Iv iv_mul(const Iv& a, const Iv& b) {
  Rational p[4] = {a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi};
  Rational lo = p[0], hi = p[0];
  for (const auto& v : p) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return {lo, hi};
}

inline Iv eval_interval(const std::vector<Rational>& coeffs, const Iv& x) {
  Iv r{0, 0};
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) {
    r = iv_mul(r, x);
    r.lo += *it;
    r.hi += *it;
  }
  return r;
}

}  // namespace detail

/// Element of a real number field, stored as a polynomial in the generator of degree < [K:Q].
class FieldElement {
 public:
  FieldElement() = default;
  FieldElement(FieldPtr field, std::vector<Rational> coeffs) : field_(std::move(field)), c_(std::move(coeffs)) {
    reduce();
  }
  static FieldElement rational(FieldPtr field, const Rational& a) { return FieldElement(std::move(field), {a}); }
  static FieldElement generator(FieldPtr field) {
    return FieldElement(std::move(field), std::vector<Rational>{0, 1});
  }

  const FieldPtr& field() const { return field_; }
  const std::vector<Rational>& coeffs() const { return c_; }
  /// Coordinates in the power basis 1, theta, ..., theta^(n-1).
  std::vector<Rational> coordinates() const {
    std::vector<Rational> v(static_cast<std::size_t>(field_->degree()));
    for (std::size_t i = 0; i < c_.size(); ++i) v[i] = c_[i];
    return v;
  }

  bool is_zero() const { return c_.empty(); }
  bool is_rational() const { return c_.size() <= 1; }
  Rational rational_part() const { return c_.empty() ? Rational(0) : c_[0]; }

  friend FieldElement operator+(const FieldElement& a, const FieldElement& b) {
    check(a, b);
    return FieldElement(a.field_, (QPoly(a.c_) + QPoly(b.c_)).coeffs());
  }
  friend FieldElement operator-(const FieldElement& a, const FieldElement& b) {
    check(a, b);
    return FieldElement(a.field_, (QPoly(a.c_) - QPoly(b.c_)).coeffs());
  }
  friend FieldElement operator-(const FieldElement& a) { return FieldElement(a.field_, (-QPoly(a.c_)).coeffs()); }
  friend FieldElement operator*(const FieldElement& a, const FieldElement& b) {
    check(a, b);
    return FieldElement(a.field_, (QPoly(a.c_) * QPoly(b.c_)).coeffs());
  }
  friend FieldElement operator*(const Rational& s, const FieldElement& a) {
    return FieldElement(a.field_, (QPoly::constant(s) * QPoly(a.c_)).coeffs());
  }
  friend FieldElement operator/(const FieldElement& a, const FieldElement& b) { return a * b.inverse(); }
  FieldElement& operator+=(const FieldElement& b) { return *this = *this + b; }
  FieldElement& operator-=(const FieldElement& b) { return *this = *this - b; }
  FieldElement& operator*=(const FieldElement& b) { return *this = *this * b; }

  friend bool operator==(const FieldElement& a, const FieldElement& b) {
    check(a, b);
    return a.c_ == b.c_;
  }
  friend bool operator!=(const FieldElement& a, const FieldElement& b) { return !(a == b); }

  FieldElement inverse() const {
    if (is_zero()) throw ValidationError("field element: division by zero");
    auto [g, s, t] = QPoly::xgcd(QPoly(c_), field_->minpoly());
    (void)t;
    if (g.degree() != 0) throw InconsistencyError("field element: minimal polynomial is reducible");
    return FieldElement(field_, s.coeffs());
  }

  FieldElement pow(int e) const {
    FieldElement base = e < 0 ? inverse() : *this;
    FieldElement r = rational(field_, 1);
    for (int k = e < 0 ? -e : e; k > 0; k >>= 1) {
      if (k & 1) r *= base;
      base *= base;
    }
    return r;
  }

  /// Exact sign of the real value.
  int sign() const {
    if (is_zero()) return 0;
    if (is_rational()) return flowmcg::sign(c_[0]);
    Rational eps(1, 16);
    for (int it = 0; it < 4000; ++it) {
      auto iv = field_->interval(eps);
      auto r = detail::eval_interval(c_, {iv.lo, iv.hi});
      if (r.lo > 0) return 1;
      if (r.hi < 0) return -1;
      eps /= 16;
    }
    throw InconsistencyError("field element: sign determination did not terminate");
  }

  /// Enclosure of the real value of width at most eps.
  RationalInterval enclose(const Rational& eps) const {
    if (is_rational()) return {rational_part(), rational_part()};
    Rational step = eps;
    for (int it = 0; it < 4000; ++it) {
      auto iv = field_->interval(step);
      auto r = detail::eval_interval(c_, {iv.lo, iv.hi});
      if (r.hi - r.lo <= eps) return {r.lo, r.hi};
      step /= 16;
    }
    throw InconsistencyError("field element: enclosure did not converge");
  }

  double to_double() const { return flowmcg::to_double(enclose(Rational(1, Integer(1) << 60)).mid()); }

  std::string approx(int digits = 20) const {
    Rational eps = Rational(1, ipow(Integer(10), static_cast<unsigned>(digits + 2)));
    return to_decimal(enclose(eps).mid(), digits);
  }

  /// Polynomial notation in the generator symbol.
  std::string str(const std::string& var = "λ") const { return QPoly(c_).str(var); }

  friend bool operator<(const FieldElement& a, const FieldElement& b) { return (a - b).sign() < 0; }
  friend bool operator>(const FieldElement& a, const FieldElement& b) { return (a - b).sign() > 0; }

 private:
  static void check(const FieldElement& a, const FieldElement& b) {
    if (a.field_ != b.field_ && !(a.field_ && b.field_ && a.field_->same_as(*b.field_)))
      throw InconsistencyError("field element: mixing elements of different number fields");
  }
  void reduce() {
    if (!field_) throw ValidationError("field element without field");
    QPoly p(c_);
    if (p.degree() >= field_->degree()) p = p % field_->minpoly();
    c_ = p.coeffs();
  }
  FieldPtr field_;
  std::vector<Rational> c_;
};

inline FieldElement abs(const FieldElement& a) { return a.sign() < 0 ? -a : a; }

/// Largest real root of a polynomial (the Perron-Frobenius root when p is a characteristic
/// polynomial of a primitive matrix), returned with its irreducible factor.
inline AlgebraicNumber largest_real_root(const QPoly& p) {
  QPoly sf = p.squarefree_part();
  auto roots = isolate_real_roots(sf, Rational(1, 4));
  if (roots.empty()) throw ValidationError("polynomial has no real root");
  RationalInterval iv = roots.back();
  for (const auto& f : factor_over_q(p)) {
    const QPoly& q = f.factor;
    if (q.eval(iv.hi) == 0) {
      if (q.degree() == 1) return {q, {iv.hi, iv.hi}};
      // rational root at the endpoint of a higher-degree factor cannot happen (irreducible)
      continue;
    }
    if (SturmChain(q).count(iv.lo, iv.hi) == 1) {
      if (q.degree() == 1) {
        Rational r = -q.coeff(0) / q.lead();
        return {q.monic(), {r, r}};
      }
      // the factor vanishes in the interval; shrink to isolate against q's own roots
      auto own = isolate_real_roots(q, Rational(1, 4));
      for (const auto& r : own) {
        Rational lo = std::max(r.lo, iv.lo), hi = std::min(r.hi, iv.hi);
        if (lo < hi && SturmChain(q).count(lo, hi) == 1) return {q, {lo, hi}};
      }
      return {q, iv};
    }
  }
  throw InconsistencyError("largest real root not found among irreducible factors");
}

/// Schur-Cohn test over a real number field: every complex root of the polynomial with the
/// given coefficients (low degree first, leading coefficient nonzero) has modulus < 1.
inline bool schur_stable(std::vector<FieldElement> q) {
  while (q.size() > 1) {
    FieldElement a0 = q.front();
    FieldElement an = q.back();
    if (!(abs(a0) < abs(an))) return false;
    std::size_t n = q.size();
    std::vector<FieldElement> next;
    next.reserve(n - 1);
    for (std::size_t i = 1; i < n; ++i) next.push_back(an * q[i] - a0 * q[n - 1 - i]);
    while (next.size() > 1 && next.back().is_zero()) next.pop_back();
    q = std::move(next);
  }
  return true;
}

}  // namespace flowmcg
