#pragma once

// Incidence data, primitivity, Perron-Frobenius data, Pisot/CR verdicts, cylinder measures
// and the trace lattice of a substitution.

#include "flowmcg/algebraic.hpp"
#include "flowmcg/errors.hpp"
#include "flowmcg/factor.hpp"
#include "flowmcg/linalg.hpp"
#include "flowmcg/symbolic.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace flowmcg {

/// Entry (i, j) counts letter j in ξ(i).
inline IntMatrix incidence_matrix(const Substitution& sub) {
  std::size_t d = static_cast<std::size_t>(sub.size());
  IntMatrix m(d, IntVector(d, 0));
  for (std::size_t i = 0; i < d; ++i)
    for (Symbol s : sub.image(static_cast<Symbol>(i))) m[i][static_cast<std::size_t>(s)] += 1;
  return m;
}

inline bool is_square_nonnegative(const IntMatrix& m) {
  for (const auto& row : m) {
    if (row.size() != m.size()) return false;
    for (const auto& v : row)
      if (v < 0) return false;
  }
  return !m.empty();
}

/// Some power M^k with k ≤ d²−2d+2 is strictly positive. Works on the zero pattern.
inline bool is_primitive(const IntMatrix& m) {
  if (!is_square_nonnegative(m)) return false;
  std::size_t d = m.size();
  std::vector<std::vector<bool>> pat(d, std::vector<bool>(d)), p(d, std::vector<bool>(d));
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) pat[i][j] = p[i][j] = m[i][j] > 0;
  std::size_t bound = d * d - 2 * d + 2;
  for (std::size_t k = 1; k <= bound; ++k) {
    bool all = true;
    for (const auto& row : p)
      for (bool b : row) all = all && b;
    if (all) return true;
    std::vector<std::vector<bool>> q(d, std::vector<bool>(d, false));
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t l = 0; l < d; ++l)
        if (p[i][l])
          for (std::size_t j = 0; j < d; ++j) q[i][j] = q[i][j] || pat[l][j];
    p = std::move(q);
  }
  return false;
}

inline void require_primitive(const Substitution& sub) {
  if (!is_primitive(incidence_matrix(sub))) throw ValidationError("substitution is not primitive");
}

inline std::size_t complexity(const Substitution& sub, std::size_t n) {
  if (n < 1) throw ValidationError("complexity: n must be >= 1");
  return admissible_blocks(sub, n).size();
}

inline LanguageTable generate_language(const Substitution& sub, std::size_t n) {
  if (n < 1) throw ValidationError("generate_language: n must be >= 1");
  LanguageTable t;
  t.blocks.push_back(WordSet{Word{}});
  for (std::size_t k = 1; k <= n; ++k) t.blocks.push_back(admissible_blocks(sub, k));
  return t;
}

struct AperiodicityVerdict {
  bool periodic = false;
  std::size_t window = 0;    // lengths checked (aperiodic case) or the length exhibiting P(n) ≤ n
  Word period_word;          // a period block when periodic
};

/// Morse-Hedlund window test: periodic iff P(n) ≤ n for some n ≤ n_max.
inline AperiodicityVerdict is_aperiodic(const Substitution& sub, std::size_t n_max = 50) {
  AperiodicityVerdict v;
  v.window = n_max;
  for (std::size_t n = 1; n <= n_max; ++n) {
    if (admissible_blocks(sub, n).size() > n) continue;
    v.periodic = true;
    v.window = n;
    // A long admissible word; its least period is the period of the (minimal) subshift.
    Word w{0};
    while (w.size() < 4 * n + 4) w = sub.apply(w);
    for (std::size_t p = 1; p <= w.size(); ++p) {
      bool ok = true;
      for (std::size_t i = 0; i + p < w.size() && ok; ++i) ok = w[i] == w[i + p];
      if (ok) {
        // Skip a possible non-recurrent prefix by reading the period from the middle.
        std::size_t start = w.size() / 2;
        v.period_word = subword(w, start, p);
        break;
      }
    }
    if (v.period_word.empty()) {
      std::size_t start = w.size() / 2;
      for (std::size_t p = 1; start + 2 * p <= w.size(); ++p) {
        bool ok = true;
        for (std::size_t i = start; i + p < w.size() && ok; ++i) ok = w[i] == w[i + p];
        if (ok) {
          v.period_word = subword(w, start, p);
          break;
        }
      }
    }
    return v;
  }
  return v;
}

/// Characteristic polynomial det(xI − M) (Faddeev-LeVerrier over Q).
inline QPoly charpoly(const IntMatrix& m) {
  std::size_t n = m.size();
  RatMatrix a = to_rational(m);
  RatMatrix mk(n, RatVector(n, 0));  // M_k
  std::vector<Rational> c(n + 1, 0);
  c[n] = 1;
  for (std::size_t k = 1; k <= n; ++k) {
    // M_k = A M_{k-1} + c_{n-k+1} I, c_{n-k} = -tr(A M_k)/k
    RatMatrix prod(n, RatVector(n, 0));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t l = 0; l < n; ++l)
        if (mk[i][l] != 0)
          for (std::size_t j = 0; j < n; ++j) prod[i][j] += mk[i][l] * a[l][j];
    // prod = M_{k-1} A (same trace behaviour since they commute as polynomials in A)
    for (std::size_t i = 0; i < n; ++i) prod[i][i] += c[n - k + 1];
    mk = prod;
    Rational tr = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t l = 0; l < n; ++l) tr += a[i][l] * mk[l][i];
    c[n - k] = -tr / static_cast<int>(k);
  }
  return QPoly(c);
}

inline RatMatrix rat_mul(const RatMatrix& a, const RatMatrix& b) {
  std::size_t n = a.size(), k = b.size(), p = b.empty() ? 0 : b[0].size();
  RatMatrix r(n, RatVector(p, 0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t l = 0; l < k; ++l)
      if (a[i][l] != 0)
        for (std::size_t j = 0; j < p; ++j) r[i][j] += a[i][l] * b[l][j];
  return r;
}

/// p(M) for a rational polynomial p.
inline RatMatrix eval_matrix_poly(const QPoly& p, const IntMatrix& m) {
  std::size_t n = m.size();
  RatMatrix a = to_rational(m);
  RatMatrix r(n, RatVector(n, 0));
  for (int i = p.degree(); i >= 0; --i) {
    r = rat_mul(r, a);
    for (std::size_t j = 0; j < n; ++j) r[j][j] += p.coeff(i);
  }
  return r;
}

struct PFData {
  AlgebraicNumber lambda;
  FieldPtr field;
  FieldVector u;       // left eigenvector, entries sum to 1 (letter frequencies)
  FieldVector w;       // right eigenvector, entries sum to 1
  FieldElement s_pf;   // coordinate sum of u before normalization (u scaled with first entry 1)
  QPoly charpoly;      // characteristic polynomial of the incidence matrix

  FieldElement lambda_element() const { return FieldElement::generator(field); }
  FieldElement one() const { return FieldElement::rational(field, 1); }
  FieldElement zero() const { return FieldElement::rational(field, 0); }
};

namespace detail {

inline FieldVector pf_vector(const FieldMatrix& a, const FieldElement& lambda, const FieldPtr& f, FieldElement* raw_sum) {
  std::size_t d = a.size();
  FieldMatrix m = a;
  for (std::size_t i = 0; i < d; ++i) m[i][i] -= lambda;
  auto ns = field_nullspace(m, d, f);
  if (ns.size() != 1) throw InconsistencyError("Perron-Frobenius eigenspace is not one-dimensional");
  FieldVector v = ns[0];
  FieldElement first = v[0];
  if (first.is_zero()) throw InconsistencyError("Perron-Frobenius eigenvector has a zero entry");
  FieldElement sum = FieldElement::rational(f, 0);
  for (auto& x : v) {
    x = x / first;
    sum += x;
  }
  if (raw_sum) *raw_sum = sum;
  for (auto& x : v) {
    x = x / sum;
    if (x.sign() <= 0) throw InconsistencyError("Perron-Frobenius eigenvector is not positive");
  }
  return v;
}

}  // namespace detail

inline PFData pf_data(const IntMatrix& m) {
  if (!is_primitive(m)) throw ValidationError("pf_data: matrix is not primitive");
  PFData pf;
  pf.charpoly = charpoly(m);
  pf.lambda = largest_real_root(pf.charpoly);
  pf.field = std::make_shared<NumberField>(pf.lambda);
  FieldElement lam = pf.lambda_element();
  FieldMatrix fm = to_field(m, pf.field);
  FieldMatrix ft = to_field(transpose(m), pf.field);
  pf.u = detail::pf_vector(ft, lam, pf.field, &pf.s_pf);
  pf.w = detail::pf_vector(fm, lam, pf.field, nullptr);
  return pf;
}

inline PFData pf_data(const Substitution& sub) { return pf_data(incidence_matrix(sub)); }

/// λ > 1 is an algebraic integer whose other conjugates lie in the open unit disc.
inline bool is_pisot_number(const PFData& pf) {
  const FieldPtr& f = pf.field;
  if (!(pf.lambda_element() > pf.one())) return false;
  for (const auto& c : pf.lambda.minpoly.coeffs())
    if (denominator(c) != 1) return false;
  if (pf.lambda.is_rational()) return true;
  // g = minpoly / (x − λ) over Q(λ), by synthetic division.
  const auto& mc = pf.lambda.minpoly.coeffs();
  int n = pf.lambda.degree();
  std::vector<FieldElement> g(static_cast<std::size_t>(n), FieldElement::rational(f, 0));
  FieldElement carry = FieldElement::rational(f, 0);
  FieldElement lam = pf.lambda_element();
  for (int i = n; i >= 1; --i) {
    carry = carry * lam + FieldElement::rational(f, mc[static_cast<std::size_t>(i)]);
    g[static_cast<std::size_t>(i - 1)] = carry;
  }
  return schur_stable(g);
}

/// Pisot in the spectral sense: λ is a Pisot number and every other eigenvalue of the
/// incidence matrix has modulus < 1.
inline bool is_pisot(const PFData& pf) {
  if (!is_pisot_number(pf)) return false;
  for (const auto& f : factor_over_q(pf.charpoly)) {
    if (f.factor == pf.lambda.minpoly) {
      if (f.multiplicity != 1) return false;
      continue;
    }
    if (!schur_stable(f.factor)) return false;
  }
  return true;
}

enum class CRVerdict { ExactCR, ProvedCR, Inconclusive };

inline std::string to_string(CRVerdict v) {
  switch (v) {
    case CRVerdict::ExactCR: return "ExactCR";
    case CRVerdict::ProvedCR: return "ProvedCR";
    default: return "Inconclusive";
  }
}

/// Component of the all-ones row vector in the primary (generalized left eigen-) space of a
/// factor f^e of the characteristic polynomial χ.
inline RatVector ones_primary_component(const IntMatrix& m, const QPoly& chi, const QPoly& fe) {
  QPoly g = chi / fe;
  auto [one, s, t] = QPoly::xgcd(g, fe);
  (void)t;
  if (one.degree() != 0) throw InconsistencyError("primary decomposition: factors not coprime");
  RatMatrix proj = eval_matrix_poly(s * g, m);
  std::size_t d = m.size();
  RatVector out(d, 0);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) out[j] += proj[i][j];
  return out;
}

inline CRVerdict cr_check(const Substitution& sub) {
  IntMatrix m = incidence_matrix(sub);
  PFData pf = pf_data(m);
  bool constant = true;
  for (const auto& x : pf.u) constant = constant && x == pf.u[0];
  if (constant) return CRVerdict::ExactCR;
  if (!is_pisot_number(pf)) return CRVerdict::Inconclusive;
  QPoly chi = charpoly(m);
  for (const auto& f : factor_over_q(chi)) {
    if (f.factor == pf.lambda.minpoly) continue;
    if (schur_stable(f.factor)) continue;
    QPoly fe = QPoly::constant(1);
    for (int i = 0; i < f.multiplicity; ++i) fe = fe * f.factor;
    for (const auto& v : ones_primary_component(m, chi, fe))
      if (v != 0) return CRVerdict::Inconclusive;
  }
  return CRVerdict::ProvedCR;
}

/// Exact cylinder measures μ([w]) for the unique invariant measure, memoised.
///
/// Long words are reduced through a power ξ^k with all images of length ≥ 2:
/// μ[w] = λ^{-k} Σ_v μ[v] · #{j < |ξ^k(v_0)| : w occurs at j in ξ^k(v)}, with v of length
/// ceil((|w|−1)/2)+1. Two-blocks come from the eigenvector of the 2-block substitution.
class MeasureOracle {
 public:
  explicit MeasureOracle(Substitution sub) : sub_(std::move(sub)) {
    pf_ = pf_data(sub_);
    power_ = 1;
    pow_sub_ = sub_;
    while (pow_sub_.min_image_length() < 2) {
      ++power_;
      pow_sub_ = sub_.power(power_);
      if (power_ > 64) throw ResourceError("measure: no power with images of length >= 2");
    }
    inv_lambda_k_ = pf_.lambda_element().pow(-power_);
    init_two_blocks();
  }

  const PFData& pf() const { return pf_; }
  const Substitution& substitution() const { return sub_; }

  FieldElement measure(const Word& w) const {
    std::lock_guard<std::recursive_mutex> lock(mu_);
    return measure_locked(w);
  }

  /// Measure of a cylinder anchored anywhere (shift invariance ignores the offset).
  FieldElement measure(const CylinderSet& c) const {
    const auto& parts = c.parts();
    if (parts.empty()) return pf_.zero();
    if (c.is_whole()) return pf_.one();
    // Disjoint union assumed only when offsets agree; otherwise expand to a common window.
    int lo = 0, hi = 0;
    for (const auto& p : parts) {
      lo = std::min(lo, p.offset);
      hi = std::max(hi, p.offset + static_cast<int>(p.word.size()));
    }
    FieldElement total = pf_.zero();
    for (const auto& w : admissible_blocks(sub_, static_cast<std::size_t>(hi - lo))) {
      auto in = c.contains_at(w, -lo);
      if (in && *in) total += measure(w);
    }
    return total;
  }

 private:
  void init_two_blocks() {
    WordSet b2 = admissible_blocks(sub_, 2);
    std::vector<Word> blocks(b2.begin(), b2.end());
    std::map<Word, std::size_t> index;
    for (std::size_t i = 0; i < blocks.size(); ++i) index[blocks[i]] = i;
    IntMatrix m(blocks.size(), IntVector(blocks.size(), 0));
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      Word img = sub_.apply(blocks[i]);
      std::size_t l0 = sub_.image(blocks[i][0]).size();
      for (std::size_t j = 0; j < l0; ++j) m[i][index.at(subword(img, j, 2))] += 1;
    }
    FieldMatrix ft = to_field(transpose(m), pf_.field);
    FieldMatrix a = ft;
    for (std::size_t i = 0; i < a.size(); ++i) a[i][i] -= pf_.lambda_element();
    auto ns = field_nullspace(a, a.size(), pf_.field);
    if (ns.size() != 1) throw InconsistencyError("two-block frequencies: eigenspace is not one-dimensional");
    FieldElement sum = pf_.zero();
    for (const auto& x : ns[0]) sum += x;
    for (std::size_t i = 0; i < blocks.size(); ++i) cache_[blocks[i]] = ns[0][i] / sum;
    cache_[Word{}] = pf_.one();
    for (Symbol a1 = 0; a1 < sub_.size(); ++a1) cache_[Word{a1}] = pf_.u[static_cast<std::size_t>(a1)];
  }

  FieldElement measure_locked(const Word& w) const {
    auto it = cache_.find(w);
    if (it != cache_.end()) return it->second;
    if (w.size() <= 2) return pf_.zero();  // inadmissible short word
    std::size_t m = (w.size() - 1 + 1) / 2 + 1;
    FieldElement total = pf_.zero();
    bool any = false;
    for (const auto& v : admissible_blocks(sub_, m)) {
      Word img = pow_sub_.apply(v);
      std::size_t l0 = pow_sub_.image(v[0]).size();
      long count = 0;
      for (std::size_t j = 0; j < l0 && j + w.size() <= img.size(); ++j)
        if (std::equal(w.begin(), w.end(), img.begin() + static_cast<std::ptrdiff_t>(j))) ++count;
      if (count) {
        total += Rational(count) * measure_locked(v);
        any = true;
      }
    }
    FieldElement r = any ? total * inv_lambda_k_ : pf_.zero();
    cache_[w] = r;
    return r;
  }

  Substitution sub_;
  PFData pf_;
  int power_ = 1;
  Substitution pow_sub_;
  FieldElement inv_lambda_k_;
  mutable std::recursive_mutex mu_;
  mutable std::map<Word, FieldElement> cache_;
};

/// μ([w]); throws on inadmissible words.
inline FieldElement cylinder_measure(const Substitution& sub, const Word& w) {
  if (!w.empty() && !admissible_blocks(sub, w.size()).count(w)) throw ValidationError("cylinder_measure: inadmissible word");
  return MeasureOracle(sub).measure(w);
}

/// The Z[1/λ]-module Im τ = ∪_m λ^{-m} L with L the Z-span of the letter frequencies.
class TraceLattice {
 public:
  explicit TraceLattice(const PFData& pf) : pf_(pf) {
    std::size_t n = static_cast<std::size_t>(pf.field->degree());
    // integer generators: coordinates of u_i scaled by a common denominator
    Integer den = 1;
    for (const auto& x : pf.u)
      for (const auto& c : x.coordinates()) den = lcm(den, denominator(c));
    scale_ = den;
    IntMatrix gens;
    for (const auto& x : pf.u) {
      IntVector v(n);
      auto c = x.coordinates();
      for (std::size_t j = 0; j < n; ++j) v[j] = numerator(c[j] * Rational(den));
      gens.push_back(v);
    }
    basis_ = hermite_normal_form(gens);
    // multiplication by λ in the lattice basis
    for (const auto& row : basis_) {
      FieldElement e = from_scaled(row) * pf_.lambda_element();
      auto coords = lattice_coordinates(e);
      if (!coords) throw InconsistencyError("trace lattice not closed under multiplication by λ");
      IntVector zr;
      for (const auto& q : *coords) {
        if (denominator(q) != 1) throw InconsistencyError("trace lattice not closed under multiplication by λ");
        zr.push_back(numerator(q));
      }
      lambda_action_.push_back(zr);  // row i = coordinates of λ·b_i
    }
  }

  std::size_t rank() const { return basis_.size(); }
  std::vector<FieldElement> basis() const {
    std::vector<FieldElement> out;
    for (const auto& row : basis_) out.push_back(from_scaled(row));
    return out;
  }
  /// λ is a unit in the lattice (|det| = 1), so Im τ = L.
  bool lambda_divisible() const {
    IntMatrix a = lambda_action_;
    return abs(determinant(a)) == 1;
  }

  bool contains(const FieldElement& x) const {
    auto c = lattice_coordinates(x);
    if (!c) return false;
    Integer den = 1;
    for (const auto& q : *c) den = lcm(den, denominator(q));
    if (den == 1) return true;
    IntVector y;
    for (const auto& q : *c) y.push_back(numerator(q * Rational(den)));
    std::size_t steps = rank() * (msb(den) + 1);
    for (std::size_t m = 0; m <= steps; ++m) {
      bool zero = true;
      for (auto& v : y) {
        v = floor_div(v, 1) % den;
        if (v < 0) v += den;
        zero = zero && v == 0;
      }
      if (zero) return true;
      // y ← y · A (row coordinates transform by the action matrix)
      IntVector next(y.size(), 0);
      for (std::size_t i = 0; i < y.size(); ++i)
        for (std::size_t j = 0; j < y.size(); ++j) next[j] += y[i] * lambda_action_[i][j];
      y = std::move(next);
    }
    return false;
  }
  bool contains(const Rational& q) const { return contains(FieldElement::rational(pf_.field, q)); }

  /// Human-readable description such as "Z[1/2]" or "Z + Zλ".
  std::string describe() const {
    if (pf_.field->degree() == 1) {
      Rational g = from_scaled(basis_[0]).rational_part();
      Integer n = numerator(pf_.lambda.rational_value());
      Integer a = numerator(g), b = denominator(g);
      for (Integer p = 2; p <= n; ++p) {
        if (n % p != 0) continue;
        bool prime = true;
        for (Integer q = 2; q * q <= p; ++q) prime = prime && (p % q != 0);
        if (!prime) continue;
        while (a % p == 0) a /= p;
        while (b % p == 0) b /= p;
      }
      std::string ring = n == 1 ? "Z" : "Z[1/" + n.str() + "]";
      Rational c(a, b);
      if (c == 1) return ring;
      return to_string(c) + "·" + ring;
    }
    std::string out;
    for (const auto& e : basis()) {
      if (!out.empty()) out += " + ";
      std::string s = e.str("λ");
      if (s == "1")
        out += "Z";
      else if (s.find(' ') == std::string::npos)
        out += "Z" + s;
      else
        out += "Z(" + s + ")";
    }
    if (!lambda_divisible()) out = "Z[1/λ]·(" + out + ")";
    return out;
  }

 private:
  static std::size_t msb(const Integer& d) {
    std::size_t b = 0;
    Integer x = d;
    while (x > 1) {
      x >>= 1;
      ++b;
    }
    return b;
  }
  static Integer determinant(IntMatrix a) {
    RatMatrix m = to_rational(a);
    std::size_t n = m.size();
    Rational det = 1;
    for (std::size_t c = 0; c < n; ++c) {
      std::size_t p = c;
      while (p < n && m[p][c] == 0) ++p;
      if (p == n) return 0;
      if (p != c) {
        std::swap(m[p], m[c]);
        det = -det;
      }
      det *= m[c][c];
      for (std::size_t i = c + 1; i < n; ++i) {
        Rational k = m[i][c] / m[c][c];
        for (std::size_t j = c; j < n; ++j) m[i][j] -= k * m[c][j];
      }
    }
    return numerator(det);
  }
  FieldElement from_scaled(const IntVector& row) const {
    std::vector<Rational> c;
    for (const auto& v : row) c.push_back(Rational(v) / Rational(scale_));
    return FieldElement(pf_.field, c);
  }
  /// Rational coordinates of x in the lattice basis, or nullopt if x is outside its Q-span.
  std::optional<RatVector> lattice_coordinates(const FieldElement& x) const {
    std::size_t n = static_cast<std::size_t>(pf_.field->degree());
    std::size_t r = basis_.size();
    RatMatrix a(n, RatVector(r, 0));
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < n; ++j) a[j][i] = Rational(basis_[i][j]) / Rational(scale_);
    return rational_solve(a, x.coordinates());
  }

  PFData pf_;
  Integer scale_ = 1;
  IntMatrix basis_;
  IntMatrix lambda_action_;
};

}  // namespace flowmcg
