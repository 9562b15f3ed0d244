#pragma once

// Mapping class group assembly: the Z-part from r_mu of the substitution flow code, the finite
// part from asymptotic classes and (under CR) the automorphism quotient. Also the Sturmian
// dichotomy, odometers, the two-measure hierarchical construction and a linear-complexity
// checklist.

#include "flowmcg/asymptotics.hpp"
#include "flowmcg/automorphisms.hpp"
#include "flowmcg/coinvariants.hpp"
#include "flowmcg/errors.hpp"
#include "flowmcg/flow.hpp"
#include "flowmcg/substitution.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace flowmcg {

struct McgOptions {
  int aut_radius = 2;
  int n_check = 12;
  std::size_t tail_check = 2048;
  int relation_bound = 6;
};

struct McgReport {
  PFData pf;
  bool pisot = false;
  bool pisot_number = false;
  CRVerdict cr = CRVerdict::Inconclusive;

  FieldElement r_mu_xi;                       // equals λ
  std::optional<std::pair<int, int>> relation;

  AsymptoticClassSet classes;
  std::vector<std::size_t> xi_action;         // permutation of classes
  Integer finite_bound;                       // (#classes)!

  std::optional<AutGroupReport> aut;
  std::optional<ShiftQuotient> quotient;
  std::vector<std::vector<std::size_t>> aut_class_actions;  // per quotient element
  std::string finite_part = "unknown";
  std::string product = "unknown";            // direct / semidirect / unknown
  std::string structure = "unknown";
  std::vector<std::string> caveats;
};

inline Integer factorial(std::size_t n) {
  Integer f = 1;
  for (std::size_t k = 2; k <= n; ++k) f *= static_cast<unsigned>(k);
  return f;
}

namespace detail {

inline bool permutations_commute(const std::vector<std::size_t>& p, const std::vector<std::size_t>& q) {
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p[q[i]] != q[p[i]]) return false;
  return true;
}

}  // namespace detail

inline McgReport assemble_mcg(const Substitution& sub, const McgOptions& opt = {}) {
  require_primitive(sub);
  if (is_aperiodic(sub).periodic) throw ValidationError("assemble_mcg: the substitution subshift is periodic");
  McgReport rep;
  rep.pf = pf_data(sub);
  rep.pisot = is_pisot(rep.pf);
  rep.pisot_number = is_pisot_number(rep.pf);
  rep.cr = cr_check(sub);

  FlowCode xi = substitution_flow_code(sub);
  rep.r_mu_xi = r_mu(xi);
  if (!(rep.r_mu_xi == rep.pf.lambda_element()))
    throw InconsistencyError("assemble_mcg: r_mu of the substitution flow code differs from lambda");
  rep.relation = lambda_relation_search(rep.r_mu_xi, opt.relation_bound, opt.relation_bound);
  rep.caveats.push_back("the image of r_mu is infinite cyclic; r_mu(xi~) = lambda lies in it but is not claimed to generate it");

  rep.classes = asymptotic_classes(sub, opt.tail_check);
  rep.xi_action = action_of_substitution(sub, 1, rep.classes);
  rep.finite_bound = factorial(rep.classes.classes.size());
  rep.caveats.push_back("asymptotic classes " + rep.classes.certificate());

  if (rep.cr == CRVerdict::Inconclusive) {
    rep.caveats.push_back("CR not established; finite part only bounded by (#classes)! = " + rep.finite_bound.str());
    return rep;
  }
  rep.aut = search_automorphisms(sub, opt.aut_radius, opt.n_check);
  rep.quotient = shift_quotient(sub, *rep.aut);
  const ShiftQuotient& q = *rep.quotient;
  if (Integer(static_cast<unsigned>(q.order())) > rep.finite_bound)
    throw InconsistencyError("assemble_mcg: automorphism quotient exceeds the asymptotic-class bound");
  rep.finite_part = q.type;
  rep.caveats.push_back("finite part identified at search radius " + std::to_string(opt.aut_radius) + " (" +
                        rep.aut->certificate() + ")");

  bool commute = true;
  std::set<std::vector<std::size_t>> distinct;
  for (auto idx : q.representatives) {
    auto perm = action_of_code(rep.aut->elements[idx].code, rep.classes);
    commute = commute && detail::permutations_commute(perm, rep.xi_action);
    distinct.insert(perm);
    rep.aut_class_actions.push_back(std::move(perm));
  }
  if (distinct.size() != q.order())
    rep.caveats.push_back("automorphism quotient does not act faithfully on the computed classes");
  // finite-part elements are determined by their class permutation, so commuting with the
  // action of xi means conjugation by xi~ is trivial
  if (q.order() == 1) {
    rep.product = "direct";
    rep.structure = "Z";
  } else if (commute && distinct.size() == q.order()) {
    rep.product = "direct";
    rep.structure = q.type + " x Z";
  } else {
    rep.product = "semidirect";
    rep.structure = q.type + " x| Z";
  }
  return rep;
}

// ---------------------------------------------------------------- Sturmian

enum class SturmianVerdictKind { TrivialMCG, IsomorphicToZ, NotApplicable };

inline std::string to_string(SturmianVerdictKind k) {
  switch (k) {
    case SturmianVerdictKind::TrivialMCG: return "TrivialMCG";
    case SturmianVerdictKind::IsomorphicToZ: return "IsomorphicToZ";
    case SturmianVerdictKind::NotApplicable: return "NotApplicable";
  }
  return "?";
}

/// β = (a + b√D)/c with D > 0 not a perfect square.
struct QuadraticSurd {
  Integer b, a, d, c;
  QuadraticSurd conjugate() const { return {-b, a, d, c}; }
  QuadraticSurd one_minus() const { return {-b, c - a, d, c}; }
  double approx() const {
    return (to_double(Rational(a)) + to_double(Rational(b)) * std::sqrt(to_double(Rational(d)))) / to_double(Rational(c));
  }
};

struct SturmianVerdict {
  SturmianVerdictKind kind = SturmianVerdictKind::NotApplicable;
  std::string reason;
  std::optional<QuadraticSurd> beta;
  std::optional<double> conjugate_approx;
};

namespace detail {

inline bool is_square(const Integer& n) {
  if (n < 0) return false;
  Integer r = boost::multiprecision::sqrt(n);
  return r * r == n;
}

/// Sign of p + q√D for rationals p, q and D > 0 non-square.
inline int surd_sign(const Rational& p, const Rational& q, const Integer& d) {
  int sp = p.sign(), sq = q.sign();
  if (sq == 0) return sp;
  if (sp == 0) return sq;
  if (sp == sq) return sp;
  // opposite signs: compare p² with q²D
  Rational lhs = p * p, rhs = q * q * Rational(d);
  if (lhs == rhs) return 0;
  return lhs > rhs ? sp : sq;
}

/// Sign of s - r for a surd s and rational r.
inline int compare_surd(const QuadraticSurd& s, const Rational& r) {
  Rational c(s.c);
  int sc = c.sign();
  return sc * surd_sign(Rational(s.a) - r * c, Rational(s.b), s.d);
}

inline void validate_surd(const QuadraticSurd& s) {
  if (s.c == 0) throw ValidationError("surd: zero denominator");
  if (s.d <= 0) throw ValidationError("surd: radicand must be positive");
  if (s.b == 0 || is_square(s.d)) throw ValidationError("sturmian_classify: rational input is not allowed");
}

}  // namespace detail

inline SturmianVerdict sturmian_classify(const QuadraticSurd& beta) {
  detail::validate_surd(beta);
  SturmianVerdict v;
  v.beta = beta;
  if (detail::compare_surd(beta, 0) <= 0 || detail::compare_surd(beta, 1) >= 0) {
    v.kind = SturmianVerdictKind::NotApplicable;
    v.reason = "beta is not in (0,1)";
    return v;
  }
  QuadraticSurd conj = beta.conjugate();
  v.conjugate_approx = conj.approx();
  bool inside = detail::compare_surd(conj, 0) >= 0 && detail::compare_surd(conj, 1) <= 0;
  v.kind = inside ? SturmianVerdictKind::TrivialMCG : SturmianVerdictKind::IsomorphicToZ;
  v.reason = inside ? "quadratic irrational with conjugate in [0,1]: not a Sturm number"
                    : "Sturm number: conjugate outside [0,1], conjugate to a substitution subshift";
  return v;
}

/// β as the root of an integer quadratic in the given rational interval.
inline SturmianVerdict sturmian_classify(const std::vector<Integer>& minpoly, const RationalInterval& iv) {
  if (minpoly.size() != 3 || minpoly[2] == 0)
    throw ValidationError("sturmian_classify: minimal polynomial must be quadratic (use the non-quadratic tag otherwise)");
  const Integer &c0 = minpoly[0], &c1 = minpoly[1], &c2 = minpoly[2];
  Integer disc = c1 * c1 - 4 * c2 * c0;
  if (disc < 0) throw ValidationError("sturmian_classify: polynomial has no real roots");
  if (detail::is_square(disc)) throw ValidationError("sturmian_classify: rational input is not allowed (reducible quadratic)");
  std::optional<QuadraticSurd> hit;
  for (int sg : {1, -1}) {
    QuadraticSurd s{Integer(sg), -c1, disc, 2 * c2};
    if (detail::compare_surd(s, iv.lo) >= 0 && detail::compare_surd(s, iv.hi) <= 0) {
      if (hit) throw ValidationError("sturmian_classify: interval contains both roots");
      hit = s;
    }
  }
  if (!hit) throw ValidationError("sturmian_classify: interval contains no root");
  return sturmian_classify(*hit);
}

inline SturmianVerdict sturmian_classify_non_quadratic() {
  SturmianVerdict v;
  v.kind = SturmianVerdictKind::TrivialMCG;
  v.reason = "declared non-quadratic: not a Sturm number";
  return v;
}

// ---------------------------------------------------------------- odometers

struct OdometerReport {
  std::vector<unsigned long long> preperiod, period;
  std::vector<unsigned long long> period_primes;  // distinct, ascending
  std::string coinvariants;
  std::size_t unit_rank = 0;
  std::string presentation;
};

inline bool is_prime(unsigned long long n) {
  if (n < 2) return false;
  for (unsigned long long p = 2; p * p <= n; ++p)
    if (n % p == 0) return false;
  return true;
}

inline OdometerReport odometer_mcg(const std::vector<unsigned long long>& preperiod,
                                   const std::vector<unsigned long long>& period) {
  if (period.empty()) throw ValidationError("odometer: the period must be nonempty");
  for (auto p : preperiod)
    if (!is_prime(p)) throw ValidationError("odometer: " + std::to_string(p) + " is not prime");
  for (auto p : period)
    if (!is_prime(p)) throw ValidationError("odometer: " + std::to_string(p) + " is not prime");
  OdometerReport r;
  r.preperiod = preperiod;
  r.period = period;
  std::set<unsigned long long> primes(period.begin(), period.end());
  r.period_primes.assign(primes.begin(), primes.end());
  r.unit_rank = primes.size();
  // finitely many preperiod primes only rescale the group
  std::string inv;
  for (auto p : r.period_primes) inv += (inv.empty() ? "" : ",") + std::to_string(p);
  std::size_t prod = 1;
  for (auto p : r.period_primes) prod *= static_cast<std::size_t>(p);
  r.coinvariants = "Z[1/" + std::to_string(prod) + "]";
  std::string zk = r.unit_rank == 1 ? "ℤ" : "ℤ^" + std::to_string(r.unit_rank);
  r.presentation = "𝒪_P/⟨(1,1,…)⟩ ⋊ " + zk;
  return r;
}

// ---------------------------------------------------------------- hierarchical words

struct HierarchicalLevel {
  Word w0, w1;
  Rational freq0;  // frequency of 0 in w0
};

struct HierarchicalWordSpec {
  std::vector<int> n;
  std::vector<HierarchicalLevel> levels;  // levels[i] is stage i+1
  Rational product_bound;                 // ∏ N_i/(N_i+1), a lower bound for freq0
};

inline HierarchicalWordSpec hierarchical_subshift(const std::vector<int>& n) {
  if (n.empty()) throw ValidationError("hierarchical: at least one stage is required");
  for (int x : n)
    if (x < 2) throw ValidationError("hierarchical: every N_i must be at least 2");
  HierarchicalWordSpec spec;
  spec.n = n;
  spec.product_bound = 1;
  auto count0 = [](const Word& w) { return static_cast<long>(std::count(w.begin(), w.end(), Symbol{0})); };
  for (std::size_t i = 0; i < n.size(); ++i) {
    HierarchicalLevel lv;
    if (i == 0) {
      lv.w0.assign(static_cast<std::size_t>(n[0]), 0);
      lv.w0.push_back(1);
      lv.w1.assign(static_cast<std::size_t>(n[0]), 1);
      lv.w1.push_back(0);
    } else {
      const auto& prev = spec.levels.back();
      for (int k = 0; k < n[i]; ++k) {
        lv.w0.insert(lv.w0.end(), prev.w0.begin(), prev.w0.end());
        lv.w1.insert(lv.w1.end(), prev.w1.begin(), prev.w1.end());
      }
      lv.w0.insert(lv.w0.end(), prev.w1.begin(), prev.w1.end());
      lv.w1.insert(lv.w1.end(), prev.w0.begin(), prev.w0.end());
      if (lv.w0.size() != static_cast<std::size_t>(n[i] + 1) * prev.w0.size())
        throw InconsistencyError("hierarchical: length recursion fails");
    }
    for (std::size_t k = 0; k < lv.w0.size(); ++k)
      if (lv.w1[k] != 1 - lv.w0[k]) throw InconsistencyError("hierarchical: involution symmetry fails");
    lv.freq0 = Rational(count0(lv.w0), static_cast<long>(lv.w0.size()));
    spec.product_bound *= Rational(n[i], n[i] + 1);
    spec.levels.push_back(std::move(lv));
  }
  return spec;
}

/// Words whose factors approximate the language at the last stage: the two stage words and their
/// pairwise concatenations (all of which occur at the next stage).
inline std::vector<Word> hierarchical_samples(const HierarchicalWordSpec& spec) {
  const auto& lv = spec.levels.back();
  std::vector<Word> out;
  for (const Word* x : {&lv.w0, &lv.w1})
    for (const Word* y : {&lv.w0, &lv.w1}) {
      Word w = *x;
      w.insert(w.end(), y->begin(), y->end());
      out.push_back(std::move(w));
    }
  return out;
}

// ---------------------------------------------------------------- checklist

struct ComplexityWindow {
  std::size_t n_lo = 0, n_hi = 0;
  Rational min_ratio, max_ratio;  // of P(n)/n over the window
  std::size_t k = 0;              // least integer above the window estimate of the liminf (the window minimum)
  std::size_t measure_bound = 0;  // k - 1 ergodic non-atomic measures
};

struct Checklist {
  ComplexityWindow window;
  std::optional<std::size_t> asymptotic_classes;
  std::optional<std::size_t> infinitesimal_rank;
  std::string verdict;
};

namespace detail {

inline ComplexityWindow complexity_window(const std::vector<std::size_t>& p, std::size_t n_lo) {
  ComplexityWindow w;
  w.n_lo = n_lo;
  w.n_hi = n_lo + p.size() - 1;
  for (std::size_t i = 0; i < p.size(); ++i) {
    Rational r(static_cast<long>(p[i]), static_cast<long>(n_lo + i));
    if (i == 0 || r < w.min_ratio) w.min_ratio = r;
    if (i == 0 || r > w.max_ratio) w.max_ratio = r;
  }
  // floor(min) + 1
  Integer fl = numerator(w.min_ratio) / denominator(w.min_ratio);
  w.k = fl.convert_to<std::size_t>() + 1;
  w.measure_bound = w.k - 1;
  return w;
}

}  // namespace detail

inline Checklist virtually_abelian_report(const Substitution& sub, std::size_t n_lo = 1, std::size_t n_hi = 48) {
  require_primitive(sub);
  Checklist c;
  std::vector<std::size_t> p;
  for (std::size_t n = n_lo; n <= n_hi; ++n) p.push_back(complexity(sub, n));
  c.window = detail::complexity_window(p, n_lo);
  c.asymptotic_classes = asymptotic_classes(sub).classes.size();
  c.infinitesimal_rank = infinitesimal_rank(sub);
  if (*c.infinitesimal_rank == 0)
    c.verdict = "virtually abelian: linear-complexity hypotheses satisfied on window and Inf = 0";
  else
    c.verdict = "Inf != 0: the linear-complexity criterion is inapplicable; the substitution route gives virtually Z";
  return c;
}

inline Checklist virtually_abelian_report(const HierarchicalWordSpec& spec, std::size_t n_lo = 1, std::optional<std::size_t> n_hi = {}) {
  Checklist c;
  auto samples = hierarchical_samples(spec);
  std::size_t stage_len = spec.levels.back().w0.size();
  std::size_t hi = n_hi.value_or(stage_len);
  if (hi < n_lo || hi > stage_len) {
    c.verdict = "insufficient data";
    return c;
  }
  std::vector<std::size_t> p;
  for (std::size_t n = n_lo; n <= hi; ++n) {
    WordSet s;
    for (const auto& w : samples) collect_blocks(w, n, s);
    p.push_back(s.size());
  }
  c.window = detail::complexity_window(p, n_lo);
  c.verdict = "finite-stage window: at most " + std::to_string(c.window.measure_bound) + " ergodic non-atomic measures";
  return c;
}

}  // namespace flowmcg
