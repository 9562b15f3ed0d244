#pragma once

// Bounded-radius automorphism search, the quotient by the shift, and the action of a code on
// empirical block-frequency tables.

#include "flowmcg/errors.hpp"
#include "flowmcg/flow.hpp"
#include "flowmcg/substitution.hpp"
#include "flowmcg/symbolic.hpp"

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace flowmcg {

struct Automorphism {
  SlidingBlockCode code;
  SlidingBlockCode inverse;
};

struct AutGroupReport {
  int radius = 0;
  int n_check = 0;
  std::vector<Automorphism> elements;  // radius-ascending, then lexicographic in the rule
  std::string certificate() const {
    return "complete at radius " + std::to_string(radius) + ", language checked to depth " + std::to_string(n_check);
  }
};

struct AutSearchOptions {
  std::size_t candidate_budget = 2'000'000;  // backtracking nodes before giving up
  int constraint_depth = 3;                  // image blocks checked during backtracking
};

namespace detail {

struct WindowConstraint {
  std::vector<std::size_t> windows;  // window indices read by the block, left to right
};

/// All rules on the admissible (2r+1)-windows whose images of short admissible blocks stay
/// admissible; full checks happen afterwards.
inline std::vector<SlidingBlockCode> candidate_codes(const Substitution& sub, int r, const AutSearchOptions& opt) {
  std::size_t win = static_cast<std::size_t>(2 * r + 1);
  WordSet wset = admissible_blocks(sub, win);
  std::vector<Word> windows(wset.begin(), wset.end());
  std::map<Word, std::size_t> index;
  for (std::size_t i = 0; i < windows.size(); ++i) index[windows[i]] = i;

  // constraints attached to the last window they need
  std::vector<std::vector<WindowConstraint>> attached(windows.size());
  std::vector<WordSet> targets(static_cast<std::size_t>(opt.constraint_depth) + 1);
  for (int extra = 1; extra < opt.constraint_depth; ++extra) {
    targets[static_cast<std::size_t>(extra + 1)] = admissible_blocks(sub, static_cast<std::size_t>(extra + 1));
    for (const auto& b : admissible_blocks(sub, win + static_cast<std::size_t>(extra))) {
      WindowConstraint c;
      for (std::size_t i = 0; i + win <= b.size(); ++i) c.windows.push_back(index.at(subword(b, i, win)));
      std::size_t last = *std::max_element(c.windows.begin(), c.windows.end());
      attached[last].push_back(std::move(c));
    }
  }

  int d = sub.size();
  std::vector<Symbol> assign(windows.size(), 0);
  std::vector<SlidingBlockCode> out;
  std::size_t nodes = 0;
  auto check = [&](std::size_t i) {
    for (const auto& c : attached[i]) {
      Word img;
      for (auto k : c.windows) img.push_back(assign[k]);
      if (!targets[img.size()].count(img)) return false;
    }
    return true;
  };
  // iterative backtracking over window indices
  std::size_t i = 0;
  std::vector<int> next(windows.size(), 0);
  while (true) {
    if (i == windows.size()) {
      std::map<Word, Symbol> rule;
      for (std::size_t k = 0; k < windows.size(); ++k) rule[windows[k]] = assign[k];
      out.emplace_back(r, std::move(rule));
      if (i == 0) break;
      --i;
      continue;
    }
    if (next[i] >= d) {
      next[i] = 0;
      if (i == 0) break;
      --i;
      continue;
    }
    if (++nodes > opt.candidate_budget)
      throw ResourceError("automorphism search: candidate budget exhausted at radius " + std::to_string(r));
    assign[i] = static_cast<Symbol>(next[i]++);
    if (check(i)) ++i;
  }
  return out;
}

inline bool ignores_outer_symbols(const SlidingBlockCode& c) {
  std::map<Word, Symbol> inner;
  std::size_t len = c.window() - 2;
  for (const auto& [w, s] : c.rule()) {
    auto [it, fresh] = inner.emplace(subword(w, 1, len), s);
    if (!fresh && it->second != s) return false;
  }
  return true;
}

}  // namespace detail

inline AutGroupReport search_automorphisms(const Substitution& sub, int radius, int n_check,
                                           const AutSearchOptions& opt = {}) {
  if (radius < 0) throw ValidationError("search_automorphisms: negative radius");
  if (n_check < 2 * radius + 1) throw ValidationError("search_automorphisms: n_check must be at least 2*radius+1");
  require_primitive(sub);
  AutGroupReport rep;
  rep.radius = radius;
  rep.n_check = n_check;
  ReturnSystem x = whole_space_system(sub);
  FlowCodeOptions fopt;
  fopt.depth = n_check;
  fopt.inverse_budget = std::max(radius, 2);
  for (int r = 0; r <= radius; ++r) {
    for (auto& c : detail::candidate_codes(sub, r, opt)) {
      if (r > 0 && detail::ignores_outer_symbols(c)) continue;  // already found at a smaller radius
      if (!code_preserves_language(c, sub, static_cast<std::size_t>(n_check))) continue;
      try {
        FlowCode fc = make_flow_code(c, x, x, fopt, "automorphism");
        rep.elements.push_back(Automorphism{fc.code, fc.inverse});
      } catch (const ValidationError&) {
        // not invertible within the budget
      }
    }
  }
  return rep;
}

struct ShiftQuotient {
  std::vector<std::size_t> class_of;          // per report element
  std::vector<std::size_t> representatives;   // element index of each class
  std::vector<std::vector<std::size_t>> table;  // table[a][b] = class of a∘b
  std::size_t identity = 0;
  std::vector<std::size_t> orders;
  bool abelian = true;
  std::string type;
  std::size_t window = 4096;
  std::size_t order() const { return representatives.size(); }
  bool contains_cyclic(std::size_t n) const {
    for (auto o : orders)
      if (o % n == 0) return true;
    return false;
  }
};

namespace detail {

/// Output of a code on the sample, re-anchored so that index i is the image of sample position i.
struct AnchoredImage {
  Word w;
  long first = 0;  // sample position of w[0]
};

inline AnchoredImage anchored(const SlidingBlockCode& c, const Word& z) {
  return AnchoredImage{apply_code(c, z), c.radius()};
}

/// True iff a = σ^k b on the overlap for some |k| ≤ bound.
inline bool shift_equal(const AnchoredImage& a, const AnchoredImage& b, long bound) {
  for (long k = -bound; k <= bound; ++k) {
    // a at position p equals b at position p + k
    long lo = std::max(a.first, b.first - k);
    long hi = std::min(a.first + static_cast<long>(a.w.size()), b.first + static_cast<long>(b.w.size()) - k);
    if (hi - lo < 64) continue;
    bool ok = true;
    for (long p = lo; p < hi && ok; ++p)
      ok = a.w[static_cast<std::size_t>(p - a.first)] == b.w[static_cast<std::size_t>(p + k - b.first)];
    if (ok) return true;
  }
  return false;
}

inline std::string name_group(const ShiftQuotient& q) {
  std::size_t n = q.order();
  if (n == 1) return "trivial";
  std::size_t max_order = *std::max_element(q.orders.begin(), q.orders.end());
  if (max_order == n) return "Z/" + std::to_string(n);
  if (q.abelian) {
    // elementary abelian 2-groups are the common non-cyclic case
    bool all_two = true;
    for (auto o : q.orders) all_two = all_two && o <= 2;
    if (all_two) {
      std::string s;
      for (std::size_t m = n; m > 1; m /= 2) s += s.empty() ? "Z/2" : " x Z/2";
      return s;
    }
    return "abelian of order " + std::to_string(n);
  }
  if (n == 6) return "S3";
  return "nonabelian of order " + std::to_string(n);
}

}  // namespace detail

inline ShiftQuotient shift_quotient(const Substitution& sub, const AutGroupReport& rep, std::size_t window = 4096) {
  if (rep.elements.empty()) throw InconsistencyError("shift_quotient: report has no elements");
  ShiftQuotient q;
  q.window = window;
  PeriodicPoint pt = two_sided_fixed_point(sub, window / 2);
  const Word& z = pt.word;
  std::vector<detail::AnchoredImage> imgs;
  for (const auto& e : rep.elements) imgs.push_back(detail::anchored(e.code, z));

  auto classify = [&](const detail::AnchoredImage& im, int rad) -> std::optional<std::size_t> {
    std::optional<std::size_t> found;
    for (std::size_t c = 0; c < q.representatives.size(); ++c) {
      const auto& rc = rep.elements[q.representatives[c]].code;
      if (detail::shift_equal(im, imgs[q.representatives[c]], rad + rc.radius())) {
        if (found) throw InconsistencyError("shift_quotient: ambiguous identification within the comparison window");
        found = c;
      }
    }
    return found;
  };

  for (std::size_t i = 0; i < rep.elements.size(); ++i) {
    auto c = classify(imgs[i], rep.elements[i].code.radius());
    if (!c) {
      q.representatives.push_back(i);
      c = q.representatives.size() - 1;
    }
    q.class_of.push_back(*c);
  }
  std::size_t n = q.representatives.size();
  int d = sub.size();
  q.identity = n;
  for (std::size_t c = 0; c < n; ++c)
    if (detail::shift_equal(imgs[q.representatives[c]], detail::anchored(SlidingBlockCode::identity(d), z),
                            rep.elements[q.representatives[c]].code.radius()))
      q.identity = c;
  if (q.identity == n) throw InconsistencyError("shift_quotient: identity not among the found automorphisms");

  q.table.assign(n, std::vector<std::size_t>(n, 0));
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      const auto& ca = rep.elements[q.representatives[a]].code;
      const auto& cb = rep.elements[q.representatives[b]].code;
      WordSet dom = admissible_blocks(sub, static_cast<std::size_t>(2 * (ca.radius() + cb.radius()) + 1));
      SlidingBlockCode ab = compose_codes(ca, cb, &dom);
      auto c = classify(detail::anchored(ab, z), ab.radius());
      if (!c) throw InconsistencyError("shift_quotient: not closed under composition within the search radius");
      q.table[a][b] = *c;
    }

  // group axioms
  for (std::size_t a = 0; a < n; ++a) {
    if (q.table[q.identity][a] != a || q.table[a][q.identity] != a)
      throw InconsistencyError("shift_quotient: identity law fails");
    bool has_inverse = false;
    for (std::size_t b = 0; b < n; ++b) has_inverse = has_inverse || q.table[a][b] == q.identity;
    if (!has_inverse) throw InconsistencyError("shift_quotient: missing inverse");
    for (std::size_t b = 0; b < n; ++b) {
      if (q.table[a][b] != q.table[b][a]) q.abelian = false;
      for (std::size_t c = 0; c < n; ++c)
        if (q.table[q.table[a][b]][c] != q.table[a][q.table[b][c]])
          throw InconsistencyError("shift_quotient: composition is not associative");
    }
  }
  for (std::size_t a = 0; a < n; ++a) {
    std::size_t o = 1;
    for (std::size_t x = a; x != q.identity; x = q.table[x][a]) ++o;
    q.orders.push_back(o);
  }
  q.type = detail::name_group(q);
  return q;
}

using FrequencyTable = std::map<Word, double>;

/// Empirical n-block frequencies of a finite word.
inline FrequencyTable block_frequencies(const Word& w, std::size_t n) {
  FrequencyTable t;
  if (w.size() < n) throw ValidationError("block_frequencies: word shorter than the block length");
  std::size_t total = w.size() - n + 1;
  for (std::size_t i = 0; i < total; ++i) t[subword(w, i, n)] += 1.0;
  for (auto& [k, v] : t) v /= static_cast<double>(total);
  return t;
}

inline double total_variation(const FrequencyTable& a, const FrequencyTable& b) {
  double s = 0;
  for (const auto& [k, v] : a) {
    auto it = b.find(k);
    s += std::fabs(v - (it == b.end() ? 0.0 : it->second));
  }
  for (const auto& [k, v] : b)
    if (!a.count(k)) s += v;
  return s / 2;
}

struct MeasureAction {
  std::vector<std::size_t> permutation;
  std::vector<double> margins;  // second-best minus best distance, per table
};

/// Matches each pushed-forward table with its nearest table in total variation.
inline MeasureAction action_on_measures(const SlidingBlockCode& code, const std::vector<FrequencyTable>& tables,
                                        double threshold = 0.1) {
  if (tables.empty()) throw ValidationError("action_on_measures: no tables");
  std::size_t n = tables.front().begin()->first.size();
  std::size_t r = static_cast<std::size_t>(code.radius());
  if (n < 2 * r + 1) throw ValidationError("action_on_measures: blocks shorter than the code window");
  std::size_t m = n - 2 * r;
  std::vector<FrequencyTable> marg;
  for (const auto& t : tables) {
    FrequencyTable mt;
    for (const auto& [w, v] : t) {
      if (w.size() != n) throw ValidationError("action_on_measures: tables use different block lengths");
      mt[subword(w, r, m)] += v;
    }
    marg.push_back(std::move(mt));
  }
  MeasureAction act;
  for (const auto& t : tables) {
    FrequencyTable pushed;
    for (const auto& [w, v] : t) pushed[apply_code(code, w)] += v;
    std::vector<double> dist;
    for (const auto& mt : marg) dist.push_back(total_variation(pushed, mt));
    std::size_t best = static_cast<std::size_t>(std::min_element(dist.begin(), dist.end()) - dist.begin());
    double second = 1.0;
    for (std::size_t j = 0; j < dist.size(); ++j)
      if (j != best) second = std::min(second, dist[j]);
    double margin = dist.size() == 1 ? 1.0 : second - dist[best];
    if (margin <= threshold)
      throw InconsistencyError("action_on_measures: ambiguous match (margin " + std::to_string(margin) + ")");
    act.permutation.push_back(best);
    act.margins.push_back(margin);
  }
  return act;
}

}  // namespace flowmcg
