#pragma once

// Action of flow codes on the coinvariants group: f* = res_C^{-1} ∘ φ^* ∘ res_D, computed on
// cylinder-function representatives.

#include "flowmcg/coinvariants.hpp"
#include "flowmcg/errors.hpp"
#include "flowmcg/flow.hpp"

#include <map>
#include <optional>
#include <vector>

namespace flowmcg {

using CylinderFunction = std::map<Word, Integer>;  // Σ c_w 1_[w], windows anchored at 0

/// Merges windows whose coefficient does not depend on the last (or first) symbol, over the
/// admissible extensions. Right trimming preserves the function; left trimming preserves its
/// class (shift invariance).
inline CylinderFunction simplify_function(CylinderFunction f, const Substitution& sub) {
  for (auto it = f.begin(); it != f.end();) it = it->second == 0 ? f.erase(it) : std::next(it);
  for (bool changed = true; changed;) {
    changed = false;
    std::size_t n = 0;
    for (const auto& [w, c] : f) n = std::max(n, w.size());
    if (n == 0) break;
    // all windows must have the same length to trim
    bool uniform = true;
    for (const auto& [w, c] : f) uniform = uniform && w.size() == n;
    if (!uniform) {
      // pad short windows to length n
      CylinderFunction padded;
      WordSet blocks = admissible_blocks(sub, n);
      for (const auto& [w, c] : f) {
        if (w.size() == n) {
          padded[w] += c;
          continue;
        }
        for (const auto& b : blocks)
          if (std::equal(w.begin(), w.end(), b.begin())) padded[b] += c;
      }
      f = std::move(padded);
      changed = true;
      continue;
    }
    WordSet blocks = admissible_blocks(sub, n);
    for (int side = 0; side < 2 && !changed; ++side) {
      std::map<Word, std::optional<Integer>> merged;
      bool ok = true;
      for (const auto& b : blocks) {
        Word key = side == 0 ? subword(b, 0, n - 1) : subword(b, 1, n - 1);
        auto it = f.find(b);
        Integer c = it == f.end() ? Integer(0) : it->second;
        auto [m, fresh] = merged.emplace(key, c);
        if (!fresh && *m->second != c) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      CylinderFunction g;
      for (const auto& [k, c] : merged)
        if (*c != 0) g[k] = *c;
      f = std::move(g);
      changed = true;
    }
  }
  return f;
}

/// A cylinder-function representative of f*[γ].
inline CylinderFunction pullback(const FlowCode& fc, const CylinderFunction& gamma) {
  InducedFunction on_d = restrict_class(fc.target, gamma);
  std::size_t k = on_d.block_length;
  std::size_t len = k + 2 * static_cast<std::size_t>(fc.code.radius());
  CylinderFunction out;
  for (const auto& b : fc.source.recoded_blocks(len)) {
    Word img = apply_code(fc.code, b);
    auto it = on_d.weights.find(img);
    if (it == on_d.weights.end()) throw InconsistencyError("pullback: image block outside the target language");
    if (it->second == 0) continue;
    for (const auto& u : fc.source.block_windows(b)) out[u] += it->second;
  }
  return simplify_function(std::move(out), fc.source.substitution());
}

struct InducedAction {
  std::size_t level = 0;                  // common level of the images of the tower basis
  IntMatrix tower_matrix;                 // column i: f*(0, e_i) at `level`
  std::optional<IntMatrix> letter_matrix; // column b: f*[1_b] in letter classes, when integral
  bool fixes_order_unit = false;
  FieldElement unit_trace;                // trace of f*[1]
};

/// Class of every letter cylinder; used as the letter generating set.
inline std::vector<CylinderFunction> letter_functions(const Substitution& sub) {
  std::vector<CylinderFunction> out;
  for (Symbol b = 0; b < sub.size(); ++b) out.push_back(CylinderFunction{{Word{b}, 1}});
  return out;
}

inline std::vector<CylinderFunction> tower_functions(const DirectLimitGroup& g) {
  std::vector<CylinderFunction> out;
  Word ctx = g.context(0);
  for (const auto& r : g.presentation().towers) {
    Word w = r;
    w.insert(w.end(), ctx.begin(), ctx.end());
    out.push_back(CylinderFunction{{w, 1}});
  }
  return out;
}

namespace detail {

/// Integer coordinates of `target` in the span of `gens` (all leveled together), if any
/// rational solution is integral.
inline std::optional<IntVector> solve_in_group(const DirectLimitGroup& g, const std::vector<GroupElement>& gens,
                                               const GroupElement& target) {
  int m = target.level;
  for (const auto& x : gens) m = std::max(m, x.level);
  std::size_t d = g.dimension();
  IntMatrix np = matrix_power(g.transition(), static_cast<unsigned>(d));
  RatMatrix a(d, RatVector(gens.size(), 0));
  for (std::size_t j = 0; j < gens.size(); ++j) {
    IntVector v = np * g.level_up(gens[j], m).vector;
    for (std::size_t i = 0; i < d; ++i) a[i][j] = Rational(v[i]);
  }
  IntVector tv = np * g.level_up(target, m).vector;
  RatVector b;
  for (const auto& x : tv) b.push_back(Rational(x));
  auto sol = rational_solve(a, b);
  if (!sol) return std::nullopt;
  IntVector out;
  for (const auto& q : *sol) {
    if (denominator(q) != 1) return std::nullopt;
    out.push_back(numerator(q));
  }
  return out;
}

}  // namespace detail

inline InducedAction induced_action(const FlowCode& fc, const DirectLimitGroup& g) {
  InducedAction act;
  std::vector<GroupElement> images;
  for (const auto& f : tower_functions(g)) images.push_back(g.class_of_function(pullback(fc, f)));
  int m = 0;
  for (const auto& x : images) m = std::max(m, x.level);
  act.level = static_cast<std::size_t>(m);
  std::size_t d = g.dimension();
  act.tower_matrix.assign(d, IntVector(d, 0));
  for (std::size_t j = 0; j < d; ++j) {
    IntVector v = g.level_up(images[j], m).vector;
    for (std::size_t i = 0; i < d; ++i) act.tower_matrix[i][j] = v[i];
  }

  // letter classes: read directly when the pulled-back function is a letter function
  const Substitution& sub = g.substitution();
  std::size_t nl = static_cast<std::size_t>(sub.size());
  IntMatrix lm(nl, IntVector(nl, 0));
  bool direct = true;
  std::vector<CylinderFunction> pulled;
  for (const auto& f : letter_functions(sub)) pulled.push_back(pullback(fc, f));
  for (std::size_t b = 0; b < nl && direct; ++b)
    for (const auto& [w, c] : pulled[b]) {
      if (w.size() != 1) {
        direct = false;
        break;
      }
      lm[static_cast<std::size_t>(w[0])][b] = c;
    }
  if (direct) {
    act.letter_matrix = lm;
  } else {
    std::vector<GroupElement> gens;
    for (const auto& f : letter_functions(sub)) gens.push_back(g.class_of_function(f));
    IntMatrix sol(nl, IntVector(nl, 0));
    bool ok = true;
    for (std::size_t b = 0; b < nl && ok; ++b) {
      auto x = detail::solve_in_group(g, gens, g.class_of_function(pulled[b]));
      if (!x) {
        ok = false;
        break;
      }
      for (std::size_t i = 0; i < nl; ++i) sol[i][b] = (*x)[i];
    }
    if (ok) act.letter_matrix = sol;
  }

  GroupElement unit_image = g.class_of_function(pullback(fc, CylinderFunction{{Word{}, 1}}));
  act.fixes_order_unit = g.element_equal(unit_image, g.order_unit());
  act.unit_trace = g.trace_value(unit_image);
  return act;
}

}  // namespace flowmcg
