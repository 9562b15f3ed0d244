#pragma once

// Exact property checks shared by the Catch2 suite and the acceptance runner. Each check returns
// a verdict with a short description of the first failure (empty when it passed).

#include "oracles.hpp"

#include <random>
#include <sstream>

namespace props {

using namespace flowmcg;

struct Verdict {
  bool ok = true;
  std::size_t checked = 0;
  std::string failure;
  void fail(const std::string& what) {
    if (ok) failure = what;
    ok = false;
  }
};

/// P(m+n) ≤ P(m)P(n), and P(n) ≥ n+1 for every computed n (no periodic window).
inline Verdict complexity_properties(std::size_t n_max = 24) {
  Verdict v;
  for (const auto& r : oracle::catalog()) {
    Substitution s = r.sub();
    std::vector<std::size_t> p(n_max + 1, 1);
    for (std::size_t n = 1; n <= n_max; ++n) p[n] = complexity(s, n);
    for (std::size_t n = 1; n <= n_max; ++n) {
      ++v.checked;
      if (p[n] < n + 1) v.fail(r.name + ": P(" + std::to_string(n) + ") <= n");
      for (std::size_t m = 1; m + n <= n_max; ++m)
        if (p[m + n] > p[m] * p[n]) v.fail(r.name + ": subadditivity fails at " + std::to_string(m) + "+" + std::to_string(n));
    }
    if (is_aperiodic(s, n_max).periodic) v.fail(r.name + ": flagged periodic");
  }
  return v;
}

inline Substitution random_substitution(std::mt19937& rng, int d) {
  std::vector<std::string> labels, images;
  for (int a = 0; a < d; ++a) labels.push_back(std::string(1, static_cast<char>('a' + a)));
  std::uniform_int_distribution<int> len(1, 4), letter(0, d - 1);
  for (int a = 0; a < d; ++a) {
    std::string img;
    for (int k = len(rng); k > 0; --k) img += static_cast<char>('a' + letter(rng));
    images.push_back(img);
  }
  return Substitution::from_strings(labels, images);
}

/// M_{ξ∘ζ} = M_ζ M_ξ on random pairs over alphabets of size 2..4.
inline Verdict incidence_composition(int pairs = 60) {
  Verdict v;
  std::mt19937 rng(20240611);
  for (int t = 0; t < pairs; ++t) {
    int d = 2 + t % 3;
    Substitution xi = random_substitution(rng, d), zeta = random_substitution(rng, d);
    ++v.checked;
    if (incidence_matrix(xi.compose(zeta)) != incidence_matrix(zeta) * incidence_matrix(xi))
      v.fail("pair " + std::to_string(t) + ": " + xi.render() + " after " + zeta.render());
  }
  return v;
}

/// rank N^k is constant for k ≥ d' (the eventual kernel is reached within d' steps), on random
/// integer matrices and on the transition matrices of the catalog's coinvariant groups.
inline Verdict kernel_stabilization(int matrices = 60) {
  Verdict v;
  std::mt19937 rng(7);
  std::vector<IntMatrix> ms;
  for (int t = 0; t < matrices; ++t) {
    std::size_t d = 2 + static_cast<std::size_t>(t % 5);
    std::uniform_int_distribution<int> entry(0, t % 2 ? 1 : 3);
    IntMatrix m(d, IntVector(d, 0));
    for (auto& row : m)
      for (auto& x : row) x = entry(rng);
    ms.push_back(m);
  }
  for (const auto& r : oracle::catalog()) ms.push_back(DirectLimitGroup(r.sub()).transition());
  for (const auto& m : ms) {
    std::size_t d = m.size();
    std::size_t base = rank(matrix_power(m, static_cast<unsigned>(d)));
    ++v.checked;
    for (std::size_t k = d + 1; k <= 2 * d; ++k)
      if (rank(matrix_power(m, static_cast<unsigned>(k))) != base) v.fail("rank of N^k moves after k = d'");
  }
  return v;
}

/// τ(m, v) = τ(m+j, N^j v), and adding an eventual-kernel vector does not change the trace.
inline Verdict trace_well_defined(int elements = 100) {
  Verdict v;
  std::mt19937 rng(99);
  std::vector<std::unique_ptr<DirectLimitGroup>> groups;
  for (const auto& r : oracle::catalog()) groups.push_back(std::make_unique<DirectLimitGroup>(r.sub()));
  std::uniform_int_distribution<int> coeff(-9, 9), level(0, 3), lift(1, 3);
  for (int t = 0; t < elements; ++t) {
    const DirectLimitGroup& g = *groups[static_cast<std::size_t>(t) % groups.size()];
    GroupElement e{level(rng), IntVector(g.dimension(), 0)};
    for (auto& x : e.vector) x = coeff(rng);
    FieldElement tau = g.trace_value(e);
    ++v.checked;
    if (g.trace_value(g.level_up(e, e.level + lift(rng))) != tau) v.fail("trace changes under the level relation");
    for (const auto& k : g.kernel_basis()) {
      GroupElement shifted = g.add(e, GroupElement{e.level, k});
      if (g.trace_value(shifted) != tau) v.fail("trace changes by an eventual-kernel vector");
      if (!g.element_equal(shifted, e)) v.fail("kernel vector not identified with zero");
    }
  }
  return v;
}

/// res(res^{-1} f) = f for functions on return words of several cross sections.
inline Verdict restriction_roundtrip() {
  Verdict v;
  std::mt19937 rng(5);
  std::uniform_int_distribution<int> coeff(-5, 5);
  const std::vector<std::pair<std::size_t, std::string>> sections{{0, "0"}, {0, "01"}, {1, "2"}, {1, "11"}, {2, "1"}, {3, "b"}};
  auto cat = oracle::catalog();
  for (const auto& [idx, cyl] : sections) {
    Substitution s = cat[idx].sub();
    ReturnSystem sys = induce(s, CylinderSet::single(s.alphabet().parse(cyl)));
    DirectLimitGroup g(s);
    for (int trial = 0; trial < 4; ++trial) {
      InducedFunction f;
      for (std::size_t i = 0; i < sys.size(); ++i) f.weights[Word{static_cast<Symbol>(i)}] = coeff(rng);
      std::map<Word, Integer> on_x;  // res^{-1} f as a function on X
      for (const auto& [block, c] : f.weights)
        for (const auto& u : sys.block_windows(block)) on_x[u] += c;
      InducedFunction back = restrict_class(sys, on_x);
      ++v.checked;
      for (const auto& [block, c] : back.weights)
        if (c != f.weights.at(Word{block[0]})) v.fail(cat[idx].name + " [" + cyl + "]: res of res^{-1} differs");
      // the class of the extension has trace Σ f(w) μ(E_w)
      FieldElement expect = g.pf().zero();
      MeasureOracle mo(s);
      for (const auto& [block, c] : f.weights) expect += Rational(c) * sys.event_measure(mo, block[0]);
      if (g.trace_value(extend_by_zero(g, sys, f)) != expect) v.fail(cat[idx].name + " [" + cyl + "]: trace of the extension");
    }
  }
  return v;
}

}  // namespace props
