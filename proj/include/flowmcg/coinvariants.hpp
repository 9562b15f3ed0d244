#pragma once

// The coinvariants group G_T = C(X,Z)/(1 − T)C(X,Z) of a substitution subshift, presented as
// a stationary direct limit over towers of return words.

#include "flowmcg/errors.hpp"
#include "flowmcg/linalg.hpp"
#include "flowmcg/returns.hpp"
#include "flowmcg/substitution.hpp"
#include "flowmcg/symbolic.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace flowmcg {

/// Proper in the two-sided sense: all images share their first letter and their last letter.
inline bool is_proper(const Substitution& sub) {
  for (Symbol a = 0; a < sub.size(); ++a)
    if (sub.image(a).front() != sub.image(0).front() || sub.image(a).back() != sub.image(0).back()) return false;
  return true;
}

/// Return words to the letter a, i.e. words r = a·v with v free of a and r·a admissible.
inline std::vector<Word> letter_return_words(const Substitution& sub, Symbol a) {
  std::vector<Word> out;
  for (std::size_t n = 2;; ++n) {
    if (n > 4096) throw ResourceError("return words to a letter: gap bound exceeded");
    bool open = false;  // an admissible n-block starts with a and avoids a afterwards
    for (const auto& w : admissible_blocks(sub, n)) {
      if (w[0] != a) continue;
      bool inner = std::find(w.begin() + 1, w.end() - 1, a) != w.end() - 1;
      if (inner) continue;
      if (w.back() == a)
        out.push_back(subword(w, 0, n - 1));
      else
        open = true;
    }
    if (!open) break;
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// The tower data used to present G_T.
///
/// A base substitution β (a power of ξ) and level-0 tower words r_0..r_{d'-1} such that every
/// point of X is a concatenation of the words β^m(r_i) at each level m, each followed by the
/// common prefix of all β^m(r_j). τ records how β(r_i) splits into level-0 tower words.
struct DerivedPresentation {
  Substitution base_sub;          // β = ξ^p
  int power = 1;                  // p
  std::optional<Symbol> base_letter;  // the letter a when towers are return words to a
  std::vector<Word> towers;       // r_i as X-words
  Substitution tau;               // on tower indices
  bool identity_recoding = false; // input already proper: towers are the letters
};

namespace detail {

inline std::vector<Symbol> first_letter_cycle_letters(const Substitution& sub) {
  std::vector<Symbol> out;
  for (Symbol a = 0; a < sub.size(); ++a) {
    Symbol b = a;
    for (int k = 0; k < sub.size(); ++k) {
      b = sub.image(b).front();
      if (b == a) {
        out.push_back(a);
        break;
      }
    }
  }
  return out;
}

inline int first_letter_cycle_length(const Substitution& sub, Symbol a) {
  Symbol b = a;
  for (int k = 1; k <= sub.size(); ++k) {
    b = sub.image(b).front();
    if (b == a) return k;
  }
  return 0;
}

/// Split w at every occurrence of a (w starts with a).
inline std::vector<Word> split_at(const Word& w, Symbol a) {
  std::vector<Word> pieces;
  for (Symbol s : w) {
    if (s == a || pieces.empty()) pieces.emplace_back();
    pieces.back().push_back(s);
  }
  return pieces;
}

inline std::vector<std::string> tower_labels(const Alphabet& alpha, const std::vector<Word>& towers) {
  std::vector<std::string> labels;
  for (const auto& t : towers) labels.push_back(alpha.single_char() ? alpha.render(t) : "[" + alpha.render(t) + "]");
  return labels;
}

}  // namespace detail

/// Derived presentation on return words to a base letter (the letter on a cycle of the
/// first-letter map with fewest return words, ties by alphabet order), or the input itself when
/// it is already proper.
inline DerivedPresentation derived_proper(const Substitution& sub, std::optional<Symbol> base = std::nullopt) {
  require_primitive(sub);
  DerivedPresentation dp;
  if (is_proper(sub) && !base) {
    dp.base_sub = sub;
    dp.power = 1;
    for (Symbol b = 0; b < sub.size(); ++b) dp.towers.push_back(Word{b});
    dp.tau = sub;
    dp.identity_recoding = true;
    return dp;
  }
  auto candidates = detail::first_letter_cycle_letters(sub);
  if (base) {
    if (std::find(candidates.begin(), candidates.end(), *base) == candidates.end())
      throw ValidationError("derived_proper: base letter is not on a cycle of the first-letter map");
    candidates = {*base};
  }
  std::optional<Symbol> best;
  std::vector<Word> best_words;
  for (Symbol a : candidates) {
    auto rw = letter_return_words(sub, a);
    if (!best || rw.size() < best_words.size()) {
      best = a;
      best_words = rw;
    }
  }
  Symbol a = *best;
  int c = detail::first_letter_cycle_length(sub, a);
  int p = c;
  for (;; p += c) {
    if (p > 64 * c) throw ResourceError("derived_proper: no power with two base letters in the image");
    Word img = sub.iterate(Word{a}, p);
    if (std::count(img.begin(), img.end(), a) >= 2) break;
  }
  dp.base_sub = sub.power(p);
  dp.power = p;
  dp.base_letter = a;
  dp.towers = best_words;
  std::map<Word, Symbol> index;
  for (std::size_t i = 0; i < best_words.size(); ++i) index[best_words[i]] = static_cast<Symbol>(i);
  std::vector<Word> images;
  for (const auto& r : best_words) {
    Word img;
    for (const auto& piece : detail::split_at(dp.base_sub.apply(r), a)) {
      auto it = index.find(piece);
      if (it == index.end()) throw InconsistencyError("derived_proper: image piece is not a return word");
      img.push_back(it->second);
    }
    images.push_back(img);
  }
  dp.tau = Substitution(Alphabet(detail::tower_labels(sub.alphabet(), best_words)), images);
  return dp;
}

/// (level m, integer vector v); represents λ-scaled tower data at level m.
struct GroupElement {
  int level = 0;
  IntVector vector;
};

/// τ(g) = value · λ^{-exponent}.
struct TraceValue {
  FieldElement value;
  int exponent = 0;
  FieldElement evaluate() const {
    if (exponent == 0) return value;
    return value * FieldElement::generator(value.field()).pow(-exponent);
  }
};

class DirectLimitGroup {
 public:
  explicit DirectLimitGroup(const Substitution& sub) : sub_(sub), oracle_(sub) {
    dp_ = derived_proper(sub);
    dim_ = dp_.towers.size();
    n_ = incidence_matrix(dp_.tau);  // N(i, j) = #j in τ(i); (m, v) ~ (m+1, N v)
    npow_ = matrix_power(n_, static_cast<unsigned>(dim_));
    kernel_ = hermite_normal_form(integer_kernel(npow_, dim_));
    const PFData& pf = oracle_.pf();
    // trace vector: μ of the level-0 tower bases
    Word ctx = context(0);
    for (const auto& r : dp_.towers) {
      Word w = r;
      w.insert(w.end(), ctx.begin(), ctx.end());
      t_.push_back(oracle_.measure(w));
    }
    lambda_p_ = pf.lambda_element().pow(dp_.power);
    if (!eigen_check(n_)) {
      if (!eigen_check(transpose(n_))) throw InconsistencyError("coinvariants: trace vector is not an eigenvector in either orientation");
      n_ = transpose(n_);
      npow_ = matrix_power(n_, static_cast<unsigned>(dim_));
      kernel_ = hermite_normal_form(integer_kernel(npow_, dim_));
      transposed_ = true;
    }
    if (evaluate(trace(order_unit())) != pf.one()) throw InconsistencyError("coinvariants: trace of the order unit is not 1");
  }

  const Substitution& substitution() const { return sub_; }
  const DerivedPresentation& presentation() const { return dp_; }
  const MeasureOracle& oracle() const { return oracle_; }
  const PFData& pf() const { return oracle_.pf(); }
  std::size_t dimension() const { return dim_; }
  const IntMatrix& transition() const { return n_; }
  bool transposed() const { return transposed_; }
  const IntMatrix& kernel_basis() const { return kernel_; }
  const FieldVector& trace_vector() const { return t_; }

  GroupElement zero() const { return {0, IntVector(dim_, 0)}; }
  GroupElement order_unit() const {
    IntVector v;
    for (const auto& r : dp_.towers) v.push_back(Integer(r.size()));
    return {0, v};
  }
  GroupElement basis_element(std::size_t i, int level = 0) const {
    IntVector v(dim_, 0);
    v.at(i) = 1;
    return {level, v};
  }

  GroupElement level_up(const GroupElement& g, int level) const {
    check(g);
    if (level < g.level) throw ValidationError("level_up: cannot lower the level");
    GroupElement r = g;
    for (; r.level < level; ++r.level) r.vector = n_ * r.vector;
    return r;
  }
  GroupElement add(const GroupElement& g, const GroupElement& h) const {
    int m = std::max(g.level, h.level);
    GroupElement a = level_up(g, m), b = level_up(h, m);
    for (std::size_t i = 0; i < dim_; ++i) a.vector[i] += b.vector[i];
    return a;
  }
  GroupElement scale(const GroupElement& g, const Integer& k) const {
    GroupElement r = g;
    for (auto& x : r.vector) x *= k;
    return r;
  }
  GroupElement sub(const GroupElement& g, const GroupElement& h) const { return add(g, scale(h, -1)); }

  /// Vector reduced modulo the eventual kernel (canonical coset representative at its level).
  GroupElement canonical(const GroupElement& g) const {
    check(g);
    return {g.level, reduce_mod_lattice(g.vector, kernel_)};
  }

  bool is_zero(const GroupElement& g) const {
    check(g);
    return is_zero_vector(npow_ * g.vector);
  }
  bool element_equal(const GroupElement& g, const GroupElement& h) const { return is_zero(sub(g, h)); }

  TraceValue trace(const GroupElement& g) const {
    check(g);
    FieldElement s = pf().zero();
    for (std::size_t i = 0; i < dim_; ++i)
      if (g.vector[i] != 0) s += Rational(g.vector[i]) * t_[i];
    return {s, dp_.power * g.level};
  }
  FieldElement evaluate(const TraceValue& t) const { return t.evaluate(); }
  FieldElement trace_value(const GroupElement& g) const { return evaluate(trace(g)); }

  /// Common prefix of all level-m tower words (the right context each tower is followed by).
  Word context(int m) const {
    std::vector<Word> words;
    for (const auto& r : dp_.towers) words.push_back(dp_.base_sub.iterate(r, m));
    Word ctx = words[0];
    for (const auto& w : words) {
      std::size_t k = 0;
      while (k < ctx.size() && k < w.size() && ctx[k] == w[k]) ++k;
      ctx.resize(k);
    }
    return ctx;
  }

  /// Class of the indicator of the cylinder [w] (any anchor; shift invariance).
  GroupElement class_of_cylinder(const Word& w) const {
    if (w.empty()) return order_unit();
    for (int m = 0; m < 64; ++m) {
      Word ctx = context(m);
      if (ctx.size() + 1 < w.size()) continue;
      IntVector v(dim_, 0);
      for (std::size_t i = 0; i < dim_; ++i) {
        Word t = dp_.base_sub.iterate(dp_.towers[i], m);
        std::size_t h = t.size();
        t.insert(t.end(), ctx.begin(), ctx.end());
        for (std::size_t j = 0; j < h && j + w.size() <= t.size(); ++j)
          if (std::equal(w.begin(), w.end(), t.begin() + static_cast<std::ptrdiff_t>(j))) v[i] += 1;
      }
      return {m, v};
    }
    throw ResourceError("class_of_cylinder: tower context does not grow");
  }

  /// Class of Σ_w c_w 1_[w].
  GroupElement class_of_function(const std::map<Word, Integer>& f) const {
    GroupElement g = zero();
    for (const auto& [w, c] : f)
      if (c != 0) g = add(g, scale(class_of_cylinder(w), c));
    return g;
  }

  std::size_t free_rank() const { return rank(npow_); }

  /// Smith invariants of N on the saturated eventual image (a presentation-dependent shape).
  std::vector<Integer> eventual_smith_shape() const {
    IntMatrix nt = transpose(npow_);
    auto left = rational_nullspace(to_rational(nt), dim_);  // rows y with y·N^{d'} = 0
    IntMatrix constraints(left.begin(), left.end());
    std::vector<IntVector> basis;
    if (constraints.empty()) {
      for (std::size_t i = 0; i < dim_; ++i) basis.push_back(basis_element(i).vector);
    } else {
      basis = integer_kernel(constraints, dim_);
    }
    std::size_t r = basis.size();
    // N b_j = Σ_i A(i, j) b_i
    RatMatrix bm(dim_, RatVector(r, 0));
    for (std::size_t j = 0; j < r; ++j)
      for (std::size_t i = 0; i < dim_; ++i) bm[i][j] = Rational(basis[j][i]);
    IntMatrix a(r, IntVector(r, 0));
    for (std::size_t j = 0; j < r; ++j) {
      IntVector img = n_ * basis[j];
      auto sol = rational_solve(bm, to_rational_vector(img));
      if (!sol) throw InconsistencyError("eventual image is not invariant");
      for (std::size_t i = 0; i < r; ++i) {
        if (denominator((*sol)[i]) != 1) throw InconsistencyError("eventual image basis is not saturated");
        a[i][j] = numerator((*sol)[i]);
      }
    }
    return smith_invariants(a);
  }

  /// dim_Q of the trace image (rank of Im τ).
  std::size_t trace_image_rank() const {
    RatMatrix coords;
    for (const auto& t : t_) coords.push_back(t.coordinates());
    RatMatrix m = coords;
    return rref(m).size();
  }
  std::size_t infinitesimal_rank() const { return free_rank() - trace_image_rank(); }

 private:
  static RatVector to_rational_vector(const IntVector& v) {
    RatVector r;
    for (const auto& x : v) r.push_back(Rational(x));
    return r;
  }
  bool eigen_check(const IntMatrix& n) const {
    for (std::size_t j = 0; j < dim_; ++j) {
      FieldElement s = pf().zero();
      for (std::size_t i = 0; i < dim_; ++i)
        if (n[i][j] != 0) s += Rational(n[i][j]) * t_[i];
      if (s != lambda_p_ * t_[j]) return false;
    }
    return true;
  }
  void check(const GroupElement& g) const {
    if (g.vector.size() != dim_) throw ValidationError("group element: dimension mismatch");
    if (g.level < 0) throw ValidationError("group element: negative level");
  }

  Substitution sub_;
  MeasureOracle oracle_;
  DerivedPresentation dp_;
  std::size_t dim_ = 0;
  IntMatrix n_, npow_, kernel_;
  FieldVector t_;
  FieldElement lambda_p_;
  bool transposed_ = false;
};

inline DirectLimitGroup build_coinvariants(const Substitution& sub) { return DirectLimitGroup(sub); }

struct CoinvariantsReport {
  std::size_t free_rank = 0;
  std::vector<Integer> torsion;            // always empty: a direct limit of free groups
  std::vector<Integer> eventual_shape;     // Smith invariants of the stabilized transition
  std::string trace_image;
  std::size_t trace_image_rank = 0;
  std::size_t infinitesimal_rank = 0;
};

inline CoinvariantsReport coinvariants_report(const DirectLimitGroup& g) {
  CoinvariantsReport r;
  r.free_rank = g.free_rank();
  r.eventual_shape = g.eventual_smith_shape();
  r.trace_image = TraceLattice(g.pf()).describe();
  r.trace_image_rank = g.trace_image_rank();
  r.infinitesimal_rank = g.infinitesimal_rank();
  return r;
}

inline TraceLattice trace_image(const Substitution& sub) { return TraceLattice(pf_data(sub)); }

inline std::size_t infinitesimal_rank(const Substitution& sub) { return DirectLimitGroup(sub).infinitesimal_rank(); }

/// A function on the induced system (C, T_C): integer weights on k-blocks of return words.
struct InducedFunction {
  std::size_t block_length = 1;
  std::map<Word, Integer> weights;  // keys are return-word index blocks
};

/// res_C γ: the weight of a return-word block B is γ summed over the positions of its first
/// return word; blocks are long enough to read every window of γ.
inline InducedFunction restrict_class(const ReturnSystem& sys, const std::map<Word, Integer>& gamma) {
  if (sys.size() == 0) throw ValidationError("restrict_class: empty cross section");
  std::size_t wmax = 1;
  for (const auto& [w, c] : gamma) wmax = std::max(wmax, w.size());
  std::size_t min_ret = sys.return_words().front().size();
  for (const auto& w : sys.return_words()) min_ret = std::min(min_ret, w.size());
  std::size_t k = 1;
  while ((k - 1) * min_ret + 1 < wmax) ++k;
  InducedFunction f;
  f.block_length = k;
  for (const auto& block : sys.recoded_blocks(k)) {
    Word x = sys.spell(block);
    std::size_t h = sys.return_words()[static_cast<std::size_t>(block[0])].size();
    Integer total = 0;
    for (const auto& [w, c] : gamma)
      for (std::size_t j = 0; j < h; ++j)
        if (j + w.size() <= x.size() && std::equal(w.begin(), w.end(), x.begin() + static_cast<std::ptrdiff_t>(j))) total += c;
    f.weights[block] = total;
  }
  return f;
}

/// res_C^{-1}: extension by zero of an induced function, as a class of G_T.
inline GroupElement extend_by_zero(const DirectLimitGroup& g, const ReturnSystem& sys, const InducedFunction& f) {
  std::map<Word, Integer> on_x;
  for (const auto& [block, c] : f.weights) {
    if (c == 0) continue;
    for (const auto& u : sys.block_windows(block)) on_x[u] += c;
  }
  return g.class_of_function(on_x);
}

}  // namespace flowmcg
