#pragma once

// Forward-asymptotic classes of a substitution subshift: periodic right rays ρ_a grouped by
// shift-asymptotic tails, kept when some shifted prefix has two admissible left extensions.

#include "flowmcg/errors.hpp"
#include "flowmcg/substitution.hpp"
#include "flowmcg/symbolic.hpp"

#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <algorithm>
#include <string>
#include <vector>

namespace flowmcg {

namespace detail {

inline int eventual_cycle_lcm(const std::vector<Symbol>& f) {
  int d = static_cast<int>(f.size());
  int result = 1;
  for (Symbol a = 0; a < d; ++a) {
    // a is on a cycle iff f^k(a) = a for some k ≤ d
    Symbol b = a;
    for (int k = 1; k <= d; ++k) {
      b = f[static_cast<std::size_t>(b)];
      if (b == a) {
        result = std::lcm(result, k);
        break;
      }
    }
  }
  return result;
}

}  // namespace detail

/// Least k for which the first- and last-letter maps of ξ^k are the identity on their cycles.
inline int stabilize_power(const Substitution& sub) {
  std::vector<Symbol> first, last;
  for (Symbol a = 0; a < sub.size(); ++a) {
    first.push_back(sub.image(a).front());
    last.push_back(sub.image(a).back());
  }
  return std::lcm(detail::eventual_cycle_lcm(first), detail::eventual_cycle_lcm(last));
}

/// A one-sided fixed point of ξ^power: seed letter, direction and a finite expansion.
struct OneSidedFixedPoint {
  bool right = true;  // right: ρ_a = a...; left: λ_b = ...b
  Symbol seed = 0;
  int power = 1;
  Word expansion;     // for left points the last symbol is the seed
};

inline OneSidedFixedPoint expand_fixed_point(const Substitution& sub, int power, Symbol seed, bool right, std::size_t length) {
  Substitution p = sub.power(power);
  if (right ? p.image(seed).front() != seed : p.image(seed).back() != seed)
    throw ValidationError("expand_fixed_point: seed is not fixed by the power");
  Word w{seed};
  for (int it = 0; w.size() < length; ++it) {
    if (it > 256) throw ResourceError("fixed point does not grow");
    w = p.apply(w);
  }
  OneSidedFixedPoint f{right, seed, power, {}};
  if (right)
    f.expansion.assign(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(length));
  else
    f.expansion.assign(w.end() - static_cast<std::ptrdiff_t>(length), w.end());
  return f;
}

struct Leaf {
  Symbol left = 0;        // the letter at position -1
  std::size_t ray = 0;    // index into AsymptoticClassSet::rays; the point continues with it from 0
  Word tag;               // shortest ray prefix that tells the rays apart, used for labels
  std::string label(const Alphabet& alpha) const { return alpha.label(left) + "." + alpha.render(tag); }
};

struct AsymptoticClassSet {
  int power = 1;                                  // stabilizing power of the first/last-letter maps
  std::size_t tail_check = 2048;
  std::size_t branch_length = 128;                // length of left-special factors
  std::vector<Word> rays;                         // left-special right rays, tail_check long
  std::vector<Leaf> leaves;
  std::vector<std::vector<std::size_t>> classes;      // leaf indices; each class has ≥ 2 leaves
  std::vector<std::vector<std::size_t>> class_rays;   // ray indices of each class
  std::string certificate() const { return "verified to length " + std::to_string(tail_check); }
};

namespace detail {

/// Shift s with x[i] = y[i + s] for all compared i in the upper half, if any (|s| ≤ bound).
inline std::optional<long> tail_shift(const Word& x, std::size_t x_from, const Word& y, long bound) {
  for (long s = 0; s <= bound; ++s) {
    for (long sg : {s, -s}) {
      if (s == 0 && sg < 0) continue;
      bool ok = true;
      std::size_t count = 0;
      for (std::size_t i = x_from; i < x.size() && ok; ++i) {
        long j = static_cast<long>(i) + sg;
        if (j < 0 || j >= static_cast<long>(y.size())) continue;
        ok = x[i] == y[static_cast<std::size_t>(j)];
        ++count;
      }
      if (ok && count >= (x.size() - x_from) / 2) return sg;
    }
  }
  return std::nullopt;
}

struct UnionFind {
  std::vector<std::size_t> p;
  explicit UnionFind(std::size_t n) : p(n) { std::iota(p.begin(), p.end(), 0); }
  std::size_t find(std::size_t x) { return p[x] == x ? x : p[x] = find(p[x]); }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) p[std::max(a, b)] = std::min(a, b);
  }
};

/// All admissible words of length n, read off ξ^m(cd) for admissible 2-blocks cd with images
/// at least n long (every admissible word that short sits inside one of them).
inline std::set<Word> factors_of_length(const Substitution& sub, std::size_t n) {
  Substitution p = sub;
  for (int m = 1; p.min_image_length() < n; ++m) {
    if (m > 64) throw ResourceError("factors_of_length: images do not grow");
    p = p.compose(sub);
  }
  std::set<Word> out;
  for (const auto& cd : admissible_blocks(sub, 2)) {
    Word t = p.apply(cd);
    for (std::size_t i = 0; i + n <= t.size(); ++i)
      out.emplace(t.begin() + static_cast<std::ptrdiff_t>(i), t.begin() + static_cast<std::ptrdiff_t>(i + n));
  }
  return out;
}

inline Word common_suffix(const Substitution& sub, const std::vector<Symbol>& letters) {
  Word s = sub.image(letters.front());
  for (Symbol c : letters) {
    const Word& w = sub.image(c);
    std::size_t k = 0;
    while (k < s.size() && k < w.size() && s[s.size() - 1 - k] == w[w.size() - 1 - k]) ++k;
    s.erase(s.begin(), s.end() - static_cast<std::ptrdiff_t>(k));
  }
  return s;
}

/// Φ(w) = s·ξ(w), s the common suffix of the images of the left extensions of w.
inline Word branch_image(const Substitution& sub, const std::vector<Symbol>& ext, const Word& w) {
  Word out = common_suffix(sub, ext);
  Word img = sub.apply(w);
  out.insert(out.end(), img.begin(), img.end());
  return out;
}

}  // namespace detail

/// Asymptotic classes from left-special rays. A left-special factor w of length M has two or
/// more admissible left extensions; Φ sends it to the prefix of s·ξ(w), again left-special.
/// Rays of the periodic Φ-cycles are expanded to tail_check symbols and grouped into classes
/// by shift-asymptotic tails; each left extension of a ray is a leaf.
inline AsymptoticClassSet asymptotic_classes(const Substitution& sub, std::size_t tail_check_length = 2048) {
  require_primitive(sub);
  AsymptoticClassSet out;
  out.power = stabilize_power(sub);
  out.tail_check = tail_check_length;
  const std::size_t M = out.branch_length;
  if (tail_check_length < 4 * M) throw ValidationError("asymptotic_classes: tail check length too short");

  std::map<Word, std::vector<Symbol>> ext;  // left-special factors and their extension letters
  for (const auto& f : detail::factors_of_length(sub, M + 1)) ext[Word(f.begin() + 1, f.end())].push_back(f.front());
  std::vector<Word> ls;
  for (auto& [w, e] : ext) {
    std::sort(e.begin(), e.end());
    e.erase(std::unique(e.begin(), e.end()), e.end());
    if (e.size() >= 2) ls.push_back(w);
  }
  if (ls.empty()) throw InconsistencyError("no asymptotic pair found; is the substitution aperiodic?");

  // Φ on the finite set of left-special factors; -1 marks a prefix that fell outside it
  std::map<Word, std::size_t> index;
  for (std::size_t i = 0; i < ls.size(); ++i) index[ls[i]] = i;
  std::vector<long> phi(ls.size(), -1);
  for (std::size_t i = 0; i < ls.size(); ++i) {
    Word img = detail::branch_image(sub, ext[ls[i]], ls[i]);
    img.resize(M);
    auto it = index.find(img);
    if (it != index.end()) phi[i] = static_cast<long>(it->second);
  }
  std::vector<bool> periodic(ls.size(), false);
  for (std::size_t i = 0; i < ls.size(); ++i) {
    long x = static_cast<long>(i);
    for (std::size_t k = 0; k < ls.size() && x >= 0; ++k) {
      x = phi[static_cast<std::size_t>(x)];
      if (x == static_cast<long>(i)) {
        periodic[i] = true;
        break;
      }
    }
  }

  std::vector<std::vector<Symbol>> ray_ext;
  for (std::size_t i = 0; i < ls.size(); ++i) {
    if (!periodic[i]) continue;
    Word w = ls[i];
    std::size_t cur = i;
    for (int guard = 0; w.size() < tail_check_length; ++guard) {
      if (guard > 4096) throw ResourceError("left-special ray does not grow");
      w = detail::branch_image(sub, ext[ls[cur]], w);
      cur = static_cast<std::size_t>(phi[cur]);
      if (cur == i && w.size() >= tail_check_length) break;
    }
    while (cur != i) {  // finish the cycle so that the prefix is ls[i] again
      w = detail::branch_image(sub, ext[ls[cur]], w);
      cur = static_cast<std::size_t>(phi[cur]);
    }
    if (!std::equal(ls[i].begin(), ls[i].end(), w.begin()))
      throw InconsistencyError("left-special ray expansion lost its prefix");
    w.resize(tail_check_length);
    out.rays.push_back(std::move(w));
    ray_ext.push_back(ext[ls[i]]);
  }

  long bound = static_cast<long>(tail_check_length / 8);
  detail::UnionFind uf(out.rays.size());
  for (std::size_t i = 0; i < out.rays.size(); ++i)
    for (std::size_t j = i + 1; j < out.rays.size(); ++j)
      if (detail::tail_shift(out.rays[i], tail_check_length / 2, out.rays[j], bound)) uf.unite(i, j);

  std::size_t tag_len = 1;
  while (true) {
    std::set<Word> tags;
    for (const auto& r : out.rays) tags.emplace(r.begin(), r.begin() + static_cast<std::ptrdiff_t>(tag_len));
    if (tags.size() == out.rays.size() || tag_len >= M) break;
    ++tag_len;
  }
  std::map<std::size_t, std::size_t> class_of_root;
  for (std::size_t r = 0; r < out.rays.size(); ++r) {
    std::size_t root = uf.find(r);
    if (!class_of_root.count(root)) {
      class_of_root[root] = out.classes.size();
      out.classes.emplace_back();
      out.class_rays.emplace_back();
    }
    std::size_t c = class_of_root[root];
    out.class_rays[c].push_back(r);
    for (Symbol e : ray_ext[r]) {
      out.classes[c].push_back(out.leaves.size());
      out.leaves.push_back(Leaf{e, r, Word(out.rays[r].begin(), out.rays[r].begin() + static_cast<std::ptrdiff_t>(tag_len))});
    }
  }
  return out;
}

/// Class whose rays are shift-asymptotic to the tail of w from position from.
inline std::size_t identify_class(const AsymptoticClassSet& cs, const Word& w, std::size_t from) {
  std::optional<std::size_t> found;
  long bound = static_cast<long>(cs.tail_check / 8);
  Word tail(w.begin() + static_cast<std::ptrdiff_t>(from), w.end());
  for (std::size_t c = 0; c < cs.classes.size(); ++c) {
    for (std::size_t r : cs.class_rays[c]) {
      if (detail::tail_shift(tail, tail.size() / 2, cs.rays[r], bound)) {
        if (found && *found != c) throw InconsistencyError("asymptotic class identification is ambiguous");
        found = c;
        break;
      }
    }
  }
  if (!found) throw ResourceError("asymptotic class re-identification failed within the tail budget");
  return *found;
}

namespace detail {
inline void require_bijection(const std::vector<std::size_t>& perm) {
  std::vector<bool> hit(perm.size(), false);
  for (auto x : perm) hit[x] = true;
  for (bool h : hit)
    if (!h) throw InconsistencyError("class action is not a bijection");
}
}  // namespace detail

/// Permutation induced by a power ξ^j on the classes (perm[c] = image class).
inline std::vector<std::size_t> action_of_substitution(const Substitution& sub, int j, const AsymptoticClassSet& cs) {
  Substitution z = sub.power(j);
  std::vector<std::size_t> perm(cs.classes.size());
  for (std::size_t c = 0; c < cs.classes.size(); ++c) {
    const Word& w = cs.rays[cs.class_rays[c].front()];
    // a prefix whose image is about tail_check long
    std::size_t n = std::max<std::size_t>(1, cs.tail_check / std::max<std::size_t>(1, z.min_image_length()));
    Word img = z.apply(Word(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(std::min(n, w.size()))));
    if (img.size() > cs.tail_check) img.resize(cs.tail_check);
    perm[c] = identify_class(cs, img, 0);
  }
  detail::require_bijection(perm);
  return perm;
}

/// Permutation induced by a sliding block code on letters; only right tails matter.
inline std::vector<std::size_t> action_of_code(const SlidingBlockCode& code, const AsymptoticClassSet& cs) {
  std::vector<std::size_t> perm(cs.classes.size());
  for (std::size_t c = 0; c < cs.classes.size(); ++c) perm[c] = identify_class(cs, apply_code(code, cs.rays[cs.class_rays[c].front()]), 0);
  detail::require_bijection(perm);
  return perm;
}

inline bool is_identity_permutation(const std::vector<std::size_t>& p) {
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p[i] != i) return false;
  return true;
}

inline std::string to_dot(const AsymptoticClassSet& cs, const Alphabet& alpha) {
  std::string out = "graph asymptotic_classes {\n";
  for (std::size_t c = 0; c < cs.classes.size(); ++c) {
    out += "  subgraph cluster_" + std::to_string(c) + " {\n    label=\"class " + std::to_string(c) + "\";\n";
    for (std::size_t k : cs.classes[c]) out += "    \"" + cs.leaves[k].label(alpha) + "\";\n";
    for (std::size_t i = 1; i < cs.classes[c].size(); ++i)
      out += "    \"" + cs.leaves[cs.classes[c][0]].label(alpha) + "\" -- \"" + cs.leaves[cs.classes[c][i]].label(alpha) + "\";\n";
    out += "  }\n";
  }
  out += "}\n";
  return out;
}

}  // namespace flowmcg
