#pragma once

// Flow codes between return systems: validation, restriction, composition, measure scaling,
// cocycle slopes and the α^p = λ^q relation search.

#include "flowmcg/errors.hpp"
#include "flowmcg/returns.hpp"
#include "flowmcg/substitution.hpp"
#include "flowmcg/symbolic.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace flowmcg {

/// A word with per-position membership marks: 1 inside, 0 outside, -1 unknown.
struct MarkedWord {
  Word word;
  std::vector<signed char> mark;
};

/// Smallest symmetric radius R for which membership is a function of the window
/// [i-R, i+R]; returns the union of the windows marked inside, anchored at offset -R.
inline std::optional<CylinderSet> learn_cylinder_set(const std::vector<MarkedWord>& samples, int max_radius = 24) {
  for (int r = 0; r <= max_radius; ++r) {
    std::map<Word, signed char> seen;
    bool conflict = false;
    for (const auto& s : samples) {
      for (std::size_t i = static_cast<std::size_t>(r); i + static_cast<std::size_t>(r) < s.word.size() && !conflict; ++i) {
        if (s.mark[i] < 0) continue;
        Word w = subword(s.word, i - static_cast<std::size_t>(r), static_cast<std::size_t>(2 * r + 1));
        auto [it, fresh] = seen.emplace(w, s.mark[i]);
        if (!fresh && it->second != s.mark[i]) conflict = true;
      }
      if (conflict) break;
    }
    if (conflict) continue;
    std::vector<Cylinder> parts;
    for (const auto& [w, m] : seen)
      if (m == 1) parts.push_back(Cylinder{w, -r});
    if (parts.empty()) return CylinderSet{};
    return CylinderSet(std::move(parts));
  }
  return std::nullopt;
}

/// Aligned symbol sequences: target[k] is the image of the source window centred at k
/// (-1 where unknown).
struct AlignedSample {
  Word source;
  std::vector<int> target;
};

/// Smallest radius R for which the target symbol is a function of the source window.
inline std::optional<SlidingBlockCode> learn_code(const std::vector<AlignedSample>& samples, int max_radius = 12) {
  for (int r = 0; r <= max_radius; ++r) {
    std::map<Word, Symbol> rule;
    bool conflict = false;
    for (const auto& s : samples) {
      for (std::size_t k = static_cast<std::size_t>(r); k + static_cast<std::size_t>(r) < s.source.size() && !conflict; ++k) {
        if (s.target[k] < 0) continue;
        Word w = subword(s.source, k - static_cast<std::size_t>(r), static_cast<std::size_t>(2 * r + 1));
        auto [it, fresh] = rule.emplace(w, s.target[k]);
        if (!fresh && it->second != s.target[k]) conflict = true;
      }
      if (conflict) break;
    }
    if (!conflict) return SlidingBlockCode(r, std::move(rule));
  }
  return std::nullopt;
}

/// A conjugacy between the return systems on C (source) and D (target), written as a
/// sliding block code on return-word symbols, with an inverse code.
struct FlowCode {
  ReturnSystem source;
  ReturnSystem target;
  SlidingBlockCode code;
  SlidingBlockCode inverse;
  std::string kind = "general";
  int verified_depth = 0;
  std::string certificate() const { return "verified to depth " + std::to_string(verified_depth); }
};

struct FlowCodeOptions {
  int depth = 12;           // block lengths checked for language preservation
  int inverse_budget = 6;   // largest inverse radius tried
};

namespace detail {

/// First witness block in `from` whose image is outside `to`, if any.
inline std::optional<Word> language_violation(const SlidingBlockCode& code, const ReturnSystem& from, const ReturnSystem& to,
                                              int depth) {
  std::size_t r2 = 2 * static_cast<std::size_t>(code.radius());
  for (std::size_t n = 1; n <= static_cast<std::size_t>(depth); ++n) {
    WordSet target = to.recoded_blocks(n);
    for (const auto& b : from.recoded_blocks(n + r2)) {
      Word img;
      try {
        img = apply_code(code, b);
      } catch (const ValidationError&) {
        return b;
      }
      if (!target.count(img)) return b;
    }
  }
  return std::nullopt;
}

}  // namespace detail

/// Validates a candidate conjugacy and searches for its inverse code.
inline FlowCode make_flow_code(const SlidingBlockCode& code, const ReturnSystem& sys_c, const ReturnSystem& sys_d,
                               const FlowCodeOptions& opt = {}, std::string kind = "general") {
  const Alphabet& xa = sys_c.substitution().alphabet();
  auto render_block = [&](const ReturnSystem& sys, const Word& b) {
    std::string s;
    for (Symbol k : b) s += "(" + xa.render(sys.return_words().at(static_cast<std::size_t>(k))) + ")";
    return s;
  };
  if (auto bad = detail::language_violation(code, sys_c, sys_d, opt.depth))
    throw ValidationError("flow code: not language preserving; witness block " + render_block(sys_c, *bad));
  int r = code.radius();
  std::string witness;
  for (int s = 0; s <= opt.inverse_budget; ++s) {
    // inverse of radius s: the centre of every source block of length 2(r+s)+1 must be
    // determined by its image of length 2s+1
    std::map<Word, Symbol> rule;
    bool conflict = false;
    std::size_t len = static_cast<std::size_t>(2 * (r + s) + 1);
    for (const auto& b : sys_c.recoded_blocks(len)) {
      Word img = apply_code(code, b);
      Symbol centre = b[static_cast<std::size_t>(r + s)];
      auto [it, fresh] = rule.emplace(img, centre);
      if (!fresh && it->second != centre) {
        conflict = true;
        witness = "image " + render_block(sys_d, img) + " has two preimage centres";
        break;
      }
    }
    if (conflict) continue;
    bool onto = true;
    for (const auto& w : sys_d.recoded_blocks(static_cast<std::size_t>(2 * s + 1)))
      if (!rule.count(w)) {
        onto = false;
        witness = "target block " + render_block(sys_d, w) + " is not an image";
        break;
      }
    if (!onto) break;  // a non-surjective code cannot gain an inverse at larger radius
    SlidingBlockCode inv(s, std::move(rule));
    if (auto bad = detail::language_violation(inv, sys_d, sys_c, opt.depth))
      throw ValidationError("flow code: inverse not language preserving; witness block " + render_block(sys_d, *bad));
    // round trips on checked blocks
    std::size_t rt = static_cast<std::size_t>(2 * (r + s));
    for (std::size_t n = 1; n <= static_cast<std::size_t>(opt.depth); ++n) {
      for (const auto& b : sys_c.recoded_blocks(n + rt))
        if (apply_code(inv, apply_code(code, b)) != subword(b, rt / 2, n))
          throw InconsistencyError("flow code: inverse does not undo the code");
      for (const auto& b : sys_d.recoded_blocks(n + rt))
        if (apply_code(code, apply_code(inv, b)) != subword(b, rt / 2, n))
          throw InconsistencyError("flow code: code does not undo the inverse");
    }
    return FlowCode{sys_c, sys_d, code, inv, std::move(kind), opt.depth};
  }
  throw ValidationError("flow code: not a conjugacy (no inverse within radius " + std::to_string(opt.inverse_budget) +
                        "); " + (witness.empty() ? "no witness" : witness));
}

/// The whole space as a cross section: return words are the letters.
inline ReturnSystem whole_space_system(const Substitution& sub) { return induce(sub, CylinderSet::whole()); }

inline FlowCode identity_flow_code(const ReturnSystem& sys, const FlowCodeOptions& opt = {}) {
  return make_flow_code(SlidingBlockCode::identity(static_cast<int>(sys.size())), sys, sys, opt, "identity");
}

/// Ψ(φ): an automorphism code on letters read as a flow code with C = D = X.
inline FlowCode automorphism_flow_code(const Substitution& sub, const SlidingBlockCode& phi, const FlowCodeOptions& opt = {}) {
  ReturnSystem x = whole_space_system(sub);
  return make_flow_code(phi, x, x, opt, "automorphism");
}

/// Cut positions of ξ-images in ξ(z): positions of the starts of the blocks ξ(z_i).
inline std::vector<std::size_t> image_cuts(const Substitution& sub, const Word& z) {
  std::vector<std::size_t> cuts;
  std::size_t p = 0;
  for (Symbol s : z) {
    cuts.push_back(p);
    p += sub.image(s).size();
  }
  return cuts;
}

/// The clopen set ξ(X) of image cut points, learned from marked samples and stabilized.
inline CylinderSet substitution_image_set(const Substitution& sub, int depth = 12) {
  std::optional<CylinderSet> prev;
  std::size_t len = 512;
  for (int round = 0; round <= depth; ++round, len *= 2) {
    std::vector<MarkedWord> samples;
    for (const auto& z : sample_words(sub, len)) {
      MarkedWord m{sub.apply(z), {}};
      m.mark.assign(m.word.size(), 0);
      for (auto c : image_cuts(sub, z)) m.mark[c] = 1;
      samples.push_back(std::move(m));
    }
    auto cur = learn_cylinder_set(samples);
    if (!cur) throw ResourceError("image set: recognizability radius exceeds the search bound");
    if (prev && *prev == *cur) return *cur;
    prev = cur;
  }
  throw ResourceError("image set did not stabilize");
}

/// ξ̃: the flow code (X, ξ(X)) sending the letter a to the return word ξ(a).
inline FlowCode substitution_flow_code(const Substitution& sub, const FlowCodeOptions& opt = {}) {
  ReturnSystem x = whole_space_system(sub);
  ReturnSystem d = induce(sub, substitution_image_set(sub, opt.depth), opt.depth);
  std::vector<Symbol> map;
  for (Symbol a = 0; a < sub.size(); ++a) {
    auto idx = d.index_of(sub.image(a));
    if (!idx) throw InconsistencyError("substitution flow code: image word is not a return word of ξ(X)");
    map.push_back(*idx);
  }
  return make_flow_code(SlidingBlockCode::letter_map(map), x, d, opt, "substitution");
}

/// μ(C)/μ(D).
inline FieldElement r_mu(const FlowCode& fc, const MeasureOracle& mo) {
  return fc.source.base_measure(mo) / fc.target.base_measure(mo);
}
inline FieldElement r_mu(const FlowCode& fc) { return r_mu(fc, MeasureOracle(fc.source.substitution())); }

namespace detail {

/// A sample point sequence read through a flow code: source X-word and its return-symbol
/// sequence, the image X-word, and for each image return index the source index.
struct CodedImage {
  Word source_x;
  std::vector<std::size_t> source_starts;  // X-positions of source return words
  Word source_seq;
  Word image_x;
  std::vector<std::size_t> image_starts;   // X-positions in image_x of image return words
  Word image_seq;
  std::size_t offset = 0;                  // image index j ↔ source index j + offset
};

inline CodedImage push_through(const FlowCode& fc, const Word& z) {
  CodedImage ci;
  ci.source_x = z;
  ci.source_seq = fc.source.parse(z, &ci.source_starts);
  ci.offset = static_cast<std::size_t>(fc.code.radius());
  if (ci.source_seq.size() < fc.code.window()) return ci;
  ci.image_seq = apply_code(fc.code, ci.source_seq);
  std::size_t p = 0;
  for (Symbol s : ci.image_seq) {
    ci.image_starts.push_back(p);
    const Word& w = fc.target.return_words().at(static_cast<std::size_t>(s));
    ci.image_x.insert(ci.image_x.end(), w.begin(), w.end());
    p += w.size();
  }
  return ci;
}

inline std::vector<Word> samples_of_length(const Substitution& sub, std::size_t len) { return sample_words(sub, len); }

}  // namespace detail

/// fc2 after fc1 on refined cross sections K ⊆ C1 and L ⊆ D2, with K = φ1^{-1}(D1 ∩ C2) and
/// L = φ2(D1 ∩ C2).
inline FlowCode compose_flow_codes(const FlowCode& fc1, const FlowCode& fc2, const FlowCodeOptions& opt = {}) {
  const Substitution& sub = fc1.source.substitution();
  if (!(sub.images() == fc2.source.substitution().images()))
    throw ValidationError("compose_flow_codes: codes live over different subshifts");
  const CylinderSet& c2 = fc2.source.base();

  std::optional<CylinderSet> prev_k, prev_l;
  std::size_t len = 1024;
  for (int round = 0; round <= opt.depth; ++round, len *= 2) {
    std::vector<MarkedWord> k_marks, l_marks;
    struct Pairing {
      std::vector<std::pair<std::size_t, std::size_t>> links;  // (X-pos in source word, X-pos in final image)
    };
    std::vector<Pairing> pairings;
    std::vector<detail::CodedImage> firsts, seconds;
    bool any_e = false;
    for (const auto& z : detail::samples_of_length(sub, len)) {
      detail::CodedImage a = detail::push_through(fc1, z);
      detail::CodedImage b = detail::push_through(fc2, a.image_x);
      // E-points: D1 cuts of a.image_x that are decided C2-visits
      std::map<std::size_t, std::size_t> d1_cut_index;  // X-pos in a.image_x → image index
      for (std::size_t j = 0; j < a.image_starts.size(); ++j) d1_cut_index[a.image_starts[j]] = j;
      std::map<std::size_t, std::size_t> c2_visit_to_image;  // X-pos in a.image_x → X-pos in b.image_x
      for (std::size_t j = 0; j < b.image_starts.size(); ++j)
        c2_visit_to_image[b.source_starts[j + b.offset]] = b.image_starts[j];
      MarkedWord km{z, std::vector<signed char>(z.size(), -1)};
      MarkedWord lm{b.image_x, std::vector<signed char>(b.image_x.size(), -1)};
      Pairing pr;
      // K marks on the window covered by fc1's image
      if (!a.image_starts.empty()) {
        std::size_t lo = a.source_starts[a.offset], hi = a.source_starts[a.offset + a.image_seq.size() - 1];
        for (std::size_t p = lo; p <= hi; ++p) km.mark[p] = 0;
      }
      if (!b.image_starts.empty()) {
        std::size_t lo = b.image_starts.front(), hi = b.image_starts.back();
        for (std::size_t p = lo; p <= hi; ++p) lm.mark[p] = 0;
      }
      for (std::size_t j = 0; j < a.image_starts.size(); ++j) {
        std::size_t q = a.image_starts[j];
        if (!decided(c2, a.image_x, q)) {
          km.mark[a.source_starts[j + a.offset]] = -1;
          continue;
        }
        auto in = c2.contains_at(a.image_x, static_cast<long>(q));
        if (!in || !*in) continue;
        any_e = true;
        auto it = c2_visit_to_image.find(q);
        std::size_t src = a.source_starts[j + a.offset];
        km.mark[src] = 1;
        if (it != c2_visit_to_image.end()) {
          lm.mark[it->second] = 1;
          pr.links.emplace_back(src, it->second);
        }
      }
      // L marks only trustworthy where the image of fc2 covers E-points that have preimages
      for (const auto& [q, img] : c2_visit_to_image) {
        if (d1_cut_index.count(q)) continue;
        lm.mark[img] = 0;
      }
      k_marks.push_back(std::move(km));
      l_marks.push_back(std::move(lm));
      pairings.push_back(std::move(pr));
      firsts.push_back(std::move(a));
      seconds.push_back(std::move(b));
    }
    if (!any_e) throw ResourceError("compose_flow_codes: D1 ∩ C2 is empty; refinement search exhausted");
    auto k = learn_cylinder_set(k_marks);
    auto l = learn_cylinder_set(l_marks);
    if (!k || !l) throw ResourceError("compose_flow_codes: refined cross sections are not recognisable within the radius bound");
    bool stable = prev_k && prev_l && *prev_k == *k && *prev_l == *l;
    prev_k = k;
    prev_l = l;
    if (!stable) continue;

    ReturnSystem sys_k = induce(sub, *k, opt.depth);
    ReturnSystem sys_l = induce(sub, *l, opt.depth);
    std::vector<AlignedSample> aligned;
    for (std::size_t s = 0; s < k_marks.size(); ++s) {
      std::vector<std::size_t> ks, ls;
      Word kseq = sys_k.parse(k_marks[s].word, &ks);
      Word lseq = sys_l.parse(l_marks[s].word, &ls);
      std::map<std::size_t, std::size_t> kpos, lpos;
      for (std::size_t i = 0; i < ks.size(); ++i) kpos[ks[i]] = i;
      for (std::size_t i = 0; i < ls.size(); ++i) lpos[ls[i]] = i;
      AlignedSample as{kseq, std::vector<int>(kseq.size(), -1)};
      for (const auto& [src, img] : pairings[s].links) {
        auto ki = kpos.find(src);
        auto li = lpos.find(img);
        if (ki == kpos.end() || li == lpos.end()) continue;
        as.target[ki->second] = lseq[li->second];
      }
      aligned.push_back(std::move(as));
    }
    auto code = learn_code(aligned);
    if (!code) throw ResourceError("compose_flow_codes: composite code radius exceeds the search bound");
    // rule domain must cover every admissible window of the induced language
    WordSet dom = code->domain();
    for (const auto& w : sys_k.recoded_blocks(code->window()))
      if (!dom.count(w)) throw ResourceError("compose_flow_codes: samples do not cover every admissible window");
    std::string kind = (fc1.kind == "identity") ? fc2.kind : (fc2.kind == "identity" ? fc1.kind : "composite");
    return make_flow_code(*code, sys_k, sys_l, opt, kind);
  }
  throw ResourceError("compose_flow_codes: refinement did not stabilize within depth");
}

/// (φ|_E, E, φ(E)) for E inside the source base.
inline FlowCode restrict_flow_code(const FlowCode& fc, const CylinderSet& e, const FlowCodeOptions& opt = {}) {
  const Substitution& sub = fc.source.substitution();
  ReturnSystem sys_e = induce(sub, e, opt.depth);
  // E ⊆ C: every decided E-visit in the samples is a C-visit
  for (const auto& z : sample_words(sub, fc.source.sample_length())) {
    for (auto p : visits(e, z)) {
      if (!decided(e, z, p) || !decided(fc.source.base(), z, p)) continue;
      auto in = fc.source.base().contains_at(z, static_cast<long>(p));
      if (!in || !*in) throw ValidationError("restrict_flow_code: E is not contained in the source cross section");
    }
  }
  FlowCode id = identity_flow_code(sys_e, opt);
  return compose_flow_codes(id, fc, opt);
}

/// A two-sided ξ^k-fixed point b.a around an origin, as a long word with the origin index.
struct PeriodicPoint {
  Word word;
  std::size_t origin = 0;
  int power = 1;
};

inline PeriodicPoint two_sided_fixed_point(const Substitution& sub, std::size_t half_length) {
  int d = sub.size();
  // least k with first- and last-letter maps of ξ^k idempotent on a cycle letter
  WordSet two = admissible_blocks(sub, 2);
  for (int k = 1; k <= 2 * d * d + 2; ++k) {
    Substitution p = sub.power(k);
    for (const auto& ba : two) {
      Symbol b = ba[0], a = ba[1];
      if (p.image(a).front() != a || p.image(b).back() != b) continue;
      if (p.image(a).size() < 2 && p.image(b).size() < 2) continue;
      Word right{a}, left{b};
      while (right.size() < half_length) right = p.apply(right);
      while (left.size() < half_length) left = p.apply(left);
      PeriodicPoint pt;
      pt.word.assign(left.end() - static_cast<std::ptrdiff_t>(half_length), left.end());
      pt.origin = half_length;
      pt.word.insert(pt.word.end(), right.begin(), right.begin() + static_cast<std::ptrdiff_t>(half_length));
      pt.power = k;
      return pt;
    }
  }
  throw ResourceError("no two-sided periodic point found");
}

struct CocycleProfile {
  std::vector<std::pair<int, Rational>> slopes;  // (k, r_D(T_D^k φ x0) / r_C(T_C^k x0))
};

/// Slopes along the orbit of the first C-visit at or after the origin of x0.
inline CocycleProfile cocycle_slopes(const FlowCode& fc, const PeriodicPoint& x0, int k_min, int k_max) {
  std::vector<std::size_t> starts;
  Word seq = fc.source.parse(x0.word, &starts);
  std::size_t idx = 0;
  while (idx < starts.size() && starts[idx] < x0.origin) ++idx;
  int r = fc.code.radius();
  CocycleProfile prof;
  for (int k = k_min; k <= k_max; ++k) {
    long i = static_cast<long>(idx) + k;
    if (i - r < 0 || i + r >= static_cast<long>(seq.size())) throw ValidationError("cocycle_slopes: presentation too short for k range");
    Word window = subword(seq, static_cast<std::size_t>(i - r), static_cast<std::size_t>(2 * r + 1));
    auto img = fc.code.at(window);
    if (!img) throw InconsistencyError("cocycle_slopes: window outside the code domain");
    std::size_t rc = fc.source.return_words()[static_cast<std::size_t>(seq[static_cast<std::size_t>(i)])].size();
    std::size_t rd = fc.target.return_words()[static_cast<std::size_t>(*img)].size();
    prof.slopes.emplace_back(k, Rational(static_cast<long>(rd), static_cast<long>(rc)));
  }
  return prof;
}

/// Smallest (p, q) with α^p = λ^q, p ascending then |q| ascending with positive q first.
inline std::optional<std::pair<int, int>> lambda_relation_search(const FieldElement& alpha, int p_max, int q_max) {
  if (alpha.sign() <= 0) throw ValidationError("lambda_relation_search: alpha must be positive");
  FieldElement lam = FieldElement::generator(alpha.field());
  for (int p = 1; p <= p_max; ++p) {
    FieldElement ap = alpha.pow(p);
    for (int q = 0; q <= q_max; ++q) {
      if (q == 0) {
        if (ap == FieldElement::rational(alpha.field(), 1)) return std::make_pair(p, 0);
        continue;
      }
      if (ap == lam.pow(q)) return std::make_pair(p, q);
      if (ap == lam.pow(-q)) return std::make_pair(p, -q);
    }
  }
  return std::nullopt;
}

}  // namespace flowmcg
