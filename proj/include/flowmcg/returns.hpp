#pragma once

// Return systems on cross sections: return words, return times and the recoded subshift.

#include "flowmcg/errors.hpp"
#include "flowmcg/substitution.hpp"
#include "flowmcg/symbolic.hpp"

#include <map>
#include <memory>
#include <string>
#include <vector>

namespace flowmcg {

/// For each letter, the shortest iterate ξ^k(b) of length at least min_len.
inline std::vector<Word> sample_words(const Substitution& sub, std::size_t min_len) {
  std::vector<Word> out;
  for (Symbol b = 0; b < sub.size(); ++b) {
    Word w{b};
    for (int k = 0; w.size() < min_len; ++k) {
      if (k > 200) throw ResourceError("sample_words: iterates do not grow");
      w = sub.apply(w);
    }
    out.push_back(std::move(w));
  }
  return out;
}

/// Positions i of z at which the point with coordinate 0 at i lies in C (decided positions only).
inline std::vector<std::size_t> visits(const CylinderSet& c, const Word& z) {
  std::vector<std::size_t> pos;
  for (std::size_t i = 0; i < z.size(); ++i) {
    auto in = c.contains_at(z, static_cast<long>(i));
    if (in && *in) pos.push_back(i);
  }
  return pos;
}

/// Decided positions are those with full context on both sides.
inline bool decided(const CylinderSet& c, const Word& z, std::size_t i) {
  return static_cast<long>(i) >= c.left_margin() && i + static_cast<std::size_t>(c.right_margin()) <= z.size();
}

/// The first-return system (C, T_C) of X_ξ, coded by return words.
class ReturnSystem {
 public:
  ReturnSystem() = default;
  ReturnSystem(Substitution sub, CylinderSet base, std::vector<Word> words, std::size_t sample_length)
      : sub_(std::make_shared<Substitution>(std::move(sub))),
        base_(std::move(base)),
        words_(std::move(words)),
        sample_length_(sample_length) {
    for (std::size_t i = 0; i < words_.size(); ++i) index_[words_[i]] = static_cast<Symbol>(i);
  }

  const Substitution& substitution() const { return *sub_; }
  const CylinderSet& base() const { return base_; }
  const std::vector<Word>& return_words() const { return words_; }
  std::size_t size() const { return words_.size(); }
  std::vector<std::size_t> return_times() const {
    std::vector<std::size_t> t;
    for (const auto& w : words_) t.push_back(w.size());
    return t;
  }
  std::optional<Symbol> index_of(const Word& w) const {
    auto it = index_.find(w);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }
  std::size_t sample_length() const { return sample_length_; }

  /// Return-word sequence of z read between decided visits to C; also reports the X-position
  /// of each return word start.
  Word parse(const Word& z, std::vector<std::size_t>* starts = nullptr) const {
    Word out;
    std::vector<std::size_t> vis;
    for (auto p : visits(base_, z))
      if (decided(base_, z, p)) vis.push_back(p);
    for (std::size_t k = 0; k + 1 < vis.size(); ++k) {
      Word w = subword(z, vis[k], vis[k + 1] - vis[k]);
      auto s = index_of(w);
      if (!s) throw InconsistencyError("return system: unknown return word " + sub_->alphabet().render(w));
      out.push_back(*s);
      if (starts) starts->push_back(vis[k]);
    }
    return out;
  }

  /// Admissible n-blocks of the induced (recoded) subshift, learned from parsed samples and
  /// stabilized by doubling the sample length.
  WordSet recoded_blocks(std::size_t n) const {
    auto it = block_cache_.find(n);
    if (it != block_cache_.end()) return it->second;
    std::size_t len = std::max<std::size_t>(sample_length_, 256 * n);
    WordSet prev;
    for (int round = 0; round < 14; ++round, len *= 2) {
      WordSet cur;
      for (const auto& z : sample_words(*sub_, len)) collect_blocks(parse(z), n, cur);
      if (round > 0 && cur == prev) {
        block_cache_[n] = cur;
        return cur;
      }
      prev = std::move(cur);
    }
    throw ResourceError("recoded language did not stabilize");
  }

  /// X-word spelled by a block of return-word symbols.
  Word spell(const Word& block) const {
    Word out;
    for (Symbol s : block) {
      const Word& w = words_.at(static_cast<std::size_t>(s));
      out.insert(out.end(), w.begin(), w.end());
    }
    return out;
  }

  /// X-cylinder windows describing the event "the return-word sequence starting here begins
  /// with block": admissible words u of length L+|spell(block)|+R whose C-visits among
  /// positions L..L+|spell(block)| are exactly the cut points of the block.
  std::vector<Word> block_windows(const Word& block) const {
    Word w = spell(block);
    std::vector<std::size_t> cuts{0};
    for (Symbol s : block) cuts.push_back(cuts.back() + words_.at(static_cast<std::size_t>(s)).size());
    std::size_t lm = static_cast<std::size_t>(base_.left_margin());
    std::size_t rm = static_cast<std::size_t>(base_.right_margin());
    std::size_t len = lm + w.size() + rm;
    std::vector<Word> out;
    for (const auto& u : admissible_blocks(*sub_, len)) {
      if (!std::equal(w.begin(), w.end(), u.begin() + static_cast<std::ptrdiff_t>(lm))) continue;
      bool ok = true;
      std::size_t next_cut = 0;
      for (std::size_t k = 0; k <= w.size() && ok; ++k) {
        auto in = base_.contains_at(u, static_cast<long>(lm + k));
        bool want = next_cut < cuts.size() && cuts[next_cut] == k;
        if (want) ++next_cut;
        ok = in && *in == want;
      }
      if (ok) out.push_back(u);
    }
    return out;
  }
  std::vector<Word> event_windows(Symbol i) const { return block_windows(Word{i}); }

  /// μ(E_w) for the return-word event of symbol i.
  FieldElement event_measure(const MeasureOracle& mo, Symbol i) const {
    FieldElement total = mo.pf().zero();
    for (const auto& u : event_windows(i)) total += mo.measure(u);
    return total;
  }

  /// μ(C) = Σ_w μ(E_w).
  FieldElement base_measure(const MeasureOracle& mo) const {
    FieldElement total = mo.pf().zero();
    for (std::size_t i = 0; i < words_.size(); ++i) total += event_measure(mo, static_cast<Symbol>(i));
    return total;
  }

  /// Σ_w μ(E_w)·|w|; equals 1 exactly (Kac).
  FieldElement kac_sum(const MeasureOracle& mo) const {
    FieldElement total = mo.pf().zero();
    for (std::size_t i = 0; i < words_.size(); ++i)
      total += Rational(static_cast<long>(words_[i].size())) * event_measure(mo, static_cast<Symbol>(i));
    return total;
  }

  std::shared_ptr<const Substitution> substitution_ptr() const { return sub_; }

 private:
  std::shared_ptr<const Substitution> sub_;
  CylinderSet base_;
  std::vector<Word> words_;
  std::map<Word, Symbol> index_;
  std::size_t sample_length_ = 0;
  mutable std::map<std::size_t, WordSet> block_cache_;
};

/// Complete list of return words to C (sorted), stabilized by doubling the sample length;
/// depth bounds the number of doublings.
inline ReturnSystem induce(const Substitution& sub, const CylinderSet& c, int depth = 12) {
  if (c.empty()) throw ValidationError("induce: empty cross section");
  std::size_t len = 128;
  std::set<Word> prev;
  for (int round = 0; round <= depth; ++round, len *= 2) {
    std::set<Word> cur;
    for (const auto& z : sample_words(sub, len)) {
      std::vector<std::size_t> vis;
      for (auto p : visits(c, z))
        if (decided(c, z, p)) vis.push_back(p);
      for (std::size_t k = 0; k + 1 < vis.size(); ++k) cur.insert(subword(z, vis[k], vis[k + 1] - vis[k]));
    }
    if (round > 0 && !cur.empty() && cur == prev)
      return ReturnSystem(sub, c, std::vector<Word>(cur.begin(), cur.end()), len);
    prev = std::move(cur);
  }
  if (prev.empty()) throw ValidationError("induce: cross section does not meet the subshift");
  throw ResourceError("induce: return words did not stabilize within depth " + std::to_string(depth));
}

}  // namespace flowmcg
