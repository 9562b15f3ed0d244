#pragma once

// Words, substitutions, languages, cylinder sets and sliding block codes.

#include "flowmcg/errors.hpp"

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace flowmcg {

using Symbol = int;
using Word = std::vector<Symbol>;
using WordSet = std::set<Word>;

/// Ordered list of distinct symbol labels; symbols are indices 0..d-1 in input order.
class Alphabet {
 public:
  Alphabet() = default;
  explicit Alphabet(std::vector<std::string> labels) : labels_(std::move(labels)) {
    if (labels_.empty()) throw ValidationError("alphabet must contain at least one symbol");
    std::set<std::string> seen;
    for (const auto& l : labels_) {
      if (l.empty()) throw ValidationError("alphabet: empty symbol label");
      if (!seen.insert(l).second) throw ValidationError("alphabet: duplicate symbol '" + l + "'");
    }
  }
  /// Alphabet {0, 1, ..., d-1} labelled by decimal strings.
  static Alphabet numbered(int d) {
    std::vector<std::string> l;
    for (int i = 0; i < d; ++i) l.push_back(std::to_string(i));
    return Alphabet(std::move(l));
  }

  int size() const { return static_cast<int>(labels_.size()); }
  const std::string& label(Symbol s) const { return labels_.at(static_cast<std::size_t>(s)); }
  const std::vector<std::string>& labels() const { return labels_; }

  std::optional<Symbol> find(const std::string& label) const {
    auto it = std::find(labels_.begin(), labels_.end(), label);
    if (it == labels_.end()) return std::nullopt;
    return static_cast<Symbol>(it - labels_.begin());
  }
  Symbol index(const std::string& label) const {
    if (auto s = find(label)) return *s;
    throw ValidationError("symbol '" + label + "' is not in the alphabet");
  }
  bool single_char() const {
    return std::all_of(labels_.begin(), labels_.end(), [](const std::string& l) { return l.size() == 1; });
  }

  /// Parses a word written as a string of single-character labels.
  Word parse(const std::string& text) const {
    if (!single_char()) throw ValidationError("alphabet has multi-character symbols; give words as arrays");
    Word w;
    for (char ch : text) w.push_back(index(std::string(1, ch)));
    return w;
  }
  Word parse(const std::vector<std::string>& symbols) const {
    Word w;
    for (const auto& s : symbols) w.push_back(index(s));
    return w;
  }
  std::string render(const Word& w) const {
    std::string out;
    bool sep = !single_char();
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (sep && i) out += " ";
      out += label(w[i]);
    }
    return out;
  }
  friend bool operator==(const Alphabet& a, const Alphabet& b) { return a.labels_ == b.labels_; }

 private:
  std::vector<std::string> labels_;
};

/// A substitution: one nonempty image word per letter.
class Substitution {
 public:
  Substitution() = default;
  Substitution(Alphabet alphabet, std::vector<Word> images) : alphabet_(std::move(alphabet)), images_(std::move(images)) {
    validate();
  }

  /// Convenience constructor for single-character alphabets: {"01", "10"} etc.
  static Substitution from_strings(const std::vector<std::string>& labels, const std::vector<std::string>& images) {
    Alphabet a(labels);
    std::vector<Word> im;
    for (const auto& s : images) im.push_back(a.parse(s));
    return Substitution(std::move(a), std::move(im));
  }

  const Alphabet& alphabet() const { return alphabet_; }
  int size() const { return alphabet_.size(); }
  const Word& image(Symbol a) const { return images_.at(static_cast<std::size_t>(a)); }
  const std::vector<Word>& images() const { return images_; }

  Word apply(const Word& w) const {
    Word out;
    for (Symbol s : w) {
      const Word& im = image(s);
      out.insert(out.end(), im.begin(), im.end());
    }
    return out;
  }
  Word iterate(Word w, int k) const {
    for (int i = 0; i < k; ++i) w = apply(w);
    return w;
  }

  /// this ∘ other : a ↦ this(other(a)).
  Substitution compose(const Substitution& other) const {
    if (!(alphabet_ == other.alphabet_)) throw ValidationError("compose: alphabets differ");
    std::vector<Word> im;
    for (Symbol a = 0; a < size(); ++a) im.push_back(apply(other.image(a)));
    return Substitution(alphabet_, std::move(im));
  }
  Substitution power(int k) const {
    if (k < 1) throw ValidationError("substitution power must be >= 1");
    Substitution r = *this;
    for (int i = 1; i < k; ++i) r = compose(r);
    return r;
  }

  std::size_t min_image_length() const {
    std::size_t m = images_.front().size();
    for (const auto& w : images_) m = std::min(m, w.size());
    return m;
  }
  std::size_t max_image_length() const {
    std::size_t m = 0;
    for (const auto& w : images_) m = std::max(m, w.size());
    return m;
  }

  std::string render() const {
    std::string out;
    for (Symbol a = 0; a < size(); ++a) {
      if (a) out += ", ";
      out += alphabet_.label(a) + "->" + alphabet_.render(image(a));
    }
    return out;
  }

 private:
  void validate() const {
    if (alphabet_.size() < 1) throw ValidationError("substitution: empty alphabet");
    if (static_cast<int>(images_.size()) != alphabet_.size())
      throw ValidationError("substitution: one image per letter required");
    for (std::size_t i = 0; i < images_.size(); ++i) {
      if (images_[i].empty()) throw ValidationError("substitution: empty image for letter " + alphabet_.label(static_cast<Symbol>(i)));
      for (Symbol s : images_[i])
        if (s < 0 || s >= alphabet_.size()) throw ValidationError("substitution: foreign symbol in image");
    }
  }
  Alphabet alphabet_;
  std::vector<Word> images_;
};

/// All factors of length n of w.
inline void collect_blocks(const Word& w, std::size_t n, WordSet& out) {
  if (n == 0 || w.size() < n) return;
  for (std::size_t i = 0; i + n <= w.size(); ++i) out.insert(Word(w.begin() + static_cast<std::ptrdiff_t>(i), w.begin() + static_cast<std::ptrdiff_t>(i + n)));
}

inline Word subword(const Word& w, std::size_t pos, std::size_t len) {
  return Word(w.begin() + static_cast<std::ptrdiff_t>(pos), w.begin() + static_cast<std::ptrdiff_t>(pos + len));
}

/// Admissible n-blocks of the subshift X_sub (closure under the substitution of the blocks
/// seen in early iterates).
inline WordSet admissible_blocks(const Substitution& sub, std::size_t n) {
  WordSet s;
  if (n == 0) {
    s.insert(Word{});
    return s;
  }
  // Seeds: n-blocks of ξ^k(a) for all k up to the first level where every image is long enough.
  std::vector<Word> cur;
  for (Symbol a = 0; a < sub.size(); ++a) cur.push_back(Word{a});
  for (int level = 0; level < 64; ++level) {
    bool all_long = true;
    for (const auto& w : cur) {
      collect_blocks(w, n, s);
      if (w.size() < n) all_long = false;
    }
    if (all_long && level > 0) break;
    for (auto& w : cur) w = sub.apply(w);
  }
  // Fixpoint: n-factors of ξ(v) for v already known.
  WordSet frontier = s;
  while (!frontier.empty()) {
    WordSet next;
    for (const auto& v : frontier) {
      WordSet found;
      collect_blocks(sub.apply(v), n, found);
      for (const auto& w : found)
        if (s.insert(w).second) next.insert(w);
    }
    frontier = std::move(next);
  }
  return s;
}

/// Admissible blocks per length 1..max_length.
struct LanguageTable {
  std::vector<WordSet> blocks;  // blocks[n] for n = 0..max_length
  std::size_t max_length() const { return blocks.empty() ? 0 : blocks.size() - 1; }
  const WordSet& of_length(std::size_t n) const { return blocks.at(n); }
  bool admissible(const Word& w) const {
    if (w.size() > max_length()) throw ValidationError("language table too short for query");
    return blocks[w.size()].count(w) > 0;
  }
};

/// A finite union of cylinders; cylinder (w, k) is {x : x[k, k+|w|) = w}.
struct Cylinder {
  Word word;
  int offset = 0;
  friend bool operator<(const Cylinder& a, const Cylinder& b) {
    return std::tie(a.offset, a.word) < std::tie(b.offset, b.word);
  }
  friend bool operator==(const Cylinder& a, const Cylinder& b) { return a.word == b.word && a.offset == b.offset; }
};

class CylinderSet {
 public:
  CylinderSet() = default;
  explicit CylinderSet(std::vector<Cylinder> parts) : parts_(std::move(parts)) {
    std::sort(parts_.begin(), parts_.end());
    parts_.erase(std::unique(parts_.begin(), parts_.end()), parts_.end());
  }
  static CylinderSet whole() { return CylinderSet({Cylinder{Word{}, 0}}); }
  static CylinderSet single(Word w, int offset = 0) { return CylinderSet({Cylinder{std::move(w), offset}}); }

  const std::vector<Cylinder>& parts() const { return parts_; }
  bool empty() const { return parts_.empty(); }
  bool is_whole() const { return parts_.size() == 1 && parts_[0].word.empty(); }

  /// Context needed to the left of / right of (inclusive of) a position to decide membership.
  int left_margin() const {
    int m = 0;
    for (const auto& c : parts_) m = std::max(m, -c.offset);
    return m;
  }
  int right_margin() const {
    int m = 1;
    for (const auto& c : parts_) m = std::max(m, c.offset + static_cast<int>(c.word.size()));
    return m;
  }

  /// Membership of the point whose coordinate 0 sits at position pos of z; nullopt when the
  /// decision needs symbols outside z.
  std::optional<bool> contains_at(const Word& z, long pos) const {
    bool undecided = false;
    for (const auto& c : parts_) {
      long start = pos + c.offset;
      long end = start + static_cast<long>(c.word.size());
      if (start < 0 || end > static_cast<long>(z.size())) {
        undecided = true;
        continue;
      }
      if (std::equal(c.word.begin(), c.word.end(), z.begin() + start)) return true;
    }
    if (undecided) return std::nullopt;
    return false;
  }

  friend bool operator==(const CylinderSet& a, const CylinderSet& b) { return a.parts_ == b.parts_; }

 private:
  std::vector<Cylinder> parts_;
};

/// Admissible words covering both cylinders consistently (witnesses of intersection).
inline bool cylinders_intersect(const Cylinder& a, const Cylinder& b, const Substitution& sub) {
  int lo = std::min(a.offset, b.offset);
  int hi = std::max(a.offset + static_cast<int>(a.word.size()), b.offset + static_cast<int>(b.word.size()));
  std::size_t len = static_cast<std::size_t>(hi - lo);
  if (len == 0) return true;
  for (const auto& w : admissible_blocks(sub, len)) {
    bool ok = std::equal(a.word.begin(), a.word.end(), w.begin() + (a.offset - lo)) &&
              std::equal(b.word.begin(), b.word.end(), w.begin() + (b.offset - lo));
    if (ok) return true;
  }
  return false;
}

/// Pairwise disjointness of the constituent cylinders within the language of sub.
inline bool pairwise_disjoint(const CylinderSet& c, const Substitution& sub) {
  const auto& p = c.parts();
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = i + 1; j < p.size(); ++j)
      if (cylinders_intersect(p[i], p[j], sub)) return false;
  return true;
}

/// A sliding block code of radius r: output symbol i is rule(w[i, i+2r]).
class SlidingBlockCode {
 public:
  SlidingBlockCode() = default;
  SlidingBlockCode(int radius, std::map<Word, Symbol> rule) : radius_(radius), rule_(std::move(rule)) {
    if (radius_ < 0) throw ValidationError("sliding block code: negative radius");
    for (const auto& [w, s] : rule_)
      if (static_cast<int>(w.size()) != 2 * radius_ + 1) throw ValidationError("sliding block code: window length mismatch");
  }
  /// Radius-0 code from a symbol map.
  static SlidingBlockCode letter_map(const std::vector<Symbol>& image) {
    std::map<Word, Symbol> r;
    for (std::size_t a = 0; a < image.size(); ++a) r[Word{static_cast<Symbol>(a)}] = image[a];
    return SlidingBlockCode(0, std::move(r));
  }
  static SlidingBlockCode identity(int alphabet_size) {
    std::vector<Symbol> id(static_cast<std::size_t>(alphabet_size));
    for (int a = 0; a < alphabet_size; ++a) id[static_cast<std::size_t>(a)] = a;
    return letter_map(id);
  }
  /// The shift x ↦ σ^k x written as a radius-|k| code on the given windows.
  static SlidingBlockCode shift(int k, const WordSet& windows) {
    int r = k < 0 ? -k : k;
    std::map<Word, Symbol> rule;
    for (const auto& w : windows) {
      if (static_cast<int>(w.size()) != 2 * r + 1) throw ValidationError("shift code: window length mismatch");
      rule[w] = w[static_cast<std::size_t>(r + k)];
    }
    return SlidingBlockCode(r, std::move(rule));
  }

  int radius() const { return radius_; }
  std::size_t window() const { return static_cast<std::size_t>(2 * radius_ + 1); }
  const std::map<Word, Symbol>& rule() const { return rule_; }
  std::optional<Symbol> at(const Word& window) const {
    auto it = rule_.find(window);
    if (it == rule_.end()) return std::nullopt;
    return it->second;
  }
  WordSet domain() const {
    WordSet d;
    for (const auto& [w, s] : rule_) d.insert(w);
    return d;
  }

  /// The same map written with a larger radius on the given (wider) windows.
  SlidingBlockCode padded(int new_radius, const WordSet& windows) const {
    if (new_radius < radius_) throw ValidationError("padded: radius must not shrink");
    std::map<Word, Symbol> rule;
    std::size_t off = static_cast<std::size_t>(new_radius - radius_);
    for (const auto& w : windows) {
      auto s = at(subword(w, off, window()));
      if (!s) throw ValidationError("padded: inner window outside the rule domain");
      rule[w] = *s;
    }
    return SlidingBlockCode(new_radius, std::move(rule));
  }

  friend bool operator==(const SlidingBlockCode& a, const SlidingBlockCode& b) {
    return a.radius_ == b.radius_ && a.rule_ == b.rule_;
  }

 private:
  int radius_ = 0;
  std::map<Word, Symbol> rule_;
};

/// Output symbol i = rule(window centred at i + r); output length |w| - 2r.
inline Word apply_code(const SlidingBlockCode& code, const Word& w) {
  std::size_t win = code.window();
  if (w.size() < win) throw ValidationError("apply_code: word shorter than the code window");
  Word out;
  out.reserve(w.size() - win + 1);
  for (std::size_t i = 0; i + win <= w.size(); ++i) {
    auto s = code.at(subword(w, i, win));
    if (!s) throw ValidationError("apply_code: inadmissible window at position " + std::to_string(i));
    out.push_back(*s);
  }
  return out;
}

/// Words of length len all of whose windows lie in the code's domain.
inline WordSet locally_admissible(const SlidingBlockCode& code, std::size_t len) {
  WordSet cur = code.domain();
  std::size_t win = code.window();
  if (len < win) throw ValidationError("locally_admissible: length shorter than window");
  for (std::size_t l = win; l < len; ++l) {
    WordSet next;
    for (const auto& w : cur)
      for (const auto& d : code.domain()) {
        if (!std::equal(d.begin(), d.end() - 1, w.end() - static_cast<std::ptrdiff_t>(win - 1))) continue;
        Word e = w;
        e.push_back(d.back());
        next.insert(std::move(e));
      }
    cur = std::move(next);
  }
  return cur;
}

/// c1 ∘ c2 with radius r1 + r2. With a domain (the admissible windows of the source language)
/// every image window must lie in c1's domain; without one, locally admissible windows whose
/// image c1 cannot read are dropped.
inline SlidingBlockCode compose_codes(const SlidingBlockCode& c1, const SlidingBlockCode& c2,
                                      const WordSet* domain = nullptr) {
  int r = c1.radius() + c2.radius();
  std::size_t len = static_cast<std::size_t>(2 * r + 1);
  WordSet windows = domain ? *domain : locally_admissible(c2, len);
  std::map<Word, Symbol> rule;
  for (const auto& w : windows) {
    if (w.size() != len) throw ValidationError("compose_codes: domain window length mismatch");
    Word mid;
    try {
      mid = apply_code(c2, w);
    } catch (const ValidationError&) {
      if (domain) throw ValidationError("compose_codes: language mismatch (inner code undefined on an admissible window)");
      continue;
    }
    auto s = c1.at(mid);
    if (!s) {
      if (domain) throw ValidationError("compose_codes: language mismatch (outer code undefined on an image window)");
      continue;
    }
    rule[w] = *s;
  }
  return SlidingBlockCode(r, std::move(rule));
}

/// True iff the rule reads every admissible window and maps every admissible (n+2r)-block to an
/// admissible n-block, for n ≤ n_max.
inline bool code_preserves_language(const SlidingBlockCode& code, const Substitution& sub, std::size_t n_max) {
  std::size_t r2 = 2 * static_cast<std::size_t>(code.radius());
  for (std::size_t n = 1; n <= n_max; ++n) {
    WordSet target = admissible_blocks(sub, n);
    for (const auto& w : admissible_blocks(sub, n + r2)) {
      Word img;
      try {
        img = apply_code(code, w);
      } catch (const ValidationError&) {
        return false;
      }
      if (!target.count(img)) return false;
    }
  }
  return true;
}

}  // namespace flowmcg
