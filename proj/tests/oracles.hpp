#pragma once

// Independent reference computations for the tests. Everything here works on plain strings and
// doubles and shares no code with the library beyond the Substitution type used to hand over rules.

#include "flowmcg/flowmcg.hpp"

#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace oracle {

struct Rules {
  std::string name;
  std::vector<std::string> letters;  // single characters
  std::vector<std::string> images;
  flowmcg::Substitution sub() const { return flowmcg::Substitution::from_strings(letters, images); }
};

/// Primitive aperiodic substitutions used by the property checks.
inline std::vector<Rules> catalog() {
  return {
      {"thue-morse", {"0", "1"}, {"01", "10"}},
      {"fibonacci", {"1", "2"}, {"12", "1"}},
      {"tribonacci", {"1", "2", "3"}, {"12", "13", "1"}},
      {"period-doubling", {"a", "b"}, {"ab", "aa"}},
      {"non-pisot", {"a", "b"}, {"aaaab", "aabbb"}},
      {"matui", {"0", "1", "2", "3"}, {"012230", "123301", "230012", "301123"}},
      {"golden-square", {"a", "b"}, {"aab", "ba"}},
      {"rudin-shapiro", {"a", "b", "c", "d"}, {"ab", "ac", "db", "dc"}},
      {"root-six", {"a", "b"}, {"abbb", "aab"}},
      {"silver-mean", {"a", "b"}, {"aab", "a"}},
  };
}

/// Iterates the rules on a start letter until the word is at least min_len long.
inline std::string iterate(const Rules& r, char start, std::size_t min_len) {
  std::map<char, std::string> rule;
  for (std::size_t i = 0; i < r.letters.size(); ++i) rule[r.letters[i][0]] = r.images[i];
  std::string w(1, start);
  while (w.size() < min_len) {
    std::string next;
    for (char c : w) next += rule.at(c);
    w = next;
  }
  return w;
}

/// Factors of length n of the text.
inline std::set<std::string> factors(const std::string& text, std::size_t n) {
  std::set<std::string> out;
  for (std::size_t i = 0; i + n <= text.size(); ++i) out.insert(text.substr(i, n));
  return out;
}

/// A long word of the language: the iterate of the first letter, plus iterates of every letter
/// (each is admissible), so that every short factor shows up.
inline std::string sample_text(const Rules& r, std::size_t min_len = 60000) {
  std::string t;
  for (const auto& l : r.letters) t += iterate(r, l[0], min_len) + "|";
  return t;
}

inline std::size_t brute_complexity(const std::string& text, std::size_t n) {
  std::size_t k = 0;
  for (const auto& f : factors(text, n))
    if (f.find('|') == std::string::npos) ++k;
  return k;
}

/// Letter frequencies of a long word.
inline std::map<char, double> letter_frequencies(const std::string& w) {
  std::map<char, double> f;
  for (char c : w) f[c] += 1.0;
  for (auto& [c, v] : f) v /= static_cast<double>(w.size());
  return f;
}

inline double count_occurrences(const std::string& text, const std::string& pat) {
  double k = 0;
  for (std::size_t p = text.find(pat); p != std::string::npos; p = text.find(pat, p + 1)) k += 1;
  return k;
}

/// Perron eigenvalue of a nonnegative matrix by power iteration.
inline double perron_root(const std::vector<std::vector<double>>& m) {
  std::size_t d = m.size();
  std::vector<double> v(d, 1.0);
  double lam = 0;
  for (int it = 0; it < 2000; ++it) {
    std::vector<double> nv(d, 0.0);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) nv[i] += m[i][j] * v[j];
    double s = 0;
    for (double x : nv) s += x;
    lam = s / [&] { double t = 0; for (double x : v) t += x; return t; }();
    for (auto& x : nv) x /= s;
    v = nv;
  }
  return lam;
}

/// Entry (i, j) = number of letters j in the image of i, counted on strings.
inline std::vector<std::vector<long>> letter_counts(const Rules& r) {
  std::vector<std::vector<long>> m(r.letters.size(), std::vector<long>(r.letters.size(), 0));
  for (std::size_t i = 0; i < r.letters.size(); ++i)
    for (char c : r.images[i])
      for (std::size_t j = 0; j < r.letters.size(); ++j)
        if (r.letters[j][0] == c) ++m[i][j];
  return m;
}

/// Rules of the composite "apply first, then second": letter a goes to second(first(a)).
inline Rules compose(const Rules& first, const Rules& second) {
  std::map<char, std::string> rule;
  for (std::size_t i = 0; i < second.letters.size(); ++i) rule[second.letters[i][0]] = second.images[i];
  Rules out{first.name + "*" + second.name, first.letters, {}};
  for (const auto& img : first.images) {
    std::string w;
    for (char c : img) w += rule.at(c);
    out.images.push_back(w);
  }
  return out;
}

/// Numeric value of a field element.
inline double value(const flowmcg::FieldElement& x) { return std::stod(x.approx(17)); }

/// Thue-Morse bit: parity of the binary digit sum.
inline int thue_morse_bit(unsigned long n) { return __builtin_popcountl(n) & 1; }

/// Whether q is a dyadic rational.
inline bool dyadic(const flowmcg::Rational& q) {
  flowmcg::Integer d = flowmcg::denominator(q);
  while (d % 2 == 0) d /= 2;
  return d == 1;
}

/// Golden ratio as the larger root of x^2 - x - 1.
inline double golden() { return (1.0 + std::sqrt(5.0)) / 2.0; }

}  // namespace oracle
