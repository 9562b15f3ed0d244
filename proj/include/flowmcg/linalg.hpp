#pragma once

// Exact dense linear algebra over Z, Q and real number fields.

#include "flowmcg/algebraic.hpp"
#include "flowmcg/errors.hpp"
#include "flowmcg/numeric.hpp"

#include <algorithm>
#include <optional>
#include <utility>
#include <vector>

namespace flowmcg {

using IntVector = std::vector<Integer>;
using IntMatrix = std::vector<IntVector>;
using RatVector = std::vector<Rational>;
using RatMatrix = std::vector<RatVector>;

inline std::size_t rows(const IntMatrix& m) { return m.size(); }
inline std::size_t cols(const IntMatrix& m) { return m.empty() ? 0 : m[0].size(); }

inline IntMatrix identity_matrix(std::size_t n) {
  IntMatrix m(n, IntVector(n, 0));
  for (std::size_t i = 0; i < n; ++i) m[i][i] = 1;
  return m;
}

inline IntMatrix transpose(const IntMatrix& a) {
  IntMatrix t(cols(a), IntVector(rows(a)));
  for (std::size_t i = 0; i < rows(a); ++i)
    for (std::size_t j = 0; j < cols(a); ++j) t[j][i] = a[i][j];
  return t;
}

inline IntMatrix operator*(const IntMatrix& a, const IntMatrix& b) {
  if (cols(a) != rows(b)) throw ValidationError("matrix product: dimension mismatch");
  IntMatrix c(rows(a), IntVector(cols(b), 0));
  for (std::size_t i = 0; i < rows(a); ++i)
    for (std::size_t k = 0; k < cols(a); ++k) {
      if (a[i][k] == 0) continue;
      for (std::size_t j = 0; j < cols(b); ++j) c[i][j] += a[i][k] * b[k][j];
    }
  return c;
}

inline IntVector operator*(const IntMatrix& a, const IntVector& v) {
  if (cols(a) != v.size()) throw ValidationError("matrix-vector product: dimension mismatch");
  IntVector r(rows(a), 0);
  for (std::size_t i = 0; i < rows(a); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) r[i] += a[i][j] * v[j];
  return r;
}

inline IntMatrix matrix_power(const IntMatrix& a, unsigned e) {
  IntMatrix r = identity_matrix(rows(a));
  IntMatrix b = a;
  while (e) {
    if (e & 1u) r = r * b;
    b = b * b;
    e >>= 1u;
  }
  return r;
}

inline bool is_zero_vector(const IntVector& v) {
  return std::all_of(v.begin(), v.end(), [](const Integer& x) { return x == 0; });
}

inline RatMatrix to_rational(const IntMatrix& a) {
  RatMatrix r(rows(a), RatVector(cols(a)));
  for (std::size_t i = 0; i < rows(a); ++i)
    for (std::size_t j = 0; j < cols(a); ++j) r[i][j] = a[i][j];
  return r;
}

/// Reduced row echelon form in place; returns pivot columns.
inline std::vector<std::size_t> rref(RatMatrix& m) {
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  std::size_t nc = m.empty() ? 0 : m[0].size();
  for (std::size_t c = 0; c < nc && r < m.size(); ++c) {
    std::size_t p = r;
    while (p < m.size() && m[p][c] == 0) ++p;
    if (p == m.size()) continue;
    std::swap(m[p], m[r]);
    Rational inv = 1 / m[r][c];
    for (auto& v : m[r]) v *= inv;
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (i == r || m[i][c] == 0) continue;
      Rational f = m[i][c];
      for (std::size_t j = 0; j < nc; ++j) m[i][j] -= f * m[r][j];
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

inline std::size_t rank(const IntMatrix& a) {
  RatMatrix m = to_rational(a);
  return rref(m).size();
}

/// Basis of the right nullspace {x : A x = 0} over Q, scaled to primitive integer vectors.
inline std::vector<IntVector> rational_nullspace(const RatMatrix& a, std::size_t ncols) {
  RatMatrix m = a;
  auto piv = rref(m);
  std::vector<IntVector> basis;
  for (std::size_t free = 0; free < ncols; ++free) {
    if (std::find(piv.begin(), piv.end(), free) != piv.end()) continue;
    RatVector x(ncols, 0);
    x[free] = 1;
    for (std::size_t i = 0; i < piv.size(); ++i) x[piv[i]] = -m[i][free];
    Integer l = 1;
    for (const auto& v : x) l = lcm(l, denominator(v));
    IntVector z(ncols);
    Integer g = 0;
    for (std::size_t j = 0; j < ncols; ++j) {
      z[j] = numerator(x[j]) * (l / denominator(x[j]));
      g = gcd(g, z[j]);
    }
    for (auto& v : z) v /= g;
    basis.push_back(z);
  }
  return basis;
}

/// Solve A x = b over Q; nullopt if inconsistent. Free variables set to zero.
inline std::optional<RatVector> rational_solve(const RatMatrix& a, const RatVector& b) {
  std::size_t n = a.empty() ? 0 : a[0].size();
  RatMatrix m = a;
  for (std::size_t i = 0; i < m.size(); ++i) m[i].push_back(b[i]);
  auto piv = rref(m);
  for (auto p : piv)
    if (p == n) return std::nullopt;
  RatVector x(n, 0);
  for (std::size_t i = 0; i < piv.size(); ++i) x[piv[i]] = m[i][n];
  return x;
}

/// Row-style Hermite normal form of the lattice spanned by the rows; zero rows dropped.
inline IntMatrix hermite_normal_form(IntMatrix m) {
  std::size_t nc = cols(m);
  std::size_t r = 0;
  for (std::size_t c = 0; c < nc && r < m.size(); ++c) {
    // Euclid on column c among rows r..end
    for (;;) {
      std::size_t best = m.size();
      for (std::size_t i = r; i < m.size(); ++i)
        if (m[i][c] != 0 && (best == m.size() || abs(m[i][c]) < abs(m[best][c]))) best = i;
      if (best == m.size()) break;
      std::swap(m[r], m[best]);
      bool done = true;
      for (std::size_t i = r + 1; i < m.size(); ++i) {
        if (m[i][c] == 0) continue;
        Integer q = floor_div(m[i][c], m[r][c]);
        for (std::size_t j = 0; j < nc; ++j) m[i][j] -= q * m[r][j];
        if (m[i][c] != 0) done = false;
      }
      if (done) break;
    }
    if (r < m.size() && m[r][c] != 0) {
      if (m[r][c] < 0)
        for (auto& v : m[r]) v = -v;
      for (std::size_t i = 0; i < r; ++i) {
        Integer q = floor_div(m[i][c], m[r][c]);
        if (q != 0)
          for (std::size_t j = 0; j < nc; ++j) m[i][j] -= q * m[r][j];
      }
      ++r;
    }
  }
  m.resize(r);
  return m;
}

/// Reduce v modulo the lattice with HNF basis h; the result is a canonical coset representative.
inline IntVector reduce_mod_lattice(IntVector v, const IntMatrix& h) {
  for (const auto& row : h) {
    std::size_t c = 0;
    while (c < row.size() && row[c] == 0) ++c;
    if (c == row.size()) continue;
    Integer q = floor_div(v[c], row[c]);
    if (q != 0)
      for (std::size_t j = 0; j < v.size(); ++j) v[j] -= q * row[j];
  }
  return v;
}

inline bool in_lattice(const IntVector& v, const IntMatrix& h) { return is_zero_vector(reduce_mod_lattice(v, h)); }

/// Z-basis of the integer kernel {x in Z^n : A x = 0} (a saturated lattice).
inline std::vector<IntVector> integer_kernel(const IntMatrix& a, std::size_t n) {
  // Column operations on [A ; I]: track a unimodular U with A U = [H | 0].
  std::size_t m = a.size();
  IntMatrix work(m + n, IntVector(n, 0));
  for (std::size_t i = 0; i < m; ++i) work[i] = a[i];
  for (std::size_t i = 0; i < n; ++i) work[m + i][i] = 1;
  std::size_t col = 0;
  auto colswap = [&](std::size_t x, std::size_t y) {
    for (auto& row : work) std::swap(row[x], row[y]);
  };
  auto coladd = [&](std::size_t dst, std::size_t src, const Integer& q) {
    for (auto& row : work) row[dst] -= q * row[src];
  };
  for (std::size_t r = 0; r < m && col < n; ++r) {
    for (;;) {
      std::size_t best = n;
      for (std::size_t j = col; j < n; ++j)
        if (work[r][j] != 0 && (best == n || abs(work[r][j]) < abs(work[r][best]))) best = j;
      if (best == n) break;
      colswap(col, best);
      bool done = true;
      for (std::size_t j = col + 1; j < n; ++j) {
        if (work[r][j] == 0) continue;
        coladd(j, col, floor_div(work[r][j], work[r][col]));
        if (work[r][j] != 0) done = false;
      }
      if (done) {
        ++col;
        break;
      }
    }
  }
  std::vector<IntVector> basis;
  for (std::size_t j = col; j < n; ++j) {
    IntVector v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = work[m + i][j];
    basis.push_back(v);
  }
  return basis;
}

/// Nonzero Smith invariant factors d1 | d2 | ... of an integer matrix.
inline std::vector<Integer> smith_invariants(IntMatrix a) {
  std::vector<Integer> out;
  std::size_t nr = rows(a), nc = cols(a);
  std::size_t t = 0;
  while (t < nr && t < nc) {
    // pivot: smallest nonzero |entry| in the remaining block
    std::size_t pi = nr, pj = nc;
    for (std::size_t i = t; i < nr; ++i)
      for (std::size_t j = t; j < nc; ++j)
        if (a[i][j] != 0 && (pi == nr || abs(a[i][j]) < abs(a[pi][pj]))) {
          pi = i;
          pj = j;
        }
    if (pi == nr) break;
    std::swap(a[t], a[pi]);
    for (auto& row : a) std::swap(row[t], row[pj]);
    bool clean = true;
    for (std::size_t i = t + 1; i < nr; ++i) {
      Integer q = floor_div(a[i][t], a[t][t]);
      if (q != 0)
        for (std::size_t j = t; j < nc; ++j) a[i][j] -= q * a[t][j];
      if (a[i][t] != 0) clean = false;
    }
    for (std::size_t j = t + 1; j < nc; ++j) {
      Integer q = floor_div(a[t][j], a[t][t]);
      if (q != 0)
        for (std::size_t i = t; i < nr; ++i) a[i][j] -= q * a[i][t];
      if (a[t][j] != 0) clean = false;
    }
    if (!clean) continue;
    // divisibility condition
    bool divides = true;
    for (std::size_t i = t + 1; i < nr && divides; ++i)
      for (std::size_t j = t + 1; j < nc; ++j)
        if (a[i][j] % a[t][t] != 0) {
          for (std::size_t k = t; k < nc; ++k) a[t][k] += a[i][k];
          divides = false;
          break;
        }
    if (!divides) continue;
    out.push_back(abs(a[t][t]));
    ++t;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Number-field linear algebra.

using FieldVector = std::vector<FieldElement>;
using FieldMatrix = std::vector<FieldVector>;

inline FieldMatrix to_field(const IntMatrix& a, const FieldPtr& f) {
  FieldMatrix r(rows(a));
  for (std::size_t i = 0; i < rows(a); ++i)
    for (std::size_t j = 0; j < cols(a); ++j) r[i].push_back(FieldElement::rational(f, Rational(a[i][j])));
  return r;
}

/// Right nullspace basis over a number field.
inline std::vector<FieldVector> field_nullspace(FieldMatrix m, std::size_t ncols, const FieldPtr& f) {
  std::vector<std::size_t> piv;
  std::size_t r = 0;
  for (std::size_t c = 0; c < ncols && r < m.size(); ++c) {
    std::size_t p = r;
    while (p < m.size() && m[p][c].is_zero()) ++p;
    if (p == m.size()) continue;
    std::swap(m[p], m[r]);
    FieldElement inv = m[r][c].inverse();
    for (auto& v : m[r]) v = v * inv;
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (i == r || m[i][c].is_zero()) continue;
      FieldElement k = m[i][c];
      for (std::size_t j = 0; j < ncols; ++j) m[i][j] -= k * m[r][j];
    }
    piv.push_back(c);
    ++r;
  }
  std::vector<FieldVector> basis;
  for (std::size_t free = 0; free < ncols; ++free) {
    if (std::find(piv.begin(), piv.end(), free) != piv.end()) continue;
    FieldVector x(ncols, FieldElement::rational(f, 0));
    x[free] = FieldElement::rational(f, 1);
    for (std::size_t i = 0; i < piv.size(); ++i) x[piv[i]] = -m[i][free];
    basis.push_back(x);
  }
  return basis;
}

}  // namespace flowmcg
