#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <vector>

#include "prequant/errors.hpp"

namespace prequant {

using ZRow = std::vector<mpz_class>;
using ZMat = std::vector<ZRow>;

namespace detail {

inline void sub_scaled(ZRow& a, const ZRow& b, const mpz_class& q) {
  for (size_t k = 0; k < a.size(); ++k) a[k] -= q * b[k];
}

}  // namespace detail

/// Row-style Hermite normal form of the lattice spanned by the input rows.
/// Returns the nonzero rows in echelon order: each row's leading entry is
/// positive and entries above a leading entry are reduced into [0, pivot).
/// The row span over Z is preserved exactly.
inline ZMat hermite_normal_form(ZMat rows) {
  if (rows.empty()) return {};
  const size_t cols = rows[0].size();
  for (const auto& r : rows)
    require(r.size() == cols, errc::invalid_argument, "ragged matrix");

  size_t rank = 0;
  for (size_t c = 0; c < cols && rank < rows.size(); ++c) {
    // Reduce column c below row `rank` to a single pivot by repeated
    // division with remainder; this is the Euclidean algorithm done on rows.
    while (true) {
      size_t pivot = rows.size();
      for (size_t i = rank; i < rows.size(); ++i) {
        if (rows[i][c] == 0) continue;
        if (pivot == rows.size() ||
            cmp(abs(rows[i][c]), abs(rows[pivot][c])) < 0)
          pivot = i;
      }
      if (pivot == rows.size()) break;  // column is zero below rank
      std::swap(rows[rank], rows[pivot]);
      bool cleared = true;
      for (size_t i = rank + 1; i < rows.size(); ++i) {
        if (rows[i][c] == 0) continue;
        mpz_class q;
        mpz_fdiv_q(q.get_mpz_t(), rows[i][c].get_mpz_t(),
                   rows[rank][c].get_mpz_t());
        detail::sub_scaled(rows[i], rows[rank], q);
        if (rows[i][c] != 0) cleared = false;
      }
      if (cleared) {
        if (rows[rank][c] < 0)
          for (auto& v : rows[rank]) v = -v;
        for (size_t i = 0; i < rank; ++i) {
          mpz_class q;
          mpz_fdiv_q(q.get_mpz_t(), rows[i][c].get_mpz_t(),
                     rows[rank][c].get_mpz_t());
          detail::sub_scaled(rows[i], rows[rank], q);
        }
        ++rank;
        break;
      }
    }
  }
  rows.resize(rank);
  return rows;
}

/// Membership of `v` in the Z-span of `hnf` (which must be a Hermite form,
/// as produced above). Back-substitution against the echelon pivots.
inline bool in_z_span(const ZMat& hnf, ZRow v) {
  for (const auto& row : hnf) {
    size_t c = 0;
    while (c < row.size() && row[c] == 0) ++c;
    if (c == row.size()) continue;
    require(c < v.size(), errc::invalid_argument, "vector length mismatch");
    if (v[c] == 0) continue;
    mpz_class q, r;
    mpz_tdiv_qr(q.get_mpz_t(), r.get_mpz_t(), v[c].get_mpz_t(),
                row[c].get_mpz_t());
    if (r != 0) return false;
    detail::sub_scaled(v, row, q);
  }
  for (const auto& x : v)
    if (x != 0) return false;
  return true;
}

/// Invariant factors of the integer matrix (Smith normal form diagonal),
/// positive and in divisibility order d1 | d2 | ... Trailing zero diagonal
/// entries are dropped; the count of nonzero factors is the rank.
inline std::vector<mpz_class> smith_invariant_factors(ZMat m) {
  if (m.empty() || m[0].empty()) return {};
  const size_t rows = m.size(), cols = m[0].size();
  for (const auto& r : m)
    require(r.size() == cols, errc::invalid_argument, "ragged matrix");

  std::vector<mpz_class> diag;
  size_t top = 0, left = 0;
  while (top < rows && left < cols) {
    // Find a nonzero entry to pivot on.
    size_t pr = rows, pc = cols;
    for (size_t i = top; i < rows; ++i)
      for (size_t j = left; j < cols; ++j)
        if (m[i][j] != 0 &&
            (pr == rows || cmp(abs(m[i][j]), abs(m[pr][pc])) < 0)) {
          pr = i;
          pc = j;
        }
    if (pr == rows) break;
    std::swap(m[top], m[pr]);
    for (size_t i = 0; i < rows; ++i) std::swap(m[i][left], m[i][pc]);

    bool clean = false;
    while (!clean) {
      clean = true;
      for (size_t i = top + 1; i < rows; ++i) {
        if (m[i][left] == 0) continue;
        mpz_class q = m[i][left] / m[top][left];
        detail::sub_scaled(m[i], m[top], q);
        if (m[i][left] != 0) {
          std::swap(m[top], m[i]);
          clean = false;
        }
      }
      for (size_t j = left + 1; j < cols; ++j) {
        if (m[top][j] == 0) continue;
        mpz_class q = m[top][j] / m[top][left];
        for (size_t i = 0; i < rows; ++i) m[i][j] -= q * m[i][left];
        if (m[top][j] != 0) {
          for (size_t i = 0; i < rows; ++i) std::swap(m[i][left], m[i][j]);
          clean = false;
        }
      }
      if (!clean) continue;
      // Pivot must divide every remaining entry; if not, fold the offender
      // into the pivot row and restart the clearing pass.
      for (size_t i = top + 1; i < rows && clean; ++i)
        for (size_t j = left + 1; j < cols && clean; ++j)
          if (m[i][j] % m[top][left] != 0) {
            for (size_t k = 0; k < cols; ++k) m[top][k] += m[i][k];
            clean = false;
          }
    }
    mpz_class d = abs(m[top][left]);
    diag.push_back(d);
    ++top;
    ++left;
  }
  return diag;
}

}  // namespace prequant
