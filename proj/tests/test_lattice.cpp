// Integer-lattice kernel: Hermite form, membership, Smith invariant factors.
// The Smith factors are cross-checked against the classical minor-gcd
// characterization, computed here by brute-force minor enumeration.

#include <gtest/gtest.h>

#include <functional>
#include <random>
#include <vector>

#include "prequant/integer_lattice.hpp"

using namespace prequant;

namespace {

ZMat mat(std::initializer_list<std::initializer_list<long>> rows) {
  ZMat m;
  for (auto& r : rows) {
    ZRow row;
    for (long v : r) row.emplace_back(v);
    m.push_back(std::move(row));
  }
  return m;
}

mpz_class minor_det(const ZMat& m, const std::vector<size_t>& ri,
                    const std::vector<size_t>& ci) {
  // Laplace expansion; the submatrices here are at most 4x4.
  const size_t n = ri.size();
  if (n == 1) return m[ri[0]][ci[0]];
  mpz_class det = 0;
  int sign = 1;
  for (size_t k = 0; k < n; ++k) {
    std::vector<size_t> sub_ri(ri.begin() + 1, ri.end());
    std::vector<size_t> sub_ci;
    for (size_t j = 0; j < n; ++j)
      if (j != k) sub_ci.push_back(ci[j]);
    det += sign * m[ri[0]][ci[k]] * minor_det(m, sub_ri, sub_ci);
    sign = -sign;
  }
  return det;
}

// gcd of all k x k minors (0 when every minor vanishes).
mpz_class minor_gcd(const ZMat& m, size_t k) {
  const size_t rows = m.size(), cols = m[0].size();
  mpz_class g = 0;
  std::vector<size_t> ri(k), ci(k);
  std::function<void(size_t, size_t)> pick_cols = [&](size_t from, size_t got) {
    if (got == k) {
      mpz_class d = minor_det(m, ri, ci);
      mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), d.get_mpz_t());
      return;
    }
    for (size_t c = from; c < cols; ++c) {
      ci[got] = c;
      pick_cols(c + 1, got + 1);
    }
  };
  std::function<void(size_t, size_t)> pick_rows = [&](size_t from, size_t got) {
    if (got == k) {
      pick_cols(0, 0);
      return;
    }
    for (size_t r = from; r < rows; ++r) {
      ri[got] = r;
      pick_rows(r + 1, got + 1);
    }
  };
  pick_rows(0, 0);
  return g;
}

// Brute-force membership over two generators: v in the row span iff some
// integer combination inside the search box hits it. Only sound for the
// tiny lattices used below, where coefficients stay within the box.
bool in_span_bruteforce(const std::vector<std::vector<long>>& gens,
                        const std::vector<long>& v, long box) {
  for (long c0 = -box; c0 <= box; ++c0)
    for (long c1 = -box; c1 <= box; ++c1) {
      bool hit = true;
      for (size_t k = 0; k < v.size() && hit; ++k)
        hit = c0 * gens[0][k] + c1 * gens[1][k] == v[k];
      if (hit) return true;
    }
  return false;
}

ZMat to_zmat(const std::vector<std::vector<long>>& m) {
  ZMat out;
  for (auto& r : m) out.push_back(ZRow(r.begin(), r.end()));
  return out;
}

}  // namespace

// ===========================================================================
// Hermite normal form
// ===========================================================================

TEST(HermiteForm, CoprimeGeneratorsCollapseToUnit) {
  ZMat h = hermite_normal_form(mat({{2}, {3}}));
  ASSERT_EQ(h.size(), 1u);
  EXPECT_EQ(h[0][0], 1);
}

TEST(HermiteForm, DropsDependentRows) {
  ZMat h = hermite_normal_form(mat({{1, 2}, {2, 4}, {3, 6}}));
  ASSERT_EQ(h.size(), 1u);
  EXPECT_EQ(h[0], (ZRow{1, 2}));
}

TEST(HermiteForm, EchelonShapeAndReducedEntries) {
  ZMat h = hermite_normal_form(mat({{4, 7, 2}, {6, 3, 9}, {0, 5, 5}}));
  ASSERT_FALSE(h.empty());
  size_t prev_pivot_col = 0;
  bool first = true;
  for (size_t i = 0; i < h.size(); ++i) {
    size_t c = 0;
    while (c < h[i].size() && h[i][c] == 0) ++c;
    ASSERT_LT(c, h[i].size()) << "zero row survived";
    EXPECT_GT(h[i][c], 0);
    if (!first) EXPECT_GT(c, prev_pivot_col);
    for (size_t j = 0; j < i; ++j) {
      EXPECT_GE(h[j][c], 0);
      EXPECT_LT(h[j][c], h[i][c]);
    }
    prev_pivot_col = c;
    first = false;
  }
}

TEST(HermiteForm, PreservesTheRowSpan) {
  std::mt19937 rng(7u);
  std::uniform_int_distribution<long> entry(-4, 4);
  for (int trial = 0; trial < 20; ++trial) {
    ZMat gens(2, ZRow(3));
    for (auto& r : gens)
      for (auto& x : r) x = entry(rng);
    ZMat h = hermite_normal_form(gens);
    // Every original generator lies in the span of the form, and since the
    // Hermite form of a lattice is canonical, adjoining the originals must
    // not change it: together those give span equality.
    for (const auto& g : gens) EXPECT_TRUE(in_z_span(h, g));
    ZMat both = h;
    for (const auto& g : gens) both.push_back(g);
    EXPECT_EQ(hermite_normal_form(both), h) << "trial " << trial;
  }
}

TEST(HermiteForm, EmptyAndRaggedInputs) {
  EXPECT_TRUE(hermite_normal_form({}).empty());
  EXPECT_THROW(hermite_normal_form(mat({{1, 2}, {3}})), Error);
}

// ===========================================================================
// Membership
// ===========================================================================

TEST(InZSpan, MatchesBruteForceOnRandomLattices) {
  std::mt19937 rng(11u);
  std::uniform_int_distribution<long> entry(-3, 3);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<std::vector<long>> gens(2, std::vector<long>(2));
    for (auto& r : gens)
      for (auto& x : r) x = entry(rng);
    ZMat h = hermite_normal_form(to_zmat(gens));
    for (long a = -5; a <= 5; ++a)
      for (long b = -5; b <= 5; ++b) {
        EXPECT_EQ(in_z_span(h, ZRow{a, b}),
                  in_span_bruteforce(gens, {a, b}, 60))
            << "trial " << trial << " v=(" << a << "," << b << ")";
      }
  }
}

TEST(InZSpan, KnownAnswers) {
  ZMat h = hermite_normal_form(mat({{2, 0}, {0, 3}}));
  EXPECT_TRUE(in_z_span(h, {4, -3}));
  EXPECT_FALSE(in_z_span(h, {1, 0}));
  EXPECT_FALSE(in_z_span(h, {2, 2}));
  EXPECT_TRUE(in_z_span(h, {0, 0}));
  EXPECT_TRUE(in_z_span({}, {0, 0}));
  EXPECT_FALSE(in_z_span({}, {0, 1}));
}

// ===========================================================================
// Smith invariant factors
// ===========================================================================

TEST(SmithFactors, TextbookCases) {
  EXPECT_EQ(smith_invariant_factors(mat({{2, 0}, {0, 3}})),
            (std::vector<mpz_class>{1, 6}));
  EXPECT_EQ(smith_invariant_factors(mat({{2, 4}, {6, 8}})),
            (std::vector<mpz_class>{2, 4}));
  EXPECT_EQ(smith_invariant_factors(mat({{1, 0}, {0, 1}})),
            (std::vector<mpz_class>{1, 1}));
  EXPECT_EQ(smith_invariant_factors(mat({{0, 0}, {0, 0}})),
            std::vector<mpz_class>{});
  EXPECT_EQ(smith_invariant_factors({}), std::vector<mpz_class>{});
  EXPECT_EQ(smith_invariant_factors(mat({{3, 6}})),
            std::vector<mpz_class>{3});
}

TEST(SmithFactors, DivisibilityChainAndMinorGcds) {
  std::mt19937 rng(13u);
  std::uniform_int_distribution<long> entry(-6, 6);
  for (int trial = 0; trial < 25; ++trial) {
    ZMat m(3, ZRow(4));
    for (auto& r : m)
      for (auto& x : r) x = entry(rng);
    auto d = smith_invariant_factors(m);
    mpz_class prod = 1;
    for (size_t k = 0; k < d.size(); ++k) {
      EXPECT_GT(d[k], 0);
      if (k > 0) EXPECT_EQ(d[k] % d[k - 1], 0) << "not a divisibility chain";
      prod *= d[k];
      // d1*...*dk equals the gcd of all k x k minors.
      EXPECT_EQ(prod, minor_gcd(m, k + 1)) << "trial " << trial << " k=" << k;
    }
    if (d.size() < 3) EXPECT_EQ(minor_gcd(m, d.size() + 1), 0);
  }
}
