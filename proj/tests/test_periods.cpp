// Period groups (finitely generated subgroups of the reals), the phase
// torus R/P, and the derived abelian-group descriptors. The rank-one
// canonical generator is cross-checked against a plain gcd oracle.

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "prequant/periods.hpp"

using namespace prequant;

namespace {

template <typename Fn>
errc thrown_code(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected a prequant::Error";
  return errc::invalid_argument;
}

ExactReal rat(const SymbolTablePtr& t, long num, long den = 1) {
  return ExactReal(t, make_rational(num, den));
}

}  // namespace

// ===========================================================================
// Period groups
// ===========================================================================

TEST(PeriodGroup, EmptyAndUnitGroups) {
  auto t = SymbolTable::create();
  auto trivial = generate(t, {});
  EXPECT_TRUE(trivial->is_trivial());
  EXPECT_TRUE(trivial->is_discrete());
  EXPECT_EQ(trivial->rank(), 0u);
  EXPECT_EQ(trivial->canonical_generator(), std::nullopt);
  EXPECT_EQ(trivial->describe(), "{0}");
  EXPECT_EQ(trivial->describe_torus(), "R");

  auto z = generate(t, {rat(t, 1)});
  EXPECT_FALSE(z->is_trivial());
  EXPECT_TRUE(z->is_discrete());
  EXPECT_EQ(z->rank(), 1u);
  ASSERT_TRUE(z->canonical_generator().has_value());
  EXPECT_EQ(*z->canonical_generator(), rat(t, 1));
  EXPECT_EQ(z->describe(), "(1)Z");
  EXPECT_EQ(z->describe_torus(), "R/(1)Z");
}

TEST(PeriodGroup, RationalGeneratorsReduceToTheGcd) {
  // gcd oracle: p1/q + p2/q + ... generates (gcd(p)/q) Z.
  std::mt19937 rng(17u);
  std::uniform_int_distribution<long> p(-40, 40);
  const long q = 24;
  for (int trial = 0; trial < 40; ++trial) {
    auto t = SymbolTable::create();
    std::vector<ExactReal> gens;
    long g = 0;
    for (int k = 0; k < 3; ++k) {
      long pk = p(rng);
      g = std::gcd(g, pk);
      gens.push_back(rat(t, pk, q));
    }
    auto group = generate(t, gens);
    if (g == 0) {
      EXPECT_TRUE(group->is_trivial());
      continue;
    }
    ASSERT_EQ(group->rank(), 1u);
    EXPECT_EQ(*group->canonical_generator(), rat(t, g, q)) << "trial " << trial;
  }
}

TEST(PeriodGroup, ZeroGeneratorsAreDropped) {
  auto t = SymbolTable::create();
  auto group = generate(t, {rat(t, 0), rat(t, 2), rat(t, 0)});
  EXPECT_EQ(group->rank(), 1u);
  EXPECT_EQ(*group->canonical_generator(), rat(t, 2));
}

TEST(PeriodGroup, IncommensurateGeneratorsAreDense) {
  auto t = SymbolTable::create();
  t->add("alpha", 0.70710678118654757);
  auto group = generate(t, {rat(t, 1), ExactReal::symbol(t, "alpha")});
  EXPECT_EQ(group->rank(), 2u);
  EXPECT_FALSE(group->is_discrete());
  EXPECT_EQ(group->canonical_generator(), std::nullopt);
  EXPECT_NE(group->describe().find("non-discrete"), std::string::npos);
  EXPECT_NE(group->describe_torus().find("non-Hausdorff"), std::string::npos);

  // Membership stays exact even when the group is dense in R.
  ExactReal member = rat(t, 3) - ExactReal::symbol(t, "alpha") * mpq_class(2);
  EXPECT_TRUE(group->contains(member));
  ExactReal outsider = ExactReal::symbol(t, "alpha") * make_rational(1, 2);
  EXPECT_FALSE(group->contains(outsider));
}

TEST(PeriodGroup, ContainsAndReduce) {
  auto t = SymbolTable::create();
  auto z = generate(t, {rat(t, 1)});
  EXPECT_TRUE(z->contains(rat(t, -7)));
  EXPECT_FALSE(z->contains(rat(t, 1, 2)));
  EXPECT_EQ(z->reduce(rat(t, 3, 2)), rat(t, 1, 2));
  EXPECT_EQ(z->reduce(rat(t, -1, 4)), rat(t, 3, 4));
  EXPECT_EQ(z->reduce(rat(t, 5)), rat(t, 0));

  // Commensurate value against a rank-one group: reduced into [0, g).
  auto g23 = generate(t, {rat(t, 2, 3)});
  EXPECT_EQ(g23->reduce(rat(t, 5, 3)), rat(t, 1, 3));

  // Incommensurate values pass through reduction untouched.
  t->add("alpha", 0.70710678118654757);
  ExactReal a = ExactReal::symbol(t, "alpha");
  EXPECT_EQ(z->reduce(a + rat(t, 5, 2)), a + rat(t, 1, 2));
}

TEST(PeriodGroup, FloatDistanceSemantics) {
  auto t = SymbolTable::create();
  auto trivial = generate(t, {});
  EXPECT_DOUBLE_EQ(trivial->float_distance(-0.25), 0.25);

  auto z = generate(t, {rat(t, 1)});
  EXPECT_NEAR(z->float_distance(2.9999993), 7e-7, 1e-12);
  EXPECT_NEAR(z->float_distance(-0.4), 0.4, 1e-15);
  EXPECT_NEAR(z->float_distance(0.5), 0.5, 1e-15);

  // Dense groups cannot meter float distance; it degrades to |v| so that
  // callers never mistake density for a verified match.
  t->add("alpha", 0.70710678118654757);
  auto dense = generate(t, {rat(t, 1), ExactReal::symbol(t, "alpha")});
  EXPECT_DOUBLE_EQ(dense->float_distance(0.3), 0.3);
}

TEST(PeriodGroup, RejectsForeignRegistries) {
  auto t1 = SymbolTable::create();
  auto t2 = SymbolTable::create();
  EXPECT_EQ(thrown_code([&] { generate(t1, {rat(t2, 1)}); }),
            errc::basis_mismatch);
  auto z = generate(t1, {rat(t1, 1)});
  EXPECT_EQ(thrown_code([&] { z->contains(rat(t2, 1)); }),
            errc::basis_mismatch);
}

TEST(PeriodGroup, TotalPeriodsAdjoinsValues) {
  auto t = SymbolTable::create();
  auto toric = generate(t, {rat(t, 2)});
  auto total = total_periods(toric, {TorusElement(toric, rat(t, 3))});
  EXPECT_EQ(*total->canonical_generator(), rat(t, 1));
  // Same registry requirement applies to the adjoined values.
  auto t2 = SymbolTable::create();
  auto foreign = generate(t2, {rat(t2, 1)});
  EXPECT_EQ(thrown_code([&] {
              total_periods(toric, {TorusElement(foreign, rat(t2, 1))});
            }),
            errc::basis_mismatch);
}

// ===========================================================================
// Phase torus elements
// ===========================================================================

TEST(TorusElement, ArithmeticAndEquality) {
  auto t = SymbolTable::create();
  auto z = generate(t, {rat(t, 1)});
  TorusElement a(z, rat(t, 3, 4));
  TorusElement b(z, rat(t, 1, 2));
  EXPECT_TRUE((a + b).equals(TorusElement(z, rat(t, 5, 4))));
  EXPECT_TRUE((a + b).equals(TorusElement(z, rat(t, 1, 4))));  // mod 1
  EXPECT_TRUE((a - a).is_zero());
  EXPECT_TRUE((-b).equals(b));  // -1/2 = 1/2 mod 1
  EXPECT_FALSE(a.equals(b));
  EXPECT_TRUE((3 * b).equals(b));
  EXPECT_TRUE(TorusElement::zero(z).is_zero());
}

TEST(TorusElement, ReduceAndFormat) {
  auto t = SymbolTable::create();
  auto z = generate(t, {rat(t, 1)});
  TorusElement x(z, rat(t, 3, 2));
  EXPECT_EQ(x.reduce().representative(), rat(t, 1, 2));
  EXPECT_DOUBLE_EQ(x.reduce().float_representative(), 0.5);
  EXPECT_EQ(x.reduce().to_string(), "1/2 mod (1)Z");
}

TEST(TorusElement, MixedGroupsAreRejectedAndRebaseFixesThem) {
  auto t = SymbolTable::create();
  auto z = generate(t, {rat(t, 1)});
  auto z2 = generate(t, {rat(t, 1), rat(t, 1, 2)});
  TorusElement a(z, rat(t, 1, 2));
  TorusElement b(z2, rat(t, 1, 2));
  EXPECT_EQ(thrown_code([&] { (void)a.equals(b); }), errc::invalid_argument);
  EXPECT_TRUE(a.rebase(z2).equals(b));
  EXPECT_TRUE(a.rebase(z2).is_zero());  // 1/2 lies in the finer group
}

TEST(TorusElement, FloatDistanceWrapsAroundTheCircle) {
  auto t = SymbolTable::create();
  auto z = generate(t, {rat(t, 1)});
  TorusElement near_top(z, rat(t, 99, 100));
  TorusElement near_bottom(z, rat(t, 1, 100));
  EXPECT_NEAR(near_top.float_distance(near_bottom), 0.02, 1e-15);
}

// ===========================================================================
// Derived descriptors
// ===========================================================================

TEST(Descriptors, AbelianAndCharacterFormatting) {
  EXPECT_EQ(AbelianGroupDescriptor{}.to_string(), "0");
  EXPECT_EQ((AbelianGroupDescriptor{1, {}}).to_string(), "Z");
  EXPECT_EQ((AbelianGroupDescriptor{2, {}}).to_string(), "Z^2");
  EXPECT_EQ((AbelianGroupDescriptor{0, {3}}).to_string(), "Z/3");
  EXPECT_EQ((AbelianGroupDescriptor{1, {2}}).to_string(), "Z + Z/2");
  EXPECT_EQ((AbelianGroupDescriptor{0, {2, 2}}).to_string(), "Z/2 + Z/2");

  EXPECT_EQ(CharacterGroupDescriptor{}.to_string(), "0");
  EXPECT_EQ((CharacterGroupDescriptor{1, {}}).to_string(), "T_omega");
  EXPECT_EQ((CharacterGroupDescriptor{2, {}}).to_string(), "T_omega^2");
  EXPECT_EQ((CharacterGroupDescriptor{1, {3}}).to_string(), "T_omega + Z/3");
}

TEST(Descriptors, ExtensionModuliAgainstKnownAnswers) {
  auto t = SymbolTable::create();
  auto z = generate(t, {rat(t, 1)});

  // Free groups contribute nothing.
  EXPECT_TRUE(moduli_ext(2, {}, *z).is_trivial());

  // A Z/3 factor against a rank-one period lattice gives Z/3.
  auto ext3 = moduli_ext(0, {3}, *z);
  EXPECT_EQ(ext3.free_rank, 0);
  EXPECT_EQ(ext3.torsion, (std::vector<mpz_class>{3}));

  // Rank-two period lattice doubles each torsion factor.
  t->add("alpha", 0.70710678118654757);
  auto z2 = generate(t, {rat(t, 1), ExactReal::symbol(t, "alpha")});
  auto ext = moduli_ext(1, {2}, *z2);
  EXPECT_EQ(ext.free_rank, 0);
  EXPECT_EQ(ext.torsion, (std::vector<mpz_class>{2, 2}));

  // Trivial period group kills all torsion contributions.
  auto none = generate(t, {});
  EXPECT_TRUE(moduli_ext(0, {5}, *none).is_trivial());

  EXPECT_EQ(thrown_code([&] { moduli_ext(-1, {}, *z); }),
            errc::invalid_argument);
  EXPECT_EQ(thrown_code([&] { moduli_ext(0, {1}, *z); }),
            errc::invalid_argument);
}

TEST(Descriptors, CharacterGroupOfTheFirstHomology) {
  auto t = SymbolTable::create();
  auto z = generate(t, {rat(t, 1)});
  auto c = characters_h1(2, {}, *z);
  EXPECT_EQ(c.torus_rank, 2);
  EXPECT_TRUE(c.torsion.empty());

  auto c2 = characters_h1(1, {3}, *z);
  EXPECT_EQ(c2.torus_rank, 1);
  EXPECT_EQ(c2.torsion, (std::vector<mpz_class>{3}));

  t->add("alpha", 0.70710678118654757);
  auto z2 = generate(t, {rat(t, 1), ExactReal::symbol(t, "alpha")});
  auto c3 = characters_h1(0, {2}, *z2);
  EXPECT_EQ(c3.torus_rank, 0);
  EXPECT_EQ(c3.torsion, (std::vector<mpz_class>{2, 2}));
}
