// Exact-value layer: symbol registry, rational-combination arithmetic,
// literal parsing, and float-to-exact snapping.

#include <gtest/gtest.h>

#include <cmath>

#include "prequant/exact.hpp"
#include "prequant/snapping.hpp"

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

}  // namespace

// ===========================================================================
// Symbol registry
// ===========================================================================

TEST(SymbolTable, SeedsTheRationalUnit) {
  auto table = SymbolTable::create();
  ASSERT_EQ(table->size(), 1u);
  EXPECT_EQ(table->symbol(0).name, "one");
  EXPECT_DOUBLE_EQ(table->symbol(0).approx, 1.0);
  EXPECT_TRUE(table->symbol(0).independent);
}

TEST(SymbolTable, AddAndLookup) {
  auto table = SymbolTable::create();
  size_t alpha = table->add("alpha", 0.66666666666666663);
  EXPECT_EQ(alpha, 1u);
  EXPECT_EQ(table->index_of("alpha"), std::optional<size_t>(1));
  EXPECT_EQ(table->index_of("beta"), std::nullopt);
  EXPECT_EQ(thrown_code([&] { table->add("alpha", 0.5); }),
            errc::invalid_argument);
  EXPECT_EQ(thrown_code([&] { table->add("nan", 0.0); }),
            errc::invalid_argument);
}

TEST(SymbolTable, FreshSymbolsCountUpAndDodgeCollisions) {
  auto table = SymbolTable::create();
  size_t a = table->add_fresh(0.123);
  EXPECT_EQ(table->symbol(a).name, "num_0");
  EXPECT_FALSE(table->symbol(a).independent);
  table->add("num_1", 2.0);  // occupy the next slot by hand
  size_t b = table->add_fresh(0.456);
  EXPECT_EQ(table->symbol(b).name, "num_2");
}

TEST(SymbolTable, IndependenceProbeFlagsRationalLookalikes) {
  auto table = SymbolTable::create();
  table->add("half", 0.5);  // -1 + 2*half = 0 exactly
  table->add("pi", 3.14159265358979312);
  auto warnings = table->independence_warnings();
  ASSERT_FALSE(warnings.empty());
  EXPECT_NE(warnings[0].find("half"), std::string::npos);
}

TEST(SymbolTable, IndependenceProbeQuietForHonestConstants) {
  auto table = SymbolTable::create();
  table->add("pi", 3.14159265358979312);
  table->add("log2", 0.69314718055994531);
  EXPECT_TRUE(table->independence_warnings().empty());
}

// ===========================================================================
// Exact arithmetic
// ===========================================================================

TEST(ExactReal, RationalArithmeticIsExact) {
  auto table = SymbolTable::create();
  ExactReal third(table, make_rational(1, 3));
  ExactReal sixth(table, make_rational(1, 6));
  ExactReal half(table, make_rational(1, 2));
  EXPECT_EQ(third + sixth, half);
  EXPECT_EQ(half - third, sixth);
  EXPECT_EQ(third * mpq_class(3), ExactReal(table, 1));
  // The float detour would miss this: 0.1 + 0.2 != 0.3 in doubles.
  ExactReal tenth(table, make_rational(1, 10));
  ExactReal fifth(table, make_rational(1, 5));
  EXPECT_EQ(tenth + fifth, ExactReal(table, make_rational(3, 10)));
}

TEST(ExactReal, SymbolCoordinatesStaysSeparate) {
  auto table = SymbolTable::create();
  table->add("alpha", 0.66666666666666663);
  ExactReal a = ExactReal::symbol(table, "alpha");
  ExactReal x = a * mpq_class(2) + ExactReal(table, make_rational(1, 3));
  EXPECT_EQ(x.coefficient(0), make_rational(1, 3));
  EXPECT_EQ(x.coefficient(1), mpq_class(2));
  EXPECT_FALSE(x.is_rational());
  EXPECT_NEAR(x.value(), 2.0 * 0.66666666666666663 + 1.0 / 3.0, 1e-15);
  // Subtracting the symbolic part trims back to a plain rational.
  ExactReal y = x - a * mpq_class(2);
  EXPECT_TRUE(y.is_rational());
  EXPECT_EQ(y.rational_part(), make_rational(1, 3));
}

TEST(ExactReal, ZeroHandling) {
  auto table = SymbolTable::create();
  ExactReal z(table);
  EXPECT_TRUE(z.is_zero());
  EXPECT_EQ(z.to_string(), "0");
  ExactReal one(table, 1);
  EXPECT_TRUE((one - one).is_zero());
  EXPECT_EQ(one - one, z);
}

TEST(ExactReal, MixingRegistriesIsRejected) {
  auto t1 = SymbolTable::create();
  auto t2 = SymbolTable::create();
  ExactReal a(t1, 1);
  ExactReal b(t2, 1);
  EXPECT_EQ(thrown_code([&] { (void)(a + b); }), errc::basis_mismatch);
  EXPECT_EQ(thrown_code([&] { (void)(a == b); }), errc::basis_mismatch);
}

TEST(ExactReal, ToStringFormats) {
  auto table = SymbolTable::create();
  table->add("alpha", 0.66666666666666663);
  ExactReal a = ExactReal::symbol(table, "alpha");
  EXPECT_EQ(a.to_string(), "alpha");
  EXPECT_EQ((a * mpq_class(-1)).to_string(), "-alpha");
  EXPECT_EQ((a * make_rational(3, 2)).to_string(), "3/2*alpha");
  ExactReal combo = ExactReal(table, make_rational(1, 3)) - a * mpq_class(2);
  EXPECT_EQ(combo.to_string(), "1/3 - 2*alpha");
}

// ===========================================================================
// Literal parsing
// ===========================================================================

TEST(ParseExact, AcceptsLinearCombinations) {
  auto table = SymbolTable::create();
  table->add("alpha", 0.66666666666666663);
  table->add("beta", 1.41421356237309515);

  EXPECT_EQ(parse_exact(table, "3/2"), ExactReal(table, make_rational(3, 2)));
  EXPECT_EQ(parse_exact(table, "alpha"), ExactReal::symbol(table, "alpha"));
  EXPECT_EQ(parse_exact(table, "-2*alpha + 1/3"),
            ExactReal(table, make_rational(1, 3)) -
                ExactReal::symbol(table, "alpha") * mpq_class(2));
  EXPECT_EQ(parse_exact(table, "alpha - beta"),
            ExactReal::symbol(table, "alpha") -
                ExactReal::symbol(table, "beta"));
  EXPECT_EQ(parse_exact(table, " -1/2 "),
            ExactReal(table, make_rational(-1, 2)));
}

TEST(ParseExact, RejectsMalformedLiterals) {
  auto table = SymbolTable::create();
  table->add("alpha", 0.66666666666666663);
  EXPECT_EQ(thrown_code([&] { parse_exact(table, ""); }), errc::parse_error);
  EXPECT_EQ(thrown_code([&] { parse_exact(table, "  "); }), errc::parse_error);
  EXPECT_EQ(thrown_code([&] { parse_exact(table, "+alpha"); }),
            errc::parse_error);
  EXPECT_EQ(thrown_code([&] { parse_exact(table, "alpha +"); }),
            errc::parse_error);
  EXPECT_EQ(thrown_code([&] { parse_exact(table, "alpha beta"); }),
            errc::parse_error);
  EXPECT_EQ(thrown_code([&] { parse_exact(table, "gamma"); }),
            errc::invalid_argument);
  EXPECT_EQ(thrown_code([&] { parse_exact(table, "1/0"); }),
            errc::parse_error);
}

TEST(ParseRational, Basics) {
  EXPECT_EQ(parse_rational("7"), mpq_class(7));
  EXPECT_EQ(parse_rational("-3/9"), make_rational(-1, 3));
  EXPECT_EQ(thrown_code([] { parse_rational("x"); }), errc::parse_error);
}

// ===========================================================================
// Snapping
// ===========================================================================

TEST(Snap, DeclaredTargetsWinIncludingMultiplesAndSigns) {
  auto table = SymbolTable::create();
  table->add("area", 3.0);
  SnappingPolicy policy{table, 1e-5,
                        {ExactReal::symbol(table, "area")}, 8, 48};

  SnapResult one = snap(policy, 3.0000004);
  EXPECT_FALSE(one.fresh);
  EXPECT_EQ(one.value, ExactReal::symbol(table, "area"));

  SnapResult minus_five = snap(policy, -15.0000002);
  EXPECT_EQ(minus_five.value,
            ExactReal::symbol(table, "area") * mpq_class(-5));

  // Beyond the multiple limit the target no longer matches; 27 = 9*area
  // falls through to the rational grid instead.
  SnapResult nine = snap(policy, 27.0);
  EXPECT_EQ(nine.value, ExactReal(table, 27));
}

TEST(Snap, ZeroThenRationalGridThenFresh) {
  auto table = SymbolTable::create();
  SnappingPolicy policy{table, 1e-5, {}, 8, 48};

  EXPECT_TRUE(snap(policy, 3e-6).value.is_zero());

  SnapResult two_thirds = snap(policy, 0.66666666666666663);
  EXPECT_FALSE(two_thirds.fresh);
  EXPECT_EQ(two_thirds.value, ExactReal(table, make_rational(2, 3)));

  SnapResult half = snap(policy, 0.50000049);
  EXPECT_EQ(half.value, ExactReal(table, make_rational(1, 2)));

  SnapResult stray = snap(policy, 0.57721566490153287);
  EXPECT_TRUE(stray.fresh);
  EXPECT_FALSE(stray.warning.empty());
  EXPECT_EQ(stray.value, ExactReal::symbol(table, "num_0"));
  EXPECT_NE(stray.warning.find("num_0"), std::string::npos);
}

TEST(Snap, DenominatorZeroDisablesTheRationalGrid) {
  auto table = SymbolTable::create();
  SnappingPolicy policy{table, 1e-5, {}, 8, 0};
  SnapResult r = snap(policy, 0.5);
  EXPECT_TRUE(r.fresh);
}
