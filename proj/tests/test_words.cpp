// Presentations, word parsing and formatting, normal forms, and the Dehn
// reduction used for surface groups.

#include <gtest/gtest.h>

#include <vector>

#include "prequant/words.hpp"

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
// Words
// ===========================================================================

TEST(Words, FreeReduceCancelsAdjacentInverses) {
  Word w{{0, 1}, {1, 1}, {1, -1}, {0, -1}, {0, 1}};
  Word r = free_reduce(w);
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r[0].gen, 0u);
  EXPECT_EQ(r[0].exp, 1);
  // Cancellation cascades through the middle.
  Word nested{{0, 1}, {1, 1}, {2, 1}, {2, -1}, {1, -1}, {0, -1}};
  EXPECT_TRUE(free_reduce(nested).empty());
}

TEST(Words, InverseWordReversesAndFlips) {
  Word w{{0, 1}, {1, -1}};
  Word inv = inverse_word(w);
  ASSERT_EQ(inv.size(), 2u);
  EXPECT_EQ(inv[0].gen, 1u);
  EXPECT_EQ(inv[0].exp, 1);
  EXPECT_EQ(inv[1].gen, 0u);
  EXPECT_EQ(inv[1].exp, -1);
  Word prod = w;
  prod.insert(prod.end(), inv.begin(), inv.end());
  EXPECT_TRUE(free_reduce(prod).empty());
}

// ===========================================================================
// Presentations
// ===========================================================================

TEST(Presentation, FactoryShapes) {
  Presentation t = Presentation::trivial();
  EXPECT_EQ(t.kind(), GroupKind::trivial);
  EXPECT_EQ(t.rank(), 0u);

  Presentation ab = Presentation::free_abelian({"A", "B"});
  EXPECT_EQ(ab.kind(), GroupKind::free_abelian);
  EXPECT_EQ(ab.rank(), 2u);
  ASSERT_EQ(ab.relations().size(), 1u);  // one commutator per pair
  EXPECT_EQ(ab.format_word(ab.relations()[0]), "A B A^-1 B^-1");

  Presentation fr = Presentation::free_group({"c", "d"});
  EXPECT_EQ(fr.kind(), GroupKind::free_group);
  EXPECT_TRUE(fr.relations().empty());

  Presentation sf = Presentation::surface(2);
  EXPECT_EQ(sf.kind(), GroupKind::surface);
  EXPECT_EQ(sf.genus(), 2u);
  EXPECT_EQ(sf.rank(), 4u);
  EXPECT_EQ(sf.generators(),
            (std::vector<std::string>{"a1", "b1", "a2", "b2"}));
  ASSERT_EQ(sf.relations().size(), 1u);
  EXPECT_EQ(sf.format_word(sf.relations()[0]),
            "a1 b1 a1^-1 b1^-1 a2 b2 a2^-1 b2^-1");

  EXPECT_EQ(thrown_code([] { Presentation::free_abelian({}); }),
            errc::invalid_argument);
  EXPECT_EQ(thrown_code([] { Presentation::surface(1); }),
            errc::invalid_argument);
  EXPECT_EQ(thrown_code([] { Presentation::surface(2, {"x", "y"}); }),
            errc::invalid_argument);
}

TEST(Presentation, ParseAndFormatRoundTrip) {
  Presentation p = Presentation::free_abelian({"A", "B"});
  Word w = p.parse_word("A B^-1 B^2");
  ASSERT_EQ(w.size(), 4u);
  EXPECT_EQ(p.format_word(free_reduce(w)), "A B");
  EXPECT_EQ(p.format_word(p.parse_word("A^3")), "A^3");
  EXPECT_EQ(p.format_word({}), "1");
  EXPECT_EQ(p.format_word(p.parse_word("")), "1");

  EXPECT_EQ(thrown_code([&] { p.parse_word("A^x"); }), errc::parse_error);
  EXPECT_EQ(thrown_code([&] { p.parse_word("C"); }), errc::schema_error);
  EXPECT_EQ(thrown_code([&] { p.generator_index("zz"); }),
            errc::schema_error);
}

TEST(Presentation, AbelianizationInvariants) {
  long free_rank = -1;
  std::vector<mpz_class> torsion;

  Presentation ab = Presentation::free_abelian({"A", "B"});
  ab.abelianization(free_rank, torsion);
  EXPECT_EQ(free_rank, 2);  // commutators abelianize to zero rows
  EXPECT_TRUE(torsion.empty());

  Presentation fr = Presentation::free_group({"c", "d"});
  fr.abelianization(free_rank, torsion);
  EXPECT_EQ(free_rank, 2);
  EXPECT_TRUE(torsion.empty());

  Presentation sf = Presentation::surface(3);
  sf.abelianization(free_rank, torsion);
  EXPECT_EQ(free_rank, 6);
  EXPECT_TRUE(torsion.empty());

  Presentation t = Presentation::trivial();
  t.abelianization(free_rank, torsion);
  EXPECT_EQ(free_rank, 0);
  EXPECT_TRUE(torsion.empty());
}

// ===========================================================================
// Group elements
// ===========================================================================

TEST(GroupElement, FreeAbelianNormalForm) {
  Presentation p = Presentation::free_abelian({"A", "B"});
  GroupElement x = GroupElement::from_word(p, p.parse_word("A B A B^-1"));
  EXPECT_EQ(x.exponents(), (std::vector<long>{2, 0}));
  EXPECT_EQ(x.key(), "A^2");
  EXPECT_EQ(x, GroupElement::from_exponents(p, {2, 0}));
  EXPECT_EQ(x * x.inverse(), GroupElement::identity(p));
  EXPECT_TRUE((x * x.inverse()).is_identity());
  EXPECT_EQ((x * x).exponents(), (std::vector<long>{4, 0}));
  EXPECT_EQ(x.abelianized(), (std::vector<long>{2, 0}));
  EXPECT_EQ(GroupElement::identity(p).key(), "1");
}

TEST(GroupElement, FreeGroupNormalForm) {
  Presentation p = Presentation::free_group({"c", "d"});
  GroupElement x = GroupElement::from_word(p, p.parse_word("c d d^-1 c"));
  EXPECT_EQ(x.key(), "c^2");
  GroupElement y = GroupElement::from_word(p, p.parse_word("c d"));
  // Free groups are not abelian: cd != dc.
  EXPECT_NE(y, GroupElement::from_word(p, p.parse_word("d c")));
  EXPECT_EQ((y * y.inverse()).key(), "1");
  EXPECT_EQ(y.inverse().key(), "d^-1 c^-1");
  EXPECT_EQ(y.abelianized(), (std::vector<long>{1, 1}));
}

TEST(GroupElement, TrivialGroupOnlyAcceptsRelations) {
  Presentation p = Presentation::trivial();
  EXPECT_TRUE(GroupElement::from_word(p, {}).is_identity());
  EXPECT_EQ(thrown_code([&] { GroupElement::from_word(p, {{0, 1}}); }),
            errc::invalid_argument);
}

TEST(GroupElement, MixedPresentationsAreRejected) {
  Presentation p1 = Presentation::free_abelian({"A", "B"});
  Presentation p2 = Presentation::free_abelian({"A", "B"});
  GroupElement a = GroupElement::identity(p1);
  GroupElement b = GroupElement::identity(p2);
  EXPECT_EQ(thrown_code([&] { (void)(a * b); }), errc::invalid_argument);
  EXPECT_EQ(thrown_code([&] { (void)(a == b); }), errc::invalid_argument);
}

TEST(GroupElement, LettersMustBeSingleSteps) {
  Presentation p = Presentation::free_group({"c"});
  EXPECT_EQ(thrown_code([&] { GroupElement::from_word(p, {{0, 2}}); }),
            errc::invalid_argument);
  EXPECT_EQ(thrown_code([&] { GroupElement::from_word(p, {{5, 1}}); }),
            errc::invalid_argument);
}

// ===========================================================================
// Dehn reduction in surface groups
// ===========================================================================

TEST(DehnReduction, RelatorAndItsConjugatesVanish) {
  Presentation p = Presentation::surface(2);
  const Word& rel = p.relations()[0];
  EXPECT_TRUE(GroupElement::from_word(p, rel).is_identity());

  // Cyclic rotation of the relator.
  Word rot(rel.begin() + 3, rel.end());
  rot.insert(rot.end(), rel.begin(), rel.begin() + 3);
  EXPECT_TRUE(GroupElement::from_word(p, rot).is_identity());

  // Conjugate by a word and square the relator.
  Word conj = p.parse_word("a2 b1^-1");
  Word w = conj;
  w.insert(w.end(), rel.begin(), rel.end());
  Word conj_inv = inverse_word(conj);
  w.insert(w.end(), conj_inv.begin(), conj_inv.end());
  EXPECT_TRUE(GroupElement::from_word(p, w).is_identity());

  Word squared = rel;
  squared.insert(squared.end(), rel.begin(), rel.end());
  EXPECT_TRUE(GroupElement::from_word(p, squared).is_identity());
}

TEST(DehnReduction, LongPrefixBecomesInverseOfComplement) {
  // A strict majority of the relator letters rewrites to the inverse of the
  // complementary piece: for the genus-2 relator of length 8 the 5-letter
  // prefix must come back as a 3-letter word.
  Presentation p = Presentation::surface(2);
  const Word& rel = p.relations()[0];
  Word prefix(rel.begin(), rel.begin() + 5);
  GroupElement g = GroupElement::from_word(p, prefix);
  Word expected = inverse_word(Word(rel.begin() + 5, rel.end()));
  EXPECT_EQ(g.word(), expected);
  EXPECT_EQ(g.key(), p.format_word(expected));
}

TEST(DehnReduction, ShortWordsAreLeftAlone) {
  Presentation p = Presentation::surface(2);
  const Word& rel = p.relations()[0];
  // Exactly half the relator is not reducible; the commutator of the first
  // handle pair stays a 4-letter word.
  Word half(rel.begin(), rel.begin() + 4);
  GroupElement g = GroupElement::from_word(p, half);
  EXPECT_EQ(g.word(), half);
  EXPECT_EQ(g.key(), "a1 b1 a1^-1 b1^-1");
}
