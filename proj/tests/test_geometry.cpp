// Model spaces: chart vectors, two-form evaluation, quotient structure,
// winding data, and the pointwise symmetries.

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "prequant/geometry.hpp"

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

ModelSpacePtr unit_torus() {
  FlatTorus t;
  t.basis = {{{mpq_class(1), mpq_class(0)}, {mpq_class(0), mpq_class(1)}}};
  return ModelSpace::make(t);
}

ModelSpacePtr skew_torus() {
  // basis (2, 0), (1/2, 3/2): covolume 3
  FlatTorus t;
  t.basis = {{{mpq_class(2), mpq_class(0)},
              {mpq_class(1, 2), mpq_class(3, 2)}}};
  return ModelSpace::make(t);
}

}  // namespace

// ===========================================================================
// Vectors
// ===========================================================================

TEST(Vec, BasicsAndGuards) {
  Vec a{1.0, 2.0, 3.0};
  Vec b{4.0, -1.0, 0.5};
  EXPECT_EQ(a.size(), 3u);
  EXPECT_DOUBLE_EQ(dot(a, b), 1.0 * 4.0 - 2.0 + 1.5);
  EXPECT_DOUBLE_EQ(norm(Vec{3.0, 4.0}), 5.0);
  Vec s = 2.0 * a - b;
  EXPECT_DOUBLE_EQ(s[0], -2.0);
  EXPECT_DOUBLE_EQ(s[1], 5.0);
  EXPECT_DOUBLE_EQ(s[2], 5.5);

  Vec c = cross3(Vec{1.0, 0.0, 0.0}, Vec{0.0, 1.0, 0.0});
  EXPECT_DOUBLE_EQ(c[2], 1.0);

  EXPECT_EQ(thrown_code([] {
              Vec too_big{1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0};
              (void)too_big;
            }),
            errc::dimension_mismatch);
  Vec j = join(Vec{1.0, 2.0}, Vec{3.0});
  EXPECT_EQ(j.size(), 3u);
  EXPECT_DOUBLE_EQ(j[2], 3.0);
  Vec sl = slice(j, 1, 2);
  EXPECT_DOUBLE_EQ(sl[0], 2.0);
  EXPECT_DOUBLE_EQ(sl[1], 3.0);
}

// ===========================================================================
// Model construction
// ===========================================================================

TEST(ModelSpace, ConstructionAndValidation) {
  auto torus = unit_torus();
  EXPECT_EQ(torus->dim(), 2u);
  EXPECT_EQ(torus->kind_name(), "FlatTorus");
  EXPECT_FALSE(torus->zero_form());

  FlatTorus degenerate;
  degenerate.basis = {{{mpq_class(1), mpq_class(2)},
                       {mpq_class(2), mpq_class(4)}}};
  EXPECT_EQ(thrown_code([&] { ModelSpace::make(degenerate); }),
            errc::invalid_argument);

  EXPECT_EQ(thrown_code([] { ModelSpace::make(AbstractSurface{1}); }),
            errc::invalid_argument);

  TwoHolesPlane same_holes;
  same_holes.p1 = same_holes.p2 = {0.0, 0.0};
  EXPECT_EQ(thrown_code([&] { ModelSpace::make(same_holes); }),
            errc::invalid_argument);
}

TEST(ModelSpace, ZeroFormDetection) {
  PuncturedPlane flat;
  flat.kind = FormKind::zero;
  EXPECT_TRUE(ModelSpace::make(flat)->zero_form());

  PuncturedPlane off;
  off.kind = FormKind::uniform;
  off.uniform_b = 0.0;
  EXPECT_TRUE(ModelSpace::make(off)->zero_form());

  PuncturedPlane on;
  on.kind = FormKind::uniform;
  on.uniform_b = 0.5;
  EXPECT_FALSE(ModelSpace::make(on)->zero_form());

  EXPECT_TRUE(ModelSpace::make(TwoSphere{0.0})->zero_form());
  EXPECT_FALSE(ModelSpace::make(TwoSphere{2.0})->zero_form());

  // Product form vanishes only when both factors vanish.
  auto zp = ModelSpace::make(flat);
  auto sphere = ModelSpace::make(TwoSphere{1.0});
  EXPECT_FALSE(ModelSpace::make(ProductSpace{zp, sphere})->zero_form());
  EXPECT_TRUE(ModelSpace::make(ProductSpace{zp, zp})->zero_form());
}

TEST(ModelSpace, ProductDimensionCap) {
  auto s = ModelSpace::make(TwoSphere{1.0});                      // dim 3
  auto ss = ModelSpace::make(ProductSpace{s, s});                 // dim 6
  EXPECT_EQ(ss->dim(), 6u);
  EXPECT_EQ(thrown_code([&] { ModelSpace::make(ProductSpace{ss, s}); }),
            errc::dimension_mismatch);
}

// ===========================================================================
// Two-form evaluation
// ===========================================================================

TEST(TwoForm, TorusIsTheStandardAreaForm) {
  auto t = unit_torus();
  EXPECT_DOUBLE_EQ(
      eval_two_form(*t, Vec{0.3, 0.7}, Vec{1.0, 0.0}, Vec{0.0, 1.0}), 1.0);
  // Cover coordinates carry the standard form regardless of the lattice.
  auto sk = skew_torus();
  EXPECT_DOUBLE_EQ(
      eval_two_form(*sk, Vec{5.0, -2.0}, Vec{2.0, 1.0}, Vec{0.5, 1.0}), 1.5);
}

TEST(TwoForm, PuncturedPlaneKinds) {
  PuncturedPlane mag;
  mag.kind = FormKind::magnetic;
  auto m = ModelSpace::make(mag);
  // At (2, 0): r^2 = 4, unit tangents give 1/4.
  EXPECT_DOUBLE_EQ(
      eval_two_form(*m, Vec{2.0, 0.0}, Vec{1.0, 0.0}, Vec{0.0, 1.0}), 0.25);
  EXPECT_EQ(thrown_code([&] {
              eval_two_form(*m, Vec{0.0, 0.0}, Vec{1.0, 0.0}, Vec{0.0, 1.0});
            }),
            errc::removed_point);

  PuncturedPlane uni;
  uni.kind = FormKind::uniform;
  uni.uniform_b = 3.0;
  auto u = ModelSpace::make(uni);
  EXPECT_DOUBLE_EQ(
      eval_two_form(*u, Vec{2.0, 5.0}, Vec{1.0, 0.0}, Vec{0.0, 2.0}), 6.0);

  PuncturedPlane zero;
  zero.kind = FormKind::zero;
  auto z = ModelSpace::make(zero);
  EXPECT_DOUBLE_EQ(
      eval_two_form(*z, Vec{2.0, 5.0}, Vec{1.0, 0.0}, Vec{0.0, 2.0}), 0.0);
}

TEST(TwoForm, SphereNormalizationAndGuards) {
  auto s = ModelSpace::make(TwoSphere{2.0});
  // At the north pole with the standard tangent frame the integrand is the
  // scaled round form: scale/(4 pi).
  EXPECT_DOUBLE_EQ(eval_two_form(*s, Vec{0.0, 0.0, 1.0}, Vec{1.0, 0.0, 0.0},
                                 Vec{0.0, 1.0, 0.0}),
                   2.0 / (4.0 * M_PI));
  EXPECT_EQ(thrown_code([&] {
              eval_two_form(*s, Vec{0.0, 0.0, 2.0}, Vec{1.0, 0.0, 0.0},
                            Vec{0.0, 1.0, 0.0});
            }),
            errc::invalid_argument);
  EXPECT_EQ(thrown_code([&] {
              eval_two_form(*s, Vec{0.0, 0.0, 1.0}, Vec{1.0, 0.0, 0.5},
                            Vec{0.0, 1.0, 0.0});
            }),
            errc::invalid_argument);
}

TEST(TwoForm, TwoHolesMagneticSumsInverseSquares) {
  TwoHolesPlane h;
  h.kind = FormKind::magnetic;
  auto m = ModelSpace::make(h);
  // At the origin both holes sit at distance 1.
  EXPECT_DOUBLE_EQ(
      eval_two_form(*m, Vec{0.0, 0.0}, Vec{1.0, 0.0}, Vec{0.0, 1.0}), 2.0);
  EXPECT_EQ(thrown_code([&] {
              eval_two_form(*m, Vec{1.0, 0.0}, Vec{1.0, 0.0}, Vec{0.0, 1.0});
            }),
            errc::removed_point);
}

TEST(TwoForm, AbstractSurfaceHasNoPointwiseForm) {
  auto a = ModelSpace::make(AbstractSurface{2});
  EXPECT_EQ(thrown_code([&] { eval_two_form(*a, Vec{}, Vec{}, Vec{}); }),
            errc::unsupported_model);
}

TEST(TwoForm, ProductAddsFactorValues) {
  PuncturedPlane uni;
  uni.kind = FormKind::uniform;
  uni.uniform_b = 1.0;
  auto left = ModelSpace::make(uni);
  auto right = ModelSpace::make(TwoSphere{4.0 * M_PI});
  auto prod = ModelSpace::make(ProductSpace{left, right});
  Vec p{1.0, 0.0, /* sphere */ 0.0, 0.0, 1.0};
  Vec u{1.0, 0.0, 1.0, 0.0, 0.0};
  Vec v{0.0, 1.0, 0.0, 1.0, 0.0};
  // 1 (uniform cross) + 1 (north-pole round form scaled to 4 pi).
  EXPECT_DOUBLE_EQ(eval_two_form(*prod, p, u, v), 2.0);
}

TEST(TwoForm, AntisymmetryOnRandomInputs) {
  std::mt19937 rng(31u);
  std::uniform_real_distribution<double> coord(-2.0, 2.0);
  PuncturedPlane mag;
  auto m = ModelSpace::make(mag);
  for (int i = 0; i < 50; ++i) {
    Vec p{coord(rng) + 3.0, coord(rng)};  // keep away from the puncture
    Vec u{coord(rng), coord(rng)};
    Vec v{coord(rng), coord(rng)};
    EXPECT_DOUBLE_EQ(eval_two_form(*m, p, u, v), -eval_two_form(*m, p, v, u));
    EXPECT_DOUBLE_EQ(eval_two_form(*m, p, u, u), 0.0);
  }
}

// ===========================================================================
// Quotient structure
// ===========================================================================

TEST(Quotient, ProjectIntoFundamentalDomain) {
  auto t = unit_torus();
  Vec q = project(*t, Vec{2.25, -0.5});
  EXPECT_NEAR(q[0], 0.25, 1e-12);
  EXPECT_NEAR(q[1], 0.5, 1e-12);

  auto sk = skew_torus();
  Vec r = project(*sk, Vec{2.5, 1.5});  // = (2,0) + (1/2,3/2) exactly
  EXPECT_NEAR(r[0], 0.0, 1e-12);
  EXPECT_NEAR(r[1], 0.0, 1e-12);

  auto sphere = ModelSpace::make(TwoSphere{1.0});
  EXPECT_EQ(thrown_code([&] { project(*sphere, Vec{0.0, 0.0, 1.0}); }),
            errc::unsupported_model);
}

TEST(Quotient, CanonicalizeNormalizesSpherePoints) {
  auto s = ModelSpace::make(TwoSphere{1.0});
  Vec p{0.0, 3.0, 4.0};
  canonicalize_point(*s, p);
  EXPECT_NEAR(norm(p), 1.0, 1e-15);
  EXPECT_NEAR(p[1], 0.6, 1e-15);
}

TEST(Quotient, DistanceWrapsOnTheTorus) {
  auto t = unit_torus();
  EXPECT_NEAR(quotient_distance(*t, Vec{0.9, 0.0}, Vec{0.0, 0.0}), 0.1,
              1e-12);
  EXPECT_NEAR(quotient_distance(*t, Vec{3.0, -2.0}, Vec{0.0, 0.0}), 0.0,
              1e-12);
  auto sk = skew_torus();
  EXPECT_NEAR(quotient_distance(*sk, Vec{2.5, 1.5}, Vec{0.0, 0.0}), 0.0,
              1e-12);

  auto s = ModelSpace::make(TwoSphere{1.0});
  auto prod = ModelSpace::make(ProductSpace{t, s});
  double d = quotient_distance(*prod, Vec{1.0, 0.3, 0.0, 0.0, 1.0},
                               Vec{0.0, 0.0, 0.0, 0.0, 1.0});
  EXPECT_NEAR(d, 0.3, 1e-12);  // torus part wraps, sphere part matches
}

TEST(Quotient, LiftDisplacementReadsWindings) {
  auto t = unit_torus();
  std::vector<Vec> pts;
  const int n = 64;
  for (int i = 0; i <= n; ++i) {
    const double u = static_cast<double>(i) / n;
    pts.push_back(Vec{2.0 * u, 3.0 * u});
  }
  EXPECT_EQ(lift_displacement(*t, pts), (std::vector<long>{2, 3}));

  PuncturedPlane pp;
  auto m = ModelSpace::make(pp);
  std::vector<Vec> circle;
  for (int i = 0; i <= n; ++i) {
    const double a = -2.0 * (2.0 * M_PI) * i / n;  // two clockwise turns
    circle.push_back(Vec{std::cos(a), std::sin(a)});
  }
  EXPECT_EQ(lift_displacement(*m, circle), (std::vector<long>{-2}));

  TwoHolesPlane th;
  auto h = ModelSpace::make(th);
  std::vector<Vec> about_first;
  for (int i = 0; i <= n; ++i) {
    const double a = 2.0 * M_PI * i / n;
    about_first.push_back(
        Vec{th.p1[0] + 0.5 * std::cos(a), th.p1[1] + 0.5 * std::sin(a)});
  }
  EXPECT_EQ(lift_displacement(*h, about_first), (std::vector<long>{1, 0}));

  // Open paths are rejected.
  std::vector<Vec> open{Vec{0.1, 0.2}, Vec{0.3, 0.4}};
  EXPECT_EQ(thrown_code([&] { lift_displacement(*t, open); }),
            errc::not_closed);
  auto abs2 = ModelSpace::make(AbstractSurface{2});
  std::vector<Vec> stubs{Vec{}, Vec{}};
  EXPECT_EQ(thrown_code([&] { lift_displacement(*abs2, stubs); }),
            errc::unsupported_model);
}

// ===========================================================================
// Symmetries
// ===========================================================================

TEST(Symmetry, TranslationRotationAndProduct) {
  auto t = unit_torus();
  Symmetry shift{TorusTranslation{0.25, -0.5}};
  Vec moved = apply_symmetry(*t, shift, Vec{0.5, 0.5});
  EXPECT_DOUBLE_EQ(moved[0], 0.75);
  EXPECT_DOUBLE_EQ(moved[1], 0.0);

  PuncturedPlane pp;
  auto m = ModelSpace::make(pp);
  Symmetry quarter{PlaneRotation{M_PI / 2.0}};
  Vec rotated = apply_symmetry(*m, quarter, Vec{1.0, 0.0});
  EXPECT_NEAR(rotated[0], 0.0, 1e-15);
  EXPECT_NEAR(rotated[1], 1.0, 1e-15);

  auto s = ModelSpace::make(TwoSphere{1.0});
  Symmetry roll{SphereRotation{{0.0, 0.0, 1.0}, M_PI}};
  Vec p = apply_symmetry(*s, roll, Vec{1.0, 0.0, 0.0});
  EXPECT_NEAR(p[0], -1.0, 1e-15);
  EXPECT_NEAR(norm(p), 1.0, 1e-15);

  auto prod = ModelSpace::make(ProductSpace{t, s});
  Symmetry both{ProductSymmetry{std::make_shared<const Symmetry>(shift),
                                nullptr}};
  Vec q = apply_symmetry(*prod, both, Vec{0.5, 0.5, 1.0, 0.0, 0.0});
  EXPECT_DOUBLE_EQ(q[0], 0.75);
  EXPECT_DOUBLE_EQ(q[4], 0.0);  // right factor untouched

  EXPECT_EQ(thrown_code([&] { apply_symmetry(*m, shift, Vec{1.0, 0.0}); }),
            errc::unsupported_symmetry);
  EXPECT_EQ(thrown_code([&] {
              apply_symmetry(*s, Symmetry{SphereRotation{{0, 0, 0}, 1.0}},
                             Vec{1.0, 0.0, 0.0});
            }),
            errc::unsupported_symmetry);
}

TEST(Symmetry, RotationsPreserveTheMagneticForm) {
  PuncturedPlane mag;
  auto m = ModelSpace::make(mag);
  std::mt19937 rng(37u);
  std::uniform_real_distribution<double> coord(-1.5, 1.5);
  Symmetry rot{PlaneRotation{0.73}};
  const double c = std::cos(0.73), s = std::sin(0.73);
  for (int i = 0; i < 25; ++i) {
    Vec p{coord(rng) + 2.5, coord(rng)};
    Vec u{coord(rng), coord(rng)};
    Vec v{coord(rng), coord(rng)};
    Vec gp = apply_symmetry(*m, rot, p);
    Vec gu{c * u[0] - s * u[1], s * u[0] + c * u[1]};
    Vec gv{c * v[0] - s * v[1], s * v[0] + c * v[1]};
    EXPECT_NEAR(eval_two_form(*m, gp, gu, gv), eval_two_form(*m, p, u, v),
                1e-12);
  }
}
