// Scenario analysis: runs every structural and numerical consistency check
// a scenario supports, and assembles the machine-readable report. Checks
// come in two flavours. Exact checks compare snapped values in the symbol
// basis and pass only on literal equality; their residual is 0 or 1 against
// tolerance 0. Float checks compare raw (pre-snap) quadrature values so
// that a spurious snap can never turn a wrong number into a right one.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "prequant/cocycle.hpp"
#include "prequant/groupoid.hpp"
#include "prequant/report.hpp"
#include "prequant/scenario.hpp"

namespace prequant {
namespace detail {

inline void add_check(AnalysisReport& rep, std::string name, double residual,
                      double tolerance, std::string what) {
  CheckResult c;
  c.name = std::move(name);
  c.residual = residual;
  c.tolerance = tolerance;
  c.pass = residual <= tolerance;
  c.detail = std::move(what);
  rep.checks.push_back(std::move(c));
}

inline void add_exact_check(AnalysisReport& rep, std::string name, bool ok,
                            std::string what) {
  add_check(rep, std::move(name), ok ? 0.0 : 1.0, 0.0, std::move(what));
}

/// Distance of a measured value to the closer of +magnitude / -magnitude.
/// Used where the theory pins a magnitude but the sweep orientation is a
/// convention.
inline double sign_residual(double measured, double magnitude) {
  return std::min(std::abs(measured - magnitude),
                  std::abs(measured + magnitude));
}

inline std::string fmt(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

inline std::vector<GroupElement> signed_generators(const Presentation& p) {
  std::vector<GroupElement> out;
  for (size_t g = 0; g < p.rank(); ++g) {
    GroupElement e = GroupElement::from_word(p, Word{Letter{g, 1}});
    out.push_back(e);
    out.push_back(e.inverse());
  }
  return out;
}

// ---------------------------------------------------------------------------
// path construction helpers

inline Vec torus_displacement(const FlatTorus& t, long m, long n) {
  const double dm = static_cast<double>(m), dn = static_cast<double>(n);
  return Vec{t.bf[0][0] * dm + t.bf[0][1] * dn,
             t.bf[1][0] * dm + t.bf[1][1] * dn};
}

/// Closed torus loop in class (m, n) with a sine wobble that vanishes at
/// the endpoints, sampled in the covering chart from the basepoint.
inline PathSample torus_loop(const Scenario& s, long m, long n,
                             const std::array<double, 4>& wobble) {
  const auto* t = s.space->as<FlatTorus>();
  const Vec d = torus_displacement(*t, m, n);
  const size_t segs = s.grid_n;
  std::vector<Vec> pts;
  pts.reserve(segs + 1);
  for (size_t k = 0; k <= segs; ++k) {
    const double u = static_cast<double>(k) / static_cast<double>(segs);
    const double wx = wobble[0] * std::sin(2.0 * M_PI * u) +
                      wobble[1] * std::sin(4.0 * M_PI * u);
    const double wy = wobble[2] * std::sin(2.0 * M_PI * u) +
                      wobble[3] * std::sin(6.0 * M_PI * u);
    pts.push_back(Vec{s.x0[0] + u * d[0] + wx, s.x0[1] + u * d[1] + wy});
  }
  pts.back() = Vec{s.x0[0] + d[0], s.x0[1] + d[1]};
  return PathSample::make(s.space, std::move(pts), true);
}

/// Piecewise straight path through the given chart corners. Kinks land on
/// sample nodes so the quadrature stays exact on flat data.
inline PathSample polyline(const ModelSpacePtr& space,
                           const std::vector<Vec>& corners, size_t segments,
                           bool closed) {
  const size_t edges = corners.size() - 1;
  const size_t per = std::max<size_t>(1, segments / edges);
  std::vector<Vec> pts;
  pts.reserve(edges * per + 1);
  for (size_t e = 0; e < edges; ++e)
    for (size_t k = 0; k < per; ++k) {
      const double u = static_cast<double>(k) / static_cast<double>(per);
      pts.push_back((1.0 - u) * corners[e] + u * corners[e + 1]);
    }
  pts.push_back(corners.back());
  return PathSample::make(space, std::move(pts), closed);
}

/// Circle of winding `m` around the origin with a radial wobble, starting
/// and ending at (r0, 0).
inline PathSample wobbled_circle(const Scenario& s, long m, double r0,
                                 double amplitude) {
  const size_t segs = s.grid_n;
  std::vector<Vec> pts;
  pts.reserve(segs + 1);
  for (size_t k = 0; k <= segs; ++k) {
    const double u = static_cast<double>(k) / static_cast<double>(segs);
    const double r = r0 * (1.0 + amplitude * std::sin(2.0 * M_PI * u));
    const double th = 2.0 * M_PI * static_cast<double>(m) * u;
    pts.push_back(Vec{r * std::cos(th), r * std::sin(th)});
  }
  pts.back() = Vec{r0, 0.0};
  return PathSample::make(s.space, std::move(pts), true);
}

// ---------------------------------------------------------------------------
// structural predicates deciding which check families apply

inline bool is_torus_scenario(const Scenario& s) {
  return s.space->as<FlatTorus>() != nullptr && !s.space->zero_form() &&
         s.presentation->kind() == GroupKind::free_abelian &&
         s.presentation->rank() == 2;
}

inline bool is_magnetic_punctured(const Scenario& s) {
  const auto* pp = s.space->as<PuncturedPlane>();
  return pp != nullptr && pp->kind == FormKind::magnetic &&
         s.presentation->kind() == GroupKind::free_abelian &&
         s.presentation->rank() == 1;
}

inline bool is_flat_twisted(const Scenario& s) {
  return s.space->zero_form() && s.twist.has_value();
}

inline bool is_sphere_product(const Scenario& s) {
  const auto* pr = s.space->as<ProductSpace>();
  return pr != nullptr && pr->left->as<TwoSphere>() != nullptr &&
         pr->right->as<TwoSphere>() != nullptr;
}

inline bool is_declared_surface(const Scenario& s) {
  return s.cocycle->declared() && s.presentation->kind() == GroupKind::surface;
}

// ---------------------------------------------------------------------------
// generic checks: meaningful for every scenario

inline void check_periods(const Scenario& s, AnalysisReport& rep) {
  bool ok = true;
  for (const auto& [w, v] : s.relation_values)
    if (!s.p_omega->contains(v.representative())) ok = false;
  add_exact_check(rep, "relation-values-in-total-periods", ok,
                  std::to_string(s.relation_values.size()) +
                      " accumulated relation value(s) against " +
                      s.p_omega->describe());
  bool toric_ok = true;
  for (const auto& g : s.p_tor->generators())
    if (!s.p_omega->contains(g)) toric_ok = false;
  add_exact_check(rep, "toric-periods-inside-total", toric_ok,
                  s.p_tor->describe() + " inside " + s.p_omega->describe());
}

inline void check_cocycle_identity(const Scenario& s, AnalysisReport& rep) {
  const auto gens = signed_generators(*s.presentation);
  if (gens.empty()) return;
  // Declared tables and flat forms cancel exactly; geometric tables carry
  // quadrature error.
  const bool exact = s.cocycle->declared() || s.space->zero_form();
  double worst = 0.0;
  size_t triples = 0;
  for (const auto& i : gens)
    for (const auto& j : gens)
      for (const auto& k : gens) {
        worst = std::max(worst, verify_cocycle_identity(*s.cocycle, i, j, k));
        ++triples;
      }
  add_check(rep, "cocycle-identity", worst, exact ? 0.0 : s.tolerance,
            "tau(i,j) + tau(ij,k) = tau(i,jk) + tau(j,k) over " +
                std::to_string(triples) + " signed generator triples");
}

inline void check_extension_algebra(const Scenario& s, AnalysisReport& rep) {
  const auto gens = signed_generators(*s.presentation);
  if (gens.empty()) return;

  std::mt19937 rng(20260814u);
  std::uniform_int_distribution<size_t> pick(0, gens.size() - 1);
  std::uniform_int_distribution<long> num(-16, 16);
  auto random_element = [&] {
    return ExtensionElement{
        gens[pick(rng)],
        TorusElement(s.p_tor,
                     ExactReal(s.symbols, make_rational(num(rng), 16)))};
  };
  bool assoc = true;
  const int trials = 200;
  for (int t = 0; t < trials && assoc; ++t) {
    ExtensionElement x = random_element(), y = random_element(),
                     z = random_element();
    ExtensionElement l = ext_mul(*s.cocycle, ext_mul(*s.cocycle, x, y), z);
    ExtensionElement r = ext_mul(*s.cocycle, x, ext_mul(*s.cocycle, y, z));
    assoc = l.g == r.g && l.u.equals(r.u);
  }
  add_exact_check(rep, "extension-associativity", assoc,
                  std::to_string(trials) +
                      " random triples with rational fiber offsets");

  TorusElement u0(s.p_tor, ExactReal(s.symbols, make_rational(3, 7)));
  ExtensionElement central{GroupElement::identity(*s.presentation), u0};
  bool commutes = true;
  bool section_ok = true;
  for (const auto& g : gens) {
    ExtensionElement lift{g, TorusElement::zero(s.p_tor)};
    ExtensionElement a = ext_mul(*s.cocycle, central, lift);
    ExtensionElement b = ext_mul(*s.cocycle, lift, central);
    commutes = commutes && a.g == b.g && a.u.equals(b.u);
    ExtensionElement e = ext_mul(*s.cocycle, ext_section(*s.cocycle, g),
                                 ext_section_inverse(*s.cocycle, g));
    section_ok = section_ok && e.g.is_identity() && e.u.is_zero();
  }
  add_exact_check(rep, "central-fiber-commutes", commutes,
                  "(e,u) commutes with every section lift");
  add_exact_check(rep, "section-inverse-cancels", section_ok,
                  "sigma(g) sigma(g)^-1 = (e, 0) for every signed generator");
}

inline void check_wavefunction(const Scenario& s, AnalysisReport& rep) {
  const bool dense = s.p_omega->rank() >= 2;
  const double index = dense ? 0.0 : 1.0;
  TorusCharacter chi = TorusCharacter::make(s, index);
  std::mt19937 rng(424243u);
  std::uniform_int_distribution<long> num(-36, 36);
  double worst = 0.0;
  const int trials = 100;
  for (int t = 0; t < trials; ++t) {
    Morphism a{"p", "q",
               TorusElement(s.p_omega,
                            ExactReal(s.symbols, make_rational(num(rng), 12)))};
    Morphism b{"q", "r",
               TorusElement(s.p_omega,
                            ExactReal(s.symbols, make_rational(num(rng), 12)))};
    Morphism c = compose(s, a, b);
    const std::complex<double> lhs = multiplicative_wavefunction(s, chi, c);
    const std::complex<double> rhs = multiplicative_wavefunction(s, chi, a) *
                                     multiplicative_wavefunction(s, chi, b);
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  add_check(rep, "wavefunction-multiplicative", worst, 1e-9,
            "psi(a b) = psi(a) psi(b) over " + std::to_string(trials) +
                " composable pairs, character index " + fmt(index));
  if (dense) {
    bool threw = false;
    try {
      (void)TorusCharacter::make(s, 1.0);
    } catch (const Error& e) {
      threw = e.code() == errc::incompatible_character;
    }
    add_exact_check(rep, "dense-character-rigidity", threw,
                    "a dense period group admits only the trivial character");
  }
}

// ---------------------------------------------------------------------------
// torus family

inline void run_torus_morphism_checks(const Scenario& s, AnalysisReport& rep) {
  const auto* t = s.space->as<FlatTorus>();
  const Presentation& p = *s.presentation;
  const std::string& base_id = s.marked[0].id;
  const std::string& mid_id = s.marked[1].id;
  const Vec base = s.marked[0].position;
  const Vec mid = s.marked[1].position;
  const size_t n = s.grid_n;
  const Vec dA = torus_displacement(*t, 1, 0);
  const Vec dB = torus_displacement(*t, 0, 1);

  {  // groupoid axioms at the level of snapped phases
    PathSample g1 =
        polyline(s.space, {base, Vec{mid[0], base[1]}, mid}, n, false);
    Morphism m = class_of(s, g1);
    Morphism left_id = compose(s, identity_at(s, base_id), m);
    Morphism right_id = compose(s, m, identity_at(s, mid_id));
    Morphism cancel = compose(s, m, inverse(m));
    add_exact_check(rep, "groupoid-axioms",
                    same_morphism(left_id, m) && same_morphism(right_id, m) &&
                        same_morphism(cancel, identity_at(s, base_id)),
                    "identities and inverses behave on a bent representative");
  }

  {  // composition agrees with concatenation for contractible detours
    PathSample ga =
        polyline(s.space, {base, Vec{mid[0], base[1]}, mid}, n, false);
    PathSample ea = polyline(
        s.space,
        {mid, Vec{mid[0] + 0.5 * dA[0], mid[1] + 0.5 * dA[1]},
         Vec{base[0] + dA[0] + dB[0], base[1] + dA[1] + dB[1]}},
        n, false);
    Morphism comp = compose(s, class_of(s, ga), class_of(s, ea));
    Morphism whole = class_of(s, concat(ga, ea));
    add_exact_check(rep, "compose-matches-concatenation",
                    same_morphism(comp, whole),
                    "bent pair with nontrivial phases, contractible detours");
  }

  {  // straight pair whose relative classes have even pairing: still equal
    const Vec d11 = torus_displacement(*t, 1, 1);
    const Vec d22 = torus_displacement(*t, 2, 2);
    PathSample gb = polyline(
        s.space, {base, Vec{mid[0] + d11[0], mid[1] + d11[1]}}, n, false);
    PathSample eb = polyline(
        s.space, {mid, Vec{base[0] + d22[0], base[1] + d22[1]}}, n, false);
    Morphism comp = compose(s, class_of(s, gb), class_of(s, eb));
    Morphism whole = class_of(s, concat(gb, eb));
    add_exact_check(rep, "compose-concat-even-pairing",
                    same_morphism(comp, whole),
                    "winding representatives with even symplectic pairing");
  }

  {  // odd pairing: the defect is exactly the generator cocycle
    PathSample gc = polyline(
        s.space, {base, Vec{mid[0] + dA[0], mid[1] + dA[1]}}, n, false);
    PathSample ec = polyline(
        s.space, {mid, Vec{base[0] + dB[0], base[1] + dB[1]}}, n, false);
    Morphism comp = compose(s, class_of(s, gc), class_of(s, ec));
    Morphism whole = class_of(s, concat(gc, ec));
    TorusElement defect = whole.phase - comp.phase;
    const GroupElement gA = GroupElement::from_exponents(p, {1, 0});
    const GroupElement gB = GroupElement::from_exponents(p, {0, 1});
    TorusElement tau(s.p_omega, s.cocycle->tau(gA, gB).representative());
    add_exact_check(rep, "compose-concat-defect-is-cocycle",
                    !defect.is_zero() &&
                        (defect.equals(tau) || defect.equals(-tau)),
                    "odd-pairing defect " + defect.to_string() +
                        " equals +/- tau(A,B)");
  }
}

inline void run_torus_checks(const Scenario& s, AnalysisReport& rep) {
  const auto* t = s.space->as<FlatTorus>();
  const mpq_class det_q =
      t->basis[0][0] * t->basis[1][1] - t->basis[0][1] * t->basis[1][0];
  const mpq_class cell_q = abs(det_q);
  const ExactReal cell_exact(s.symbols, cell_q);
  const double cell = cell_q.get_d();
  const Presentation& p = *s.presentation;
  const GroupElement A = GroupElement::from_exponents(p, {1, 0});
  const GroupElement B = GroupElement::from_exponents(p, {0, 1});

  {  // sweep of the whole fundamental cell
    HomotopySample sweep = torus_sweep(s.space, s.x0, s.grid_s, s.grid_n);
    ActionResult a = action_integral(*s.space, sweep, 0.0);
    add_check(rep, "fundamental-sweep-magnitude", sign_residual(a.value, cell),
              s.tolerance,
              "sweep action " + fmt(a.value) + " against cell area " +
                  fmt(cell));
    SnapResult snapped = snap(s.snapping, a.value);
    add_exact_check(rep, "fundamental-sweep-in-total-periods",
                    !snapped.fresh && s.p_omega->contains(snapped.value),
                    "snapped sweep value in " + s.p_omega->describe());
    rep.traces.push_back(make_trace("fundamental-sweep", a));
  }

  {  // folding the commutator relation accumulates one cell
    AccumulatedDetail acc =
        accumulated_cocycle_detail(*s.cocycle, p.relations().front());
    add_check(rep, "commutator-accumulates-cell-area",
              sign_residual(acc.raw, cell), s.tolerance,
              "raw fold " + fmt(acc.raw) + " against cell area " + fmt(cell));
    const ExactReal v = acc.value.representative();
    add_exact_check(rep, "commutator-fold-exact",
                    TorusElement(s.p_tor, v - cell_exact).is_zero() ||
                        TorusElement(s.p_tor, v + cell_exact).is_zero(),
                    "snapped fold " + v.to_string() +
                        " is +/- the cell area modulo toric periods");
  }

  {  // antisymmetry of the generator cocycle
    const TorusElement ab = s.cocycle->tau(A, B);
    const TorusElement ba = s.cocycle->tau(B, A);
    const TorusElement diff = ab - ba;
    const TorusElement cellel(s.p_tor, cell_exact);
    add_exact_check(rep, "cocycle-antisymmetry",
                    (diff - cellel).is_zero() || (diff + cellel).is_zero(),
                    "tau(A,B) - tau(B,A) = +/- cell area exactly");
    add_check(rep, "generator-cocycle-magnitude",
              sign_residual(s.cocycle->entry(A, B).raw, cell / 2.0),
              s.tolerance, "raw tau(A,B) against half the cell area");
  }

  {  // closed band at constant height sweeps a quarter of the cell
    const Vec d = torus_displacement(*t, 1, 0);
    const Vec h = torus_displacement(*t, 0, 1);
    std::vector<Vec> pts;
    pts.reserve(s.grid_n + 1);
    for (size_t k = 0; k <= s.grid_n; ++k) {
      const double u = static_cast<double>(k) / static_cast<double>(s.grid_n);
      pts.push_back(Vec{s.x0[0] + u * d[0] + 0.25 * h[0],
                        s.x0[1] + u * d[1] + 0.25 * h[1]});
    }
    PathSample band = PathSample::make(s.space, std::move(pts), true);
    PsiDetail psi = global_psi_detail(s, band);
    add_check(rep, "band-loop-phase", sign_residual(psi.raw, cell / 4.0),
              s.tolerance,
              "raw phase " + fmt(psi.raw) + " of the quarter-height band");
  }

  if (s.marked.size() >= 2) run_torus_morphism_checks(s, rep);

  {  // Chasles phase does not depend on the connecting path delta
    const Vec mid = s.marked.size() >= 2 ? s.marked[1].position
                                         : Vec{s.x0[0] + 0.5, s.x0[1] + 0.5};
    PathSample g1 = polyline(s.space, {s.x0, mid}, s.grid_n, false);
    PathSample g2 =
        polyline(s.space, {s.x0, Vec{mid[0], s.x0[1]}, mid}, s.grid_n, false);
    TorusElement with_default = chasles_phi(s, g1, g2);
    PathSample deltaA = s.basis_loop_of(A);
    TorusElement with_loop = chasles_phi(s, g1, g2, deltaA);
    add_exact_check(rep, "chasles-delta-independence",
                    with_default.equals(with_loop),
                    "comparison phase " + with_default.to_string() +
                        " unchanged under a winding connector");
    add_check(rep, "chasles-delta-independence-residual",
              with_default.float_distance(with_loop), s.tolerance,
              "float distance between the two evaluations");
  }

  {  // translations preserve the form, hence every Chasles phase
    const Vec mid{s.x0[0] + 0.5, s.x0[1] + 0.5};
    PathSample g1 = polyline(s.space, {s.x0, mid}, s.grid_n, false);
    PathSample g2 =
        polyline(s.space, {s.x0, Vec{mid[0], s.x0[1]}, mid}, s.grid_n, false);
    const TorusElement base = chasles_phi(s, g1, g2);
    std::mt19937 rng(77001u);
    std::uniform_real_distribution<double> shift(0.0, 1.0);
    double worst = 0.0;
    bool all_equal = true;
    const int trials = 10;
    for (int k = 0; k < trials; ++k) {
      Symmetry g{TorusTranslation{shift(rng), shift(rng)}};
      PathSample h1 = pushforward_symmetry(s, g, g1);
      PathSample h2 = pushforward_symmetry(s, g, g2);
      TorusElement moved = chasles_phi(s, h1, h2);
      worst = std::max(worst, moved.float_distance(base));
      all_equal = all_equal && moved.equals(base);
    }
    add_check(rep, "translation-invariance", worst, s.tolerance,
              std::to_string(trials) +
                  " random torus translations of a fixed comparison pair");
    add_exact_check(rep, "translation-invariance-exact", all_equal,
                    "snapped phases agree for every translation");
  }

  {  // phase additivity with cocycle defect, on raw values
    std::mt19937 rng(90125u);
    std::uniform_int_distribution<long> cls(-2, 2);
    std::uniform_real_distribution<double> amp(-0.08, 0.08);
    auto wob = [&] {
      return std::array<double, 4>{amp(rng), amp(rng), amp(rng), amp(rng)};
    };
    double worst = 0.0;
    const int trials = 16;
    for (int k = 0; k < trials; ++k) {
      const long m1 = cls(rng), n1 = cls(rng), m2 = cls(rng), n2 = cls(rng);
      PathSample la = torus_loop(s, m1, n1, wob());
      PathSample lb = torus_loop(s, m2, n2, wob());
      PsiDetail pa = global_psi_detail(s, la);
      PsiDetail pb = global_psi_detail(s, lb);
      PsiDetail pc = global_psi_detail(s, concat(la, lb));
      const GroupElement gi = GroupElement::from_exponents(p, {m1, n1});
      const GroupElement gj = GroupElement::from_exponents(p, {m2, n2});
      const double tau_raw = s.cocycle->entry(gi, gj).raw;
      const double defect = pc.raw - pa.raw - pb.raw - tau_raw;
      worst = std::max(worst, s.p_omega->float_distance(defect));
    }
    add_check(rep, "phase-additivity-with-cocycle", worst, s.tolerance,
              "psi(l v l') - psi(l) - psi(l') - tau(i,j) in the total "
              "periods, raw values, " +
                  std::to_string(trials) + " wobbled pairs");
  }

  if (!s.marked.empty()) {  // isotropy targets are realized by explicit loops
    std::vector<TorusElement> targets;
    for (long k = 0; k < 10; ++k)
      targets.emplace_back(s.p_omega,
                           ExactReal(s.symbols, make_rational(k, 10)));
    std::vector<PathSample> probes =
        isotropy_probe(s, s.marked.front().id, targets);
    double worst = 0.0;
    bool exact_all = true;
    for (size_t k = 0; k < probes.size(); ++k) {
      PsiDetail psi = global_psi_detail(s, probes[k]);
      worst = std::max(
          worst, s.p_omega->float_distance(
                     psi.raw - targets[k].representative().value()));
      exact_all = exact_all && psi.phase.equals(targets[k]);
    }
    add_check(rep, "isotropy-targets-realized", worst, s.tolerance,
              "loops at '" + s.marked.front().id +
                  "' reaching phases k/10, k = 0..9, raw residual");
    add_exact_check(rep, "isotropy-targets-exact", exact_all,
                    "snapped probe phases equal the targets");
  }
}

// ---------------------------------------------------------------------------
// magnetic punctured plane family

inline void run_punctured_checks(const Scenario& s, AnalysisReport& rep,
                                 const HolonomyDescriptor* holonomy) {
  const GroupElement one = GroupElement::from_exponents(*s.presentation, {1});

  {  // annulus sweep from the unit circle to radius 2
    PathSample base = s.basis_loop_of(one);
    std::vector<Vec> pts;
    pts.reserve(s.grid_n + 1);
    for (size_t k = 0; k <= s.grid_n; ++k) {
      const double u =
          2.0 * M_PI * static_cast<double>(k) / static_cast<double>(s.grid_n);
      pts.push_back(Vec{2.0 * std::cos(u), 2.0 * std::sin(u)});
    }
    pts.back() = pts.front();
    PathSample circle2 = PathSample::make(s.space, std::move(pts), true);
    HomotopySample h = straight_homotopy(base, circle2, s.grid_s);
    ActionResult a = action_integral(*s.space, h, 0.0);
    const double target = 2.0 * M_PI * std::log(2.0);
    add_check(rep, "annulus-phase", sign_residual(a.value, target),
              s.tolerance,
              "radius 1 -> radius 2 sweep " + fmt(a.value) +
                  " against 2 pi log 2 = " + fmt(target));
    rep.traces.push_back(make_trace("annulus", a));
  }

  add_exact_check(
      rep, "total-periods-trivial", s.p_omega->is_trivial(),
      "no relations and no toric periods: " + s.p_omega->describe());

  if (holonomy != nullptr &&
      holonomy->kind == HolonomyDescriptor::Kind::continuum) {
    add_check(rep, "holonomy-base-witness", std::abs(holonomy->action_a),
              s.tolerance, "the radius-1 witness loop has zero phase");
    add_exact_check(
        rep, "holonomy-radii-separate",
        std::abs(holonomy->action_b - holonomy->action_a) > 0.5,
        "radius 1 and radius 2 phases differ by " +
            fmt(std::abs(holonomy->action_b - holonomy->action_a)));
  }

  {  // rotations preserve the form, hence the Chasles phase
    PathSample g1 =
        polyline(s.space, {Vec{1.0, 0.0}, Vec{2.0, 0.0}}, s.grid_n, false);
    std::vector<Vec> pts;
    pts.reserve(s.grid_n + 1);
    for (size_t k = 0; k <= s.grid_n; ++k) {
      const double u = static_cast<double>(k) / static_cast<double>(s.grid_n);
      const double r = 1.0 + u;
      const double th = 0.4 * u * (1.0 - u);
      pts.push_back(Vec{r * std::cos(th), r * std::sin(th)});
    }
    pts.back() = Vec{2.0, 0.0};
    PathSample g2 = PathSample::make(s.space, std::move(pts), false);
    const TorusElement base_phase = chasles_phi(s, g1, g2);
    const double base_raw = base_phase.float_representative();
    std::mt19937 rng(550123u);
    std::uniform_real_distribution<double> angle(-3.0, 3.0);
    double worst = 0.0;
    const int trials = 10;
    for (int k = 0; k < trials; ++k) {
      Symmetry g{PlaneRotation{angle(rng)}};
      TorusElement moved = chasles_phi(s, pushforward_symmetry(s, g, g1),
                                       pushforward_symmetry(s, g, g2));
      worst =
          std::max(worst, std::abs(moved.float_representative() - base_raw));
    }
    add_check(rep, "rotation-invariance", worst, s.tolerance,
              std::to_string(trials) +
                  " random rotations of a bulged comparison pair, raw values");
  }

  {  // the cocycle of a free rank-1 class group vanishes
    double worst_tau = 0.0;
    for (long m = -2; m <= 2; ++m)
      for (long n = -2; n <= 2; ++n) {
        if (m == 0 || n == 0) continue;
        const GroupElement gm =
            GroupElement::from_exponents(*s.presentation, {m});
        const GroupElement gn =
            GroupElement::from_exponents(*s.presentation, {n});
        worst_tau = std::max(worst_tau, std::abs(s.cocycle->entry(gm, gn).raw));
      }
    add_check(rep, "cocycle-vanishes", worst_tau, s.tolerance,
              "raw tau(c^m, c^n) for windings -2..2");
  }

  {  // phase additivity on raw values
    std::mt19937 rng(661234u);
    std::uniform_int_distribution<long> wind(-2, 2);
    std::uniform_real_distribution<double> rad(1.2, 2.5);
    std::uniform_real_distribution<double> amp(0.05, 0.25);
    double worst = 0.0;
    const int trials = 12;
    for (int k = 0; k < trials; ++k) {
      long m = wind(rng), n = wind(rng);
      if (m == 0) m = 1;
      if (n == 0) n = -1;
      const double r0 = rad(rng);
      PathSample la = wobbled_circle(s, m, r0, amp(rng));
      PathSample lb = wobbled_circle(s, n, r0, amp(rng));
      PsiDetail pa = global_psi_detail(s, la);
      PsiDetail pb = global_psi_detail(s, lb);
      PsiDetail pc = global_psi_detail(s, concat(la, lb));
      const GroupElement gm =
          GroupElement::from_exponents(*s.presentation, {m});
      const GroupElement gn =
          GroupElement::from_exponents(*s.presentation, {n});
      const double defect =
          pc.raw - pa.raw - pb.raw - s.cocycle->entry(gm, gn).raw;
      worst = std::max(worst, std::abs(defect));
    }
    add_check(rep, "phase-additivity", worst, s.tolerance,
              std::to_string(trials) +
                  " pairs of radius-wobbled wound circles, raw values");
  }
}

// ---------------------------------------------------------------------------
// flat twisted family (zero form plus character twist)

inline void run_flat_checks(const Scenario& s, AnalysisReport& rep,
                            const HolonomyDescriptor* holonomy) {
  const Presentation& p = *s.presentation;
  const auto& tw = *s.twist;

  auto power = [](size_t gen, int e) {
    Word w;
    for (int k = 0; k < std::abs(e); ++k)
      w.push_back(Letter{gen, e > 0 ? 1 : -1});
    return w;
  };
  auto joined = [](Word a, const Word& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
  };
  std::vector<GroupElement> loops_wanted;
  if (p.rank() == 1) {
    for (int nn = -3; nn <= 3; ++nn)
      if (nn != 0)
        loops_wanted.push_back(GroupElement::from_word(p, power(0, nn)));
  } else {
    loops_wanted.push_back(GroupElement::from_word(p, power(0, 1)));
    loops_wanted.push_back(GroupElement::from_word(p, power(1, 1)));
    loops_wanted.push_back(
        GroupElement::from_word(p, joined(power(0, 1), power(1, 1))));
    loops_wanted.push_back(
        GroupElement::from_word(p, joined(power(0, 2), power(1, -1))));
  }

  {  // the untwisted global phase of every flat loop is exactly zero
    bool ok = true;
    for (const auto& g : loops_wanted)
      ok = ok && global_psi(s, s.basis_loop_of(g)).is_zero();
    add_exact_check(rep, "flat-phase-zero", ok,
                    "untwisted global phases vanish on " +
                        std::to_string(loops_wanted.size()) + " loops");
  }

  {  // twisted classes see exactly (sum of letters) . (twist values)
    bool ok = true;
    std::string sample;
    for (const auto& g : loops_wanted) {
      Morphism m = flat_class_of(s, s.basis_loop_of(g));
      TorusElement expect = TorusElement::zero(s.p_omega);
      for (const auto& l : g.word())
        expect += static_cast<long>(l.exp) * tw.values[l.gen];
      ok = ok && m.phase.equals(expect);
      if (sample.empty())
        sample = p.format_word(g.word()) + " -> " + m.phase.to_string();
    }
    add_exact_check(
        rep, "twisted-flux-quantization", ok,
        "sampled loop classes carry the declared fluxes, e.g. " + sample);
  }

  {  // functoriality: concatenation adds twisted phases exactly
    const GroupElement& ga = loops_wanted.front();
    const GroupElement& gb = loops_wanted.back();
    PathSample la = s.basis_loop_of(ga);
    PathSample lb = s.basis_loop_of(gb);
    Morphism whole = flat_class_of(s, concat(la, lb));
    Morphism parts = compose(s, flat_class_of(s, la), flat_class_of(s, lb));
    add_exact_check(rep, "twisted-class-functoriality",
                    same_morphism(whole, parts),
                    "flat class of " + p.format_word(ga.word()) + " then " +
                        p.format_word(gb.word()) + " composes additively");
  }

  if (holonomy != nullptr &&
      holonomy->kind == HolonomyDescriptor::Kind::subgroup) {
    // oracle: the subgroup generated by rational fluxes p_i/q_i is
    // (gcd p_i (L/q_i)) / L with L the common denominator
    bool all_rational = true;
    std::vector<mpq_class> vals;
    for (const auto& v : tw.values) {
      ExactReal r = v.representative();
      all_rational = all_rational && r.is_rational();
      vals.push_back(r.rational_part());
    }
    if (all_rational) {
      mpz_class common = 1;
      for (const auto& q : vals) common = lcm(common, q.get_den());
      mpz_class g = 0;
      for (const auto& q : vals)
        g = gcd(g, mpz_class(q.get_num() * (common / q.get_den())));
      bool ok;
      std::string what;
      if (g == 0) {
        ok = holonomy->subgroup->is_trivial();
        what = "all fluxes vanish: trivial holonomy";
      } else {
        mpq_class expected_q(g, common);
        expected_q.canonicalize();
        auto gen = holonomy->subgroup->canonical_generator();
        ok = gen.has_value() && *gen == ExactReal(s.symbols, expected_q);
        what = "holonomy generator " +
               (gen ? gen->to_string() : std::string("<none>")) +
               " matches the flux gcd " + expected_q.get_str();
      }
      add_exact_check(rep, "holonomy-generated-by-twist", ok, what);
    }
  }
}

// ---------------------------------------------------------------------------
// product-of-spheres family

inline void run_sphere_product_checks(const Scenario& s, AnalysisReport& rep) {
  const auto* pr = s.space->as<ProductSpace>();
  const auto* left = pr->left->as<TwoSphere>();
  const auto* right = pr->right->as<TwoSphere>();
  const Vec left_point = slice(s.x0, 0, pr->left->dim());
  const Vec right_point = slice(s.x0, pr->left->dim(), pr->right->dim());

  for (int side = 0; side < 2; ++side) {
    const bool is_left = side == 0;
    const TwoSphere* factor = is_left ? left : right;
    const ModelSpacePtr& fspace = is_left ? pr->left : pr->right;
    const Vec& frozen = is_left ? right_point : left_point;
    const std::string label = is_left ? "left-sweep" : "right-sweep";

    HomotopySample sweep = sphere_sweep(fspace, s.grid_s, s.grid_n);
    ActionResult a = action_integral(*fspace, sweep, 0.0);
    add_check(rep, label + "-magnitude", sign_residual(a.value, factor->scale),
              s.tolerance,
              "full sphere sweep " + fmt(a.value) +
                  " against the factor's total integral " +
                  fmt(factor->scale));
    rep.traces.push_back(make_trace(label, a));

    HomotopySample embedded = embed_in_product(s.space, sweep, frozen, is_left);
    ActionResult ae = action_integral(*s.space, embedded, 0.0);
    add_check(rep, label + "-embeds-in-product", std::abs(ae.value - a.value),
              1e-12, "embedding with the other factor frozen changes nothing");
  }

  if (s.p_omega->is_discrete()) {
    auto gen = s.p_omega->canonical_generator();
    add_exact_check(rep, "total-periods-discrete", s.p_omega->rank() <= 1,
                    "combined periods " + s.p_omega->describe());
    if (gen) {
      TorusCharacter chi = TorusCharacter::make(s, 1.0);
      const std::complex<double> at_gen = chi(TorusElement(s.p_omega, *gen));
      add_check(rep, "character-period", std::abs(at_gen - 1.0), 1e-9,
                "index-1 character is trivial on the generator " +
                    gen->to_string());
    }
  } else {
    add_exact_check(rep, "total-periods-dense",
                    s.p_omega->rank() >= 2 && !s.p_omega->is_discrete(),
                    "incommensurable factors: " + s.p_omega->describe());
  }

  if (!s.marked.empty()) {  // cap probes realize prescribed phases
    std::vector<TorusElement> targets;
    targets.emplace_back(s.p_omega, ExactReal(s.symbols, make_rational(1, 6)));
    targets.emplace_back(s.p_omega, ExactReal(s.symbols, make_rational(1, 4)));
    targets.emplace_back(s.p_omega,
                         ExactReal(s.symbols, make_rational(-1, 8)));
    std::vector<PathSample> probes =
        isotropy_probe(s, s.marked.front().id, targets);
    double worst = 0.0;
    for (size_t k = 0; k < probes.size(); ++k) {
      PsiDetail psi = global_psi_detail(s, probes[k]);
      // The probe aims at the reduced representative; on dense period
      // groups the float distance cannot fold the difference back, so
      // compare against what was constructed. Reduction itself shifts by
      // exact group elements only.
      const double aimed = targets[k].reduce().float_representative();
      worst = std::max(worst, s.p_omega->float_distance(psi.raw - aimed));
    }
    add_check(rep, "cap-isotropy-realization", worst, s.tolerance,
              "cap boundaries on the left factor reach 1/6, 1/4, -1/8");
  }
}

// ---------------------------------------------------------------------------
// declared surface family

inline void run_surface_checks(const Scenario& s, AnalysisReport& rep) {
  const Presentation& p = *s.presentation;
  const Word& rel = p.relations().front();

  {  // folding the surface relator accumulates exactly the declared area
    AccumulatedDetail acc = accumulated_cocycle_detail(*s.cocycle, rel);
    const ExactReal v = acc.value.representative();
    auto gen = s.p_omega->canonical_generator();
    add_exact_check(rep, "relator-accumulates-generator",
                    gen.has_value() && (v == *gen || v == -*gen),
                    "fold of " + p.format_word(rel) + " gives " +
                        v.to_string() + ", the generator of " +
                        s.p_omega->describe());
  }

  {  // normal forms: long relator prefixes reduce to the inverse complement
    bool ok = true;
    const size_t half = rel.size() / 2;
    for (size_t cut = half + 1; cut < rel.size(); ++cut) {
      Word prefix(rel.begin(), rel.begin() + static_cast<long>(cut));
      Word complement(rel.begin() + static_cast<long>(cut), rel.end());
      ok = ok && GroupElement::from_word(p, prefix).key() ==
                     GroupElement::from_word(p, inverse_word(complement)).key();
    }
    add_exact_check(rep, "relator-prefix-normal-forms", ok,
                    "prefixes longer than half the relator rewrite to the "
                    "inverse of their complement");
  }
}

// ---------------------------------------------------------------------------
// report assembly

inline std::string model_label(const ModelSpace& m) {
  if (const auto* pr = m.as<ProductSpace>())
    return "Product(" + pr->left->kind_name() + ", " + pr->right->kind_name() +
           ")";
  if (const auto* pp = m.as<PuncturedPlane>())
    return std::string("PuncturedPlane/") +
           (pp->kind == FormKind::magnetic
                ? "magnetic"
                : pp->kind == FormKind::uniform ? "uniform" : "zero");
  if (const auto* su = m.as<AbstractSurface>())
    return "AbstractSurface(genus " + std::to_string(su->genus) + ")";
  return m.kind_name();
}

inline void populate_structure(const Scenario& s, AnalysisReport& rep,
                               const HolonomyDescriptor* holonomy) {
  rep.scenario = s.name;
  rep.description = s.description;
  rep.model = model_label(*s.space);
  rep.group = std::string(group_kind_name(s.presentation->kind())) +
              ", rank " + std::to_string(s.presentation->rank());
  for (size_t i = 0; i < s.x0.size(); ++i) rep.basepoint.push_back(s.x0[i]);
  rep.grid_s = s.grid_s;
  rep.grid_n = s.grid_n;
  rep.tolerance = s.tolerance;

  rep.toric_periods = s.p_tor->describe();
  rep.total_periods = s.p_omega->describe();
  for (const auto& g : s.p_omega->generators())
    rep.total_period_generators.push_back(g.to_string());
  rep.period_torus = s.p_omega->describe_torus();
  rep.discrete = s.p_omega->is_discrete();
  rep.isotropy = rep.period_torus;

  rep.cocycle_backing =
      s.space->zero_form()
          ? "flat"
          : (s.cocycle->declared() ? "declared" : "geometric");

  for (size_t i = 0; i < s.presentation->rank(); ++i)
    for (size_t j = 0; j < s.presentation->rank(); ++j) {
      const GroupElement gi =
          GroupElement::from_word(*s.presentation, Word{Letter{i, 1}});
      const GroupElement gj =
          GroupElement::from_word(*s.presentation, Word{Letter{j, 1}});
      CocycleTable::Entry e = s.cocycle->entry(gi, gj);
      CocycleReportEntry out;
      out.i = gi.key();
      out.j = gj.key();
      out.exact = e.value.representative().to_string();
      out.value = e.value.float_representative();
      out.raw = e.raw;
      out.error_estimate = e.error_estimate;
      rep.cocycle.push_back(std::move(out));
    }

  for (const auto& [w, v] : s.relation_values) {
    RelationReportEntry out;
    out.word = s.presentation->format_word(w);
    out.exact = v.representative().to_string();
    out.value = v.float_representative();
    out.in_total_periods = s.p_omega->contains(v.representative());
    rep.relations.push_back(std::move(out));
  }

  long free_rank = 0;
  std::vector<mpz_class> torsion;
  s.presentation->abelianization(free_rank, torsion);
  AbelianGroupDescriptor ab{free_rank, torsion};
  rep.fundamental_group_abelianized = ab.to_string();
  rep.extension_moduli = moduli_ext(free_rank, torsion, *s.p_omega).to_string();
  rep.character_group =
      characters_h1(free_rank, torsion, *s.p_omega).to_string();

  if (holonomy != nullptr) {
    HolonomyReport h;
    h.kind = holonomy->kind == HolonomyDescriptor::Kind::subgroup
                 ? "subgroup"
                 : "continuum";
    h.description =
        holonomy->subgroup ? holonomy->subgroup->describe() : std::string();
    h.note = holonomy->note;
    h.witness_radius_a = holonomy->witness_radius_a;
    h.witness_radius_b = holonomy->witness_radius_b;
    h.action_a = holonomy->action_a;
    h.action_b = holonomy->action_b;
    rep.holonomy = std::move(h);
  }

  // Collected last: fresh symbols can appear while checks run.
  for (size_t i = 0; i < s.symbols->size(); ++i) {
    const auto& sym = s.symbols->symbol(i);
    rep.symbols.push_back({sym.name, sym.approx});
  }
}

}  // namespace detail

/// Runs the full analysis of a scenario: structural summary plus, when
/// `with_checks` is set, every consistency check the scenario's shape
/// supports. The same fixed random seeds are used on every run, so reports
/// are byte-for-byte reproducible.
inline AnalysisReport run_analysis(const Scenario& s, bool with_checks = true) {
  AnalysisReport rep;

  std::optional<HolonomyDescriptor> holonomy;
  if (s.twist || s.space->zero_form() || detail::is_magnetic_punctured(s))
    holonomy = holonomy_group(s);
  const HolonomyDescriptor* hol = holonomy ? &*holonomy : nullptr;

  if (with_checks) {
    detail::check_periods(s, rep);
    detail::check_cocycle_identity(s, rep);
    detail::check_extension_algebra(s, rep);
    detail::check_wavefunction(s, rep);

    if (detail::is_torus_scenario(s)) detail::run_torus_checks(s, rep);
    if (detail::is_magnetic_punctured(s))
      detail::run_punctured_checks(s, rep, hol);
    if (detail::is_flat_twisted(s)) detail::run_flat_checks(s, rep, hol);
    if (detail::is_sphere_product(s)) detail::run_sphere_product_checks(s, rep);
    if (detail::is_declared_surface(s)) detail::run_surface_checks(s, rep);
  }

  detail::populate_structure(s, rep, hol);

  rep.warnings = s.load_warnings;
  for (const auto& w : s.cocycle->warnings()) rep.warnings.push_back(w);

  return rep;
}

}  // namespace prequant
