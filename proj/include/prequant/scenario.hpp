#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "prequant/action.hpp"
#include "prequant/cocycle.hpp"
#include "prequant/errors.hpp"
#include "prequant/exact.hpp"
#include "prequant/geometry.hpp"
#include "prequant/periods.hpp"
#include "prequant/snapping.hpp"
#include "prequant/words.hpp"

namespace prequant {

struct MarkedPoint {
  std::string id;
  Vec position;
  PathSample reference;  // path from the scenario basepoint to `position`
};

/// Character of the fundamental group with values in the period torus,
/// given by one value per generator (a flat twist of the trivial bundle).
struct FlatTwist {
  std::vector<TorusElement> values;  // indexed by generator
};

/// Everything needed to run the engine on one model: the space, the
/// fundamental group presentation, declared constants, snapping rules,
/// the toric periods, the cocycle, the derived total period group, marked
/// points, and an optional flat twist.
struct Scenario {
  std::string name;
  std::string description;

  ModelSpacePtr space;
  std::shared_ptr<const Presentation> presentation;
  Vec x0;

  SymbolTablePtr symbols;
  SnappingPolicy snapping;
  double tolerance = 1e-6;
  // Cap on the quadrature's own error estimate; the estimate is a bound on
  // the unextrapolated rule, so it sits well above the check tolerance.
  double quad_tolerance = 1e-2;
  size_t grid_s = 256;
  size_t grid_n = 256;

  PeriodGroupPtr p_tor;
  std::vector<std::pair<Word, TorusElement>> relation_values;
  PeriodGroupPtr p_omega;

  std::shared_ptr<CocycleTable> cocycle;

  // Custom basis loops keyed by class normal form; null or empty means the
  // canonical family everywhere.
  std::shared_ptr<const std::map<std::string, PathSample>> basis_overrides;

  std::vector<MarkedPoint> marked;
  std::optional<FlatTwist> twist;

  std::vector<std::string> load_warnings;

  const MarkedPoint& marked_by_id(const std::string& id) const {
    for (const auto& m : marked)
      if (m.id == id) return m;
    raise(errc::invalid_argument, "no marked point with id '" + id + "'");
  }

  const MarkedPoint* find_marked(const Vec& p) const {
    for (const auto& m : marked)
      if (quotient_distance(*space, m.position, p) <= 1e-9) return &m;
    return nullptr;
  }

  GroupElement component_of(const PathSample& loop) const {
    return component_index(*space, *presentation, loop);
  }

  PathSample basis_loop_of(const GroupElement& cls) const {
    if (basis_overrides) {
      auto it = basis_overrides->find(cls.key());
      if (it != basis_overrides->end()) return it->second;
    }
    return basis_loop(space, *presentation, cls, x0, grid_n);
  }
};

/// Plain configuration for building a Scenario; the JSON front end fills
/// this in, unit tests can construct it directly.
struct ScenarioConfig {
  std::string name;
  std::string description;

  ModelSpacePtr space;
  std::shared_ptr<const Presentation> presentation;
  Vec x0;

  std::vector<std::pair<std::string, double>> constants;

  std::vector<std::string> snap_targets;  // exact-value expressions
  double snap_tolerance = 1e-5;
  int snap_multiple_limit = 8;
  unsigned snap_denominator_limit = 48;

  std::vector<std::string> toric_generators;  // exact-value expressions
  std::vector<Word> extra_relations;

  struct DeclaredCocycleEntry {
    std::string i, j, value;
  };
  std::optional<std::vector<DeclaredCocycleEntry>> declared_cocycle;

  struct BasisLoopOverride {
    std::string cls;          // word naming the homotopy class
    std::vector<Vec> points;  // closed sampled loop based at x0
  };
  std::vector<BasisLoopOverride> basis_loops;

  std::optional<std::vector<std::string>> expected_total_periods;
  std::optional<bool> expected_discrete;

  struct MarkedConfig {
    std::string id;
    Vec position;
    std::optional<std::vector<Vec>> reference;
  };
  std::vector<MarkedConfig> marked;

  std::optional<std::vector<std::pair<std::string, std::string>>> twist;

  size_t grid_s = 256;
  size_t grid_n = 256;
  double tolerance = 1e-6;
  double quad_tolerance = 1e-2;
};

namespace detail {

/// Default reference path from the basepoint to a marked point: straight
/// in the cover (torus), log-polar (punctured plane), chordal (sphere),
/// straight chart segment otherwise; factorwise on products.
inline PathSample default_reference(const ModelSpacePtr& space, const Vec& x0,
                                    const Vec& p, size_t segments) {
  const ModelSpace& m = *space;
  if (quotient_distance(m, x0, p) <= 1e-9)
    return constant_path(space, x0, segments);
  if (m.as<PuncturedPlane>()) {
    const double r0 = norm(x0), r1 = norm(p);
    require(r0 > 1e-9 && r1 > 1e-9, errc::removed_point,
            "reference endpoint at the puncture");
    const double t0 = std::atan2(x0[1], x0[0]);
    double t1 = std::atan2(p[1], p[0]);
    t1 -= 2.0 * M_PI * std::nearbyint((t1 - t0) / (2.0 * M_PI));
    std::vector<Vec> pts;
    for (size_t k = 0; k <= segments; ++k) {
      const double u = static_cast<double>(k) / static_cast<double>(segments);
      const double lam = (1.0 - u) * std::log(r0) + u * std::log(r1);
      const double th = (1.0 - u) * t0 + u * t1;
      pts.push_back(Vec{std::exp(lam) * std::cos(th),
                        std::exp(lam) * std::sin(th)});
    }
    return PathSample::make(space, std::move(pts), false);
  }
  if (m.as<TwoSphere>()) {
    require(dot(x0, p) > -1.0 + 1e-6, errc::antipodal_degeneracy,
            "no canonical reference between antipodal points");
    std::vector<Vec> pts;
    for (size_t k = 0; k <= segments; ++k) {
      const double u = static_cast<double>(k) / static_cast<double>(segments);
      Vec q = (1.0 - u) * x0 + u * p;
      canonicalize_point(m, q);
      pts.push_back(q);
    }
    return PathSample::make(space, std::move(pts), false);
  }
  if (const auto* pr = m.as<ProductSpace>()) {
    const size_t dl = pr->left->dim(), dr = pr->right->dim();
    PathSample l =
        default_reference(pr->left, slice(x0, 0, dl), slice(p, 0, dl),
                          segments);
    PathSample r = default_reference(pr->right, slice(x0, dl, dr),
                                     slice(p, dl, dr), segments);
    std::vector<Vec> pts;
    for (size_t k = 0; k <= segments; ++k)
      pts.push_back(join(l.points()[k], r.points()[k]));
    return PathSample::make(space, std::move(pts), false);
  }
  // Torus cover and the two-holes chart: straight segment.
  std::vector<Vec> pts;
  for (size_t k = 0; k <= segments; ++k) {
    const double u = static_cast<double>(k) / static_cast<double>(segments);
    pts.push_back((1.0 - u) * x0 + u * p);
  }
  return PathSample::make(space, std::move(pts), false);
}

}  // namespace detail

inline Scenario build_scenario(const ScenarioConfig& cfg) {
  require(cfg.space != nullptr, errc::schema_error, "scenario needs a model");
  require(cfg.presentation != nullptr, errc::schema_error,
          "scenario needs a fundamental group");
  Scenario s;
  s.name = cfg.name;
  s.description = cfg.description;
  s.space = cfg.space;
  s.presentation = cfg.presentation;
  s.x0 = cfg.x0;
  check_dimension(*s.space, s.x0, "basepoint");
  check_removed(*s.space, s.x0);
  s.grid_s = cfg.grid_s;
  s.grid_n = cfg.grid_n;
  s.tolerance = cfg.tolerance;
  s.quad_tolerance = cfg.quad_tolerance;
  require(s.grid_s >= 8 && s.grid_n >= 8 && s.grid_s % 2 == 0 &&
              s.grid_n % 2 == 0,
          errc::schema_error, "grid sizes must be even and at least 8");
  require(s.tolerance > 0.0 && s.quad_tolerance > 0.0, errc::schema_error,
          "tolerances must be positive");

  s.symbols = SymbolTable::create();
  for (const auto& [name, approx] : cfg.constants) s.symbols->add(name, approx);
  for (const auto& w : s.symbols->independence_warnings())
    s.load_warnings.push_back(w);

  s.snapping.table = s.symbols;
  s.snapping.tolerance = cfg.snap_tolerance;
  s.snapping.multiple_limit = cfg.snap_multiple_limit;
  s.snapping.denominator_limit = cfg.snap_denominator_limit;
  for (const auto& t : cfg.snap_targets)
    s.snapping.targets.push_back(parse_exact(s.symbols, t));

  std::vector<ExactReal> toric;
  for (const auto& t : cfg.toric_generators)
    toric.push_back(parse_exact(s.symbols, t));
  s.p_tor = generate(s.symbols, std::move(toric));

  // Custom basis loops replace the canonical family for the named classes
  // everywhere downstream (cocycle values, global phases).
  if (!cfg.basis_loops.empty()) {
    require(s.presentation->kind() != GroupKind::surface, errc::schema_error,
            "custom basis loops need a geometrically detectable group");
    auto overrides = std::make_shared<std::map<std::string, PathSample>>();
    for (const auto& bl : cfg.basis_loops) {
      GroupElement cls = GroupElement::from_word(
          *s.presentation, s.presentation->parse_word(bl.cls));
      require(!cls.is_identity(), errc::schema_error,
              "the identity basis loop is pinned to the constant loop");
      require(bl.points.size() >= 3 &&
                  quotient_distance(*s.space, bl.points.front(),
                                    bl.points.back()) <= 1e-9,
              errc::schema_error,
              "custom basis loop for '" + bl.cls + "' must be closed");
      PathSample loop = PathSample::make(s.space, bl.points, true);
      require(quotient_distance(*s.space, loop.start(), s.x0) <= 1e-9,
              errc::schema_error,
              "custom basis loop for '" + bl.cls +
                  "' must be based at the basepoint");
      GroupElement found = component_index(*s.space, *s.presentation, loop);
      require(found == cls, errc::schema_error,
              "custom basis loop for '" + bl.cls + "' lies in component '" +
                  found.key() + "'");
      overrides->insert_or_assign(cls.key(), std::move(loop));
    }
    s.basis_overrides = overrides;
  }

  // Cocycle backing.
  if (cfg.declared_cocycle) {
    CocycleTable::Declared d;
    d.presentation = s.presentation.get();
    d.toric = s.p_tor;
    for (const auto& e : *cfg.declared_cocycle) {
      GroupElement i =
          GroupElement::from_word(*s.presentation, s.presentation->parse_word(e.i));
      GroupElement j =
          GroupElement::from_word(*s.presentation, s.presentation->parse_word(e.j));
      d.values[{i.key(), j.key()}] = parse_exact(s.symbols, e.value);
    }
    s.cocycle = std::make_shared<CocycleTable>(std::move(d));
  } else {
    CocycleTable::Geometric g;
    g.space = s.space;
    g.presentation = s.presentation.get();
    g.x0 = s.x0;
    g.loop_segments = s.grid_n;
    g.homotopy_rows = s.grid_s;
    g.snapping = s.snapping;
    g.toric = s.p_tor;
    g.tolerance = 0.0;  // cocycle values are snapped; estimates reported
    if (s.basis_overrides)
      g.loops = [space = s.space, pres = s.presentation, x0 = s.x0,
                 segs = s.grid_n,
                 overrides = s.basis_overrides](const GroupElement& cls) {
        auto it = overrides->find(cls.key());
        if (it != overrides->end()) return it->second;
        return basis_loop(space, *pres, cls, x0, segs);
      };
    s.cocycle = std::make_shared<CocycleTable>(std::move(g));
  }

  // Fold the presentation's relations (plus any extras) through the
  // extension; the accumulated values generate H_surf.
  std::vector<Word> relations = s.presentation->relations();
  for (const auto& w : cfg.extra_relations) relations.push_back(w);
  std::vector<TorusElement> values;
  for (const auto& w : relations) {
    TorusElement v = accumulated_cocycle(*s.cocycle, w);
    s.relation_values.push_back({w, v});
    values.push_back(v);
  }
  s.p_omega = total_periods(s.p_tor, values);

  if (cfg.expected_total_periods) {
    std::vector<ExactReal> gens;
    for (const auto& t : *cfg.expected_total_periods)
      gens.push_back(parse_exact(s.symbols, t));
    PeriodGroupPtr expected = generate(s.symbols, gens);
    bool same = true;
    for (const auto& g : expected->generators())
      if (!s.p_omega->contains(g)) same = false;
    for (const auto& g : s.p_omega->generators())
      if (!expected->contains(g)) same = false;
    require(same, errc::schema_error,
            "declared total period group " + expected->describe() +
                " does not match the recomputed " + s.p_omega->describe());
  }
  if (cfg.expected_discrete)
    require(*cfg.expected_discrete == s.p_omega->is_discrete(),
            errc::schema_error,
            "declared discreteness does not match the recomputed group");

  for (const auto& mc : cfg.marked) {
    require(!mc.id.empty(), errc::schema_error, "marked point without id");
    check_dimension(*s.space, mc.position, "marked point");
    check_removed(*s.space, mc.position);
    PathSample ref =
        mc.reference
            ? PathSample::make(s.space, *mc.reference,
                               quotient_distance(*s.space, mc.reference->front(),
                                                 mc.reference->back()) <= 1e-9)
            : detail::default_reference(s.space, s.x0, mc.position, s.grid_n);
    require(quotient_distance(*s.space, ref.start(), s.x0) <= 1e-9,
            errc::schema_error,
            "reference for '" + mc.id + "' must start at the basepoint");
    require(quotient_distance(*s.space, ref.end(), mc.position) <= 1e-9,
            errc::schema_error,
            "reference for '" + mc.id + "' must end at the marked point");
    s.marked.push_back({mc.id, mc.position, std::move(ref)});
  }

  if (cfg.twist) {
    require(s.space->zero_form(), errc::schema_error,
            "flat twists require the zero two-form");
    FlatTwist tw;
    tw.values.assign(s.presentation->rank(),
                     TorusElement::zero(s.p_omega));
    std::vector<bool> seen(s.presentation->rank(), false);
    for (const auto& [gen, value] : *cfg.twist) {
      const size_t g = s.presentation->generator_index(gen);
      tw.values[g] = TorusElement(s.p_omega, parse_exact(s.symbols, value));
      seen[g] = true;
    }
    for (size_t g = 0; g < seen.size(); ++g)
      require(seen[g], errc::schema_error,
              "flat twist misses generator '" +
                  s.presentation->generators()[g] + "'");
    // A character must annihilate every relation.
    for (const auto& w : relations) {
      auto e = s.presentation->abelianize(w);
      TorusElement acc = TorusElement::zero(s.p_omega);
      for (size_t g = 0; g < e.size(); ++g) acc += e[g] * tw.values[g];
      require(acc.is_zero(), errc::incompatible_character,
              "flat twist does not vanish on relation '" +
                  s.presentation->format_word(w) + "'");
    }
    s.twist = std::move(tw);
  }

  return s;
}

}  // namespace prequant
