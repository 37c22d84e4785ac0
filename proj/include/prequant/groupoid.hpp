#pragma once

#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "prequant/action.hpp"
#include "prequant/cocycle.hpp"
#include "prequant/errors.hpp"
#include "prequant/scenario.hpp"

namespace prequant {

/// Morphism class of the path groupoid quotient: source and target marked
/// points plus the phase in the period torus, stored relative to the
/// scenario's reference system.
struct Morphism {
  std::string src;
  std::string tgt;
  TorusElement phase;
};

struct PsiDetail {
  TorusElement phase;
  GroupElement component;
  double raw = 0.0;             // float action before snapping
  double error_estimate = 0.0;  // quadrature estimate (0 for exact paths)
  bool fresh = false;           // snapped to a fresh symbol
  std::string warning;
};

/// Global phase of a closed loop: the action integral of the canonical
/// interpolation from the basis loop of its component, snapped and taken
/// modulo the total period group. Structurally flat scenarios return an
/// exact zero without quadrature.
inline PsiDetail global_psi_detail(const Scenario& s, const PathSample& loop) {
  require(loop.closed(), errc::not_closed, "phase of a non-closed path");
  PsiDetail out{TorusElement::zero(s.p_omega), s.component_of(loop)};
  if (s.space->zero_form()) return out;
  PathSample base = s.basis_loop_of(out.component);
  HomotopySample h = straight_homotopy(base, loop, s.grid_s);
  ActionResult a = action_integral(*s.space, h, s.quad_tolerance);
  SnapResult snapped = snap(s.snapping, a.value);
  out.phase = TorusElement(s.p_omega, snapped.value);
  out.raw = a.value;
  out.error_estimate = a.error_estimate;
  out.fresh = snapped.fresh;
  out.warning = snapped.warning;
  return out;
}

inline TorusElement global_psi(const Scenario& s, const PathSample& loop) {
  return global_psi_detail(s, loop).phase;
}

/// Chasles phase of two paths sharing both endpoints: the global phase of
/// delta (gamma v reverse(gamma')) reverse(delta), where delta connects
/// the basepoint to the common source. The choice of delta does not
/// matter modulo the total periods; by default the marked reference is
/// used when the source is marked, else the canonical straight path.
inline TorusElement chasles_phi(const Scenario& s, const PathSample& gamma,
                                const PathSample& gamma2,
                                const std::optional<PathSample>& delta =
                                    std::nullopt) {
  require(quotient_distance(*s.space, gamma.start(), gamma2.start()) <= 1e-9 &&
              quotient_distance(*s.space, gamma.end(), gamma2.end()) <= 1e-9,
          errc::endpoint_mismatch,
          "Chasles phase needs paths with the same endpoints");
  PathSample d = [&] {
    if (delta) {
      require(quotient_distance(*s.space, delta->start(), s.x0) <= 1e-9 &&
                  quotient_distance(*s.space, delta->end(), gamma.start()) <=
                      1e-9,
              errc::endpoint_mismatch,
              "delta must run from the basepoint to the common source");
      return *delta;
    }
    if (const MarkedPoint* m = s.find_marked(gamma.start()))
      return m->reference;
    return detail::default_reference(s.space, s.x0, gamma.start(), s.grid_n);
  }();
  PathSample joint = concat(gamma, reverse(gamma2));
  PathSample loop = concat(concat(d, joint), reverse(d));
  return global_psi(s, loop);
}

/// Morphism class of a path between marked points: the Chasles phase
/// against the composite reference (source reference reversed, then the
/// target reference).
inline Morphism class_of(const Scenario& s, const PathSample& gamma) {
  const MarkedPoint* src = s.find_marked(gamma.start());
  const MarkedPoint* tgt = s.find_marked(gamma.end());
  require(src != nullptr && tgt != nullptr, errc::unmarked_endpoint,
          "path endpoints must be marked points");
  PathSample ref = concat(reverse(src->reference), tgt->reference);
  TorusElement phase = chasles_phi(s, gamma, ref, src->reference);
  return {src->id, tgt->id, phase};
}

inline Morphism identity_at(const Scenario& s, const std::string& marked_id) {
  (void)s.marked_by_id(marked_id);
  return {marked_id, marked_id, TorusElement::zero(s.p_omega)};
}

inline Morphism compose(const Scenario& s, const Morphism& a,
                        const Morphism& b) {
  (void)s;
  require(a.tgt == b.src, errc::endpoint_mismatch,
          "compose needs the first target to equal the second source");
  return {a.src, b.tgt, a.phase + b.phase};
}

inline Morphism inverse(const Morphism& a) {
  return {a.tgt, a.src, -a.phase};
}

inline bool same_morphism(const Morphism& a, const Morphism& b) {
  return a.src == b.src && a.tgt == b.tgt && a.phase.equals(b.phase);
}

/// Constructs, for each target phase, a contractible loop at the marked
/// point whose global phase is the target: torus and uniform-field
/// rectangles with tuned area, sphere-factor cap boundaries with tuned
/// height. Zero-form scenarios can only reach the zero phase.
inline std::vector<PathSample> isotropy_probe(
    const Scenario& s, const std::string& marked_id,
    const std::vector<TorusElement>& targets) {
  const MarkedPoint& m = s.marked_by_id(marked_id);
  const size_t n = s.grid_n;
  std::vector<PathSample> out;

  auto rectangle = [&](const Vec& corner, double a, double b) {
    // counter-clockwise boundary of [x, x+a] x [y, y+b]
    std::vector<Vec> pts;
    const size_t per = n / 4;
    auto edge = [&](Vec from, Vec to) {
      for (size_t k = 0; k < per; ++k) {
        const double u = static_cast<double>(k) / static_cast<double>(per);
        pts.push_back((1.0 - u) * from + u * to);
      }
    };
    const Vec c1{corner[0] + a, corner[1]};
    const Vec c2{corner[0] + a, corner[1] + b};
    const Vec c3{corner[0], corner[1] + b};
    edge(corner, c1);
    edge(c1, c2);
    edge(c2, c3);
    edge(c3, corner);
    pts.push_back(corner);
    return PathSample::make(s.space, std::move(pts), true);
  };

  for (const auto& target : targets) {
    const double rep = target.reduce().float_representative();
    if (std::abs(rep) <= 1e-15) {
      out.push_back(constant_path(s.space, m.position, n));
      continue;
    }
    if (s.space->zero_form())
      raise(errc::unreachable_phase,
            "the zero form reaches only the zero phase");
    if (s.space->as<FlatTorus>()) {
      const double side = std::sqrt(std::abs(rep));
      out.push_back(rep > 0 ? rectangle(m.position, side, side)
                            : reverse(rectangle(m.position, side, side)));
      continue;
    }
    if (const auto* pp = s.space->as<PuncturedPlane>()) {
      require(pp->kind == FormKind::uniform, errc::unsupported_model,
              "constructive probes need the uniform field");
      const double area = std::abs(rep) / pp->uniform_b;
      const double side = std::sqrt(area);
      const Vec& corner = m.position;
      // The loop must stay based at the marked point, so reject targets
      // whose rectangle would reach the puncture at the origin.
      const bool covers_origin =
          corner[0] <= 1e-6 && corner[0] + side >= -1e-6 &&
          corner[1] <= 1e-6 && corner[1] + side >= -1e-6;
      require(!covers_origin, errc::unreachable_phase,
              "probe rectangle based at this point would cross the puncture");
      out.push_back(rep > 0 ? rectangle(corner, side, side)
                            : reverse(rectangle(corner, side, side)));
      continue;
    }
    // sphere factor probes: cap boundary at tuned colatitude, based data
    // frozen elsewhere
    const TwoSphere* sph = s.space->as<TwoSphere>();
    const ProductSpace* pr = s.space->as<ProductSpace>();
    const TwoSphere* factor =
        sph ? sph : (pr ? pr->left->as<TwoSphere>() : nullptr);
    if (factor != nullptr) {
      const double scale = factor->scale;
      const double frac = rep / scale;
      require(frac > -1.0 && frac < 1.0, errc::unreachable_phase,
              "cap phase outside the sphere's range");
      const double c = 1.0 - 2.0 * std::abs(frac);
      const double sin_th = std::sqrt(std::max(0.0, 1.0 - c * c));
      std::vector<Vec> pts;
      for (size_t k = 0; k <= n; ++k) {
        const double u = 2.0 * M_PI * static_cast<double>(k) /
                         static_cast<double>(n);
        const double dir = frac > 0 ? 1.0 : -1.0;
        pts.push_back(Vec{sin_th * std::cos(dir * u),
                          sin_th * std::sin(dir * u), c});
      }
      pts.back() = pts.front();
      PathSample cap = PathSample::make(
          sph ? s.space : pr->left, std::move(pts), true);
      out.push_back(sph ? cap
                        : embed_in_product(
                              s.space, cap,
                              slice(m.position, pr->left->dim(),
                                    pr->right->dim()),
                              true));
      continue;
    }
    raise(errc::unsupported_model,
          "no constructive probe family on " + s.space->kind_name());
  }
  return out;
}

/// Morphism class twisted by the scenario's flat character: defined on
/// flat scenarios only; the phase is the character evaluated on the
/// loop's component, which is exact.
inline Morphism flat_class_of(const Scenario& s, const PathSample& gamma) {
  require(s.space->zero_form(), errc::not_flat,
          "twisted classes live on flat scenarios");
  require(s.twist.has_value(), errc::not_flat,
          "scenario declares no flat twist");
  require(gamma.closed(), errc::not_closed, "twisted classes of loops only");
  const MarkedPoint* base = s.find_marked(gamma.start());
  require(base != nullptr, errc::unmarked_endpoint,
          "loop basepoint must be a marked point");
  GroupElement cls = s.component_of(gamma);
  TorusElement phase = TorusElement::zero(s.p_omega);
  for (const auto& l : cls.word())
    phase += l.exp * s.twist->values[l.gen];
  return {base->id, base->id, phase};
}

/// Holonomy of the scenario's natural connection at the basepoint.
struct HolonomyDescriptor {
  enum class Kind { subgroup, continuum } kind = Kind::subgroup;
  PeriodGroupPtr subgroup;  // Kind::subgroup: generated by the listed reps
  std::string note;
  // Kind::continuum: two loops witnessing a connected family of phases.
  double witness_radius_a = 0.0, witness_radius_b = 0.0;
  double action_a = 0.0, action_b = 0.0;
};

inline HolonomyDescriptor holonomy_group(const Scenario& s) {
  HolonomyDescriptor out;
  if (s.twist) {
    std::vector<ExactReal> gens;
    for (const auto& v : s.twist->values) gens.push_back(v.representative());
    out.kind = HolonomyDescriptor::Kind::subgroup;
    out.subgroup = generate(s.symbols, std::move(gens));
    out.note = "subgroup of the period torus generated by the twist values";
    return out;
  }
  if (s.space->zero_form()) {
    out.kind = HolonomyDescriptor::Kind::subgroup;
    out.subgroup = generate(s.symbols, {});
    out.note = "untwisted flat scenario: trivial holonomy";
    return out;
  }
  if (const auto* pp = s.space->as<PuncturedPlane>();
      pp != nullptr && pp->kind == FormKind::magnetic) {
    // The magnetic form is exact away from the puncture: holonomy phases
    // of the winding-1 circles scale as 2 pi log r, a continuum.
    out.kind = HolonomyDescriptor::Kind::continuum;
    out.witness_radius_a = 1.0;
    out.witness_radius_b = 2.0;
    GroupElement one = GroupElement::from_exponents(*s.presentation, {1});
    for (int which = 0; which < 2; ++which) {
      const double r = which == 0 ? out.witness_radius_a : out.witness_radius_b;
      std::vector<Vec> pts;
      for (size_t k = 0; k <= s.grid_n; ++k) {
        const double u = 2.0 * M_PI * static_cast<double>(k) /
                         static_cast<double>(s.grid_n);
        pts.push_back(Vec{r * std::cos(u), r * std::sin(u)});
      }
      pts.back() = pts.front();
      PathSample circle = PathSample::make(s.space, std::move(pts), true);
      PathSample base = s.basis_loop_of(one);
      HomotopySample h = straight_homotopy(base, circle, s.grid_s);
      const double a = action_integral(*s.space, h, s.quad_tolerance).value;
      (which == 0 ? out.action_a : out.action_b) = a;
    }
    out.note =
        "isotropy phases vary continuously with the loop radius; the "
        "holonomy group is not discrete";
    return out;
  }
  raise(errc::unsupported_model,
        "holonomy descriptor defined for flat scenarios and the magnetic "
        "punctured plane");
}

/// Pushes a path forward through a form-preserving symmetry, pointwise.
inline PathSample pushforward_symmetry(const Scenario& s, const Symmetry& g,
                                       const PathSample& p) {
  std::vector<Vec> pts;
  pts.reserve(p.points().size());
  for (const auto& q : p.points())
    pts.push_back(apply_symmetry(*s.space, g, q));
  return PathSample::make(s.space, std::move(pts), p.closed());
}

/// Character of the period torus T = R/P: for discrete nontrivial P with
/// positive generator g, chi_n(t) = exp(2 pi i n t / g); for trivial P,
/// chi_k(t) = exp(i k t); dense P admits only the trivial character.
class TorusCharacter {
public:
  static TorusCharacter make(const Scenario& s, double index) {
    TorusCharacter c;
    c.group_ = s.p_omega;
    if (s.p_omega->is_trivial()) {
      c.k_ = index;
      return c;
    }
    if (s.p_omega->rank() == 1) {
      const double n = std::nearbyint(index);
      require(std::abs(index - n) <= 1e-12, errc::incompatible_character,
              "characters of a discrete quotient have integer index");
      c.k_ = 2.0 * M_PI * n / s.p_omega->canonical_generator()->value();
      return c;
    }
    require(index == 0.0, errc::incompatible_character,
            "a dense period group admits only the trivial character");
    c.k_ = 0.0;
    return c;
  }

  std::complex<double> operator()(const TorusElement& t) const {
    require(t.group() == group_, errc::invalid_argument,
            "character applied to an element of another torus");
    return std::polar(1.0, k_ * t.float_representative());
  }

private:
  PeriodGroupPtr group_;
  double k_ = 0.0;
};

/// Wave-function value of a morphism under a character: chi applied to
/// the phase. Multiplicative over composition by construction; the
/// substance is that composition mirrors path concatenation.
inline std::complex<double> multiplicative_wavefunction(
    const Scenario& s, const TorusCharacter& chi, const Morphism& m) {
  (void)s;
  return chi(m.phase);
}

}  // namespace prequant
