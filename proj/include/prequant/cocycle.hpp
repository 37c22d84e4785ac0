#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "prequant/action.hpp"
#include "prequant/errors.hpp"
#include "prequant/geometry.hpp"
#include "prequant/periods.hpp"
#include "prequant/snapping.hpp"
#include "prequant/words.hpp"

namespace prequant {

/// Identifies the homotopy class of a closed sampled loop as an element of
/// the scenario's fundamental group. Torus: lattice coordinates of the
/// cover displacement. Punctured plane: winding number. Two-holes plane:
/// the free-group word read off the crossing sequence of the two downward
/// cut rays (a positive letter for a left-to-right crossing below hole k).
/// Simply connected models return the identity.
inline GroupElement component_index(const ModelSpace& m,
                                    const Presentation& pres,
                                    const PathSample& loop) {
  require(loop.closed(), errc::not_closed,
          "component index requires a closed loop");
  const auto& pts = loop.points();
  switch (pres.kind()) {
    case GroupKind::trivial:
      return GroupElement::identity(pres);
    case GroupKind::free_abelian: {
      auto d = lift_displacement(m, pts);
      require(d.size() == pres.rank(), errc::invalid_argument,
              "presentation rank does not match the model's winding data");
      return GroupElement::from_exponents(pres, std::move(d));
    }
    case GroupKind::free_group: {
      const auto* h = m.as<TwoHolesPlane>();
      require(h != nullptr && pres.rank() == 2, errc::unsupported_model,
              "free-group component detection is defined on the "
              "two-holes plane");
      Word w;
      const double rays[2][2] = {{h->p1[0], h->p1[1]}, {h->p2[0], h->p2[1]}};
      for (size_t i = 0; i + 1 < pts.size(); ++i) {
        const double px = pts[i][0], py = pts[i][1];
        const double qx = pts[i + 1][0], qy = pts[i + 1][1];
        // Collect both-ray crossings of this segment in traversal order.
        std::vector<std::pair<double, Letter>> hits;
        for (size_t k = 0; k < 2; ++k) {
          const double hx = rays[k][0], hy = rays[k][1];
          const bool sp = px < hx, sq = qx < hx;
          if (sp == sq) continue;
          const double t = (hx - px) / (qx - px);
          const double y = py + t * (qy - py);
          if (y < hy)
            hits.push_back({t, Letter{k, qx > px ? 1 : -1}});
        }
        std::sort(hits.begin(), hits.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        for (auto& [t, l] : hits) w.push_back(l);
      }
      return GroupElement::from_word(pres, w);
    }
    case GroupKind::surface:
      raise(errc::unsupported_model,
            "surface-group component detection needs declared data");
  }
  raise(errc::unsupported_model, "component detection");
}

/// Canonical basis loop of a homotopy class, based at x0.
///   torus: straight cover segment from x0 along the class displacement;
///   punctured plane: the circle through x0 about the puncture, wound n
///     times with the segment budget applied per winding;
///   two-holes plane: letter-by-letter concatenation of lollipop loops
///     (straight stick to the right side of the hole, a radius-1/2 circle,
///     stick back);
///   simply connected models: the constant loop.
inline PathSample basis_loop(ModelSpacePtr space, const Presentation& pres,
                             const GroupElement& cls, const Vec& x0,
                             size_t segments) {
  const ModelSpace& m = *space;
  check_dimension(m, x0, "basepoint");
  segments = std::max<size_t>(4, segments + segments % 2);
  if (cls.is_identity()) return constant_path(space, x0, segments);

  if (const auto* t = m.as<FlatTorus>()) {
    require(pres.kind() == GroupKind::free_abelian && pres.rank() == 2,
            errc::invalid_argument, "torus classes are pairs of integers");
    const auto& e = cls.exponents();
    const double dx =
        t->bf[0][0] * static_cast<double>(e[0]) + t->bf[0][1] * static_cast<double>(e[1]);
    const double dy =
        t->bf[1][0] * static_cast<double>(e[0]) + t->bf[1][1] * static_cast<double>(e[1]);
    std::vector<Vec> pts;
    pts.reserve(segments + 1);
    for (size_t k = 0; k <= segments; ++k) {
      const double u = static_cast<double>(k) / static_cast<double>(segments);
      pts.push_back(Vec{x0[0] + u * dx, x0[1] + u * dy});
    }
    return PathSample::make(space, std::move(pts), true);
  }

  if (m.as<PuncturedPlane>()) {
    require(pres.kind() == GroupKind::free_abelian && pres.rank() == 1,
            errc::invalid_argument, "punctured-plane classes are integers");
    const long n = cls.exponents()[0];
    const double r = norm(x0);
    require(r > 1e-9, errc::removed_point, "basepoint at the puncture");
    const double theta0 = std::atan2(x0[1], x0[0]);
    // The segment budget is per winding: every class loop then traverses
    // the same inscribed polygon, so class loops of different windings
    // enclose exactly proportional flux and concatenations of them match
    // the product's loop node for node.
    const size_t total = segments * static_cast<size_t>(n < 0 ? -n : n);
    std::vector<Vec> pts;
    pts.reserve(total + 1);
    for (size_t k = 0; k <= total; ++k) {
      const double u = static_cast<double>(k) / static_cast<double>(total);
      const double th = theta0 + 2.0 * M_PI * static_cast<double>(n) * u;
      pts.push_back(Vec{r * std::cos(th), r * std::sin(th)});
    }
    // close exactly
    pts.back() = pts.front();
    return PathSample::make(space, std::move(pts), true);
  }

  if (const auto* h = m.as<TwoHolesPlane>()) {
    require(pres.kind() == GroupKind::free_group && pres.rank() == 2,
            errc::invalid_argument,
            "two-holes classes are words in two generators");
    const Word w = cls.word();
    const size_t per = std::max<size_t>(32, segments / std::max<size_t>(1, w.size()));
    auto letter_loop = [&](const Letter& l) {
      const double hx = l.gen == 0 ? h->p1[0] : h->p2[0];
      const double hy = l.gen == 0 ? h->p1[1] : h->p2[1];
      const double rad = 0.5;
      const Vec anchor{hx + rad, hy};
      const size_t stick = per / 4 + 1, circ = per;
      std::vector<Vec> pts;
      for (size_t k = 0; k <= stick; ++k) {
        const double u = static_cast<double>(k) / static_cast<double>(stick);
        pts.push_back((1.0 - u) * x0 + u * anchor);
      }
      for (size_t k = 1; k <= circ; ++k) {
        const double phi = 2.0 * M_PI * static_cast<double>(l.exp) *
                           static_cast<double>(k) / static_cast<double>(circ);
        pts.push_back(Vec{hx + rad * std::cos(phi), hy + rad * std::sin(phi)});
      }
      for (size_t k = 1; k <= stick; ++k) {
        const double u = static_cast<double>(k) / static_cast<double>(stick);
        pts.push_back((1.0 - u) * anchor + u * x0);
      }
      pts.back() = x0;
      return PathSample::make(space, std::move(pts), true);
    };
    PathSample acc = letter_loop(w.front());
    for (size_t i = 1; i < w.size(); ++i) acc = concat(acc, letter_loop(w[i]));
    return acc;
  }

  raise(errc::unsupported_model,
        "no canonical basis family on " + m.kind_name() +
            " for nontrivial classes");
}

/// Group 2-cocycle of the scenario, either measured geometrically (action
/// integral of the straight homotopy from the product's basis loop to the
/// concatenation, snapped, reduced modulo the toric periods) or read from
/// a declared finite table. Values are memoized; the memo is mutex-guarded.
class CocycleTable {
public:
  struct Geometric {
    ModelSpacePtr space;
    const Presentation* presentation = nullptr;
    Vec x0;
    size_t loop_segments = 256;
    size_t homotopy_rows = 256;
    SnappingPolicy snapping;
    PeriodGroupPtr toric;
    double tolerance = 0.0;  // forwarded to the quadrature when positive
    // Optional replacement basis family (custom or perturbed loops). When
    // unset the canonical family is used.
    std::function<PathSample(const GroupElement&)> loops;
  };

  struct Declared {
    const Presentation* presentation = nullptr;
    std::map<std::pair<std::string, std::string>, ExactReal> values;
    PeriodGroupPtr toric;
  };

  /// One computed value with its provenance: the float action before
  /// snapping and the quadrature error estimate (both zero for declared
  /// or structurally exact entries).
  struct Entry {
    TorusElement value;
    double raw = 0.0;
    double error_estimate = 0.0;
    bool fresh = false;
  };

  explicit CocycleTable(Geometric g) : mode_(std::move(g)) {}
  explicit CocycleTable(Declared d) : mode_(std::move(d)) {}

  bool declared() const { return std::holds_alternative<Declared>(mode_); }

  const Presentation& presentation() const {
    return declared() ? *std::get<Declared>(mode_).presentation
                      : *std::get<Geometric>(mode_).presentation;
  }

  const PeriodGroupPtr& toric() const {
    return declared() ? std::get<Declared>(mode_).toric
                      : std::get<Geometric>(mode_).toric;
  }

  /// Warnings accumulated by snapping (geometric mode).
  std::vector<std::string> warnings() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return warnings_;
  }

  Entry entry(const GroupElement& i, const GroupElement& j) const {
    const std::string key = i.key() + " | " + j.key();
    {
      std::lock_guard<std::mutex> lock(mutex_);
      auto it = memo_.find(key);
      if (it != memo_.end()) return it->second;
    }
    Entry value = compute(i, j);
    std::lock_guard<std::mutex> lock(mutex_);
    auto [it, inserted] = memo_.emplace(key, std::move(value));
    return it->second;
  }

  TorusElement tau(const GroupElement& i, const GroupElement& j) const {
    return entry(i, j).value;
  }

private:
  Entry compute(const GroupElement& i, const GroupElement& j) const {
    if (const auto* d = std::get_if<Declared>(&mode_)) {
      if (i.is_identity() || j.is_identity())
        return {TorusElement::zero(d->toric), 0.0, 0.0, false};
      auto it = d->values.find({i.key(), j.key()});
      if (it == d->values.end())
        raise(errc::missing_declared_value,
              "no declared cocycle value for (" + i.key() + ", " + j.key() +
                  ")");
      return {TorusElement(d->toric, it->second), it->second.value(), 0.0,
              false};
    }
    const auto& g = std::get<Geometric>(mode_);
    if (g.space->zero_form() || i.is_identity() || j.is_identity())
      return {TorusElement::zero(g.toric), 0.0, 0.0, false};
    auto loop_of = [&](const GroupElement& cls) {
      if (g.loops) return g.loops(cls);
      return basis_loop(g.space, *g.presentation, cls, g.x0, g.loop_segments);
    };
    PathSample li = loop_of(i);
    PathSample lj = loop_of(j);
    PathSample lij = loop_of(i * j);
    PathSample target = concat(li, lj);
    HomotopySample h = straight_homotopy(lij, target, g.homotopy_rows);
    ActionResult a = action_integral(*g.space, h, g.tolerance);
    SnapResult s = snap(g.snapping, a.value);
    if (s.fresh) {
      std::lock_guard<std::mutex> lock(mutex_);
      warnings_.push_back("cocycle(" + i.key() + ", " + j.key() + "): " +
                          s.warning);
    }
    return {TorusElement(g.toric, s.value), a.value, a.error_estimate,
            s.fresh};
  }

  std::variant<Geometric, Declared> mode_;
  mutable std::mutex mutex_;
  mutable std::map<std::string, Entry> memo_;
  mutable std::vector<std::string> warnings_;
};

/// Element (g, u) of the central extension defined by the cocycle:
/// (g, u) * (h, v) = (g h, u + v + tau(g, h)).
struct ExtensionElement {
  GroupElement g;
  TorusElement u;
};

inline ExtensionElement ext_mul(const CocycleTable& table,
                                const ExtensionElement& x,
                                const ExtensionElement& y) {
  return {x.g * y.g, x.u + y.u + table.tau(x.g, y.g)};
}

inline ExtensionElement ext_section(const CocycleTable& table,
                                    const GroupElement& g) {
  return {g, TorusElement::zero(table.toric())};
}

inline ExtensionElement ext_section_inverse(const CocycleTable& table,
                                            const GroupElement& g) {
  GroupElement gi = g.inverse();
  return {gi, -table.tau(g, gi)};
}

struct AccumulatedDetail {
  TorusElement value;
  double raw = 0.0;             // float sum of the folded cocycle values
  double error_estimate = 0.0;  // summed quadrature estimates
};

/// Folds a word letter-by-letter through the extension sections. The word
/// must be a relation (reduce to the identity); the returned value is the
/// accumulated cocycle of the relation in the toric quotient.
inline AccumulatedDetail accumulated_cocycle_detail(const CocycleTable& table,
                                                    const Word& word) {
  const Presentation& p = table.presentation();
  AccumulatedDetail out{TorusElement::zero(table.toric())};
  GroupElement acc = GroupElement::identity(p);
  for (const auto& l : word) {
    GroupElement g = GroupElement::from_word(p, Word{{l.gen, 1}});
    GroupElement step = l.exp > 0 ? g : g.inverse();
    const long reps = l.exp > 0 ? l.exp : -l.exp;
    for (long r = 0; r < reps; ++r) {
      if (l.exp < 0) {
        CocycleTable::Entry e = table.entry(g, step);
        out.value -= e.value;
        out.raw -= e.raw;
        out.error_estimate += e.error_estimate;
      }
      CocycleTable::Entry e = table.entry(acc, step);
      out.value += e.value;
      out.raw += e.raw;
      out.error_estimate += e.error_estimate;
      acc = acc * step;
    }
  }
  require(acc.is_identity(), errc::not_a_relation,
          "word '" + p.format_word(word) + "' does not reduce to the identity");
  return out;
}

inline TorusElement accumulated_cocycle(const CocycleTable& table,
                                        const Word& word) {
  return accumulated_cocycle_detail(table, word).value;
}

/// Residual of the group 2-cocycle identity
///   tau(i,j) + tau(i*j,k) = tau(i,j*k) + tau(j,k)
/// as a float distance in the toric quotient; exactly-cancelling values
/// return 0.
inline double verify_cocycle_identity(const CocycleTable& table,
                                      const GroupElement& i,
                                      const GroupElement& j,
                                      const GroupElement& k) {
  TorusElement lhs = table.tau(i, j) + table.tau(i * j, k);
  TorusElement rhs = table.tau(i, j * k) + table.tau(j, k);
  TorusElement diff = lhs - rhs;
  if (diff.is_zero()) return 0.0;
  return diff.group()->float_distance(diff.representative().value());
}

}  // namespace prequant
