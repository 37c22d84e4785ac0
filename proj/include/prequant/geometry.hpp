#pragma once

#include <gmpxx.h>

#include <array>
#include <cmath>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "prequant/errors.hpp"

namespace prequant {

/// Small inline coordinate vector. Model spaces in this engine have chart
/// dimension at most 8 (products of two base factors), so a fixed-capacity
/// array avoids heap traffic in the quadrature kernels.
struct Vec {
  static constexpr size_t capacity = 8;
  std::array<double, capacity> a{};
  uint8_t n = 0;

  Vec() = default;
  Vec(std::initializer_list<double> xs) {
    require(xs.size() <= capacity, errc::dimension_mismatch,
            "vector dimension exceeds capacity");
    n = static_cast<uint8_t>(xs.size());
    size_t i = 0;
    for (double x : xs) a[i++] = x;
  }
  explicit Vec(const std::vector<double>& xs) {
    require(xs.size() <= capacity, errc::dimension_mismatch,
            "vector dimension exceeds capacity");
    n = static_cast<uint8_t>(xs.size());
    for (size_t i = 0; i < xs.size(); ++i) a[i] = xs[i];
  }

  size_t size() const { return n; }
  double& operator[](size_t i) { return a[i]; }
  double operator[](size_t i) const { return a[i]; }

  std::vector<double> to_vector() const {
    return std::vector<double>(a.begin(), a.begin() + n);
  }

  friend Vec operator+(Vec x, const Vec& y) {
    for (size_t i = 0; i < x.n; ++i) x.a[i] += y.a[i];
    return x;
  }
  friend Vec operator-(Vec x, const Vec& y) {
    for (size_t i = 0; i < x.n; ++i) x.a[i] -= y.a[i];
    return x;
  }
  friend Vec operator*(double s, Vec x) {
    for (size_t i = 0; i < x.n; ++i) x.a[i] *= s;
    return x;
  }
};

inline double dot(const Vec& x, const Vec& y) {
  double s = 0.0;
  for (size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

inline double norm(const Vec& x) { return std::sqrt(dot(x, x)); }

inline Vec cross3(const Vec& x, const Vec& y) {
  return Vec{x[1] * y[2] - x[2] * y[1], x[2] * y[0] - x[0] * y[2],
             x[0] * y[1] - x[1] * y[0]};
}

inline Vec slice(const Vec& x, size_t from, size_t count) {
  Vec out;
  out.n = static_cast<uint8_t>(count);
  for (size_t i = 0; i < count; ++i) out.a[i] = x[from + i];
  return out;
}

inline Vec join(const Vec& x, const Vec& y) {
  require(x.size() + y.size() <= Vec::capacity, errc::dimension_mismatch,
          "joined dimension exceeds capacity");
  Vec out = x;
  out.n = static_cast<uint8_t>(x.size() + y.size());
  for (size_t i = 0; i < y.size(); ++i) out.a[x.size() + i] = y[i];
  return out;
}

using ChartPoint = Vec;

struct TangentPair {
  Vec u, v;
};

enum class FormKind { magnetic, zero, uniform };

inline const char* form_kind_name(FormKind k) {
  switch (k) {
    case FormKind::magnetic: return "Magnetic";
    case FormKind::zero: return "Zero";
    case FormKind::uniform: return "Uniform";
  }
  return "?";
}

/// Quotient of the euclidean plane by a rank-2 lattice, carrying the
/// standard area form dx^dy. Points are stored as universal-cover
/// coordinates; the lattice basis only enters the quotient structure.
struct FlatTorus {
  std::array<std::array<mpq_class, 2>, 2> basis;  // basis[k] = k-th vector

  // float caches, filled by ModelSpace
  double bf[2][2] = {{1, 0}, {0, 1}};
  double inv[2][2] = {{1, 0}, {0, 1}};
  double det = 1.0;
};

/// Plane with the origin removed.
struct PuncturedPlane {
  FormKind kind = FormKind::magnetic;
  double uniform_b = 1.0;  // used only for FormKind::uniform
};

/// Unit sphere embedded in R^3 with the area form scaled so the total
/// surface integral equals `scale`.
struct TwoSphere {
  double scale = 1.0;
};

/// Plane with two distinct points removed.
struct TwoHolesPlane {
  std::array<double, 2> p1{-1.0, 0.0};
  std::array<double, 2> p2{1.0, 0.0};
  FormKind kind = FormKind::zero;
  double uniform_b = 1.0;
};

/// Closed orientable surface of genus >= 2, carried with no numeric chart:
/// all pointwise geometry is unsupported and the scenario must declare its
/// cocycle data. Points are zero-dimensional placeholders.
struct AbstractSurface {
  size_t genus = 2;
};

class ModelSpace;
using ModelSpacePtr = std::shared_ptr<const ModelSpace>;

/// Product of two model spaces with the sum of the pulled-back forms.
struct ProductSpace {
  ModelSpacePtr left, right;
};

class ModelSpace {
public:
  using Variant =
      std::variant<FlatTorus, PuncturedPlane, TwoSphere, TwoHolesPlane,
                   AbstractSurface, ProductSpace>;

  explicit ModelSpace(Variant v) : v_(std::move(v)) { finish(); }

  static ModelSpacePtr make(Variant v) {
    return std::make_shared<ModelSpace>(std::move(v));
  }

  const Variant& variant() const { return v_; }

  template <class T>
  const T* as() const {
    return std::get_if<T>(&v_);
  }

  size_t dim() const { return dim_; }

  /// Structurally zero two-form (every evaluation is exactly 0).
  bool zero_form() const { return zero_form_; }

  std::string kind_name() const {
    if (as<FlatTorus>()) return "FlatTorus";
    if (as<PuncturedPlane>()) return "PuncturedPlane";
    if (as<TwoSphere>()) return "TwoSphere";
    if (as<TwoHolesPlane>()) return "TwoHolesPlane";
    if (as<AbstractSurface>()) return "AbstractSurface";
    return "Product";
  }

private:
  void finish() {
    if (auto* t = std::get_if<FlatTorus>(&v_)) {
      mpq_class d = t->basis[0][0] * t->basis[1][1] -
                    t->basis[0][1] * t->basis[1][0];
      require(d != 0, errc::invalid_argument, "torus lattice is degenerate");
      for (int k = 0; k < 2; ++k)
        for (int i = 0; i < 2; ++i) t->bf[i][k] = t->basis[k][i].get_d();
      t->det = t->bf[0][0] * t->bf[1][1] - t->bf[0][1] * t->bf[1][0];
      t->inv[0][0] = t->bf[1][1] / t->det;
      t->inv[0][1] = -t->bf[0][1] / t->det;
      t->inv[1][0] = -t->bf[1][0] / t->det;
      t->inv[1][1] = t->bf[0][0] / t->det;
      dim_ = 2;
      zero_form_ = false;
    } else if (auto* p = std::get_if<PuncturedPlane>(&v_)) {
      dim_ = 2;
      zero_form_ = p->kind == FormKind::zero ||
                   (p->kind == FormKind::uniform && p->uniform_b == 0.0);
    } else if (auto* s = std::get_if<TwoSphere>(&v_)) {
      dim_ = 3;
      zero_form_ = s->scale == 0.0;
    } else if (auto* h = std::get_if<TwoHolesPlane>(&v_)) {
      require(h->p1 != h->p2, errc::invalid_argument,
              "two-holes plane requires distinct removed points");
      dim_ = 2;
      zero_form_ = h->kind == FormKind::zero ||
                   (h->kind == FormKind::uniform && h->uniform_b == 0.0);
    } else if (auto* a = std::get_if<AbstractSurface>(&v_)) {
      require(a->genus >= 2, errc::invalid_argument,
              "abstract surfaces need genus >= 2");
      dim_ = 0;
      zero_form_ = false;
    } else {
      auto& pr = std::get<ProductSpace>(v_);
      require(pr.left && pr.right, errc::invalid_argument,
              "product factors must be non-null");
      dim_ = pr.left->dim() + pr.right->dim();
      require(dim_ <= Vec::capacity, errc::dimension_mismatch,
              "product dimension exceeds supported capacity");
      zero_form_ = pr.left->zero_form() && pr.right->zero_form();
    }
  }

  Variant v_;
  size_t dim_ = 0;
  bool zero_form_ = false;
};

inline void check_dimension(const ModelSpace& m, const Vec& p,
                            const char* what) {
  require(p.size() == m.dim(), errc::dimension_mismatch,
          std::string(what) + ": expected dimension " +
              std::to_string(m.dim()) + ", got " + std::to_string(p.size()));
}

/// Proximity guard for deleted points (distance below 1e-9).
inline void check_removed(const ModelSpace& m, const Vec& p) {
  if (const auto* pp = m.as<PuncturedPlane>()) {
    (void)pp;
    if (p[0] * p[0] + p[1] * p[1] < 1e-18)
      raise(errc::removed_point, "point at the puncture");
  } else if (const auto* h = m.as<TwoHolesPlane>()) {
    const double d1x = p[0] - h->p1[0], d1y = p[1] - h->p1[1];
    const double d2x = p[0] - h->p2[0], d2y = p[1] - h->p2[1];
    if (d1x * d1x + d1y * d1y < 1e-18 || d2x * d2x + d2y * d2y < 1e-18)
      raise(errc::removed_point, "point at a removed hole");
  } else if (const auto* pr = m.as<ProductSpace>()) {
    check_removed(*pr->left, slice(p, 0, pr->left->dim()));
    check_removed(*pr->right, slice(p, pr->left->dim(), pr->right->dim()));
  }
}

/// Normalizes computed intermediate points back onto the model (sphere
/// points to unit length; products factorwise). No-op on flat charts.
inline void canonicalize_point(const ModelSpace& m, Vec& p) {
  if (m.as<TwoSphere>()) {
    const double r = norm(p);
    require(r > 1e-12, errc::invalid_argument, "cannot normalize zero vector");
    const double inv = 1.0 / r;
    for (size_t i = 0; i < p.size(); ++i) p[i] *= inv;
  } else if (const auto* pr = m.as<ProductSpace>()) {
    Vec l = slice(p, 0, pr->left->dim());
    Vec r = slice(p, pr->left->dim(), pr->right->dim());
    canonicalize_point(*pr->left, l);
    canonicalize_point(*pr->right, r);
    p = join(l, r);
  }
}

/// Projects a computed tangent onto the tangent space at p (sphere:
/// removes the radial component; products factorwise). The sphere area
/// form is insensitive to radial components, so this never changes
/// quadrature values, only restores the advertised orthogonality.
inline void project_tangent(const ModelSpace& m, const Vec& p, Vec& u) {
  if (m.as<TwoSphere>()) {
    const double c = dot(p, u) / dot(p, p);
    for (size_t i = 0; i < u.size(); ++i) u[i] -= c * p[i];
  } else if (const auto* pr = m.as<ProductSpace>()) {
    Vec pl = slice(p, 0, pr->left->dim());
    Vec ul = slice(u, 0, pr->left->dim());
    Vec prr = slice(p, pr->left->dim(), pr->right->dim());
    Vec ur = slice(u, pr->left->dim(), pr->right->dim());
    project_tangent(*pr->left, pl, ul);
    project_tangent(*pr->right, prr, ur);
    u = join(ul, ur);
  }
}

/// Evaluates the model's two-form at p on the tangent pair (u, v).
inline double eval_two_form(const ModelSpace& m, const Vec& p, const Vec& u,
                            const Vec& v) {
  check_dimension(m, p, "point");
  check_dimension(m, u, "tangent");
  check_dimension(m, v, "tangent");
  if (m.as<FlatTorus>()) {
    return u[0] * v[1] - u[1] * v[0];
  }
  if (const auto* pp = m.as<PuncturedPlane>()) {
    check_removed(m, p);
    const double cross = u[0] * v[1] - u[1] * v[0];
    switch (pp->kind) {
      case FormKind::magnetic: return cross / (p[0] * p[0] + p[1] * p[1]);
      case FormKind::zero: return 0.0;
      case FormKind::uniform: return pp->uniform_b * cross;
    }
  }
  if (const auto* s = m.as<TwoSphere>()) {
    const double nn = norm(p);
    require(std::abs(nn - 1.0) <= 1e-9, errc::invalid_argument,
            "sphere point must be unit length");
    require(std::abs(dot(p, u)) <= 1e-9 * (1.0 + norm(u)) &&
                std::abs(dot(p, v)) <= 1e-9 * (1.0 + norm(v)),
            errc::invalid_argument, "sphere tangents must be orthogonal to p");
    // Total integral over the sphere equals `scale`.
    return s->scale * dot(p, cross3(u, v)) / (4.0 * M_PI);
  }
  if (const auto* h = m.as<TwoHolesPlane>()) {
    check_removed(m, p);
    const double cross = u[0] * v[1] - u[1] * v[0];
    switch (h->kind) {
      case FormKind::magnetic: {
        const double d1x = p[0] - h->p1[0], d1y = p[1] - h->p1[1];
        const double d2x = p[0] - h->p2[0], d2y = p[1] - h->p2[1];
        return cross * (1.0 / (d1x * d1x + d1y * d1y) +
                        1.0 / (d2x * d2x + d2y * d2y));
      }
      case FormKind::zero: return 0.0;
      case FormKind::uniform: return h->uniform_b * cross;
    }
  }
  require(m.as<AbstractSurface>() == nullptr, errc::unsupported_model,
          "abstract surfaces carry no numeric two-form");
  const auto& pr = std::get<ProductSpace>(m.variant());
  const size_t dl = pr.left->dim();
  return eval_two_form(*pr.left, slice(p, 0, dl), slice(u, 0, dl),
                       slice(v, 0, dl)) +
         eval_two_form(*pr.right, slice(p, dl, pr.right->dim()),
                       slice(u, dl, pr.right->dim()),
                       slice(v, dl, pr.right->dim()));
}

inline double eval_two_form(const ModelSpace& m, const Vec& p,
                            const TangentPair& t) {
  return eval_two_form(m, p, t.u, t.v);
}

/// Projects a universal-cover point into the fundamental-domain chart.
/// Supported on models whose points are stored as cover coordinates.
inline Vec project(const ModelSpace& m, const Vec& p) {
  check_dimension(m, p, "point");
  if (const auto* t = m.as<FlatTorus>()) {
    const double y0 = t->inv[0][0] * p[0] + t->inv[0][1] * p[1];
    const double y1 = t->inv[1][0] * p[0] + t->inv[1][1] * p[1];
    const double f0 = y0 - std::floor(y0);
    const double f1 = y1 - std::floor(y1);
    return Vec{t->bf[0][0] * f0 + t->bf[0][1] * f1,
               t->bf[1][0] * f0 + t->bf[1][1] * f1};
  }
  if (m.as<PuncturedPlane>() || m.as<TwoHolesPlane>()) {
    check_removed(m, p);
    return p;
  }
  raise(errc::unsupported_model,
        "projection defined only for models with a euclidean cover");
}

/// Distance between the images of p and q in the model (torus: minimum
/// over lattice translates; other models: euclidean chart distance).
inline double quotient_distance(const ModelSpace& m, const Vec& p,
                                const Vec& q) {
  check_dimension(m, p, "point");
  check_dimension(m, q, "point");
  if (const auto* t = m.as<FlatTorus>()) {
    const double dx = p[0] - q[0], dy = p[1] - q[1];
    double y0 = t->inv[0][0] * dx + t->inv[0][1] * dy;
    double y1 = t->inv[1][0] * dx + t->inv[1][1] * dy;
    y0 -= std::nearbyint(y0);
    y1 -= std::nearbyint(y1);
    const double rx = t->bf[0][0] * y0 + t->bf[0][1] * y1;
    const double ry = t->bf[1][0] * y0 + t->bf[1][1] * y1;
    return std::sqrt(rx * rx + ry * ry);
  }
  if (const auto* pr = m.as<ProductSpace>()) {
    const size_t dl = pr->left->dim();
    const double a =
        quotient_distance(*pr->left, slice(p, 0, dl), slice(q, 0, dl));
    const double b = quotient_distance(*pr->right, slice(p, dl, pr->right->dim()),
                                       slice(q, dl, pr->right->dim()));
    return std::sqrt(a * a + b * b);
  }
  return norm(p - q);
}

/// Abelianized homotopy data of a closed sampled loop: lattice coordinates
/// of the cover displacement (torus), winding numbers about the removed
/// points (punctured models), empty for simply connected models; products
/// concatenate factor data.
inline std::vector<long> lift_displacement(const ModelSpace& m,
                                           std::span<const Vec> pts) {
  require(pts.size() >= 2, errc::invalid_argument,
          "loop needs at least two samples");
  for (const auto& p : pts) check_dimension(m, p, "loop point");
  if (const auto* t = m.as<FlatTorus>()) {
    require(quotient_distance(m, pts.front(), pts.back()) <= 1e-9,
            errc::not_closed, "loop endpoints differ in the quotient");
    const double dx = pts.back()[0] - pts.front()[0];
    const double dy = pts.back()[1] - pts.front()[1];
    const double y0 = t->inv[0][0] * dx + t->inv[0][1] * dy;
    const double y1 = t->inv[1][0] * dx + t->inv[1][1] * dy;
    const double r0 = std::nearbyint(y0), r1 = std::nearbyint(y1);
    require(std::abs(y0 - r0) <= 1e-6 && std::abs(y1 - r1) <= 1e-6,
            errc::not_closed, "cover displacement is not a lattice vector");
    return {static_cast<long>(r0), static_cast<long>(r1)};
  }
  auto winding_about = [&](double cx, double cy) {
    double total = 0.0;
    for (size_t i = 0; i + 1 < pts.size(); ++i) {
      const double ax = pts[i][0] - cx, ay = pts[i][1] - cy;
      const double bx = pts[i + 1][0] - cx, by = pts[i + 1][1] - cy;
      total += std::atan2(ax * by - ay * bx, ax * bx + ay * by);
    }
    const double turns = total / (2.0 * M_PI);
    const double r = std::nearbyint(turns);
    require(std::abs(turns - r) <= 1e-6, errc::not_closed,
            "winding number did not close up");
    return static_cast<long>(r);
  };
  if (m.as<PuncturedPlane>()) {
    require(norm(pts.front() - pts.back()) <= 1e-9, errc::not_closed,
            "loop endpoints differ");
    return {winding_about(0.0, 0.0)};
  }
  if (const auto* h = m.as<TwoHolesPlane>()) {
    require(norm(pts.front() - pts.back()) <= 1e-9, errc::not_closed,
            "loop endpoints differ");
    return {winding_about(h->p1[0], h->p1[1]),
            winding_about(h->p2[0], h->p2[1])};
  }
  if (m.as<TwoSphere>()) {
    require(norm(pts.front() - pts.back()) <= 1e-9, errc::not_closed,
            "loop endpoints differ");
    return {};
  }
  require(m.as<AbstractSurface>() == nullptr, errc::unsupported_model,
          "abstract surfaces have no sampled-loop invariants");
  const auto& pr = std::get<ProductSpace>(m.variant());
  const size_t dl = pr.left->dim();
  std::vector<Vec> left, right;
  left.reserve(pts.size());
  right.reserve(pts.size());
  for (const auto& p : pts) {
    left.push_back(slice(p, 0, dl));
    right.push_back(slice(p, dl, pr.right->dim()));
  }
  auto out = lift_displacement(*pr.left, left);
  auto rr = lift_displacement(*pr.right, right);
  out.insert(out.end(), rr.begin(), rr.end());
  return out;
}

// ---------------------------------------------------------------------------
// Form-preserving symmetries (pointwise maps; path/morphism pushforward is
// built on top of these).

struct TorusTranslation {
  double dx = 0.0, dy = 0.0;
};

struct PlaneRotation {
  double angle = 0.0;  // about the puncture
};

struct SphereRotation {
  std::array<double, 3> axis{0.0, 0.0, 1.0};
  double angle = 0.0;
};

struct Symmetry;
using SymmetryPtr = std::shared_ptr<const Symmetry>;

struct ProductSymmetry {
  SymmetryPtr left, right;  // either may be null (identity on that factor)
};

struct Symmetry {
  std::variant<TorusTranslation, PlaneRotation, SphereRotation,
               ProductSymmetry>
      v;
};

inline Vec apply_symmetry(const ModelSpace& m, const Symmetry& g,
                          const Vec& p) {
  check_dimension(m, p, "point");
  if (const auto* t = std::get_if<TorusTranslation>(&g.v)) {
    require(m.as<FlatTorus>() != nullptr, errc::unsupported_symmetry,
            "translation applies to the flat torus");
    return Vec{p[0] + t->dx, p[1] + t->dy};
  }
  if (const auto* r = std::get_if<PlaneRotation>(&g.v)) {
    require(m.as<PuncturedPlane>() != nullptr, errc::unsupported_symmetry,
            "rotation about the puncture applies to the punctured plane");
    const double c = std::cos(r->angle), s = std::sin(r->angle);
    return Vec{c * p[0] - s * p[1], s * p[0] + c * p[1]};
  }
  if (const auto* r = std::get_if<SphereRotation>(&g.v)) {
    require(m.as<TwoSphere>() != nullptr, errc::unsupported_symmetry,
            "rotation applies to the sphere");
    Vec k{r->axis[0], r->axis[1], r->axis[2]};
    const double kn = norm(k);
    require(kn > 1e-12, errc::unsupported_symmetry, "zero rotation axis");
    k = (1.0 / kn) * k;
    const double c = std::cos(r->angle), s = std::sin(r->angle);
    Vec kxp = cross3(k, p);
    const double kp = dot(k, p);
    Vec out = c * p + s * kxp + ((1.0 - c) * kp) * k;
    return out;
  }
  const auto& ps = std::get<ProductSymmetry>(g.v);
  const auto* pr = m.as<ProductSpace>();
  require(pr != nullptr, errc::unsupported_symmetry,
          "factorwise symmetry applies to product spaces");
  Vec l = slice(p, 0, pr->left->dim());
  Vec r = slice(p, pr->left->dim(), pr->right->dim());
  if (ps.left) l = apply_symmetry(*pr->left, *ps.left, l);
  if (ps.right) r = apply_symmetry(*pr->right, *ps.right, r);
  return join(l, r);
}

}  // namespace prequant
