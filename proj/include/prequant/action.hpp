#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>
#include <span>
#include <vector>

#include "prequant/errors.hpp"
#include "prequant/geometry.hpp"

namespace prequant {

/// Piecewise-linear path sampled at uniform parameter values. Points are
/// stored in the cover chart where one exists (torus), so displacement
/// information is retained; `closed` means the endpoints agree in the
/// quotient within 1e-9 (the cover representatives may differ by a lattice
/// vector).
class PathSample {
public:
  PathSample() = default;

  static PathSample make(ModelSpacePtr space, std::vector<Vec> pts,
                         bool closed) {
    require(pts.size() >= 2, errc::invalid_argument,
            "a path needs at least two samples");
    for (const auto& p : pts) {
      check_dimension(*space, p, "path point");
      check_removed(*space, p);
    }
    if (closed)
      require(quotient_distance(*space, pts.front(), pts.back()) <= 1e-9,
              errc::not_closed, "closed path endpoints differ");
    PathSample out;
    out.space_ = std::move(space);
    out.pts_ = std::move(pts);
    out.closed_ = closed;
    return out;
  }

  const ModelSpacePtr& space() const { return space_; }
  const std::vector<Vec>& points() const { return pts_; }
  bool closed() const { return closed_; }
  size_t segments() const { return pts_.size() - 1; }

  const Vec& start() const { return pts_.front(); }
  const Vec& end() const { return pts_.back(); }

  /// Linear interpolation at parameter t in [0, 1]; sphere points are
  /// renormalized. Endpoint parameters return the stored samples exactly.
  Vec at(double t) const {
    const size_t n = segments();
    if (t <= 0.0) return pts_.front();
    if (t >= 1.0) return pts_.back();
    const double x = t * static_cast<double>(n);
    size_t k = static_cast<size_t>(x);
    if (k >= n) k = n - 1;
    const double f = x - static_cast<double>(k);
    if (f == 0.0) return pts_[k];
    Vec p = (1.0 - f) * pts_[k] + f * pts_[k + 1];
    canonicalize_point(*space_, p);
    return p;
  }

private:
  ModelSpacePtr space_;
  std::vector<Vec> pts_;
  bool closed_ = false;
};

inline PathSample constant_path(ModelSpacePtr space, const Vec& x,
                                size_t segments = 16) {
  std::vector<Vec> pts(segments + 1, x);
  return PathSample::make(std::move(space), std::move(pts), true);
}

inline PathSample reverse(const PathSample& p) {
  std::vector<Vec> pts(p.points().rbegin(), p.points().rend());
  return PathSample::make(p.space(), std::move(pts), p.closed());
}

namespace detail {

/// Smallest even common multiple of two segment counts, falling back to the
/// larger count when the common multiple would be impractically large.
/// Refining to a common multiple only inserts points on existing edges, so
/// the resampled polygon carries exactly the flux of the original; a
/// non-multiple count would cut corners and shift enclosed flux.
inline size_t common_refinement(size_t a, size_t b) {
  constexpr size_t cap = size_t{1} << 14;
  const size_t l = std::lcm(std::lcm(a, b), size_t{2});
  return (l == 0 || l > cap) ? std::max(a, b) : l;
}

}  // namespace detail

inline PathSample resample(const PathSample& p, size_t segments) {
  require(segments >= 1, errc::invalid_argument, "segment count");
  if (segments == p.segments()) return p;
  std::vector<Vec> pts;
  pts.reserve(segments + 1);
  for (size_t k = 0; k <= segments; ++k)
    pts.push_back(p.at(static_cast<double>(k) / segments));
  return PathSample::make(p.space(), std::move(pts), p.closed());
}

/// Joins two paths end to start. The second path's cover representative is
/// translated to continue from the first path's endpoint (lattice models);
/// both halves are resampled to a common segment count so the junction
/// sits exactly at parameter 1/2 and no sample of either half is lost.
inline PathSample concat(const PathSample& a, const PathSample& b) {
  require(a.space() == b.space(), errc::invalid_argument,
          "concatenation requires one model space instance");
  const ModelSpace& m = *a.space();
  require(quotient_distance(m, a.end(), b.start()) <= 1e-9,
          errc::endpoint_mismatch,
          "second path must start where the first ends");
  const size_t L = detail::common_refinement(a.segments(), b.segments());
  PathSample ra = resample(a, L), rb = resample(b, L);
  Vec shift = ra.end() - rb.start();
  if (!m.as<FlatTorus>()) {
    // No cover to translate in: endpoints already agree within 1e-9.
    shift = 0.0 * shift;
  }
  require(norm(ra.end() - (rb.start() + shift)) <= 1e-6,
          errc::endpoint_mismatch,
          "paths meet in the quotient but not in the working chart; shift the "
          "second path's representative before concatenating");
  std::vector<Vec> pts = ra.points();  // L+1 points; the last is the junction
  const auto& bp = rb.points();
  for (size_t i = 1; i < bp.size(); ++i) pts.push_back(bp[i] + shift);
  const bool closed = quotient_distance(m, pts.front(), pts.back()) <= 1e-9;
  return PathSample::make(a.space(), std::move(pts), closed);
}

/// Uniformly sampled homotopy grid: (S+1) x (N+1) chart points, row j is
/// the path at deformation parameter s = j/S. Row/column structure flags
/// are computed, never trusted from the caller.
class HomotopySample {
public:
  template <class F>
  static HomotopySample build(ModelSpacePtr space, size_t S, size_t N,
                              F&& grid_fn) {
    require(S >= 1 && N >= 1, errc::invalid_argument, "grid too small");
    HomotopySample h;
    h.space_ = std::move(space);
    h.S_ = S;
    h.N_ = N;
    h.pts_.resize((S + 1) * (N + 1));
    for (size_t j = 0; j <= S; ++j)
      for (size_t k = 0; k <= N; ++k) {
        Vec p = grid_fn(j, k);
        check_dimension(*h.space_, p, "homotopy point");
        check_removed(*h.space_, p);
        h.pts_[j * (N + 1) + k] = p;
      }
    h.classify();
    return h;
  }

  static HomotopySample from_rows(ModelSpacePtr space,
                                  const std::vector<PathSample>& rows) {
    require(rows.size() >= 2, errc::invalid_argument,
            "a homotopy needs at least two rows");
    const size_t N = rows.front().segments();
    for (const auto& r : rows)
      require(r.segments() == N, errc::invalid_argument,
              "rows must share one segment count");
    return build(std::move(space), rows.size() - 1, N,
                 [&](size_t j, size_t k) { return rows[j].points()[k]; });
  }

  const ModelSpacePtr& space() const { return space_; }
  size_t rows() const { return S_; }      // segments in s
  size_t columns() const { return N_; }   // segments in t
  const Vec& at(size_t j, size_t k) const { return pts_[j * (N_ + 1) + k]; }

  bool fixed_ends() const { return fixed_ends_; }
  bool loop_of_loops() const { return loop_of_loops_; }
  bool rows_closed() const { return rows_closed_; }

  PathSample row(size_t j) const {
    require(j <= S_, errc::invalid_argument, "row index");
    std::vector<Vec> pts(pts_.begin() + static_cast<long>(j * (N_ + 1)),
                         pts_.begin() + static_cast<long>((j + 1) * (N_ + 1)));
    const bool closed =
        quotient_distance(*space_, pts.front(), pts.back()) <= 1e-9;
    return PathSample::make(space_, std::move(pts), closed);
  }

  /// Swaps the roles of s and t.
  HomotopySample transpose() const {
    return build(space_, N_, S_,
                 [&](size_t j, size_t k) { return at(k, j); });
  }

  /// Restriction to the s-interval [j0/S, j1/S], reindexed.
  HomotopySample slice_rows(size_t j0, size_t j1) const {
    require(j0 < j1 && j1 <= S_, errc::invalid_argument, "row range");
    return build(space_, j1 - j0, N_,
                 [&](size_t j, size_t k) { return at(j0 + j, k); });
  }

private:
  void classify() {
    fixed_ends_ = true;
    rows_closed_ = true;
    for (size_t j = 0; j <= S_; ++j) {
      if (quotient_distance(*space_, at(j, 0), at(0, 0)) > 1e-9 ||
          quotient_distance(*space_, at(j, N_), at(0, N_)) > 1e-9)
        fixed_ends_ = false;
      if (quotient_distance(*space_, at(j, 0), at(j, N_)) > 1e-9)
        rows_closed_ = false;
    }
    loop_of_loops_ = rows_closed_;
    if (loop_of_loops_)
      for (size_t k = 0; k <= N_; ++k)
        if (quotient_distance(*space_, at(0, k), at(S_, k)) > 1e-9) {
          loop_of_loops_ = false;
          break;
        }
  }

  ModelSpacePtr space_;
  size_t S_ = 0, N_ = 0;
  std::vector<Vec> pts_;
  bool fixed_ends_ = false;
  bool loop_of_loops_ = false;
  bool rows_closed_ = false;
};

struct ActionResult {
  double value = 0.0;           // extrapolated integral
  double error_estimate = 0.0;  // |I_h - I_2h| / 3, NaN when unavailable
  double raw_fine = 0.0;        // fine-grid midpoint sum, for diagnostics
  std::vector<double> row_contributions;  // extrapolated, one per fine row
};

namespace detail {

/// Deterministic pairwise tree sum: fixed association independent of any
/// runtime state, accurate to ~eps*log(n).
inline double pairwise_sum(std::span<const double> xs) {
  if (xs.empty()) return 0.0;
  if (xs.size() == 1) return xs[0];
  if (xs.size() == 2) return xs[0] + xs[1];
  const size_t half = xs.size() / 2;
  return pairwise_sum(xs.subspan(0, half)) + pairwise_sum(xs.subspan(half));
}

/// Midpoint-rule contribution of one quadrature cell whose corners are
/// taken `step` grid nodes apart. Central differences are averaged over
/// the opposing cell edges, the midpoint is the corner average pulled back
/// onto the model, and tangents are projected to restore orthogonality
/// (a no-op for the evaluated forms' values).
inline double cell_value(const ModelSpace& m, const HomotopySample& h,
                         size_t j, size_t k, size_t step) {
  const Vec& p00 = h.at(j, k);
  const Vec& p01 = h.at(j, k + step);
  const Vec& p10 = h.at(j + step, k);
  const Vec& p11 = h.at(j + step, k + step);
  const double sc = static_cast<double>(h.rows() / step);
  const double tc = static_cast<double>(h.columns() / step);
  Vec us = (0.5 * sc) * ((p10 - p00) + (p11 - p01));
  Vec ut = (0.5 * tc) * ((p01 - p00) + (p11 - p10));
  Vec mid = 0.25 * (((p00 + p01) + (p10 + p11)));
  canonicalize_point(m, mid);
  project_tangent(m, mid, us);
  project_tangent(m, mid, ut);
  return eval_two_form(m, mid, us, ut) / (sc * tc);
}

inline std::vector<double> grid_row_sums(const ModelSpace& m,
                                         const HomotopySample& h,
                                         size_t step) {
  const size_t S = h.rows() / step, N = h.columns() / step;
  std::vector<double> rows(S, 0.0);
  std::vector<double> cells(N);
  for (size_t j = 0; j < S; ++j) {
    for (size_t k = 0; k < N; ++k)
      cells[k] = cell_value(m, h, j * step, k * step, step);
    rows[j] = pairwise_sum(cells);
  }
  return rows;
}

}  // namespace detail

/// Surface integral of the model's two-form over the sampled homotopy,
/// oriented as the (s, t) parameter square: the integrand is
/// omega(d/ds, d/dt). Midpoint rule on grid cells plus one Richardson
/// step against the half-resolution grid; the returned value is the
/// extrapolated combination and the error estimate is |I_h - I_2h|/3.
/// Grids with an odd row or column count get no estimate (NaN), and
/// requesting a tolerance then fails.
inline ActionResult action_integral(const ModelSpace& m,
                                    const HomotopySample& h,
                                    double tolerance = 0.0) {
  auto fine_rows = detail::grid_row_sums(m, h, 1);
  const double fine = detail::pairwise_sum(fine_rows);
  ActionResult out;
  out.raw_fine = fine;
  const bool can_coarsen =
      h.rows() % 2 == 0 && h.columns() % 2 == 0 && h.rows() >= 2 &&
      h.columns() >= 2;
  if (can_coarsen) {
    auto coarse_rows = detail::grid_row_sums(m, h, 2);
    const double coarse = detail::pairwise_sum(coarse_rows);
    out.value = fine + (fine - coarse) / 3.0;
    out.error_estimate = std::abs(fine - coarse) / 3.0;
    out.row_contributions.resize(fine_rows.size());
    for (size_t j = 0; j < fine_rows.size(); ++j)
      out.row_contributions[j] =
          (4.0 / 3.0) * fine_rows[j] - (1.0 / 6.0) * coarse_rows[j / 2];
  } else {
    out.value = fine;
    out.error_estimate = std::numeric_limits<double>::quiet_NaN();
    out.row_contributions = fine_rows;
  }
  if (tolerance > 0.0 && !(out.error_estimate <= tolerance))
    raise(errc::quadrature_not_converged,
          "error estimate " + std::to_string(out.error_estimate) +
              " above tolerance " + std::to_string(tolerance));
  return out;
}

inline ActionResult action_integral(const HomotopySample& h,
                                    double tolerance = 0.0) {
  return action_integral(*h.space(), h, tolerance);
}

namespace detail {

inline size_t round_up_even(size_t n) { return n + (n % 2); }

inline std::vector<double> unwrap_angles(const PathSample& p) {
  std::vector<double> theta(p.points().size());
  const auto& pts = p.points();
  theta[0] = std::atan2(pts[0][1], pts[0][0]);
  for (size_t i = 1; i < pts.size(); ++i) {
    const double ax = pts[i - 1][0], ay = pts[i - 1][1];
    const double bx = pts[i][0], by = pts[i][1];
    theta[i] = theta[i - 1] + std::atan2(ax * by - ay * bx, ax * bx + ay * by);
  }
  return theta;
}

}  // namespace detail

/// Canonical interpolation between two sampled paths with matching
/// endpoint data. Columns are sampled at twice the common refinement of
/// the two segment counts: the quadrature's half-resolution pass then
/// still visits every vertex of both input polygons, so the coarse and
/// fine sums bound the same flux and the Richardson step stays honest.
///
/// Interpolation between rows is linear in the cover (torus), linear in
/// log-polar coordinates (punctured plane), chordal with renormalization
/// (sphere, failing on near-antipodal nodes), factorwise on products.
/// Paths that cannot be connected by the family raise not_homotopic.
/// Rows of the result run from `a` (s=0) to `b` (s=1).
inline HomotopySample straight_homotopy(const PathSample& a0,
                                        const PathSample& b0, size_t S = 0) {
  require(a0.space() == b0.space(), errc::invalid_argument,
          "interpolation requires one model space instance");
  const ModelSpacePtr& space = a0.space();
  const ModelSpace& m = *space;
  const size_t N = 2 * detail::common_refinement(a0.segments(), b0.segments());
  if (S == 0) S = N;
  S = detail::round_up_even(S);
  PathSample a = resample(a0, N), b = resample(b0, N);

  if (const auto* t = m.as<FlatTorus>()) {
    // Align b's cover representative by the lattice vector nearest to the
    // start separation, then demand equal endpoint data.
    const double dx = a.start()[0] - b.start()[0];
    const double dy = a.start()[1] - b.start()[1];
    const double y0 = std::nearbyint(t->inv[0][0] * dx + t->inv[0][1] * dy);
    const double y1 = std::nearbyint(t->inv[1][0] * dx + t->inv[1][1] * dy);
    const Vec shift{t->bf[0][0] * y0 + t->bf[0][1] * y1,
                    t->bf[1][0] * y0 + t->bf[1][1] * y1};
    std::vector<Vec> bp = b.points();
    for (auto& p : bp) p = p + shift;
    if (a.closed() && b.closed()) {
      auto da = lift_displacement(m, a.points());
      auto db = lift_displacement(m, bp);
      require(da == db, errc::not_homotopic,
              "loops wind differently around the torus");
    } else {
      require(norm(a.start() - bp.front()) <= 1e-9 &&
                  norm(a.end() - bp.back()) <= 1e-9,
              errc::not_homotopic,
              "paths have different endpoint data in the cover");
    }
    return HomotopySample::build(space, S, N, [&](size_t j, size_t k) {
      const double s = static_cast<double>(j) / static_cast<double>(S);
      return (1.0 - s) * a.points()[k] + s * bp[k];
    });
  }

  if (m.as<PuncturedPlane>()) {
    auto ta = detail::unwrap_angles(a);
    auto tb = detail::unwrap_angles(b);
    // Choose the angular branch of b nearest to a's start.
    const double branch =
        2.0 * M_PI * std::nearbyint((ta[0] - tb[0]) / (2.0 * M_PI));
    for (auto& th : tb) th += branch;
    auto log_r = [](const Vec& p) {
      return 0.5 * std::log(p[0] * p[0] + p[1] * p[1]);
    };
    if (a.closed() && b.closed()) {
      const double wa = (ta.back() - ta.front()) / (2.0 * M_PI);
      const double wb = (tb.back() - tb.front()) / (2.0 * M_PI);
      require(std::abs(wa - wb) <= 1e-6, errc::not_homotopic,
              "loops wind differently around the puncture");
    } else {
      require(std::abs(ta.front() - tb.front()) <= 1e-9 &&
                  std::abs(ta.back() - tb.back()) <= 1e-9 &&
                  std::abs(log_r(a.start()) - log_r(b.start())) <= 1e-9 &&
                  std::abs(log_r(a.end()) - log_r(b.end())) <= 1e-9,
              errc::not_homotopic,
              "paths have different endpoint data on the chosen branch");
    }
    return HomotopySample::build(space, S, N, [&](size_t j, size_t k) {
      const double s = static_cast<double>(j) / static_cast<double>(S);
      const double lam =
          (1.0 - s) * log_r(a.points()[k]) + s * log_r(b.points()[k]);
      const double th = (1.0 - s) * ta[k] + s * tb[k];
      const double r = std::exp(lam);
      return Vec{r * std::cos(th), r * std::sin(th)};
    });
  }

  if (m.as<TwoSphere>()) {
    for (size_t k = 0; k <= N; ++k)
      require(dot(a.points()[k], b.points()[k]) > -1.0 + 1e-6,
              errc::antipodal_degeneracy,
              "chordal interpolation passes through the origin");
    return HomotopySample::build(space, S, N, [&](size_t j, size_t k) {
      const double s = static_cast<double>(j) / static_cast<double>(S);
      Vec p = (1.0 - s) * a.points()[k] + s * b.points()[k];
      canonicalize_point(m, p);
      return p;
    });
  }

  if (const auto* pr = m.as<ProductSpace>()) {
    const size_t dl = pr->left->dim(), dr = pr->right->dim();
    auto split = [&](const PathSample& p, const ModelSpacePtr& f, size_t from,
                     size_t count) {
      std::vector<Vec> pts;
      pts.reserve(p.points().size());
      for (const auto& q : p.points()) pts.push_back(slice(q, from, count));
      const bool closed =
          quotient_distance(*f, pts.front(), pts.back()) <= 1e-9;
      return PathSample::make(f, std::move(pts), closed);
    };
    auto hl = straight_homotopy(split(a, pr->left, 0, dl),
                                split(b, pr->left, 0, dl), S);
    auto hr = straight_homotopy(split(a, pr->right, dl, dr),
                                split(b, pr->right, dl, dr), S);
    // The factor calls refine the column count on their own; recombine at
    // whatever they produced (equal on both sides, same inputs).
    require(hl.columns() == hr.columns() && hl.rows() == hr.rows(),
            errc::invalid_argument, "factor grids disagree");
    return HomotopySample::build(space, hl.rows(), hl.columns(),
                                 [&](size_t j, size_t k) {
                                   return join(hl.at(j, k), hr.at(j, k));
                                 });
  }

  raise(errc::unsupported_model,
        "no canonical interpolation family on " + m.kind_name());
}

/// The fundamental torus sweep: row s is the first basis loop translated
/// by s times the second basis vector. Its action is -det(basis); the
/// absolute value is the lattice cell area.
inline HomotopySample torus_sweep(ModelSpacePtr space, const Vec& x0,
                                  size_t S, size_t N) {
  const auto* t = space->as<FlatTorus>();
  require(t != nullptr, errc::unsupported_model, "torus sweep");
  require(S >= 2 && N >= 2 && S % 2 == 0 && N % 2 == 0,
          errc::invalid_argument, "sweep grid must be even");
  const double b1x = t->bf[0][0], b1y = t->bf[1][0];
  const double b2x = t->bf[0][1], b2y = t->bf[1][1];
  return HomotopySample::build(space, S, N, [&](size_t j, size_t k) {
    const double s = static_cast<double>(j) / static_cast<double>(S);
    const double u = static_cast<double>(k) / static_cast<double>(N);
    return Vec{x0[0] + u * b1x + s * b2x, x0[1] + u * b1y + s * b2y};
  });
}

/// The latitude sweep of the sphere: row s is the circle at colatitude
/// pi*s, collapsing to the poles at s = 0, 1. Its action equals the
/// sphere's total integral (the scale).
inline HomotopySample sphere_sweep(ModelSpacePtr space, size_t S, size_t N) {
  require(space->as<TwoSphere>() != nullptr, errc::unsupported_model,
          "sphere sweep");
  require(S >= 8 && N >= 8 && S % 2 == 0 && N % 2 == 0,
          errc::invalid_argument, "sweep grid must be even and at least 8x8");
  return HomotopySample::build(space, S, N, [&](size_t j, size_t k) {
    const double s = M_PI * static_cast<double>(j) / static_cast<double>(S);
    const double t =
        2.0 * M_PI * static_cast<double>(k) / static_cast<double>(N);
    return Vec{std::sin(s) * std::cos(t), std::sin(s) * std::sin(t),
               std::cos(s)};
  });
}

/// Embeds a factor homotopy into a product space, freezing the other
/// factor at a point. `left_factor` selects which factor varies.
inline HomotopySample embed_in_product(const ModelSpacePtr& product,
                                       const HomotopySample& h,
                                       const Vec& frozen, bool left_factor) {
  const auto* pr = product->as<ProductSpace>();
  require(pr != nullptr, errc::unsupported_model, "not a product space");
  const ModelSpacePtr& varying = left_factor ? pr->left : pr->right;
  require(h.space() == varying || h.space()->dim() == varying->dim(),
          errc::dimension_mismatch, "factor dimension mismatch");
  check_dimension(left_factor ? *pr->right : *pr->left, frozen,
                  "frozen factor point");
  return HomotopySample::build(
      product, h.rows(), h.columns(), [&](size_t j, size_t k) {
        return left_factor ? join(h.at(j, k), frozen)
                           : join(frozen, h.at(j, k));
      });
}

inline PathSample embed_in_product(const ModelSpacePtr& product,
                                   const PathSample& p, const Vec& frozen,
                                   bool left_factor) {
  const auto* pr = product->as<ProductSpace>();
  require(pr != nullptr, errc::unsupported_model, "not a product space");
  check_dimension(left_factor ? *pr->right : *pr->left, frozen,
                  "frozen factor point");
  std::vector<Vec> pts;
  pts.reserve(p.points().size());
  for (const auto& q : p.points())
    pts.push_back(left_factor ? join(q, frozen) : join(frozen, q));
  return PathSample::make(product, std::move(pts), p.closed());
}

}  // namespace prequant
