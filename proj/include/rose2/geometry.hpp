#pragma once

#include "rose2/types.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <utility>
#include <vector>

namespace rose2 {

template <typename Scalar>
Scalar cross(const Vector2<Scalar>& a, const Vector2<Scalar>& b) {
  return a.x() * b.y() - a.y() * b.x();
}

/// Unit direction of an angle in image coordinates (x right, y down).
template <typename Scalar>
Vector2<Scalar> direction_of(Scalar angle) {
  return Vector2<Scalar>(std::cos(angle), std::sin(angle));
}

/// Left normal of `direction_of(angle)`.
template <typename Scalar>
Vector2<Scalar> normal_of(Scalar angle) {
  return Vector2<Scalar>(-std::sin(angle), std::cos(angle));
}

template <typename Scalar>
Scalar point_segment_distance(const Vector2<Scalar>& p, const Vector2<Scalar>& a,
                              const Vector2<Scalar>& b) {
  const Vector2<Scalar> ab = b - a;
  const Scalar len2 = ab.squaredNorm();
  if (len2 == Scalar(0)) return (p - a).norm();
  const Scalar t = std::clamp((p - a).dot(ab) / len2, Scalar(0), Scalar(1));
  return (p - (a + t * ab)).norm();
}

template <typename Scalar>
bool segments_intersect(const Vector2<Scalar>& a, const Vector2<Scalar>& b,
                        const Vector2<Scalar>& c, const Vector2<Scalar>& d) {
  auto orient = [](const Vector2<Scalar>& p, const Vector2<Scalar>& q, const Vector2<Scalar>& r) {
    const Scalar v = cross<Scalar>(q - p, r - p);
    return (v > 0) - (v < 0);
  };
  auto on_segment = [](const Vector2<Scalar>& p, const Vector2<Scalar>& q, const Vector2<Scalar>& r) {
    return std::min(p.x(), q.x()) <= r.x() && r.x() <= std::max(p.x(), q.x()) &&
           std::min(p.y(), q.y()) <= r.y() && r.y() <= std::max(p.y(), q.y());
  };
  const int o1 = orient(a, b, c), o2 = orient(a, b, d);
  const int o3 = orient(c, d, a), o4 = orient(c, d, b);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(a, b, c)) return true;
  if (o2 == 0 && on_segment(a, b, d)) return true;
  if (o3 == 0 && on_segment(c, d, a)) return true;
  if (o4 == 0 && on_segment(c, d, b)) return true;
  return false;
}

/// Exact minimum distance between two closed segments.
template <typename Scalar>
Scalar segment_distance(const Vector2<Scalar>& a, const Vector2<Scalar>& b,
                        const Vector2<Scalar>& c, const Vector2<Scalar>& d) {
  if (segments_intersect(a, b, c, d)) return Scalar(0);
  return std::min({point_segment_distance(a, c, d), point_segment_distance(b, c, d),
                   point_segment_distance(c, a, b), point_segment_distance(d, a, b)});
}

/// Signed area, positive for counter-clockwise loops in a y-up frame.
/// In image coordinates (y down) a positive area loop appears clockwise on
/// screen; all code here only relies on the sign convention being consistent.
template <typename Scalar>
Scalar signed_area(std::span<const Vector2<Scalar>> poly) {
  Scalar area = 0;
  for (std::size_t i = 0, n = poly.size(); i < n; ++i) {
    area += cross<Scalar>(poly[i], poly[(i + 1) % n]);
  }
  return area / Scalar(2);
}

inline double signed_area(const Polygon& poly) { return signed_area<double>(std::span<const Vec2>(poly)); }

template <typename Scalar>
Vector2<Scalar> centroid(std::span<const Vector2<Scalar>> poly) {
  const Scalar a = signed_area(poly);
  Vector2<Scalar> c = Vector2<Scalar>::Zero();
  if (a == Scalar(0)) {
    for (const auto& p : poly) c += p;
    return poly.empty() ? c : Vector2<Scalar>(c / Scalar(poly.size()));
  }
  for (std::size_t i = 0, n = poly.size(); i < n; ++i) {
    const auto& p = poly[i];
    const auto& q = poly[(i + 1) % n];
    c += (p + q) * cross<Scalar>(p, q);
  }
  return c / (Scalar(6) * a);
}

inline Vec2 centroid(const Polygon& poly) { return centroid<double>(std::span<const Vec2>(poly)); }

/// Inclusive containment test for a positively oriented convex polygon.
template <typename Scalar>
bool convex_contains(std::span<const Vector2<Scalar>> poly, const Vector2<Scalar>& p,
                     Scalar tol = Scalar(1e-9)) {
  for (std::size_t i = 0, n = poly.size(); i < n; ++i) {
    const auto& a = poly[i];
    const auto& b = poly[(i + 1) % n];
    if (cross<Scalar>(b - a, p - a) < -tol * (b - a).norm()) return false;
  }
  return !poly.empty();
}

/// Oriented infinite line: points x with normal·x = offset.
struct Line2 {
  Vec2 point = Vec2::Zero();
  Vec2 dir = Vec2::UnitX();

  Vec2 normal() const { return Vec2(-dir.y(), dir.x()); }
  double signed_distance(const Vec2& p) const { return normal().dot(p - point); }
  double param(const Vec2& p) const { return dir.dot(p - point); }
  Vec2 at(double t) const { return point + t * dir; }
};

/// Splits a convex polygon by a line into the parts with positive and
/// negative signed distance. Vertices within `tol` of the line go to both.
std::pair<Polygon, Polygon> split_convex(const Polygon& poly, const Line2& line, double tol = 1e-9);

/// Clips an infinite line to an axis-aligned box; false when it misses.
bool clip_line_to_box(const Line2& line, const Vec2& lo, const Vec2& hi, Vec2& a, Vec2& b);

/// Boundary loops of the union of edge-to-edge convex pieces. Outer loops
/// have positive signed area, holes negative; collinear vertices removed.
std::vector<Polygon> union_boundary(std::span<const Polygon> pieces, double snap_tol = 1e-6);

/// Drops vertices collinear with their neighbors.
Polygon simplify_collinear(const Polygon& loop, double tol = 1e-7);

double point_polygon_distance(const Vec2& p, const Polygon& loop);

/// Even-odd containment over a set of loops.
bool loops_contain(std::span<const Polygon> loops, const Vec2& p);

}  // namespace rose2
