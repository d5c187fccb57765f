#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

namespace arcoord {

/// Point on a plane's xz-axes: (x, z) in meters. Orientation tests treat x as
/// the first and z as the second axis of a standard 2D frame.
using Vec2 = Eigen::Vector2d;

/// Tolerance for containment, on-edge tests and near-duplicate merging.
inline constexpr double kPolygonEps = 1e-9;

/// Convex polygon, counterclockwise, either empty or with >= 3 vertices and
/// no three consecutive collinear vertices.
class Polygon2 {
 public:
  Polygon2() = default;
  /// Validates the invariants; throws DegenerateInput when they do not hold.
  explicit Polygon2(std::vector<Vec2> vertices);

  const std::vector<Vec2>& vertices() const { return vertices_; }
  std::size_t size() const { return vertices_.size(); }
  bool empty() const { return vertices_.empty(); }

  bool operator==(const Polygon2&) const = default;

 private:
  std::vector<Vec2> vertices_;
};

/// Throws DegenerateInput for fewer than 3 distinct or all-collinear points.
/// Output starts at the lexicographically smallest vertex.
Polygon2 convex_hull(std::span<const Vec2> points);

/// Closed-polygon containment (boundary counts as inside).
bool contains_point(const Polygon2& poly, const Vec2& p);

/// Convex hull of contained vertices plus edge crossings; empty when the
/// overlap has no area.
Polygon2 intersect_convex(const Polygon2& a, const Polygon2& b);

/// Left fold of intersect_convex; returns empty for an empty list.
Polygon2 intersect_all(std::span<const Polygon2> polys);

double area(const Polygon2& poly);

/// Twice the signed area of triangle (o, a, b); positive for a left turn.
double cross(const Vec2& o, const Vec2& a, const Vec2& b);

}  // namespace arcoord
