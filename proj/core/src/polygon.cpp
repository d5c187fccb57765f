#include "arcoord/polygon.hpp"

#include <algorithm>
#include <cmath>

#include "arcoord/error.hpp"

namespace arcoord {

namespace {

bool lex_less(const Vec2& a, const Vec2& b) { return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y()); }

bool near(const Vec2& a, const Vec2& b) {
  return std::abs(a.x() - b.x()) <= kPolygonEps && std::abs(a.y() - b.y()) <= kPolygonEps;
}

// True when b is not strictly left of the directed line o -> a, i.e. the
// distance of b from that line on the left side is at most kPolygonEps.
bool not_left_turn(const Vec2& o, const Vec2& a, const Vec2& b) {
  const double len = (b - o).norm();
  return cross(o, a, b) <= kPolygonEps * len;
}

std::vector<Vec2> dedupe_sorted(std::span<const Vec2> points) {
  std::vector<Vec2> sorted(points.begin(), points.end());
  std::sort(sorted.begin(), sorted.end(), lex_less);
  std::vector<Vec2> out;
  out.reserve(sorted.size());
  for (const auto& p : sorted) {
    bool duplicate = false;
    for (auto q = out.rbegin(); q != out.rend() && p.x() - q->x() <= kPolygonEps; ++q) {
      if (near(p, *q)) {
        duplicate = true;
        break;
      }
    }
    if (!duplicate) out.push_back(p);
  }
  return out;
}

void append_edge_crossings(const Polygon2& a, const Polygon2& b, std::vector<Vec2>& out) {
  const auto& va = a.vertices();
  const auto& vb = b.vertices();
  for (std::size_t i = 0; i < va.size(); ++i) {
    const Vec2& p = va[i];
    const Vec2 r = va[(i + 1) % va.size()] - p;
    for (std::size_t j = 0; j < vb.size(); ++j) {
      const Vec2& q = vb[j];
      const Vec2 s = vb[(j + 1) % vb.size()] - q;
      const double denom = r.x() * s.y() - r.y() * s.x();
      // Parallel edges only meet at endpoints already covered by containment.
      if (std::abs(denom) <= 1e-15 * r.norm() * s.norm()) continue;
      const Vec2 qp = q - p;
      const double t = (qp.x() * s.y() - qp.y() * s.x()) / denom;
      const double u = (qp.x() * r.y() - qp.y() * r.x()) / denom;
      constexpr double tol = 1e-12;
      if (t >= -tol && t <= 1.0 + tol && u >= -tol && u <= 1.0 + tol) out.push_back(p + std::clamp(t, 0.0, 1.0) * r);
    }
  }
}

}  // namespace

double cross(const Vec2& o, const Vec2& a, const Vec2& b) {
  return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

Polygon2::Polygon2(std::vector<Vec2> vertices) : vertices_(std::move(vertices)) {
  if (vertices_.empty()) return;
  if (vertices_.size() < 3) throw Error(ErrorCode::DegenerateInput, "polygon needs 0 or at least 3 vertices");
  const std::size_t n = vertices_.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = vertices_[i];
    const Vec2& b = vertices_[(i + 1) % n];
    const Vec2& c = vertices_[(i + 2) % n];
    if (!a.allFinite()) throw Error(ErrorCode::DegenerateInput, "polygon vertex is not finite");
    if (near(a, b)) throw Error(ErrorCode::DegenerateInput, "duplicate consecutive vertices");
    if (not_left_turn(a, b, c)) throw Error(ErrorCode::DegenerateInput, "vertices are not strictly convex counterclockwise");
  }
}

Polygon2 convex_hull(std::span<const Vec2> points) {
  const std::vector<Vec2> pts = dedupe_sorted(points);
  if (pts.size() < 3) throw Error(ErrorCode::DegenerateInput, "convex hull needs at least 3 distinct points");

  // Andrew's monotone chain: Graham's scan over lexicographically sorted
  // points, lower chain then upper chain, both counterclockwise.
  std::vector<Vec2> hull(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && not_left_turn(hull[k - 2], hull[k - 1], p)) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
    const Vec2& p = pts[i];
    while (k >= lower && not_left_turn(hull[k - 2], hull[k - 1], p)) --k;
    hull[k++] = p;
  }
  hull.resize(k - 1);  // last point repeats the first

  if (hull.size() < 3) throw Error(ErrorCode::DegenerateInput, "all points are collinear");
  return Polygon2(std::move(hull));
}

bool contains_point(const Polygon2& poly, const Vec2& p) {
  const auto& v = poly.vertices();
  if (v.empty()) return false;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Vec2& a = v[i];
    const Vec2& b = v[(i + 1) % v.size()];
    if (cross(a, b, p) < -kPolygonEps * (b - a).norm()) return false;
  }
  return true;
}

Polygon2 intersect_convex(const Polygon2& a, const Polygon2& b) {
  if (a.empty() || b.empty()) return {};

  std::vector<Vec2> candidates;
  for (const auto& v : a.vertices()) {
    if (contains_point(b, v)) candidates.push_back(v);
  }
  for (const auto& v : b.vertices()) {
    if (contains_point(a, v)) candidates.push_back(v);
  }
  append_edge_crossings(a, b, candidates);

  try {
    return convex_hull(candidates);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::DegenerateInput) return {};
    throw;
  }
}

Polygon2 intersect_all(std::span<const Polygon2> polys) {
  if (polys.empty()) return {};
  Polygon2 acc = polys.front();
  for (std::size_t i = 1; i < polys.size() && !acc.empty(); ++i) acc = intersect_convex(acc, polys[i]);
  return acc;
}

double area(const Polygon2& poly) {
  const auto& v = poly.vertices();
  double twice = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Vec2& a = v[i];
    const Vec2& b = v[(i + 1) % v.size()];
    twice += a.x() * b.y() - b.x() * a.y();
  }
  return 0.5 * std::abs(twice);
}

}  // namespace arcoord
