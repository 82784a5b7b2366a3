#ifndef EQUIPART_GEOMETRY_HPP
#define EQUIPART_GEOMETRY_HPP

// Planar convex geometry: points, halfplanes, convex polygons and the metric
// functionals evaluated on partition cells.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace equipart {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend constexpr Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }
  friend constexpr Point2 operator*(Point2 a, double s) { return {s * a.x, s * a.y}; }
  friend constexpr bool operator==(Point2 a, Point2 b) = default;
};

constexpr double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point2 a) { return std::hypot(a.x, a.y); }
constexpr double squared_norm(Point2 a) { return dot(a, a); }
inline double distance(Point2 a, Point2 b) { return norm(a - b); }

inline bool is_finite(Point2 p) { return std::isfinite(p.x) && std::isfinite(p.y); }

/// Distance from p to the closed segment [a, b].
inline double segment_distance(Point2 p, Point2 a, Point2 b) {
  const Point2 ab = b - a;
  const double len2 = squared_norm(ab);
  if (len2 == 0.0) return distance(p, a);
  const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return distance(p, a + t * ab);
}

/// The closed set {x : normal . x <= offset} with a unit normal.
class HalfPlane {
 public:
  HalfPlane(Point2 normal, double offset) {
    const double len = norm(normal);
    if (!(len > 0.0) || !std::isfinite(len) || !std::isfinite(offset))
      throw std::invalid_argument("halfplane normal must be finite and nonzero");
    normal_ = (1.0 / len) * normal;
    offset_ = offset / len;
  }

  /// Halfplane whose boundary passes through `anchor`, with outward `normal`.
  static HalfPlane through(Point2 anchor, Point2 normal) {
    const double len = norm(normal);
    if (!(len > 0.0)) throw std::invalid_argument("halfplane normal must be nonzero");
    const Point2 u = (1.0 / len) * normal;
    return HalfPlane(u, dot(u, anchor), Unchecked{});
  }

  Point2 normal() const { return normal_; }
  double offset() const { return offset_; }

  /// Signed distance, negative inside.
  double signed_distance(Point2 p) const { return dot(normal_, p) - offset_; }
  bool contains(Point2 p) const { return signed_distance(p) <= 0.0; }

  HalfPlane complement() const { return HalfPlane({-normal_.x, -normal_.y}, -offset_, Unchecked{}); }

 private:
  struct Unchecked {};
  HalfPlane(Point2 unit_normal, double offset, Unchecked) : normal_(unit_normal), offset_(offset) {}

  Point2 normal_;
  double offset_;
};

/// Low-order polygon moments: integrals of 1, x, y, x^2, y^2 over the region.
struct Moments {
  double m0 = 0.0;
  double mx = 0.0;
  double my = 0.0;
  double mxx = 0.0;
  double myy = 0.0;

  Moments& operator+=(const Moments& o) {
    m0 += o.m0;
    mx += o.mx;
    my += o.my;
    mxx += o.mxx;
    myy += o.myy;
    return *this;
  }
  friend Moments operator*(double s, Moments m) { return {s * m.m0, s * m.mx, s * m.my, s * m.mxx, s * m.myy}; }

  /// Integral of |x - c|^2 when the moments were taken about the origin.
  double second_moment_about(Point2 c) const {
    return mxx + myy - 2.0 * (c.x * mx + c.y * my) + squared_norm(c) * m0;
  }
};

namespace detail {

inline double bbox_diagonal(std::span<const Point2> pts) {
  if (pts.empty()) return 0.0;
  double x0 = pts[0].x, x1 = pts[0].x, y0 = pts[0].y, y1 = pts[0].y;
  for (const Point2& p : pts) {
    x0 = std::min(x0, p.x);
    x1 = std::max(x1, p.x);
    y0 = std::min(y0, p.y);
    y1 = std::max(y1, p.y);
  }
  return std::hypot(x1 - x0, y1 - y0);
}

inline double signed_area(std::span<const Point2> pts) {
  double twice = 0.0;
  const std::size_t n = pts.size();
  for (std::size_t i = 0; i < n; ++i) twice += cross(pts[i], pts[(i + 1) % n]);
  return 0.5 * twice;
}

// Drops duplicate and collinear vertices (tolerance relative to the bounding
// box diagonal). Deterministic; applying it twice is a no-op.
inline void remove_degenerate(std::vector<Point2>& pts) {
  const double tol = 1e-12 * bbox_diagonal(pts);
  bool changed = true;
  while (changed && pts.size() >= 3) {
    changed = false;
    for (std::size_t i = 0; i < pts.size() && pts.size() >= 3; ++i) {
      const std::size_t n = pts.size();
      const Point2 a = pts[(i + n - 1) % n];
      const Point2 b = pts[i];
      const Point2 c = pts[(i + 1) % n];
      bool drop = distance(a, b) <= tol;
      if (!drop) {
        const double base = distance(a, c);
        drop = base <= tol || std::abs(cross(b - a, c - a)) <= tol * base;
      }
      if (drop) {
        pts.erase(pts.begin() + static_cast<std::ptrdiff_t>(i));
        changed = true;
        break;
      }
    }
  }
  if (pts.size() < 3) pts.clear();
}

}  // namespace detail

/// Convex polygon with counterclockwise vertices in strictly convex position,
/// or the distinguished empty polygon.
class ConvexPolygon {
 public:
  ConvexPolygon() = default;

  /// Canonicalizes `vertices` (orientation, duplicates, collinear triples).
  /// Throws std::invalid_argument on non-finite or non-convex input.
  static ConvexPolygon from_vertices(std::vector<Point2> vertices) {
    for (const Point2& p : vertices)
      if (!is_finite(p)) throw std::invalid_argument("polygon vertex is not finite");
    if (detail::signed_area(vertices) < 0.0) std::reverse(vertices.begin(), vertices.end());
    detail::remove_degenerate(vertices);
    const std::size_t n = vertices.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Point2 a = vertices[i], b = vertices[(i + 1) % n], c = vertices[(i + 2) % n];
      if (cross(b - a, c - b) < 0.0) throw std::invalid_argument("polygon is not convex");
    }
    return ConvexPolygon(std::move(vertices));
  }

  /// Axis-aligned rectangle [x0, x1] x [y0, y1].
  static ConvexPolygon rectangle(double x0, double y0, double x1, double y1) {
    return from_vertices({{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}});
  }

  /// Regular n-gon inscribed in the circle of given center and radius.
  static ConvexPolygon regular(std::size_t n, Point2 center = {}, double radius = 1.0) {
    std::vector<Point2> v;
    v.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
      const double t = 2.0 * M_PI * static_cast<double>(k) / static_cast<double>(n);
      v.push_back({center.x + radius * std::cos(t), center.y + radius * std::sin(t)});
    }
    return from_vertices(std::move(v));
  }

  bool empty() const { return vertices_.empty(); }
  std::size_t size() const { return vertices_.size(); }
  const std::vector<Point2>& vertices() const { return vertices_; }
  Point2 operator[](std::size_t i) const { return vertices_[i]; }

  friend bool operator==(const ConvexPolygon&, const ConvexPolygon&) = default;

 private:
  explicit ConvexPolygon(std::vector<Point2> canonical) : vertices_(std::move(canonical)) {}
  friend ConvexPolygon clip(const ConvexPolygon&, const HalfPlane&);

  std::vector<Point2> vertices_;
};

/// poly intersected with h. Vertices within rounding distance of the boundary
/// count as inside, which makes clipping idempotent.
inline ConvexPolygon clip(const ConvexPolygon& poly, const HalfPlane& h) {
  const auto& v = poly.vertices();
  const std::size_t n = v.size();
  if (n == 0) return {};

  double magnitude = std::abs(h.offset());
  for (const Point2& p : v) magnitude = std::max(magnitude, std::max(std::abs(p.x), std::abs(p.y)));
  const double eps = 16.0 * std::numeric_limits<double>::epsilon() * magnitude;

  std::vector<double> dist(n);
  bool all_in = true, all_out = true;
  for (std::size_t i = 0; i < n; ++i) {
    dist[i] = h.signed_distance(v[i]);
    if (dist[i] > eps) all_in = false;
    else all_out = false;
  }
  if (all_in) return poly;
  if (all_out) return {};

  std::vector<Point2> out;
  out.reserve(n + 1);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = (i + 1) % n;
    const bool in_i = dist[i] <= eps;
    const bool in_j = dist[j] <= eps;
    if (in_i) out.push_back(v[i]);
    // an inside endpoint already on the boundary needs no crossing point
    if (in_i != in_j && (in_i ? dist[i] : dist[j]) <= 0.0) {
      const double t = dist[i] / (dist[i] - dist[j]);
      out.push_back(v[i] + t * (v[j] - v[i]));
    }
  }
  detail::remove_degenerate(out);
  return ConvexPolygon(std::move(out));
}

/// Intersection of two convex polygons.
inline ConvexPolygon intersect(const ConvexPolygon& a, const ConvexPolygon& b) {
  if (b.empty()) return {};
  ConvexPolygon out = a;
  const auto& w = b.vertices();
  for (std::size_t i = 0; i < w.size() && !out.empty(); ++i) {
    const Point2 e = w[(i + 1) % w.size()] - w[i];
    out = clip(out, HalfPlane::through(w[i], {e.y, -e.x}));
  }
  return out;
}

inline double area(const ConvexPolygon& poly) { return detail::signed_area(poly.vertices()); }

inline double perimeter(const ConvexPolygon& poly) {
  const auto& v = poly.vertices();
  double len = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) len += distance(v[i], v[(i + 1) % v.size()]);
  return len;
}

/// Moments of the polygon taken about `origin` (shifting first keeps the
/// second moments well conditioned for far-away polygons).
inline Moments moments(const ConvexPolygon& poly, Point2 origin = {}) {
  Moments m;
  const auto& v = poly.vertices();
  const std::size_t n = v.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 a = v[i] - origin;
    const Point2 b = v[(i + 1) % n] - origin;
    const double c = cross(a, b);
    m.m0 += c;
    m.mx += (a.x + b.x) * c;
    m.my += (a.y + b.y) * c;
    m.mxx += (a.x * a.x + a.x * b.x + b.x * b.x) * c;
    m.myy += (a.y * a.y + a.y * b.y + b.y * b.y) * c;
  }
  m.m0 /= 2.0;
  m.mx /= 6.0;
  m.my /= 6.0;
  m.mxx /= 12.0;
  m.myy /= 12.0;
  return m;
}

inline Point2 centroid(const ConvexPolygon& poly) {
  if (poly.empty()) throw std::invalid_argument("centroid of empty polygon");
  const Point2 o = poly[0];
  const Moments m = moments(poly, o);
  return o + Point2{m.mx / m.m0, m.my / m.m0};
}

inline double diameter(const ConvexPolygon& poly) {
  if (poly.empty()) throw std::invalid_argument("diameter of empty polygon");
  const auto& v = poly.vertices();
  double best = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = i + 1; j < v.size(); ++j) best = std::max(best, distance(v[i], v[j]));
  return best;
}

/// Minimal width over all directions. Rotating calipers: for each edge the
/// antipodal vertex only moves forward, so the scan is linear.
inline double width(const ConvexPolygon& poly) {
  if (poly.empty()) throw std::invalid_argument("width of empty polygon");
  const auto& v = poly.vertices();
  const std::size_t n = v.size();
  auto height = [&](std::size_t edge, std::size_t k) {
    const Point2 a = v[edge], b = v[(edge + 1) % n];
    return cross(b - a, v[k] - a) / distance(a, b);
  };
  double best = std::numeric_limits<double>::infinity();
  std::size_t k = 1;
  for (std::size_t i = 0; i < n; ++i) {
    if (i == 0) {
      for (std::size_t j = 0; j < n; ++j)
        if (height(0, j) > height(0, k)) k = j;
    } else {
      while (height(i, (k + 1) % n) >= height(i, k) && (k + 1) % n != i) k = (k + 1) % n;
    }
    best = std::min(best, height(i, k));
  }
  return best;
}

/// Distance from p to the filled polygon (zero inside).
inline double point_distance(Point2 p, const ConvexPolygon& poly) {
  const auto& v = poly.vertices();
  const std::size_t n = v.size();
  bool inside = true;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 a = v[i], b = v[(i + 1) % n];
    if (cross(b - a, p - a) < 0.0) inside = false;
    best = std::min(best, segment_distance(p, a, b));
  }
  return inside ? 0.0 : best;
}

inline bool contains(const ConvexPolygon& poly, Point2 p) {
  const auto& v = poly.vertices();
  if (v.empty()) return false;
  for (std::size_t i = 0; i < v.size(); ++i)
    if (cross(v[(i + 1) % v.size()] - v[i], p - v[i]) < 0.0) return false;
  return true;
}

/// Hausdorff distance between the filled polygons. Distance to a convex set is
/// a convex function, so its maximum over the other polygon sits at a vertex.
inline double hausdorff_distance(const ConvexPolygon& a, const ConvexPolygon& b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("Hausdorff distance to an empty polygon is undefined");
  double d = 0.0;
  for (const Point2& p : a.vertices()) d = std::max(d, point_distance(p, b));
  for (const Point2& p : b.vertices()) d = std::max(d, point_distance(p, a));
  return d;
}

}  // namespace equipart

#endif  // EQUIPART_GEOMETRY_HPP
