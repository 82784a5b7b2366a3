#ifndef EQUIPART_DENSITY_HPP
#define EQUIPART_DENSITY_HPP

// Source measures on a convex body: uniform on K, or a piecewise-constant
// density on a rectangular pixel grid.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <variant>
#include <vector>

#include "equipart/geometry.hpp"

namespace equipart {

/// mu(A) = total * area(A ∩ K) / area(K).
struct UniformDensity {
  ConvexPolygon body;
  double total = 1.0;
};

/// Pixel (c, r) covers [ox + c h, ox + (c+1) h] x [oy + r h, oy + (r+1) h]
/// with constant density values[r * width + c].
struct GridDensity {
  Point2 origin;
  double cell_size = 1.0;
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<double> values;

  double at(std::size_t col, std::size_t row) const { return values[row * width + col]; }
};

class DensityField {
 public:
  explicit DensityField(UniformDensity u) : rep_(std::move(u)) {
    const auto& d = std::get<UniformDensity>(rep_);
    if (d.body.empty()) throw std::invalid_argument("uniform density needs a nonempty body");
    if (!(d.total > 0.0) || !std::isfinite(d.total)) throw std::invalid_argument("uniform density total must be positive");
    rho_ = d.total / area(d.body);
  }

  explicit DensityField(GridDensity g) : rep_(std::move(g)) {
    const auto& d = std::get<GridDensity>(rep_);
    if (d.width == 0 || d.height == 0) throw std::invalid_argument("grid density has no pixels");
    if (d.values.size() != d.width * d.height) throw std::invalid_argument("grid density value count mismatch");
    if (!(d.cell_size > 0.0) || !std::isfinite(d.cell_size)) throw std::invalid_argument("grid cell size must be positive");
    if (!is_finite(d.origin)) throw std::invalid_argument("grid origin is not finite");
    for (double v : d.values)
      if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument("grid density values must be finite and nonnegative");
  }

  static DensityField uniform(const ConvexPolygon& body, double total) { return DensityField(UniformDensity{body, total}); }
  static DensityField uniform(const ConvexPolygon& body) { return uniform(body, area(body)); }

  bool is_uniform() const { return std::holds_alternative<UniformDensity>(rep_); }
  bool is_grid() const { return std::holds_alternative<GridDensity>(rep_); }
  const UniformDensity& as_uniform() const { return std::get<UniformDensity>(rep_); }
  const GridDensity& as_grid() const { return std::get<GridDensity>(rep_); }

  /// Moments of the measure restricted to `poly`, taken about `origin`.
  /// Polygons are assumed to lie inside the body for the uniform kind.
  Moments moments(const ConvexPolygon& poly, Point2 origin = {}) const {
    if (poly.empty()) return {};
    if (is_uniform()) return rho_ * equipart::moments(poly, origin);
    Moments out;
    for_each_piece(poly, [&](const ConvexPolygon& piece, double value) { out += value * equipart::moments(piece, origin); });
    return out;
  }

  double mass(const ConvexPolygon& poly) const {
    if (poly.empty()) return 0.0;
    if (is_uniform()) return rho_ * area(poly);
    double out = 0.0;
    for_each_piece(poly, [&](const ConvexPolygon& piece, double value) { out += value * area(piece); });
    return out;
  }

  /// Integral of the density along the segment [a, b] (arc length measure).
  double line_integral(Point2 a, Point2 b) const {
    const double len = distance(a, b);
    if (is_uniform()) return rho_ * len;
    const auto& g = as_grid();
    std::vector<double> ts{0.0, 1.0};
    auto add_crossings = [&](double p0, double p1, double o, std::size_t count) {
      if (p0 == p1) return;
      const double lo = std::min(p0, p1), hi = std::max(p0, p1);
      const auto k0 = static_cast<long>(std::ceil((lo - o) / g.cell_size));
      const auto k1 = static_cast<long>(std::floor((hi - o) / g.cell_size));
      for (long k = std::max(0L, k0); k <= std::min(static_cast<long>(count), k1); ++k)
        ts.push_back((o + static_cast<double>(k) * g.cell_size - p0) / (p1 - p0));
    };
    add_crossings(a.x, b.x, g.origin.x, g.width);
    add_crossings(a.y, b.y, g.origin.y, g.height);
    std::sort(ts.begin(), ts.end());
    double out = 0.0;
    for (std::size_t k = 0; k + 1 < ts.size(); ++k) {
      const double t0 = std::clamp(ts[k], 0.0, 1.0), t1 = std::clamp(ts[k + 1], 0.0, 1.0);
      if (t1 <= t0) continue;
      out += (t1 - t0) * len * value_at(a + (0.5 * (t0 + t1)) * (b - a));
    }
    return out;
  }

  /// Density value at a point (zero outside the grid; uniform ignores K).
  double value_at(Point2 p) const {
    if (is_uniform()) return rho_;
    const auto& g = as_grid();
    const double cx = std::floor((p.x - g.origin.x) / g.cell_size);
    const double cy = std::floor((p.y - g.origin.y) / g.cell_size);
    if (cx < 0 || cy < 0 || cx >= static_cast<double>(g.width) || cy >= static_cast<double>(g.height)) return 0.0;
    return g.at(static_cast<std::size_t>(cx), static_cast<std::size_t>(cy));
  }

  /// Same density multiplied by `factor`.
  DensityField scaled(double factor) const {
    if (is_uniform()) return uniform(as_uniform().body, as_uniform().total * factor);
    GridDensity g = as_grid();
    for (double& v : g.values) v *= factor;
    return DensityField(std::move(g));
  }

  /// The measure restricted to `region` (a subset of the body), rescaled to
  /// carry `total` there.
  DensityField restricted(const ConvexPolygon& region, double total) const {
    if (is_uniform()) return uniform(region, total);
    const double m = mass(region);
    if (!(m > 0.0)) throw std::invalid_argument("cannot renormalize a density on a null region");
    return scaled(total / m);
  }

  /// Calls fn(piece, value) for every nonempty intersection of `poly` with a
  /// pixel of nonzero density.
  template <class Fn>
  void for_each_piece(const ConvexPolygon& poly, Fn&& fn) const {
    const auto& g = as_grid();
    const auto& v = poly.vertices();
    if (v.empty()) return;
    double x0 = v[0].x, x1 = v[0].x, y0 = v[0].y, y1 = v[0].y;
    for (const Point2& p : v) {
      x0 = std::min(x0, p.x);
      x1 = std::max(x1, p.x);
      y0 = std::min(y0, p.y);
      y1 = std::max(y1, p.y);
    }
    const auto to_index = [&](double t, double o, std::size_t count) {
      const double k = std::floor((t - o) / g.cell_size);
      return static_cast<long>(std::clamp(k, -1.0, static_cast<double>(count)));
    };
    const long c0 = std::max(0L, to_index(x0, g.origin.x, g.width));
    const long c1 = std::min(static_cast<long>(g.width) - 1, to_index(x1, g.origin.x, g.width));
    const long r0 = std::max(0L, to_index(y0, g.origin.y, g.height));
    const long r1 = std::min(static_cast<long>(g.height) - 1, to_index(y1, g.origin.y, g.height));
    for (long r = r0; r <= r1; ++r) {
      const double ylo = g.origin.y + static_cast<double>(r) * g.cell_size;
      const double xlo = g.origin.x + static_cast<double>(c0) * g.cell_size;
      ConvexPolygon strip = clip(clip(poly, HalfPlane({0.0, -1.0}, -ylo)), HalfPlane({0.0, 1.0}, ylo + g.cell_size));
      strip = clip(strip, HalfPlane({-1.0, 0.0}, -xlo));
      // sweep columns left to right, peeling each pixel off the strip
      for (long c = c0; c <= c1 && !strip.empty(); ++c) {
        const double xhi = g.origin.x + static_cast<double>(c + 1) * g.cell_size;
        const HalfPlane right({1.0, 0.0}, xhi);
        const double value = g.at(static_cast<std::size_t>(c), static_cast<std::size_t>(r));
        if (value > 0.0) {
          const ConvexPolygon piece = clip(strip, right);
          if (!piece.empty()) fn(piece, value);
        }
        strip = clip(strip, right.complement());
      }
    }
  }

 private:
  std::variant<UniformDensity, GridDensity> rep_;
  double rho_ = 0.0;
};

}  // namespace equipart

#endif  // EQUIPART_DENSITY_HPP
