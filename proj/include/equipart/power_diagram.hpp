#ifndef EQUIPART_POWER_DIAGRAM_HPP
#define EQUIPART_POWER_DIAGRAM_HPP

// Truncated power (Laguerre) diagrams. Site i owns the points x of the body K
// where |x - x_i|^2 - r_i is minimal.

#include <algorithm>
#include <cstddef>
#include <deque>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "equipart/geometry.hpp"

namespace equipart {

struct WeightedConfiguration {
  std::vector<Point2> sites;
  std::vector<double> radii;

  std::size_t size() const { return sites.size(); }

  /// Same diagram with the last radius shifted to zero.
  WeightedConfiguration normalized() const {
    WeightedConfiguration out = *this;
    if (!out.radii.empty()) {
      const double shift = out.radii.back();
      for (double& r : out.radii) r -= shift;
    }
    return out;
  }
};

/// Two cells sharing an edge of positive length. `a`, `b` are the endpoints
/// of the common edge.
struct Interface {
  std::size_t i = 0;
  std::size_t j = 0;
  Point2 a;
  Point2 b;

  double length() const { return distance(a, b); }
};

struct PowerPartition {
  std::vector<ConvexPolygon> cells;
  std::vector<Interface> adjacency;  // i < j, sorted lexicographically
  ConvexPolygon body;

  std::size_t size() const { return cells.size(); }
};

inline double power_value(Point2 x, Point2 site, double radius) { return squared_norm(x - site) - radius; }

/// Directed distance from x_i along x_j - x_i to the bisector line.
inline double bisector_offset(Point2 xi, Point2 xj, double ri, double rj) {
  const double d = distance(xi, xj);
  return (d * d + (ri - rj)) / (2.0 * d);
}

/// The halfplane {x : f_i(x) <= f_j(x)} containing the cell of x_i.
inline HalfPlane bisector(Point2 xi, Point2 xj, double ri, double rj) {
  const Point2 dir = xj - xi;
  const double d = norm(dir);
  if (!(d > 0.0)) throw std::invalid_argument("bisector of coincident sites");
  const Point2 u = (1.0 / d) * dir;
  return HalfPlane::through(xi + bisector_offset(xi, xj, ri, rj) * u, u);
}

inline double min_pairwise_distance(std::span<const Point2> sites) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < sites.size(); ++i)
    for (std::size_t j = i + 1; j < sites.size(); ++j) best = std::min(best, distance(sites[i], sites[j]));
  return best;
}

/// Throws std::invalid_argument unless the configuration lies in the
/// configuration space of distinct points (relative to the body's diameter).
inline void validate(const WeightedConfiguration& config, const ConvexPolygon& body) {
  if (config.sites.size() != config.radii.size())
    throw std::invalid_argument("sites and radii differ in length");
  if (config.sites.empty()) throw std::invalid_argument("configuration has no sites");
  for (std::size_t i = 0; i < config.size(); ++i)
    if (!is_finite(config.sites[i]) || !std::isfinite(config.radii[i]))
      throw std::invalid_argument("configuration entry is not finite");
  if (body.empty()) throw std::invalid_argument("body is empty");
  if (min_pairwise_distance(config.sites) <= 1e-9 * diameter(body))
    throw std::invalid_argument("sites are not pairwise distinct");
}

namespace detail {

// Portion of `cell` lying on the line of `h`, as a parameter interval along
// the line direction. Returns false if fewer than two vertices touch it.
inline bool edge_on_line(const ConvexPolygon& cell, const HalfPlane& h, double tol, double& lo, double& hi) {
  const Point2 dir{-h.normal().y, h.normal().x};
  int count = 0;
  for (const Point2& p : cell.vertices()) {
    if (std::abs(h.signed_distance(p)) > tol) continue;
    const double t = dot(p, dir);
    lo = count == 0 ? t : std::min(lo, t);
    hi = count == 0 ? t : std::max(hi, t);
    ++count;
  }
  return count >= 2;
}

}  // namespace detail

/// Truncated power diagram: cell i is the body clipped by every bisector
/// halfplane of site i. O(n^2) clips.
inline PowerPartition build(const WeightedConfiguration& config, const ConvexPolygon& body) {
  validate(config, body);
  const std::size_t n = config.size();
  const auto& x = config.sites;
  const auto& r = config.radii;

  PowerPartition out;
  out.body = body;
  out.cells.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    ConvexPolygon cell = body;
    for (std::size_t j = 0; j < n && !cell.empty(); ++j)
      if (j != i) cell = clip(cell, bisector(x[i], x[j], r[i], r[j]));
    out.cells[i] = std::move(cell);
  }

  const double diam = diameter(body);
  const double min_edge = 1e-10 * diam;
  const double on_line = 1e-11 * diam;
  for (std::size_t i = 0; i < n; ++i) {
    if (out.cells[i].empty()) continue;
    for (std::size_t j = i + 1; j < n; ++j) {
      if (out.cells[j].empty()) continue;
      const HalfPlane h = bisector(x[i], x[j], r[i], r[j]);
      double lo_i, hi_i, lo_j, hi_j;
      if (!detail::edge_on_line(out.cells[i], h, on_line, lo_i, hi_i)) continue;
      if (!detail::edge_on_line(out.cells[j], h, on_line, lo_j, hi_j)) continue;
      const double lo = std::max(lo_i, lo_j);
      const double hi = std::min(hi_i, hi_j);
      if (hi - lo <= min_edge) continue;
      const Point2 dir{-h.normal().y, h.normal().x};
      const Point2 base = h.offset() * h.normal();
      out.adjacency.push_back({i, j, base + lo * dir, base + hi * dir});
    }
  }
  return out;
}

/// Recovers radii (last radius zero) from a partition and its sites by
/// walking the adjacency graph; each shared edge fixes r_i - r_j through the
/// bisector offset. Throws std::invalid_argument if a cell is empty or the
/// adjacency graph is disconnected.
inline std::vector<double> reconstruct_radii(const PowerPartition& partition, std::span<const Point2> sites) {
  const std::size_t n = partition.size();
  if (sites.size() != n) throw std::invalid_argument("site count does not match partition");
  if (n == 0) return {};
  for (const ConvexPolygon& c : partition.cells)
    if (c.empty()) throw std::invalid_argument("cannot reconstruct radii with a vanishing cell");

  std::vector<std::vector<std::pair<std::size_t, const Interface*>>> nbrs(n);
  for (const Interface& f : partition.adjacency) {
    nbrs[f.i].push_back({f.j, &f});
    nbrs[f.j].push_back({f.i, &f});
  }

  std::vector<double> radii(n, 0.0);
  std::vector<bool> seen(n, false);
  std::deque<std::size_t> queue{n - 1};
  seen[n - 1] = true;
  while (!queue.empty()) {
    const std::size_t j = queue.front();
    queue.pop_front();
    for (const auto& [i, f] : nbrs[j]) {
      if (seen[i]) continue;
      // directed distance t from x_i to the shared edge: r_i - r_j = 2 D t - D^2
      const Point2 u = sites[j] - sites[i];
      const double d = norm(u);
      const Point2 mid = 0.5 * (f->a + f->b);
      const double t = dot(mid - sites[i], u) / d;
      radii[i] = radii[j] + 2.0 * d * t - d * d;
      seen[i] = true;
      queue.push_back(i);
    }
  }
  if (!std::all_of(seen.begin(), seen.end(), [](bool s) { return s; }))
    throw std::invalid_argument("adjacency graph is disconnected");
  return radii;
}

}  // namespace equipart

#endif  // EQUIPART_POWER_DIAGRAM_HPP
