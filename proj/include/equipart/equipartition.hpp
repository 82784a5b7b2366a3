#ifndef EQUIPART_EQUIPARTITION_HPP
#define EQUIPART_EQUIPARTITION_HPP

// Search for site configurations whose equal-mass power partition also
// equalizes a functional of the cells.
//
// For sites x, the transport solver fixes radii r(x) giving every cell the
// mass mu(K)/n; the residual is the vector of functional values minus their
// common target. Its zero set is reached by multi-start simplex descent on
// the squared residual followed by a minimum-norm Gauss-Newton polish with
// finite-difference Jacobians. Nothing guarantees success; results carry an
// honest `converged` flag.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <future>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "equipart/density.hpp"
#include "equipart/geometry.hpp"
#include "equipart/nelder_mead.hpp"
#include "equipart/power_diagram.hpp"
#include "equipart/transport.hpp"

namespace equipart {

/// A continuous functional on convex cells.
class FunctionalSpec {
 public:
  enum class Kind { Perimeter, Diameter, Width, CentroidMap, MeasureMass };

  static FunctionalSpec perimeter() { return FunctionalSpec(Kind::Perimeter, "perimeter"); }
  static FunctionalSpec diameter() { return FunctionalSpec(Kind::Diameter, "diameter"); }
  static FunctionalSpec width() { return FunctionalSpec(Kind::Width, "width"); }

  /// g composed with the area centroid; g maps R^2 to R.
  static FunctionalSpec centroid_map(std::function<double(Point2)> g, std::string name = "centroid-map") {
    FunctionalSpec f(Kind::CentroidMap, std::move(name));
    f.map_ = std::move(g);
    return f;
  }
  static FunctionalSpec centroid_x() {
    return centroid_map([](Point2 c) { return c.x; }, "centroid-x");
  }

  /// Mass of the cell under a second measure; the target is the absolute
  /// share measure(region) / n rather than mutual equality.
  static FunctionalSpec measure_mass(DensityField measure) {
    FunctionalSpec f(Kind::MeasureMass, "measure-mass");
    f.measure_ = std::move(measure);
    return f;
  }

  Kind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  const DensityField& measure() const { return *measure_; }

  double evaluate(const ConvexPolygon& cell) const {
    if (kind_ == Kind::MeasureMass) return measure_->mass(cell);
    if (cell.empty()) return 0.0;
    switch (kind_) {
      case Kind::Perimeter: return equipart::perimeter(cell);
      case Kind::Diameter: return equipart::diameter(cell);
      case Kind::Width: return equipart::width(cell);
      case Kind::CentroidMap: return map_(equipart::centroid(cell));
      case Kind::MeasureMass: break;
    }
    return 0.0;
  }

  /// The same functional for a sub-body (measure restricted to it).
  FunctionalSpec restricted_to(const ConvexPolygon& region) const {
    if (kind_ != Kind::MeasureMass) return *this;
    FunctionalSpec f = *this;
    f.measure_ = measure_->restricted(region, measure_->mass(region));
    return f;
  }

 private:
  FunctionalSpec(Kind k, std::string name) : kind_(k), name_(std::move(name)) {}

  Kind kind_;
  std::string name_;
  std::function<double(Point2)> map_;
  std::optional<DensityField> measure_;
};

struct EquipartitionResult {
  WeightedConfiguration config;
  PowerPartition partition;
  std::vector<double> masses;
  std::vector<std::vector<double>> functional_values;  // [cell][functional]
  double spread = std::numeric_limits<double>::infinity();
  int iterations = 0;  // residual evaluations over all starts
  bool converged = false;
};

struct SearchOptions {
  int starts = 8;
  double spread_tol = 1e-5;
  double mass_tol = 0.0;  // 0: transport default for the density kind
  std::uint64_t seed = 1;
  int jobs = 1;
  int lloyd_iterations = 5;
  int max_evaluations = 20000;  // per start
};

namespace detail {

struct Evaluation {
  TransportSolution transport;
  std::vector<std::vector<double>> values;
  std::vector<double> residual;  // flattened [functional][cell], scaled
  double spread = 0.0;
};

class ResidualProblem {
 public:
  ResidualProblem(const ConvexPolygon& body, const DensityField& density, std::size_t n,
                  std::vector<FunctionalSpec> functionals, const SearchOptions& opts)
      : body_(body), density_(density), n_(n), functionals_(std::move(functionals)), opts_(opts) {
    total_ = density_.mass(body_);
    diam_ = equipart::diameter(body_);
    for (const FunctionalSpec& f : functionals_)
      absolute_.push_back(f.kind() == FunctionalSpec::Kind::MeasureMass ? f.measure().mass(body_) : 0.0);
  }

  double diameter() const { return diam_; }
  const ConvexPolygon& body() const { return body_; }
  std::size_t size() const { return n_; }

  Evaluation evaluate(std::span<const Point2> sites) const {
    TransportOptions topts;
    topts.tol = opts_.mass_tol;
    Evaluation e;
    e.transport = solve_transport(sites, density_, body_, MassTargets::equal(total_, n_), topts);
    e.values.assign(n_, std::vector<double>(functionals_.size()));
    for (std::size_t j = 0; j < functionals_.size(); ++j) {
      std::vector<double> col(n_);
      for (std::size_t i = 0; i < n_; ++i) col[i] = e.values[i][j] = functionals_[j].evaluate(e.transport.partition.cells[i]);
      double target, scale;
      if (functionals_[j].kind() == FunctionalSpec::Kind::MeasureMass) {
        target = absolute_[j] / static_cast<double>(n_);
        scale = absolute_[j];
      } else {
        target = std::accumulate(col.begin(), col.end(), 0.0) / static_cast<double>(n_);
        scale = functionals_[j].kind() == FunctionalSpec::Kind::CentroidMap ? diam_ : std::abs(target);
      }
      if (!(scale > 0.0)) scale = 1.0;
      double spread = 0.0;
      if (functionals_[j].kind() == FunctionalSpec::Kind::MeasureMass) {
        for (double v : col) spread = std::max(spread, std::abs(v - target) / scale);
      } else {
        const auto [lo, hi] = std::minmax_element(col.begin(), col.end());
        spread = (*hi - *lo) / scale;
      }
      e.spread = std::max(e.spread, spread);
      if (functionals_[j].kind() == FunctionalSpec::Kind::MeasureMass) {
        append_radii_residual(e, sites, functionals_[j].measure(), absolute_[j]);
      } else {
        for (double v : col) e.residual.push_back((v - target) / scale);
      }
    }
    return e;
  }

  /// Squared residual norm, +inf outside the configuration space or when
  /// the transport solve fails.
  double objective(std::span<const double> coords) const {
    const auto sites = to_sites(coords);
    if (min_pairwise_distance(sites) < 1e-6 * diam_) return std::numeric_limits<double>::infinity();
    try {
      const Evaluation e = evaluate(sites);
      double s = 0.0;
      for (double r : e.residual) s += r * r;
      return s;
    } catch (const std::exception&) {
      return std::numeric_limits<double>::infinity();
    }
  }

  std::optional<Evaluation> try_evaluate(std::span<const double> coords) const {
    const auto sites = to_sites(coords);
    if (min_pairwise_distance(sites) < 1e-6 * diam_) return std::nullopt;
    try {
      return evaluate(sites);
    } catch (const std::exception&) {
      return std::nullopt;
    }
  }

  // Second-measure shares are locally constant wherever a cell sits inside a
  // region where the two densities have constant ratio, which stalls the
  // descent. The equal-share radii of the second measure have no such
  // plateaus, and the two diagrams coincide exactly when the radii differ by
  // a constant, so the descent runs on that difference instead.
  void append_radii_residual(Evaluation& e, std::span<const Point2> sites, const DensityField& measure,
                             double measure_total) const {
    TransportOptions topts;
    topts.tol = opts_.mass_tol;
    const TransportSolution other = solve_transport(sites, measure, body_, MassTargets::equal(measure_total, n_), topts);
    std::vector<double> diff(n_);
    for (std::size_t i = 0; i < n_; ++i) diff[i] = e.transport.config.radii[i] - other.config.radii[i];
    const double mean = std::accumulate(diff.begin(), diff.end(), 0.0) / static_cast<double>(n_);
    for (double v : diff) e.residual.push_back((v - mean) / (diam_ * diam_));
  }

  static std::vector<Point2> to_sites(std::span<const double> coords) {
    std::vector<Point2> s(coords.size() / 2);
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = {coords[2 * i], coords[2 * i + 1]};
    return s;
  }
  static std::vector<double> to_coords(std::span<const Point2> sites) {
    std::vector<double> c;
    for (const Point2& p : sites) {
      c.push_back(p.x);
      c.push_back(p.y);
    }
    return c;
  }

 private:
  ConvexPolygon body_;
  DensityField density_;
  std::size_t n_;
  std::vector<FunctionalSpec> functionals_;
  SearchOptions opts_;
  double total_ = 0.0;
  double diam_ = 0.0;
  std::vector<double> absolute_;
};

// Minimum-norm Gauss-Newton on the residual with forward-difference
// Jacobians and step halving. Returns the best coordinates seen.
inline std::vector<double> gauss_newton_polish(const ResidualProblem& prob, std::vector<double> x, double target,
                                               int max_iterations, int& evals) {
  auto ev = prob.try_evaluate(x);
  ++evals;
  if (!ev) return x;
  auto sq = [](const std::vector<double>& r) { return std::inner_product(r.begin(), r.end(), r.begin(), 0.0); };
  double f = sq(ev->residual);
  const double h = 1e-7 * prob.diameter();
  for (int it = 0; it < max_iterations && f > target; ++it) {
    const auto rows = static_cast<Eigen::Index>(ev->residual.size());
    const auto cols = static_cast<Eigen::Index>(x.size());
    Eigen::MatrixXd jac(rows, cols);
    Eigen::VectorXd r0 = Eigen::Map<const Eigen::VectorXd>(ev->residual.data(), rows);
    bool ok = true;
    for (Eigen::Index c = 0; c < cols && ok; ++c) {
      std::vector<double> xp = x;
      xp[static_cast<std::size_t>(c)] += h;
      const auto e = prob.try_evaluate(xp);
      ++evals;
      if (!e) ok = false;
      else jac.col(c) = (Eigen::Map<const Eigen::VectorXd>(e->residual.data(), rows) - r0) / h;
    }
    if (!ok) break;
    Eigen::VectorXd step = -jac.completeOrthogonalDecomposition().solve(r0);
    const double cap = 0.1 * prob.diameter();
    if (step.norm() > cap) step *= cap / step.norm();
    bool improved = false;
    for (double a = 1.0; a > 1e-4; a *= 0.5) {
      std::vector<double> xt = x;
      for (std::size_t k = 0; k < xt.size(); ++k) xt[k] += a * step(static_cast<Eigen::Index>(k));
      auto et = prob.try_evaluate(xt);
      ++evals;
      if (et && sq(et->residual) < f) {
        x = std::move(xt);
        ev = std::move(et);
        f = sq(ev->residual);
        improved = true;
        break;
      }
    }
    if (!improved) break;
  }
  return x;
}

inline Point2 random_point_in(const ConvexPolygon& body, std::mt19937_64& rng) {
  double x0 = body[0].x, x1 = x0, y0 = body[0].y, y1 = y0;
  for (const Point2& p : body.vertices()) {
    x0 = std::min(x0, p.x);
    x1 = std::max(x1, p.x);
    y0 = std::min(y0, p.y);
    y1 = std::max(y1, p.y);
  }
  std::uniform_real_distribution<double> ux(x0, x1), uy(y0, y1);
  while (true) {
    const Point2 p{ux(rng), uy(rng)};
    if (contains(body, p)) return p;
  }
}

/// Random sites in K relaxed by a few Lloyd steps (Voronoi centroids).
inline std::vector<Point2> lloyd_seeds(const ConvexPolygon& body, std::size_t n, int iterations, std::mt19937_64& rng) {
  std::vector<Point2> sites;
  const double guard = 1e-6 * equipart::diameter(body);
  while (sites.size() < n) {
    const Point2 p = random_point_in(body, rng);
    if (std::all_of(sites.begin(), sites.end(), [&](Point2 q) { return distance(p, q) > guard; })) sites.push_back(p);
  }
  for (int it = 0; it < iterations; ++it) {
    const PowerPartition vor = build({sites, std::vector<double>(n, 0.0)}, body);
    for (std::size_t i = 0; i < n; ++i)
      if (!vor.cells[i].empty()) sites[i] = centroid(vor.cells[i]);
  }
  return sites;
}

inline EquipartitionResult make_result(const Evaluation& e, int evaluations, double spread_tol) {
  EquipartitionResult r;
  r.config = e.transport.config;
  r.partition = e.transport.partition;
  r.masses = e.transport.masses;
  r.functional_values = e.values;
  r.spread = e.spread;
  r.iterations = evaluations;
  r.converged = e.spread <= spread_tol;
  return r;
}

// Moves every site by a Gaussian step; sites leaving K are pulled toward
// the centroid until they are back inside.
inline std::vector<double> hop(const ConvexPolygon& body, std::vector<double> x, double sigma, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, sigma);
  const Point2 c = centroid(body);
  for (std::size_t i = 0; i + 1 < x.size(); i += 2) {
    Point2 p{x[i] + g(rng), x[i + 1] + g(rng)};
    for (int k = 0; k < 60 && !contains(body, p); ++k) p = c + 0.5 * (p - c);
    x[i] = p.x;
    x[i + 1] = p.y;
  }
  return x;
}

// One start from the given sites (sorted first so the outcome does not depend
// on how the caller labeled them). A round that ends above tolerance is
// followed by a random hop away from the best point so far.
inline std::optional<EquipartitionResult> run_start(const ResidualProblem& prob, std::vector<Point2> sites,
                                                    const SearchOptions& opts, std::uint64_t hop_seed) {
  std::sort(sites.begin(), sites.end(), [](Point2 a, Point2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
  std::vector<double> x = ResidualProblem::to_coords(sites);
  // |r_i| <= tol/2 for every entry keeps the spread within tol
  const double target = std::pow(0.25 * opts.spread_tol, 2);
  std::mt19937_64 rng(hop_seed);
  int evals = 0;
  std::optional<Evaluation> best = prob.try_evaluate(x);
  std::vector<double> best_x = x;
  ++evals;
  while (evals < opts.max_evaluations) {
    NelderMeadOptions nm;
    nm.initial_step = 0.05 * prob.diameter();
    nm.max_evaluations = std::min(opts.max_evaluations - evals, 400 * static_cast<int>(x.size()));
    nm.target = std::max(target, 1e-8);
    nm.x_tolerance = 1e-10 * prob.diameter();
    const NelderMeadResult r = nelder_mead([&](const std::vector<double>& c) { return prob.objective(c); }, x, nm);
    evals += r.evaluations;
    x = gauss_newton_polish(prob, r.x, target, 30, evals);
    auto e = prob.try_evaluate(x);
    ++evals;
    if (e && (!best || e->spread < best->spread)) {
      best = std::move(e);
      best_x = x;
    }
    if (best && best->spread <= opts.spread_tol) break;
    x = hop(prob.body(), best_x, 0.2 * prob.diameter(), rng);
  }
  if (!best) return std::nullopt;
  return make_result(*best, evals, opts.spread_tol);
}

inline std::optional<EquipartitionResult> pick(std::vector<std::optional<EquipartitionResult>>& results) {
  std::optional<EquipartitionResult> best;
  int total = 0;
  for (auto& r : results) {
    if (!r) continue;
    total += r->iterations;
    // first success wins; otherwise the smallest spread
    if (!best || (!best->converged && (r->converged || r->spread < best->spread))) best = r;
  }
  if (best) best->iterations = total;
  return best;
}

}  // namespace detail

/// Residual of the equal-mass partition: functional values minus their mean
/// (or minus the absolute share for MeasureMass), unscaled.
inline std::vector<double> residual(std::span<const Point2> sites, const ConvexPolygon& body, const DensityField& density,
                                    const FunctionalSpec& functional, double mass_tol = 0.0) {
  SearchOptions opts;
  opts.mass_tol = mass_tol;
  const detail::ResidualProblem prob(body, density, sites.size(), {functional}, opts);
  const detail::Evaluation e = prob.evaluate(sites);
  std::vector<double> out;
  for (const auto& row : e.values) out.push_back(row[0]);
  double target = 0.0;
  if (functional.kind() == FunctionalSpec::Kind::MeasureMass)
    target = functional.measure().mass(body) / static_cast<double>(sites.size());
  else
    target = std::accumulate(out.begin(), out.end(), 0.0) / static_cast<double>(out.size());
  for (double& v : out) v -= target;
  return out;
}

namespace detail {

inline EquipartitionResult single_cell(const ConvexPolygon& body, const DensityField& density,
                                       const std::vector<FunctionalSpec>& functionals) {
  EquipartitionResult r;
  r.config = {{centroid(body)}, {0.0}};
  r.partition = build(r.config, body);
  r.masses = {density.mass(body)};
  std::vector<double> vals;
  for (const auto& f : functionals) vals.push_back(f.evaluate(body));
  r.functional_values = {vals};
  r.spread = 0.0;
  r.converged = true;
  return r;
}

}  // namespace detail

/// Multi-start search from explicit initial site sets (one per start).
inline EquipartitionResult search_from(const ConvexPolygon& body, const DensityField& density,
                                       const std::vector<std::vector<Point2>>& starts,
                                       const std::vector<FunctionalSpec>& functionals, const SearchOptions& opts = {}) {
  if (starts.empty()) throw std::invalid_argument("no starting configurations");
  const std::size_t n = starts.front().size();
  if (functionals.size() != 1) throw std::invalid_argument("exactly one functional is supported in the plane");
  if (n == 1) return detail::single_cell(body, density, functionals);
  const detail::ResidualProblem prob(body, density, n, functionals, opts);

  std::vector<std::optional<EquipartitionResult>> results(starts.size());
  const std::size_t jobs = static_cast<std::size_t>(std::max(1, opts.jobs));
  // batches of `jobs` starts; stop after the first batch holding a success so
  // the outcome is the same for every job count
  for (std::size_t b = 0; b < starts.size(); b += jobs) {
    const std::size_t e = std::min(starts.size(), b + jobs);
    if (jobs == 1) {
      results[b] = detail::run_start(prob, starts[b], opts, opts.seed * 7919u + b);
    } else {
      std::vector<std::future<std::optional<EquipartitionResult>>> fut;
      for (std::size_t k = b; k < e; ++k)
        fut.push_back(std::async(std::launch::async, [&, k] { return detail::run_start(prob, starts[k], opts, opts.seed * 7919u + k); }));
      for (std::size_t k = b; k < e; ++k) results[k] = fut[k - b].get();
    }
    bool hit = false;
    for (std::size_t k = b; k < e; ++k) hit = hit || (results[k] && results[k]->converged);
    if (hit) {
      // keep only the lowest-index success of this batch
      for (std::size_t k = b; k < e; ++k)
        if (results[k] && results[k]->converged) {
          for (std::size_t j = k + 1; j < e; ++j) results[j].reset();
          break;
        }
      break;
    }
  }
  auto best = detail::pick(results);
  if (!best) throw SolverError("every start failed in the transport solver", std::numeric_limits<double>::infinity());
  return *best;
}

/// Multi-start search from Lloyd-relaxed random seeds.
inline EquipartitionResult search(const ConvexPolygon& body, const DensityField& density, std::size_t n,
                                  const std::vector<FunctionalSpec>& functionals, const SearchOptions& opts = {}) {
  if (n == 0) throw std::invalid_argument("n must be positive");
  if (n == 1) return detail::single_cell(body, density, functionals);
  std::vector<std::vector<Point2>> starts;
  for (int s = 0; s < std::max(1, opts.starts); ++s) {
    std::seed_seq seq{static_cast<std::uint32_t>(opts.seed), static_cast<std::uint32_t>(opts.seed >> 32),
                      static_cast<std::uint32_t>(s)};
    std::mt19937_64 rng(seq);
    starts.push_back(detail::lloyd_seeds(body, n, opts.lloyd_iterations, rng));
  }
  return search_from(body, density, starts, functionals, opts);
}

/// Two-measure equipartition: transport from measures[0], second measure
/// split into equal absolute shares. Both measures must have mass 1 on K.
inline EquipartitionResult multi_measure_partition(const std::vector<DensityField>& measures, const ConvexPolygon& body,
                                                   std::size_t n, const SearchOptions& opts = {}) {
  if (measures.size() != 2) throw std::invalid_argument("plane equipartition takes exactly two measures");
  for (const auto& m : measures)
    if (std::abs(m.mass(body) - 1.0) > 1e-9) throw std::invalid_argument("measures must be normalized to mass 1 on the body");
  return search(body, measures[0], n, {FunctionalSpec::measure_mass(measures[1])}, opts);
}

/// Node of a recursive partition: `stage` splits `region` into
/// `children.size()` cells; leaves have no stage.
struct PartitionTree {
  ConvexPolygon region;
  double mass = 0.0;
  std::optional<EquipartitionResult> stage;
  std::vector<PartitionTree> children;

  bool converged() const {
    if (stage && !stage->converged) return false;
    return std::all_of(children.begin(), children.end(), [](const PartitionTree& c) { return c.converged(); });
  }

  std::vector<const PartitionTree*> leaves() const {
    if (children.empty()) return {this};
    std::vector<const PartitionTree*> out;
    for (const auto& c : children) {
      auto sub = c.leaves();
      out.insert(out.end(), sub.begin(), sub.end());
    }
    return out;
  }
};

/// Prime-power factors of n in increasing prime order (empty for n = 1).
inline std::vector<std::size_t> prime_power_factors(std::size_t n) {
  std::vector<std::size_t> out;
  for (std::size_t p = 2; p * p <= n; ++p) {
    std::size_t q = 1;
    while (n % p == 0) {
      n /= p;
      q *= p;
    }
    if (q > 1) out.push_back(q);
  }
  if (n > 1) out.push_back(n);
  return out;
}

namespace detail {

inline PartitionTree factor_node(const ConvexPolygon& region, const DensityField& density,
                                 const std::vector<FunctionalSpec>& functionals, std::span<const std::size_t> factors,
                                 const SearchOptions& opts, const std::string& path) {
  PartitionTree node;
  node.region = region;
  node.mass = density.mass(region);
  if (factors.empty()) return node;
  try {
    node.stage = search(region, density, factors[0], functionals, opts);
  } catch (const std::exception& e) {
    throw SolverError("at " + path + ": " + e.what(), std::numeric_limits<double>::infinity());
  }
  for (std::size_t i = 0; i < node.stage->partition.size(); ++i) {
    const ConvexPolygon& cell = node.stage->partition.cells[i];
    std::vector<FunctionalSpec> sub;
    for (const auto& f : functionals) sub.push_back(f.restricted_to(cell));
    node.children.push_back(factor_node(cell, density.restricted(cell, density.mass(cell)), sub, factors.subspan(1), opts,
                                        path + "/" + std::to_string(i)));
  }
  return node;
}

}  // namespace detail

/// Karasev-style recursion: split K into p1^a1 cells, then each cell into
/// p2^a2 cells with the measures restricted to it, and so on.
inline PartitionTree factor_recursive(const ConvexPolygon& body, const DensityField& density, std::size_t n,
                                      const std::vector<FunctionalSpec>& functionals, const SearchOptions& opts = {}) {
  if (n == 0) throw std::invalid_argument("n must be positive");
  const auto factors = prime_power_factors(n);
  return detail::factor_node(body, density, functionals, factors, opts, "root");
}

}  // namespace equipart

#endif  // EQUIPART_EQUIPARTITION_HPP
