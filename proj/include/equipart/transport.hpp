#ifndef EQUIPART_TRANSPORT_HPP
#define EQUIPART_TRANSPORT_HPP

// Semi-discrete optimal transport from a density on K to weighted sites:
// find radii whose truncated power cells carry prescribed masses.
//
// The solver ascends the concave Kantorovich dual
//   Phi(r) = sum_i q_i r_i + sum_i int_{C_i(r)} (|x - x_i|^2 - r_i) dmu
// whose gradient is q - mu(C(r)) and whose negated Hessian is the weighted
// graph Laplacian of the cell adjacencies (edge weight: density mass of the
// shared edge over twice the site distance). Steps are damped Newton steps
// with backtracking.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "equipart/density.hpp"
#include "equipart/geometry.hpp"
#include "equipart/power_diagram.hpp"

namespace equipart {

/// Positive per-site target masses summing to the source mass.
struct MassTargets {
  std::vector<double> q;

  static MassTargets equal(double total, std::size_t n) {
    return {std::vector<double>(n, total / static_cast<double>(n))};
  }

  std::size_t size() const { return q.size(); }
  double sum() const { return std::accumulate(q.begin(), q.end(), 0.0); }

  void validate(double total_mass) const {
    if (q.empty()) throw std::invalid_argument("no mass targets");
    for (double v : q)
      if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument("mass targets must be positive");
    if (std::abs(sum() - total_mass) > 1e-9 * total_mass)
      throw std::invalid_argument("mass targets do not sum to the source mass");
  }
};

class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double best_residual)
      : std::runtime_error(what), best_residual_(best_residual) {}
  /// Smallest max |mass - target| / mu(K) reached.
  double best_residual() const { return best_residual_; }

 private:
  double best_residual_;
};

struct TransportOptions {
  /// Max |mass_i - q_i| allowed, relative to mu(K). Zero selects the default
  /// for the density kind (1e-9 uniform, 1e-6 grid).
  double tol = 0.0;
  int max_iterations = 10000;
  std::optional<std::vector<double>> initial_radii;
};

inline double default_tolerance(const DensityField& density) { return density.is_uniform() ? 1e-9 : 1e-6; }

struct TransportSolution {
  WeightedConfiguration config;  // radii normalized so the last is zero
  PowerPartition partition;
  std::vector<double> masses;
  double residual = 0.0;  // max |mass - q| / mu(K)
  int iterations = 0;
  std::vector<double> dual_trace;  // Phi at every accepted iterate
};

inline double cell_mass(const ConvexPolygon& cell, const DensityField& density) { return density.mass(cell); }

inline std::vector<double> cell_masses(const PowerPartition& partition, const DensityField& density) {
  std::vector<double> out;
  out.reserve(partition.size());
  for (const ConvexPolygon& c : partition.cells) out.push_back(density.mass(c));
  return out;
}

/// Sum over cells of int_{C_i} |x - x_i|^2 dmu.
inline double transport_cost(const PowerPartition& partition, std::span<const Point2> sites, const DensityField& density) {
  if (sites.size() != partition.size()) throw std::invalid_argument("site count does not match partition");
  double cost = 0.0;
  for (std::size_t i = 0; i < sites.size(); ++i)
    cost += density.moments(partition.cells[i], sites[i]).second_moment_about({0.0, 0.0});
  return cost;
}

/// The dual objective at a built partition.
inline double dual_objective(const PowerPartition& partition, const WeightedConfiguration& config,
                             const DensityField& density, std::span<const double> q) {
  double phi = 0.0;
  for (std::size_t i = 0; i < config.size(); ++i) {
    const Moments m = density.moments(partition.cells[i], config.sites[i]);
    phi += q[i] * config.radii[i] + m.second_moment_about({0.0, 0.0}) - config.radii[i] * m.m0;
  }
  return phi;
}

namespace detail {

struct DualState {
  WeightedConfiguration config;
  PowerPartition partition;
  std::vector<double> masses;
  std::vector<double> gradient;  // q - masses
  double gradient_norm = 0.0;
  double max_error = 0.0;
  double phi = 0.0;
};

inline DualState evaluate_dual(WeightedConfiguration config, const ConvexPolygon& body, const DensityField& density,
                               std::span<const double> q) {
  DualState s;
  s.partition = build(config, body);
  s.masses = cell_masses(s.partition, density);
  s.gradient.resize(q.size());
  double sq = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    s.gradient[i] = q[i] - s.masses[i];
    sq += s.gradient[i] * s.gradient[i];
    s.max_error = std::max(s.max_error, std::abs(s.gradient[i]));
  }
  s.gradient_norm = std::sqrt(sq);
  s.phi = dual_objective(s.partition, config, density, q);
  s.config = std::move(config);
  return s;
}

// Radii making the diagram equal the Voronoi diagram of the sites contracted
// toward the body's centroid, so every contracted site sits inside K and
// every cell starts nonempty.
inline std::vector<double> contracted_radii(std::span<const Point2> sites, const ConvexPolygon& body) {
  const Point2 c = centroid(body);
  double inner = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < body.size(); ++k) {
    const Point2 a = body[k], b = body[(k + 1) % body.size()];
    inner = std::min(inner, cross(b - a, c - a) / distance(a, b));
  }
  double reach = 0.0;
  for (const Point2& x : sites) reach = std::max(reach, distance(x, c));
  const double t = std::min(1.0, 0.5 * inner / reach);
  std::vector<double> radii;
  radii.reserve(sites.size());
  for (const Point2& x : sites) {
    const Point2 y = c + t * (x - c);
    radii.push_back(squared_norm(x - c) - squared_norm(y - c) / t);
  }
  return radii;
}

inline Eigen::VectorXd newton_direction(const DualState& s, const DensityField& density) {
  const std::size_t n = s.masses.size();
  const auto m = static_cast<Eigen::Index>(n - 1);
  Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(m, m);
  for (const Interface& f : s.partition.adjacency) {
    const double w = density.line_integral(f.a, f.b) / (2.0 * distance(s.config.sites[f.i], s.config.sites[f.j]));
    const auto i = static_cast<Eigen::Index>(f.i), j = static_cast<Eigen::Index>(f.j);
    if (i < m) lap(i, i) += w;
    if (j < m) lap(j, j) += w;
    if (i < m && j < m) {
      lap(i, j) -= w;
      lap(j, i) -= w;
    }
  }
  Eigen::VectorXd g(m);
  for (Eigen::Index i = 0; i < m; ++i) g(i) = s.gradient[static_cast<std::size_t>(i)];
  // a disconnected adjacency graph (zero-density gaps) leaves the reduced
  // Laplacian singular; a tiny ridge keeps the solve defined
  const double scale = lap.diagonal().maxCoeff();
  lap.diagonal().array() += 1e-12 * scale;
  Eigen::VectorXd step = lap.ldlt().solve(g);
  if (!(scale > 0.0) || !step.allFinite()) step = g;  // plain gradient ascent
  Eigen::VectorXd full = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  full.head(m) = step;
  return full;
}

}  // namespace detail

/// Solves for radii carrying the target masses; returns the full solution.
/// Throws SolverError on non-convergence and std::invalid_argument on bad
/// input (coincident sites, invalid targets).
inline TransportSolution solve_transport(std::span<const Point2> sites, const DensityField& density,
                                         const ConvexPolygon& body, const MassTargets& targets,
                                         const TransportOptions& opts = {}) {
  const std::size_t n = sites.size();
  if (n == 0) throw std::invalid_argument("no sites");
  if (targets.size() != n) throw std::invalid_argument("target count does not match site count");
  const double total = density.mass(body);
  if (!(total > 0.0)) throw std::invalid_argument("source measure has no mass on the body");
  targets.validate(total);
  const double tol = opts.tol > 0.0 ? opts.tol : default_tolerance(density);
  const std::span<const double> q(targets.q);
  const double min_q = *std::min_element(q.begin(), q.end());

  WeightedConfiguration config{{sites.begin(), sites.end()}, std::vector<double>(n, 0.0)};
  if (opts.initial_radii) {
    if (opts.initial_radii->size() != n) throw std::invalid_argument("initial radii count mismatch");
    config.radii = *opts.initial_radii;
  }
  validate(config, body);

  detail::DualState state = detail::evaluate_dual(config, body, density, q);
  auto min_mass = [](const detail::DualState& s) { return *std::min_element(s.masses.begin(), s.masses.end()); };
  if (!(min_mass(state) > 0.0)) {
    config.radii = detail::contracted_radii(sites, body);
    state = detail::evaluate_dual(config, body, density, q);
    if (!(min_mass(state) > 0.0)) throw SolverError("no starting point with all cells charged", state.max_error / total);
  }
  // iterates keep every cell above this floor, away from vanishing cells
  const double floor = std::min(0.1 * min_q, 0.5 * min_mass(state));
  const double phi_slack = 1e-13 * (std::abs(state.phi) + total * std::pow(diameter(body), 2));

  TransportSolution out;
  out.dual_trace.push_back(state.phi);
  int it = 0;
  for (; it < opts.max_iterations && state.max_error > tol * total; ++it) {
    const Eigen::VectorXd dir = detail::newton_direction(state, density);
    double alpha = 1.0;
    bool accepted = false;
    while (alpha > 1e-12) {
      WeightedConfiguration trial = state.config;
      for (std::size_t i = 0; i < n; ++i) trial.radii[i] += alpha * dir(static_cast<Eigen::Index>(i));
      detail::DualState next = detail::evaluate_dual(std::move(trial), body, density, q);
      if (min_mass(next) >= floor && next.gradient_norm <= (1.0 - 0.5 * alpha) * state.gradient_norm &&
          next.phi >= state.phi - phi_slack) {
        state = std::move(next);
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) break;
    out.dual_trace.push_back(state.phi);
  }
  if (state.max_error > tol * total)
    throw SolverError("transport solver did not converge (residual " + std::to_string(state.max_error / total) + ")",
                      state.max_error / total);

  out.config = state.config.normalized();
  out.partition = build(out.config, body);
  out.masses = cell_masses(out.partition, density);
  for (std::size_t i = 0; i < n; ++i) out.residual = std::max(out.residual, std::abs(out.masses[i] - q[i]) / total);
  out.iterations = it;
  return out;
}

/// Radii (last one zero) whose truncated cells carry the target masses.
inline WeightedConfiguration solve_radii(std::span<const Point2> sites, const DensityField& density,
                                         const ConvexPolygon& body, const MassTargets& targets, double tol = 0.0) {
  TransportOptions opts;
  opts.tol = tol;
  return solve_transport(sites, density, body, targets, opts).config;
}

}  // namespace equipart

#endif  // EQUIPART_TRANSPORT_HPP
