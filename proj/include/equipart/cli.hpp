#ifndef EQUIPART_CLI_HPP
#define EQUIPART_CLI_HPP

// Command implementations behind the `equipart` executable. Each returns the
// process exit status: 0 success, 1 non-convergence, 2 input error.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "equipart/density.hpp"
#include "equipart/equipartition.hpp"
#include "equipart/geometry.hpp"
#include "equipart/io.hpp"
#include "equipart/topology.hpp"
#include "equipart/transport.hpp"

namespace equipart::cli {

enum ExitCode : int { kSuccess = 0, kNotConverged = 1, kInputError = 2 };

struct RunConfig {
  std::filesystem::path body;
  std::vector<std::string> densities{"uniform"};  // "uniform" or a grid file path
  std::size_t n = 2;
  std::string functional = "perimeter";
  double tol = 0.0;  // 0: transport default
  double spread_tol = 1e-5;
  std::uint64_t seed = 1;
  int starts = 8;
  int jobs = 1;
  std::filesystem::path out = "out";
  std::size_t n_max = 64;
  std::size_t d = 2;
};

namespace detail {

class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline DensityField load_density(const std::string& spec, const ConvexPolygon& body) {
  if (spec == "uniform") return DensityField::uniform(body);
  try {
    return io::read_grid_density(std::filesystem::path(spec));
  } catch (const std::invalid_argument& e) {
    throw io::ParseError(spec + ": " + e.what());
  }
}

inline FunctionalSpec functional_from_name(const std::string& name) {
  if (name == "perimeter") return FunctionalSpec::perimeter();
  if (name == "diameter") return FunctionalSpec::diameter();
  if (name == "width") return FunctionalSpec::width();
  if (name == "centroid-x") return FunctionalSpec::centroid_x();
  throw InputError("unknown functional '" + name + "' (perimeter|diameter|width|centroid-x)");
}

inline SearchOptions search_options(const RunConfig& cfg) {
  SearchOptions o;
  o.starts = cfg.starts;
  o.spread_tol = cfg.spread_tol;
  o.mass_tol = cfg.tol;
  o.seed = cfg.seed;
  o.jobs = cfg.jobs;
  return o;
}

inline void check_common(const RunConfig& cfg) {
  if (cfg.n < 1) throw InputError("--n must be at least 1");
  if (cfg.starts < 1) throw InputError("--starts must be at least 1");
  if (cfg.jobs < 1) throw InputError("--jobs must be at least 1");
  if (cfg.tol < 0.0) throw InputError("--tol must be nonnegative");
  if (!(cfg.spread_tol > 0.0)) throw InputError("--spread-tol must be positive");
}

inline io::Json result_json(const EquipartitionResult& r) {
  io::Json j;
  j["converged"] = r.converged;
  j["spread"] = r.spread;
  j["iterations"] = r.iterations;
  io::Json sites = io::Json::array(), cells = io::Json::array();
  for (const Point2& p : r.config.sites) sites.push_back(io::to_json(p));
  for (const ConvexPolygon& c : r.partition.cells) cells.push_back(io::to_json(c));
  j["sites"] = sites;
  j["radii"] = r.config.radii;
  j["cells"] = cells;
  return j;
}

template <class Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const io::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::out_of_range& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const SolverError& e) {
    err << "error: " << e.what() << '\n';
    return kNotConverged;
  }
}

}  // namespace detail

/// Equal-mass, equal-functional partition of the body. Writes report.json and
/// partition.svg into cfg.out.
inline int cmd_partition(const RunConfig& cfg, std::ostream& err = std::cerr) {
  return detail::guarded(err, [&] {
    detail::check_common(cfg);
    if (cfg.densities.size() != 1) throw detail::InputError("partition takes exactly one --density");
    const ConvexPolygon body = io::read_polygon(cfg.body);
    const DensityField density = detail::load_density(cfg.densities[0], body);
    const FunctionalSpec functional = detail::functional_from_name(cfg.functional);
    const EquipartitionResult r = search(body, density, cfg.n, {functional}, detail::search_options(cfg));

    io::Json j;
    j["schema"] = 1;
    j["command"] = "partition";
    j["n"] = cfg.n;
    j["functional"] = functional.name();
    j["seed"] = cfg.seed;
    j["masses"] = r.masses;
    j["functional_values"] = r.functional_values;
    j.update(detail::result_json(r));
    io::write_atomically(cfg.out / "report.json", io::dump_json(j));
    io::write_atomically(cfg.out / "partition.svg",
                         io::render_svg(body, r.partition.cells, {std::nullopt, r.config.sites}));
    if (!r.converged) err << "search did not converge (spread " << r.spread << ")\n";
    return r.converged ? kSuccess : kNotConverged;
  });
}

/// Two-measure equipartition; densities are normalized to mass 1 on the body.
inline int cmd_hamsandwich(const RunConfig& cfg, std::ostream& err = std::cerr) {
  return detail::guarded(err, [&] {
    detail::check_common(cfg);
    if (cfg.densities.size() != 2) throw detail::InputError("hamsandwich takes exactly two --density inputs");
    const ConvexPolygon body = io::read_polygon(cfg.body);
    std::vector<DensityField> measures;
    for (const auto& spec : cfg.densities) {
      const DensityField d = detail::load_density(spec, body);
      const double m = d.mass(body);
      if (!(m > 0.0)) throw detail::InputError(spec + ": density has no mass on the body");
      measures.push_back(d.scaled(1.0 / m));
    }
    const EquipartitionResult r = multi_measure_partition(measures, body, cfg.n, detail::search_options(cfg));

    io::Json masses = io::Json::array();
    for (const ConvexPolygon& c : r.partition.cells) masses.push_back({measures[0].mass(c), measures[1].mass(c)});
    io::Json j;
    j["schema"] = 1;
    j["command"] = "hamsandwich";
    j["n"] = cfg.n;
    j["densities"] = cfg.densities;
    j["seed"] = cfg.seed;
    j["masses"] = masses;
    j.update(detail::result_json(r));
    io::write_atomically(cfg.out / "report.json", io::dump_json(j));
    const DensityField& shown = measures[1].is_grid() ? measures[1] : measures[0];
    io::write_atomically(cfg.out / "partition.svg", io::render_svg(body, r.partition.cells, {shown, r.config.sites}));
    if (!r.converged) err << "search did not converge (spread " << r.spread << ")\n";
    return r.converged ? kSuccess : kNotConverged;
  });
}

inline std::string obstruction_csv(std::size_t n_max) {
  std::ostringstream s;
  s << "n,gcd,is_prime_power,p\n";
  for (std::size_t n = 2; n <= n_max; ++n) {
    const auto rep = topology::obstruction(n);
    s << n << ',' << rep.gcd << ',' << (rep.is_prime_power ? "true" : "false") << ',';
    if (rep.p) s << *rep.p;
    s << '\n';
  }
  return s.str();
}

/// CSV of the obstruction gcd for n = 2..n_max, to `out` (and cfg.out if set).
inline int cmd_obstruction(const RunConfig& cfg, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  return detail::guarded(err, [&] {
    if (cfg.n_max < 2 || cfg.n_max > 512) throw detail::InputError("--n-max must be in [2, 512]");
    const std::string csv = obstruction_csv(cfg.n_max);
    out << csv;
    if (!cfg.out.empty()) io::write_atomically(cfg.out / "obstruction.csv", csv);
    return kSuccess;
  });
}

inline std::string trees_csv(std::size_t n, std::size_t d) {
  std::ostringstream s;
  s << "dimension,unlabeled_count,labeled_count\n";
  for (const auto& g : topology::enumerate_trees(n, d, true))
    s << g.dimension << ',' << g.trees.size() << ',' << g.labeled_count << '\n';
  return s.str();
}

inline int cmd_trees(const RunConfig& cfg, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  return detail::guarded(err, [&] {
    const std::string csv = trees_csv(cfg.n, cfg.d);
    out << csv;
    if (!cfg.out.empty()) io::write_atomically(cfg.out / "trees.csv", csv);
    return kSuccess;
  });
}

}  // namespace equipart::cli

#endif  // EQUIPART_CLI_HPP
