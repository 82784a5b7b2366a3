#include <CLI11.hpp>

#include <iostream>

#include "equipart/cli.hpp"

namespace {

void add_solver_flags(CLI::App* sub, equipart::cli::RunConfig& cfg, bool densities_required) {
  sub->add_option("--body", cfg.body, "convex polygon file, one 'x y' vertex per line")->required();
  auto* density = sub->add_option("--density", cfg.densities, "grid density file or 'uniform'");
  if (densities_required) density->required();
  sub->add_option("--n", cfg.n, "number of cells");
  sub->add_option("--tol", cfg.tol, "mass tolerance (0: solver default)");
  sub->add_option("--spread-tol", cfg.spread_tol, "relative functional spread tolerance");
  sub->add_option("--seed", cfg.seed, "random seed");
  sub->add_option("--starts", cfg.starts, "multi-start count");
  sub->add_option("--jobs", cfg.jobs, "worker threads for multi-start");
  sub->add_option("--out", cfg.out, "output directory");
}

}  // namespace

int main(int argc, char** argv) {
  using equipart::cli::RunConfig;
  CLI::App app{"Convex equipartitions via power diagrams"};
  app.require_subcommand(1);

  RunConfig partition, hamsandwich, obstruction, trees;
  partition.densities = {"uniform"};
  hamsandwich.densities.clear();
  obstruction.out.clear();
  trees.out.clear();

  auto* p = app.add_subcommand("partition", "equal-measure, equal-functional partition");
  add_solver_flags(p, partition, false);
  p->add_option("--functional", partition.functional, "perimeter|diameter|width|centroid-x");

  auto* h = app.add_subcommand("hamsandwich", "equipartition of two measures");
  add_solver_flags(h, hamsandwich, true);

  auto* o = app.add_subcommand("obstruction", "gcd table of boundary coefficients");
  o->add_option("--n-max", obstruction.n_max, "largest n (<= 512)");
  o->add_option("--out", obstruction.out, "also write obstruction.csv here");

  auto* t = app.add_subcommand("trees", "cell counts of the tree decomposition");
  t->add_option("--n", trees.n, "number of points");
  t->add_option("--d", trees.d, "ambient dimension");
  t->add_option("--out", trees.out, "also write trees.csv here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : equipart::cli::kInputError;
  }

  if (p->parsed()) return equipart::cli::cmd_partition(partition);
  if (h->parsed()) return equipart::cli::cmd_hamsandwich(hamsandwich);
  if (o->parsed()) return equipart::cli::cmd_obstruction(obstruction);
  return equipart::cli::cmd_trees(trees);
}
