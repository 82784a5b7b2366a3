#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "equipart/equipartition.hpp"
#include "oracles.hpp"

using namespace equipart;

namespace {

const ConvexPolygon kSquare = ConvexPolygon::rectangle(0, 0, 1, 1);
const ConvexPolygon kTriangle = ConvexPolygon::from_vertices({{0, 0}, {1, 0}, {0, 1}});

DensityField left_loaded(std::size_t m, double total) {
  GridDensity g{{0, 0}, 1.0 / m, m, m, {}};
  for (std::size_t r = 0; r < m; ++r)
    for (std::size_t c = 0; c < m; ++c) g.values.push_back(c < m / 2 ? 3.0 : 1.0);
  return DensityField(g).scaled(total / 2.0);
}

double shoelace(const std::vector<Point2>& v) {
  double a = 0;
  for (std::size_t i = 0; i < v.size(); ++i) a += v[i].x * v[(i + 1) % v.size()].y - v[(i + 1) % v.size()].x * v[i].y;
  return 0.5 * a;
}

double boundary_length(const std::vector<Point2>& v) {
  double l = 0;
  for (std::size_t i = 0; i < v.size(); ++i) l += std::hypot(v[(i + 1) % v.size()].x - v[i].x, v[(i + 1) % v.size()].y - v[i].y);
  return l;
}

// every cell of `a` has a Hausdorff-close partner in `b`
void expect_same_cells(const PowerPartition& a, const PowerPartition& b, double tol) {
  ASSERT_EQ(a.size(), b.size());
  for (const auto& c : a.cells) {
    double best = 1e300;
    for (const auto& d : b.cells) best = std::min(best, hausdorff_distance(c, d));
    EXPECT_LT(best, tol);
  }
}

}  // namespace

TEST(Residual, SymmetricSitesVanish) {
  const std::vector<Point2> two{{0.25, 0.5}, {0.75, 0.5}};
  for (double r : residual(two, kSquare, DensityField::uniform(kSquare), FunctionalSpec::perimeter())) EXPECT_NEAR(r, 0.0, 1e-12);
  const ConvexPolygon wide = ConvexPolygon::rectangle(0, 0, 2, 1);
  const std::vector<Point2> apart{{0.2, 0.5}, {0.8, 0.5}};
  for (double r : residual(apart, wide, DensityField::uniform(wide), FunctionalSpec::perimeter())) EXPECT_NEAR(r, 0.0, 1e-9);
}

TEST(Residual, PermutationEquivariant) {
  std::mt19937_64 rng(1);
  const auto sites = oracle::random_points_in(kSquare.vertices(), 5, rng, 0.1);
  const DensityField u = DensityField::uniform(kSquare);
  const auto base = residual(sites, kSquare, u, FunctionalSpec::perimeter());
  std::vector<std::size_t> sigma{3, 0, 4, 1, 2};
  std::vector<Point2> permuted;
  for (std::size_t k : sigma) permuted.push_back(sites[k]);
  const auto perm = residual(permuted, kSquare, u, FunctionalSpec::perimeter());
  for (std::size_t k = 0; k < 5; ++k) EXPECT_NEAR(perm[k], base[sigma[k]], 1e-9);
  EXPECT_NEAR(std::accumulate(base.begin(), base.end(), 0.0), 0.0, 1e-12);
}

TEST(Residual, MeasureMassIsAbsolute) {
  const std::vector<Point2> two{{0.25, 0.5}, {0.75, 0.5}};
  const auto r = residual(two, kSquare, DensityField::uniform(kSquare), FunctionalSpec::measure_mass(left_loaded(16, 1.0)));
  EXPECT_NEAR(r[0], 0.75 - 0.5, 1e-9);
  EXPECT_NEAR(r[1], 0.25 - 0.5, 1e-9);
}

TEST(Functionals, Evaluate) {
  EXPECT_DOUBLE_EQ(FunctionalSpec::perimeter().evaluate(kSquare), 4.0);
  EXPECT_DOUBLE_EQ(FunctionalSpec::diameter().evaluate(kSquare), std::sqrt(2.0));
  EXPECT_DOUBLE_EQ(FunctionalSpec::width().evaluate(kSquare), 1.0);
  EXPECT_DOUBLE_EQ(FunctionalSpec::centroid_x().evaluate(kSquare), 0.5);
  const auto g = FunctionalSpec::centroid_map([](Point2 c) { return c.x * c.y; }, "xy");
  EXPECT_DOUBLE_EQ(g.evaluate(kSquare), 0.25);
  EXPECT_EQ(g.name(), "xy");
  EXPECT_DOUBLE_EQ(FunctionalSpec::measure_mass(DensityField::uniform(kSquare, 2.0)).evaluate(ConvexPolygon::rectangle(0, 0, 0.5, 1)), 1.0);
}

TEST(Search, SquareTwoFromSymmetricStart) {
  const auto r = search_from(kSquare, DensityField::uniform(kSquare), {{{0.25, 0.5}, {0.75, 0.5}}}, {FunctionalSpec::perimeter()});
  ASSERT_TRUE(r.converged);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_NEAR(r.masses[i], 0.5, 1e-9);
    EXPECT_NEAR(r.functional_values[i][0], 3.0, 1e-6);
  }
  EXPECT_LE(r.spread, 1e-6);
}

TEST(Search, SquareTwoRandomStarts) {
  const auto r = search(kSquare, DensityField::uniform(kSquare), 2, {FunctionalSpec::perimeter()});
  ASSERT_TRUE(r.converged);
  EXPECT_LE(r.spread, 1e-6);
  // any cut through the center is a solution; the cells are congruent
  for (const auto& cell : r.partition.cells) EXPECT_NEAR(area(cell), 0.5, 1e-9);
  EXPECT_NEAR(r.functional_values[0][0], r.functional_values[1][0], 1e-6 * 3.0);
}

TEST(Search, SquareFour) {
  const auto r = search(kSquare, DensityField::uniform(kSquare), 4, {FunctionalSpec::perimeter()});
  ASSERT_TRUE(r.converged);
  EXPECT_LE(r.spread, 1e-5);
  for (double m : r.masses) EXPECT_NEAR(m, 0.25, 1e-9);
  // the quadrant partition is a solution with perimeter 2
  const auto q = search_from(kSquare, DensityField::uniform(kSquare), {{{0.25, 0.25}, {0.75, 0.25}, {0.25, 0.75}, {0.75, 0.75}}},
                             {FunctionalSpec::perimeter()});
  ASSERT_TRUE(q.converged);
  for (const auto& v : q.functional_values) EXPECT_NEAR(v[0], 2.0, 1e-9);
}

// The triangle's n = 3 solutions form a continuum, so the golden value belongs
// to this seed; it is re-derived here from the emitted cells.
// The n = 3 solutions on the triangle form a continuum, so only the defining
// properties are checked, plus reproducibility for a fixed seed.
TEST(Search, TriangleThree) {
  const auto r = search(kTriangle, DensityField::uniform(kTriangle), 3, {FunctionalSpec::perimeter()});
  const auto again = search(kTriangle, DensityField::uniform(kTriangle), 3, {FunctionalSpec::perimeter()});
  EXPECT_EQ(r.config.sites, again.config.sites);
  ASSERT_TRUE(r.converged);
  double lo = 1e300, hi = 0;
  for (const auto& cell : r.partition.cells) {
    EXPECT_NEAR(shoelace(cell.vertices()), 1.0 / 6, 1e-9);
    const double p = boundary_length(cell.vertices());
    lo = std::min(lo, p), hi = std::max(hi, p);
  }
  EXPECT_LE((hi - lo) / hi, 1e-5);
}

TEST(Search, OtherFunctionals) {
  const DensityField u = DensityField::uniform(kSquare);
  for (const auto& f : {FunctionalSpec::diameter(), FunctionalSpec::width(), FunctionalSpec::centroid_x()}) {
    const auto r = search(kSquare, u, 3, {f});
    EXPECT_TRUE(r.converged) << f.name();
    EXPECT_LE(r.spread, 1e-5) << f.name();
    for (double m : r.masses) EXPECT_NEAR(m, 1.0 / 3, 1e-9);
  }
}

TEST(Search, RelabeledStartsGiveSamePartition) {
  std::mt19937_64 rng(2);
  const auto sites = oracle::random_points_in(kSquare.vertices(), 5, rng, 0.1);
  auto shuffled = sites;
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  const DensityField u = DensityField::uniform(kSquare);
  const auto a = search_from(kSquare, u, {sites}, {FunctionalSpec::perimeter()});
  const auto b = search_from(kSquare, u, {shuffled}, {FunctionalSpec::perimeter()});
  expect_same_cells(a.partition, b.partition, 1e-8);
}

TEST(Search, DeterministicAcrossJobCounts) {
  SearchOptions one, four;
  four.jobs = 4;
  const DensityField u = DensityField::uniform(kSquare);
  const auto a = search(kSquare, u, 5, {FunctionalSpec::perimeter()}, one);
  const auto b = search(kSquare, u, 5, {FunctionalSpec::perimeter()}, four);
  ASSERT_EQ(a.config.sites.size(), b.config.sites.size());
  for (std::size_t i = 0; i < a.config.sites.size(); ++i) EXPECT_EQ(a.config.sites[i], b.config.sites[i]);
  EXPECT_EQ(a.spread, b.spread);
}

// Six pieces with equal perimeter is open; whatever happens the flag must be honest.
TEST(Search, NonPrimePowerHonesty) {
  SearchOptions opts;
  opts.starts = 2;
  opts.max_evaluations = 40;
  const auto r = search(kSquare, DensityField::uniform(kSquare), 6, {FunctionalSpec::perimeter()}, opts);
  EXPECT_EQ(r.converged, r.spread <= opts.spread_tol);
  for (double m : r.masses) EXPECT_NEAR(m, 1.0 / 6, 1e-9);
  double lo = 1e300, hi = 0, mean = 0;
  for (const auto& v : r.functional_values) lo = std::min(lo, v[0]), hi = std::max(hi, v[0]), mean += v[0] / 6;
  EXPECT_NEAR(r.spread, (hi - lo) / mean, 1e-12);
}

TEST(Search, SingleCell) {
  const auto r = search(kSquare, DensityField::uniform(kSquare), 1, {FunctionalSpec::perimeter()});
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.partition.cells[0], kSquare);
  EXPECT_THROW(search(kSquare, DensityField::uniform(kSquare), 0, {FunctionalSpec::perimeter()}), std::invalid_argument);
}

TEST(MultiMeasure, IdenticalUniform) {
  const DensityField u = DensityField::uniform(kSquare);
  for (std::size_t n : {2u, 4u}) {
    const auto r = multi_measure_partition({u, u}, kSquare, n);
    ASSERT_TRUE(r.converged);
    for (const auto& cell : r.partition.cells) EXPECT_NEAR(u.mass(cell), 1.0 / n, 1e-9);
  }
}

TEST(MultiMeasure, UniformAndLeftLoaded) {
  const DensityField u = DensityField::uniform(kSquare);
  const DensityField g = left_loaded(64, 1.0);
  const auto r = multi_measure_partition({u, g}, kSquare, 2);
  ASSERT_TRUE(r.converged);
  const auto& grid = g.as_grid();
  for (const auto& cell : r.partition.cells) {
    EXPECT_NEAR(shoelace(cell.vertices()), 0.5, 1e-6);
    EXPECT_NEAR(oracle::fine_grid_mass(cell.vertices(), grid.origin, grid.cell_size, grid.width, grid.height, grid.values, 8), 0.5, 1e-3);
  }
  EXPECT_THROW(multi_measure_partition({u}, kSquare, 2), std::invalid_argument);
  EXPECT_THROW(multi_measure_partition({u, DensityField::uniform(kSquare, 2.0)}, kSquare, 2), std::invalid_argument);
}

TEST(Recursion, PrimePowerFactors) {
  EXPECT_EQ(prime_power_factors(1), std::vector<std::size_t>{});
  EXPECT_EQ(prime_power_factors(8), std::vector<std::size_t>{8});
  EXPECT_EQ(prime_power_factors(6), (std::vector<std::size_t>{2, 3}));
  EXPECT_EQ(prime_power_factors(12), (std::vector<std::size_t>{4, 3}));
  EXPECT_EQ(prime_power_factors(360), (std::vector<std::size_t>{8, 9, 5}));
}

TEST(Recursion, FourIsOneStage) {
  const auto t = factor_recursive(kSquare, DensityField::uniform(kSquare), 4, {FunctionalSpec::perimeter()});
  EXPECT_TRUE(t.converged());
  EXPECT_EQ(t.children.size(), 4u);
  const auto leaves = t.leaves();
  ASSERT_EQ(leaves.size(), 4u);
  for (const auto* leaf : leaves) EXPECT_NEAR(area(leaf->region), 0.25, 1e-9);
}

TEST(Recursion, OneIsTheBody) {
  const auto t = factor_recursive(kSquare, DensityField::uniform(kSquare), 1, {FunctionalSpec::perimeter()});
  EXPECT_TRUE(t.children.empty());
  EXPECT_EQ(t.region, kSquare);
  EXPECT_DOUBLE_EQ(t.mass, 1.0);
}

TEST(Recursion, SixWithTwoMeasures) {
  const DensityField u = DensityField::uniform(kSquare);
  const DensityField g = left_loaded(64, 1.0);
  const auto t = factor_recursive(kSquare, u, 6, {FunctionalSpec::measure_mass(g)});
  EXPECT_TRUE(t.converged());
  ASSERT_EQ(t.children.size(), 2u);
  for (const auto& c : t.children) EXPECT_EQ(c.children.size(), 3u);
  const auto leaves = t.leaves();
  ASSERT_EQ(leaves.size(), 6u);
  double total = 0;
  for (const auto* leaf : leaves) {
    EXPECT_NEAR(leaf->mass, 1.0 / 6, 10 * 1e-9);
    EXPECT_NEAR(u.mass(leaf->region), 1.0 / 6, 1e-8);
    EXPECT_NEAR(g.mass(leaf->region), 1.0 / 6, 1e-3);
    total += g.mass(leaf->region);
  }
  EXPECT_NEAR(total, 1.0, 1e-9);
}
