#ifndef EQUIPART_TOPOLOGY_HPP
#define EQUIPART_TOPOLOGY_HPP

// Combinatorics of the tree-indexed cell decomposition of the one-point
// compactified configuration space F_n(R^d), and the boundary coefficients
// that decide whether the top class survives (n a prime power) or dies.
//
// A cell is an ordered rooted tree of height d whose n leaves all sit on the
// bottom level; its dimension is (vertex count - 1). Level-j nodes group the
// points sharing their first j coordinates.

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace equipart::topology {

using BigInt = boost::multiprecision::cpp_int;

/// Ordered rooted tree stored level by level: `fanout[j][k]` is the number of
/// children of the k-th node (left to right) on level j, for j = 0..d-1.
/// Leaves (level d) carry labels when the tree is labeled.
struct LabeledTree {
  std::vector<std::vector<std::size_t>> fanout;
  std::vector<std::size_t> labels;  // empty for the unlabeled quotient

  std::size_t height() const { return fanout.size(); }
  std::size_t leaf_count() const {
    return fanout.empty() ? 1 : std::accumulate(fanout.back().begin(), fanout.back().end(), std::size_t{0});
  }
  /// |T|: root plus every child listed on every level.
  std::size_t vertex_count() const {
    std::size_t v = 1;
    for (const auto& level : fanout) v = std::accumulate(level.begin(), level.end(), v);
    return v;
  }
  std::size_t dimension() const { return vertex_count() - 1; }

  friend bool operator==(const LabeledTree&, const LabeledTree&) = default;
  friend auto operator<=>(const LabeledTree&, const LabeledTree&) = default;
};

/// Trees of one dimension, with the number of labeled cells they carry.
struct DimensionGroup {
  std::size_t dimension = 0;
  std::vector<LabeledTree> trees;  // unlabeled shapes
  BigInt labeled_count = 0;
};

constexpr std::size_t kMaxPoints = 8;
constexpr std::size_t kMaxDimension = 3;

inline void check_bounds(std::size_t n, std::size_t d) {
  if (n < 1 || n > kMaxPoints || d < 1 || d > kMaxDimension)
    throw std::out_of_range("tree enumeration requires 1 <= n <= 8 and 1 <= d <= 3");
}

inline BigInt factorial(std::size_t n) {
  BigInt f = 1;
  for (std::size_t k = 2; k <= n; ++k) f *= k;
  return f;
}

namespace detail {

// Subtree shapes rooted at one node with `leaves` leaves below it and `depth`
// levels to go, as per-level fanout lists. Memoized on (leaves, depth).
using Shape = std::vector<std::vector<std::size_t>>;

class ShapeTable {
 public:
  const std::vector<Shape>& get(std::size_t leaves, std::size_t depth) {
    const auto key = std::make_pair(leaves, depth);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    std::vector<Shape> out;
    if (depth == 1) {
      out.push_back({{leaves}});
    } else {
      // ordered compositions of `leaves` into the children's leaf counts
      std::vector<std::size_t> parts;
      std::function<void(std::size_t)> compose = [&](std::size_t rest) {
        if (rest == 0) {
          combine(parts, depth, out);
          return;
        }
        for (std::size_t k = 1; k <= rest; ++k) {
          parts.push_back(k);
          compose(rest - k);
          parts.pop_back();
        }
      };
      compose(leaves);
    }
    return memo_.emplace(key, std::move(out)).first->second;
  }

 private:
  // Cartesian product of the children's shapes, concatenated level-wise.
  void combine(const std::vector<std::size_t>& parts, std::size_t depth, std::vector<Shape>& out) {
    std::vector<const std::vector<Shape>*> options;
    for (std::size_t p : parts) options.push_back(&get(p, depth - 1));
    std::vector<std::size_t> pick(parts.size(), 0);
    while (true) {
      Shape s(depth);
      s[0] = {parts.size()};
      for (std::size_t c = 0; c < parts.size(); ++c) {
        const Shape& child = (*options[c])[pick[c]];
        for (std::size_t lvl = 0; lvl < child.size(); ++lvl)
          s[lvl + 1].insert(s[lvl + 1].end(), child[lvl].begin(), child[lvl].end());
      }
      out.push_back(std::move(s));
      std::size_t c = 0;
      while (c < pick.size() && ++pick[c] == options[c]->size()) pick[c++] = 0;
      if (c == pick.size()) break;
    }
  }

  std::map<std::pair<std::size_t, std::size_t>, std::vector<Shape>> memo_;
};

}  // namespace detail

/// All unlabeled tree shapes for (n, d), sorted.
inline std::vector<LabeledTree> unlabeled_trees(std::size_t n, std::size_t d) {
  check_bounds(n, d);
  detail::ShapeTable table;
  std::vector<LabeledTree> out;
  for (const auto& shape : table.get(n, d)) out.push_back({shape, {}});
  std::sort(out.begin(), out.end());
  return out;
}

/// Calls fn(tree) for every labeled tree of (n, d): each shape paired with
/// every assignment of labels 1..n to its leaves. The count is n! per shape,
/// since no nontrivial relabeling fixes a cell.
inline void for_each_labeled_tree(std::size_t n, std::size_t d, const std::function<void(const LabeledTree&)>& fn) {
  for (LabeledTree t : unlabeled_trees(n, d)) {
    t.labels.resize(n);
    std::iota(t.labels.begin(), t.labels.end(), std::size_t{1});
    do fn(t);
    while (std::next_permutation(t.labels.begin(), t.labels.end()));
  }
}

/// Cells grouped by dimension, ascending. With `labeled`, each group also
/// materializes the unlabeled shapes only; labeled cells are counted, and
/// can be listed through for_each_labeled_tree.
inline std::vector<DimensionGroup> enumerate_trees(std::size_t n, std::size_t d, bool labeled) {
  std::map<std::size_t, DimensionGroup> groups;
  const BigInt per_shape = labeled ? factorial(n) : BigInt(1);
  for (auto& t : unlabeled_trees(n, d)) {
    auto& g = groups[t.dimension()];
    g.dimension = t.dimension();
    g.labeled_count += per_shape;
    g.trees.push_back(std::move(t));
  }
  std::vector<DimensionGroup> out;
  for (auto& [dim, g] : groups) out.push_back(std::move(g));
  return out;
}

/// Ranks of the cellular chain groups of the unlabeled quotient relative to
/// the point at infinity, indexed by dimension 0..n*d.
inline std::vector<std::size_t> chain_ranks(std::size_t n, std::size_t d) {
  std::vector<std::size_t> ranks(n * d + 1, 0);
  for (const auto& t : unlabeled_trees(n, d)) ++ranks[t.dimension()];
  return ranks;
}

inline BigInt binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  BigInt b = 1;
  for (std::size_t i = 1; i <= k; ++i) b = b * (n - k + i) / i;
  return b;
}

/// Coefficient of the boundary of the two-line cell with n1 points on the
/// first line: C(n, n1), with sign (-1)^n1 for twisted coefficients.
inline BigInt boundary_coefficient(std::size_t n, std::size_t n1, bool twisted) {
  if (n1 == 0 || n1 >= n) throw std::out_of_range("boundary coefficient needs 0 < n1 < n");
  BigInt b = binomial(n, n1);
  if (twisted && n1 % 2 == 1) b = -b;
  return b;
}

struct ObstructionReport {
  std::size_t n = 0;
  std::vector<BigInt> coefficients;  // twisted, n1 = 1..n-1
  BigInt gcd = 0;
  bool is_prime_power = false;
  std::optional<std::uint64_t> p;
};

/// gcd of the boundary coefficients: p when n = p^k (the top class survives
/// with p-torsion), 1 otherwise (the boundary map is onto).
inline ObstructionReport obstruction(std::size_t n) {
  if (n < 2) throw std::out_of_range("obstruction needs n >= 2");
  ObstructionReport r;
  r.n = n;
  for (std::size_t n1 = 1; n1 < n; ++n1) {
    r.coefficients.push_back(boundary_coefficient(n, n1, true));
    r.gcd = boost::multiprecision::gcd(r.gcd, boost::multiprecision::abs(r.coefficients.back()));
  }
  r.is_prime_power = r.gcd > 1;
  if (r.is_prime_power) r.p = r.gcd.convert_to<std::uint64_t>();
  return r;
}

}  // namespace equipart::topology

#endif  // EQUIPART_TOPOLOGY_HPP
