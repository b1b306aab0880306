#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "vexlab/grid.hpp"
#include "vexlab/maximal.hpp"

namespace vexlab {

/// Calderon-Zygmund decomposition on Q (side a power of two): the maximal
/// dyadic subcubes P of Q with mean of v over P strictly above the threshold,
/// found by top-down stopping. Their union equals the superlevel set of the
/// dyadic maximal function of v restricted to Q. Requires v >= 0 on Q.
inline std::vector<Cube> cz_decompose(const GridFunction& v, const Cube& q,
                                      double threshold) {
  const Grid& g = v.grid();
  require_cube_in_grid(g, q);
  if (!(threshold >= 0.0))
    throw std::invalid_argument("cz_decompose: threshold must be >= 0");
  for (int c : cells_of(g, q))
    if (v[c] < 0.0) throw std::invalid_argument("cz_decompose: v must be >= 0 on Q");
  const auto d = detail::DyadicSums::build(v, q, /*absolute=*/false);

  // DFS in block coordinates, children visited in row-major order so the
  // output is deterministic and sorted by position within each size class.
  struct Node {
    int level, bx, by;
  };
  std::vector<Node> stack{{d.levels, 0, 0}};
  std::vector<Cube> selected;
  while (!stack.empty()) {
    const Node n = stack.back();
    stack.pop_back();
    if (d.block_avg(n.level, n.bx, n.by) > threshold) {
      const int s = 1 << n.level;
      selected.push_back(Cube{{q.anchor[0] + n.bx * s,
                               g.dim() == 1 ? 0 : q.anchor[1] + n.by * s},
                              s});
      continue;
    }
    if (n.level == 0) continue;
    // Push children in reverse row-major order so they pop in row-major order.
    if (g.dim() == 1) {
      stack.push_back({n.level - 1, 2 * n.bx + 1, 0});
      stack.push_back({n.level - 1, 2 * n.bx, 0});
    } else {
      stack.push_back({n.level - 1, 2 * n.bx + 1, 2 * n.by + 1});
      stack.push_back({n.level - 1, 2 * n.bx + 1, 2 * n.by});
      stack.push_back({n.level - 1, 2 * n.bx, 2 * n.by + 1});
      stack.push_back({n.level - 1, 2 * n.bx, 2 * n.by});
    }
  }
  return selected;
}

// One level of the CZ ladder: the maximal dyadic cubes above this level's
// threshold, together with E_j = P_j minus the next level's superlevel set.
struct CZLevel {
  int k = 0;
  double threshold = 0.0;
  std::vector<Cube> cubes;
  std::vector<CellMask> retained;      // E_j^k per cube, same order as cubes
  std::vector<bool> density_ok;        // |E_j^k| >= lambda |P_j^k| per cube
};

struct CZLevels {
  Cube base;
  double lambda = 0.0;
  double alpha = 0.0;  // mean of v over Q
  double beta = 0.0;   // 2^dim / (1 - lambda)
  std::vector<CZLevel> levels;
  bool all_density_ok = true;
};

/// Level-set cube families: level k selects the maximal dyadic subcubes where
/// the dyadic maximal function exceeds beta^k * alpha, with
/// beta = 2^dim/(1-lambda); retained sets are checked for the lambda-density
/// |E_j^k| >= lambda |P_j^k| by direct cell count.
inline CZLevels build_cz_levels(const GridFunction& v, const Cube& q, double lambda,
                                int max_level) {
  const Grid& g = v.grid();
  if (!(lambda > 0.0 && lambda < 1.0))
    throw std::invalid_argument("build_cz_levels: lambda must be in (0,1)");
  if (max_level < 0) throw std::invalid_argument("build_cz_levels: max_level must be >= 0");
  if (cube_cell_count(g, q) == 0) throw std::invalid_argument("build_cz_levels: empty cube");

  CZLevels out;
  out.base = q;
  out.lambda = lambda;
  out.beta = (g.dim() == 1 ? 2.0 : 4.0) / (1.0 - lambda);
  {
    double sum = 0.0;
    const auto cells = cells_of(g, q);
    for (int c : cells) sum += v[c];
    out.alpha = sum / static_cast<double>(cells.size());
  }

  std::vector<std::vector<Cube>> families(static_cast<std::size_t>(max_level) + 2);
  for (int k = 0; k <= max_level + 1; ++k)
    families[static_cast<std::size_t>(k)] =
        cz_decompose(v, q, std::pow(out.beta, static_cast<double>(k)) * out.alpha);

  for (int k = 0; k <= max_level; ++k) {
    CZLevel level;
    level.k = k;
    level.threshold = std::pow(out.beta, static_cast<double>(k)) * out.alpha;
    level.cubes = families[static_cast<std::size_t>(k)];
    CellMask next(g);
    for (const Cube& p : families[static_cast<std::size_t>(k) + 1])
      next = next.unite(CellMask::of_cube(g, p));
    for (const Cube& p : level.cubes) {
      CellMask e = CellMask::of_cube(g, p).subtract(next);
      const bool ok = static_cast<double>(e.count()) >=
                      lambda * static_cast<double>(cube_cell_count(g, p));
      level.density_ok.push_back(ok);
      out.all_density_ok = out.all_density_ok && ok;
      level.retained.push_back(std::move(e));
    }
    out.levels.push_back(std::move(level));
  }
  return out;
}

// Covering extraction result: a subcover of the marked points, partitioned
// into pairwise disjoint subfamilies by first-fit coloring.
struct CoverExtraction {
  std::vector<Cube> subcover;
  std::vector<int> subfamily;  // color per subcover entry
  int subfamily_count = 0;
};

inline bool cubes_intersect(const Grid& g, const Cube& a, const Cube& b) {
  for (int axis = 0; axis < g.dim(); ++axis) {
    const int lo = std::max(a.anchor[axis], b.anchor[axis]);
    const int hi = std::min(a.anchor[axis] + a.side, b.anchor[axis] + b.side);
    if (lo >= hi) return false;
  }
  return true;
}

/// Greedy covering extraction: points are (cell, cube) pairs with the cell in
/// the cube's r-core. Cubes are taken largest first (ties by anchor, then by
/// marked cell); a cube is selected when its marked point is not yet covered.
/// Selected cubes are then split into disjoint subfamilies by first-fit
/// coloring of the intersection graph.
inline CoverExtraction besicovitch_extract(const Grid& g,
                                           std::vector<std::pair<int, Cube>> points,
                                           double r) {
  for (const auto& [cell, cube] : points) {
    require_cube_in_grid(g, cube);
    if (!core_cells(g, cube, r).contains(cell))
      throw std::invalid_argument("besicovitch_extract: marked cell not in cube core");
  }
  std::sort(points.begin(), points.end(), [](const auto& a, const auto& b) {
    if (a.second.side != b.second.side) return a.second.side > b.second.side;
    if (a.second.anchor != b.second.anchor) return a.second.anchor < b.second.anchor;
    return a.first < b.first;
  });

  CoverExtraction out;
  CellMask covered(g);
  for (const auto& [cell, cube] : points) {
    if (covered.contains(cell)) continue;
    out.subcover.push_back(cube);
    for (int c : cells_of(g, cube)) covered.set(c);
  }

  out.subfamily.resize(out.subcover.size(), -1);
  for (std::size_t i = 0; i < out.subcover.size(); ++i) {
    int color = 0;
    while (true) {
      bool clash = false;
      for (std::size_t j = 0; j < i; ++j) {
        if (out.subfamily[j] == color &&
            cubes_intersect(g, out.subcover[i], out.subcover[j])) {
          clash = true;
          break;
        }
      }
      if (!clash) break;
      ++color;
    }
    out.subfamily[i] = color;
    out.subfamily_count = std::max(out.subfamily_count, color + 1);
  }
  return out;
}

}  // namespace vexlab
