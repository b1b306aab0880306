#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "vexlab/decomp.hpp"
#include "vexlab/rng.hpp"

using namespace vexlab;

namespace {

GridFunction random_nonneg_int(const Grid& g, Rng& rng, int hi) {
  GridFunction f(g, 0.0);
  for (int c = 0; c < g.cell_count(); ++c)
    f[c] = static_cast<double>(rng.uniform_int(0, hi));
  return f;
}

Cube random_pow2_cube(const Grid& g, Rng& rng) {
  std::vector<int> sides;
  for (int s = 1; s <= max_cube_side(g); s *= 2) sides.push_back(s);
  Cube q;
  q.side = sides[rng.below(sides.size())];
  q.anchor[0] = static_cast<int>(rng.below(static_cast<std::uint64_t>(g.extent(0) - q.side + 1)));
  q.anchor[1] = g.dim() == 2 ? static_cast<int>(rng.below(
                                   static_cast<std::uint64_t>(g.extent(1) - q.side + 1)))
                             : 0;
  return q;
}

}  // namespace

TEST_CASE("cz_decompose examples") {
  const Grid g4 = Grid::line(4);
  const Cube q{{0, 0}, 4};

  // average above the threshold at the root: the root is returned
  const GridFunction big(g4, {5.0, 5.0, 5.0, 5.0});
  const auto root = cz_decompose(big, q, 3.0);
  REQUIRE(root.size() == 1);
  CHECK(root[0] == q);

  // spike: the j-child {2,3} has average 4 > 3, its parent average 2 <= 3
  const GridFunction spike(g4, {0.0, 0.0, 8.0, 0.0});
  const auto cubes = cz_decompose(spike, q, 3.0);
  REQUIRE(cubes.size() == 1);
  CHECK(cubes[0] == Cube{{2, 0}, 2});

  CHECK(cz_decompose(GridFunction(g4, 0.0), q, 0.0).empty());
  CHECK_THROWS_AS(cz_decompose(spike, Cube{{0, 0}, 3}, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(cz_decompose(GridFunction(g4, {-1.0, 0.0, 0.0, 0.0}), q, 1.0),
                  std::invalid_argument);
}

TEST_CASE("cz union equals the dyadic superlevel set, stopping bound holds") {
  Rng rng(301);
  for (const Grid& g : {Grid::line(32), Grid::line(64), Grid::plane(8, 8)}) {
    for (int rep = 0; rep < 25; ++rep) {
      const auto v = random_nonneg_int(g, rng, 16);
      const Cube q = random_pow2_cube(g, rng);
      const auto md = dyadic_maximal_on_cube(v, q);
      const double thr = rng.uniform(0.25, 12.0);
      const auto cubes = cz_decompose(v, q, thr);
      CellMask uni(g);
      for (const Cube& pc : cubes) {
        // selected cubes are disjoint dyadic subcubes of Q
        for (int c : cells_of(g, pc)) {
          CHECK(!uni.contains(c));
          uni.set(c);
        }
      }
      for (int c : cells_of(g, q)) CHECK((md[c] > thr) == uni.contains(c));
      // maximality: parent average at most the threshold, so selected averages
      // stay below 2^dim * threshold
      for (const Cube& pc : cubes) {
        if (pc.side == q.side) continue;
        double sum = 0.0;
        for (int c : cells_of(g, pc)) sum += v[c];
        const double avg = sum / static_cast<double>(cube_cell_count(g, pc));
        CHECK(avg <= (g.dim() == 1 ? 2.0 : 4.0) * thr * (1.0 + 1e-12));
      }
    }
  }
}

TEST_CASE("cz levels: constant and spike cases") {
  const Grid g8 = Grid::line(8);
  const Cube q{{0, 0}, 8};

  // constant: strict thresholds keep every level empty
  const auto lv = build_cz_levels(GridFunction(g8, 2.0), q, 0.5, 3);
  CHECK(lv.alpha == 2.0);
  CHECK(lv.beta == 4.0);
  for (const auto& level : lv.levels) CHECK(level.cubes.empty());
  CHECK(lv.all_density_ok);

  // single spike: nested chain of selected cubes shrinking with k. With
  // beta = 4 a spike in an 8-cell cube supports levels k = 0 and k = 1.
  GridFunction spike(g8, 0.0);
  spike[5] = 64.0;
  const auto sp = build_cz_levels(spike, q, 0.5, 1);
  CHECK(sp.alpha == 8.0);
  REQUIRE(sp.levels.size() == 2);
  for (const auto& level : sp.levels) REQUIRE(level.cubes.size() == 1);
  CHECK(sp.levels[0].cubes[0].side > sp.levels[1].cubes[0].side);
  {
    const auto outer = CellMask::of_cube(g8, sp.levels[0].cubes[0]);
    const auto inner = CellMask::of_cube(g8, sp.levels[1].cubes[0]);
    CHECK(inner.is_subset_of(outer));
  }
  CHECK(sp.all_density_ok);

  // k = 0 level equals a plain decomposition at threshold alpha
  const auto direct = cz_decompose(spike, q, sp.alpha);
  CHECK(sp.levels[0].cubes == direct);

  // a taller grid carries a longer chain: levels 0..2 all nonempty
  const Grid g64 = Grid::line(64);
  GridFunction tall(g64, 0.0);
  tall[37] = 4096.0;
  const auto tl = build_cz_levels(tall, Cube{{0, 0}, 64}, 0.5, 2);
  REQUIRE(tl.levels.size() == 3);
  for (const auto& level : tl.levels) CHECK(level.cubes.size() == 1);
  CHECK(tl.levels[0].cubes[0].side > tl.levels[2].cubes[0].side);
  CHECK(tl.all_density_ok);
}

TEST_CASE("cz level density and nesting on random data") {
  Rng rng(302);
  for (const Grid& g : {Grid::line(32), Grid::plane(8, 8)}) {
    for (int rep = 0; rep < 20; ++rep) {
      const auto v = random_nonneg_int(g, rng, 12);
      const Cube q = random_pow2_cube(g, rng);
      const double lambda = std::vector<double>{0.25, 0.5, 0.75}[rng.below(3)];
      const auto lv = build_cz_levels(v, q, lambda, 3);
      CHECK(lv.all_density_ok);
      for (std::size_t k = 0; k < lv.levels.size(); ++k) {
        const auto& level = lv.levels[k];
        for (std::size_t j = 0; j < level.cubes.size(); ++j) {
          // |E_j^k| >= lambda |P_j^k| by direct count
          CHECK(static_cast<double>(level.retained[j].count()) >=
                lambda * static_cast<double>(cube_cell_count(g, level.cubes[j])));
          // equivalently, the next level eats at most (1-lambda)|P|
          const int eaten =
              cube_cell_count(g, level.cubes[j]) - level.retained[j].count();
          CHECK(static_cast<double>(eaten) <=
                (1.0 - lambda) * static_cast<double>(cube_cell_count(g, level.cubes[j])));
        }
        if (k + 1 < lv.levels.size()) {
          CellMask omega_k(g), omega_next(g);
          for (const Cube& pc : level.cubes)
            for (int c : cells_of(g, pc)) omega_k.set(c);
          for (const Cube& pc : lv.levels[k + 1].cubes)
            for (int c : cells_of(g, pc)) omega_next.set(c);
          CHECK(omega_next.is_subset_of(omega_k));
        }
      }
    }
  }
}

TEST_CASE("besicovitch extraction examples") {
  const Grid g = Grid::line(16);

  // pairwise disjoint cubes: all selected, one subfamily
  std::vector<std::pair<int, Cube>> disjoint;
  for (int a = 0; a + 4 <= 16; a += 4) {
    const Cube q{{a, 0}, 4};
    disjoint.emplace_back(core_cells(g, q, 0.5).cells()[0], q);
  }
  const auto ex = besicovitch_extract(g, disjoint, 0.5);
  CHECK(ex.subcover.size() == 4);
  CHECK(ex.subfamily_count == 1);

  // identical duplicated cubes covering one point: exactly one selected
  const Cube dup{{2, 0}, 4};
  const int mark = core_cells(g, dup, 0.5).cells()[0];
  const auto ex2 = besicovitch_extract(
      g, {{mark, dup}, {mark, dup}, {mark, dup}}, 0.5);
  CHECK(ex2.subcover.size() == 1);
  CHECK(ex2.subfamily_count == 1);

  // precondition: the marked cell must lie in the core
  CHECK_THROWS_AS(besicovitch_extract(g, {{0, Cube{{0, 0}, 8}}}, 0.5),
                  std::invalid_argument);
}

TEST_CASE("besicovitch: 1D overlapping chains stay within 4 subfamilies") {
  Rng rng(303);
  for (int rep = 0; rep < 60; ++rep) {
    const Grid g = Grid::line(20);
    std::vector<std::pair<int, Cube>> points;
    const int k = 2 + static_cast<int>(rng.below(19));  // up to 20 intervals
    for (int i = 0; i < k; ++i) {
      Cube q;
      q.side = 2 + static_cast<int>(rng.below(10));
      q.anchor[0] = static_cast<int>(rng.below(static_cast<std::uint64_t>(20 - q.side + 1)));
      q.anchor[1] = 0;
      const auto core = core_cells(g, q, 0.5).cells();
      points.emplace_back(core[rng.below(core.size())], q);
    }
    const auto ex = besicovitch_extract(g, points, 0.5);
    CHECK(ex.subfamily_count <= 4);
    // coverage of every marked point
    CellMask covered(g);
    for (const Cube& q : ex.subcover)
      for (int c : cells_of(g, q)) covered.set(c);
    for (const auto& [cell, cube] : points) CHECK(covered.contains(cell));
  }
}

TEST_CASE("besicovitch coverage and subfamily disjointness in 2D") {
  Rng rng(304);
  const Grid g = Grid::plane(10, 10);
  for (int rep = 0; rep < 30; ++rep) {
    std::vector<std::pair<int, Cube>> points;
    const int k = 3 + static_cast<int>(rng.below(12));
    for (int i = 0; i < k; ++i) {
      Cube q;
      q.side = 2 + static_cast<int>(rng.below(6));
      q.anchor[0] = static_cast<int>(rng.below(static_cast<std::uint64_t>(10 - q.side + 1)));
      q.anchor[1] = static_cast<int>(rng.below(static_cast<std::uint64_t>(10 - q.side + 1)));
      const auto core = core_cells(g, q, 0.5).cells();
      if (core.empty()) continue;
      points.emplace_back(core[rng.below(core.size())], q);
    }
    if (points.empty()) continue;
    const auto ex = besicovitch_extract(g, points, 0.5);
    CellMask covered(g);
    for (const Cube& q : ex.subcover)
      for (int c : cells_of(g, q)) covered.set(c);
    for (const auto& [cell, cube] : points) CHECK(covered.contains(cell));
    for (std::size_t i = 0; i < ex.subcover.size(); ++i)
      for (std::size_t j = i + 1; j < ex.subcover.size(); ++j)
        if (ex.subfamily[i] == ex.subfamily[j])
          CHECK(!cubes_intersect(g, ex.subcover[i], ex.subcover[j]));
    // deterministic under identical input
    const auto ex_again = besicovitch_extract(g, points, 0.5);
    CHECK(ex_again.subcover == ex.subcover);
    CHECK(ex_again.subfamily == ex.subfamily);
  }
}
