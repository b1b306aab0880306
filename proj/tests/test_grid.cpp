#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <set>

#include "vexlab/grid.hpp"
#include "vexlab/rng.hpp"

using namespace vexlab;

namespace {

// Independent enumeration of all cubes containing a cell: loop every (anchor,
// side) pair and test containment arithmetically.
std::vector<Cube> brute_cubes_containing(const Grid& g, int cell) {
  std::vector<Cube> out;
  const auto c = g.coords_of(cell);
  for (int s = 1; s <= max_cube_side(g); ++s) {
    for (int ax = 0; ax + s <= g.extent(0); ++ax) {
      const int ay_end = g.dim() == 1 ? 1 : g.extent(1) - s + 1;
      for (int ay = 0; ay < ay_end; ++ay) {
        const bool in_x = ax <= c[0] && c[0] < ax + s;
        const bool in_y = g.dim() == 1 || (ay <= c[1] && c[1] < ay + s);
        if (in_x && in_y) out.push_back(Cube{{ax, ay}, s});
      }
    }
  }
  return out;
}

}  // namespace

TEST_CASE("cells_of basic examples") {
  const Grid g1 = Grid::line(8);
  CHECK(cells_of(g1, Cube{{2, 0}, 3}) == std::vector<int>{2, 3, 4});
  CHECK(cells_of(g1, Cube{{5, 0}, 1}) == std::vector<int>{5});

  const Grid g2 = Grid::plane(4, 4);
  CHECK(cells_of(g2, Cube{{0, 0}, 2}) == std::vector<int>{0, 1, 4, 5});
  CHECK(static_cast<int>(cells_of(g2, Cube{{1, 1}, 3}).size()) == 9);

  CHECK_THROWS_AS(cells_of(g1, Cube{{6, 0}, 3}), std::invalid_argument);
  CHECK_THROWS_AS(cells_of(g2, Cube{{3, 3}, 2}), std::invalid_argument);
}

TEST_CASE("cube measures") {
  const Grid g = Grid::line(8, 0.5);
  CHECK(cube_measure(g, Cube{{0, 0}, 4}) == 2.0);
  CHECK(g.cell_measure() == 0.5);
  const Grid g2 = Grid::plane(4, 4, 0.5);
  CHECK(cube_measure(g2, Cube{{0, 0}, 4}) == 4.0);
  CHECK(g2.cell_measure() == 0.25);
}

TEST_CASE("enumerate_cubes_containing examples") {
  const Grid g3 = Grid::line(3);
  const auto cubes = enumerate_cubes_containing(g3, 1);
  REQUIRE(cubes.size() == 4);
  CHECK(cubes[0] == Cube{{1, 0}, 1});
  CHECK(cubes[1] == Cube{{0, 0}, 2});
  CHECK(cubes[2] == Cube{{1, 0}, 2});
  CHECK(cubes[3] == Cube{{0, 0}, 3});

  const Grid g1 = Grid::line(1);
  CHECK(enumerate_cubes_containing(g1, 0) == std::vector<Cube>{Cube{{0, 0}, 1}});

  const Grid g22 = Grid::plane(2, 2);
  CHECK(enumerate_cubes_containing(g22, 0).size() == 2);
}

TEST_CASE("enumeration matches brute force and cube/cell duality") {
  Rng rng(7);
  for (const Grid& g : {Grid::line(7), Grid::line(12), Grid::plane(3, 5), Grid::plane(6, 6)}) {
    for (int cell = 0; cell < g.cell_count(); ++cell) {
      const auto fast = enumerate_cubes_containing(g, cell);
      const auto brute = brute_cubes_containing(g, cell);
      REQUIRE(fast.size() == brute.size());
      for (std::size_t i = 0; i < fast.size(); ++i) CHECK(fast[i] == brute[i]);
    }
    // duality: c in cells_of(Q) iff Q in enumerate_cubes_containing(c)
    for_each_cube(g, [&](const Cube& q) {
      const auto cells = cells_of(g, q);
      for (int cell = 0; cell < g.cell_count(); ++cell) {
        const bool in_cells = std::find(cells.begin(), cells.end(), cell) != cells.end();
        const auto cubes = enumerate_cubes_containing(g, cell);
        const bool in_enum = std::find(cubes.begin(), cubes.end(), q) != cubes.end();
        CHECK(in_cells == in_enum);
      }
    });
  }
}

TEST_CASE("core_cells center containment") {
  const Grid g = Grid::line(16);
  CHECK(core_cells(g, Cube{{2, 0}, 4}, 0.5).cells() == std::vector<int>{3, 4});
  CHECK(core_cells(g, Cube{{5, 0}, 1}, 0.5).cells() == std::vector<int>{5});
  CHECK(core_cells(g, Cube{{2, 0}, 3}, 0.5).cells() == std::vector<int>{3});
  CHECK_THROWS_AS(core_cells(g, Cube{{0, 0}, 4}, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(core_cells(g, Cube{{0, 0}, 4}, 1.0), std::invalid_argument);

  const Grid g2 = Grid::plane(8, 8);
  const Cube q{{1, 2}, 4};
  const auto core = core_cells(g2, q, 0.5);
  CHECK(core.count() == 4);
  CHECK(core.is_subset_of(CellMask::of_cube(g2, q)));
}

TEST_CASE("core_cells approaches the full cube as r -> 1") {
  for (const Grid& g : {Grid::line(12), Grid::plane(6, 6)}) {
    for_each_cube(g, [&](const Cube& q) {
      const double r = 1.0 - 0.5 / static_cast<double>(q.side);
      CHECK(core_cells(g, q, r) == CellMask::of_cube(g, q));
    });
  }
}

TEST_CASE("mask measure additivity is exact for dyadic cell sides") {
  Rng rng(11);
  for (const Grid& g : {Grid::line(9, 1.0), Grid::line(13, 0.5), Grid::plane(5, 7, 0.25)}) {
    CellMask a(g), b(g), c(g);
    for (int cell = 0; cell < g.cell_count(); ++cell) {
      const auto pick = rng.below(3);
      (pick == 0 ? a : pick == 1 ? b : c).set(cell);
    }
    CHECK(a.measure() + b.measure() + c.measure() == CellMask::full(g).measure());
    CHECK(a.intersect(b).count() == 0);
  }
}

TEST_CASE("mask set algebra") {
  const Grid g = Grid::line(6);
  const auto a = CellMask::of_cells(g, {0, 1, 2});
  const auto b = CellMask::of_cells(g, {2, 3});
  CHECK(a.intersect(b).cells() == std::vector<int>{2});
  CHECK(a.subtract(b).cells() == std::vector<int>{0, 1});
  CHECK(a.unite(b).count() == 4);
  CHECK(CellMask::of_cells(g, {2}).is_subset_of(a));
  CHECK_THROWS_AS(CellMask::of_cells(g, {6}), std::invalid_argument);
}

TEST_CASE("grid validation") {
  CHECK_THROWS_AS(Grid(3, {4, 4}, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(Grid::line(0), std::invalid_argument);
  CHECK_THROWS_AS(Grid::line(4, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(enumerate_cubes_containing(Grid::line(4), 4), std::invalid_argument);
}
