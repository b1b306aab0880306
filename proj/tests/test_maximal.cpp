#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>

#include "vexlab/maximal.hpp"
#include "vexlab/rng.hpp"

using namespace vexlab;

namespace {

GridFunction random_int_function(const Grid& g, Rng& rng, int lo, int hi) {
  GridFunction f(g, 0.0);
  for (int c = 0; c < g.cell_count(); ++c)
    f[c] = static_cast<double>(rng.uniform_int(lo, hi));
  return f;
}

GridFunction random_real_function(const Grid& g, Rng& rng, double amp) {
  GridFunction f(g, 0.0);
  for (int c = 0; c < g.cell_count(); ++c) f[c] = rng.uniform(-amp, amp);
  return f;
}

// Reference rearrangement straight from the definition:
// inf{alpha >= 0 : |{x in Q : |f| > alpha}| <= t}, with the infimum taken over
// the value set of |f| on Q (the superlevel measure only jumps there).
double brute_rearrangement(const GridFunction& f, const Cube& q, double t) {
  const Grid& g = f.grid();
  std::set<double> candidates{0.0};
  for (int c : cells_of(g, q)) candidates.insert(std::abs(f[c]));
  double best = std::numeric_limits<double>::infinity();
  for (double alpha : candidates) {
    double meas = 0.0;
    for (int c : cells_of(g, q))
      if (std::abs(f[c]) > alpha) meas += g.cell_measure();
    if (meas <= t) best = std::min(best, alpha);
  }
  return best;
}

// Reference maximal function: own summed-area table (same standard recurrence)
// plus exhaustive per-cell enumeration of every cube.
struct BruteTable {
  int nx, ny, dim;
  std::vector<double> t;

  explicit BruteTable(const GridFunction& f) {
    const Grid& g = f.grid();
    dim = g.dim();
    nx = g.extent(0);
    ny = g.extent(1);
    if (dim == 1) {
      t.assign(static_cast<std::size_t>(nx) + 1, 0.0);
      for (int x = 0; x < nx; ++x)
        t[static_cast<std::size_t>(x) + 1] = t[static_cast<std::size_t>(x)] + std::abs(f[x]);
    } else {
      t.assign(static_cast<std::size_t>(nx + 1) * (ny + 1), 0.0);
      const int sy = ny + 1;
      for (int x = 0; x < nx; ++x)
        for (int y = 0; y < ny; ++y)
          t[static_cast<std::size_t>(x + 1) * sy + (y + 1)] =
              std::abs(f[x * ny + y]) + t[static_cast<std::size_t>(x) * sy + (y + 1)] +
              t[static_cast<std::size_t>(x + 1) * sy + y] -
              t[static_cast<std::size_t>(x) * sy + y];
    }
  }

  double sum(const Cube& q) const {
    if (dim == 1) return t[static_cast<std::size_t>(q.anchor[0] + q.side)] -
                         t[static_cast<std::size_t>(q.anchor[0])];
    const int sy = ny + 1;
    const int x1 = q.anchor[0], y1 = q.anchor[1], x2 = x1 + q.side, y2 = y1 + q.side;
    return t[static_cast<std::size_t>(x2) * sy + y2] - t[static_cast<std::size_t>(x1) * sy + y2] -
           t[static_cast<std::size_t>(x2) * sy + y1] + t[static_cast<std::size_t>(x1) * sy + y1];
  }
};

GridFunction brute_hl_maximal(const GridFunction& f) {
  const Grid& g = f.grid();
  const BruteTable table(f);
  GridFunction out(g, 0.0);
  for (int c = 0; c < g.cell_count(); ++c) {
    double best = 0.0;
    for (const Cube& q : enumerate_cubes_containing(g, c)) {
      const double cells = g.dim() == 1 ? static_cast<double>(q.side)
                                        : static_cast<double>(q.side * q.side);
      best = std::max(best, table.sum(q) / cells);
    }
    out[c] = best;
  }
  return out;
}

GridFunction brute_median_maximal(const GridFunction& f, double lambda) {
  const Grid& g = f.grid();
  GridFunction out(g, 0.0);
  for (int c = 0; c < g.cell_count(); ++c) {
    double best = 0.0;
    for (const Cube& q : enumerate_cubes_containing(g, c))
      best = std::max(best, rearrangement_value(f, q, lambda * cube_measure(g, q)));
    out[c] = best;
  }
  return out;
}

WeightedFamily two_interval_family(const Grid& g) {
  std::vector<WeightedCube> entries;
  entries.push_back({Cube{{0, 0}, 2}, 1.0, std::nullopt});
  entries.push_back({Cube{{2, 0}, 2}, 1.0, std::nullopt});
  return WeightedFamily(g, std::move(entries));
}

}  // namespace

TEST_CASE("rearrangement value examples") {
  const Grid g3 = Grid::line(3);
  const GridFunction f(g3, {3.0, 1.0, 2.0});
  const Cube all{{0, 0}, 3};
  CHECK(rearrangement_value(f, all, 1.5) == 2.0);
  CHECK(rearrangement_value(f, all, 0.0) == 3.0);
  CHECK(rearrangement_value(GridFunction(g3, -5.0), all, 2.9) == 5.0);
  CHECK(rearrangement_value(f, all, 3.0) == 0.0);  // t >= |Q|: 0 by convention
  CHECK_THROWS_AS(rearrangement_value(f, all, -0.1), std::invalid_argument);
}

TEST_CASE("rearrangement matches the definition oracle") {
  Rng rng(201);
  for (const Grid& g : {Grid::line(12), Grid::line(9, 0.5), Grid::plane(4, 6, 0.5)}) {
    for (int rep = 0; rep < 40; ++rep) {
      const auto f = random_real_function(g, rng, 6.0);
      Cube q;
      q.side = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_cube_side(g))));
      q.anchor[0] = static_cast<int>(rng.below(static_cast<std::uint64_t>(g.extent(0) - q.side + 1)));
      q.anchor[1] = g.dim() == 2 ? static_cast<int>(rng.below(static_cast<std::uint64_t>(
                                       g.extent(1) - q.side + 1)))
                                 : 0;
      const double t = rng.uniform(0.0, cube_measure(g, q) * 0.999);
      CHECK(rearrangement_value(f, q, t) == brute_rearrangement(f, q, t));
    }
  }
}

TEST_CASE("rearrangement measure inequalities") {
  Rng rng(202);
  const Grid g = Grid::line(16);
  const Cube q{{3, 0}, 9};
  for (int rep = 0; rep < 30; ++rep) {
    const auto f = random_int_function(g, rng, 0, 9);
    for (double lambda : {0.25, 0.5, 0.75}) {
      const double t = lambda * cube_measure(g, q);
      const double v = rearrangement_value(f, q, t);
      int above = 0, at_least = 0;
      for (int c : cells_of(g, q)) {
        above += std::abs(f[c]) > v;
        at_least += std::abs(f[c]) >= v;
      }
      CHECK(static_cast<double>(above) * g.cell_measure() <= t);
      CHECK(static_cast<double>(at_least) * g.cell_measure() >= t);
    }
  }
}

TEST_CASE("hl maximal examples") {
  const Grid g3 = Grid::line(3);
  const auto mf = hl_maximal(GridFunction(g3, {0.0, 4.0, 0.0}));
  CHECK(mf[0] == 2.0);  // windows {0}, {0,1}, {0,1,2}: 0, 2, 4/3
  CHECK(mf[1] == 4.0);
  CHECK(mf[2] == 2.0);

  const auto mc = hl_maximal(GridFunction(g3, -7.0));
  for (int c = 0; c < 3; ++c) CHECK(mc[c] == 7.0);

  // indicator: value 1 on E, in (0,1] elsewhere
  const Grid g8 = Grid::line(8);
  GridFunction chi(g8, 0.0);
  chi[2] = 1.0;
  chi[3] = 1.0;
  const auto m = hl_maximal(chi);
  CHECK(m[2] == 1.0);
  CHECK(m[3] == 1.0);
  for (int c = 0; c < 8; ++c) {
    CHECK(m[c] > 0.0);
    CHECK(m[c] <= 1.0);
  }
}

TEST_CASE("hl maximal equals exhaustive enumeration exactly") {
  Rng rng(203);
  for (const Grid& g :
       {Grid::line(7), Grid::line(64), Grid::plane(8, 8), Grid::plane(5, 9, 0.25)}) {
    for (int rep = 0; rep < 12; ++rep) {
      // real-valued: same table recurrence on both sides, exact equality
      const auto f = random_real_function(g, rng, 10.0);
      const auto fast = hl_maximal(f);
      const auto brute = brute_hl_maximal(f);
      for (int c = 0; c < g.cell_count(); ++c) CHECK(fast[c] == brute[c]);
    }
  }
}

TEST_CASE("median maximal examples") {
  const Grid g3 = Grid::line(3);
  const GridFunction spike(g3, {0.0, 4.0, 0.0});
  const auto m = median_maximal(spike, 0.5);
  CHECK(m[1] == 4.0);
  CHECK(m[0] == 0.0);
  CHECK(m[2] == 0.0);

  const auto mc = median_maximal(GridFunction(g3, 3.5), 0.5);
  for (int c = 0; c < 3; ++c) CHECK(mc[c] == 3.5);

  // indicator dichotomy: m_lambda chi_E is 1 where some cube has |E inter Q| >
  // lambda |Q|, else 0
  const Grid g8 = Grid::line(8);
  GridFunction chi(g8, 0.0);
  chi[0] = 1.0;
  chi[1] = 1.0;
  chi[2] = 1.0;
  const auto mm = median_maximal(chi, 0.5);
  for (int c = 0; c < 8; ++c) {
    const bool expect = [&] {
      for (const Cube& q : enumerate_cubes_containing(g8, c)) {
        int inter = 0;
        for (int cc : cells_of(g8, q)) inter += chi[cc] != 0.0;
        if (static_cast<double>(inter) > 0.5 * q.side) return true;
      }
      return false;
    }();
    CHECK(mm[c] == (expect ? 1.0 : 0.0));
  }

  CHECK_THROWS_AS(median_maximal(spike, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(median_maximal(spike, 1.0), std::invalid_argument);
}

TEST_CASE("median maximal equals exhaustive enumeration") {
  Rng rng(204);
  for (const Grid& g : {Grid::line(20), Grid::plane(6, 6, 0.5)}) {
    for (int rep = 0; rep < 8; ++rep) {
      const auto f = random_real_function(g, rng, 5.0);
      for (double lambda : {0.25, 0.5, 0.75}) {
        const auto fast = median_maximal(f, lambda);
        const auto brute = brute_median_maximal(f, lambda);
        for (int c = 0; c < g.cell_count(); ++c) CHECK(fast[c] == brute[c]);
      }
    }
  }
}

TEST_CASE("shifted median maximal") {
  const Grid g3 = Grid::line(3);
  const GridFunction spike(g3, {0.0, 4.0, 0.0});
  // tau = 1/4, r = 1/2: the full interval contributes its top value at the
  // middle cell
  const auto sh = shifted_median_maximal(spike, 0.25, 0.5);
  CHECK(sh[1] == 4.0);

  // r close to 1: the core is the whole cube, so the shifted operator
  // coincides with the median operator
  Rng rng(205);
  for (const Grid& g : {Grid::line(10), Grid::plane(5, 5)}) {
    const double r_close = 1.0 - 0.5 / static_cast<double>(max_cube_side(g));
    for (int rep = 0; rep < 6; ++rep) {
      const auto f = random_real_function(g, rng, 4.0);
      for (double tau : {0.25, 0.5}) {
        const auto a = shifted_median_maximal(f, tau, r_close);
        const auto b = median_maximal(f, tau);
        for (int c = 0; c < g.cell_count(); ++c) CHECK(a[c] == b[c]);
      }
    }
  }

  const auto cc = shifted_median_maximal(GridFunction(g3, -2.0), 0.5, 0.5);
  for (int c = 0; c < 3; ++c) CHECK(cc[c] == 2.0);
}

TEST_CASE("shifted median equals per-cube enumeration") {
  Rng rng(206);
  for (const Grid& g : {Grid::line(14), Grid::plane(5, 6)}) {
    for (int rep = 0; rep < 6; ++rep) {
      const auto f = random_real_function(g, rng, 5.0);
      const double tau = 0.3, r = 0.5;
      const auto fast = shifted_median_maximal(f, tau, r);
      GridFunction brute(g, 0.0);
      for_each_cube(g, [&](const Cube& q) {
        const double v = rearrangement_value(f, q, tau * cube_measure(g, q));
        for (int c : core_cells(g, q, r).cells()) brute[c] = std::max(brute[c], v);
      });
      for (int c = 0; c < g.cell_count(); ++c) CHECK(fast[c] == brute[c]);
    }
  }
}

TEST_CASE("averaging operator examples") {
  const Grid g4 = Grid::line(4);
  const GridFunction f(g4, {1.0, 3.0, 2.0, 6.0});
  const auto tf = averaging_operator(f, two_interval_family(g4));
  CHECK(tf.values() == std::vector<double>{2.0, 2.0, 4.0, 4.0});

  // single cube: constant average on it, zero off it
  std::vector<WeightedCube> one{{Cube{{1, 0}, 2}, 1.0, std::nullopt}};
  const auto t1 = averaging_operator(f, WeightedFamily(g4, std::move(one)));
  CHECK(t1.values() == std::vector<double>{0.0, 2.5, 2.5, 0.0});

  const auto empty = averaging_operator(f, WeightedFamily(g4, {}));
  CHECK(empty.values() == std::vector<double>{0.0, 0.0, 0.0, 0.0});
}

TEST_CASE("weighted family validation") {
  const Grid g4 = Grid::line(4);
  std::vector<WeightedCube> overlapping{{Cube{{0, 0}, 2}, 1.0, std::nullopt},
                                        {Cube{{1, 0}, 2}, 1.0, std::nullopt}};
  CHECK_THROWS_AS(WeightedFamily(g4, std::move(overlapping)), std::invalid_argument);

  std::vector<WeightedCube> bad_subset{
      {Cube{{0, 0}, 2}, 1.0, CellMask::of_cells(g4, {0, 2})}};
  CHECK_THROWS_AS(WeightedFamily(g4, std::move(bad_subset)), std::invalid_argument);

  std::vector<WeightedCube> negative{{Cube{{0, 0}, 2}, -1.0, std::nullopt}};
  CHECK_THROWS_AS(WeightedFamily(g4, std::move(negative)), std::invalid_argument);
}

TEST_CASE("averaging operator is self-adjoint and dominated by M") {
  Rng rng(207);
  for (const Grid& g : {Grid::line(16), Grid::plane(8, 8)}) {
    for (int rep = 0; rep < 10; ++rep) {
      const auto f = random_int_function(g, rng, -6, 6);
      const auto h = random_int_function(g, rng, -6, 6);
      // power-of-two tiling keeps every average dyadic: exact self-adjointness
      std::vector<WeightedCube> entries;
      for (int ax = 0; ax + 4 <= g.extent(0); ax += 4) {
        if (g.dim() == 1) {
          entries.push_back({Cube{{ax, 0}, 4}, 1.0, std::nullopt});
        } else {
          for (int ay = 0; ay + 4 <= g.extent(1); ay += 4)
            entries.push_back({Cube{{ax, ay}, 4}, 1.0, std::nullopt});
        }
      }
      const WeightedFamily fam(g, std::move(entries));
      const auto tf = averaging_operator(f, fam);
      const auto th = averaging_operator(h, fam);
      double lhs = 0.0, rhs = 0.0;
      for (int c = 0; c < g.cell_count(); ++c) {
        lhs += tf[c] * h[c] * g.cell_measure();
        rhs += f[c] * th[c] * g.cell_measure();
      }
      CHECK(lhs == rhs);

      const auto mf = hl_maximal(f);
      for (int c = 0; c < g.cell_count(); ++c) CHECK(std::abs(tf[c]) <= mf[c]);
    }
  }
}

TEST_CASE("dyadic maximal on cube") {
  const Grid g4 = Grid::line(4);
  const GridFunction f(g4, {0.0, 0.0, 8.0, 0.0});
  const Cube q{{0, 0}, 4};
  const auto d = dyadic_maximal_on_cube(f, q);
  CHECK(d[2] == 8.0);  // max(8, 4, 2)
  CHECK(d[3] == 4.0);
  CHECK(d[0] == 2.0);
  CHECK(d[1] == 2.0);

  const auto dc = dyadic_maximal_on_cube(GridFunction(g4, 5.0), q);
  for (int c = 0; c < 4; ++c) CHECK(dc[c] == 5.0);

  // f supported off Q vanishes on Q
  const Grid g8 = Grid::line(8);
  GridFunction off(g8, 0.0);
  off[7] = 3.0;
  const auto d0 = dyadic_maximal_on_cube(off, Cube{{0, 0}, 4});
  for (int c = 0; c < 4; ++c) CHECK(d0[c] == 0.0);

  CHECK_THROWS_AS(dyadic_maximal_on_cube(f, Cube{{0, 0}, 3}), std::invalid_argument);
}

TEST_CASE("dyadic maximal matches subcube enumeration") {
  Rng rng(208);
  for (const Grid& g : {Grid::line(16), Grid::plane(8, 8)}) {
    for (int rep = 0; rep < 8; ++rep) {
      const auto f = random_int_function(g, rng, -9, 9);
      const Cube q = g.dim() == 1 ? Cube{{4, 0}, 8} : Cube{{0, 0}, 8};
      const auto fast = dyadic_maximal_on_cube(f, q);
      // enumerate dyadic subcubes directly
      for (int c : cells_of(g, q)) {
        double best = 0.0;
        for (int s = 1; s <= q.side; s *= 2) {
          const auto xy = g.coords_of(c);
          const int bx = (xy[0] - q.anchor[0]) / s;
          const int by = g.dim() == 2 ? (xy[1] - q.anchor[1]) / s : 0;
          Cube sub{{q.anchor[0] + bx * s, g.dim() == 2 ? q.anchor[1] + by * s : 0}, s};
          double sum = 0.0;
          for (int cc : cells_of(g, sub)) sum += std::abs(f[cc]);
          best = std::max(best, sum / static_cast<double>(cube_cell_count(g, sub)));
        }
        CHECK(fast[c] == best);
      }
    }
  }
}

TEST_CASE("level-set identity holds exactly") {
  Rng rng(209);
  for (const Grid& g : {Grid::line(16), Grid::plane(6, 6)}) {
    for (int rep = 0; rep < 6; ++rep) {
      const auto f = random_int_function(g, rng, 0, 6);
      for (double lambda : {0.25, 0.5, 0.75}) {
        const auto mf = median_maximal(f, lambda);
        std::set<double> alphas;
        for (int c = 0; c < g.cell_count(); ++c) alphas.insert(std::abs(f[c]));
        for (double alpha : alphas) {
          GridFunction ind(g, 0.0);
          for (int c = 0; c < g.cell_count(); ++c)
            if (std::abs(f[c]) > alpha) ind[c] = 1.0;
          const auto mchi = hl_maximal(ind);
          for (int c = 0; c < g.cell_count(); ++c)
            CHECK((mf[c] > alpha) == (mchi[c] > lambda));
        }
      }
    }
  }
}

TEST_CASE("chebyshev and shift dominations") {
  Rng rng(210);
  for (const Grid& g : {Grid::line(18), Grid::plane(6, 6)}) {
    for (int rep = 0; rep < 10; ++rep) {
      const auto f = random_int_function(g, rng, 0, 12);
      const auto mf = hl_maximal(f);
      for (double lambda : {0.25, 0.5}) {
        const auto med = median_maximal(f, lambda);
        for (int c = 0; c < g.cell_count(); ++c)
          CHECK(med[c] <= (1.0 / lambda) * mf[c]);
      }
      // shift domination where the doubled concentric cube fits
      const double t = 0.5;
      const double tau = g.dim() == 1 ? 0.25 : 0.125;
      const auto shifted = shifted_median_maximal(f, tau, 0.5);
      for_each_cube(g, [&](const Cube& q) {
        if (q.side % 2 != 0) return;
        Cube doubled{{q.anchor[0] - q.side / 2,
                      g.dim() == 2 ? q.anchor[1] - q.side / 2 : 0},
                     2 * q.side};
        if (!cube_in_grid(g, doubled)) return;
        const double v = rearrangement_value(f, q, t * cube_measure(g, q));
        for (int c : cells_of(g, q)) CHECK(v <= shifted[c]);
      });
    }
  }
}

TEST_CASE("necessity and sufficiency witnesses") {
  Rng rng(211);
  const Grid g = Grid::line(16);
  for (int rep = 0; rep < 20; ++rep) {
    const double lambda = rep % 2 == 0 ? 0.5 : 0.25;
    // build a random family with |E_Q| >= lambda |Q| exactly met or exceeded
    std::vector<WeightedCube> entries;
    CellMask used(g);
    for (int tries = 0; tries < 3; ++tries) {
      Cube q;
      q.side = 1 + static_cast<int>(rng.below(5));
      q.anchor[0] = static_cast<int>(rng.below(static_cast<std::uint64_t>(g.extent(0) - q.side + 1)));
      q.anchor[1] = 0;
      bool clash = false;
      for (int c : cells_of(g, q)) clash = clash || used.contains(c);
      if (clash) continue;
      for (int c : cells_of(g, q)) used.set(c);
      const auto cells = cells_of(g, q);
      const int m = static_cast<int>(std::ceil(lambda * static_cast<double>(cells.size())));
      std::vector<int> chosen(cells.begin(), cells.begin() + m);
      WeightedCube e;
      e.cube = q;
      e.weight = static_cast<double>(rng.uniform_int(1, 8)) / 4.0;
      e.subset = CellMask::of_cells(g, chosen);
      entries.push_back(std::move(e));
    }
    if (entries.empty()) continue;
    const WeightedFamily fam(g, std::move(entries));
    const auto num = fam.weighted_indicators();
    const auto phi = fam.weighted_subsets();
    const auto tphi = averaging_operator(phi, fam);
    for (int c = 0; c < g.cell_count(); ++c)
      CHECK(num[c] <= (1.0 / lambda) * tphi[c]);
    const double t = lambda / 2.0;
    const auto mt = median_maximal(phi, t);
    for (int c = 0; c < g.cell_count(); ++c) CHECK(num[c] <= mt[c]);
  }
}
