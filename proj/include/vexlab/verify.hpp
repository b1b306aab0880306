#pragma once

#include <cmath>
#include <cstdint>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "vexlab/conditions.hpp"
#include "vexlab/decomp.hpp"
#include "vexlab/generators.hpp"
#include "vexlab/maximal.hpp"
#include "vexlab/modular.hpp"
#include "vexlab/rng.hpp"

namespace vexlab {

enum class VerifyLevel { Quick, Full };

struct SuiteResult {
  std::string name;
  int checked = 0;
  int failed = 0;
};

struct VerifySummary {
  std::vector<SuiteResult> suites;
  double total_ms = 0.0;

  bool all_pass() const {
    for (const auto& s : suites)
      if (s.failed > 0) return false;
    return true;
  }
};

namespace detail {

// Small-integer-valued functions keep every sum exact in double arithmetic,
// which lets the invariant suites compare operator outputs without tolerance.
inline GridFunction random_int_function(const Grid& g, Rng& rng, int lo, int hi) {
  GridFunction f(g, 0.0);
  for (int c = 0; c < g.cell_count(); ++c)
    f[c] = static_cast<double>(rng.uniform_int(lo, hi));
  return f;
}

inline GridFunction random_real_function(const Grid& g, Rng& rng, double amp) {
  GridFunction f(g, 0.0);
  for (int c = 0; c < g.cell_count(); ++c) f[c] = rng.uniform(-amp, amp);
  return f;
}

inline ExponentField random_exponent(const Grid& g, Rng& rng, double pmin, double pmax) {
  std::vector<double> p(static_cast<std::size_t>(g.cell_count()));
  for (auto& v : p) v = rng.uniform(pmin, pmax);
  return ExponentField(g, std::move(p));
}

inline Cube random_cube(const Grid& g, Rng& rng) {
  Cube q;
  q.side = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_cube_side(g))));
  q.anchor[0] = static_cast<int>(rng.below(static_cast<std::uint64_t>(g.extent(0) - q.side + 1)));
  q.anchor[1] = g.dim() == 2
                    ? static_cast<int>(rng.below(static_cast<std::uint64_t>(g.extent(1) - q.side + 1)))
                    : 0;
  return q;
}

inline Cube random_pow2_cube(const Grid& g, Rng& rng) {
  int max_pow = 1;
  while (max_pow * 2 <= max_cube_side(g)) max_pow *= 2;
  std::vector<int> sides;
  for (int s = 1; s <= max_pow; s *= 2) sides.push_back(s);
  Cube q;
  q.side = sides[rng.below(sides.size())];
  q.anchor[0] = static_cast<int>(rng.below(static_cast<std::uint64_t>(g.extent(0) - q.side + 1)));
  q.anchor[1] = g.dim() == 2
                    ? static_cast<int>(rng.below(static_cast<std::uint64_t>(g.extent(1) - q.side + 1)))
                    : 0;
  return q;
}

// Reference maximal function: per-cell exhaustive enumeration of all cubes.
// Direct sums; exact for integer-valued inputs.
inline GridFunction reference_hl_maximal(const GridFunction& f) {
  const Grid& g = f.grid();
  GridFunction out(g, 0.0);
  for (int c = 0; c < g.cell_count(); ++c) {
    double best = 0.0;
    for (const Cube& q : enumerate_cubes_containing(g, c)) {
      double sum = 0.0;
      for (int cc : cells_of(g, q)) sum += std::abs(f[cc]);
      best = std::max(best, sum / static_cast<double>(cube_cell_count(g, q)));
    }
    out[c] = best;
  }
  return out;
}

inline GridFunction reference_median_maximal(const GridFunction& f, double lambda) {
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

inline GridFunction reference_shifted_median(const GridFunction& f, double tau, double r) {
  const Grid& g = f.grid();
  GridFunction out(g, 0.0);
  std::vector<CellMask> cores;
  for (int c = 0; c < g.cell_count(); ++c) {
    double best = 0.0;
    for_each_cube(g, [&](const Cube& q) {
      if (core_cells(g, q, r).contains(c))
        best = std::max(best, rearrangement_value(f, q, tau * cube_measure(g, q)));
    });
    out[c] = best;
  }
  return out;
}

// Random disjoint family with integer-eighth weights and subsets of at least
// ceil(lambda * cells) cells; exact under dyadic lambda.
inline WeightedFamily random_family(const Grid& g, Rng& rng, double lambda) {
  auto cubes = random_disjoint_cubes(g, rng, 3);
  if (cubes.empty()) cubes.push_back(Cube{{0, 0}, 1});
  std::vector<WeightedCube> entries;
  for (const Cube& q : cubes) {
    WeightedCube e;
    e.cube = q;
    e.weight = static_cast<double>(rng.uniform_int(1, 16)) / 8.0;
    const auto cells = cells_of(g, q);
    const int m = std::max(1, static_cast<int>(std::ceil(
                                  lambda * static_cast<double>(cells.size()))));
    // random m-subset: shuffle indices deterministically via rng
    std::vector<int> idx(cells.size());
    std::iota(idx.begin(), idx.end(), 0);
    for (std::size_t i = idx.size(); i > 1; --i)
      std::swap(idx[i - 1], idx[rng.below(i)]);
    std::vector<int> chosen;
    for (int j = 0; j < m; ++j) chosen.push_back(cells[static_cast<std::size_t>(idx[static_cast<std::size_t>(j)])]);
    e.subset = CellMask::of_cells(g, chosen);
    entries.push_back(std::move(e));
  }
  return WeightedFamily(g, std::move(entries));
}

}  // namespace detail

/// Runs the invariant suites of all modules at the requested scale, printing
/// one line per suite when a log stream is supplied. Failures are reported in
/// the summary, never thrown.
inline VerifySummary verify_suite(VerifyLevel level,
                                  const std::vector<double>& lambdas = {0.25, 0.5, 0.75},
                                  std::uint64_t seed = 2024,
                                  std::ostream* log = nullptr) {
  detail::Stopwatch clock;
  VerifySummary sum;
  const bool full = level == VerifyLevel::Full;
  const int reps = full ? 40 : 8;

  std::vector<Grid> grids = {Grid::line(9), Grid::line(full ? 64 : 12, 0.5),
                             Grid::plane(4, 5),
                             Grid::plane(full ? 12 : 6, full ? 12 : 6, 0.25)};

  auto start = [&](const std::string& name) {
    sum.suites.push_back(SuiteResult{name, 0, 0});
    return &sum.suites.back();
  };
  auto finish = [&](SuiteResult* s) {
    if (log)
      (*log) << (s->failed ? "[FAIL] " : "[ok]   ") << s->name << ": checked=" << s->checked
             << " failed=" << s->failed << "\n";
  };
  auto check = [](SuiteResult* s, bool ok) {
    ++s->checked;
    if (!ok) ++s->failed;
  };

  {  // cube/cell duality and cube enumeration
    auto* s = start("grid.cube-cell-duality");
    for (const Grid& g : grids) {
      std::vector<std::set<std::pair<std::array<int, 2>, int>>> containing(
          static_cast<std::size_t>(g.cell_count()));
      for (int c = 0; c < g.cell_count(); ++c)
        for (const Cube& q : enumerate_cubes_containing(g, c))
          containing[static_cast<std::size_t>(c)].insert({q.anchor, q.side});
      bool ok = true;
      for_each_cube(g, [&](const Cube& q) {
        const auto cells = cells_of(g, q);
        for (int c = 0; c < g.cell_count(); ++c) {
          const bool in_cells = std::find(cells.begin(), cells.end(), c) != cells.end();
          const bool in_enum =
              containing[static_cast<std::size_t>(c)].count({q.anchor, q.side}) > 0;
          if (in_cells != in_enum) ok = false;
        }
      });
      check(s, ok);
    }
    finish(s);
  }

  {  // mask measures add exactly (dyadic cell sides), core cells are nested
    auto* s = start("grid.measure-and-core");
    Rng rng(derive_seed(seed, 1));
    for (const Grid& g : grids) {
      CellMask a(g), b(g);
      for (int c = 0; c < g.cell_count(); ++c) (rng.coin() ? a : b).set(c);
      check(s, a.measure() + b.measure() == CellMask::full(g).measure());
      for (int rep = 0; rep < reps; ++rep) {
        const Cube q = detail::random_cube(g, rng);
        const CellMask inner = core_cells(g, q, 0.5);
        const CellMask outer = core_cells(g, q, 0.97);
        const CellMask cube_mask = CellMask::of_cube(g, q);
        check(s, inner.is_subset_of(cube_mask));
        check(s, inner.is_subset_of(outer));
        // r -> 1: once (1 - r) * side < 1, the core covers every cell.
        const double r_close = 1.0 - 0.5 / static_cast<double>(q.side);
        check(s, core_cells(g, q, r_close) == cube_mask);
      }
    }
    finish(s);
  }

  {  // Luxemburg norm invariants
    auto* s = start("modular.norm-invariants");
    Rng rng(derive_seed(seed, 2));
    for (const Grid& g : grids) {
      for (int rep = 0; rep < reps; ++rep) {
        const auto p = detail::random_exponent(g, rng, 1.0, 8.0);
        const auto f = detail::random_real_function(g, rng, 10.0);
        const CellMask whole = CellMask::full(g);
        const double nf = luxemburg_norm(f, p, whole);
        // homogeneity
        const double c = rng.log_uniform(1e-3, 1e3);
        GridFunction cf(g, 0.0);
        for (int i = 0; i < g.cell_count(); ++i) cf[i] = c * f[i];
        const double ncf = luxemburg_norm(cf, p, whole);
        check(s, std::abs(ncf - c * nf) <= 1e-9 * std::max(1.0, ncf));
        // monotonicity
        GridFunction fg(g, 0.0);
        for (int i = 0; i < g.cell_count(); ++i) fg[i] = f[i] * rng.uniform(1.0, 3.0);
        check(s, nf <= luxemburg_norm(fg, p, whole) + 1e-9);
        // unit ball characterization away from the boundary
        const double rho = modular(f, p, whole);
        if (std::abs(rho - 1.0) > 1e-9 && std::abs(nf - 1.0) > 1e-9)
          check(s, (rho <= 1.0) == (nf <= 1.0));
        // constant exponent consistency
        const double q = std::vector<double>{1.0, 1.5, 2.0, 4.0}[rep % 4];
        const auto pq = ExponentField::constant(g, q);
        double classical = 0.0;
        for (int i = 0; i < g.cell_count(); ++i)
          classical += std::pow(std::abs(f[i]), q);
        classical = std::pow(g.cell_measure() * classical, 1.0 / q);
        const double lux = luxemburg_norm(f, pq, whole);
        check(s, std::abs(lux - classical) <= 1e-10 * std::max(1.0, classical));
        // dual exponent involution and conjugate extremes
        const auto pd = detail::random_exponent(g, rng, 1.1, 8.0);
        const auto dd = dual_exponent(dual_exponent(pd));
        bool inv = true;
        for (int i = 0; i < g.cell_count(); ++i)
          inv = inv && std::abs(dd[i] - pd[i]) <= 1e-12 * pd[i];
        check(s, inv);
        const auto dualp = dual_exponent(pd);
        check(s, std::abs(dualp.p_minus() - pd.p_plus() / (pd.p_plus() - 1.0)) <= 1e-12);
        check(s, std::abs(dualp.p_plus() - pd.p_minus() / (pd.p_minus() - 1.0)) <= 1e-12);
      }
    }
    finish(s);
  }

  {  // modular/norm sandwich, both branches
    auto* s = start("modular.sandwich");
    Rng rng(derive_seed(seed, 3));
    for (const Grid& g : grids) {
      for (int rep = 0; rep < reps; ++rep) {
        const auto p = detail::random_exponent(g, rng, 1.0, 8.0);
        auto f = detail::random_real_function(g, rng, 1.0);
        const double target = rep % 2 == 0 ? rng.uniform(0.05, 0.95) : rng.uniform(1.1, 40.0);
        const double nf = luxemburg_norm(f, p, CellMask::full(g));
        if (nf == 0.0) continue;
        for (int i = 0; i < g.cell_count(); ++i) f[i] *= target / nf;
        const auto rep_out = check_modular_norm_sandwich(f, p, CellMask::full(g));
        check(s, rep_out.lower_holds && rep_out.upper_holds);
      }
    }
    finish(s);
  }

  {  // Holder pairing with the default constant
    auto* s = start("modular.holder-pairing");
    Rng rng(derive_seed(seed, 4));
    for (const Grid& g : grids) {
      for (int rep = 0; rep < reps; ++rep) {
        const auto p = detail::random_exponent(g, rng, 1.05, 6.0);
        const auto f = detail::random_real_function(g, rng, 5.0);
        const auto h = detail::random_real_function(g, rng, 5.0);
        const auto out = holder_pairing_check(f, h, p, CellMask::full(g));
        check(s, out.holds);
      }
    }
    finish(s);
  }

  {  // rearrangement: definition inequalities + Chebyshev domination
    auto* s = start("maximal.rearrangement");
    Rng rng(derive_seed(seed, 5));
    for (const Grid& g : grids) {
      for (int rep = 0; rep < reps; ++rep) {
        const auto f = detail::random_int_function(g, rng, 0, 16);
        const Cube q = detail::random_cube(g, rng);
        for (double lambda : lambdas) {
          const double t = lambda * cube_measure(g, q);
          const double v = rearrangement_value(f, q, t);
          int above = 0, at_least = 0;
          for (int c : cells_of(g, q)) {
            if (std::abs(f[c]) > v) ++above;
            if (std::abs(f[c]) >= v) ++at_least;
          }
          const double hd = g.cell_measure();
          check(s, static_cast<double>(above) * hd <= t);
          check(s, static_cast<double>(at_least) * hd >= t);
          // Chebyshev: lambda * value <= mean of |f| over Q (exact for ints)
          double sum = 0.0;
          for (int c : cells_of(g, q)) sum += std::abs(f[c]);
          check(s, lambda * v <= sum / static_cast<double>(cube_cell_count(g, q)));
        }
        check(s, rearrangement_value(f, q, cube_measure(g, q)) == 0.0);
      }
    }
    finish(s);
  }

  {  // level-set identity, exact cell-set equality
    auto* s = start("maximal.level-set-identity");
    Rng rng(derive_seed(seed, 6));
    for (const Grid& g : grids) {
      const int inst = full ? 8 : 3;
      for (int rep = 0; rep < inst; ++rep) {
        const auto f = detail::random_int_function(g, rng, 0, 8);
        for (double lambda : lambdas) {
          const auto mf = median_maximal(f, lambda);
          std::set<double> alphas;
          for (int c = 0; c < g.cell_count(); ++c) alphas.insert(std::abs(f[c]));
          for (double alpha : alphas) {
            GridFunction ind(g, 0.0);
            for (int c = 0; c < g.cell_count(); ++c)
              if (std::abs(f[c]) > alpha) ind[c] = 1.0;
            const auto mchi = hl_maximal(ind);
            bool equal = true;
            for (int c = 0; c < g.cell_count(); ++c)
              equal = equal && ((mf[c] > alpha) == (mchi[c] > lambda));
            check(s, equal);
          }
        }
      }
    }
    finish(s);
  }

  {  // pointwise dominations and averaging-operator identities
    auto* s = start("maximal.dominations");
    Rng rng(derive_seed(seed, 7));
    for (const Grid& g : grids) {
      for (int rep = 0; rep < reps; ++rep) {
        const auto f = detail::random_int_function(g, rng, -8, 8);
        const auto Mf = hl_maximal(f);
        for (double lambda : lambdas) {
          const auto mf = median_maximal(f, lambda);
          bool dom = true;
          for (int c = 0; c < g.cell_count(); ++c) dom = dom && lambda * mf[c] <= Mf[c];
          check(s, dom);
        }
        const double lambda = lambdas[static_cast<std::size_t>(rep) % lambdas.size()];
        const auto fam = detail::random_family(g, rng, lambda);
        const auto tf = averaging_operator(f, fam);
        bool dom = true;
        for (int c = 0; c < g.cell_count(); ++c) dom = dom && std::abs(tf[c]) <= Mf[c];
        check(s, dom);
        // self-adjointness (exact for dyadic values on power-of-two tilings)
        {
          const auto sides = detail::dyadic_tile_sides(g);
          const int sside = sides[rng.below(sides.size())];
          std::vector<WeightedCube> entries;
          for (const Cube& q : detail::tiling(g, sside)) entries.push_back({q, 1.0, std::nullopt});
          const WeightedFamily tiles(g, std::move(entries));
          const auto fi = detail::random_int_function(g, rng, -4, 4);
          const auto gi = detail::random_int_function(g, rng, -4, 4);
          const auto tfi = averaging_operator(fi, tiles);
          const auto tgi = averaging_operator(gi, tiles);
          double lhs = 0.0, rhs = 0.0;
          for (int c = 0; c < g.cell_count(); ++c) {
            lhs += tfi[c] * gi[c];
            rhs += fi[c] * tgi[c];
          }
          check(s, std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(lhs)));
        }
        // necessity witness: sum t_Q chi_Q <= (1/lambda) T(sum t_Q chi_E)
        {
          const auto num = fam.weighted_indicators();
          const auto phi = fam.weighted_subsets();
          const auto tphi = averaging_operator(phi, fam);
          bool ok = true;
          for (int c = 0; c < g.cell_count(); ++c) ok = ok && lambda * num[c] <= tphi[c];
          check(s, ok);
        }
        // sufficiency witness: t < lambda gives sum t_Q chi_Q <= m_t(...)
        {
          const double t = lambda / 2.0;
          const auto num = fam.weighted_indicators();
          const auto phi = fam.weighted_subsets();
          const auto mt = median_maximal(phi, t);
          bool ok = true;
          for (int c = 0; c < g.cell_count(); ++c) ok = ok && num[c] <= mt[c];
          check(s, ok);
        }
      }
    }
    finish(s);
  }

  {  // fast paths equal exhaustive enumeration (exact on integer data)
    auto* s = start("maximal.fast-equals-reference");
    Rng rng(derive_seed(seed, 8));
    for (const Grid& g : grids) {
      const int inst = full ? 10 : 3;
      for (int rep = 0; rep < inst; ++rep) {
        const auto f = detail::random_int_function(g, rng, -16, 16);
        const auto fast = hl_maximal(f);
        const auto ref = detail::reference_hl_maximal(f);
        bool eq = true;
        for (int c = 0; c < g.cell_count(); ++c) eq = eq && fast[c] == ref[c];
        check(s, eq);
        const double lambda = lambdas[static_cast<std::size_t>(rep) % lambdas.size()];
        const auto med = median_maximal(f, lambda);
        const auto med_ref = detail::reference_median_maximal(f, lambda);
        eq = true;
        for (int c = 0; c < g.cell_count(); ++c) eq = eq && med[c] == med_ref[c];
        check(s, eq);
        const auto sh = shifted_median_maximal(f, lambda, 0.5);
        const auto sh_ref = detail::reference_shifted_median(f, lambda, 0.5);
        eq = true;
        for (int c = 0; c < g.cell_count(); ++c) eq = eq && sh[c] == sh_ref[c];
        check(s, eq);
      }
    }
    finish(s);
  }

  {  // shift domination where the doubled concentric cube fits
    auto* s = start("maximal.shift-domination");
    Rng rng(derive_seed(seed, 9));
    for (const Grid& g : grids) {
      for (int rep = 0; rep < reps; ++rep) {
        const auto f = detail::random_int_function(g, rng, 0, 16);
        const double t = rep % 2 == 0 ? 0.5 : 0.25;
        const double tau = g.dim() == 1 ? t / 2.0 : t / 4.0;
        const auto shifted = shifted_median_maximal(f, tau, 0.5);
        bool ok = true;
        for_each_cube(g, [&](const Cube& q) {
          if (q.side % 2 != 0) return;
          Cube doubled;
          doubled.side = 2 * q.side;
          doubled.anchor[0] = q.anchor[0] - q.side / 2;
          doubled.anchor[1] = g.dim() == 2 ? q.anchor[1] - q.side / 2 : 0;
          if (!cube_in_grid(g, doubled)) return;
          const double v = rearrangement_value(f, q, t * cube_measure(g, q));
          for (int c : cells_of(g, q)) ok = ok && v <= shifted[c];
        });
        check(s, ok);
      }
    }
    finish(s);
  }

  {  // Calderon-Zygmund decomposition
    auto* s = start("decomp.cz");
    Rng rng(derive_seed(seed, 10));
    for (const Grid& g : grids) {
      for (int rep = 0; rep < reps; ++rep) {
        const auto v = detail::random_int_function(g, rng, 0, 16);
        const Cube q = detail::random_pow2_cube(g, rng);
        const auto md = dyadic_maximal_on_cube(v, q);
        const double thr = rng.uniform(0.5, 12.0);
        const auto cubes = cz_decompose(v, q, thr);
        CellMask uni(g);
        for (const Cube& pc : cubes)
          for (int c : cells_of(g, pc)) uni.set(c);
        bool eq = true;
        for (int c : cells_of(g, q)) eq = eq && ((md[c] > thr) == uni.contains(c));
        check(s, eq);
        // stopping bound: selected averages at most 2^dim * threshold
        bool bounded = true;
        for (const Cube& pc : cubes) {
          if (pc.side == q.side) continue;
          double sum = 0.0;
          for (int c : cells_of(g, pc)) sum += v[c];
          const double avg = sum / static_cast<double>(cube_cell_count(g, pc));
          bounded = bounded &&
                    avg <= (g.dim() == 1 ? 2.0 : 4.0) * thr * (1.0 + 1e-12);
        }
        check(s, bounded);
        // level ladder: nesting and density
        const double lambda = lambdas[static_cast<std::size_t>(rep) % lambdas.size()];
        const auto lv = build_cz_levels(v, q, lambda, 3);
        bool nested = true;
        for (std::size_t k = 0; k + 1 < lv.levels.size(); ++k) {
          CellMask omega_k(g), omega_k1(g);
          for (const Cube& pc : lv.levels[k].cubes)
            for (int c : cells_of(g, pc)) omega_k.set(c);
          for (const Cube& pc : lv.levels[k + 1].cubes)
            for (int c : cells_of(g, pc)) omega_k1.set(c);
          nested = nested && omega_k1.is_subset_of(omega_k);
        }
        check(s, nested);
        check(s, lv.all_density_ok);
      }
    }
    finish(s);
  }

  {  // covering extraction
    auto* s = start("decomp.besicovitch");
    Rng rng(derive_seed(seed, 11));
    for (const Grid& g : grids) {
      for (int rep = 0; rep < reps; ++rep) {
        std::vector<std::pair<int, Cube>> points;
        const int k = 3 + static_cast<int>(rng.below(10));
        for (int i = 0; i < k; ++i) {
          const Cube q = detail::random_cube(g, rng);
          const auto core = core_cells(g, q, 0.5).cells();
          if (core.empty()) continue;
          points.emplace_back(core[rng.below(core.size())], q);
        }
        if (points.empty()) continue;
        const auto ex = besicovitch_extract(g, points, 0.5);
        CellMask covered(g);
        for (const Cube& q : ex.subcover)
          for (int c : cells_of(g, q)) covered.set(c);
        bool cover_ok = true;
        for (const auto& [cell, cube] : points) cover_ok = cover_ok && covered.contains(cell);
        check(s, cover_ok);
        bool disjoint_ok = true;
        for (std::size_t i = 0; i < ex.subcover.size(); ++i)
          for (std::size_t j = i + 1; j < ex.subcover.size(); ++j)
            if (ex.subfamily[i] == ex.subfamily[j])
              disjoint_ok =
                  disjoint_ok && !cubes_intersect(g, ex.subcover[i], ex.subcover[j]);
        check(s, disjoint_ok);
        const auto ex2 = besicovitch_extract(g, points, 0.5);
        check(s, ex2.subcover == ex.subcover && ex2.subfamily == ex.subfamily);
      }
    }
    finish(s);
  }

  {  // constant chains and the b(Q) construction
    auto* s = start("conditions.chains-and-b");
    Rng rng(derive_seed(seed, 12));
    for (int rep = 0; rep < reps; ++rep) {
      const double r = rng.uniform(1.2, 4.0);
      const double C = rng.uniform(0.5, 4.0);
      const double pm = rng.uniform(1.0, 3.0);
      const double pp = pm + rng.uniform(0.0, 3.0);
      const double gamma = rh_chain_default_gamma(r);
      const auto ch = rh_constant_chain(r, C, pm, pp, gamma);
      check(s, std::abs(ch.k - std::pow(2.0, 1.0 + pp / pm) * C) <= 1e-12 * ch.k);
      check(s, std::abs(ch.A * std::pow(ch.one_minus_eta, 1.0 / ch.gamma_prime) - 0.5) <=
                   1e-12);
      check(s, std::abs(ch.delta - ch.eps / (1.0 + ch.eps) * pm) <= 1e-12);

      const double l45 = rng.uniform(0.05, 0.95), e45 = rng.uniform(0.05, 0.95);
      const int n = 1 + static_cast<int>(rng.below(2));
      const int N = 1 + static_cast<int>(rng.below(6));
      const double c45 = rng.uniform(1.0, 3.0);
      const auto c5 = median_constant_chain(l45, e45, n, N, c45, pm, pp);
      check(s, c5.feasible);
      const double resid =
          2.0 * N * std::pow(c45, pp - pm) * std::pow(c5.gamma, pm);
      check(s, std::abs(resid - 0.5) <= 1e-12);
      check(s, c5.nu < c5.t * c5.r_pow_n - (1.0 - c5.r_pow_n));
    }
    {
      const Grid g = Grid::line(16);
      const auto p2 = ExponentField::constant(g, 2.0);
      bool all_zero = true;
      for_each_cube(g, [&](const Cube& q) {
        const auto bf = b_function(p2, q, 2.0, 1.0, 512);
        all_zero = all_zero && !bf.defined && bf.b == 0.0;
      });
      check(s, all_zero);
      // two-valued exponent with a thin low-exponent region: b > 0 somewhere
      std::vector<double> pv(16, 2.5);
      pv[0] = 1.2;
      const ExponentField ptv(g, pv);
      const auto bf = b_function(ptv, Cube{{0, 0}, 16}, 3.0, 0.25, 2048);
      check(s, bf.defined);
      if (bf.defined && bf.t_q < bf.t_max) check(s, bf.residual <= 1e-9);
    }
    finish(s);
  }

  {  // searches: analytic extrema, invariance, witness reproducibility
    auto* s = start("conditions.searches");
    const Grid g = Grid::line(16);
    const auto p2 = ExponentField::constant(g, 2.0);
    const std::uint64_t budget = full ? 2000 : 200;
    for (double lambda : lambdas) {
      const auto rep = ainfty_search(p2, lambda, budget, seed);
      const double analytic = std::pow(lambda, -0.5);
      check(s, rep.best_ratio <= analytic + 1e-9);
      check(s, std::abs(rep.best_ratio - analytic) <= 1e-6);
      check(s, std::abs(reevaluate_witness(p2, rep) - rep.best_ratio) <=
                   1e-9 * std::max(1.0, rep.best_ratio));
    }
    {
      const auto rep = apvar_search(p2, budget, seed);
      check(s, std::abs(rep.best_ratio - 1.0) <= 1e-9);
      check(s, std::abs(reevaluate_witness(p2, rep) - rep.best_ratio) <= 1e-9);
    }
    {
      std::vector<double> pv(16, 3.0);
      for (int i = 0; i < 8; ++i) pv[static_cast<std::size_t>(i)] = 1.5;
      const ExponentField ptv(g, pv);
      for (const char* which : {"ainfty", "apvar", "rh", "opnorm"}) {
        ConditionReport rep;
        if (std::string(which) == "ainfty")
          rep = ainfty_search(ptv, 0.5, budget, seed);
        else if (std::string(which) == "apvar")
          rep = apvar_search(ptv, budget, seed);
        else if (std::string(which) == "rh")
          rep = rh_search(ptv, 2.0, budget / 4, seed);
        else
          rep = operator_norm_estimate(MaximalOp::Median, ptv, OperatorParams{}, budget / 4,
                                       seed);
        check(s, std::abs(reevaluate_witness(ptv, rep) - rep.best_ratio) <=
                     1e-9 * std::max(1.0, rep.best_ratio));
      }
      // duality symmetry: both searches finite for p_- > 1
      const auto rep_dual = ainfty_search(dual_exponent(ptv), 0.5, budget / 2, seed);
      check(s, std::isfinite(rep_dual.best_ratio) && rep_dual.best_ratio >= 1.0);
      // budget monotonicity
      const auto rep_small = ainfty_search(ptv, 0.5, budget / 2, seed);
      const auto rep_large = ainfty_search(ptv, 0.5, budget, seed);
      check(s, rep_large.best_ratio >= rep_small.best_ratio);
    }
    {
      // averaging operator contracts on constant-exponent spaces
      const auto rep = operator_norm_estimate(MaximalOp::AveragingUniform, p2,
                                              OperatorParams{}, full ? 400 : 120, seed);
      check(s, rep.best_ratio <= 1.0 + 1e-9);
    }
    finish(s);
  }

  sum.total_ms = clock.ms();
  return sum;
}

}  // namespace vexlab
