#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "vexlab/modular.hpp"
#include "vexlab/rng.hpp"

using namespace vexlab;

namespace {

GridFunction random_function(const Grid& g, Rng& rng, double amp) {
  GridFunction f(g, 0.0);
  for (int c = 0; c < g.cell_count(); ++c) f[c] = rng.uniform(-amp, amp);
  return f;
}

ExponentField random_exponent(const Grid& g, Rng& rng, double lo, double hi) {
  std::vector<double> p(static_cast<std::size_t>(g.cell_count()));
  for (auto& v : p) v = rng.uniform(lo, hi);
  return ExponentField(g, std::move(p));
}

}  // namespace

TEST_CASE("modular examples") {
  const Grid g3 = Grid::line(3);
  const auto p2 = ExponentField::constant(g3, 2.0);
  CHECK(modular(GridFunction(g3, 0.0), p2) == 0.0);
  CHECK(modular(GridFunction(g3, 1.0), p2) == 3.0);

  const Grid g2 = Grid::line(2);
  const ExponentField p12(g2, {1.0, 2.0});
  const GridFunction f(g2, {2.0, 3.0});
  CHECK(modular(f, p12) == 11.0);  // 2^1 + 3^2

  const Grid other = Grid::line(4);
  CHECK_THROWS_AS(modular(GridFunction(other, 1.0), p12), std::invalid_argument);
}

TEST_CASE("luxemburg norm: constant exponent and closed forms") {
  const Grid g4 = Grid::line(4);
  CHECK(luxemburg_norm(GridFunction(g4, 1.0), ExponentField::constant(g4, 2.0)) == 2.0);
  CHECK(luxemburg_norm(GridFunction(g4, 0.0), ExponentField::constant(g4, 2.0)) == 0.0);

  // p = (1,2), f = (1,1): 1/x + 1/x^2 = 1 at the golden ratio.
  const Grid g2 = Grid::line(2);
  const ExponentField p12(g2, {1.0, 2.0});
  const double norm = luxemburg_norm(GridFunction(g2, 1.0), p12);
  const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
  CHECK(std::abs(norm - golden) <= 1e-10);
}

TEST_CASE("luxemburg norm matches classical q-norms") {
  Rng rng(101);
  for (double q : {1.0, 1.5, 2.0, 4.0}) {
    for (const Grid& g : {Grid::line(17), Grid::plane(5, 6, 0.5)}) {
      const auto pq = ExponentField::constant(g, q);
      for (int rep = 0; rep < 20; ++rep) {
        const auto f = random_function(g, rng, 8.0);
        double sum = 0.0;
        for (int c = 0; c < g.cell_count(); ++c) sum += std::pow(std::abs(f[c]), q);
        const double classical = std::pow(g.cell_measure() * sum, 1.0 / q);
        const double lux = luxemburg_norm(f, pq);
        CHECK(std::abs(lux - classical) <= 1e-10 * std::max(1.0, classical));
      }
    }
  }
}

TEST_CASE("luxemburg norm properties") {
  Rng rng(102);
  const Grid g = Grid::line(24, 0.5);
  const CellMask whole = CellMask::full(g);
  for (int rep = 0; rep < 50; ++rep) {
    const auto p = random_exponent(g, rng, 1.0, 8.0);
    const auto f = random_function(g, rng, 10.0);
    const double nf = luxemburg_norm(f, p, whole);

    // homogeneity
    const double c = rng.log_uniform(1e-3, 1e3);
    GridFunction cf(g, 0.0);
    for (int i = 0; i < g.cell_count(); ++i) cf[i] = -c * f[i];
    CHECK(std::abs(luxemburg_norm(cf, p, whole) - c * nf) <= 1e-9 * std::max(1.0, c * nf));

    // monotonicity
    GridFunction bigger(g, 0.0);
    for (int i = 0; i < g.cell_count(); ++i) bigger[i] = f[i] * rng.uniform(1.0, 4.0);
    CHECK(nf <= luxemburg_norm(bigger, p, whole) + 1e-9);

    // unit ball characterization away from the boundary
    const double rho = modular(f, p, whole);
    if (std::abs(rho - 1.0) > 1e-9 && std::abs(nf - 1.0) > 1e-9)
      CHECK((rho <= 1.0) == (nf <= 1.0));
  }
}

TEST_CASE("norm of the indicator solves the modular equation") {
  Rng rng(103);
  const Grid g = Grid::plane(6, 6, 0.5);
  for (int rep = 0; rep < 20; ++rep) {
    const auto p = random_exponent(g, rng, 1.0, 6.0);
    GridFunction chi(g, 0.0);
    int cnt = 0;
    for (int c = 0; c < g.cell_count(); ++c)
      if (rng.coin()) {
        chi[c] = 1.0;
        ++cnt;
      }
    if (cnt == 0) continue;
    const double nrm = luxemburg_norm(chi, p, CellMask::full(g));
    double check_mod = 0.0;
    for (int c = 0; c < g.cell_count(); ++c)
      if (chi[c] != 0.0) check_mod += std::pow(1.0 / nrm, p[c]);
    check_mod *= g.cell_measure();
    CHECK(check_mod <= 1.0 + 1e-9);
    CHECK(check_mod >= 1.0 - 1e-9);
  }
}

TEST_CASE("dual exponent") {
  const Grid g = Grid::line(2);
  CHECK(dual_exponent(ExponentField::constant(g, 2.0)).values() ==
        std::vector<double>{2.0, 2.0});
  const auto d4 = dual_exponent(ExponentField::constant(g, 4.0));
  CHECK(std::abs(d4[0] - 4.0 / 3.0) <= 1e-15);
  const auto d = dual_exponent(ExponentField(g, {1.5, 3.0}));
  CHECK(std::abs(d[0] - 3.0) <= 1e-15);
  CHECK(std::abs(d[1] - 1.5) <= 1e-15);
  CHECK_THROWS_AS(dual_exponent(ExponentField(g, {1.0, 2.0})), std::domain_error);

  Rng rng(104);
  const Grid gg = Grid::line(20);
  for (int rep = 0; rep < 20; ++rep) {
    const auto p = random_exponent(gg, rng, 1.1, 8.0);
    const auto dd = dual_exponent(dual_exponent(p));
    for (int c = 0; c < gg.cell_count(); ++c)
      CHECK(std::abs(dd[c] - p[c]) <= 1e-12 * p[c]);
    const auto dp = dual_exponent(p);
    CHECK(std::abs(dp.p_minus() - p.p_plus() / (p.p_plus() - 1.0)) <= 1e-12);
    CHECK(std::abs(dp.p_plus() - p.p_minus() / (p.p_minus() - 1.0)) <= 1e-12);
  }
}

TEST_CASE("modular-norm sandwich") {
  const Grid g2 = Grid::line(2);
  const ExponentField p12(g2, {1.0, 2.0});
  const auto rep = check_modular_norm_sandwich(GridFunction(g2, 1.0), p12, CellMask::full(g2));
  CHECK(rep.modular_value == 2.0);
  CHECK(std::abs(rep.norm - (1.0 + std::sqrt(5.0)) / 2.0) <= 1e-9);
  CHECK(rep.lower_holds);
  CHECK(rep.upper_holds);
  CHECK(std::abs(rep.lower - std::sqrt(2.0)) <= 1e-12);
  CHECK(std::abs(rep.upper - 2.0) <= 1e-12);

  // constant exponent: both bounds equal the norm
  const Grid g4 = Grid::line(4);
  const auto repc =
      check_modular_norm_sandwich(GridFunction(g4, 3.0), ExponentField::constant(g4, 2.0),
                                  CellMask::full(g4));
  CHECK(std::abs(repc.lower - repc.norm) <= 1e-9 * repc.norm);
  CHECK(std::abs(repc.upper - repc.norm) <= 1e-9 * repc.norm);

  // norm exactly 1: all four quantities match
  Rng rng(105);
  const Grid g = Grid::line(10);
  const auto p = random_exponent(g, rng, 1.0, 5.0);
  auto f = random_function(g, rng, 2.0);
  const double nf = luxemburg_norm(f, p, CellMask::full(g));
  for (int c = 0; c < g.cell_count(); ++c) f[c] /= nf;
  const auto repb = check_modular_norm_sandwich(f, p, CellMask::full(g));
  CHECK(std::abs(repb.norm - 1.0) <= 1e-9);
  CHECK(std::abs(repb.modular_value - 1.0) <= 1e-7);
  CHECK(repb.lower_holds);
  CHECK(repb.upper_holds);
}

TEST_CASE("sandwich holds on random instances, both branches") {
  Rng rng(106);
  for (const Grid& g : {Grid::line(30), Grid::plane(6, 5, 0.5)}) {
    for (int rep = 0; rep < 100; ++rep) {
      const auto p = random_exponent(g, rng, 1.0, 8.0);
      auto f = random_function(g, rng, 1.0);
      const double nf = luxemburg_norm(f, p, CellMask::full(g));
      if (nf == 0.0) continue;
      const double target = rep % 2 == 0 ? rng.uniform(0.02, 0.98) : rng.uniform(1.02, 50.0);
      for (int c = 0; c < g.cell_count(); ++c) f[c] *= target / nf;
      const auto out = check_modular_norm_sandwich(f, p, CellMask::full(g));
      CHECK(out.lower_holds);
      CHECK(out.upper_holds);
    }
  }
}

TEST_CASE("holder pairing") {
  const Grid g = Grid::line(4);
  const auto p2 = ExponentField::constant(g, 2.0);
  const auto zero = holder_pairing_check(GridFunction(g, 0.0), GridFunction(g, 1.0), p2,
                                         CellMask::full(g));
  CHECK(zero.pairing == 0.0);
  CHECK(zero.holds);

  // f = g = chi_E with |E| = 4: pairing 4, bound 2 * 2 * 2 = 8
  const auto one = holder_pairing_check(GridFunction(g, 1.0), GridFunction(g, 1.0), p2,
                                        CellMask::full(g));
  CHECK(one.pairing == 4.0);
  CHECK(std::abs(one.bound - 8.0) <= 1e-9);
  CHECK(one.holds);

  CHECK_THROWS_AS(holder_pairing_check(GridFunction(g, 1.0), GridFunction(g, 1.0),
                                       ExponentField::constant(g, 1.0), CellMask::full(g)),
                  std::domain_error);

  Rng rng(107);
  const Grid gg = Grid::plane(5, 5, 0.5);
  for (int rep = 0; rep < 50; ++rep) {
    const auto p = random_exponent(gg, rng, 1.05, 6.0);
    const auto f = random_function(gg, rng, 5.0);
    const auto h = random_function(gg, rng, 5.0);
    const auto out = holder_pairing_check(f, h, p, CellMask::full(gg));
    CHECK(out.holds);
    CHECK(out.ratio <= 2.0 + 1e-9);
  }
}

TEST_CASE("exponent field validation") {
  const Grid g = Grid::line(3);
  CHECK_THROWS_AS(ExponentField(g, {0.5, 2.0, 2.0}), std::invalid_argument);
  CHECK_THROWS_AS(ExponentField(g, {2.0, 2.0}), std::invalid_argument);
  CHECK_THROWS_AS(GridFunction(g, {1.0, std::nan(""), 0.0}), std::invalid_argument);
  const ExponentField p(g, {1.0, 2.0, 3.0});
  CHECK(p.p_minus() == 1.0);
  CHECK(p.p_plus() == 3.0);
  CHECK(p.p_minus(CellMask::of_cells(g, {1, 2})) == 2.0);
  CHECK(p.p_plus(CellMask::of_cells(g, {0, 1})) == 2.0);
  CHECK_THROWS_AS(p.p_minus(CellMask(g)), std::invalid_argument);
}
