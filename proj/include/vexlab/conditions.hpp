#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "vexlab/grid.hpp"
#include "vexlab/maximal.hpp"
#include "vexlab/modular.hpp"
#include "vexlab/report.hpp"
#include "vexlab/rng.hpp"

namespace vexlab {

namespace detail {

struct Stopwatch {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
  }
};

// Norm of sum_i w_i chi_{S_i} from explicit per-set cell lists.
inline double norm_of_weighted_sets(const ExponentField& p,
                                    const std::vector<std::vector<int>>& sets,
                                    const std::vector<double>& weights, double tol) {
  std::vector<double> vals, exps;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    if (weights[i] == 0.0) continue;
    for (int c : sets[i]) {
      vals.push_back(weights[i]);
      exps.push_back(p[c]);
    }
  }
  return norm_of_samples(vals, exps, p.grid().cell_measure(), tol);
}

inline double norm_on_cells(const ExponentField& p, const std::vector<int>& cells,
                            const std::vector<double>& values, double tol) {
  std::vector<double> exps(cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i) exps[i] = p[cells[i]];
  return norm_of_samples(values, exps, p.grid().cell_measure(), tol);
}

inline std::vector<int> dyadic_tile_sides(const Grid& g) {
  std::vector<int> out;
  for (int s = 1; s <= max_cube_side(g); s *= 2) {
    bool ok = g.extent(0) % s == 0 && (g.dim() == 1 || g.extent(1) % s == 0);
    if (ok) out.push_back(s);
  }
  return out;
}

inline std::vector<Cube> tiling(const Grid& g, int s) {
  std::vector<Cube> out;
  for (int ax = 0; ax + s <= g.extent(0); ax += s) {
    if (g.dim() == 1) {
      out.push_back(Cube{{ax, 0}, s});
    } else {
      for (int ay = 0; ay + s <= g.extent(1); ay += s) out.push_back(Cube{{ax, ay}, s});
    }
  }
  return out;
}

inline std::vector<Cube> random_disjoint_cubes(const Grid& g, Rng& rng, int max_cubes) {
  const int want = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_cubes)));
  CellMask occupied(g);
  std::vector<Cube> out;
  for (int j = 0; j < want; ++j) {
    for (int attempt = 0; attempt < 20; ++attempt) {
      Cube q;
      q.side = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_cube_side(g))));
      q.anchor[0] =
          static_cast<int>(rng.below(static_cast<std::uint64_t>(g.extent(0) - q.side + 1)));
      q.anchor[1] = g.dim() == 2 ? static_cast<int>(rng.below(
                                       static_cast<std::uint64_t>(g.extent(1) - q.side + 1)))
                                 : 0;
      bool clash = false;
      for (int c : cells_of(g, q)) {
        if (occupied.contains(c)) {
          clash = true;
          break;
        }
      }
      if (!clash) {
        for (int c : cells_of(g, q)) occupied.set(c);
        out.push_back(q);
        break;
      }
    }
  }
  return out;
}

}  // namespace detail

/// A_{p(.)} single-cube testing ratio <|f|>_Q ||chi_Q|| / ||f chi_Q||.
inline double apvar_ratio(const ExponentField& p, const Cube& q, const GridFunction& f,
                          double tol = 1e-12) {
  require_same_grid(p.grid(), f.grid());
  const Grid& g = p.grid();
  const auto cells = cells_of(g, q);
  double sum = 0.0;
  std::vector<double> fv(cells.size()), ones(cells.size(), 1.0);
  for (std::size_t i = 0; i < cells.size(); ++i) {
    fv[i] = f[cells[i]];
    sum += std::abs(fv[i]);
  }
  const double avg = sum / static_cast<double>(cells.size());
  const double norm_chi = detail::norm_on_cells(p, cells, ones, tol);
  const double norm_f = detail::norm_on_cells(p, cells, fv, tol);
  if (norm_f == 0.0) throw std::domain_error("apvar_ratio: f vanishes a.e. on Q");
  return avg * norm_chi / norm_f;
}

/// A_infty family testing ratio ||sum t_Q chi_Q|| / ||sum t_Q chi_{E_Q}||.
/// Every entry must carry E_Q with |E_Q| >= lambda |Q|; some t_Q must be > 0.
inline double ainfty_ratio(const ExponentField& p, double lambda, const WeightedFamily& fam,
                           double tol = 1e-12) {
  require_same_grid(p.grid(), fam.grid());
  if (!(lambda > 0.0 && lambda < 1.0))
    throw std::invalid_argument("ainfty_ratio: lambda must be in (0,1)");
  std::vector<std::vector<int>> cubes_cells, subset_cells;
  std::vector<double> weights;
  bool any_positive = false;
  for (const auto& e : fam.entries()) {
    if (!e.subset) throw std::invalid_argument("ainfty_ratio: missing E_Q");
    const int cq = cube_cell_count(fam.grid(), e.cube);
    const int ce = e.subset->count();
    if (static_cast<double>(ce) < lambda * static_cast<double>(cq) - 1e-9)
      throw std::invalid_argument("ainfty_ratio: |E_Q| < lambda |Q|");
    cubes_cells.push_back(cells_of(fam.grid(), e.cube));
    subset_cells.push_back(e.subset->cells());
    weights.push_back(e.weight);
    any_positive = any_positive || e.weight > 0.0;
  }
  if (!any_positive) throw std::domain_error("ainfty_ratio: all weights zero");
  const double num = detail::norm_of_weighted_sets(p, cubes_cells, weights, tol);
  const double den = detail::norm_of_weighted_sets(p, subset_cells, weights, tol);
  if (den == 0.0) throw std::domain_error("ainfty_ratio: zero denominator");
  return num / den;
}

/// Reverse-Holder functional over a disjoint family: returns
/// (sum_Q int_Q t_Q^{p}, sum_Q |Q| (avg_Q t_Q^{r p})^{1/r}). The condition
/// under test is "input <= 1 implies output <= C"; callers normalize the
/// weights so the first component is at most 1.
inline std::pair<double, double> rh_functional(const ExponentField& p, double r,
                                               const WeightedFamily& fam) {
  require_same_grid(p.grid(), fam.grid());
  if (!(r > 1.0)) throw std::invalid_argument("rh_functional: r must be > 1");
  const Grid& g = p.grid();
  const double hd = g.cell_measure();
  double input = 0.0, output = 0.0;
  for (const auto& e : fam.entries()) {
    if (e.weight == 0.0) continue;  // 0^p == 0 contributes nothing to either sum
    const auto cells = cells_of(g, e.cube);
    double msum = 0.0, rsum = 0.0;
    for (int c : cells) {
      msum += std::pow(e.weight, p[c]);
      rsum += std::pow(e.weight, r * p[c]);
    }
    input += hd * msum;
    output += cube_measure(g, e.cube) *
              std::pow(rsum / static_cast<double>(cells.size()), 1.0 / r);
  }
  return {input, output};
}

// ---------------------------------------------------------------------------
// b(Q) construction
// ---------------------------------------------------------------------------

struct BFunctionResult {
  bool defined = false;  // false means g <= 0 throughout (0, t_max], b == 0
  double t_q = 0.0;
  double b = 0.0;
  double residual = 0.0;  // |g(t_q)| relative to the right-hand side
  double t_max = 0.0;
  double k = 0.0;
};

/// The b(Q) construction: with k = 2^{1+p_+/p_-} C, t_max the solution of
/// int_Q t^{p} = 1, and g(t) = |Q| (avg_Q t^{rp})^{1/r} - k int_Q t^{p},
/// finds t_Q = sup{ t in (0, t_max] : g(t) > 0 } by a log-spaced scan from
/// t_max downward plus bisection on the located sign change, and evaluates
/// b(Q) there. When g <= 0 on the whole scan range, b(Q) = 0.
inline BFunctionResult b_function(const ExponentField& p, const Cube& q, double r, double C,
                                  int scan_points = 4096, double scan_floor = 1e-9,
                                  double tol = 1e-12) {
  if (!(r > 1.0)) throw std::invalid_argument("b_function: r must be > 1");
  if (!(C > 0.0)) throw std::invalid_argument("b_function: C must be > 0");
  const Grid& g = p.grid();
  const auto cells = cells_of(g, q);
  const double hd = g.cell_measure();
  const double meas = cube_measure(g, q);
  const double cnt = static_cast<double>(cells.size());
  std::vector<double> exps(cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i) exps[i] = p[cells[i]];

  BFunctionResult res;
  res.k = std::pow(2.0, 1.0 + p.p_plus() / p.p_minus()) * C;
  {
    std::vector<double> ones(cells.size(), 1.0);
    res.t_max = 1.0 / detail::norm_of_samples(ones, exps, hd, tol);
  }

  auto g_fn = [&](double t, double* rhs_out = nullptr) {
    double msum = 0.0, rsum = 0.0;
    for (double e : exps) {
      msum += std::pow(t, e);
      rsum += std::pow(t, r * e);
    }
    const double lhs = meas * std::pow(rsum / cnt, 1.0 / r);
    const double rhs = res.k * hd * msum;
    if (rhs_out) *rhs_out = rhs;
    return lhs - rhs;
  };

  double hi = res.t_max;  // candidate with g > 0, once found
  if (g_fn(res.t_max) > 0.0) {
    res.defined = true;
    res.t_q = res.t_max;
  } else {
    double above = res.t_max;  // smallest scanned t with g <= 0 above the set
    bool found = false;
    const double step = std::log(scan_floor) / static_cast<double>(scan_points);
    for (int i = 1; i <= scan_points; ++i) {
      const double t = res.t_max * std::exp(step * static_cast<double>(i));
      if (g_fn(t) > 0.0) {
        hi = t;
        found = true;
        break;
      }
      above = t;
    }
    if (!found) return res;  // g <= 0 on the scanned range: b == 0
    // Bisect the boundary of {g > 0} between hi (inside) and above (outside).
    double lo_in = hi, hi_out = above;
    for (int it = 0; it < 200 && hi_out - lo_in > 1e-15 * hi_out; ++it) {
      const double mid = 0.5 * (lo_in + hi_out);
      if (mid <= lo_in || mid >= hi_out) break;
      if (g_fn(mid) > 0.0)
        lo_in = mid;
      else
        hi_out = mid;
    }
    res.defined = true;
    res.t_q = lo_in;
  }

  double rhs = 0.0;
  const double gv = g_fn(res.t_q, &rhs);
  res.b = gv + rhs;  // == |Q| (avg t_q^{rp})^{1/r}
  res.residual = rhs > 0.0 ? std::abs(gv) / rhs : std::abs(gv);
  return res;
}

// ---------------------------------------------------------------------------
// Pointwise average checks
// ---------------------------------------------------------------------------

struct RhAverageResult {
  double lhs = 0.0;       // (avg_Q t^{gamma p})^{1/gamma}
  double rhs = 0.0;       // C avg_Q t^{p}
  bool holds = false;
  double p_lambda = 0.0;  // rearrangement of p on Q at lambda |Q|, diagnostic
  double window_lo = 0.0;
  double window_hi = 0.0;
};

/// Reverse-Holder-on-averages check for a single t inside the admissible
/// window [min(1, 1/||chi_Q||^{1+eps}), max(1, 1/||chi_Q||^{1+eps})].
inline RhAverageResult rh_average_check(const ExponentField& p, const Cube& q, double gamma,
                                   double eps, double C, double t, double lambda = 0.5,
                                   double tol = 1e-12) {
  if (!(gamma > 1.0)) throw std::invalid_argument("rh_average_check: gamma must be > 1");
  if (!(eps > 0.0)) throw std::invalid_argument("rh_average_check: eps must be > 0");
  if (!(C > 0.0)) throw std::invalid_argument("rh_average_check: C must be > 0");
  const Grid& g = p.grid();
  const auto cells = cells_of(g, q);
  RhAverageResult res;
  {
    std::vector<double> ones(cells.size(), 1.0);
    const double norm_chi = detail::norm_on_cells(p, cells, ones, tol);
    const double w = std::pow(1.0 / norm_chi, 1.0 + eps);
    res.window_lo = std::min(1.0, w);
    res.window_hi = std::max(1.0, w);
  }
  if (t < res.window_lo * (1.0 - 1e-12) || t > res.window_hi * (1.0 + 1e-12))
    throw std::domain_error("rh_average_check: t outside the admissible window");
  double gsum = 0.0, msum = 0.0;
  for (int c : cells) {
    gsum += std::pow(t, gamma * p[c]);
    msum += std::pow(t, p[c]);
  }
  const double cnt = static_cast<double>(cells.size());
  res.lhs = std::pow(gsum / cnt, 1.0 / gamma);
  res.rhs = C * (msum / cnt);
  res.holds = res.lhs <= res.rhs + tol * std::max(1.0, res.rhs);
  res.p_lambda =
      rearrangement_value(p.as_function(), q, lambda * cube_measure(g, q));
  return res;
}

// ---------------------------------------------------------------------------
// Constant chains
// ---------------------------------------------------------------------------

// Derived constants for the level-set argument: k from the reverse-Holder
// constants, then eps, A, eta, delta.
struct RhConstantChain {
  double r = 0.0, C = 0.0, p_minus = 0.0, p_plus = 0.0, gamma = 0.0;  // inputs
  double k = 0.0, eps = 0.0, A = 0.0, gamma_prime = 0.0, eta = 0.0, delta = 0.0;
  double one_minus_eta = 0.0;  // (2A)^{-gamma'}, kept separately: eta can round to 1
  bool feasible = false;       // eta, delta in (0,1)
};

inline RhConstantChain rh_constant_chain(double r, double C, double p_minus, double p_plus,
                               double gamma) {
  if (!(r > 1.0)) throw std::invalid_argument("rh_constant_chain: r must be > 1");
  if (!(C > 0.0)) throw std::invalid_argument("rh_constant_chain: C must be > 0");
  if (!(p_minus >= 1.0 && p_plus >= p_minus && std::isfinite(p_plus)))
    throw std::invalid_argument("rh_constant_chain: need 1 <= p_- <= p_+ < inf");
  if (!(gamma > 1.0 && gamma < r))
    throw std::invalid_argument("rh_constant_chain: gamma must be in (1, r)");
  RhConstantChain ch;
  ch.r = r;
  ch.C = C;
  ch.p_minus = p_minus;
  ch.p_plus = p_plus;
  ch.gamma = gamma;
  ch.k = std::pow(2.0, 1.0 + p_plus / p_minus) * C;
  ch.eps = r / gamma - 1.0;
  ch.A = std::max(std::pow(2.0 * ch.k, 1.0 + ch.eps), 2.0 * C);
  ch.gamma_prime = gamma / (gamma - 1.0);
  ch.one_minus_eta = std::pow(2.0 * ch.A, -ch.gamma_prime);  // A (1-eta)^{1/gamma'} = 1/2
  ch.eta = 1.0 - ch.one_minus_eta;
  ch.delta = ch.eps / (1.0 + ch.eps) * p_minus;
  ch.feasible = ch.one_minus_eta > 0.0 && ch.one_minus_eta < 1.0 && ch.delta > 0.0 &&
                ch.delta < 1.0;
  return ch;
}

/// Canonical gamma when none is supplied: the midpoint of (1, r).
inline double rh_chain_default_gamma(double r) { return 0.5 * (1.0 + r); }

// Derived constants for the median-operator bound: nu, t, r, gamma.
struct MedianConstantChain {
  double lambda = 0.0, eta = 0.0, C = 0.0, p_minus = 0.0, p_plus = 0.0;  // inputs
  int n = 1, N = 1;
  double nu = 0.0, t = 0.0, r_pow_n = 0.0, r = 0.0, gamma = 0.0;
  bool feasible = false;  // nu < t r^n - (1 - r^n) and gamma in (0,1)
};

inline MedianConstantChain median_constant_chain(double lambda, double eta, int n, int N, double C,
                               double p_minus, double p_plus) {
  if (!(lambda > 0.0 && lambda < 1.0))
    throw std::invalid_argument("median_constant_chain: lambda must be in (0,1)");
  if (!(eta > 0.0 && eta < 1.0)) throw std::invalid_argument("median_constant_chain: eta must be in (0,1)");
  if (n != 1 && n != 2) throw std::invalid_argument("median_constant_chain: n must be 1 or 2");
  if (N < 1) throw std::invalid_argument("median_constant_chain: N must be >= 1");
  if (!(C >= 1.0)) throw std::invalid_argument("median_constant_chain: C must be >= 1");
  if (!(p_minus >= 1.0 && p_plus >= p_minus && std::isfinite(p_plus)))
    throw std::invalid_argument("median_constant_chain: need 1 <= p_- <= p_+ < inf");
  MedianConstantChain ch;
  ch.lambda = lambda;
  ch.eta = eta;
  ch.n = n;
  ch.N = N;
  ch.C = C;
  ch.p_minus = p_minus;
  ch.p_plus = p_plus;
  ch.nu = std::max(lambda, eta);
  ch.t = (1.0 + ch.nu) / 2.0;
  ch.r_pow_n = ((1.0 + ch.nu) / (1.0 + ch.t) + 1.0) / 2.0;  // nu < t r^n - (1 - r^n)
  ch.r = n == 1 ? ch.r_pow_n : std::sqrt(ch.r_pow_n);
  // 2 N C^{p_+ - p_-} gamma^{p_-} = 1/2
  ch.gamma = std::pow(1.0 / (4.0 * static_cast<double>(N) * std::pow(C, p_plus - p_minus)),
                      1.0 / p_minus);
  ch.feasible = ch.nu < ch.t * ch.r_pow_n - (1.0 - ch.r_pow_n) && ch.gamma > 0.0 &&
                ch.gamma < 1.0;
  return ch;
}

struct DenseSubsetBound {
  double lhs = 0.0;  // int_Q t^{p}
  double rhs = 0.0;  // 2 ( int_E t^{p} + t^delta b(Q) [t < 1] )
  bool holds = false;
};

/// Evaluates the level-set inequality int_Q t^p <= 2 (int_E t^p + t^delta b(Q))
/// for a subset E with |E| >= eta |Q| and t <= 1/||chi_Q||. Violations are
/// reported, not asserted: supplied reverse-Holder constants may be invalid.
inline DenseSubsetBound dense_subset_bound_check(const ExponentField& p, const Cube& q,
                                        const CellMask& E, double t,
                                        const RhConstantChain& chain, double b_of_q,
                                        double tol = 1e-12) {
  const Grid& g = p.grid();
  require_same_grid(g, E.grid());
  const auto cells = cells_of(g, q);
  if (!E.is_subset_of(CellMask::of_cube(g, q)))
    throw std::invalid_argument("dense_subset_bound_check: E not a subset of Q");
  if (static_cast<double>(E.count()) <
      chain.eta * static_cast<double>(cells.size()) - 1e-9)
    throw std::invalid_argument("dense_subset_bound_check: |E| < eta |Q|");
  if (!(t > 0.0)) throw std::invalid_argument("dense_subset_bound_check: t must be > 0");
  {
    std::vector<double> ones(cells.size(), 1.0);
    const double norm_chi = detail::norm_on_cells(p, cells, ones, tol);
    if (t > (1.0 / norm_chi) * (1.0 + 1e-9))
      throw std::domain_error("dense_subset_bound_check: t above 1/||chi_Q||");
  }
  const double hd = g.cell_measure();
  DenseSubsetBound res;
  double qsum = 0.0, esum = 0.0;
  for (int c : cells) {
    const double v = std::pow(t, p[c]);
    qsum += v;
    if (E.contains(c)) esum += v;
  }
  res.lhs = hd * qsum;
  res.rhs = 2.0 * (hd * esum + (t < 1.0 ? std::pow(t, chain.delta) * b_of_q : 0.0));
  res.holds = res.lhs <= res.rhs + tol * std::max(1.0, res.rhs);
  return res;
}

// ---------------------------------------------------------------------------
// Seeded adversarial searches
// ---------------------------------------------------------------------------

namespace detail {

// Fixed-point adversarial subset selection for the A_infty ratio: keep per
// cube the required number of cells minimizing (t_Q/lam)^{p(c)}, where lam is
// the current denominator norm, and iterate (at most 10 rounds). Exact for
// constant exponents; ties break by cell index.
struct AinftySelection {
  std::vector<std::vector<int>> subsets;
  double numerator = 0.0;
  double denominator = 0.0;
  double ratio = 0.0;
};

inline AinftySelection ainfty_adversarial(const ExponentField& p, double lambda,
                                          const std::vector<Cube>& cubes,
                                          const std::vector<double>& weights, double tol) {
  const Grid& g = p.grid();
  AinftySelection sel;
  std::vector<std::vector<int>> cube_cells(cubes.size());
  for (std::size_t i = 0; i < cubes.size(); ++i) cube_cells[i] = cells_of(g, cubes[i]);
  sel.numerator = norm_of_weighted_sets(p, cube_cells, weights, tol);
  if (sel.numerator == 0.0) return sel;

  std::vector<int> required(cubes.size());
  for (std::size_t i = 0; i < cubes.size(); ++i) {
    const int cnt = static_cast<int>(cube_cells[i].size());
    required[i] = static_cast<int>(std::ceil(lambda * static_cast<double>(cnt)));
    required[i] = std::max(1, std::min(required[i], cnt));
  }

  double lam_hat = sel.numerator;
  sel.subsets.resize(cubes.size());
  std::vector<std::pair<double, int>> keyed;
  for (int round = 0; round < 10; ++round) {
    for (std::size_t i = 0; i < cubes.size(); ++i) {
      auto& chosen = sel.subsets[i];
      chosen.clear();
      if (weights[i] == 0.0) {
        chosen.assign(cube_cells[i].begin(), cube_cells[i].begin() + required[i]);
        continue;
      }
      const double L = std::log(weights[i] / lam_hat);
      keyed.clear();
      for (int c : cube_cells[i]) keyed.emplace_back(p[c] * L, c);
      std::sort(keyed.begin(), keyed.end());
      for (int j = 0; j < required[i]; ++j) chosen.push_back(keyed[static_cast<std::size_t>(j)].second);
      std::sort(chosen.begin(), chosen.end());
    }
    const double den = norm_of_weighted_sets(p, sel.subsets, weights, tol);
    const bool settled = std::abs(den - lam_hat) <= 1e-12 * std::max(1.0, den);
    lam_hat = den;
    if (settled) break;
  }
  sel.denominator = lam_hat;
  sel.ratio = sel.numerator / lam_hat;
  return sel;
}

inline Json ainfty_witness_json(const Grid& g, double lambda, const std::vector<Cube>& cubes,
                                const std::vector<double>& weights,
                                const std::vector<std::vector<int>>& subsets) {
  std::vector<WeightedCube> entries;
  for (std::size_t i = 0; i < cubes.size(); ++i) {
    WeightedCube e;
    e.cube = cubes[i];
    e.weight = weights[i];
    e.subset = CellMask::of_cells(g, subsets[i]);
    entries.push_back(std::move(e));
  }
  WeightedFamily fam(g, std::move(entries));
  Json w = Json{{"lambda", lambda}, {"family", family_to_json(fam)}};
  return w;
}

// Next lexicographic m-combination of {0,...,n-1}; false when exhausted.
inline bool next_combination(std::vector<int>& comb, int n) {
  const int m = static_cast<int>(comb.size());
  int i = m - 1;
  while (i >= 0 && comb[static_cast<std::size_t>(i)] == n - m + i) --i;
  if (i < 0) return false;
  ++comb[static_cast<std::size_t>(i)];
  for (int j = i + 1; j < m; ++j)
    comb[static_cast<std::size_t>(j)] = comb[static_cast<std::size_t>(j - 1)] + 1;
  return true;
}

}  // namespace detail

/// Seeded lower-bound search for the A_infty constant at a given lambda.
/// The candidate stream is deterministic given the seed and independent of
/// the budget; the budget truncates it, so the best ratio is non-decreasing
/// in the budget. Stream: canonical families (largest cube, dyadic tilings)
/// with t_Q = 1/||chi_Q||, then exhaustive minimal subsets on small cubes,
/// then random families with adversarially chosen subsets.
inline ConditionReport ainfty_search(const ExponentField& p, double lambda,
                                     std::uint64_t budget, std::uint64_t seed,
                                     double tol = 1e-12) {
  if (!(lambda > 0.0 && lambda < 1.0))
    throw std::invalid_argument("ainfty_search: lambda must be in (0,1)");
  if (budget < 1) throw std::invalid_argument("ainfty_search: budget must be >= 1");
  const Grid& g = p.grid();
  detail::Stopwatch clock;
  ConditionReport rep;
  rep.condition = "ainfty";
  rep.params = Json{{"lambda", lambda}, {"budget", budget}, {"seed", seed}};

  double best = 0.0;
  Json best_witness = Json::object();
  std::uint64_t used = 0;

  // One adversarially-completed family = one evaluation.
  auto consider_family = [&](const std::vector<Cube>& cubes,
                             const std::vector<double>& weights) -> bool {
    if (used >= budget) return false;
    ++used;
    const auto sel = detail::ainfty_adversarial(p, lambda, cubes, weights, tol);
    if (sel.numerator > 0.0 && sel.ratio > best) {
      best = sel.ratio;
      best_witness = detail::ainfty_witness_json(g, lambda, cubes, weights, sel.subsets);
    }
    return true;
  };

  auto inv_norm_chi = [&](const Cube& q) {
    const auto cells = cells_of(g, q);
    std::vector<double> ones(cells.size(), 1.0);
    return 1.0 / detail::norm_on_cells(p, cells, ones, tol);
  };

  bool live = true;

  // Canonical families.
  {
    const Cube big{{0, 0}, max_cube_side(g)};
    live = consider_family({big}, {inv_norm_chi(big)});
  }
  for (int s : detail::dyadic_tile_sides(g)) {
    if (!live) break;
    const auto tiles = detail::tiling(g, s);
    std::vector<double> ws(tiles.size());
    for (std::size_t i = 0; i < tiles.size(); ++i) ws[i] = inv_norm_chi(tiles[i]);
    live = consider_family(tiles, ws);
  }

  // Exhaustive minimal subsets on small cubes: by monotonicity of the
  // denominator in E, only subsets of the minimal admissible size matter.
  // Cubes where the exponent varies go first; cubes with a forced E = Q
  // (minimal size == cell count) can only score 1 and are skipped.
  auto exhaustive_pass = [&](bool want_varying) {
    for_each_cube(g, [&](const Cube& q) {
      if (!live) return;
      const int cnt = cube_cell_count(g, q);
      if (cnt > 12) return;
      const auto cells = cells_of(g, q);
      const int m = std::max(
          1, static_cast<int>(std::ceil(lambda * static_cast<double>(cnt))));
      if (m >= cnt) return;
      bool varies = false;
      for (std::size_t i = 1; i < cells.size() && !varies; ++i)
        varies = p[cells[i]] != p[cells[0]];
      if (varies != want_varying) return;
      for (double t : {inv_norm_chi(q), 1.0}) {
        if (!live) return;
        std::vector<int> comb(static_cast<std::size_t>(m));
        std::iota(comb.begin(), comb.end(), 0);
        std::vector<std::vector<int>> one_set(1);
        const double num =
            detail::norm_of_weighted_sets(p, {cells}, {t}, tol);
        do {
          if (used >= budget) {
            live = false;
            return;
          }
          ++used;
          auto& chosen = one_set[0];
          chosen.clear();
          for (int idx : comb) chosen.push_back(cells[static_cast<std::size_t>(idx)]);
          const double den = detail::norm_of_weighted_sets(p, one_set, {t}, tol);
          if (den > 0.0 && num / den > best) {
            best = num / den;
            best_witness = detail::ainfty_witness_json(g, lambda, {q}, {t}, one_set);
          }
        } while (detail::next_combination(comb, cnt));
      }
    });
  };
  if (live) exhaustive_pass(true);
  if (live) exhaustive_pass(false);

  // Random families.
  Rng rng(derive_seed(seed, 0xA1F));
  while (used < budget) {
    const int type = static_cast<int>(rng.below(3));
    std::vector<Cube> cubes;
    if (type == 0) {
      cubes = detail::random_disjoint_cubes(g, rng, 4);
    } else if (type == 1) {
      const auto sides = detail::dyadic_tile_sides(g);
      const int s = sides[rng.below(sides.size())];
      for (const Cube& q : detail::tiling(g, s))
        if (rng.coin()) cubes.push_back(q);
      if (cubes.empty()) cubes.push_back(detail::tiling(g, s).front());
    } else {
      cubes.push_back(Cube{{0, 0}, max_cube_side(g)});
    }
    if (cubes.empty()) continue;
    std::vector<double> ws(cubes.size());
    const bool lognormal = rng.coin();
    for (std::size_t i = 0; i < cubes.size(); ++i)
      ws[i] = lognormal ? rng.log_uniform(1e-3, 1e3) : inv_norm_chi(cubes[i]);
    consider_family(cubes, ws);
  }

  rep.best_ratio = best;
  rep.witness = best_witness;
  rep.evaluations = used;
  rep.wall_ms = clock.ms();
  return rep;
}

/// Seeded lower-bound search for the A_{p(.)} constant: maximizes apvar_ratio
/// over cubes crossed with a test family (the cube indicator, sublevel-set
/// indicators of p, norm-power profiles, random indicators and steps), then
/// refines the best witness by coordinate ascent. Deterministic given seed;
/// budget truncates a fixed candidate stream.
inline ConditionReport apvar_search(const ExponentField& p, std::uint64_t budget,
                                    std::uint64_t seed, double tol = 1e-12) {
  if (budget < 1) throw std::invalid_argument("apvar_search: budget must be >= 1");
  const Grid& g = p.grid();
  detail::Stopwatch clock;
  ConditionReport rep;
  rep.condition = "apvar";
  rep.params = Json{{"budget", budget}, {"seed", seed}};

  struct Candidate {
    double ratio = 0.0;
    Cube cube{{0, 0}, 1};
    std::vector<int> cells;
    std::vector<double> values;
  };
  double best = 0.0;
  Candidate best_candidate;
  std::vector<Candidate> pool;  // a few distinct cubes worth refining
  constexpr std::size_t kPoolSize = 4;
  std::uint64_t used = 0;

  auto ratio_on_cube = [&](const std::vector<int>& cells,
                           const std::vector<double>& values) -> double {
    double sum = 0.0;
    for (double v : values) sum += std::abs(v);
    if (sum == 0.0) return 0.0;
    std::vector<double> ones(cells.size(), 1.0);
    const double norm_chi = detail::norm_on_cells(p, cells, ones, tol);
    const double norm_f = detail::norm_on_cells(p, cells, values, tol);
    return (sum / static_cast<double>(cells.size())) * norm_chi / norm_f;
  };

  auto consider = [&](const Cube& q, const std::vector<int>& cells,
                      const std::vector<double>& values) -> bool {
    if (used >= budget) return false;
    ++used;
    const double r = ratio_on_cube(cells, values);
    if (r > best) {
      best = r;
      best_candidate = Candidate{r, q, cells, values};
    }
    // Cube-distinct pool: improve an existing entry or displace the weakest.
    std::size_t weakest = 0;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      if (pool[i].cube == q) {
        if (r > pool[i].ratio) pool[i] = Candidate{r, q, cells, values};
        return true;
      }
      if (pool[i].ratio < pool[weakest].ratio) weakest = i;
    }
    if (pool.size() < kPoolSize) {
      pool.push_back(Candidate{r, q, cells, values});
    } else if (r > pool[weakest].ratio) {
      pool[weakest] = Candidate{r, q, cells, values};
    }
    return true;
  };

  // The cube indicator always scores exactly 1, and on a cube where p is
  // constant no test function can beat 1 (Holder). The canonical phase
  // therefore takes one baseline indicator and then only cubes on which the
  // exponent actually varies, smallest first: those carry the variable-
  // exponent structure, and small ones are the sharpest per unit of budget.
  // The phase stops at half the budget so that the random and ascent phases
  // always run.
  bool live = consider(Cube{{0, 0}, max_cube_side(g)},
                       cells_of(g, Cube{{0, 0}, max_cube_side(g)}),
                       std::vector<double>(
                           static_cast<std::size_t>(
                               cube_cell_count(g, Cube{{0, 0}, max_cube_side(g)})),
                           1.0));
  const std::uint64_t canonical_cap = budget / 2;

  // Side order alternates the extremes (2, max, 3, max-1, ...): small
  // straddling cubes are sharp and cheap, large ones carry the global
  // asymmetry, and a budget cap must not starve either scale.
  std::vector<int> side_order;
  for (int lo = 2, hi = max_cube_side(g); lo <= hi; ++lo, --hi) {
    side_order.push_back(lo);
    if (hi != lo) side_order.push_back(hi);
  }

  // Classification cost is capped so the run stays proportional to budget.
  std::uint64_t scan_guard =
      64 * budget + static_cast<std::uint64_t>(g.cell_count());
  for (int s : side_order) {
    if (!live || scan_guard == 0 || used >= canonical_cap) break;
    for (int ax = 0; ax + s <= g.extent(0) && live && scan_guard > 0; ++ax) {
      if (used >= canonical_cap) break;
      const int ay_end = g.dim() == 1 ? 1 : g.extent(1) - s + 1;
      for (int ay = 0; ay < ay_end && live && scan_guard > 0; ++ay) {
        if (used >= canonical_cap) break;
        const Cube q{{ax, ay}, s};
        const auto cells = cells_of(g, q);
        bool varies = false;
        for (std::size_t i = 1; i < cells.size(); ++i) {
          scan_guard -= scan_guard > 0 ? 1 : 0;
          if (p[cells[i]] != p[cells[0]]) {
            varies = true;
            break;
          }
        }
        if (!varies) continue;
        std::vector<double> exps(cells.size());
        for (std::size_t i = 0; i < cells.size(); ++i) exps[i] = p[cells[i]];

        live = consider(q, cells, std::vector<double>(cells.size(), 1.0));
        if (!live) break;

        std::vector<double> levels = exps;
        std::sort(levels.begin(), levels.end());
        levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
        if (levels.size() > 8) {
          std::vector<double> picked;
          for (int i = 1; i <= 8; ++i)
            picked.push_back(levels[levels.size() * static_cast<std::size_t>(i) / 9]);
          levels = picked;
        }
        // Two-level profiles across each sublevel split: beta = 0 is the
        // sublevel indicator, large beta loads the high-exponent part.
        for (double theta : levels) {
          bool lo_any = false, hi_any = false;
          for (double e : exps) {
            lo_any = lo_any || e <= theta;
            hi_any = hi_any || e > theta;
          }
          if (!lo_any || !hi_any) continue;
          for (double beta : {0.0, 0.0625, 0.25, 4.0, 16.0, 64.0}) {
            std::vector<double> f(cells.size());
            for (std::size_t i = 0; i < cells.size(); ++i)
              f[i] = exps[i] <= theta ? 1.0 : beta;
            live = consider(q, cells, f);
            if (!live) break;
          }
          if (!live) break;
        }
        if (!live) break;

        std::vector<double> ones(cells.size(), 1.0);
        const double norm_chi = detail::norm_on_cells(p, cells, ones, tol);
        const double pm = *std::min_element(exps.begin(), exps.end());
        const double pp = *std::max_element(exps.begin(), exps.end());
        if (norm_chi != 1.0) {
          for (double qref : {pm, pp}) {
            std::vector<double> f(cells.size());
            for (std::size_t i = 0; i < cells.size(); ++i)
              f[i] = std::pow(norm_chi, -exps[i] / qref);
            live = consider(q, cells, f);
            if (!live) break;
          }
        }
      }
    }
  }

  // Random candidates over three quarters of the remaining budget.
  Rng rng(derive_seed(seed, 0xA9));
  const std::uint64_t random_cap = used + (budget - used) * 3 / 4;
  while (used < random_cap) {
    Cube q;
    q.side = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_cube_side(g))));
    q.anchor[0] =
        static_cast<int>(rng.below(static_cast<std::uint64_t>(g.extent(0) - q.side + 1)));
    q.anchor[1] = g.dim() == 2 ? static_cast<int>(rng.below(
                                     static_cast<std::uint64_t>(g.extent(1) - q.side + 1)))
                               : 0;
    const auto cells = cells_of(g, q);
    std::vector<double> f(cells.size(), 0.0);
    if (rng.coin()) {
      bool any = false;
      for (auto& v : f)
        if (rng.coin()) {
          v = 1.0;
          any = true;
        }
      if (!any) f[rng.below(f.size())] = 1.0;
    } else {
      for (auto& v : f) v = std::exp2(static_cast<double>(rng.uniform_int(-3, 3)));
    }
    consider(q, cells, f);
  }

  // Coordinate ascent on each pooled cube with the remaining budget.
  std::sort(pool.begin(), pool.end(),
            [](const Candidate& a, const Candidate& b) { return a.ratio > b.ratio; });
  for (auto& cand : pool) {
    if (used >= budget) break;
    const std::uint64_t share = used + std::max<std::uint64_t>(1, (budget - used) / 2);
    double scale = 0.0;
    for (double v : cand.values) scale = std::max(scale, std::abs(v));
    if (scale == 0.0) scale = 1.0;
    int stale_sweeps = 0;
    while (used < share && stale_sweeps < 2) {
      bool improved = false;
      for (std::size_t idx = 0; idx < cand.cells.size() && used < share; ++idx) {
        const double v = cand.values[idx];
        // zero cells cannot move multiplicatively; reseed them at the scale
        const std::array<double, 3> moves =
            v == 0.0 ? std::array<double, 3>{scale, scale / 4.0, scale * 4.0}
                     : std::array<double, 3>{2.0 * v, 0.5 * v, 1.25 * v};
        for (double next : moves) {
          if (used >= share) break;
          ++used;
          std::vector<double> trial = cand.values;
          trial[idx] = next;
          const double r = ratio_on_cube(cand.cells, trial);
          if (r > cand.ratio) {
            cand.ratio = r;
            cand.values = std::move(trial);
            improved = true;
            if (r > best) {
              best = r;
              best_candidate = cand;
            }
          }
        }
      }
      stale_sweeps = improved ? 0 : stale_sweeps + 1;
    }
  }

  rep.best_ratio = best;
  rep.evaluations = used;
  if (!best_candidate.cells.empty())
    rep.witness = Json{{"cube", cube_to_json(g, best_candidate.cube)},
                       {"cells", best_candidate.cells},
                       {"values", best_candidate.values}};
  rep.wall_ms = clock.ms();
  return rep;
}

/// Seeded lower-bound search for the reverse-Holder constant at exponent r:
/// maximizes the output sum of rh_functional over families whose weights are
/// rescaled so the input sum is <= 1.
inline ConditionReport rh_search(const ExponentField& p, double r, std::uint64_t budget,
                                 std::uint64_t seed, double tol = 1e-12) {
  if (!(r > 1.0)) throw std::invalid_argument("rh_search: r must be > 1");
  if (budget < 1) throw std::invalid_argument("rh_search: budget must be >= 1");
  const Grid& g = p.grid();
  detail::Stopwatch clock;
  ConditionReport rep;
  rep.condition = "rh";
  rep.params = Json{{"r", r}, {"budget", budget}, {"seed", seed}};

  double best = 0.0;
  Json best_witness = Json::object();
  std::uint64_t used = 0;

  auto consider = [&](const std::vector<Cube>& cubes, std::vector<double> ws) -> bool {
    if (used >= budget) return false;
    ++used;
    bool any = false;
    for (double w : ws) any = any || w > 0.0;
    if (!any) return true;

    // Rescale so that the input sum is <= 1 (bisection on the scale).
    std::vector<std::vector<int>> cell_sets(cubes.size());
    for (std::size_t i = 0; i < cubes.size(); ++i) cell_sets[i] = cells_of(g, cubes[i]);
    const double hd = g.cell_measure();
    auto input_at = [&](double scale) {
      double sum = 0.0;
      for (std::size_t i = 0; i < cubes.size(); ++i) {
        if (ws[i] == 0.0) continue;
        for (int c : cell_sets[i]) sum += std::pow(scale * ws[i], p[c]);
      }
      return hd * sum;
    };
    double lo = 1.0, hi = 1.0;
    int guard = 0;
    while (input_at(hi) < 1.0 && guard++ < 600) hi *= 2.0;
    guard = 0;
    while (input_at(lo) > 1.0 && guard++ < 600) lo *= 0.5;
    for (int it = 0; it < 200 && hi - lo > 1e-13 * lo; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      (input_at(mid) > 1.0 ? hi : lo) = mid;
    }
    const double scale = lo;  // input(lo) <= 1

    std::vector<WeightedCube> entries(cubes.size());
    for (std::size_t i = 0; i < cubes.size(); ++i) {
      entries[i].cube = cubes[i];
      entries[i].weight = scale * ws[i];
    }
    const WeightedFamily fam(g, std::move(entries));
    const auto [input, output] = rh_functional(p, r, fam);
    if (output > best) {
      best = output;
      best_witness = Json{{"r", r}, {"input", input}, {"family", family_to_json(fam)}};
    }
    return true;
  };

  auto inv_norm_chi = [&](const Cube& q) {
    const auto cells = cells_of(g, q);
    std::vector<double> ones(cells.size(), 1.0);
    return 1.0 / detail::norm_on_cells(p, cells, ones, tol);
  };

  bool live = true;
  {
    const Cube big{{0, 0}, max_cube_side(g)};
    live = consider({big}, {inv_norm_chi(big)});
  }
  for (int s : detail::dyadic_tile_sides(g)) {
    if (!live) break;
    const auto tiles = detail::tiling(g, s);
    std::vector<double> ws(tiles.size());
    for (std::size_t i = 0; i < tiles.size(); ++i) ws[i] = inv_norm_chi(tiles[i]);
    live = consider(tiles, ws);
  }

  Rng rng(derive_seed(seed, 0x58));
  while (used < budget) {
    auto cubes = detail::random_disjoint_cubes(g, rng, 4);
    if (cubes.empty()) continue;
    std::vector<double> ws(cubes.size());
    const bool lognormal = rng.coin();
    for (std::size_t i = 0; i < cubes.size(); ++i)
      ws[i] = lognormal ? rng.log_uniform(1e-3, 1e3) : inv_norm_chi(cubes[i]);
    consider(cubes, ws);
  }

  rep.best_ratio = best;
  rep.witness = best_witness;
  rep.evaluations = used;
  rep.wall_ms = clock.ms();
  return rep;
}

// ---------------------------------------------------------------------------
// Operator norm estimation
// ---------------------------------------------------------------------------

enum class MaximalOp { HardyLittlewood, Median, ShiftedMedian, AveragingUniform };

struct OperatorParams {
  double lambda = 0.5;  // Median
  double tau = 0.5;     // ShiftedMedian
  double r = 0.5;       // ShiftedMedian
};

inline std::string operator_name(MaximalOp op) {
  switch (op) {
    case MaximalOp::HardyLittlewood: return "opnorm-M";
    case MaximalOp::Median: return "opnorm-median";
    case MaximalOp::ShiftedMedian: return "opnorm-shifted-median";
    case MaximalOp::AveragingUniform: return "opnorm-averaging";
  }
  return "opnorm";
}

/// Seeded lower bound on the operator norm on L^{p(.)}: maximizes ||Tf||/||f||
/// over a deterministic-then-random test family (indicators, step functions,
/// weighted-subset sums, coordinate-ascent perturbations). For the averaging
/// operator the maximization also runs over disjoint families.
inline ConditionReport operator_norm_estimate(MaximalOp op, const ExponentField& p,
                                              const OperatorParams& prm,
                                              std::uint64_t budget, std::uint64_t seed,
                                              double tol = 1e-12) {
  if (budget < 1) throw std::invalid_argument("operator_norm_estimate: budget must be >= 1");
  const Grid& g = p.grid();
  detail::Stopwatch clock;
  ConditionReport rep;
  rep.condition = operator_name(op);
  rep.params = Json{{"budget", budget}, {"seed", seed}};
  if (op == MaximalOp::Median) rep.params["lambda"] = prm.lambda;
  if (op == MaximalOp::ShiftedMedian) {
    rep.params["tau"] = prm.tau;
    rep.params["r"] = prm.r;
  }

  const CellMask whole = CellMask::full(g);
  Rng family_rng(derive_seed(seed, 0xFA));
  std::vector<WeightedFamily> canonical_families;
  for (int s : detail::dyadic_tile_sides(g)) {
    std::vector<WeightedCube> entries;
    for (const Cube& q : detail::tiling(g, s)) entries.push_back({q, 1.0, std::nullopt});
    canonical_families.emplace_back(g, std::move(entries));
  }
  std::size_t family_cursor = 0;

  auto next_family = [&]() -> WeightedFamily {
    if (family_cursor < canonical_families.size())
      return canonical_families[family_cursor++];
    auto cubes = detail::random_disjoint_cubes(g, family_rng, 4);
    if (cubes.empty()) cubes.push_back(Cube{{0, 0}, 1});
    std::vector<WeightedCube> entries;
    for (const Cube& q : cubes) entries.push_back({q, 1.0, std::nullopt});
    return WeightedFamily(g, std::move(entries));
  };

  double best = 0.0;
  GridFunction best_f(g, 0.0);
  std::optional<WeightedFamily> best_family;
  std::uint64_t used = 0;

  auto consider = [&](const GridFunction& f) -> bool {
    if (used >= budget) return false;
    ++used;
    const double nf = luxemburg_norm(f, p, whole, tol);
    if (nf == 0.0) return true;
    GridFunction tf(g, 0.0);
    std::optional<WeightedFamily> fam;
    switch (op) {
      case MaximalOp::HardyLittlewood: tf = hl_maximal(f); break;
      case MaximalOp::Median: tf = median_maximal(f, prm.lambda); break;
      case MaximalOp::ShiftedMedian: tf = shifted_median_maximal(f, prm.tau, prm.r); break;
      case MaximalOp::AveragingUniform: {
        fam = next_family();
        tf = averaging_operator(f, *fam);
        break;
      }
    }
    const double ratio = luxemburg_norm(tf, p, whole, tol) / nf;
    if (ratio > best) {
      best = ratio;
      best_f = f;
      best_family = fam;
    }
    return true;
  };

  bool live = consider(GridFunction(g, 1.0));

  // Sublevel / superlevel indicators of the exponent.
  if (live) {
    std::vector<double> levels = p.values();
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
    if (levels.size() > 8) {
      std::vector<double> picked;
      for (int i = 1; i <= 8; ++i)
        picked.push_back(levels[levels.size() * static_cast<std::size_t>(i) / 9]);
      levels = picked;
    }
    if (levels.size() > 1) {
      for (double theta : levels) {
        for (bool above : {false, true}) {
          GridFunction f(g, 0.0);
          bool any = false;
          for (int c = 0; c < g.cell_count(); ++c) {
            const bool in = above ? p[c] >= theta : p[c] <= theta;
            if (in) {
              f[c] = 1.0;
              any = true;
            }
          }
          if (!any) continue;
          live = consider(f);
          if (!live) break;
        }
        if (!live) break;
      }
    }
  }

  // Exhaustive indicators on very small grids.
  if (live && g.cell_count() <= 16) {
    const int n = g.cell_count();
    for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
      GridFunction f(g, 0.0);
      for (int c = 0; c < n; ++c)
        if (mask & (1u << c)) f[c] = 1.0;
      live = consider(f);
      if (!live) break;
    }
  }

  // Random candidates plus interleaved ascent.
  Rng rng(derive_seed(seed, 0x09));
  while (used < budget) {
    const int type = static_cast<int>(rng.below(3));
    GridFunction f(g, 0.0);
    if (type == 0) {
      bool any = false;
      for (int c = 0; c < g.cell_count(); ++c)
        if (rng.coin()) {
          f[c] = 1.0;
          any = true;
        }
      if (!any) f[static_cast<int>(rng.below(static_cast<std::uint64_t>(g.cell_count())))] = 1.0;
    } else if (type == 1) {
      for (int c = 0; c < g.cell_count(); ++c)
        f[c] = std::exp2(static_cast<double>(rng.uniform_int(-3, 3)));
    } else {
      const auto cubes = detail::random_disjoint_cubes(g, rng, 4);
      for (const Cube& q : cubes) {
        const double t = rng.log_uniform(1e-2, 1e2);
        const auto cells = cells_of(g, q);
        const int keep = 1 + static_cast<int>(rng.below(cells.size()));
        for (int j = 0; j < keep; ++j) f[cells[static_cast<std::size_t>(j)]] = t;
      }
      if (f.zero_on(whole)) f[0] = 1.0;
    }
    consider(f);

    if (used < budget && best > 0.0 && rng.coin(0.25)) {
      GridFunction trial = best_f;
      const int c = static_cast<int>(rng.below(static_cast<std::uint64_t>(g.cell_count())));
      trial[c] *= rng.coin() ? 2.0 : 0.5;
      consider(trial);
    }
  }

  rep.best_ratio = best;
  rep.evaluations = used;
  rep.witness = Json{{"f", function_to_json(best_f)}};
  if (best_family) rep.witness["family"] = family_to_json(*best_family);
  rep.wall_ms = clock.ms();
  return rep;
}

/// Recomputes the reported ratio of a search report from its witness alone.
inline double reevaluate_witness(const ExponentField& p, const ConditionReport& rep,
                                 double tol = 1e-12) {
  const Grid& g = p.grid();
  if (rep.condition == "ainfty") {
    const double lambda = rep.params.at("lambda").get<double>();
    const WeightedFamily fam = family_from_json(g, rep.witness.at("family"));
    return ainfty_ratio(p, lambda, fam, tol);
  }
  if (rep.condition == "apvar") {
    const Cube q = cube_from_json(rep.witness.at("cube"));
    const auto cells = rep.witness.at("cells").get<std::vector<int>>();
    const auto values = rep.witness.at("values").get<std::vector<double>>();
    GridFunction f(g, 0.0);
    for (std::size_t i = 0; i < cells.size(); ++i) f[cells[i]] = values[i];
    return apvar_ratio(p, q, f, tol);
  }
  if (rep.condition == "rh") {
    const double r = rep.params.at("r").get<double>();
    const WeightedFamily fam = family_from_json(g, rep.witness.at("family"));
    return rh_functional(p, r, fam).second;
  }
  if (rep.condition.rfind("opnorm", 0) == 0) {
    const GridFunction f = function_from_json(rep.witness.at("f"));
    require_same_grid(g, f.grid());
    const double nf = luxemburg_norm(f, p, CellMask::full(g), tol);
    if (nf == 0.0) return 0.0;
    GridFunction tf(g, 0.0);
    if (rep.condition == "opnorm-M") {
      tf = hl_maximal(f);
    } else if (rep.condition == "opnorm-median") {
      tf = median_maximal(f, rep.params.at("lambda").get<double>());
    } else if (rep.condition == "opnorm-shifted-median") {
      tf = shifted_median_maximal(f, rep.params.at("tau").get<double>(),
                                  rep.params.at("r").get<double>());
    } else if (rep.condition == "opnorm-averaging") {
      const WeightedFamily fam = family_from_json(g, rep.witness.at("family"));
      tf = averaging_operator(f, fam);
    } else {
      throw std::invalid_argument("reevaluate_witness: unknown operator report");
    }
    return luxemburg_norm(tf, p, CellMask::full(g), tol) / nf;
  }
  throw std::invalid_argument("reevaluate_witness: unknown condition " + rep.condition);
}

}  // namespace vexlab
