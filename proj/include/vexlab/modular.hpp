#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "vexlab/grid.hpp"

namespace vexlab {

// Cell-wise real values of a measurable function on a grid. Values must be
// finite; everything downstream (modulars, norms, operators) reads only these.
class GridFunction {
 public:
  explicit GridFunction(const Grid& g, double fill = 0.0)
      : grid_(g), values_(static_cast<std::size_t>(g.cell_count()), fill) {}

  GridFunction(const Grid& g, std::vector<double> values)
      : grid_(g), values_(std::move(values)) {
    if (values_.size() != static_cast<std::size_t>(g.cell_count()))
      throw std::invalid_argument("GridFunction: value count != cell count");
    for (double v : values_)
      if (!std::isfinite(v)) throw std::invalid_argument("GridFunction: non-finite value");
  }

  const Grid& grid() const { return grid_; }
  double operator[](int cell) const { return values_[static_cast<std::size_t>(cell)]; }
  double& operator[](int cell) { return values_[static_cast<std::size_t>(cell)]; }
  const std::vector<double>& values() const { return values_; }

  bool zero_on(const CellMask& region) const {
    for (int c = 0; c < grid_.cell_count(); ++c)
      if (region.contains(c) && values_[static_cast<std::size_t>(c)] != 0.0) return false;
    return true;
  }

 private:
  Grid grid_;
  std::vector<double> values_;
};

// Cell-wise exponent p(.) with 1 <= p(c) < inf enforced at construction.
class ExponentField {
 public:
  ExponentField(const Grid& g, std::vector<double> values)
      : grid_(g), p_(std::move(values)) {
    if (p_.size() != static_cast<std::size_t>(g.cell_count()))
      throw std::invalid_argument("ExponentField: value count != cell count");
    for (double v : p_) {
      if (!std::isfinite(v) || v < 1.0)
        throw std::invalid_argument("ExponentField: exponents must lie in [1, inf)");
    }
  }

  static ExponentField constant(const Grid& g, double p) {
    return ExponentField(g, std::vector<double>(static_cast<std::size_t>(g.cell_count()), p));
  }

  const Grid& grid() const { return grid_; }
  double operator[](int cell) const { return p_[static_cast<std::size_t>(cell)]; }
  const std::vector<double>& values() const { return p_; }

  /// essinf of p over the mask (min over cells). Mask must be nonempty.
  double p_minus(const CellMask& region) const {
    require_same_grid(grid_, region.grid());
    double m = std::numeric_limits<double>::infinity();
    for (int c = 0; c < grid_.cell_count(); ++c)
      if (region.contains(c)) m = std::min(m, p_[static_cast<std::size_t>(c)]);
    if (!std::isfinite(m)) throw std::invalid_argument("p_minus over empty region");
    return m;
  }

  /// esssup of p over the mask (max over cells). Mask must be nonempty.
  double p_plus(const CellMask& region) const {
    require_same_grid(grid_, region.grid());
    double m = -std::numeric_limits<double>::infinity();
    for (int c = 0; c < grid_.cell_count(); ++c)
      if (region.contains(c)) m = std::max(m, p_[static_cast<std::size_t>(c)]);
    if (!std::isfinite(m)) throw std::invalid_argument("p_plus over empty region");
    return m;
  }

  double p_minus() const { return *std::min_element(p_.begin(), p_.end()); }
  double p_plus() const { return *std::max_element(p_.begin(), p_.end()); }

  GridFunction as_function() const { return GridFunction(grid_, p_); }

 private:
  Grid grid_;
  std::vector<double> p_;
};

namespace detail {

// Modular of (samples/lambda) over explicit samples: cell_measure * sum |v/lambda|^p.
inline double modular_of_samples(std::span<const double> vals, std::span<const double> exps,
                                 double cell_measure, double lambda) {
  double sum = 0.0;
  for (std::size_t i = 0; i < vals.size(); ++i) {
    const double a = std::abs(vals[i]);
    if (a != 0.0) sum += std::pow(a / lambda, exps[i]);
  }
  return cell_measure * sum;
}

// Luxemburg norm from explicit (value, exponent) samples. The modular/norm
// sandwich supplies a guaranteed bracket; bisection then localizes the root of
// lambda -> modular(f/lambda) = 1, which is strictly decreasing for f != 0.
inline double norm_of_samples(std::span<const double> vals, std::span<const double> exps,
                              double cell_measure, double tol) {
  double rho = 0.0;
  double p_min = std::numeric_limits<double>::infinity();
  double p_max = 1.0;
  for (std::size_t i = 0; i < vals.size(); ++i) {
    const double a = std::abs(vals[i]);
    if (a != 0.0) {
      rho += std::pow(a, exps[i]);
      p_min = std::min(p_min, exps[i]);
      p_max = std::max(p_max, exps[i]);
    }
  }
  rho *= cell_measure;
  if (rho == 0.0) return 0.0;

  double lo = rho <= 1.0 ? std::pow(rho, 1.0 / p_min) : std::pow(rho, 1.0 / p_max);
  double hi = rho <= 1.0 ? std::pow(rho, 1.0 / p_max) : std::pow(rho, 1.0 / p_min);
  if (lo == hi) return lo;  // constant exponent: the bracket is the norm
  if (lo > hi) std::swap(lo, hi);

  // Guard the analytic bracket against rounding in the endpoints.
  for (int guard = 0; guard < 64 && modular_of_samples(vals, exps, cell_measure, lo) < 1.0;
       ++guard)
    lo *= 0.5;
  for (int guard = 0; guard < 64 && modular_of_samples(vals, exps, cell_measure, hi) > 1.0;
       ++guard)
    hi *= 2.0;

  while (hi - lo > tol * std::max(1.0, lo)) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;  // bracket exhausted in floating point
    if (modular_of_samples(vals, exps, cell_measure, mid) > 1.0)
      lo = mid;
    else
      hi = mid;
  }
  return hi;
}

inline void gather_region(const GridFunction& f, const ExponentField& p,
                          const CellMask& region, std::vector<double>& vals,
                          std::vector<double>& exps) {
  vals.clear();
  exps.clear();
  for (int c = 0; c < f.grid().cell_count(); ++c) {
    if (region.contains(c)) {
      vals.push_back(f[c]);
      exps.push_back(p[c]);
    }
  }
}

}  // namespace detail

/// rho(f) = sum_{c in region} |f(c)|^{p(c)} * h^dim.
inline double modular(const GridFunction& f, const ExponentField& p, const CellMask& region) {
  require_same_grid(f.grid(), p.grid());
  require_same_grid(f.grid(), region.grid());
  double sum = 0.0;
  for (int c = 0; c < f.grid().cell_count(); ++c) {
    if (region.contains(c)) {
      const double a = std::abs(f[c]);
      if (a != 0.0) sum += std::pow(a, p[c]);
    }
  }
  return f.grid().cell_measure() * sum;
}

inline double modular(const GridFunction& f, const ExponentField& p) {
  return modular(f, p, CellMask::full(f.grid()));
}

/// Luxemburg norm inf{lambda > 0 : modular(f/lambda) <= 1} on the region,
/// accurate to tol * max(1, norm). Returns 0 for f == 0 on the region.
inline double luxemburg_norm(const GridFunction& f, const ExponentField& p,
                             const CellMask& region, double tol = 1e-12) {
  require_same_grid(f.grid(), p.grid());
  require_same_grid(f.grid(), region.grid());
  if (!(tol > 0.0)) throw std::invalid_argument("luxemburg_norm: tol must be positive");
  std::vector<double> vals, exps;
  detail::gather_region(f, p, region, vals, exps);
  return detail::norm_of_samples(vals, exps, f.grid().cell_measure(), tol);
}

inline double luxemburg_norm(const GridFunction& f, const ExponentField& p) {
  return luxemburg_norm(f, p, CellMask::full(f.grid()));
}

/// p'(x) = p(x)/(p(x)-1). Requires p_- > 1 everywhere.
inline ExponentField dual_exponent(const ExponentField& p) {
  if (p.p_minus() <= 1.0)
    throw std::domain_error("dual exponent undefined: p_- = 1 (p' unbounded)");
  std::vector<double> q(p.values().size());
  for (std::size_t i = 0; i < q.size(); ++i)
    q[i] = p.values()[i] / (p.values()[i] - 1.0);
  return ExponentField(p.grid(), std::move(q));
}

struct SandwichReport {
  double norm = 0.0;
  double modular_value = 0.0;
  double lower = 0.0;  // rho^{1/p_+} if norm > 1 else rho^{1/p_-}
  double upper = 0.0;
  bool lower_holds = true;
  bool upper_holds = true;
};

/// Verifies the modular/norm sandwich on the region, with slack 10*tol.
inline SandwichReport check_modular_norm_sandwich(const GridFunction& f,
                                                  const ExponentField& p,
                                                  const CellMask& region,
                                                  double tol = 1e-12) {
  if (region.empty()) throw std::invalid_argument("sandwich: empty region");
  SandwichReport r;
  r.norm = luxemburg_norm(f, p, region, tol);
  r.modular_value = modular(f, p, region);
  if (r.modular_value == 0.0) return r;
  const double pm = p.p_minus(region), pp = p.p_plus(region);
  if (r.norm > 1.0) {
    r.lower = std::pow(r.modular_value, 1.0 / pp);
    r.upper = std::pow(r.modular_value, 1.0 / pm);
  } else {
    r.lower = std::pow(r.modular_value, 1.0 / pm);
    r.upper = std::pow(r.modular_value, 1.0 / pp);
  }
  const double slack = 10.0 * tol * std::max(1.0, r.norm);
  r.lower_holds = r.lower <= r.norm + slack;
  r.upper_holds = r.norm <= r.upper + slack;
  return r;
}

struct HolderReport {
  double pairing = 0.0;
  double norm_f = 0.0;
  double norm_g_dual = 0.0;
  double bound = 0.0;
  double ratio = 0.0;  // pairing / (norm_f * norm_g_dual), the empirical constant
  bool holds = true;
};

/// Checks int |fg| <= constant * ||f||_{p(.)} * ||g||_{p'(.)} on the region.
/// The constant is configurable; 2 is always admissible for bounded exponents.
inline HolderReport holder_pairing_check(const GridFunction& f, const GridFunction& g,
                                         const ExponentField& p, const CellMask& region,
                                         double constant = 2.0, double tol = 1e-12) {
  require_same_grid(f.grid(), g.grid());
  const ExponentField pd = dual_exponent(p);
  HolderReport r;
  double sum = 0.0;
  for (int c = 0; c < f.grid().cell_count(); ++c)
    if (region.contains(c)) sum += std::abs(f[c] * g[c]);
  r.pairing = f.grid().cell_measure() * sum;
  r.norm_f = luxemburg_norm(f, p, region, tol);
  r.norm_g_dual = luxemburg_norm(g, pd, region, tol);
  r.bound = constant * r.norm_f * r.norm_g_dual;
  r.ratio = (r.norm_f > 0.0 && r.norm_g_dual > 0.0)
                ? r.pairing / (r.norm_f * r.norm_g_dual)
                : 0.0;
  r.holds = r.pairing <= r.bound + tol * std::max(1.0, r.bound);
  return r;
}

}  // namespace vexlab
