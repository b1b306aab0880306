#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "vexlab/grid.hpp"
#include "vexlab/modular.hpp"

namespace vexlab {

// Pairwise disjoint cubes with nonnegative weights t_Q and optional subsets
// E_Q inside each cube.
struct WeightedCube {
  Cube cube;
  double weight = 0.0;
  std::optional<CellMask> subset;
};

class WeightedFamily {
 public:
  WeightedFamily(const Grid& g, std::vector<WeightedCube> entries)
      : grid_(g), entries_(std::move(entries)) {
    CellMask seen(g);
    for (const auto& e : entries_) {
      require_cube_in_grid(g, e.cube);
      if (!(e.weight >= 0.0) || !std::isfinite(e.weight))
        throw std::invalid_argument("WeightedFamily: weight must be finite and >= 0");
      for (int c : cells_of(g, e.cube)) {
        if (seen.contains(c)) throw std::invalid_argument("WeightedFamily: overlapping cubes");
        seen.set(c);
      }
      if (e.subset) {
        require_same_grid(g, e.subset->grid());
        if (!e.subset->is_subset_of(CellMask::of_cube(g, e.cube)))
          throw std::invalid_argument("WeightedFamily: E_Q not a subset of its cube");
      }
    }
  }

  const Grid& grid() const { return grid_; }
  const std::vector<WeightedCube>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

  bool all_subsets_present() const {
    for (const auto& e : entries_)
      if (!e.subset) return false;
    return true;
  }

  /// Sum of t_Q chi_Q.
  GridFunction weighted_indicators() const {
    GridFunction out(grid_, 0.0);
    for (const auto& e : entries_)
      for (int c : cells_of(grid_, e.cube)) out[c] = e.weight;
    return out;
  }

  /// Sum of t_Q chi_{E_Q}; requires every subset to be present.
  GridFunction weighted_subsets() const {
    GridFunction out(grid_, 0.0);
    for (const auto& e : entries_) {
      if (!e.subset) throw std::invalid_argument("WeightedFamily: missing E_Q");
      for (int c : e.subset->cells()) out[c] = e.weight;
    }
    return out;
  }

 private:
  Grid grid_;
  std::vector<WeightedCube> entries_;
};

namespace detail {

// Prefix-sum table (1D) / summed-area table (2D) of |f| or f. Window sums
// come out of the standard inclusion-exclusion formula; every consumer that
// must agree bit-for-bit (fast maximal vs. reference enumeration) goes through
// the same recurrence.
struct WindowSums {
  int dim = 1;
  int nx = 0, ny = 0;
  std::vector<double> table;  // (nx+1) x (ny+1) for 2D, (nx+1) for 1D

  static WindowSums build(const GridFunction& f, bool absolute) {
    const Grid& g = f.grid();
    WindowSums w;
    w.dim = g.dim();
    w.nx = g.extent(0);
    w.ny = g.extent(1);
    if (w.dim == 1) {
      w.table.assign(static_cast<std::size_t>(w.nx) + 1, 0.0);
      for (int x = 0; x < w.nx; ++x) {
        const double v = absolute ? std::abs(f[x]) : f[x];
        w.table[static_cast<std::size_t>(x) + 1] = w.table[static_cast<std::size_t>(x)] + v;
      }
    } else {
      const int sy = w.ny + 1;
      w.table.assign(static_cast<std::size_t>(w.nx + 1) * sy, 0.0);
      for (int x = 0; x < w.nx; ++x) {
        for (int y = 0; y < w.ny; ++y) {
          const double v =
              absolute ? std::abs(f[x * w.ny + y]) : f[x * w.ny + y];
          w.table[static_cast<std::size_t>(x + 1) * sy + (y + 1)] =
              v + w.table[static_cast<std::size_t>(x) * sy + (y + 1)] +
              w.table[static_cast<std::size_t>(x + 1) * sy + y] -
              w.table[static_cast<std::size_t>(x) * sy + y];
        }
      }
    }
    return w;
  }

  double window_sum(int ax, int ay, int s) const {
    if (dim == 1) return table[static_cast<std::size_t>(ax + s)] - table[static_cast<std::size_t>(ax)];
    const int sy = ny + 1;
    return table[static_cast<std::size_t>(ax + s) * sy + (ay + s)] -
           table[static_cast<std::size_t>(ax) * sy + (ay + s)] -
           table[static_cast<std::size_t>(ax + s) * sy + ay] +
           table[static_cast<std::size_t>(ax) * sy + ay];
  }
};

// out[c * out_stride] = max over anchors a with c - hi_off <= a <= c - lo_off
// (clipped to [0, m)) of b[a * b_stride], for c in [0, n). Monotone-deque
// sliding maximum; cells whose anchor window is empty get fallback.
inline void sliding_anchor_max_offsets(const double* b, int b_stride, int m, int n,
                                       int lo_off, int hi_off, double fallback,
                                       double* out, int out_stride,
                                       std::vector<int>& deq) {
  deq.resize(static_cast<std::size_t>(m));
  int head = 0, tail = 0, next_a = 0;
  for (int c = 0; c < n; ++c) {
    const int hi = std::min(c - lo_off, m - 1);
    const int lo = std::max(0, c - hi_off);
    while (next_a <= hi) {
      const double v = b[static_cast<std::size_t>(next_a) * b_stride];
      while (tail > head && b[static_cast<std::size_t>(deq[tail - 1]) * b_stride] <= v) --tail;
      deq[tail++] = next_a;
      ++next_a;
    }
    while (head < tail && deq[head] < lo) ++head;
    out[static_cast<std::size_t>(c) * out_stride] =
        head < tail ? b[static_cast<std::size_t>(deq[head]) * b_stride] : fallback;
  }
}

inline void sliding_anchor_max(const double* b, int b_stride, int m, int n, int s,
                               double* out, int out_stride, std::vector<int>& deq) {
  sliding_anchor_max_offsets(b, b_stride, m, n, 0, s - 1, 0.0, out, out_stride, deq);
}

// Fenwick tree over value ranks: counted inserts/removals plus k-th smallest
// selection. All-integer, so window order statistics are exact.
class RankFenwick {
 public:
  explicit RankFenwick(int ranks) : n_(ranks), tree_(static_cast<std::size_t>(ranks) + 1, 0) {
    top_ = 1;
    while (top_ * 2 <= n_) top_ *= 2;
  }

  void add(int rank, int delta) {
    for (int i = rank + 1; i <= n_; i += i & -i) tree_[static_cast<std::size_t>(i)] += delta;
  }

  /// 0-based rank of the k-th smallest stored entry (k is 1-based).
  int kth(int k) const {
    int pos = 0;
    for (int pw = top_; pw > 0; pw >>= 1) {
      const int next = pos + pw;
      if (next <= n_ && tree_[static_cast<std::size_t>(next)] < k) {
        pos = next;
        k -= tree_[static_cast<std::size_t>(next)];
      }
    }
    return pos;
  }

 private:
  int n_;
  int top_;
  std::vector<int> tree_;
};

}  // namespace detail

/// Non-increasing rearrangement of f restricted to Q, evaluated at t: the
/// (floor(t / h^dim) + 1)-th largest |f| value on Q. For t >= |Q| the value is
/// 0 by convention. Requires t >= 0.
inline double rearrangement_value(const GridFunction& f, const Cube& q, double t) {
  const Grid& g = f.grid();
  require_cube_in_grid(g, q);
  if (t < 0.0) throw std::invalid_argument("rearrangement_value: t must be >= 0");
  if (t >= cube_measure(g, q)) return 0.0;
  const int cnt = cube_cell_count(g, q);
  const auto rank = static_cast<long long>(std::floor(t / g.cell_measure()));
  if (rank + 1 > cnt) return 0.0;
  std::vector<double> buf;
  buf.reserve(static_cast<std::size_t>(cnt));
  for (int c : cells_of(g, q)) buf.push_back(std::abs(f[c]));
  auto nth = buf.begin() + rank;
  std::nth_element(buf.begin(), nth, buf.end(), std::greater<double>());
  return *nth;
}

/// Hardy-Littlewood maximal function: at each cell, the exact maximum of the
/// mean of |f| over all grid-aligned cubes containing it. Window averages come
/// from prefix/summed-area tables; the per-side maximization is a sliding
/// window maximum over the anchor-indexed average array.
inline GridFunction hl_maximal(const GridFunction& f) {
  const Grid& g = f.grid();
  GridFunction out(g, 0.0);
  const auto sums = detail::WindowSums::build(f, /*absolute=*/true);
  std::vector<int> deq;

  if (g.dim() == 1) {
    const int n = g.extent(0);
    std::vector<double> b(static_cast<std::size_t>(n));
    std::vector<double> cand(static_cast<std::size_t>(n));
    for (int s = 1; s <= n; ++s) {
      const int m = n - s + 1;
      for (int a = 0; a < m; ++a)
        b[static_cast<std::size_t>(a)] = sums.window_sum(a, 0, s) / static_cast<double>(s);
      detail::sliding_anchor_max(b.data(), 1, m, n, s, cand.data(), 1, deq);
      for (int c = 0; c < n; ++c) out[c] = std::max(out[c], cand[static_cast<std::size_t>(c)]);
    }
    return out;
  }

  const int nx = g.extent(0), ny = g.extent(1);
  std::vector<double> b, rows, cand(static_cast<std::size_t>(nx));
  for (int s = 1; s <= std::min(nx, ny); ++s) {
    const int mx = nx - s + 1, my = ny - s + 1;
    const double cells = static_cast<double>(s * s);
    b.assign(static_cast<std::size_t>(mx) * my, 0.0);
    for (int ax = 0; ax < mx; ++ax)
      for (int ay = 0; ay < my; ++ay)
        b[static_cast<std::size_t>(ax) * my + ay] = sums.window_sum(ax, ay, s) / cells;
    // Pass 1: per anchor row, maximize over ay; rows[ax][y], y over cells.
    rows.assign(static_cast<std::size_t>(mx) * ny, 0.0);
    for (int ax = 0; ax < mx; ++ax)
      detail::sliding_anchor_max(b.data() + static_cast<std::size_t>(ax) * my, 1, my, ny, s,
                                 rows.data() + static_cast<std::size_t>(ax) * ny, 1, deq);
    // Pass 2: per cell column, maximize over ax.
    for (int y = 0; y < ny; ++y) {
      detail::sliding_anchor_max(rows.data() + y, ny, mx, nx, s, cand.data(), 1, deq);
      for (int x = 0; x < nx; ++x) {
        double& o = out[x * ny + y];
        o = std::max(o, cand[static_cast<std::size_t>(x)]);
      }
    }
  }
  return out;
}

namespace detail {

// Shared core of the median-type operators. For each cube side, the window
// order statistic (the rank over |f| on the window fixed by frac) is
// maintained under a serpentine anchor walk with a Fenwick tree over value
// ranks; the per-cell supremum over admissible anchors is then a sliding
// window maximum, with offsets restricted to the cube core for the shifted
// variant. Rank arithmetic is all-integer, so the result equals per-cube
// order-statistic evaluation exactly.
inline GridFunction median_sweep(const GridFunction& f, double frac,
                                 std::optional<double> core_r) {
  const Grid& g = f.grid();
  GridFunction out(g, 0.0);
  const double hd = g.cell_measure();
  const int nx = g.extent(0);
  const int ny = g.extent(1);

  // value-rank compression of |f|
  std::vector<double> levels(f.values());
  for (auto& v : levels) v = std::abs(v);
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  std::vector<int> rank_of(static_cast<std::size_t>(g.cell_count()));
  for (int c = 0; c < g.cell_count(); ++c)
    rank_of[static_cast<std::size_t>(c)] = static_cast<int>(
        std::lower_bound(levels.begin(), levels.end(), std::abs(f[c])) - levels.begin());

  std::vector<double> stats, rows, cand(static_cast<std::size_t>(std::max(nx, ny)));
  std::vector<int> deq;

  for (int s = 1; s <= max_cube_side(g); ++s) {
    const int cnt = g.dim() == 1 ? s : s * s;
    const double t = frac * cube_measure(g, Cube{{0, 0}, s});
    const auto rank = static_cast<long long>(std::floor(t / hd));
    if (rank + 1 > cnt) continue;  // rearrangement value 0 for this side
    const int kth_smallest = cnt - static_cast<int>(rank);

    int plo = 0, phi = s - 1;  // admissible anchor offsets per axis
    if (core_r) {
      std::tie(plo, phi) = core_axis_offsets(s, *core_r);
      if (plo > phi) continue;
    }

    const int wx = s;                       // window span along axis 0
    const int wy = g.dim() == 2 ? s : 1;    // and along axis 1
    const int mx = nx - wx + 1;
    const int my = g.dim() == 2 ? ny - wy + 1 : 1;
    stats.assign(static_cast<std::size_t>(mx) * my, 0.0);

    RankFenwick fen(static_cast<int>(levels.size()));
    auto cell_rank = [&](int x, int y) {
      return rank_of[static_cast<std::size_t>(g.dim() == 1 ? x : x * ny + y)];
    };
    for (int x = 0; x < wx; ++x)
      for (int y = 0; y < wy; ++y) fen.add(cell_rank(x, y), 1);

    // serpentine anchor walk: one window, two cells in/out along y, one row
    // in/out along x
    int ax = 0, ay = 0, dir = 1;
    while (true) {
      stats[static_cast<std::size_t>(ax) * my + ay] =
          levels[static_cast<std::size_t>(fen.kth(kth_smallest))];
      if (ay + dir >= 0 && ay + dir < my) {
        const int y_out = dir > 0 ? ay : ay + wy - 1;
        const int y_in = dir > 0 ? ay + wy : ay - 1;
        for (int x = ax; x < ax + wx; ++x) {
          fen.add(cell_rank(x, y_out), -1);
          fen.add(cell_rank(x, y_in), 1);
        }
        ay += dir;
      } else if (ax + 1 < mx) {
        for (int y = ay; y < ay + wy; ++y) {
          fen.add(cell_rank(ax, y), -1);
          fen.add(cell_rank(ax + wx, y), 1);
        }
        ++ax;
        dir = -dir;
      } else {
        break;
      }
    }

    // reduce anchor stats to cells: max over anchors whose (core) offsets
    // reach the cell; empty windows fall back below 0 and never win
    if (g.dim() == 1) {
      detail::sliding_anchor_max_offsets(stats.data(), 1, mx, nx, plo, phi, -1.0,
                                         cand.data(), 1, deq);
      for (int c = 0; c < nx; ++c) out[c] = std::max(out[c], cand[static_cast<std::size_t>(c)]);
    } else {
      rows.assign(static_cast<std::size_t>(mx) * ny, 0.0);
      for (int axr = 0; axr < mx; ++axr)
        detail::sliding_anchor_max_offsets(stats.data() + static_cast<std::size_t>(axr) * my,
                                           1, my, ny, plo, phi, -1.0,
                                           rows.data() + static_cast<std::size_t>(axr) * ny, 1,
                                           deq);
      for (int y = 0; y < ny; ++y) {
        detail::sliding_anchor_max_offsets(rows.data() + y, ny, mx, nx, plo, phi, -1.0,
                                           cand.data(), 1, deq);
        for (int x = 0; x < nx; ++x) {
          double& o = out[x * ny + y];
          o = std::max(o, cand[static_cast<std::size_t>(x)]);
        }
      }
    }
  }
  return out;
}

}  // namespace detail

/// lambda-median maximal operator: sup over cubes containing the cell of the
/// rearrangement of f on the cube at lambda * |Q|.
inline GridFunction median_maximal(const GridFunction& f, double lambda) {
  if (!(lambda > 0.0 && lambda < 1.0))
    throw std::invalid_argument("median_maximal: lambda must be in (0,1)");
  return detail::median_sweep(f, lambda, std::nullopt);
}

/// Shifted variant: sup over cubes Q whose core (concentric factor r) contains
/// the cell, of the rearrangement at tau * |Q|.
inline GridFunction shifted_median_maximal(const GridFunction& f, double tau, double r) {
  if (!(tau > 0.0 && tau < 1.0))
    throw std::invalid_argument("shifted_median_maximal: tau must be in (0,1)");
  if (!(r > 0.0 && r < 1.0))
    throw std::invalid_argument("shifted_median_maximal: r must be in (0,1)");
  return detail::median_sweep(f, tau, r);
}

/// Averaging operator: f replaced by its mean on each cube of the family,
/// zero off the union.
inline GridFunction averaging_operator(const GridFunction& f, const WeightedFamily& family) {
  require_same_grid(f.grid(), family.grid());
  const Grid& g = f.grid();
  GridFunction out(g, 0.0);
  for (const auto& e : family.entries()) {
    const auto cells = cells_of(g, e.cube);
    double sum = 0.0;
    for (int c : cells) sum += f[c];
    const double avg = sum / static_cast<double>(cells.size());
    for (int c : cells) out[c] = avg;
  }
  return out;
}

namespace detail {

// Bottom-up sums of f over the dyadic blocks of a power-of-two cube; level l
// holds blocks of side 2^l in local row-major order. Shared by the dyadic
// maximal operator and the Calderon-Zygmund decomposition so their averages
// agree exactly.
struct DyadicSums {
  int dim = 1;
  int side = 1;
  int levels = 0;  // side == 2^levels
  std::vector<std::vector<double>> sums;

  static DyadicSums build(const GridFunction& f, const Cube& q, bool absolute) {
    const Grid& g = f.grid();
    require_cube_in_grid(g, q);
    if ((q.side & (q.side - 1)) != 0)
      throw std::invalid_argument("dyadic operations need a power-of-two cube side");
    DyadicSums d;
    d.dim = g.dim();
    d.side = q.side;
    d.levels = 0;
    while ((1 << d.levels) < q.side) ++d.levels;
    d.sums.resize(static_cast<std::size_t>(d.levels) + 1);

    const int n0 = q.side;
    auto& base = d.sums[0];
    if (d.dim == 1) {
      base.resize(static_cast<std::size_t>(n0));
      for (int i = 0; i < n0; ++i) {
        const double v = f[q.anchor[0] + i];
        base[static_cast<std::size_t>(i)] = absolute ? std::abs(v) : v;
      }
    } else {
      base.resize(static_cast<std::size_t>(n0) * n0);
      for (int i = 0; i < n0; ++i)
        for (int j = 0; j < n0; ++j) {
          const double v = f[(q.anchor[0] + i) * g.extent(1) + (q.anchor[1] + j)];
          base[static_cast<std::size_t>(i) * n0 + j] = absolute ? std::abs(v) : v;
        }
    }
    for (int l = 0; l < d.levels; ++l) {
      const int n = q.side >> (l + 1);  // blocks per axis at level l+1
      const int m = q.side >> l;
      auto& up = d.sums[static_cast<std::size_t>(l) + 1];
      const auto& lo = d.sums[static_cast<std::size_t>(l)];
      if (d.dim == 1) {
        up.resize(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i)
          up[static_cast<std::size_t>(i)] = lo[static_cast<std::size_t>(2 * i)] +
                                            lo[static_cast<std::size_t>(2 * i) + 1];
      } else {
        up.resize(static_cast<std::size_t>(n) * n);
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j)
            up[static_cast<std::size_t>(i) * n + j] =
                lo[static_cast<std::size_t>(2 * i) * m + 2 * j] +
                lo[static_cast<std::size_t>(2 * i) * m + (2 * j + 1)] +
                lo[static_cast<std::size_t>(2 * i + 1) * m + 2 * j] +
                lo[static_cast<std::size_t>(2 * i + 1) * m + (2 * j + 1)];
      }
    }
    return d;
  }

  int blocks_per_axis(int level) const { return side >> level; }

  double block_avg(int level, int bx, int by) const {
    const int n = blocks_per_axis(level);
    const double cnt = dim == 1 ? static_cast<double>(1 << level)
                                : static_cast<double>((1 << level) * (1 << level));
    const std::size_t idx = dim == 1 ? static_cast<std::size_t>(bx)
                                     : static_cast<std::size_t>(bx) * n + by;
    return sums[static_cast<std::size_t>(level)][idx] / cnt;
  }
};

}  // namespace detail

/// Dyadic maximal operator restricted to Q (side a power of two): at each cell
/// of Q, the max of the mean of |f| over the dyadic subcubes of Q containing
/// the cell, Q itself and the single cell included. Zero off Q.
inline GridFunction dyadic_maximal_on_cube(const GridFunction& f, const Cube& q) {
  const Grid& g = f.grid();
  const auto d = detail::DyadicSums::build(f, q, /*absolute=*/true);
  GridFunction out(g, 0.0);

  // Top-down: best over ancestors, then combine with own block average.
  std::vector<double> best, next;
  best = {d.block_avg(d.levels, 0, 0)};
  for (int l = d.levels - 1; l >= 0; --l) {
    const int n = d.blocks_per_axis(l);
    if (g.dim() == 1) {
      next.resize(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i)
        next[static_cast<std::size_t>(i)] =
            std::max(best[static_cast<std::size_t>(i / 2)], d.block_avg(l, i, 0));
    } else {
      next.resize(static_cast<std::size_t>(n) * n);
      const int np = n / 2;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          next[static_cast<std::size_t>(i) * n + j] =
              std::max(best[static_cast<std::size_t>(i / 2) * np + j / 2],
                       d.block_avg(l, i, j));
    }
    best.swap(next);
  }
  if (g.dim() == 1) {
    for (int i = 0; i < q.side; ++i) out[q.anchor[0] + i] = best[static_cast<std::size_t>(i)];
  } else {
    for (int i = 0; i < q.side; ++i)
      for (int j = 0; j < q.side; ++j)
        out[(q.anchor[0] + i) * g.extent(1) + (q.anchor[1] + j)] =
            best[static_cast<std::size_t>(i) * q.side + j];
  }
  return out;
}

}  // namespace vexlab
