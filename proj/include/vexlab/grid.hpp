#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace vexlab {

// Uniform grid on an axis-parallel box in dimension 1 or 2. Cells are indexed
// row-major: index = x * extent(1) + y (for 1D, extent(1) == 1). The box plays
// the role of the ambient space; cubes never extend outside it.
class Grid {
 public:
  Grid(int dim, std::array<int, 2> extent, double cell_side)
      : dim_(dim), extent_(extent), cell_side_(cell_side) {
    if (dim != 1 && dim != 2) throw std::invalid_argument("Grid: dim must be 1 or 2");
    if (dim == 1) extent_[1] = 1;
    if (extent_[0] < 1 || extent_[1] < 1)
      throw std::invalid_argument("Grid: extents must be positive");
    if (!(cell_side > 0.0) || !std::isfinite(cell_side))
      throw std::invalid_argument("Grid: cell side must be positive and finite");
  }

  static Grid line(int nx, double h = 1.0) { return Grid(1, {nx, 1}, h); }
  static Grid plane(int nx, int ny, double h = 1.0) { return Grid(2, {nx, ny}, h); }

  int dim() const { return dim_; }
  int extent(int axis) const { return extent_[axis]; }
  int cell_count() const { return extent_[0] * extent_[1]; }
  double cell_side() const { return cell_side_; }

  /// h^dim.
  double cell_measure() const {
    return dim_ == 1 ? cell_side_ : cell_side_ * cell_side_;
  }

  int index_of(std::array<int, 2> c) const { return c[0] * extent_[1] + c[1]; }
  std::array<int, 2> coords_of(int index) const {
    return {index / extent_[1], index % extent_[1]};
  }

  bool same_as(const Grid& o) const {
    return dim_ == o.dim_ && extent_ == o.extent_ && cell_side_ == o.cell_side_;
  }

 private:
  int dim_;
  std::array<int, 2> extent_;
  double cell_side_;
};

inline void require_same_grid(const Grid& a, const Grid& b) {
  if (!a.same_as(b)) throw std::invalid_argument("mismatched grids");
}

// Grid-aligned axis-parallel cube: anchor cell plus side length in cells.
struct Cube {
  std::array<int, 2> anchor{0, 0};
  int side = 1;

  bool operator==(const Cube& o) const = default;
};

inline bool cube_in_grid(const Grid& g, const Cube& q) {
  if (q.side < 1) return false;
  for (int axis = 0; axis < g.dim(); ++axis) {
    if (q.anchor[axis] < 0 || q.anchor[axis] + q.side > g.extent(axis)) return false;
  }
  if (g.dim() == 1 && q.anchor[1] != 0) return false;
  return true;
}

inline void require_cube_in_grid(const Grid& g, const Cube& q) {
  if (!cube_in_grid(g, q)) throw std::invalid_argument("cube outside grid");
}

/// Number of cells in the cube, side^dim.
inline int cube_cell_count(const Grid& g, const Cube& q) {
  return g.dim() == 1 ? q.side : q.side * q.side;
}

/// |Q| = (side*h)^dim. Computed by explicit multiplication, not pow, so that
/// equal cubes always produce bit-identical measures.
inline double cube_measure(const Grid& g, const Cube& q) {
  const double edge = static_cast<double>(q.side) * g.cell_side();
  return g.dim() == 1 ? edge : edge * edge;
}

/// Largest cube side that fits in the box.
inline int max_cube_side(const Grid& g) {
  return g.dim() == 1 ? g.extent(0) : std::min(g.extent(0), g.extent(1));
}

/// Cells of the cube in row-major order.
inline std::vector<int> cells_of(const Grid& g, const Cube& q) {
  require_cube_in_grid(g, q);
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(cube_cell_count(g, q)));
  if (g.dim() == 1) {
    for (int x = q.anchor[0]; x < q.anchor[0] + q.side; ++x) out.push_back(x);
  } else {
    for (int x = q.anchor[0]; x < q.anchor[0] + q.side; ++x)
      for (int y = q.anchor[1]; y < q.anchor[1] + q.side; ++y)
        out.push_back(g.index_of({x, y}));
  }
  return out;
}

inline bool cube_contains_cell(const Grid& g, const Cube& q, int cell) {
  const auto c = g.coords_of(cell);
  for (int axis = 0; axis < g.dim(); ++axis) {
    if (c[axis] < q.anchor[axis] || c[axis] >= q.anchor[axis] + q.side) return false;
  }
  return true;
}

/// Every grid-aligned cube inside the box that contains the given cell,
/// ordered by side, then anchor (row-major).
inline std::vector<Cube> enumerate_cubes_containing(const Grid& g, int cell) {
  if (cell < 0 || cell >= g.cell_count())
    throw std::invalid_argument("cell outside grid");
  const auto c = g.coords_of(cell);
  std::vector<Cube> out;
  for (int s = 1; s <= max_cube_side(g); ++s) {
    const int ax_lo = std::max(0, c[0] - s + 1);
    const int ax_hi = std::min(c[0], g.extent(0) - s);
    if (g.dim() == 1) {
      for (int ax = ax_lo; ax <= ax_hi; ++ax) out.push_back(Cube{{ax, 0}, s});
    } else {
      const int ay_lo = std::max(0, c[1] - s + 1);
      const int ay_hi = std::min(c[1], g.extent(1) - s);
      for (int ax = ax_lo; ax <= ax_hi; ++ax)
        for (int ay = ay_lo; ay <= ay_hi; ++ay) out.push_back(Cube{{ax, ay}, s});
    }
  }
  return out;
}

/// Visit all grid-aligned cubes inside the box, ordered by side then anchor.
template <typename Fn>
inline void for_each_cube(const Grid& g, Fn&& fn) {
  for (int s = 1; s <= max_cube_side(g); ++s) {
    for (int ax = 0; ax + s <= g.extent(0); ++ax) {
      if (g.dim() == 1) {
        fn(Cube{{ax, 0}, s});
      } else {
        for (int ay = 0; ay + s <= g.extent(1); ++ay) fn(Cube{{ax, ay}, s});
      }
    }
  }
}

// Membership indicator per cell of one grid. Masks never outlive their grid
// semantics: every consumer revalidates grid compatibility.
class CellMask {
 public:
  explicit CellMask(const Grid& g)
      : grid_(g), bits_(static_cast<std::size_t>(g.cell_count()), 0) {}

  static CellMask full(const Grid& g) {
    CellMask m(g);
    std::fill(m.bits_.begin(), m.bits_.end(), 1);
    return m;
  }

  static CellMask of_cube(const Grid& g, const Cube& q) {
    CellMask m(g);
    for (int c : cells_of(g, q)) m.bits_[static_cast<std::size_t>(c)] = 1;
    return m;
  }

  static CellMask of_cells(const Grid& g, const std::vector<int>& cells) {
    CellMask m(g);
    for (int c : cells) {
      if (c < 0 || c >= g.cell_count())
        throw std::invalid_argument("mask cell outside grid");
      m.bits_[static_cast<std::size_t>(c)] = 1;
    }
    return m;
  }

  const Grid& grid() const { return grid_; }
  bool contains(int cell) const { return bits_[static_cast<std::size_t>(cell)] != 0; }
  void set(int cell, bool on = true) { bits_[static_cast<std::size_t>(cell)] = on ? 1 : 0; }

  int count() const {
    int n = 0;
    for (auto b : bits_) n += b;
    return n;
  }

  /// measure = (#cells) * h^dim.
  double measure() const { return static_cast<double>(count()) * grid_.cell_measure(); }

  bool empty() const { return count() == 0; }

  std::vector<int> cells() const {
    std::vector<int> out;
    for (int c = 0; c < grid_.cell_count(); ++c)
      if (bits_[static_cast<std::size_t>(c)]) out.push_back(c);
    return out;
  }

  bool is_subset_of(const CellMask& o) const {
    require_same_grid(grid_, o.grid_);
    for (std::size_t i = 0; i < bits_.size(); ++i)
      if (bits_[i] && !o.bits_[i]) return false;
    return true;
  }

  CellMask intersect(const CellMask& o) const {
    require_same_grid(grid_, o.grid_);
    CellMask m(grid_);
    for (std::size_t i = 0; i < bits_.size(); ++i) m.bits_[i] = bits_[i] & o.bits_[i];
    return m;
  }

  CellMask subtract(const CellMask& o) const {
    require_same_grid(grid_, o.grid_);
    CellMask m(grid_);
    for (std::size_t i = 0; i < bits_.size(); ++i)
      m.bits_[i] = static_cast<std::uint8_t>(bits_[i] & ~o.bits_[i]);
    return m;
  }

  CellMask unite(const CellMask& o) const {
    require_same_grid(grid_, o.grid_);
    CellMask m(grid_);
    for (std::size_t i = 0; i < bits_.size(); ++i) m.bits_[i] = bits_[i] | o.bits_[i];
    return m;
  }

  bool operator==(const CellMask& o) const {
    return grid_.same_as(o.grid_) && bits_ == o.bits_;
  }

 private:
  Grid grid_;
  std::vector<std::uint8_t> bits_;
};

namespace detail {

// Per-axis offsets i within a side-s cube whose cell center lies in the closed
// concentric core of relative side r. Center of cell i sits at i + 0.5 (units
// of h, relative to the anchor); the core spans [s/2 - r*s/2, s/2 + r*s/2].
// May be empty when r*side < 1 on even sides.
inline std::pair<int, int> core_axis_offsets(int side, double r) {
  const double half_core = r * static_cast<double>(side) / 2.0;
  const double center = static_cast<double>(side) / 2.0;
  int lo = side, hi = -1;
  for (int i = 0; i < side; ++i) {
    const double d = std::abs(static_cast<double>(i) + 0.5 - center);
    if (d <= half_core) {
      lo = std::min(lo, i);
      hi = std::max(hi, i);
    }
  }
  return {lo, hi};
}

}  // namespace detail

/// Cells of Q whose center lies in the closed concentric cube of side r*|edge|.
inline CellMask core_cells(const Grid& g, const Cube& q, double r) {
  require_cube_in_grid(g, q);
  if (!(r > 0.0 && r < 1.0)) throw std::invalid_argument("core_cells: r must be in (0,1)");
  const auto [lo, hi] = detail::core_axis_offsets(q.side, r);
  CellMask m(g);
  if (lo > hi) return m;
  if (g.dim() == 1) {
    for (int i = lo; i <= hi; ++i) m.set(q.anchor[0] + i);
  } else {
    for (int i = lo; i <= hi; ++i)
      for (int j = lo; j <= hi; ++j)
        m.set(g.index_of({q.anchor[0] + i, q.anchor[1] + j}));
  }
  return m;
}

}  // namespace vexlab
