#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "vexlab/io.hpp"
#include "vexlab/modular.hpp"
#include "vexlab/report.hpp"

namespace vexlab {

/// Deterministic exponent-field generators. Kinds:
///   constant          {"value": p}
///   two-valued-split  {"low", "high", "axis", "fraction"}
///   smooth-wave       {"base", "amplitude", "period"}   (cells, along axis 0)
///   radial-step       {"inner", "outer", "radius_fraction"}
///   custom-from-file  {"path": csv-or-json array file}
inline ExponentField generate_exponent(const std::string& kind, const Json& params,
                                       const Grid& g) {
  const int n = g.cell_count();
  std::vector<double> p(static_cast<std::size_t>(n));

  if (kind == "constant") {
    const double v = params.at("value").get<double>();
    std::fill(p.begin(), p.end(), v);
  } else if (kind == "two-valued-split") {
    const double lo = params.at("low").get<double>();
    const double hi = params.at("high").get<double>();
    const int axis = params.value("axis", 0);
    const double fraction = params.value("fraction", 0.5);
    if (axis < 0 || axis >= g.dim())
      throw std::invalid_argument("two-valued-split: axis out of range");
    if (!(fraction >= 0.0 && fraction <= 1.0))
      throw std::invalid_argument("two-valued-split: fraction must be in [0,1]");
    const int split = static_cast<int>(fraction * static_cast<double>(g.extent(axis)));
    for (int c = 0; c < n; ++c)
      p[static_cast<std::size_t>(c)] = g.coords_of(c)[axis] < split ? lo : hi;
  } else if (kind == "smooth-wave") {
    const double base = params.at("base").get<double>();
    const double amplitude = params.at("amplitude").get<double>();
    const double period = params.at("period").get<double>();
    if (!(period > 0.0)) throw std::invalid_argument("smooth-wave: period must be > 0");
    for (int c = 0; c < n; ++c) {
      const double x = static_cast<double>(g.coords_of(c)[0]);
      p[static_cast<std::size_t>(c)] =
          base + amplitude * std::sin(2.0 * std::numbers::pi * x / period);
    }
  } else if (kind == "radial-step") {
    const double inner = params.at("inner").get<double>();
    const double outer = params.at("outer").get<double>();
    const double radius_fraction = params.value("radius_fraction", 0.5);
    if (!(radius_fraction >= 0.0 && radius_fraction <= 1.0))
      throw std::invalid_argument("radial-step: radius_fraction must be in [0,1]");
    const double cx = static_cast<double>(g.extent(0)) / 2.0;
    const double cy = static_cast<double>(g.extent(1)) / 2.0;
    const double radius =
        radius_fraction * static_cast<double>(std::min(g.extent(0), g.dim() == 2 ? g.extent(1) : g.extent(0))) / 2.0;
    for (int c = 0; c < n; ++c) {
      const auto xy = g.coords_of(c);
      const double dx = static_cast<double>(xy[0]) + 0.5 - cx;
      const double dy = g.dim() == 2 ? static_cast<double>(xy[1]) + 0.5 - cy : 0.0;
      p[static_cast<std::size_t>(c)] =
          std::sqrt(dx * dx + dy * dy) <= radius ? inner : outer;
    }
  } else if (kind == "custom-from-file") {
    const auto arr = read_array(params.at("path").get<std::string>());
    if (!arr.grid.same_as(g))
      throw std::invalid_argument("custom-from-file: array grid does not match scenario grid");
    p = arr.values;
  } else {
    throw std::invalid_argument("generate_exponent: unknown kind '" + kind + "'");
  }
  return ExponentField(g, std::move(p));  // enforces 1 <= p < inf
}

}  // namespace vexlab
