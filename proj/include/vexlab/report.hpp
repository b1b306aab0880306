#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "vexlab/grid.hpp"
#include "vexlab/maximal.hpp"
#include "vexlab/modular.hpp"

namespace vexlab {

using Json = nlohmann::json;

inline Json grid_to_json(const Grid& g) {
  Json extent = Json::array();
  for (int axis = 0; axis < g.dim(); ++axis) extent.push_back(g.extent(axis));
  return Json{{"dim", g.dim()}, {"extent", extent}, {"h", g.cell_side()}};
}

inline Grid grid_from_json(const Json& j) {
  const int dim = j.at("dim").get<int>();
  const auto extent = j.at("extent").get<std::vector<int>>();
  if (static_cast<int>(extent.size()) != dim)
    throw std::invalid_argument("grid json: extent length != dim");
  const double h = j.at("h").get<double>();
  return dim == 1 ? Grid::line(extent[0], h) : Grid::plane(extent[0], extent[1], h);
}

inline Json cube_to_json(const Grid& g, const Cube& q) {
  Json anchor = Json::array();
  for (int axis = 0; axis < g.dim(); ++axis) anchor.push_back(q.anchor[axis]);
  return Json{{"anchor", anchor}, {"side", q.side}};
}

inline Cube cube_from_json(const Json& j) {
  const auto anchor = j.at("anchor").get<std::vector<int>>();
  Cube q;
  q.anchor = {anchor[0], anchor.size() > 1 ? anchor[1] : 0};
  q.side = j.at("side").get<int>();
  return q;
}

inline Json mask_to_json(const CellMask& m) { return Json{{"cells", m.cells()}}; }

inline CellMask mask_from_json(const Grid& g, const Json& j) {
  return CellMask::of_cells(g, j.at("cells").get<std::vector<int>>());
}

inline Json family_to_json(const WeightedFamily& fam) {
  Json entries = Json::array();
  for (const auto& e : fam.entries()) {
    Json je{{"cube", cube_to_json(fam.grid(), e.cube)}, {"t", e.weight}};
    if (e.subset) je["E"] = e.subset->cells();
    entries.push_back(std::move(je));
  }
  return Json{{"cubes", entries}};
}

inline WeightedFamily family_from_json(const Grid& g, const Json& j) {
  std::vector<WeightedCube> entries;
  for (const auto& je : j.at("cubes")) {
    WeightedCube e;
    e.cube = cube_from_json(je.at("cube"));
    e.weight = je.at("t").get<double>();
    if (je.contains("E"))
      e.subset = CellMask::of_cells(g, je.at("E").get<std::vector<int>>());
    entries.push_back(std::move(e));
  }
  return WeightedFamily(g, std::move(entries));
}

inline Json function_to_json(const GridFunction& f) {
  return Json{{"grid", grid_to_json(f.grid())}, {"values", f.values()}};
}

inline GridFunction function_from_json(const Json& j) {
  const Grid g = grid_from_json(j.at("grid"));
  return GridFunction(g, j.at("values").get<std::vector<double>>());
}

// Outcome of one condition estimator run. The reported ratio is a lower bound
// for the condition's best constant; the witness carries enough data to
// re-evaluate the ratio against the same exponent field.
struct ConditionReport {
  std::string condition;
  Json params = Json::object();
  double best_ratio = 0.0;
  Json witness = Json::object();
  std::string witness_id;
  std::uint64_t evaluations = 0;
  double wall_ms = 0.0;  // excluded from the deterministic payload
};

/// Deterministic JSON payload of a report (timing lives elsewhere).
inline Json report_payload(const ConditionReport& r) {
  return Json{{"condition", r.condition}, {"params", r.params},
              {"best_ratio", r.best_ratio}, {"witness", r.witness},
              {"witness_id", r.witness_id}, {"evaluations", r.evaluations}};
}

}  // namespace vexlab
