#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "vexlab/modular.hpp"
#include "vexlab/report.hpp"

namespace vexlab {

struct ArrayFile {
  Grid grid = Grid::line(1);
  std::vector<double> values;
};

// CSV array format: a literal header line "dim,nx,ny,h", a dims line, then the
// values in row-major order (commas and/or whitespace; line breaks are free).
// JSON array format: {"dim":..., "extent":[...], "h":..., "values":[...]}.

inline ArrayFile read_array_csv(std::istream& in) {
  std::string header;
  if (!std::getline(in, header) || header.rfind("dim", 0) != 0)
    throw std::invalid_argument("array csv: missing 'dim,nx,ny,h' header");
  std::string rest((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  for (char& ch : rest)
    if (ch == ',' || ch == ';') ch = ' ';
  std::istringstream body(rest);
  int dim = 0, nx = 0, ny = 0;
  double h = 0.0;
  if (!(body >> dim >> nx >> ny >> h))
    throw std::invalid_argument("array csv: malformed dims line");
  ArrayFile f;
  f.grid = dim == 1 ? Grid::line(nx, h) : Grid::plane(nx, ny, h);
  double v;
  while (body >> v) f.values.push_back(v);
  if (f.values.size() != static_cast<std::size_t>(f.grid.cell_count()))
    throw std::invalid_argument("array csv: value count does not match extents");
  return f;
}

inline ArrayFile read_array_json(std::istream& in) {
  Json j = Json::parse(in);
  ArrayFile f;
  f.grid = grid_from_json(j);
  f.values = j.at("values").get<std::vector<double>>();
  if (f.values.size() != static_cast<std::size_t>(f.grid.cell_count()))
    throw std::invalid_argument("array json: value count does not match extents");
  return f;
}

inline ArrayFile read_array(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") return read_array_json(in);
  return read_array_csv(in);
}

inline GridFunction read_function(const std::string& path) {
  auto a = read_array(path);
  return GridFunction(a.grid, std::move(a.values));
}

inline ExponentField read_exponent(const std::string& path) {
  auto a = read_array(path);
  return ExponentField(a.grid, std::move(a.values));
}

/// Shortest round-trip decimal formatting, used for CSV output.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline void write_array_csv(std::ostream& out, const Grid& g,
                            const std::vector<double>& values) {
  out << "dim,nx,ny,h\n"
      << g.dim() << ',' << g.extent(0) << ',' << g.extent(1) << ','
      << format_double(g.cell_side()) << '\n';
  if (g.dim() == 1) {
    for (int x = 0; x < g.extent(0); ++x)
      out << (x ? "," : "") << format_double(values[static_cast<std::size_t>(x)]);
    out << '\n';
  } else {
    for (int x = 0; x < g.extent(0); ++x) {
      for (int y = 0; y < g.extent(1); ++y)
        out << (y ? "," : "")
            << format_double(values[static_cast<std::size_t>(x * g.extent(1) + y)]);
      out << '\n';
    }
  }
}

inline void write_function_csv(const std::string& path, const GridFunction& f) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  write_array_csv(out, f.grid(), f.values());
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
}

}  // namespace vexlab
