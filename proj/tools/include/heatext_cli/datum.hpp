#pragma once

#include <functional>
#include <string>
#include <vector>

namespace heatext::cli {

enum class Geometry;

// Named initial data: explicit-remark, gaussian-bump(c,w) or gaussian-bump(cx,cy,w),
// ball-eigen(n), indicator-shell(r1,r2).
struct DatumSpec {
  std::string name;
  std::vector<double> args;
};

DatumSpec parse_datum(const std::string& text);

// u0(first, second) on a grid of the given geometry: radial grids pass (r, 0),
// planar grids (x, y).
std::function<double(double, double)> datum_function(const DatumSpec& spec, Geometry geometry);

}  // namespace heatext::cli
