#include "heatext_cli/datum.hpp"

#include <cmath>

#include "heatext/constructions.hpp"
#include "heatext_cli/config.hpp"

namespace heatext::cli {

DatumSpec parse_datum(const std::string& text) {
  DatumSpec spec;
  const auto open = text.find('(');
  if (open == std::string::npos) {
    spec.name = text;
  } else {
    if (text.back() != ')') throw ConfigError("datum", "missing ')' in '" + text + "'");
    spec.name = text.substr(0, open);
    spec.args = parse_list("datum", text.substr(open + 1, text.size() - open - 2));
  }
  auto arity = [&](std::size_t lo, std::size_t hi) {
    if (spec.args.size() < lo || spec.args.size() > hi) {
      throw ConfigError("datum", "wrong number of arguments for " + spec.name);
    }
  };
  if (spec.name == "explicit-remark") {
    arity(0, 0);
  } else if (spec.name == "gaussian-bump") {
    arity(2, 3);
    if (!(spec.args.back() > 0.0)) throw ConfigError("datum", "gaussian-bump width must be positive");
  } else if (spec.name == "ball-eigen") {
    arity(1, 1);
    const double n = spec.args[0];
    if (n != std::floor(n) || n < 0 || n > 60) throw ConfigError("datum", "ball-eigen(n) needs an integer n in [0, 60]");
  } else if (spec.name == "indicator-shell") {
    arity(2, 2);
    if (!(spec.args[0] >= 0.0 && spec.args[1] > spec.args[0])) {
      throw ConfigError("datum", "indicator-shell(r1,r2) needs 0 <= r1 < r2");
    }
  } else {
    throw ConfigError("datum", "unknown preset '" + spec.name + "'");
  }
  return spec;
}

std::function<double(double, double)> datum_function(const DatumSpec& spec, Geometry geometry) {
  const bool planar = geometry == Geometry::kPlanar;
  auto radius = [planar](double a, double b) { return planar ? std::hypot(a, b) : a; };
  const std::vector<double> p = spec.args;
  if (spec.name == "explicit-remark") {
    return [](double r, double) { return explicit_solution(r, 0.0); };
  }
  if (spec.name == "gaussian-bump") {
    const double w = p.back();
    if (planar) {
      const double cx = p[0];
      const double cy = p.size() == 3 ? p[1] : 0.0;
      return [=](double x, double y) {
        const double d2 = (x - cx) * (x - cx) + (y - cy) * (y - cy);
        return std::exp(-d2 / (w * w));
      };
    }
    const double c = p[0];
    return [=](double r, double) { return std::exp(-(r - c) * (r - c) / (w * w)); };
  }
  if (spec.name == "ball-eigen") {
    const double weight = std::ldexp(1.0, -static_cast<int>(p[0]));
    return [=](double r, double) { return weight * unit_ball_eigenfunction_3d(r); };
  }
  const double r1 = p[0], r2 = p[1];
  return [=](double a, double b) {
    const double r = radius(a, b);
    return r >= r1 && r <= r2 ? 1.0 : 0.0;
  };
}

}  // namespace heatext::cli
