#include "heatext/domain.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "heatext/errors.hpp"

namespace heatext {

double circumscribed_radius(const HoleSpec& hole) {
  if (const auto* ball = std::get_if<BallHole>(&hole)) return ball->radius;
  const auto& rect = std::get<RectHole>(hole);
  return std::hypot(rect.half_width_x, rect.half_width_y);
}

bool hole_contains(const HoleSpec& hole, double x, double y) {
  if (const auto* ball = std::get_if<BallHole>(&hole)) {
    return x * x + y * y <= ball->radius * ball->radius;
  }
  const auto& rect = std::get<RectHole>(hole);
  return std::abs(x) <= rect.half_width_x && std::abs(y) <= rect.half_width_y;
}

ExteriorDomain::ExteriorDomain(int dim, HoleSpec hole, double far_radius)
    : dim_(dim), hole_(hole), far_radius_(far_radius) {
  if (dim != 2 && dim != 3) {
    throw DomainError("ExteriorDomain: dim must be 2 or 3, got " + std::to_string(dim));
  }
  if (const auto* ball = std::get_if<BallHole>(&hole_)) {
    if (!(ball->radius > 0.0)) throw DomainError("ExteriorDomain: ball radius must be positive");
  } else {
    const auto& rect = std::get<RectHole>(hole_);
    if (dim != 2) throw DomainError("ExteriorDomain: rectangular holes require dim = 2");
    if (!(rect.half_width_x > 0.0 && rect.half_width_y > 0.0)) {
      throw DomainError("ExteriorDomain: rectangle half-widths must be positive");
    }
  }
  const double hole_r = circumscribed_radius(hole_);
  if (!(far_radius_ > hole_r)) {
    throw DomainError("ExteriorDomain: hole not strictly inside B(0, far_radius)");
  }
  if (far_radius_ < 4.0 * hole_r) {
    throw DomainError("ExteriorDomain: far_radius must be at least 4x the hole radius");
  }
}

ThetaBoundary::ThetaBoundary(double theta) : theta_(theta) {
  if (!(theta >= 0.0 && theta <= 1.0)) {
    throw DomainError("ThetaBoundary: theta must lie in [0, 1]");
  }
  robin_b_ = theta == 0.0 ? kInf : robin_coefficient(theta);
}

double robin_coefficient(double theta) {
  if (!(theta > 0.0 && theta <= 1.0)) {
    throw DomainError("robin_coefficient: theta must lie in (0, 1]");
  }
  if (theta == 1.0) return 0.0;
  const double half_angle = std::numbers::pi * theta / 2.0;
  return std::cos(half_angle) / std::sin(half_angle);
}

double sphere_surface_area(int dim) {
  switch (dim) {
    case 2:
      return 2.0 * std::numbers::pi;
    case 3:
      return 4.0 * std::numbers::pi;
    default:
      throw DomainError("sphere_surface_area: unsupported dimension " + std::to_string(dim));
  }
}

double far_radius_for(double hole_radius, double t_max) {
  return hole_radius + 6.0 * std::sqrt(4.0 * t_max);
}

}  // namespace heatext
