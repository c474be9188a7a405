#pragma once

#include <limits>
#include <variant>

namespace heatext {

struct BallHole {
  double radius;
};

// Grid-aligned rectangle centred at the origin; planar domains only.
struct RectHole {
  double half_width_x;
  double half_width_y;
};

using HoleSpec = std::variant<BallHole, RectHole>;

double circumscribed_radius(const HoleSpec& hole);

// True when the point (x, y) lies in the closed hole.
bool hole_contains(const HoleSpec& hole, double x, double y);

class ExteriorDomain {
 public:
  ExteriorDomain(int dim, HoleSpec hole, double far_radius);

  int dim() const noexcept { return dim_; }
  const HoleSpec& hole() const noexcept { return hole_; }
  double far_radius() const noexcept { return far_radius_; }
  double hole_radius() const { return circumscribed_radius(hole_); }
  bool has_ball_hole() const noexcept { return std::holds_alternative<BallHole>(hole_); }

  ExteriorDomain with_far_radius(double far_radius) const {
    return ExteriorDomain(dim_, hole_, far_radius);
  }

 private:
  int dim_;
  HoleSpec hole_;
  double far_radius_;
};

// B_theta(u) = sin(pi theta/2) du/dn + cos(pi theta/2) u, constant theta on the
// single hole component.
class ThetaBoundary {
 public:
  explicit ThetaBoundary(double theta);

  static ThetaBoundary dirichlet() { return ThetaBoundary(0.0); }
  static ThetaBoundary neumann() { return ThetaBoundary(1.0); }

  double theta() const noexcept { return theta_; }
  bool is_dirichlet() const noexcept { return theta_ == 0.0; }
  bool is_neumann() const noexcept { return theta_ == 1.0; }

  // +inf for Dirichlet.
  double robin_b() const noexcept { return robin_b_; }

 private:
  double theta_;
  double robin_b_;
};

// cot(pi theta / 2) for theta in (0, 1].
double robin_coefficient(double theta);

// The outward normal of Omega on the hole boundary points into the hole, so
// du/dn = -du/dr there for radial fields.
constexpr int outward_normal_sign_at_hole() noexcept { return -1; }

// omega_{N-1} = 2 pi^{N/2} / Gamma(N/2).
double sphere_surface_area(int dim);

// Truncation radius keeping the Gaussian tail below ~1e-6 relative mass up to
// t_max: hole radius + 6 sqrt(4 t_max).
double far_radius_for(double hole_radius, double t_max);

inline constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace heatext
