#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "heatext/domain.hpp"

namespace heatext {

enum class GridKind { kRadial, kPlanar, kAxisymmetric };

const char* to_string(GridKind kind);

// Discretization of a (truncated) domain as a list of nodes. Every node carries
// its coordinates, its distance to the origin, a quadrature weight with the
// right surface measure, and an active flag (inactive = hole or outside).
//
//  radial:        nodes r_i = inner + i h, trapezoid weights omega r^{N-1} h
//  planar:        cell centres on [-L, L]^2, weight h^2
//  axisymmetric:  cell centres (rho, z), weight 2 pi rho h_rho h_z
class Grid {
 public:
  // Radial line [inner, outer] with `cells` intervals. inner = 0 describes a
  // ball interior (symmetry at the centre).
  static std::shared_ptr<const Grid> radial(int dim, double inner, double outer, int cells);

  // Square [-half_extent, half_extent]^2 split into cells_per_side^2 cells.
  // Cells whose centre satisfies `inactive` are removed from the domain.
  static std::shared_ptr<const Grid> planar(double half_extent, int cells_per_side,
                                            const std::function<bool(double, double)>& inactive);
  static std::shared_ptr<const Grid> planar(const ExteriorDomain& domain, int cells_per_side);

  // Meridian half-plane rho in [0, rho_max], z in [z_min, z_max]. Cells whose
  // centre lies in the closed ball of radius hole_radius are inactive;
  // hole_radius <= 0 disables the hole (whole-space runs).
  static std::shared_ptr<const Grid> axisymmetric(double rho_max, double z_min, double z_max,
                                                  int n_rho, int n_z, double hole_radius);

  GridKind kind() const noexcept { return kind_; }
  int dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return first_.size(); }
  int nx() const noexcept { return nx_; }
  int ny() const noexcept { return ny_; }
  double hx() const noexcept { return hx_; }
  double hy() const noexcept { return hy_; }
  double x0() const noexcept { return x0_; }
  double y0() const noexcept { return y0_; }
  // Radius of the inner boundary for radial grids, hole radius for axisymmetric ones.
  double inner_radius() const noexcept { return inner_; }

  std::size_t index(int i, int j) const noexcept {
    return static_cast<std::size_t>(j) * nx_ + i;
  }

  double first(std::size_t k) const { return first_[k]; }
  double second(std::size_t k) const { return second_[k]; }
  double radius(std::size_t k) const { return radius_[k]; }
  double weight(std::size_t k) const { return weight_[k]; }
  bool active(std::size_t k) const { return active_[k] != 0; }

  std::span<const double> radii() const noexcept { return radius_; }
  std::span<const double> weights() const noexcept { return weight_; }

  // Same node layout (kind, extents, spacing, mask).
  bool compatible_with(const Grid& other) const;

 private:
  Grid() = default;

  GridKind kind_ = GridKind::kRadial;
  int dim_ = 3;
  int nx_ = 0;
  int ny_ = 1;
  double hx_ = 0.0;
  double hy_ = 0.0;
  double x0_ = 0.0;
  double y0_ = 0.0;
  double inner_ = 0.0;
  std::vector<double> first_;
  std::vector<double> second_;
  std::vector<double> radius_;
  std::vector<double> weight_;
  std::vector<std::uint8_t> active_;
};

using GridPtr = std::shared_ptr<const Grid>;

// A discrete solution u(., t). Inactive nodes hold 0.
struct Field {
  GridPtr grid;
  std::vector<double> values;
  double time = 0.0;
};

Field make_field(GridPtr grid, const std::function<double(double, double)>& u0, double time = 0.0);

// Quadrature of the active values with the grid's weights.
double integral(const Grid& grid, std::span<const double> values);

// ||values||_p over active nodes; p = kInf gives the max.
double lp_norm(const Grid& grid, std::span<const double> values, double p);

}  // namespace heatext
