#include "heatext/grid.hpp"

#include <cmath>
#include <numbers>

#include "heatext/errors.hpp"

namespace heatext {

const char* to_string(GridKind kind) {
  switch (kind) {
    case GridKind::kRadial:
      return "radial";
    case GridKind::kPlanar:
      return "planar";
    case GridKind::kAxisymmetric:
      return "axisymmetric";
  }
  return "unknown";
}

std::shared_ptr<const Grid> Grid::radial(int dim, double inner, double outer, int cells) {
  if (dim != 2 && dim != 3) throw DomainError("Grid::radial: dim must be 2 or 3");
  if (!(inner >= 0.0 && outer > inner)) throw DomainError("Grid::radial: need 0 <= inner < outer");
  if (cells < 2) throw DomainError("Grid::radial: need at least 2 cells");
  auto grid = std::shared_ptr<Grid>(new Grid());
  grid->kind_ = GridKind::kRadial;
  grid->dim_ = dim;
  grid->nx_ = cells + 1;
  grid->ny_ = 1;
  grid->hx_ = (outer - inner) / cells;
  grid->x0_ = inner;
  grid->inner_ = inner;
  const double area = sphere_surface_area(dim);
  const std::size_t n = static_cast<std::size_t>(cells) + 1;
  grid->first_.resize(n);
  grid->second_.assign(n, 0.0);
  grid->radius_.resize(n);
  grid->weight_.resize(n);
  grid->active_.assign(n, 1);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = i + 1 == n ? outer : inner + static_cast<double>(i) * grid->hx_;
    grid->first_[i] = r;
    grid->radius_[i] = r;
    const double end_factor = (i == 0 || i + 1 == n) ? 0.5 : 1.0;
    grid->weight_[i] = end_factor * area * std::pow(r, dim - 1) * grid->hx_;
  }
  return grid;
}

std::shared_ptr<const Grid> Grid::planar(double half_extent, int cells_per_side,
                                         const std::function<bool(double, double)>& inactive) {
  if (!(half_extent > 0.0) || cells_per_side < 4) {
    throw DomainError("Grid::planar: need positive extent and at least 4 cells per side");
  }
  auto grid = std::shared_ptr<Grid>(new Grid());
  grid->kind_ = GridKind::kPlanar;
  grid->dim_ = 2;
  grid->nx_ = cells_per_side;
  grid->ny_ = cells_per_side;
  grid->hx_ = grid->hy_ = 2.0 * half_extent / cells_per_side;
  grid->x0_ = grid->y0_ = -half_extent;
  const std::size_t n = static_cast<std::size_t>(cells_per_side) * cells_per_side;
  grid->first_.resize(n);
  grid->second_.resize(n);
  grid->radius_.resize(n);
  grid->weight_.resize(n);
  grid->active_.resize(n);
  const double h = grid->hx_;
  double max_inactive_radius = 0.0;
  for (int j = 0; j < cells_per_side; ++j) {
    for (int i = 0; i < cells_per_side; ++i) {
      const std::size_t k = grid->index(i, j);
      const double x = -half_extent + (i + 0.5) * h;
      const double y = -half_extent + (j + 0.5) * h;
      const bool off = inactive(x, y);
      grid->first_[k] = x;
      grid->second_[k] = y;
      grid->radius_[k] = std::hypot(x, y);
      grid->active_[k] = off ? 0 : 1;
      grid->weight_[k] = off ? 0.0 : h * h;
      if (off) max_inactive_radius = std::max(max_inactive_radius, grid->radius_[k]);
    }
  }
  grid->inner_ = max_inactive_radius;
  return grid;
}

std::shared_ptr<const Grid> Grid::planar(const ExteriorDomain& domain, int cells_per_side) {
  if (domain.dim() != 2) throw DomainError("Grid::planar: domain must be two-dimensional");
  const HoleSpec hole = domain.hole();
  return planar(domain.far_radius(), cells_per_side,
                [hole](double x, double y) { return hole_contains(hole, x, y); });
}

std::shared_ptr<const Grid> Grid::axisymmetric(double rho_max, double z_min, double z_max,
                                               int n_rho, int n_z, double hole_radius) {
  if (!(rho_max > 0.0 && z_max > z_min) || n_rho < 4 || n_z < 4) {
    throw DomainError("Grid::axisymmetric: invalid extents or cell counts");
  }
  auto grid = std::shared_ptr<Grid>(new Grid());
  grid->kind_ = GridKind::kAxisymmetric;
  grid->dim_ = 3;
  grid->nx_ = n_rho;
  grid->ny_ = n_z;
  grid->hx_ = rho_max / n_rho;
  grid->hy_ = (z_max - z_min) / n_z;
  grid->x0_ = 0.0;
  grid->y0_ = z_min;
  grid->inner_ = std::max(hole_radius, 0.0);
  const std::size_t n = static_cast<std::size_t>(n_rho) * n_z;
  grid->first_.resize(n);
  grid->second_.resize(n);
  grid->radius_.resize(n);
  grid->weight_.resize(n);
  grid->active_.resize(n);
  for (int j = 0; j < n_z; ++j) {
    for (int i = 0; i < n_rho; ++i) {
      const std::size_t k = grid->index(i, j);
      const double rho = (i + 0.5) * grid->hx_;
      const double z = z_min + (j + 0.5) * grid->hy_;
      const double r = std::hypot(rho, z);
      const bool off = hole_radius > 0.0 && r <= hole_radius;
      grid->first_[k] = rho;
      grid->second_[k] = z;
      grid->radius_[k] = r;
      grid->active_[k] = off ? 0 : 1;
      grid->weight_[k] = off ? 0.0 : 2.0 * std::numbers::pi * rho * grid->hx_ * grid->hy_;
    }
  }
  return grid;
}

bool Grid::compatible_with(const Grid& other) const {
  if (this == &other) return true;
  return kind_ == other.kind_ && dim_ == other.dim_ && nx_ == other.nx_ && ny_ == other.ny_ &&
         hx_ == other.hx_ && hy_ == other.hy_ && x0_ == other.x0_ && y0_ == other.y0_ &&
         active_ == other.active_;
}

Field make_field(GridPtr grid, const std::function<double(double, double)>& u0, double time) {
  Field field{grid, std::vector<double>(grid->size(), 0.0), time};
  for (std::size_t k = 0; k < grid->size(); ++k) {
    if (grid->active(k)) field.values[k] = u0(grid->first(k), grid->second(k));
  }
  return field;
}

double integral(const Grid& grid, std::span<const double> values) {
  if (values.size() != grid.size()) throw ShapeError("integral: value count does not match grid");
  double sum = 0.0;
  for (std::size_t k = 0; k < values.size(); ++k) sum += grid.weight(k) * values[k];
  return sum;
}

double lp_norm(const Grid& grid, std::span<const double> values, double p) {
  if (values.size() != grid.size()) throw ShapeError("lp_norm: value count does not match grid");
  if (!(p >= 1.0)) throw DomainError("lp_norm: p must be >= 1");
  if (std::isinf(p)) {
    double sup = 0.0;
    for (std::size_t k = 0; k < values.size(); ++k) {
      if (grid.active(k)) sup = std::max(sup, std::abs(values[k]));
    }
    return sup;
  }
  double sum = 0.0;
  for (std::size_t k = 0; k < values.size(); ++k) {
    sum += grid.weight(k) * std::pow(std::abs(values[k]), p);
  }
  return std::pow(sum, 1.0 / p);
}

}  // namespace heatext
