#include "heatext/quadrature.hpp"

#include <algorithm>
#include <cmath>

#include "heatext/domain.hpp"

namespace heatext {

QuadratureResult adaptive_trapezoid(const std::function<double(double)>& f, double lo, double hi,
                                    double tol, double rel_tol, int max_doublings) {
  int n = 64;
  double h = (hi - lo) / n;
  double sum = 0.5 * (f(lo) + f(hi));
  for (int i = 1; i < n; ++i) sum += f(lo + i * h);
  double estimate = sum * h;
  for (int k = 0; k < max_doublings; ++k) {
    // Only the new midpoints need evaluating.
    for (int i = 0; i < n; ++i) sum += f(lo + (i + 0.5) * h);
    n *= 2;
    h *= 0.5;
    const double refined = sum * h;
    if (std::abs(refined - estimate) < std::max(tol, rel_tol * std::abs(refined))) {
      return {refined, n, true};
    }
    estimate = refined;
  }
  return {estimate, n, false};
}

QuadratureResult integrate_radial(const std::function<double(double)>& f, int dim, double r_min,
                                  double r_max, double tol) {
  const double area = sphere_surface_area(dim);
  auto integrand = [&](double r) { return area * std::pow(r, dim - 1) * f(r); };
  return adaptive_trapezoid(integrand, r_min, r_max, tol);
}

}  // namespace heatext
