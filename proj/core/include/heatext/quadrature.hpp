#pragma once

#include <functional>

namespace heatext {

struct QuadratureResult {
  double value;
  int intervals;
  bool converged;
};

// Composite trapezoid on [lo, hi], doubling the interval count until two
// successive estimates differ by less than max(tol, rel_tol * |estimate|).
QuadratureResult adaptive_trapezoid(const std::function<double(double)>& f, double lo, double hi,
                                    double tol = 1e-10, double rel_tol = 0.0,
                                    int max_doublings = 20);

// int_{R^N minus B(0, r_min)} f(|x|) dx truncated at r_max, via polar coordinates.
QuadratureResult integrate_radial(const std::function<double(double)>& f, int dim, double r_min,
                                  double r_max, double tol = 1e-10);

}  // namespace heatext
