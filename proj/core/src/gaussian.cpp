#include "heatext/gaussian.hpp"

#include <cmath>
#include <numbers>

#include "heatext/domain.hpp"
#include "heatext/errors.hpp"
#include "heatext/quadrature.hpp"

namespace heatext {

namespace {

void check_params(const GaussianParams& params) {
  if (!(params.time > 0.0)) throw DomainError("gaussian: time must be positive");
  if (params.dim < 1) throw DomainError("gaussian: dimension must be positive");
}

}  // namespace

double gaussian_value(double x_norm, const GaussianParams& params) {
  check_params(params);
  const double t = params.time;
  return std::exp(-x_norm * x_norm / (4.0 * t)) /
         std::pow(4.0 * std::numbers::pi * t, 0.5 * params.dim);
}

double gaussian_lp_norm(double p, const GaussianParams& params) {
  check_params(params);
  if (!(p >= 1.0)) throw DomainError("gaussian_lp_norm: p must be >= 1");
  const double n_half = 0.5 * params.dim;
  const double base = 4.0 * std::numbers::pi * params.time;
  if (std::isinf(p)) return std::pow(base, -n_half);
  if (p == 1.0) return 1.0;
  return std::pow(base, -n_half * (1.0 - 1.0 / p)) * std::pow(p, -n_half / p);
}

double gaussian_l1_time_shift_bound(double t, double d, int dim) {
  if (!(t > 0.0)) throw DomainError("gaussian_l1_time_shift_bound: t must be positive");
  if (!(d >= 0.0)) throw DomainError("gaussian_l1_time_shift_bound: d must be nonnegative");
  // expm1 keeps the small-d limit accurate.
  return 2.0 * std::expm1(0.5 * dim * std::log1p(d / t));
}

double gaussian_ball_mass_3d(double centre_distance, double ball_radius, double t) {
  if (!(t > 0.0)) throw DomainError("gaussian_ball_mass_3d: t must be positive");
  if (!(ball_radius > 0.0)) return 0.0;
  const double c = centre_distance;
  const double four_t = 4.0 * t;
  if (c == 0.0) {
    auto f = [&](double s) {
      return 4.0 * std::numbers::pi * s * s * std::exp(-s * s / four_t) /
             std::pow(std::numbers::pi * four_t, 1.5);
    };
    return adaptive_trapezoid(f, 0.0, ball_radius, 1e-15, 1e-12).value;
  }
  // Shells |x - centre| = s carry the spherical average of the kernel,
  // (t / (s c)) (e^{-(s-c)^2/4t} - e^{-(s+c)^2/4t}) / (4 pi t)^{3/2}.
  const double scale = 1.0 / (c * std::sqrt(std::numbers::pi * four_t));
  auto f = [&](double s) {
    return s * scale *
           (std::exp(-(s - c) * (s - c) / four_t) - std::exp(-(s + c) * (s + c) / four_t));
  };
  return adaptive_trapezoid(f, 0.0, ball_radius, 1e-15, 1e-12).value;
}

}  // namespace heatext
