#pragma once

namespace heatext {

struct GaussianParams {
  int dim;
  double time;
};

// Whole-space heat kernel exp(-|x|^2/4t) / (4 pi t)^{N/2}.
double gaussian_value(double x_norm, const GaussianParams& params);

// ||G(., t)||_{L^p(R^N)}; pass kInf for p = infinity.
double gaussian_lp_norm(double p, const GaussianParams& params);

// Closed-form upper bound 2(((t+d)/t)^{N/2} - 1) for int |G(.,t) - G(.,t+d)|.
double gaussian_l1_time_shift_bound(double t, double d, int dim);

// int_{B(c, R)} G(x, t) dx in N = 3 for a ball whose centre is at distance
// `centre_distance` from the kernel's pole.
double gaussian_ball_mass_3d(double centre_distance, double ball_radius, double t);

}  // namespace heatext
