#pragma once

#include <span>

namespace heatext {

struct LineFit {
  double slope;
  double intercept;
  double rms_residual;
};

// Ordinary least squares y ~ slope x + intercept; needs at least two points.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

}  // namespace heatext
