#include "heatext/tridiagonal.hpp"

#include <cmath>

#include "heatext/errors.hpp"

namespace heatext {

TridiagonalSolver::TridiagonalSolver(std::vector<double> lower, std::vector<double> diag,
                                     std::vector<double> upper)
    : lower_(std::move(lower)), upper_star_(diag.size()), inv_pivot_(diag.size()) {
  const std::size_t n = diag.size();
  if (n == 0 || lower_.size() != n || upper.size() != n) {
    throw ShapeError("TridiagonalSolver: diagonals must share a nonzero length");
  }
  double pivot = diag[0];
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) pivot = diag[i] - lower_[i] * upper_star_[i - 1];
    if (pivot == 0.0 || !std::isfinite(pivot)) {
      throw NumericalError("TridiagonalSolver: zero pivot at row " + std::to_string(i));
    }
    inv_pivot_[i] = 1.0 / pivot;
    upper_star_[i] = i + 1 < n ? upper[i] * inv_pivot_[i] : 0.0;
  }
}

void TridiagonalSolver::solve_in_place(std::span<double> rhs) const {
  const std::size_t n = size();
  if (rhs.size() != n) throw ShapeError("TridiagonalSolver: rhs length mismatch");
  rhs[0] *= inv_pivot_[0];
  for (std::size_t i = 1; i < n; ++i) {
    rhs[i] = (rhs[i] - lower_[i] * rhs[i - 1]) * inv_pivot_[i];
  }
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= upper_star_[i] * rhs[i + 1];
}

std::vector<double> solve_tridiagonal(const std::vector<double>& lower,
                                      const std::vector<double>& diag,
                                      const std::vector<double>& upper, std::vector<double> rhs) {
  TridiagonalSolver solver(lower, diag, upper);
  solver.solve_in_place(rhs);
  return rhs;
}

}  // namespace heatext
