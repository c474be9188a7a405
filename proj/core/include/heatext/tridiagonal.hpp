#pragma once

#include <span>
#include <vector>

namespace heatext {

// Thomas algorithm with the forward sweep factored once, so repeated solves
// against the same matrix (implicit time stepping) cost one pass each.
// lower[0] and upper[n-1] are ignored. No pivoting: the matrix must be
// diagonally dominant or otherwise safe for elimination.
class TridiagonalSolver {
 public:
  TridiagonalSolver(std::vector<double> lower, std::vector<double> diag, std::vector<double> upper);

  std::size_t size() const noexcept { return inv_pivot_.size(); }
  void solve_in_place(std::span<double> rhs) const;

 private:
  std::vector<double> lower_;
  std::vector<double> upper_star_;
  std::vector<double> inv_pivot_;
};

std::vector<double> solve_tridiagonal(const std::vector<double>& lower,
                                      const std::vector<double>& diag,
                                      const std::vector<double>& upper, std::vector<double> rhs);

}  // namespace heatext
