#pragma once

#include <optional>
#include <span>
#include <vector>

#include "heatext/constructions.hpp"
#include "heatext/fit.hpp"
#include "heatext/grid.hpp"
#include "heatext/profile.hpp"
#include "heatext/solver.hpp"

namespace heatext {

// Splits the domain into {|x|^2 <= delta t} (near) and {|x|^2 >= delta t} (far).
struct RegionSpec {
  enum class Part { kNear, kFar };
  double delta = 1.0;
  Part part = Part::kNear;
};

// m = int Phi u0 with the grid's quadrature weights.
double asymptotic_mass(const Field& u0, const ProfileTable& profile);

// Phi at every node of a grid. Radial and axisymmetric grids evaluate the
// profile at |x|; planar grids need a planar table.
std::vector<double> profile_on_grid(const Grid& grid, const ProfileTable& profile);

struct ErrorNorm {
  double p;
  double raw;     // ||u - m Phi G||_p
  double scaled;  // t^{(N/2)(1 - 1/p)} raw
};

// Norms of u - m Phi G(., t) over the truncated domain or one region. Pass
// kInf in p_list for the sup norm.
std::vector<ErrorNorm> error_norms(const Field& snapshot, double m, const ProfileTable& profile,
                                   const std::vector<double>& p_list,
                                   std::optional<RegionSpec> region = std::nullopt);

struct RateRow {
  double t;
  double p;
  double raw_norm;
  double scaled_norm;
  double mass;
  double mass_gap;  // |M(t) - m|
};

struct RateSeries {
  std::vector<RateRow> rows;
  // Rows for one norm index, ordered by time.
  std::vector<RateRow> for_p(double p) const;
};

RateSeries build_rate_series(const std::vector<Field>& snapshots, double m,
                             const ProfileTable& profile,
                             const std::vector<double>& p_list = {1.0, 2.0, kInf});

struct RateFit {
  double exponent;
  double intercept;
  double residual;
  int used;
  int excluded;  // rows in the window with nonpositive norms
};

// Least-squares slope of log(raw_norm) against log(t) for rows with norm index
// p and t in [t_lo, t_hi].
RateFit rate_fit(const RateSeries& series, double p, double t_lo, double t_hi);
RateFit rate_fit(std::span<const double> t, std::span<const double> values);

struct MassConvergence {
  std::vector<double> t;
  std::vector<double> gap;
  double final_gap = 0.0;
  // Largest increase of the gap between consecutive rows.
  double worst_increase = 0.0;
  bool nonincreasing = true;
};

MassConvergence mass_convergence(const MassLedger& ledger, double m);

struct KernelGap {
  double t;
  double source_distance;
  double gap;        // int_Omega |k(x, y, t) - G(x - y, t + t0)| dx
  double bound;      // 2 (1 - Phi^0(y)) + int_hole G(x - y, t) dx
  double hole_term;
  double tolerance;  // smearing estimate plus the t0 time-shift bound
  bool passed;
};

// narrow = true measures the half-width companion run instead.
KernelGap kernel_l1_gap(const KernelProbe& probe, double t, const ProfileTable& dirichlet_profile,
                        bool narrow = false);

struct HerraizComparison {
  double t;
  bool phi_on;
  std::vector<double> r;
  std::vector<double> exact;
  std::vector<double> theorem;  // m Phi^0 G
  std::vector<double> herraiz;  // M(0) Phi^0 G
  double gap_theorem;           // sup |theorem - exact| / sup exact
  double gap_herraiz;
  double peak_ratio;            // herraiz / exact at the peak of exact
};

HerraizComparison herraiz_compare(double t, bool phi_on = true, int samples = 4001);

struct L1OptimalityReport {
  int n;
  double t_n;
  double t_next;
  double retained_mass;  // inf over [t_n, t_{n+1}] of the n-th component's mass
  double mass_floor;     // (3/4) 2^{-n}
  double gaussian_term;  // sup over [t_n, t_{n+1}] of int_{B(x_n, R_n)} G
  double gaussian_cap;   // 2^{-(n+2)}
  double l1_lower;       // retained_mass - gaussian_term
  double g_at_t_n;
  bool passed;
};

// unit_ball_ledger: mass ledger of the Dirichlet run in B(0, 1) with datum psi;
// the n-th component is its rescaling by R_n, weighted by 2^{-n}.
L1OptimalityReport optimality_check_l1(const OptimalDatumPlan& plan, int n,
                                       const MassLedger& unit_ball_ledger);

struct LinfOptimalityRow {
  double t;
  double radius;      // sqrt(t)
  double scaled_sup;  // t^{N/2} sup u(t) for the datum R^{-N} psi(x / R)
  double bound;       // e^{-lambda} psi(0) / 2
  bool passed;
};

// unit_ball_at_one: Dirichlet solution in B(0, 1) with datum psi at time 1.
std::vector<LinfOptimalityRow> optimality_check_linf(const Field& unit_ball_at_one,
                                                     const std::vector<double>& times);

// Fitted exponent of log M(t) against t over [t_lo, t_hi].
LineFit eigen_decay_exponent(const MassLedger& ledger, double t_lo, double t_hi);

// max(lower - upper, 0) over active nodes.
double ordering_violation(const Field& lower, const Field& upper);

}  // namespace heatext
