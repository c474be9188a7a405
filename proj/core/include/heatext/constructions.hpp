#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "heatext/profile.hpp"

namespace heatext {

// Exact radial solution of the Dirichlet problem outside the unit ball in N = 3:
//   u(r, t) = exp(-(r-1)^2 / 4(t+1)) (r-1) / (4 r (t+1)^{3/2}).
double explicit_solution(double r, double t);

// M(t) = 2 pi^{3/2} + 2 pi (t+1)^{-1/2}.
double explicit_solution_mass(double t);

// Limit of explicit_solution_mass, 2 pi^{3/2}.
double explicit_asymptotic_mass();

struct RadialZ {
  double value;
  double identity_residual;  // |-Lap z - gamma (N-2-gamma) z / r^2| by finite differences
};

// z(x) = |x|^{-gamma}.
RadialZ radial_z(double x_norm, double gamma, int dim = 3);

// gamma (N - 2 - gamma).
double radial_z_coefficient(double gamma, int dim);

// Nonpositive kappa/sigma/delta ask the report to fit them.
struct SubSuperParams {
  double gamma = 0.25;
  double kappa = 0.0;
  double sigma = 0.0;
  double delta = 0.0;
};

// Z = t^{-(N+gamma)/2} (z(x) + kappa Psi(x)), Psi = 1 - Phi^0.
double supersolution_Z(const SubSuperParams& params, const ProfileTable& dirichlet_profile,
                       double x_norm, double t);

struct ZItem {
  std::string name;
  bool passed = false;
  double witness_r = 0.0;
  double witness_t = 0.0;
  std::string detail;
};

struct ZReport {
  std::array<ZItem, 4> items;
  double gamma = 0.0;
  double kappa = 0.0;
  double kappa_threshold = 0.0;
  double c2 = 0.0;     // sup Psi / z
  double m = 0.0;      // inf dZ/dn (1 + t^{N/2+1})
  double delta = 0.0;
  double c = 0.0;      // inf (Z_t - Lap Z) / (t^{-(N+gamma)/2} z / r^2) on |x|^2 <= delta t
  double sigma = 0.0;  // weight making Phi G - sigma Z a subsolution near the hole
  bool all_passed = false;

  std::string to_text() const;
};

struct ZSampling {
  double r_max = 1.0e3;
  int radii = 160;
  double t_min = 1.0e-2;
  double t_max = 1.0e4;
  int times = 49;
};

// Numerically checks items (i)-(iv) of the supersolution lemma on a sample grid.
ZReport supersolution_Z_report(const SubSuperParams& params, const ProfileTable& dirichlet_profile,
                               const ZSampling& sampling = {});

// First Dirichlet eigenpair of the unit ball in N = 3, psi normalized in L^1(B).
double unit_ball_eigenvalue_3d();
double unit_ball_eigenfunction_3d(double r);

// Continuous decreasing g : [0, inf) -> (0, 1] with g -> 0. Descriptors:
//   recip:c      1 / (t + c), c >= 1
//   pow:alpha    (1 + t)^{-alpha}
//   exp:k        exp(-k t)
//   log          1 / log(e + t)
struct DecreasingFunction {
  std::string descriptor;
  std::function<double(double)> g;

  static DecreasingFunction parse(const std::string& descriptor);
  double operator()(double t) const { return g(t); }
};

struct PlanRow {
  int n;
  double t_n;
  double t_next;  // t_{n+1}
  double radius;  // R_n
  double centre;  // |x_n|
  double weight;  // 2^{-n}
};

struct OptimalDatumPlan {
  DecreasingFunction g;
  int dim = 3;
  double hole_radius = 1.0;
  double lambda = 0.0;
  double psi_peak = 0.0;
  std::vector<PlanRow> rows;
  bool truncated = false;
  std::string warning;
};

struct PlanConditions {
  bool eigen_decay = false;     // (i)  exp(-lambda t_{n+1} / R_n^2) >= 3/4
  bool disjoint_ball = false;   // (ii) |x_n| > R_n + 1 and B(x_n, R_n) in Omega
  bool gaussian_small = false;  // (iii) exp(-(|x_n| - R_n) / 4 t_{n+1}) <= (4 pi t_n)^{N/2} / (2^{n+2} |B(0,R_n)|)
  bool all() const { return eigen_decay && disjoint_ball && gaussian_small; }
  std::string first_failure() const;
};

PlanConditions check_plan_row(const OptimalDatumPlan& plan, const PlanRow& row);

// Times t_n with g(t_n) = 2^{-(n+2)}, minimal integer R_n for (i), minimal |x_n|
// for (ii)-(iii). Rows whose times overflow are dropped with plan.truncated set.
OptimalDatumPlan optimal_datum_plan(const DecreasingFunction& g, int n_max, int dim = 3,
                                    double hole_radius = 1.0);

}  // namespace heatext
