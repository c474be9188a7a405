#pragma once

#include <vector>

#include "heatext/domain.hpp"
#include "heatext/grid.hpp"

namespace heatext {

struct StepperConfig {
  double dt = 1.0 / 128.0;
  // Must be multiples of dt (within 1e-9 relative); fields are stored here.
  std::vector<double> snapshot_times;
  // Ledger cadence in time units (rounded to whole steps); snapshot times are
  // always added, as is every step of the first interval. Balance checks need
  // this <= 1.
  double ledger_interval = 1.0 / 16.0;
  // Backward-Euler half steps replacing the first Crank-Nicolson steps
  // (Rannacher start-up). Damps the undamped high modes CN would otherwise
  // carry from kinks in the datum; 0 gives plain Crank-Nicolson.
  int startup_half_steps = 4;
};

struct LedgerRow {
  double t;
  double mass;
  double flux;  // int over the hole boundary of du/dn, n outward from Omega
};

struct MassLedger {
  std::vector<LedgerRow> rows;
};

struct Evolution {
  std::vector<Field> snapshots;
  MassLedger ledger;
  // False when u0 has negative values: positivity-dependent checks are skipped.
  bool nonnegative_datum = true;
};

// Radial Laplacian u_rr + (N-1)/r u_r on the grid of u0 (Grid::radial with
// inner = hole radius). Ghost-node theta-condition at r = a, u = 0 at R_out.
Evolution evolve_radial(const ExteriorDomain& domain, const ThetaBoundary& theta, const Field& u0,
                        const StepperConfig& cfg);

// Dirichlet problem inside the ball B(0, R) described by a radial grid with
// inner = 0. The ledger flux is the outflow through |x| = R.
Evolution evolve_ball(const Field& u0, const StepperConfig& cfg);

// Masked 5-point finite-volume Laplacian on a planar grid; inactive cells
// carry the theta-condition on their faces, the box edge is Dirichlet.
// Crank-Nicolson with a sparse LDL^T factorization reused for every step.
Evolution evolve_planar(const ThetaBoundary& theta, const Field& u0, const StepperConfig& cfg);

// Cylindrical Laplacian u_rr + u_r/rho + u_zz in finite-volume form on an
// axisymmetric grid; staircase Dirichlet hole, Dirichlet box edges, no flux
// through the axis.
Evolution evolve_axisym(const ThetaBoundary& theta, const Field& u0, const StepperConfig& cfg);

// max_k |M(t_{k+1}) - M(t_k) - int F dt| / M(t_0), trapezoid in t.
double mass_balance_residual(const MassLedger& ledger);

struct KernelProbe {
  std::vector<Field> snapshots;
  MassLedger ledger;
  double source_z = 0.0;
  double mollifier_width = 0.0;
  // The mollifier is G(. - y, time_offset) cut at |x - y| = width, so the whole-space
  // evolution of the source at time t is approximately G(. - y, t + time_offset).
  double time_offset = 0.0;
  double initial_mass = 0.0;
  // Companion run with half the mollifier width and the L^1 distance to it,
  // per snapshot (both empty when not requested).
  std::vector<Field> narrow_snapshots;
  double narrow_time_offset = 0.0;
  std::vector<double> smearing_error;
};

// Approximates the Dirichlet heat kernel column k(., y, t) for y = (0, 0, source_z)
// by evolving a unit-mass compact mollifier on an axisymmetric grid.
KernelProbe kernel_probe(const GridPtr& grid, const ThetaBoundary& theta, double source_z,
                         double mollifier_width, const std::vector<double>& times, double dt,
                         bool estimate_smearing = true);

double mollifier_time_offset(double width);

}  // namespace heatext
