#include "heatext/solver.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <set>
#include <string>

#include "heatext/errors.hpp"
#include "heatext/tridiagonal.hpp"

namespace heatext {

namespace {

// One implicit step solves (D - dt/2 A) u_new = rhs, with rhs = D u + dt/2 A u
// for Crank-Nicolson and rhs = D u for a backward-Euler half step.
class Scheme {
 public:
  virtual ~Scheme() = default;
  virtual void build_rhs(const std::vector<double>& u, std::vector<double>& rhs, bool crank_nicolson) const = 0;
  virtual void solve(std::vector<double>& rhs, std::vector<double>& u) const = 0;
  virtual double flux(const std::vector<double>& u) const = 0;
};

class RadialScheme final : public Scheme {
 public:
  // ball_interior: r = 0 is the centre (symmetry), otherwise the hole boundary.
  RadialScheme(const Grid& grid, const ThetaBoundary& theta, double dt, bool ball_interior)
      : grid_(grid), theta_(theta), dt_(dt), ball_(ball_interior) {
    const std::size_t n = grid.size();
    const double h = grid.hx();
    const int dim = grid.dim();
    lower_.assign(n, 0.0);
    diag_.assign(n, 0.0);
    upper_.assign(n, 0.0);
    fixed_.assign(n, 0);
    fixed_[n - 1] = 1;
    // Conservative form r^{1-N} (r^{N-1} u_r)_r with control volumes r_i^{N-1} h,
    // the trapezoid weights, so the discrete mass changes only through the ends.
    auto area = [dim](double r) { return std::pow(r, dim - 1); };
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double r = grid.first(i);
      const double out = area(r + 0.5 * h), in = area(r - 0.5 * h), vol = area(r) * h * h;
      lower_[i] = in / vol;
      diag_[i] = -(in + out) / vol;
      upper_[i] = out / vol;
    }
    if (ball_) {
      // Laplacian -> N u_rr at the centre, ghost u_{-1} = u_1.
      diag_[0] = -2.0 * dim / (h * h);
      upper_[0] = 2.0 * dim / (h * h);
    } else if (theta.is_dirichlet()) {
      fixed_[0] = 1;
    } else {
      // Half cell at r = a; the boundary face carries u_r = b u, i.e. du/dn + b u = 0.
      const double a = grid.first(0);
      upper_[0] = 2.0 * area(a + 0.5 * h) / (area(a) * h * h);
      diag_[0] = -upper_[0] - 2.0 * theta.robin_b() / h;
    }
    std::vector<double> lo(n), di(n), up(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (fixed_[i]) {
        di[i] = 1.0;
        continue;
      }
      lo[i] = -0.5 * dt_ * lower_[i];
      di[i] = 1.0 - 0.5 * dt_ * diag_[i];
      up[i] = -0.5 * dt_ * upper_[i];
    }
    solver_ = std::make_unique<TridiagonalSolver>(std::move(lo), std::move(di), std::move(up));
  }

  void build_rhs(const std::vector<double>& u, std::vector<double>& rhs, bool cn) const override {
    const std::size_t n = u.size();
    for (std::size_t i = 0; i < n; ++i) {
      if (fixed_[i]) {
        rhs[i] = 0.0;
        continue;
      }
      double value = u[i];
      if (cn) {
        double au = diag_[i] * u[i];
        if (i > 0) au += lower_[i] * u[i - 1];
        if (i + 1 < n) au += upper_[i] * u[i + 1];
        value += 0.5 * dt_ * au;
      }
      rhs[i] = value;
    }
  }

  void solve(std::vector<double>& rhs, std::vector<double>& u) const override {
    solver_->solve_in_place(rhs);
    u.swap(rhs);
  }

  double flux(const std::vector<double>& u) const override {
    const double h = grid_.hx();
    const int dim = grid_.dim();
    const double area = sphere_surface_area(dim);
    const std::size_t n = u.size();
    if (ball_) {
      const double radius = grid_.first(n - 1);
      const double ur = (3.0 * u[n - 1] - 4.0 * u[n - 2] + u[n - 3]) / (2.0 * h);
      return area * std::pow(radius, dim - 1) * ur;
    }
    const double a = grid_.first(0);
    if (!theta_.is_dirichlet()) {
      // The boundary face flux of the half cell, so dM/dt matches it exactly.
      return area * std::pow(a, dim - 1) * (-theta_.robin_b() * u[0]);
    }
    const double ur = (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * h);
    return area * std::pow(a, dim - 1) * (outward_normal_sign_at_hole() * ur);
  }

 private:
  const Grid& grid_;
  ThetaBoundary theta_;
  double dt_;
  bool ball_;
  std::vector<double> lower_, diag_, upper_;
  std::vector<unsigned char> fixed_;
  std::unique_ptr<TridiagonalSolver> solver_;
};

// Cell-centred finite volumes on planar or axisymmetric grids. A face towards an
// inactive cell carries the theta-condition with the face value eliminated,
// du/dn = -u_P 2b / (2 + b d) at distance d/2; faces on the box edge are Dirichlet.
class FiniteVolumeScheme final : public Scheme {
 public:
  FiniteVolumeScheme(const Grid& grid, const ThetaBoundary& theta, double dt)
      : grid_(grid), dt_(dt) {
    const std::size_t n = grid.size();
    slot_.assign(n, -1);
    for (std::size_t k = 0; k < n; ++k) {
      if (grid.active(k)) {
        slot_[k] = static_cast<int>(cells_.size());
        cells_.push_back(k);
      }
    }
    const int m = static_cast<int>(cells_.size());
    volume_.resize(m);
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(m) * 5);
    const bool axisym = grid.kind() == GridKind::kAxisymmetric;
    const double hx = grid.hx(), hy = grid.hy();
    const double b = theta.robin_b();
    auto face_factor = [&](double d) {
      return theta.is_dirichlet() ? 2.0 : 2.0 * b * d / (2.0 + b * d);
    };
    for (int p = 0; p < m; ++p) {
      const std::size_t k = cells_[p];
      const int i = static_cast<int>(k % grid.nx());
      const int j = static_cast<int>(k / grid.nx());
      volume_[p] = grid.weight(k);
      double diag = 0.0;
      const int di[4] = {1, -1, 0, 0};
      const int dj[4] = {0, 0, 1, -1};
      for (int d = 0; d < 4; ++d) {
        double transmissibility = 1.0;
        const double spacing = d < 2 ? hx : hy;
        if (axisym) {
          const double two_pi = 2.0 * std::numbers::pi;
          if (d == 0) transmissibility = two_pi * (i + 1) * hy;
          if (d == 1) transmissibility = two_pi * i * hy;
          if (d >= 2) transmissibility = two_pi * grid.first(k) * hx / hy;
        }
        if (transmissibility == 0.0) continue;  // the symmetry axis
        const int ni = i + di[d], nj = j + dj[d];
        if (ni < 0 || ni >= grid.nx() || nj < 0 || nj >= grid.ny()) {
          diag += 2.0 * transmissibility;  // far-field Dirichlet
          continue;
        }
        const std::size_t q = grid.index(ni, nj);
        if (grid.active(q)) {
          diag += transmissibility;
          triplets.emplace_back(p, slot_[q], -transmissibility);
        } else {
          const double coef = transmissibility * face_factor(spacing);
          diag += coef;
          if (coef > 0.0) hole_links_.emplace_back(p, coef);
        }
      }
      triplets.emplace_back(p, p, diag);
    }
    stiffness_.resize(m, m);
    stiffness_.setFromTriplets(triplets.begin(), triplets.end());
    Eigen::SparseMatrix<double> system = 0.5 * dt_ * stiffness_;
    for (int p = 0; p < m; ++p) system.coeffRef(p, p) += volume_[p];
    factor_.compute(system);
    if (factor_.info() != Eigen::Success) {
      throw NumericalError("finite-volume factorization failed");
    }
    work_.resize(m);
  }

  void build_rhs(const std::vector<double>& u, std::vector<double>& rhs, bool cn) const override {
    const int m = static_cast<int>(cells_.size());
    for (int p = 0; p < m; ++p) work_[p] = u[cells_[p]];
    Eigen::VectorXd out = volume_.cwiseProduct(work_);
    if (cn) out -= 0.5 * dt_ * (stiffness_ * work_);
    for (int p = 0; p < m; ++p) rhs[cells_[p]] = out[p];
  }

  void solve(std::vector<double>& rhs, std::vector<double>& u) const override {
    const int m = static_cast<int>(cells_.size());
    for (int p = 0; p < m; ++p) work_[p] = rhs[cells_[p]];
    Eigen::VectorXd x = factor_.solve(work_);
    for (int p = 0; p < m; ++p) u[cells_[p]] = x[p];
  }

  double flux(const std::vector<double>& u) const override {
    double total = 0.0;
    for (auto [p, coef] : hole_links_) total -= coef * u[cells_[p]];
    return total;
  }

 private:
  const Grid& grid_;
  double dt_;
  std::vector<int> slot_;
  std::vector<std::size_t> cells_;
  Eigen::VectorXd volume_;
  Eigen::SparseMatrix<double> stiffness_;  // positive semidefinite: -A
  std::vector<std::pair<int, double>> hole_links_;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> factor_;
  mutable Eigen::VectorXd work_;
};

long steps_for(double t, double dt) {
  const double steps = t / dt;
  const long k = std::lround(steps);
  if (std::abs(steps - k) > 1e-9 * std::max(1.0, steps)) {
    throw PreconditionError("snapshot time " + std::to_string(t) + " is not a multiple of dt");
  }
  return k;
}

void check_config(const StepperConfig& cfg) {
  if (!(cfg.dt > 0.0)) throw PreconditionError("StepperConfig: dt must be positive");
  for (std::size_t k = 0; k < cfg.snapshot_times.size(); ++k) {
    if (!(cfg.snapshot_times[k] >= 0.0)) throw PreconditionError("StepperConfig: negative snapshot time");
    if (k > 0 && !(cfg.snapshot_times[k] > cfg.snapshot_times[k - 1])) {
      throw PreconditionError("StepperConfig: snapshot times must be increasing");
    }
  }
  if (!(cfg.ledger_interval > 0.0)) throw PreconditionError("StepperConfig: ledger interval must be positive");
}

Evolution run(const Scheme& scheme, const Field& u0, const StepperConfig& cfg) {
  const Grid& grid = *u0.grid;
  Evolution out;
  for (double v : u0.values) {
    if (!std::isfinite(v)) throw PreconditionError("initial datum has non-finite values");
    if (v < 0.0) out.nonnegative_datum = false;
  }
  if (cfg.snapshot_times.empty()) return out;

  std::vector<long> snap_steps;
  for (double t : cfg.snapshot_times) snap_steps.push_back(steps_for(t, cfg.dt));
  const long total = snap_steps.back();
  const long stride = std::max(1L, std::lround(cfg.ledger_interval / cfg.dt));
  std::set<long> ledger_steps(snap_steps.begin(), snap_steps.end());
  for (long k = 0; k <= total; k += stride) ledger_steps.insert(k);
  // Data that do not match the boundary condition give a flux singular at t = 0;
  // every step of the first interval is kept so the time integral resolves it.
  for (long k = 1; k < std::min(stride, total); ++k) ledger_steps.insert(k);

  auto time_of = [&](long k) {
    auto it = std::find(snap_steps.begin(), snap_steps.end(), k);
    return it != snap_steps.end() ? cfg.snapshot_times[it - snap_steps.begin()] : k * cfg.dt;
  };

  std::vector<double> u = u0.values;
  std::vector<double> rhs(u.size(), 0.0);
  const bool zero = std::all_of(u.begin(), u.end(), [](double v) { return v == 0.0; });
  std::size_t next_snap = 0;
  auto record = [&](long k) {
    const double t = time_of(k);
    if (ledger_steps.count(k)) {
      out.ledger.rows.push_back({t, integral(grid, u), zero ? 0.0 : scheme.flux(u)});
    }
    while (next_snap < snap_steps.size() && snap_steps[next_snap] == k) {
      out.snapshots.push_back(Field{u0.grid, u, t});
      ++next_snap;
    }
  };
  record(0);
  if (zero) {
    // The zero datum stays zero; skip the linear algebra.
    for (long k : ledger_steps) {
      if (k > 0) out.ledger.rows.push_back({time_of(k), 0.0, 0.0});
    }
    for (; next_snap < snap_steps.size(); ++next_snap) {
      out.snapshots.push_back(Field{u0.grid, u, cfg.snapshot_times[next_snap]});
    }
    return out;
  }

  const long startup_steps = cfg.startup_half_steps / 2;
  for (long k = 1; k <= total; ++k) {
    if (k <= startup_steps) {
      for (int half = 0; half < 2; ++half) {
        scheme.build_rhs(u, rhs, false);
        scheme.solve(rhs, u);
      }
    } else {
      scheme.build_rhs(u, rhs, true);
      scheme.solve(rhs, u);
    }
    double checksum = 0.0;
    for (double v : u) checksum += v;
    if (!std::isfinite(checksum)) {
      throw NumericalError("non-finite solution at step " + std::to_string(k), k);
    }
    if (ledger_steps.count(k) || (next_snap < snap_steps.size() && snap_steps[next_snap] == k)) {
      record(k);
    }
  }
  return out;
}

void require_grid(const Field& u0, GridKind kind, const char* op) {
  if (!u0.grid) throw ShapeError(std::string(op) + ": field has no grid");
  if (u0.grid->kind() != kind) {
    throw ShapeError(std::string(op) + ": expected a " + to_string(kind) + " grid, got " +
                     to_string(u0.grid->kind()));
  }
  if (u0.values.size() != u0.grid->size()) throw ShapeError(std::string(op) + ": value count mismatch");
}

void require_accuracy_guard(const Grid& grid, const StepperConfig& cfg, const char* op) {
  const double h = std::min(grid.hx(), grid.kind() == GridKind::kRadial ? grid.hx() : grid.hy());
  if (cfg.dt > h * (1.0 + 1e-12)) {
    throw PreconditionError(std::string(op) + ": dt must not exceed the grid spacing");
  }
}

}  // namespace

Evolution evolve_radial(const ExteriorDomain& domain, const ThetaBoundary& theta, const Field& u0,
                        const StepperConfig& cfg) {
  require_grid(u0, GridKind::kRadial, "evolve_radial");
  check_config(cfg);
  const Grid& grid = *u0.grid;
  if (!domain.has_ball_hole()) throw UnsupportedFeature("evolve_radial: needs a ball hole");
  if (grid.dim() != domain.dim()) throw ShapeError("evolve_radial: grid and domain dimensions differ");
  if (std::abs(grid.inner_radius() - domain.hole_radius()) > 1e-12 * domain.hole_radius()) {
    throw ShapeError("evolve_radial: grid does not start at the hole radius");
  }
  if (grid.size() < 65) throw PreconditionError("evolve_radial: need at least 64 cells");
  require_accuracy_guard(grid, cfg, "evolve_radial");
  if (theta.is_dirichlet() && std::abs(u0.values.front()) > 1e-12) {
    throw PreconditionError("evolve_radial: Dirichlet datum must vanish at r = a");
  }
  RadialScheme scheme(grid, theta, cfg.dt, false);
  return run(scheme, u0, cfg);
}

Evolution evolve_ball(const Field& u0, const StepperConfig& cfg) {
  require_grid(u0, GridKind::kRadial, "evolve_ball");
  check_config(cfg);
  const Grid& grid = *u0.grid;
  if (grid.inner_radius() != 0.0) throw ShapeError("evolve_ball: grid must start at r = 0");
  require_accuracy_guard(grid, cfg, "evolve_ball");
  RadialScheme scheme(grid, ThetaBoundary::dirichlet(), cfg.dt, true);
  return run(scheme, u0, cfg);
}

Evolution evolve_planar(const ThetaBoundary& theta, const Field& u0, const StepperConfig& cfg) {
  require_grid(u0, GridKind::kPlanar, "evolve_planar");
  check_config(cfg);
  FiniteVolumeScheme scheme(*u0.grid, theta, cfg.dt);
  return run(scheme, u0, cfg);
}

Evolution evolve_axisym(const ThetaBoundary& theta, const Field& u0, const StepperConfig& cfg) {
  require_grid(u0, GridKind::kAxisymmetric, "evolve_axisym");
  if (!theta.is_dirichlet()) {
    throw UnsupportedFeature("evolve_axisym: only Dirichlet holes are supported");
  }
  check_config(cfg);
  FiniteVolumeScheme scheme(*u0.grid, theta, cfg.dt);
  return run(scheme, u0, cfg);
}

double mass_balance_residual(const MassLedger& ledger) {
  const auto& rows = ledger.rows;
  if (rows.size() < 3) throw RangeError("mass_balance_residual: need at least 3 ledger rows");
  const double m0 = rows.front().mass;
  double worst = 0.0;
  for (std::size_t k = 0; k + 1 < rows.size(); ++k) {
    const double dm = rows[k + 1].mass - rows[k].mass;
    const double flux = 0.5 * (rows[k].flux + rows[k + 1].flux) * (rows[k + 1].t - rows[k].t);
    worst = std::max(worst, std::abs(dm - flux));
  }
  if (m0 == 0.0) return worst;
  return worst / std::abs(m0);
}

double mollifier_time_offset(double width) { return width * width / 40.0; }

namespace {

Field mollifier(const GridPtr& grid, double source_z, double width) {
  const double t0 = mollifier_time_offset(width);
  Field field = make_field(grid, [&](double rho, double z) {
    const double d2 = rho * rho + (z - source_z) * (z - source_z);
    return d2 <= width * width ? std::exp(-d2 / (4.0 * t0)) : 0.0;
  });
  const double mass = integral(*grid, field.values);
  if (!(mass > 0.0)) throw PreconditionError("kernel_probe: mollifier not resolved by the grid");
  for (double& v : field.values) v /= mass;
  return field;
}

}  // namespace

KernelProbe kernel_probe(const GridPtr& grid, const ThetaBoundary& theta, double source_z,
                         double mollifier_width, const std::vector<double>& times, double dt,
                         bool estimate_smearing) {
  if (!grid || grid->kind() != GridKind::kAxisymmetric) {
    throw ShapeError("kernel_probe: needs an axisymmetric grid");
  }
  if (!theta.is_dirichlet()) throw UnsupportedFeature("kernel_probe: Dirichlet only");
  if (!(mollifier_width > 0.0)) throw PreconditionError("kernel_probe: width must be positive");
  const double hole = grid->inner_radius();
  if (hole > 0.0 && !(std::abs(source_z) - hole > 2.0 * mollifier_width)) {
    throw PreconditionError("kernel_probe: source too close to the hole");
  }
  StepperConfig cfg;
  cfg.dt = dt;
  cfg.snapshot_times = times;
  cfg.ledger_interval = std::min(1.0, times.empty() ? 1.0 : std::max(dt, times.back() / 64.0));

  KernelProbe probe;
  probe.source_z = source_z;
  probe.mollifier_width = mollifier_width;
  probe.time_offset = mollifier_time_offset(mollifier_width);
  const Field u0 = mollifier(grid, source_z, mollifier_width);
  probe.initial_mass = integral(*grid, u0.values);
  FiniteVolumeScheme scheme(*grid, theta, dt);
  Evolution evo = run(scheme, u0, cfg);
  probe.snapshots = std::move(evo.snapshots);
  probe.ledger = std::move(evo.ledger);
  if (estimate_smearing) {
    const Field narrow = mollifier(grid, source_z, 0.5 * mollifier_width);
    Evolution half = run(scheme, narrow, cfg);
    for (std::size_t s = 0; s < probe.snapshots.size(); ++s) {
      std::vector<double> diff(grid->size());
      for (std::size_t k = 0; k < diff.size(); ++k) {
        diff[k] = probe.snapshots[s].values[k] - half.snapshots[s].values[k];
      }
      probe.smearing_error.push_back(lp_norm(*grid, diff, 1.0));
    }
    probe.narrow_snapshots = std::move(half.snapshots);
    probe.narrow_time_offset = mollifier_time_offset(0.5 * mollifier_width);
  }
  return probe;
}

}  // namespace heatext
