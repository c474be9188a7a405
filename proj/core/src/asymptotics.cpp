#include "heatext/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "heatext/errors.hpp"
#include "heatext/fit.hpp"
#include "heatext/gaussian.hpp"

namespace heatext {

using std::numbers::pi;

namespace {

void require_compatible(const Grid& grid, const ProfileTable& profile) {
  const ExteriorDomain& domain = profile.domain();
  switch (grid.kind()) {
    case GridKind::kRadial:
      if (grid.dim() != domain.dim() ||
          std::abs(grid.inner_radius() - domain.hole_radius()) > 1e-12 * domain.hole_radius()) {
        throw ShapeError("profile and radial grid describe different exterior domains");
      }
      break;
    case GridKind::kPlanar:
      if (domain.dim() != 2) throw ShapeError("planar grids need a two-dimensional profile");
      break;
    case GridKind::kAxisymmetric:
      if (domain.dim() != 3 || profile.layout() != SampleLayout::kRadial) {
        throw ShapeError("axisymmetric grids need a radial three-dimensional profile");
      }
      break;
  }
}

bool in_region(double r, double t, const std::optional<RegionSpec>& region) {
  if (!region) return true;
  const double r2 = r * r;
  return region->part == RegionSpec::Part::kNear ? r2 <= region->delta * t
                                                 : r2 >= region->delta * t;
}

const Field& snapshot_at(const std::vector<Field>& snapshots, double t) {
  for (const Field& f : snapshots) {
    if (std::abs(f.time - t) <= 1e-9 * std::max(1.0, t)) return f;
  }
  throw PreconditionError("no snapshot stored at t = " + std::to_string(t));
}

// Linear interpolation of log M between ledger rows.
double ledger_mass_at(const MassLedger& ledger, double t) {
  const auto& rows = ledger.rows;
  if (rows.empty() || t < rows.front().t - 1e-12 || t > rows.back().t + 1e-12) {
    throw PreconditionError("ledger does not cover t = " + std::to_string(t));
  }
  auto it = std::lower_bound(rows.begin(), rows.end(), t,
                             [](const LedgerRow& row, double v) { return row.t < v; });
  if (it == rows.begin()) return rows.front().mass;
  if (it == rows.end()) return rows.back().mass;
  const LedgerRow& hi = *it;
  const LedgerRow& lo = *(it - 1);
  const double w = (t - lo.t) / (hi.t - lo.t);
  if (lo.mass > 0.0 && hi.mass > 0.0) {
    return std::exp((1.0 - w) * std::log(lo.mass) + w * std::log(hi.mass));
  }
  return (1.0 - w) * lo.mass + w * hi.mass;
}

}  // namespace

std::vector<double> profile_on_grid(const Grid& grid, const ProfileTable& profile) {
  require_compatible(grid, profile);
  std::vector<double> phi(grid.size(), 0.0);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (!grid.active(k)) continue;
    phi[k] = grid.kind() == GridKind::kPlanar ? profile.value_at(grid.first(k), grid.second(k))
                                              : profile.value_at_radius(grid.radius(k));
  }
  return phi;
}

double asymptotic_mass(const Field& u0, const ProfileTable& profile) {
  const std::vector<double> phi = profile_on_grid(*u0.grid, profile);
  std::vector<double> product(phi.size());
  for (std::size_t k = 0; k < phi.size(); ++k) product[k] = phi[k] * u0.values[k];
  return integral(*u0.grid, product);
}

std::vector<ErrorNorm> error_norms(const Field& snapshot, double m, const ProfileTable& profile,
                                   const std::vector<double>& p_list,
                                   std::optional<RegionSpec> region) {
  if (!(snapshot.time > 0.0)) throw PreconditionError("error_norms: snapshot time must be positive");
  if (region && !(region->delta > 0.0)) throw PreconditionError("error_norms: delta must be positive");
  const Grid& grid = *snapshot.grid;
  const std::vector<double> phi = profile_on_grid(grid, profile);
  const double t = snapshot.time;
  const int dim = grid.dim();

  std::vector<double> diff(grid.size(), 0.0);
  std::vector<char> use(grid.size(), 0);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (!grid.active(k) || !in_region(grid.radius(k), t, region)) continue;
    use[k] = 1;
    diff[k] = snapshot.values[k] - m * phi[k] * gaussian_value(grid.radius(k), {dim, t});
  }

  std::vector<ErrorNorm> out;
  for (double p : p_list) {
    if (!(p >= 1.0)) throw DomainError("error_norms: p must be >= 1");
    double raw = 0.0;
    if (std::isinf(p)) {
      for (std::size_t k = 0; k < diff.size(); ++k) {
        if (use[k]) raw = std::max(raw, std::abs(diff[k]));
      }
    } else {
      for (std::size_t k = 0; k < diff.size(); ++k) {
        if (use[k]) raw += grid.weight(k) * std::pow(std::abs(diff[k]), p);
      }
      raw = std::pow(raw, 1.0 / p);
    }
    const double exponent = std::isinf(p) ? dim / 2.0 : dim / 2.0 * (1.0 - 1.0 / p);
    out.push_back({p, raw, std::pow(t, exponent) * raw});
  }
  return out;
}

std::vector<RateRow> RateSeries::for_p(double p) const {
  std::vector<RateRow> out;
  for (const RateRow& row : rows) {
    if (row.p == p) out.push_back(row);
  }
  std::sort(out.begin(), out.end(), [](const RateRow& a, const RateRow& b) { return a.t < b.t; });
  return out;
}

RateSeries build_rate_series(const std::vector<Field>& snapshots, double m,
                             const ProfileTable& profile, const std::vector<double>& p_list) {
  RateSeries series;
  for (const Field& f : snapshots) {
    if (!(f.time > 0.0)) continue;
    const double mass = integral(*f.grid, f.values);
    for (const ErrorNorm& e : error_norms(f, m, profile, p_list)) {
      series.rows.push_back({f.time, e.p, e.raw, e.scaled, mass, std::abs(mass - m)});
    }
  }
  return series;
}

RateFit rate_fit(std::span<const double> t, std::span<const double> values) {
  std::vector<double> lx, ly;
  int excluded = 0;
  for (std::size_t k = 0; k < t.size() && k < values.size(); ++k) {
    if (!(values[k] > 0.0) || !std::isfinite(values[k]) || !(t[k] > 0.0)) {
      ++excluded;
      continue;
    }
    lx.push_back(std::log(t[k]));
    ly.push_back(std::log(values[k]));
  }
  if (lx.size() < 4) {
    throw RangeError("rate_fit: need at least 4 rows with positive norms, got " +
                     std::to_string(lx.size()));
  }
  const LineFit fit = fit_line(lx, ly);
  return {fit.slope, fit.intercept, fit.rms_residual, static_cast<int>(lx.size()), excluded};
}

RateFit rate_fit(const RateSeries& series, double p, double t_lo, double t_hi) {
  std::vector<double> t, v;
  for (const RateRow& row : series.for_p(p)) {
    if (row.t < t_lo || row.t > t_hi) continue;
    t.push_back(row.t);
    v.push_back(row.raw_norm);
  }
  return rate_fit(t, v);
}

MassConvergence mass_convergence(const MassLedger& ledger, double m) {
  if (ledger.rows.empty()) throw PreconditionError("mass_convergence: empty ledger");
  MassConvergence out;
  const double slack = 1e-12 * std::max(1.0, std::abs(ledger.rows.front().mass));
  for (const LedgerRow& row : ledger.rows) {
    const double gap = std::abs(row.mass - m);
    if (!out.gap.empty()) {
      const double rise = gap - out.gap.back();
      out.worst_increase = std::max(out.worst_increase, rise);
      if (rise > slack) out.nonincreasing = false;
    }
    out.t.push_back(row.t);
    out.gap.push_back(gap);
  }
  out.final_gap = out.gap.back();
  return out;
}

KernelGap kernel_l1_gap(const KernelProbe& probe, double t, const ProfileTable& dirichlet_profile,
                        bool narrow) {
  if (std::abs(probe.initial_mass - 1.0) > 0.01) {
    throw PreconditionError("kernel_l1_gap: probe source is not of unit mass (" +
                            std::to_string(probe.initial_mass) + ")");
  }
  if (!dirichlet_profile.theta().is_dirichlet() || dirichlet_profile.domain().dim() != 3) {
    throw PreconditionError("kernel_l1_gap: needs the three-dimensional Dirichlet profile");
  }
  if (narrow && probe.narrow_snapshots.empty()) {
    throw PreconditionError("kernel_l1_gap: probe has no half-width companion run");
  }
  const std::vector<Field>& snaps = narrow ? probe.narrow_snapshots : probe.snapshots;
  const Field& u = snapshot_at(snaps, t);
  const std::size_t index = static_cast<std::size_t>(&u - snaps.data());
  const Grid& grid = *u.grid;
  const double y = probe.source_z;
  const double offset = narrow ? probe.narrow_time_offset : probe.time_offset;
  const double t_eff = t + offset;

  double gap = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (!grid.active(k)) continue;
    const double rho = grid.first(k);
    const double dz = grid.second(k) - y;
    const double g = gaussian_value(std::sqrt(rho * rho + dz * dz), {3, t_eff});
    gap += grid.weight(k) * std::abs(u.values[k] - g);
  }

  KernelGap out;
  out.t = t;
  out.source_distance = std::abs(y);
  out.gap = gap;
  out.hole_term = gaussian_ball_mass_3d(std::abs(y), dirichlet_profile.domain().hole_radius(), t);
  out.bound = 2.0 * (1.0 - dirichlet_profile.value_at_radius(std::abs(y))) + out.hole_term;
  const double smearing = index < probe.smearing_error.size() ? probe.smearing_error[index] : 0.0;
  out.tolerance = smearing + (offset > 0.0 ? gaussian_l1_time_shift_bound(t, offset, 3) : 0.0);
  out.passed = out.gap <= out.bound + out.tolerance;
  return out;
}

HerraizComparison herraiz_compare(double t, bool phi_on, int samples) {
  if (!(t >= 10.0)) throw PreconditionError("herraiz_compare: needs t >= 10");
  if (samples < 2) throw PreconditionError("herraiz_compare: needs at least 2 samples");
  HerraizComparison out;
  out.t = t;
  out.phi_on = phi_on;
  const double m = explicit_asymptotic_mass();
  const double m0 = explicit_solution_mass(0.0);
  const double r_hi = 1.0 + 8.0 * std::sqrt(t);
  double sup_exact = 0.0, sup_th = 0.0, sup_he = 0.0, peak_r_value = -1.0;
  std::size_t peak = 0;
  for (int i = 0; i < samples; ++i) {
    const double r = 1.0 + (r_hi - 1.0) * i / (samples - 1);
    const double phi = phi_on ? 1.0 - 1.0 / r : 1.0;
    const double g = gaussian_value(r, {3, t});
    out.r.push_back(r);
    out.exact.push_back(explicit_solution(r, t));
    out.theorem.push_back(m * phi * g);
    out.herraiz.push_back(m0 * phi * g);
    if (out.exact.back() > peak_r_value) {
      peak_r_value = out.exact.back();
      peak = out.r.size() - 1;
    }
    sup_exact = std::max(sup_exact, std::abs(out.exact.back()));
    sup_th = std::max(sup_th, std::abs(out.theorem.back() - out.exact.back()));
    sup_he = std::max(sup_he, std::abs(out.herraiz.back() - out.exact.back()));
  }
  out.gap_theorem = sup_th / sup_exact;
  out.gap_herraiz = sup_he / sup_exact;
  out.peak_ratio = out.herraiz[peak] / out.exact[peak];
  return out;
}

L1OptimalityReport optimality_check_l1(const OptimalDatumPlan& plan, int n,
                                       const MassLedger& unit_ball_ledger) {
  auto row_it = std::find_if(plan.rows.begin(), plan.rows.end(),
                             [n](const PlanRow& row) { return row.n == n; });
  if (row_it == plan.rows.end()) {
    throw PreconditionError("optimality_check_l1: plan has no row n = " + std::to_string(n));
  }
  const PlanRow& row = *row_it;
  const PlanConditions conditions = check_plan_row(plan, row);
  if (!conditions.all()) {
    throw PreconditionError("optimality_check_l1: plan row violates condition " +
                            conditions.first_failure());
  }
  if (unit_ball_ledger.rows.empty() || !(unit_ball_ledger.rows.front().mass > 0.0)) {
    throw PreconditionError("optimality_check_l1: unit-ball ledger is empty or massless");
  }

  // u_n(x, t) = 2^{-n} R^{-N} v((x - x_n) / R, t / R^2), so its mass is 2^{-n} M_v(t / R^2).
  const double r2 = row.radius * row.radius;
  const double s_lo = row.t_n / r2;
  const double s_hi = row.t_next / r2;
  const double m0 = unit_ball_ledger.rows.front().mass;
  double ratio = std::min(ledger_mass_at(unit_ball_ledger, s_lo), ledger_mass_at(unit_ball_ledger, s_hi));
  for (const LedgerRow& lr : unit_ball_ledger.rows) {
    if (lr.t > s_lo && lr.t < s_hi) ratio = std::min(ratio, lr.mass);
  }
  ratio /= m0;

  // sup_{B(x_n, R_n)} G(., t) |B| bounds the ball mass of the kernel.
  const double volume = 4.0 / 3.0 * pi * row.radius * r2;
  const double d = row.centre - row.radius;
  double gauss = 0.0;
  constexpr int kTimes = 65;
  for (int i = 0; i < kTimes; ++i) {
    const double t = row.t_n * std::pow(row.t_next / row.t_n, i / double(kTimes - 1));
    gauss = std::max(gauss, volume * std::exp(-d * d / (4.0 * t)) / std::pow(4.0 * pi * t, 1.5));
  }

  L1OptimalityReport out;
  out.n = n;
  out.t_n = row.t_n;
  out.t_next = row.t_next;
  out.retained_mass = row.weight * ratio;
  out.mass_floor = 0.75 * row.weight;
  out.gaussian_term = gauss;
  out.gaussian_cap = std::ldexp(1.0, -(n + 2));
  out.l1_lower = out.retained_mass - out.gaussian_term;
  out.g_at_t_n = plan.g(row.t_n);
  out.passed = out.retained_mass >= out.mass_floor && out.gaussian_term <= out.gaussian_cap &&
               out.l1_lower >= std::ldexp(1.0, -(n + 1)) && out.g_at_t_n <= out.l1_lower;
  return out;
}

std::vector<LinfOptimalityRow> optimality_check_linf(const Field& unit_ball_at_one,
                                                     const std::vector<double>& times) {
  const Grid& grid = *unit_ball_at_one.grid;
  if (grid.kind() != GridKind::kRadial || grid.dim() != 3 || grid.inner_radius() != 0.0) {
    throw PreconditionError("optimality_check_linf: needs a unit-ball radial field");
  }
  if (std::abs(unit_ball_at_one.time - 1.0) > 1e-9) {
    throw PreconditionError("optimality_check_linf: the unit-ball field must be taken at t = 1");
  }
  // With R = sqrt(t) the rescaled solution satisfies t^{N/2} u(x, t) = v(x / R, 1).
  const double sup = lp_norm(grid, unit_ball_at_one.values, kInf);
  const double bound =
      std::exp(-unit_ball_eigenvalue_3d()) * unit_ball_eigenfunction_3d(0.0) / 2.0;
  std::vector<LinfOptimalityRow> rows;
  for (double t : times) {
    if (!(t > 0.0)) throw PreconditionError("optimality_check_linf: times must be positive");
    rows.push_back({t, std::sqrt(t), sup, bound, sup >= bound});
  }
  return rows;
}

LineFit eigen_decay_exponent(const MassLedger& ledger, double t_lo, double t_hi) {
  std::vector<double> t, log_m;
  for (const LedgerRow& row : ledger.rows) {
    if (row.t < t_lo || row.t > t_hi || !(row.mass > 0.0)) continue;
    t.push_back(row.t);
    log_m.push_back(std::log(row.mass));
  }
  return fit_line(t, log_m);
}

double ordering_violation(const Field& lower, const Field& upper) {
  if (!lower.grid->compatible_with(*upper.grid)) {
    throw ShapeError("ordering_violation: fields live on different grids");
  }
  double worst = 0.0;
  for (std::size_t k = 0; k < lower.values.size(); ++k) {
    if (lower.grid->active(k)) worst = std::max(worst, lower.values[k] - upper.values[k]);
  }
  return worst;
}

}  // namespace heatext
