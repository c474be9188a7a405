#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "heatext/asymptotics.hpp"
#include "heatext/errors.hpp"
#include "heatext/gaussian.hpp"
#include "oracles.hpp"

using namespace heatext;
using std::numbers::pi;

namespace {

const double kM = 2.0 * std::pow(pi, 1.5);

ProfileTable dirichlet3() { return profile_radial_closed_form(3, 1.0, ThetaBoundary::dirichlet()); }

GridPtr analytic_grid(double t_max) {
  const double r_out = far_radius_for(1.0, t_max);
  return Grid::radial(3, 1.0, r_out, static_cast<int>(std::ceil((r_out - 1.0) * 16.0)));
}

Field exact_at(const GridPtr& grid, double t) {
  return make_field(grid, [t](double r, double) { return explicit_solution(r, t); }, t);
}

double norm_of(const std::vector<ErrorNorm>& rows, double p) {
  for (const auto& e : rows) {
    if (e.p == p) return e.raw;
  }
  throw std::out_of_range("p");
}

}  // namespace

TEST(ErrorNorms, VanishForTheAsymptoticProfileItself) {
  const ProfileTable profile = dirichlet3();
  const auto grid = analytic_grid(50.0);
  for (double t : {1.0, 10.0, 50.0}) {
    const Field u = make_field(grid, [&](double r, double) { return 2.5 * profile.value_at_radius(r) * gaussian_value(r, {3, t}); }, t);
    for (const auto& e : error_norms(u, 2.5, profile, {1.0, 2.0, 4.0, kInf})) {
      EXPECT_NEAR(e.raw, 0.0, 1e-16);
      EXPECT_NEAR(e.scaled, 0.0, 1e-14);
    }
  }
}

TEST(ErrorNorms, ScalingExponents) {
  const ProfileTable profile = dirichlet3();
  const Field u = exact_at(analytic_grid(10.0), 10.0);
  for (const auto& e : error_norms(u, kM, profile, {1.0, 2.0, 3.0, kInf})) {
    const double exponent = std::isinf(e.p) ? 1.5 : 1.5 * (1.0 - 1.0 / e.p);
    EXPECT_NEAR(e.scaled, std::pow(10.0, exponent) * e.raw, 1e-14 * e.scaled);
  }
}

TEST(ErrorNorms, NearAndFarRegionsSplitTheDomain) {
  const ProfileTable profile = dirichlet3();
  const Field u = exact_at(analytic_grid(20.0), 20.0);
  for (double delta : {0.25, 1.0, 4.0}) {
    const auto full = error_norms(u, kM, profile, {1.0, 2.0, kInf});
    const auto near = error_norms(u, kM, profile, {1.0, 2.0, kInf}, RegionSpec{delta, RegionSpec::Part::kNear});
    const auto far = error_norms(u, kM, profile, {1.0, 2.0, kInf}, RegionSpec{delta, RegionSpec::Part::kFar});
    EXPECT_EQ(norm_of(full, kInf), std::max(norm_of(near, kInf), norm_of(far, kInf)));
    // Regions only overlap on the sphere |x|^2 = delta t.
    EXPECT_NEAR(norm_of(full, 1.0), norm_of(near, 1.0) + norm_of(far, 1.0), 1e-12);
    EXPECT_NEAR(std::pow(norm_of(full, 2.0), 2), std::pow(norm_of(near, 2.0), 2) + std::pow(norm_of(far, 2.0), 2), 1e-14);
  }
}

TEST(ErrorNorms, InterpolationInequality) {
  const ProfileTable profile = dirichlet3();
  for (double t : {10.0, 40.0, 160.0}) {
    const Field u = exact_at(analytic_grid(t), t);
    const auto rows = error_norms(u, kM, profile, {1.0, 2.0, kInf});
    EXPECT_LE(rows[1].scaled, std::sqrt(rows[0].scaled * rows[2].scaled) * (1.0 + 1e-12)) << "t = " << t;
  }
}

TEST(ErrorNorms, ExplicitSolutionConvergence) {
  const ProfileTable profile = dirichlet3();
  const auto grid = analytic_grid(200.0);
  auto at = [&](double t) { return error_norms(exact_at(grid, t), kM, profile, {1.0, kInf}); };
  // Scaled sup error halves at least between t = 10 and t = 100.
  EXPECT_LE(at(100.0)[1].scaled, 0.5 * at(10.0)[1].scaled);
  // Raw L1 error decreasing on [10, 200] and halved from t = 20 to t = 200.
  double prev = kInf;
  for (double t = 10.0; t <= 200.0; t += 10.0) {
    const double l1 = at(t)[0].raw;
    EXPECT_LT(l1, prev) << "t = " << t;
    prev = l1;
  }
  EXPECT_LT(at(200.0)[0].raw, 0.5 * at(20.0)[0].raw);
}

TEST(ErrorNorms, Errors) {
  const ProfileTable profile = dirichlet3();
  const auto grid = analytic_grid(10.0);
  EXPECT_THROW(error_norms(exact_at(grid, 0.0), kM, profile, {1.0}), PreconditionError);
  EXPECT_THROW(error_norms(exact_at(grid, 1.0), kM, profile, {0.5}), DomainError);
  EXPECT_THROW(error_norms(exact_at(grid, 1.0), kM, profile, {1.0}, RegionSpec{0.0, RegionSpec::Part::kFar}),
               PreconditionError);
  const ProfileTable other = profile_radial_closed_form(3, 2.0, ThetaBoundary::dirichlet());
  EXPECT_THROW(error_norms(exact_at(grid, 1.0), kM, other, {1.0}), ShapeError);
  const ProfileTable planar_dim = profile_radial_closed_form(2, 1.0, ThetaBoundary::neumann());
  EXPECT_THROW(error_norms(exact_at(grid, 1.0), kM, planar_dim, {1.0}), ShapeError);
}

TEST(RateFit, RecoversSyntheticPowerLaw) {
  std::vector<double> t, v;
  for (double s = 10.0; s <= 1000.0; s *= 1.5) {
    t.push_back(s);
    v.push_back(3.0 * std::pow(s, -2.0));
  }
  const RateFit fit = rate_fit(t, v);
  EXPECT_NEAR(fit.exponent, -2.0, 1e-10);
  EXPECT_NEAR(fit.intercept, std::log(3.0), 1e-9);
  EXPECT_EQ(fit.used, static_cast<int>(t.size()));
  EXPECT_EQ(fit.excluded, 0);
}

TEST(RateFit, ExcludesNonpositiveNormsAndNeedsFourRows) {
  const std::vector<double> t{1.0, 2.0, 3.0, 4.0, 5.0, 6.0};
  const std::vector<double> v{1.0, 0.0, 1.0 / 9.0, -1.0, 1.0 / 25.0, 1.0 / 36.0};
  const RateFit fit = rate_fit(t, v);
  EXPECT_EQ(fit.used, 4);
  EXPECT_EQ(fit.excluded, 2);
  EXPECT_NEAR(fit.exponent, -2.0, 1e-12);
  const std::vector<double> three_t{1.0, 2.0, 3.0}, three_v{1.0, 0.5, 0.25};
  EXPECT_THROW(rate_fit(three_t, three_v), RangeError);
  EXPECT_THROW(rate_fit(t, std::vector<double>{1.0, 0.0, 0.0, 0.0, 1.0, 0.0}), RangeError);
}

TEST(RateFit, ExplicitSolutionDecayRates) {
  const ProfileTable profile = dirichlet3();
  const auto grid = analytic_grid(1000.0);
  std::vector<Field> snaps;
  for (double t : {10.0, 20.0, 50.0, 100.0, 200.0, 500.0, 1000.0}) snaps.push_back(exact_at(grid, t));
  const RateSeries series = build_rate_series(snaps, kM, profile);
  ASSERT_EQ(series.rows.size(), 21u);
  for (const auto& row : series.rows) {
    EXPECT_TRUE(std::isfinite(row.raw_norm) && row.raw_norm >= 0.0);
    EXPECT_NEAR(row.mass_gap, std::abs(row.mass - kM), 1e-15);
  }
  // ||u(t)||_inf decays like (t+1)^{-3/2} once the peak has left the hole.
  std::vector<double> t, sup;
  for (const auto& f : snaps) {
    if (f.time < 100.0) continue;
    t.push_back(f.time);
    sup.push_back(lp_norm(*grid, f.values, kInf));
  }
  EXPECT_NEAR(rate_fit(t, sup).exponent, -1.5, 0.1);
  // The sup error beats t^{-3/2}.
  EXPECT_LE(rate_fit(series, kInf, 10.0, 1000.0).exponent, -1.6);
  const auto ordered = series.for_p(kInf);
  ASSERT_EQ(ordered.size(), 7u);
  for (std::size_t k = 1; k < ordered.size(); ++k) EXPECT_LT(ordered[k - 1].t, ordered[k].t);
}

TEST(MassConvergence, ExplicitMassLaw) {
  MassLedger ledger;
  for (int k = 0; k <= 99; ++k) ledger.rows.push_back({double(k), explicit_solution_mass(k), 0.0});
  const MassConvergence mc = mass_convergence(ledger, kM);
  EXPECT_NEAR(mc.final_gap, 0.6283185307179586, 1e-12);
  EXPECT_TRUE(mc.nonincreasing);
  EXPECT_EQ(mc.gap.size(), 100u);
  EXPECT_NEAR(mc.gap.front(), 2.0 * pi, 1e-12);

  ledger.rows[50].mass += 0.1;
  const MassConvergence bumped = mass_convergence(ledger, kM);
  EXPECT_FALSE(bumped.nonincreasing);
  EXPECT_NEAR(bumped.worst_increase, 0.1 - (explicit_solution_mass(49) - explicit_solution_mass(50)), 1e-12);
  EXPECT_THROW(mass_convergence(MassLedger{}, kM), PreconditionError);
}

TEST(MassConvergence, NeumannGapIsZero) {
  MassLedger ledger;
  for (int k = 0; k < 10; ++k) ledger.rows.push_back({double(k), 4.25, 0.0});
  const MassConvergence mc = mass_convergence(ledger, 4.25);
  EXPECT_EQ(mc.final_gap, 0.0);
  EXPECT_EQ(mc.worst_increase, 0.0);
}

TEST(MassConvergence, TwoDimensionalDirichletLosesEverything) {
  const auto grid = Grid::radial(2, 1.0, 80.0, 632);
  const Field u0 = make_field(grid, [](double r, double) { return (r - 1) * std::exp(-(r - 3) * (r - 3)); });
  StepperConfig cfg;
  cfg.dt = 0.125;
  cfg.snapshot_times = {100.0};
  const Evolution evo = evolve_radial(ExteriorDomain(2, BallHole{1.0}, 80.0), ThetaBoundary::dirichlet(), u0, cfg);
  const ProfileTable zero = profile_radial_closed_form(2, 1.0, ThetaBoundary::dirichlet());
  ASSERT_TRUE(zero.all_mass_lost());
  EXPECT_EQ(asymptotic_mass(u0, zero), 0.0);
  const MassConvergence mc = mass_convergence(evo.ledger, 0.0);
  EXPECT_TRUE(mc.nonincreasing);
  EXPECT_LT(mc.final_gap, mc.gap.front());
}

TEST(NeumannErrors, L1ErrorWithinTheTimeShiftBound) {
  // u0 = G(., 1) outside the unit ball; Phi = 1, m = int u0.
  const double r_out = far_radius_for(1.0, 200.0);
  const auto grid = Grid::radial(3, 1.0, r_out, static_cast<int>(std::ceil((r_out - 1.0) * 16.0)));
  const Field u0 = make_field(grid, [](double r, double) { return gaussian_value(r, {3, 1.0}); });
  const ProfileTable one = profile_radial_closed_form(3, 1.0, ThetaBoundary::neumann());
  const double m = asymptotic_mass(u0, one);
  EXPECT_NEAR(m, integral(*grid, u0.values), 1e-15);
  EXPECT_NEAR(m, 1.0 - gaussian_ball_mass_3d(0.0, 1.0, 1.0), 5e-4);
  StepperConfig cfg;
  cfg.dt = 1.0 / 32.0;
  cfg.snapshot_times = {100.0, 200.0};
  const Evolution evo = evolve_radial(ExteriorDomain(3, BallHole{1.0}, r_out), ThetaBoundary::neumann(), u0, cfg);
  for (const auto& s : evo.snapshots) {
    const double err = error_norms(s, m, one, {1.0})[0].raw;
    EXPECT_LE(err, m * gaussian_l1_time_shift_bound(s.time, 1.0, 3)) << "t = " << s.time;
  }
}

namespace {

// Probe whose snapshot is exactly G(. - y, t + t0) on a hole-free grid.
KernelProbe synthetic_probe(double y, double t, double offset) {
  const auto grid = Grid::axisymmetric(40.0, -40.0, 40.0, 160, 320, 0.0);
  KernelProbe probe;
  probe.source_z = y;
  probe.time_offset = offset;
  probe.initial_mass = 1.0;
  probe.snapshots.push_back(make_field(
      grid, [&](double rho, double z) { return gaussian_value(std::hypot(rho, z - y), {3, t + offset}); }, t));
  return probe;
}

}  // namespace

TEST(KernelGap, BoundValues) {
  const ProfileTable profile = dirichlet3();
  const KernelGap g3 = kernel_l1_gap(synthetic_probe(3.0, 10.0, 0.0), 10.0, profile);
  EXPECT_NEAR(g3.bound, 0.66901103856709, 1e-12);
  EXPECT_NEAR(g3.hole_term, 0.002344371900425715124, 1e-14);
  EXPECT_LE(g3.hole_term, 4.0 / 3.0 * pi * std::pow(40.0 * pi, -1.5));
  EXPECT_NEAR(g3.gap, 0.0, 1e-3);  // only quadrature error remains
  EXPECT_TRUE(g3.passed);
  EXPECT_EQ(g3.tolerance, 0.0);
  const KernelGap g6 = kernel_l1_gap(synthetic_probe(-6.0, 10.0, 0.0), 10.0, profile);
  EXPECT_NEAR(g6.bound, 0.33453503365745, 1e-12);
  EXPECT_DOUBLE_EQ(g6.source_distance, 6.0);
}

TEST(KernelGap, BoundShrinksToTheHoleTermFarAway) {
  const ProfileTable profile = dirichlet3();
  double prev = kInf;
  for (double y : {3.0, 6.0, 12.0, 24.0}) {
    const KernelGap g = kernel_l1_gap(synthetic_probe(y, 4.0, 0.0), 4.0, profile);
    EXPECT_LT(g.bound, prev);
    EXPECT_NEAR(g.bound - g.hole_term, 2.0 / y, 1e-14);
    prev = g.bound;
  }
}

TEST(KernelGap, ToleranceIncludesTheTimeShift) {
  const ProfileTable profile = dirichlet3();
  const KernelGap g = kernel_l1_gap(synthetic_probe(3.0, 5.0, 0.02), 5.0, profile);
  EXPECT_NEAR(g.tolerance, gaussian_l1_time_shift_bound(5.0, 0.02, 3), 1e-15);
}

TEST(KernelGap, Preconditions) {
  const ProfileTable profile = dirichlet3();
  KernelProbe probe = synthetic_probe(3.0, 10.0, 0.0);
  EXPECT_THROW(kernel_l1_gap(probe, 10.0, profile, true), PreconditionError);
  EXPECT_THROW(kernel_l1_gap(probe, 7.0, profile), PreconditionError);
  EXPECT_THROW(kernel_l1_gap(probe, 10.0, profile_radial_closed_form(3, 1.0, ThetaBoundary(0.5))), PreconditionError);
  probe.initial_mass = 1.02;
  EXPECT_THROW(kernel_l1_gap(probe, 10.0, profile), PreconditionError);
  probe.initial_mass = 1.005;
  EXPECT_NO_THROW(kernel_l1_gap(probe, 10.0, profile));
}

TEST(Herraiz, ComparisonAtOneHundred) {
  const HerraizComparison c = herraiz_compare(100.0);
  ASSERT_EQ(c.r.size(), 4001u);
  EXPECT_DOUBLE_EQ(c.r.front(), 1.0);
  EXPECT_DOUBLE_EQ(c.r.back(), 81.0);
  EXPECT_LT(c.gap_theorem, c.gap_herraiz);
  EXPECT_LE(c.gap_theorem, 0.1);
  EXPECT_GE(c.gap_herraiz, 0.4);
  EXPECT_NEAR(c.peak_ratio, 1.564189583547756287, 0.02 * 1.564189583547756287);
  EXPECT_GT(c.peak_ratio, 1.0);
}

TEST(Herraiz, PredictionGapShrinksWithTime) {
  const HerraizComparison early = herraiz_compare(100.0);
  const HerraizComparison late = herraiz_compare(1000.0);
  EXPECT_LT(late.gap_theorem, early.gap_theorem);
  EXPECT_NEAR(late.peak_ratio, 1.564189583547756287, 0.01);
}

TEST(Herraiz, WithoutTheProfileTheCurvesDifferByTheMassRatio) {
  const HerraizComparison c = herraiz_compare(50.0, false, 301);
  const double ratio = explicit_solution_mass(0.0) / explicit_asymptotic_mass();
  for (std::size_t k = 0; k < c.r.size(); ++k) {
    EXPECT_NEAR(c.herraiz[k], ratio * c.theorem[k], 1e-15 * c.herraiz[k]);
    EXPECT_NEAR(c.theorem[k], kM * gaussian_value(c.r[k], {3, 50.0}), 1e-15 * c.theorem[k] + 1e-300);
  }
  EXPECT_THROW(herraiz_compare(9.99), PreconditionError);
  EXPECT_THROW(herraiz_compare(20.0, true, 1), PreconditionError);
}

class Optimality : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    const auto grid = Grid::radial(3, 0.0, 1.0, 256);
    StepperConfig cfg;
    cfg.dt = 1.0 / 2048.0;
    cfg.snapshot_times = {1.0};
    cfg.ledger_interval = 1.0 / 512.0;
    ball_ = new Evolution(evolve_ball(make_field(grid, [](double r, double) { return unit_ball_eigenfunction_3d(r); }), cfg));
  }
  static void TearDownTestSuite() {
    delete ball_;
    ball_ = nullptr;
  }
  static Evolution* ball_;
};

Evolution* Optimality::ball_ = nullptr;

TEST_F(Optimality, EigenDecayMatchesPiSquared) {
  const double m0 = ball_->ledger.rows.front().mass;
  for (const auto& row : ball_->ledger.rows) {
    EXPECT_NEAR(row.mass / m0, std::exp(-pi * pi * row.t), 1e-3 * std::exp(-pi * pi * row.t));
  }
  EXPECT_NEAR(eigen_decay_exponent(ball_->ledger, 0.1, 0.9).slope, -pi * pi, 1e-2);
}

TEST_F(Optimality, L1LowerBoundForEveryPlannedComponent) {
  const OptimalDatumPlan plan = optimal_datum_plan(DecreasingFunction::parse("recip:4"), 4);
  for (const auto& row : plan.rows) {
    const L1OptimalityReport r = optimality_check_l1(plan, row.n, ball_->ledger);
    EXPECT_TRUE(r.passed) << "n = " << row.n;
    EXPECT_GE(r.retained_mass, r.mass_floor);
    EXPECT_LE(r.gaussian_term, r.gaussian_cap);
    EXPECT_GE(r.l1_lower, std::ldexp(1.0, -(row.n + 1)));
    EXPECT_LE(r.g_at_t_n, r.l1_lower);
    EXPECT_NEAR(r.g_at_t_n, std::ldexp(1.0, -(row.n + 2)), 1e-12);
    // Gaussian smallness against the exact ball mass as well.
    EXPECT_LE(gaussian_ball_mass_3d(row.centre, row.radius, row.t_next), r.gaussian_cap);
  }
}

TEST_F(Optimality, L1Preconditions) {
  OptimalDatumPlan plan = optimal_datum_plan(DecreasingFunction::parse("recip:4"), 2);
  EXPECT_THROW(optimality_check_l1(plan, 7, ball_->ledger), PreconditionError);
  EXPECT_THROW(optimality_check_l1(plan, 1, MassLedger{}), PreconditionError);
  plan.rows[0].radius = 1.0;
  try {
    optimality_check_l1(plan, 1, ball_->ledger);
    FAIL() << "expected a precondition error";
  } catch (const PreconditionError& e) {
    EXPECT_NE(std::string(e.what()).find("(i)"), std::string::npos) << e.what();
  }
}

TEST_F(Optimality, LinfLowerBound) {
  const Field& at_one = ball_->snapshots.front();
  const auto rows = optimality_check_linf(at_one, {1.0, 10.0, 100.0, 1000.0});
  ASSERT_EQ(rows.size(), 4u);
  const double bound = std::exp(-pi * pi) * (pi / 4.0) / 2.0;
  for (const auto& row : rows) {
    EXPECT_TRUE(row.passed);
    EXPECT_NEAR(row.bound, bound, 1e-15);
    EXPECT_NEAR(row.bound, 2.031164772476921e-5, 1e-18);
    EXPECT_NEAR(row.scaled_sup, 2.0 * bound, 1e-3 * bound);  // sup = e^{-lambda} psi(0)
    EXPECT_DOUBLE_EQ(row.radius, std::sqrt(row.t));
  }
  EXPECT_THROW(optimality_check_linf(at_one, {0.0}), PreconditionError);
  Field early = at_one;
  early.time = 0.5;
  EXPECT_THROW(optimality_check_linf(early, {1.0}), PreconditionError);
  const Field exterior = make_field(Grid::radial(3, 1.0, 2.0, 64), [](double, double) { return 0.0; }, 1.0);
  EXPECT_THROW(optimality_check_linf(exterior, {1.0}), PreconditionError);
}

TEST(OrderingViolation, Basics) {
  const auto grid = Grid::radial(3, 1.0, 5.0, 64);
  const Field lo = make_field(grid, [](double r, double) { return 1.0 / r; });
  const Field hi = make_field(grid, [](double r, double) { return 1.0 / r + (r > 3.0 ? -0.25 : 0.0); });
  EXPECT_EQ(ordering_violation(hi, lo), 0.0);
  EXPECT_NEAR(ordering_violation(lo, hi), 0.25, 1e-15);
  const Field other = make_field(Grid::radial(3, 1.0, 5.0, 65), [](double, double) { return 0.0; });
  EXPECT_THROW(ordering_violation(lo, other), ShapeError);
}
