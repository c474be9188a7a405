#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "heatext/constructions.hpp"
#include "heatext/errors.hpp"
#include "heatext/gaussian.hpp"
#include "oracles.hpp"

using namespace heatext;
using std::numbers::pi;

TEST(ExplicitSolution, Values) {
  EXPECT_EQ(explicit_solution(1.0, 0.0), 0.0);
  EXPECT_EQ(explicit_solution(1.0, 37.0), 0.0);
  EXPECT_NEAR(explicit_solution(2.0, 0.0), 0.0973500978839256085, 1e-16);
  EXPECT_NEAR(explicit_solution(2.0, 0.0), std::exp(-0.25) / 8.0, 1e-16);
  EXPECT_NEAR(explicit_solution(3.0, 5.0), 0.009599297697097089413, 1e-17);
  EXPECT_THROW(explicit_solution(0.999, 1.0), DomainError);
  EXPECT_THROW(explicit_solution(2.0, -0.5), DomainError);
}

TEST(ExplicitSolution, HeatEquationResidualAtRandomPoints) {
  std::mt19937_64 rng(4242);
  std::uniform_real_distribution<double> rd(1.05, 30.0), td(0.05, 50.0);
  for (int k = 0; k < 100; ++k) {
    const long double r = rd(rng), t = td(rng);
    const long double er = 1e-4L * r, et = 1e-4L * t;
    auto u = [](long double rr, long double tt) { return oracle::exact_u(rr, tt); };
    const long double ut = (u(r, t + et) - u(r, t - et)) / (2 * et);
    const long double ur = (u(r + er, t) - u(r - er, t)) / (2 * er);
    const long double urr = (u(r + er, t) - 2 * u(r, t) + u(r - er, t)) / (er * er);
    EXPECT_LE(std::fabs(ut - urr - 2 / r * ur), 1e-6L) << "r " << static_cast<double>(r) << " t " << static_cast<double>(t);
    EXPECT_NEAR(explicit_solution(static_cast<double>(r), static_cast<double>(t)), static_cast<double>(u(r, t)), 1e-15);
  }
}

TEST(ExplicitSolutionMass, ClosedFormAndQuadrature) {
  EXPECT_NEAR(explicit_solution_mass(0.0), 17.419841300843002167, 1e-12);
  EXPECT_NEAR(explicit_asymptotic_mass(), 11.136655993663415691, 1e-12);
  EXPECT_NEAR(explicit_solution_mass(1e12), explicit_asymptotic_mass(), 1e-5);
  for (double t : {0.0, 1.0, 10.0, 100.0}) {
    const long double cutoff = 1.0L + 16.0L * std::sqrt(t + 1.0L);
    const long double q = oracle::radial_integral([t](long double r) { return oracle::exact_u(r, t); }, 3, 1.0L, cutoff, 40000);
    EXPECT_NEAR(explicit_solution_mass(t), static_cast<double>(q), 1e-6) << "t = " << t;
    EXPECT_NEAR(static_cast<double>(oracle::exact_mass(t)), explicit_solution_mass(t), 1e-12);
  }
}

TEST(ExplicitSolutionMass, InitialSlopeIsTheBoundaryFlux) {
  const double h = 1e-5;
  const double dm = (explicit_solution_mass(h) - explicit_solution_mass(0.0)) / h;
  EXPECT_NEAR(dm, -pi, 1e-4);
  // omega_2 * 1^2 * du/dn with du/dn = -u_r(1, 0) = -1/4.
  const double ur = (explicit_solution(1.0 + 1e-6, 0.0) - explicit_solution(1.0, 0.0)) / 1e-6;
  EXPECT_NEAR(ur, 0.25, 1e-6);
  EXPECT_NEAR(4.0 * pi * -ur, -pi, 1e-5);
}

TEST(ExplicitSolutionMass, AsymptoticMassIsTheProfileWeightedIntegral) {
  const long double q = oracle::radial_integral(
      [](long double r) { return (1.0L - 1.0L / r) * oracle::exact_u(r, 0.0L); }, 3, 1.0L, 40.0L, 40000);
  EXPECT_NEAR(static_cast<double>(q), explicit_asymptotic_mass(), 1e-6);
}

TEST(RadialZ, Identity) {
  EXPECT_NEAR(radial_z_coefficient(0.25, 3), 3.0 / 16.0, 1e-16);
  EXPECT_EQ(radial_z_coefficient(0.0, 3), 0.0);
  const RadialZ z = radial_z(5.0, 0.4);
  EXPECT_NEAR(z.value, std::pow(5.0, -0.4), 1e-16);
  EXPECT_LE(z.identity_residual, 1e-8);
  const RadialZ one = radial_z(3.0, 0.0);
  EXPECT_EQ(one.value, 1.0);
  EXPECT_LE(one.identity_residual, 1e-12);
  for (double r : {0.5, 1.0, 2.0, 10.0, 50.0}) {
    for (double gamma : {0.1, 0.25, 0.5, 0.9}) EXPECT_LE(radial_z(r, gamma).identity_residual, 1e-6 * std::pow(r, -gamma - 2));
  }
  EXPECT_THROW(radial_z(0.0, 0.25), DomainError);
}

TEST(SupersolutionZ, ClosedFormValues) {
  const ProfileTable p = profile_radial_closed_form(3, 1.0, ThetaBoundary::dirichlet());
  // Psi = 1/r on the unit-ball geometry.
  for (double r : {1.0, 2.0, 7.0}) EXPECT_NEAR(psi_at_radius(p, r), 1.0 / r, 1e-15);
  const SubSuperParams params{0.25, 2.0, 0.0, 0.0};
  const double t = 4.0, r = 3.0;
  EXPECT_NEAR(supersolution_Z(params, p, r, t), std::pow(t, -1.625) * (std::pow(r, -0.25) + 2.0 / r), 1e-15);
  // dZ/dn at r = 1 is -dZ/dr = t^{-(N+gamma)/2} (gamma + kappa) > 0 for kappa = 1.
  const SubSuperParams unit{0.25, 1.0, 0.0, 0.0};
  const double eps = 1e-6;
  const double dzdn = -(supersolution_Z(unit, p, 1.0 + eps, t) - supersolution_Z(unit, p, 1.0, t)) / eps;
  EXPECT_NEAR(dzdn, std::pow(t, -1.625) * 1.25, 1e-6);
  EXPECT_GT(dzdn, 0.0);
  EXPECT_THROW(supersolution_Z(params, p, 2.0, 0.0), DomainError);
}

TEST(SupersolutionZ, ReportPassesOnTheDirichletGeometry) {
  const ProfileTable p = profile_radial_closed_form(3, 1.0, ThetaBoundary::dirichlet());
  const ZReport report = supersolution_Z_report({0.25, 0.0, 0.0, 0.0}, p);
  EXPECT_TRUE(report.all_passed) << report.to_text();
  for (const auto& item : report.items) EXPECT_TRUE(item.passed) << item.name << ": " << item.detail;
  EXPECT_GT(report.kappa, 0.0);
  EXPECT_GE(report.kappa, report.kappa_threshold);
  EXPECT_GT(report.m, 0.0);
  EXPECT_GT(report.delta, 0.0);
  EXPECT_GT(report.c, 0.0);
  EXPECT_GT(report.sigma, 0.0);
  // 1/r <= r^{-1/4} on r >= 1, so the fitted C2 is 1.
  EXPECT_NEAR(report.c2, 1.0, 1e-9);
  EXPECT_NE(report.to_text().find("verdict: PASS"), std::string::npos);
}

TEST(SupersolutionZ, ReportPreconditions) {
  const ProfileTable robin = profile_radial_closed_form(3, 1.0, ThetaBoundary(0.5));
  EXPECT_THROW(supersolution_Z_report({0.25, 0.0, 0.0, 0.0}, robin), PreconditionError);
  const ProfileTable neumann = profile_radial_closed_form(3, 1.0, ThetaBoundary::neumann());
  EXPECT_THROW(supersolution_Z_report({0.25, 0.0, 0.0, 0.0}, neumann), PreconditionError);
  const ProfileTable plane = profile_radial_closed_form(2, 1.0, ThetaBoundary::dirichlet());
  EXPECT_THROW(supersolution_Z_report({0.25, 0.0, 0.0, 0.0}, plane), PreconditionError);
  const ProfileTable p = profile_radial_closed_form(3, 1.0, ThetaBoundary::dirichlet());
  EXPECT_THROW(supersolution_Z_report({0.0, 0.0, 0.0, 0.0}, p), PreconditionError);
  EXPECT_THROW(supersolution_Z_report({1.0, 0.0, 0.0, 0.0}, p), PreconditionError);
}

TEST(SupersolutionZ, ReportCarriesWitnesses) {
  const ProfileTable p = profile_radial_closed_form(3, 1.0, ThetaBoundary::dirichlet());
  const ZReport report = supersolution_Z_report({0.25, 0.0, 0.0, 0.0}, p);
  for (const auto& item : report.items) {
    EXPECT_FALSE(item.name.empty());
    EXPECT_GT(item.witness_t, 0.0);
    EXPECT_GE(item.witness_r, 1.0);
    EXPECT_NE(report.to_text().find(item.name), std::string::npos);
  }
}

TEST(UnitBallEigenpair, Facts) {
  EXPECT_NEAR(unit_ball_eigenvalue_3d(), pi * pi, 1e-15);
  EXPECT_NEAR(unit_ball_eigenfunction_3d(0.0), pi / 4.0, 1e-16);
  EXPECT_EQ(unit_ball_eigenfunction_3d(1.0 + 1e-9), 0.0);
  EXPECT_NEAR(unit_ball_eigenfunction_3d(1.0), 0.0, 1e-16);
  // L^1(B) normalization and the eigen-equation -psi'' - (2/r) psi' = pi^2 psi.
  const long double mass = oracle::radial_integral(
      [](long double r) { return static_cast<long double>(unit_ball_eigenfunction_3d(static_cast<double>(r))); }, 3,
      0.0L, 1.0L, 4000);
  EXPECT_NEAR(static_cast<double>(mass), 1.0, 1e-10);
  for (double r : {0.1, 0.4, 0.8}) {
    const double h = 1e-4;
    const double f = unit_ball_eigenfunction_3d(r);
    const double fr = (unit_ball_eigenfunction_3d(r + h) - unit_ball_eigenfunction_3d(r - h)) / (2 * h);
    const double frr = (unit_ball_eigenfunction_3d(r + h) - 2 * f + unit_ball_eigenfunction_3d(r - h)) / (h * h);
    EXPECT_NEAR(-frr - 2.0 / r * fr, pi * pi * f, 1e-5);
  }
}

TEST(DecreasingFunction, Descriptors) {
  EXPECT_NEAR(DecreasingFunction::parse("recip:4")(4.0), 0.125, 1e-16);
  EXPECT_NEAR(DecreasingFunction::parse("pow:0.5")(3.0), 0.5, 1e-16);
  EXPECT_NEAR(DecreasingFunction::parse("exp:2")(1.0), std::exp(-2.0), 1e-16);
  EXPECT_NEAR(DecreasingFunction::parse("log")(0.0), 1.0, 1e-16);
  EXPECT_EQ(DecreasingFunction::parse("recip:4").descriptor, "recip:4");
  for (const char* bad : {"recip:0.5", "recip:x", "pow:0", "pow:-1", "exp:0", "sqrt:2", ""}) {
    EXPECT_THROW(DecreasingFunction::parse(bad), InputError) << bad;
  }
}

TEST(OptimalDatumPlan, ReciprocalRowsFrozen) {
  const OptimalDatumPlan plan = optimal_datum_plan(DecreasingFunction::parse("recip:4"), 4);
  ASSERT_EQ(plan.rows.size(), 4u);
  EXPECT_FALSE(plan.truncated);
  EXPECT_NEAR(plan.lambda, pi * pi, 1e-15);
  EXPECT_NEAR(plan.psi_peak, pi / 4.0, 1e-16);
  struct Row {
    int n;
    double t_n, t_next, radius, centre;
  };
  const Row expected[] = {
      {1, 4.0, 12.0, 21.0, 345.93325924884067},
      {2, 12.0, 28.0, 31.0, 813.10338627237202},
      {3, 28.0, 60.0, 46.0, 1867.4149395643481},
      {4, 60.0, 124.0, 66.0, 4144.2142027607090},
  };
  for (std::size_t k = 0; k < 4; ++k) {
    const PlanRow& row = plan.rows[k];
    EXPECT_EQ(row.n, expected[k].n);
    EXPECT_NEAR(row.t_n, expected[k].t_n, 1e-9);
    EXPECT_NEAR(row.t_next, expected[k].t_next, 1e-9);
    EXPECT_EQ(row.radius, expected[k].radius);
    EXPECT_NEAR(row.centre, expected[k].centre, 1e-8 * expected[k].centre);
    EXPECT_EQ(row.weight, std::ldexp(1.0, -row.n));
    EXPECT_NEAR(plan.g(row.t_n), std::ldexp(1.0, -(row.n + 2)), 1e-14);
  }
}

TEST(OptimalDatumPlan, RadiusMeetsTheEigenDecayThreshold) {
  const OptimalDatumPlan plan = optimal_datum_plan(DecreasingFunction::parse("pow:0.5"), 5);
  for (const auto& row : plan.rows) {
    const double threshold = pi * std::sqrt(row.t_next / std::log(4.0 / 3.0));
    EXPECT_NEAR(threshold / std::sqrt(row.t_next), 5.857, 1e-3);
    EXPECT_GE(row.radius, threshold);
    EXPECT_LT(row.radius - 1.0, std::max(threshold, 2.0) + 1.0);
  }
}

class PlanInvariants : public ::testing::TestWithParam<const char*> {};

TEST_P(PlanInvariants, ConditionsHoldAndRowsIncrease) {
  const OptimalDatumPlan plan = optimal_datum_plan(DecreasingFunction::parse(GetParam()), 6);
  ASSERT_FALSE(plan.rows.empty());
  for (std::size_t k = 0; k < plan.rows.size(); ++k) {
    const PlanRow& row = plan.rows[k];
    const PlanConditions c = check_plan_row(plan, row);
    EXPECT_TRUE(c.all()) << GetParam() << " n = " << row.n << " " << c.first_failure();
    EXPECT_EQ(c.first_failure(), "");
    // Condition (iii) re-evaluated directly, as printed.
    const long double lhs = -(row.centre - row.radius) / (4.0L * row.t_next);
    const long double rhs = 1.5L * std::log(4.0L * oracle::kPi * row.t_n) - (row.n + 2) * std::log(2.0L) -
                            std::log(4.0L / 3.0L * oracle::kPi) - 3.0L * std::log(static_cast<long double>(row.radius));
    EXPECT_LE(lhs, rhs + 1e-12L * std::fabs(rhs));
    EXPECT_GE(std::exp(-pi * pi * row.t_next / (row.radius * row.radius)), 0.75);
    EXPECT_GT(row.centre, row.radius + 1.0);
    if (k > 0) {
      const PlanRow& prev = plan.rows[k - 1];
      EXPECT_GT(row.t_n, prev.t_n);
      EXPECT_GT(row.radius, prev.radius);
      EXPECT_GT(row.centre, prev.centre);
      EXPECT_EQ(row.t_n, prev.t_next);
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Descriptors, PlanInvariants, ::testing::Values("recip:4", "recip:1", "pow:0.5", "pow:2", "log"));

TEST(OptimalDatumPlan, FailuresAreNamed) {
  OptimalDatumPlan plan = optimal_datum_plan(DecreasingFunction::parse("recip:4"), 2);
  PlanRow row = plan.rows[0];
  row.radius = 2.0;
  EXPECT_EQ(check_plan_row(plan, row).first_failure(), "(i) eigen-decay");
  row = plan.rows[0];
  row.centre = row.radius + 0.5;
  EXPECT_EQ(check_plan_row(plan, row).first_failure(), "(ii) ball inside Omega beyond R_n + 1");
  row = plan.rows[0];
  row.centre = row.radius + 2.0;
  EXPECT_EQ(check_plan_row(plan, row).first_failure(), "(iii) Gaussian smallness");
}

TEST(OptimalDatumPlan, Errors) {
  const auto g = DecreasingFunction::parse("recip:4");
  EXPECT_THROW(optimal_datum_plan(g, 0), PreconditionError);
  EXPECT_THROW(optimal_datum_plan(g, 9), PreconditionError);
  EXPECT_THROW(optimal_datum_plan(g, 3, 2), UnsupportedFeature);
  // g(0) below the first level 1/8.
  EXPECT_THROW(optimal_datum_plan(DecreasingFunction::parse("recip:10"), 3), InputError);
  // Not decreasing.
  DecreasingFunction rising{"custom", [](double t) { return std::min(1.0, 0.2 + 0.01 * t); }};
  EXPECT_THROW(optimal_datum_plan(rising, 2), InputError);
  // A fast exponential overflows nothing but a constant never reaches the levels.
  DecreasingFunction flat{"flat", [](double) { return 0.5; }};
  const OptimalDatumPlan truncated = optimal_datum_plan(flat, 3);
  EXPECT_TRUE(truncated.truncated);
  EXPECT_TRUE(truncated.rows.empty());
  EXPECT_FALSE(truncated.warning.empty());
}
