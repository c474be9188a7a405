#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "heatext/domain.hpp"
#include "heatext/errors.hpp"
#include "heatext/profile.hpp"

using namespace heatext;
using std::numbers::pi;

TEST(RobinCoefficient, KnownAngles) {
  EXPECT_NEAR(robin_coefficient(1.0), 0.0, 1e-15);
  EXPECT_NEAR(robin_coefficient(0.5), 1.0, 1e-14);
  EXPECT_NEAR(robin_coefficient(1.0 / 3.0), 1.7320508075688772, 1e-13);
}

TEST(RobinCoefficient, RejectsThetaOutsideHalfOpenInterval) {
  EXPECT_THROW(robin_coefficient(0.0), DomainError);
  EXPECT_THROW(robin_coefficient(-0.1), DomainError);
  EXPECT_THROW(robin_coefficient(1.0 + 1e-12), DomainError);
  EXPECT_THROW(robin_coefficient(std::nan("")), DomainError);
}

TEST(RobinCoefficient, StrictlyDecreasingWithLimits) {
  double prev = robin_coefficient(1e-6);
  EXPECT_GT(prev, 1e5);
  for (int k = 1; k <= 1000; ++k) {
    const double theta = k / 1000.0;
    const double b = robin_coefficient(theta);
    EXPECT_GE(b, 0.0);
    EXPECT_LT(b, prev) << "theta = " << theta;
    prev = b;
  }
  EXPECT_LT(robin_coefficient(1.0 - 1e-9), 1e-8);
}

TEST(RobinCoefficient, DividingTheBoundaryOperatorGivesRobinForm) {
  for (double theta : {0.1, 0.25, 0.5, 0.9}) {
    const double s = std::sin(pi * theta / 2), c = std::cos(pi * theta / 2);
    // s du/dn + c u = 0 with du/dn = 1 forces u = -s / c, then du/dn + b u = 0.
    const double u = -s / c;
    EXPECT_NEAR(1.0 + robin_coefficient(theta) * u, 0.0, 1e-12);
  }
}

TEST(ThetaBoundary, DirichletAndNeumannFlags) {
  const ThetaBoundary d = ThetaBoundary::dirichlet();
  EXPECT_TRUE(d.is_dirichlet());
  EXPECT_FALSE(d.is_neumann());
  EXPECT_TRUE(std::isinf(d.robin_b()));
  const ThetaBoundary n = ThetaBoundary::neumann();
  EXPECT_TRUE(n.is_neumann());
  EXPECT_EQ(n.robin_b(), 0.0);
  const ThetaBoundary r(0.5);
  EXPECT_FALSE(r.is_dirichlet());
  EXPECT_FALSE(r.is_neumann());
  EXPECT_NEAR(r.robin_b(), 1.0, 1e-14);
}

TEST(ThetaBoundary, RejectsOutOfRange) {
  EXPECT_THROW(ThetaBoundary(-0.01), DomainError);
  EXPECT_THROW(ThetaBoundary(1.01), DomainError);
  EXPECT_THROW(ThetaBoundary(std::nan("")), DomainError);
}

TEST(ThetaBoundary, RobinBNonincreasingInTheta) {
  double prev = kInf;
  for (int k = 0; k <= 64; ++k) {
    const ThetaBoundary t(k / 64.0);
    EXPECT_LE(t.robin_b(), prev);
    prev = t.robin_b();
  }
}

TEST(OutwardNormal, PointsIntoTheHole) {
  EXPECT_EQ(outward_normal_sign_at_hole(), -1);
  // dPhi/dn at r = a for Phi = 1 - a/r, N = 3.
  for (double a : {0.5, 1.0, 2.0}) {
    const double dphi_dr = 1.0 / a;  // a / r^2 at r = a
    EXPECT_NEAR(outward_normal_sign_at_hole() * dphi_dr, -1.0 / a, 1e-15);
  }
}

TEST(SphereSurfaceArea, CircleAndSphere) {
  EXPECT_NEAR(sphere_surface_area(2), 2 * pi, 1e-14);
  EXPECT_NEAR(sphere_surface_area(3), 4 * pi, 1e-14);
  EXPECT_THROW(sphere_surface_area(1), DomainError);
  EXPECT_THROW(sphere_surface_area(4), DomainError);
}

TEST(SphereSurfaceArea, PolarCoordinatesReproduceBallVolume) {
  // |B(0, 2)| via omega int_0^2 r^{N-1} dr.
  EXPECT_NEAR(sphere_surface_area(3) * 8.0 / 3.0, 4.0 / 3.0 * pi * 8.0, 1e-12);
  EXPECT_NEAR(sphere_surface_area(2) * 4.0 / 2.0, pi * 4.0, 1e-12);
}

TEST(ExteriorDomain, AcceptsValidConfigurations) {
  const ExteriorDomain ball3(3, BallHole{1.0}, 10.0);
  EXPECT_EQ(ball3.dim(), 3);
  EXPECT_TRUE(ball3.has_ball_hole());
  EXPECT_DOUBLE_EQ(ball3.hole_radius(), 1.0);
  const ExteriorDomain rect(2, RectHole{1.0, 0.5}, 20.0);
  EXPECT_FALSE(rect.has_ball_hole());
  EXPECT_NEAR(rect.hole_radius(), std::hypot(1.0, 0.5), 1e-15);
  EXPECT_DOUBLE_EQ(ball3.with_far_radius(40.0).far_radius(), 40.0);
}

TEST(ExteriorDomain, RejectsInvalidConfigurations) {
  EXPECT_THROW(ExteriorDomain(1, BallHole{1.0}, 10.0), DomainError);
  EXPECT_THROW(ExteriorDomain(4, BallHole{1.0}, 10.0), DomainError);
  EXPECT_THROW(ExteriorDomain(3, BallHole{0.0}, 10.0), DomainError);
  EXPECT_THROW(ExteriorDomain(3, BallHole{-1.0}, 10.0), DomainError);
  EXPECT_THROW(ExteriorDomain(3, RectHole{1.0, 1.0}, 10.0), DomainError);
  EXPECT_THROW(ExteriorDomain(2, RectHole{0.0, 1.0}, 10.0), DomainError);
  // Far radius must exceed the hole and be at least four hole radii.
  EXPECT_THROW(ExteriorDomain(3, BallHole{1.0}, 1.0), DomainError);
  EXPECT_THROW(ExteriorDomain(3, BallHole{1.0}, 3.9), DomainError);
  EXPECT_THROW(ExteriorDomain(2, RectHole{3.0, 3.0}, 16.0), DomainError);
  EXPECT_NO_THROW(ExteriorDomain(3, BallHole{1.0}, 4.0));
}

TEST(HoleGeometry, Containment) {
  const HoleSpec ball = BallHole{1.0};
  EXPECT_TRUE(hole_contains(ball, 0.0, 0.0));
  EXPECT_TRUE(hole_contains(ball, 1.0, 0.0));
  EXPECT_FALSE(hole_contains(ball, 0.8, 0.7));
  const HoleSpec rect = RectHole{2.0, 0.5};
  EXPECT_TRUE(hole_contains(rect, 1.9, -0.5));
  EXPECT_FALSE(hole_contains(rect, 1.9, 0.6));
  EXPECT_FALSE(hole_contains(rect, 2.1, 0.0));
  EXPECT_DOUBLE_EQ(circumscribed_radius(ball), 1.0);
}

TEST(FarRadiusRule, HoleRadiusPlusSixDiffusionLengths) {
  EXPECT_NEAR(far_radius_for(1.0, 100.0), 1.0 + 6.0 * std::sqrt(400.0), 1e-12);
  // The Gaussian tail beyond 6 sqrt(4 T) is below 1e-6 of the mass in N = 3:
  // P(|X| > 6 sqrt(4T)) for X ~ G(., T) = erfc(6) + (12/sqrt(pi)) e^{-36}.
  const double tail = std::erfc(6.0) + 12.0 / std::sqrt(pi) * std::exp(-36.0);
  EXPECT_LT(tail, 1e-6);
}
