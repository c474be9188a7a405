#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "heatext/asymptotics.hpp"
#include "heatext/solver.hpp"

using namespace heatext;

namespace {

struct Datum {
  const char* name;
  std::function<double(double, double)> f;
};

// Smooth and rough nonnegative data; both vanish on the hole.
std::vector<Datum> radial_data() {
  return {
      {"bump", [](double r, double) { return std::exp(-4.0 * (r - 4.0) * (r - 4.0)); }},
      {"shell", [](double r, double) { return r >= 2.0 && r <= 3.0 ? 1.0 : 0.0; }},
      {"tent", [](double r, double) { return std::max(0.0, 1.0 - std::abs(r - 2.5)); }},
  };
}

StepperConfig config(double dt, std::vector<double> times) {
  StepperConfig cfg;
  cfg.dt = dt;
  cfg.snapshot_times = std::move(times);
  return cfg;
}

double min_value(const Field& f) {
  double m = 0.0;
  for (std::size_t k = 0; k < f.grid->size(); ++k) {
    if (f.grid->active(k)) m = std::min(m, f.values[k]);
  }
  return m;
}

}  // namespace

class RadialProperties : public ::testing::TestWithParam<int> {};

TEST_P(RadialProperties, PositivityPreserved) {
  const int dim = GetParam();
  const ExteriorDomain domain(dim, BallHole{1.0}, 30.0);
  const auto grid = Grid::radial(dim, 1.0, 30.0, 464);
  for (const auto& d : radial_data()) {
    for (double theta : {0.0, 0.25, 0.5, 1.0}) {
      const Evolution evo = evolve_radial(domain, ThetaBoundary(theta), make_field(grid, d.f),
                                          config(1.0 / 16.0, {0.0625, 0.25, 1.0, 5.0, 20.0}));
      for (const auto& s : evo.snapshots) {
        EXPECT_GE(min_value(s), -1e-12) << d.name << " theta " << theta << " t " << s.time;
      }
    }
  }
}

TEST_P(RadialProperties, OrderedInTheta) {
  const int dim = GetParam();
  const ExteriorDomain domain(dim, BallHole{1.0}, 30.0);
  const auto grid = Grid::radial(dim, 1.0, 30.0, 464);
  const std::vector<double> thetas{0.0, 0.1, 0.3, 0.5, 0.8, 1.0};
  for (const auto& d : radial_data()) {
    std::vector<Evolution> runs;
    for (double theta : thetas) {
      runs.push_back(evolve_radial(domain, ThetaBoundary(theta), make_field(grid, d.f),
                                   config(1.0 / 16.0, {0.5, 2.0, 10.0})));
    }
    for (std::size_t k = 1; k < runs.size(); ++k) {
      for (std::size_t s = 0; s < runs[k].snapshots.size(); ++s) {
        EXPECT_LE(ordering_violation(runs[k - 1].snapshots[s], runs[k].snapshots[s]), 1e-8)
            << d.name << " theta " << thetas[k - 1] << " vs " << thetas[k];
      }
      // Masses are ordered the same way.
      EXPECT_LE(runs[k - 1].ledger.rows.back().mass, runs[k].ledger.rows.back().mass + 1e-12);
    }
  }
}

TEST_P(RadialProperties, NormsContract) {
  const int dim = GetParam();
  const ExteriorDomain domain(dim, BallHole{1.0}, 30.0);
  const auto grid = Grid::radial(dim, 1.0, 30.0, 464);
  std::vector<double> times;
  for (double t = 0.25; t <= 20.0; t += 0.25) times.push_back(t);
  for (const auto& d : radial_data()) {
    for (double theta : {0.0, 0.5, 1.0}) {
      const Field u0 = make_field(grid, d.f);
      const Evolution evo = evolve_radial(domain, ThetaBoundary(theta), u0, config(1.0 / 16.0, times));
      double l1 = lp_norm(*grid, u0.values, 1.0) * (1.0 + 1e-12);
      double sup = lp_norm(*grid, u0.values, kInf) * (1.0 + 1e-12);
      for (const auto& s : evo.snapshots) {
        const double l1_now = lp_norm(*grid, s.values, 1.0);
        const double sup_now = lp_norm(*grid, s.values, kInf);
        EXPECT_LE(l1_now, l1 + 1e-7 * l1) << d.name << " theta " << theta << " t " << s.time;
        EXPECT_LE(sup_now, sup * (1.0 + 1e-12)) << d.name << " theta " << theta << " t " << s.time;
        l1 = l1_now;
        sup = sup_now;
      }
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Dimensions, RadialProperties, ::testing::Values(2, 3));

TEST(RadialProperties, RandomDataStayOrderedAndNonnegative) {
  const ExteriorDomain domain(3, BallHole{1.0}, 24.0);
  const auto grid = Grid::radial(3, 1.0, 24.0, 368);
  std::mt19937_64 rng(91);
  std::uniform_real_distribution<double> centre(1.5, 10.0), width(0.2, 2.0), height(0.0, 3.0);
  for (int trial = 0; trial < 8; ++trial) {
    const double c = centre(rng), w = width(rng), a = height(rng);
    const Field u0 = make_field(grid, [=](double r, double) { return a * std::exp(-(r - c) * (r - c) / (w * w)) * (r - 1.0); });
    const Evolution low = evolve_radial(domain, ThetaBoundary(0.2), u0, config(1.0 / 16.0, {1.0, 6.0}));
    const Evolution high = evolve_radial(domain, ThetaBoundary(0.7), u0, config(1.0 / 16.0, {1.0, 6.0}));
    for (std::size_t s = 0; s < 2; ++s) {
      EXPECT_GE(min_value(low.snapshots[s]), -1e-12);
      EXPECT_LE(ordering_violation(low.snapshots[s], high.snapshots[s]), 1e-8) << "trial " << trial;
    }
  }
}

TEST(PlanarProperties, PositivityAndThetaOrdering) {
  const HoleSpec hole = RectHole{1.0, 1.0};
  const auto grid = Grid::planar(12.0, 48, [hole](double x, double y) { return hole_contains(hole, x, y); });
  const Field u0 = make_field(grid, [](double x, double y) { return std::abs(x - 3.0) < 1.0 && std::abs(y) < 2.0 ? 1.0 : 0.0; });
  std::vector<Evolution> runs;
  for (double theta : {0.0, 0.5, 1.0}) {
    runs.push_back(evolve_planar(ThetaBoundary(theta), u0, config(0.125, {0.5, 4.0})));
    for (const auto& s : runs.back().snapshots) EXPECT_GE(min_value(s), -1e-12) << "theta " << theta;
  }
  for (std::size_t k = 1; k < runs.size(); ++k) {
    for (std::size_t s = 0; s < 2; ++s) {
      EXPECT_LE(ordering_violation(runs[k - 1].snapshots[s], runs[k].snapshots[s]), 1e-8);
    }
  }
}

TEST(PlanarProperties, DomainMonotonicity) {
  // Dirichlet problem in a disc B(x0, R) inside Omega versus the exterior
  // problem, both on the same cells with the datum supported in the disc.
  const double x0 = 6.0, radius = 3.5;
  const HoleSpec hole = BallHole{1.0};
  const auto exterior = Grid::planar(16.0, 64, [hole](double x, double y) { return hole_contains(hole, x, y); });
  const auto disc = Grid::planar(16.0, 64, [=](double x, double y) { return std::hypot(x - x0, y) > radius; });
  auto datum = [=](double x, double y) {
    const double d = std::hypot(x - x0, y);
    return d < radius - 0.5 ? std::cos(0.5 * std::numbers::pi * d / (radius - 0.5)) : 0.0;
  };
  const StepperConfig cfg = config(0.125, {0.5, 2.0, 6.0});
  for (double theta : {0.0, 0.5, 1.0}) {
    const Evolution outer = evolve_planar(ThetaBoundary(theta), make_field(exterior, datum), cfg);
    const Evolution inner = evolve_planar(ThetaBoundary::dirichlet(), make_field(disc, datum), cfg);
    for (std::size_t s = 0; s < cfg.snapshot_times.size(); ++s) {
      double worst = 0.0;
      for (std::size_t k = 0; k < disc->size(); ++k) {
        if (disc->active(k)) worst = std::max(worst, inner.snapshots[s].values[k] - outer.snapshots[s].values[k]);
      }
      EXPECT_LE(worst, 1e-8) << "theta " << theta << " t " << cfg.snapshot_times[s];
    }
  }
}

TEST(PlanarProperties, NormsContract) {
  const HoleSpec hole = RectHole{1.0, 0.5};
  const auto grid = Grid::planar(12.0, 48, [hole](double x, double y) { return hole_contains(hole, x, y); });
  const Field u0 = make_field(grid, [](double x, double y) { return std::exp(-((x - 3) * (x - 3) + y * y)); });
  std::vector<double> times;
  for (double t = 0.5; t <= 10.0; t += 0.5) times.push_back(t);
  for (double theta : {0.0, 1.0}) {
    const Evolution evo = evolve_planar(ThetaBoundary(theta), u0, config(0.125, times));
    double l1 = lp_norm(*grid, u0.values, 1.0), sup = lp_norm(*grid, u0.values, kInf);
    for (const auto& s : evo.snapshots) {
      EXPECT_LE(lp_norm(*grid, s.values, 1.0), l1 * (1.0 + 1e-10));
      EXPECT_LE(lp_norm(*grid, s.values, kInf), sup * (1.0 + 1e-12));
      l1 = lp_norm(*grid, s.values, 1.0);
      sup = lp_norm(*grid, s.values, kInf);
    }
  }
}

TEST(AxisymProperties, ProbeIsNonnegative) {
  const auto grid = Grid::axisymmetric(10.0, -10.0, 10.0, 64, 128, 1.0);
  const KernelProbe probe = kernel_probe(grid, ThetaBoundary::dirichlet(), 3.0, 0.75, {0.5, 2.0, 5.0}, 1.0 / 16.0, false);
  for (const auto& s : probe.snapshots) EXPECT_GE(min_value(s), -1e-12);
}
