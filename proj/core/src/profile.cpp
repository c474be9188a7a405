#include "heatext/profile.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "heatext/errors.hpp"
#include "heatext/fit.hpp"
#include "heatext/tridiagonal.hpp"

namespace heatext {

ProfileTable::ProfileTable(ExteriorDomain domain, ThetaBoundary theta, ProfileMethod method,
                           SampleLayout layout, std::vector<ProfileSample> samples,
                           double sample_spacing, bool all_mass_lost)
    : domain_(std::move(domain)),
      theta_(theta),
      method_(std::move(method)),
      layout_(layout),
      samples_(std::move(samples)),
      sample_spacing_(sample_spacing),
      all_mass_lost_(all_mass_lost) {
  if (layout_ == SampleLayout::kPlanar) {
    planar_h_ = sample_spacing_;
  } else if (!samples_.empty() && !is_closed_form() && domain_.dim() >= 3) {
    const auto& last = samples_.back();
    const double a = domain_.hole_radius();
    tail_coefficient_ = (1.0 - last.value) * std::pow(last.x / a, domain_.dim() - 2);
  }
}

double ProfileTable::value_at_radius(double r) const {
  if (all_mass_lost_) return 0.0;
  if (const auto* closed = std::get_if<ClosedFormRadial>(&method_)) {
    if (domain_.dim() == 2) return 1.0;  // Neumann in the plane
    const double a = domain_.hole_radius();
    return 1.0 - closed->coefficient * std::pow(a / r, domain_.dim() - 2);
  }
  if (layout_ == SampleLayout::kPlanar) return value_at(r, 0.0);
  if (samples_.empty()) throw RangeError("ProfileTable: no samples");
  if (r <= samples_.front().x) return samples_.front().value;
  if (r >= samples_.back().x) {
    if (domain_.dim() == 2) return samples_.back().value;
    return 1.0 - tail_coefficient_ * std::pow(domain_.hole_radius() / r, domain_.dim() - 2);
  }
  auto it = std::upper_bound(samples_.begin(), samples_.end(), r,
                             [](double v, const ProfileSample& s) { return v < s.x; });
  const auto& hi = *it;
  const auto& lo = *(it - 1);
  const double w = (r - lo.x) / (hi.x - lo.x);
  return (1.0 - w) * lo.value + w * hi.value;
}

double ProfileTable::value_at(double x, double y) const {
  if (layout_ == SampleLayout::kRadial) return value_at_radius(std::hypot(x, y));
  if (all_mass_lost_) return 0.0;
  // Nearest stored cell; planar samples are cell centres (i + 1/2) h.
  const double h = planar_h_;
  const double ci = std::floor(x / h) + 0.5;
  const double cj = std::floor(y / h) + 0.5;
  double best = samples_.empty() ? 1.0 : samples_.front().value;
  double best_d = kInf;
  for (const auto& s : samples_) {
    const double d = std::hypot(s.x / h - ci, s.y / h - cj);
    if (d < best_d) {
      best_d = d;
      best = s.value;
      if (d == 0.0) break;
    }
  }
  return best;
}

double closed_form_coefficient(int dim, double hole_radius, const ThetaBoundary& theta) {
  if (theta.is_dirichlet()) return 1.0;
  if (theta.is_neumann()) return 0.0;
  const double ab = hole_radius * theta.robin_b();
  return ab / (ab + dim - 2);
}

ProfileTable profile_radial_closed_form(int dim, double hole_radius, const ThetaBoundary& theta,
                                        std::vector<double> sample_radii) {
  if (!(hole_radius > 0.0)) throw DomainError("profile_radial_closed_form: hole radius must be positive");
  if (sample_radii.empty()) {
    const int n = 257;
    sample_radii.resize(n);
    for (int i = 0; i < n; ++i) sample_radii[i] = hole_radius * std::pow(64.0, i / double(n - 1));
  }
  const double far = std::max(sample_radii.back(), 4.0 * hole_radius);
  ExteriorDomain domain(dim, BallHole{hole_radius}, far);

  // In the plane the only bounded harmonic functions are constants: Phi = 0
  // unless no mass leaves through the boundary.
  const bool lost = dim == 2 && !theta.is_neumann();
  const double c = dim == 2 ? (lost ? 1.0 : 0.0) : closed_form_coefficient(dim, hole_radius, theta);

  ProfileTable probe(domain, theta, ClosedFormRadial{c}, SampleLayout::kRadial, {}, 0.0, lost);
  std::vector<ProfileSample> samples;
  samples.reserve(sample_radii.size());
  for (double r : sample_radii) samples.push_back({r, 0.0, probe.value_at_radius(r)});
  return ProfileTable(domain, theta, ClosedFormRadial{c}, SampleLayout::kRadial,
                      std::move(samples), 0.0, lost);
}

namespace {

struct RadialSolve {
  double h;
  std::vector<double> nodes;
  std::vector<double> phi;
  double boundary_residual;
};

// -phi'' - (N-1)/r phi' = 0 on [a, R], phi(R) = 1, theta-condition at r = a
// through the ghost node (phi_1 - phi_{-1}) / 2h = b phi_0.
RadialSolve solve_radial_laplace(int dim, double a, double outer, double h_target,
                                 const ThetaBoundary& theta) {
  const int n = std::max(8, static_cast<int>(std::lround((outer - a) / h_target)));
  const double h = (outer - a) / n;
  const std::size_t size = static_cast<std::size_t>(n) + 1;
  std::vector<double> lower(size, 0.0), diag(size, 0.0), upper(size, 0.0), rhs(size, 0.0);
  std::vector<double> nodes(size);
  for (std::size_t i = 0; i < size; ++i) nodes[i] = a + static_cast<double>(i) * h;
  nodes.back() = outer;

  if (theta.is_dirichlet()) {
    diag[0] = 1.0;
  } else {
    const double b = theta.robin_b();
    diag[0] = -2.0 / (h * h) - 2.0 * b / h + (dim - 1) * b / a;
    upper[0] = 2.0 / (h * h);
  }
  for (std::size_t i = 1; i + 1 < size; ++i) {
    const double r = nodes[i];
    const double drift = (dim - 1) / (2.0 * h * r);
    lower[i] = 1.0 / (h * h) - drift;
    diag[i] = -2.0 / (h * h);
    upper[i] = 1.0 / (h * h) + drift;
  }
  diag[size - 1] = 1.0;
  rhs[size - 1] = 1.0;

  std::vector<double> phi = solve_tridiagonal(lower, diag, upper, rhs);
  double residual = 0.0;
  for (std::size_t i = 0; i < size; ++i) {
    double row = diag[i] * phi[i] - rhs[i];
    if (i > 0) row += lower[i] * phi[i - 1];
    if (i + 1 < size) row += upper[i] * phi[i + 1];
    residual = std::max(residual, std::abs(row) * h * h);
    if (!std::isfinite(phi[i])) {
      throw NumericalError("profile_elliptic: non-finite radial solution at R = " +
                           std::to_string(outer));
    }
  }
  if (residual > 1e-9) {
    throw NumericalError("profile_elliptic: radial solve residual " + std::to_string(residual));
  }
  // One-sided second-order derivative at r = a.
  const double dphi = (-3.0 * phi[0] + 4.0 * phi[1] - phi[2]) / (2.0 * h);
  const double half = std::numbers::pi * theta.theta() / 2.0;
  const double bc = std::sin(half) * (-dphi) + std::cos(half) * phi[0];
  return {h, std::move(nodes), std::move(phi), std::abs(bc)};
}

double interpolate(const std::vector<double>& x, const std::vector<double>& y, double at) {
  auto it = std::lower_bound(x.begin(), x.end(), at);
  if (it == x.begin()) return y.front();
  if (it == x.end()) return y.back();
  const std::size_t k = static_cast<std::size_t>(it - x.begin());
  const double w = (at - x[k - 1]) / (x[k] - x[k - 1]);
  return (1.0 - w) * y[k - 1] + w * y[k];
}

ProfileTable elliptic_radial(const ExteriorDomain& domain, const ThetaBoundary& theta,
                             const std::vector<double>& radii, const EllipticOptions& options) {
  const int dim = domain.dim();
  const double a = domain.hole_radius();
  EllipticLimit limit;
  limit.radii = radii;

  std::vector<double> sample_r;
  for (double r = a; r <= radii.front() + 1e-12; r += options.radial_sample_spacing) {
    sample_r.push_back(r);
  }
  for (double outer : radii) {
    const RadialSolve solve = solve_radial_laplace(dim, a, outer, options.radial_h, theta);
    std::vector<double> values;
    values.reserve(sample_r.size());
    for (double r : sample_r) values.push_back(interpolate(solve.nodes, solve.phi, r));
    limit.values.push_back(std::move(values));
    limit.boundary_residuals.push_back(solve.boundary_residual);
  }
  for (std::size_t k = 1; k < radii.size(); ++k) {
    for (std::size_t s = 0; s < sample_r.size(); ++s) {
      if (limit.values[k][s] > limit.values[k - 1][s] + 1e-12) ++limit.monotonicity_violations;
    }
  }

  // In the radial case phi_R = Phi / (1 + kappa R^{2-N}) exactly, so 1/phi_R is
  // affine in R^{2-N}; two-point Richardson on the reciprocal removes the
  // boundary influence. A single radius gives no extrapolation.
  std::vector<ProfileSample> samples;
  if (radii.size() >= 2) {
    const std::size_t k2 = radii.size() - 1;
    const double w1 = std::pow(radii[k2 - 1], 2.0 - dim);
    const double w2 = std::pow(radii[k2], 2.0 - dim);
    for (std::size_t s = 0; s < sample_r.size(); ++s) {
      const double p1 = limit.values[k2 - 1][s];
      const double p2 = limit.values[k2][s];
      double value = 0.0;
      if (p1 > 0.0 && p2 > 0.0) {
        const double inv = (w1 / p2 - w2 / p1) / (w1 - w2);
        value = inv > 0.0 ? 1.0 / inv : 0.0;
      }
      value = std::clamp(value, 0.0, std::min(p1, p2));
      limit.extrapolated.push_back(value);
      samples.push_back({sample_r[s], 0.0, value});
    }
  } else {
    for (std::size_t s = 0; s < sample_r.size(); ++s) {
      samples.push_back({sample_r[s], 0.0, limit.values[0][s]});
    }
  }
  return ProfileTable(domain, theta, std::move(limit), SampleLayout::kRadial, std::move(samples),
                      options.radial_sample_spacing, false);
}

enum class CellClass : unsigned char { kFluid, kHole, kOuter };

ProfileTable elliptic_planar(const ExteriorDomain& domain, const ThetaBoundary& theta,
                             const std::vector<double>& radii, const EllipticOptions& options) {
  const double h = options.planar_h;
  const double b = theta.robin_b();
  // Face coefficient of the theta-condition with the face value eliminated:
  // du/dn = -u_P 2b / (2 + b h); Dirichlet gives 2 / h.
  const double hole_face = theta.is_dirichlet() ? 2.0 : h * 2.0 * b / (2.0 + b * h);
  const HoleSpec hole = domain.hole();

  EllipticLimit limit;
  limit.radii = radii;
  std::vector<ProfileSample> samples;
  std::vector<std::pair<int, int>> sample_cells;
  const double inner_cut = radii.front();

  for (double outer : radii) {
    const int m = static_cast<int>(std::ceil(outer / h)) + 2;
    const int side = 2 * m;
    auto cls = [&](int i, int j) {
      if (i < -m || i >= m || j < -m || j >= m) return CellClass::kOuter;
      const double x = (i + 0.5) * h, y = (j + 0.5) * h;
      if (hole_contains(hole, x, y)) return CellClass::kHole;
      if (std::hypot(x, y) >= outer) return CellClass::kOuter;
      return CellClass::kFluid;
    };
    std::vector<int> id(static_cast<std::size_t>(side) * side, -1);
    auto slot = [&](int i, int j) { return static_cast<std::size_t>(j + m) * side + (i + m); };
    int unknowns = 0;
    for (int j = -m; j < m; ++j) {
      for (int i = -m; i < m; ++i) {
        if (cls(i, j) == CellClass::kFluid) id[slot(i, j)] = unknowns++;
      }
    }
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(unknowns) * 5);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(unknowns);
    const int di[4] = {1, -1, 0, 0};
    const int dj[4] = {0, 0, 1, -1};
    bool touches_hole = false;
    for (int j = -m; j < m; ++j) {
      for (int i = -m; i < m; ++i) {
        const int p = id[slot(i, j)];
        if (p < 0) continue;
        double diag = 0.0;
        for (int d = 0; d < 4; ++d) {
          const int ni = i + di[d], nj = j + dj[d];
          switch (cls(ni, nj)) {
            case CellClass::kFluid:
              diag += 1.0;
              triplets.emplace_back(p, id[slot(ni, nj)], -1.0);
              break;
            case CellClass::kHole:
              diag += hole_face;
              touches_hole = true;
              break;
            case CellClass::kOuter:
              diag += 2.0;
              rhs[p] += 2.0;
              break;
          }
        }
        triplets.emplace_back(p, p, diag);
      }
    }
    if (!touches_hole) throw PreconditionError("profile_elliptic: hole not resolved by the grid");
    Eigen::SparseMatrix<double> matrix(unknowns, unknowns);
    matrix.setFromTriplets(triplets.begin(), triplets.end());
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(matrix);
    if (solver.info() != Eigen::Success) {
      throw NumericalError("profile_elliptic: factorization failed at R = " + std::to_string(outer));
    }
    Eigen::VectorXd phi = solver.solve(rhs);
    const double residual = (matrix * phi - rhs).lpNorm<Eigen::Infinity>();
    if (!std::isfinite(residual) || residual > 1e-8) {
      throw NumericalError("profile_elliptic: planar solve residual " + std::to_string(residual) +
                           " at R = " + std::to_string(outer));
    }

    if (sample_cells.empty()) {
      for (int j = -m; j < m; ++j) {
        for (int i = -m; i < m; ++i) {
          const double x = (i + 0.5) * h, y = (j + 0.5) * h;
          if (cls(i, j) == CellClass::kFluid && std::hypot(x, y) < inner_cut) {
            sample_cells.emplace_back(i, j);
          }
        }
      }
    }
    std::vector<double> values;
    values.reserve(sample_cells.size());
    for (auto [i, j] : sample_cells) values.push_back(phi[id[slot(i, j)]]);
    // The theta-condition is eliminated exactly at every hole face.
    limit.boundary_residuals.push_back(0.0);
    limit.values.push_back(std::move(values));
  }
  for (std::size_t k = 1; k < radii.size(); ++k) {
    for (std::size_t s = 0; s < sample_cells.size(); ++s) {
      if (limit.values[k][s] > limit.values[k - 1][s] + 1e-12) ++limit.monotonicity_violations;
    }
  }
  const auto& finest = limit.values.back();
  for (std::size_t s = 0; s < sample_cells.size(); ++s) {
    samples.push_back({(sample_cells[s].first + 0.5) * h, (sample_cells[s].second + 0.5) * h,
                       finest[s]});
  }
  const bool lost = !theta.is_neumann();
  return ProfileTable(domain, theta, std::move(limit), SampleLayout::kPlanar, std::move(samples), h,
                      lost);
}

}  // namespace

ProfileTable profile_elliptic(const ExteriorDomain& domain, const ThetaBoundary& theta,
                              const std::vector<double>& radii, const EllipticOptions& options) {
  if (radii.empty()) throw PreconditionError("profile_elliptic: empty radius list");
  for (std::size_t k = 1; k < radii.size(); ++k) {
    if (!(radii[k] > radii[k - 1])) {
      throw PreconditionError("profile_elliptic: radii must be strictly increasing");
    }
  }
  if (!(radii.front() > 2.0 * domain.hole_radius())) {
    throw PreconditionError("profile_elliptic: smallest radius must exceed twice the hole radius");
  }
  if (domain.dim() == 3) {
    if (!domain.has_ball_hole()) {
      throw UnsupportedFeature("profile_elliptic: N = 3 requires a ball hole");
    }
    return elliptic_radial(domain, theta, radii, options);
  }
  return elliptic_planar(domain, theta, radii, options);
}

double profile_boundary_residual(const ProfileTable& profile) {
  if (const auto* limit = profile.elliptic()) {
    return limit->boundary_residuals.empty() ? 0.0 : limit->boundary_residuals.back();
  }
  const int dim = profile.domain().dim();
  if (dim == 2) return 0.0;  // constant profiles
  const double a = profile.domain().hole_radius();
  const double c = std::get<ClosedFormRadial>(profile.method()).coefficient;
  const double phi = 1.0 - c;
  const double dphi_dr = c * (dim - 2) / a;
  const double half = std::numbers::pi * profile.theta().theta() / 2.0;
  return std::abs(std::sin(half) * (-dphi_dr) + std::cos(half) * phi);
}

double psi_at_radius(const ProfileTable& dirichlet_profile, double r) {
  if (!dirichlet_profile.theta().is_dirichlet()) {
    throw PreconditionError("psi_at_radius: Psi is defined from the Dirichlet profile");
  }
  return 1.0 - dirichlet_profile.value_at_radius(r);
}

DecayFit profile_decay_check(const ProfileTable& profile, int order) {
  const int dim = profile.domain().dim();
  if (dim < 3) throw PreconditionError("profile_decay_check: needs N >= 3");
  if (order < 0 || order > 2) throw PreconditionError("profile_decay_check: order must be 0, 1 or 2");
  if (profile.layout() != SampleLayout::kRadial) {
    throw PreconditionError("profile_decay_check: needs a radial profile");
  }
  DecayFit fit;
  fit.order = order;
  fit.threshold = -(dim - 2 + order) + 0.1;
  if (profile.theta().is_neumann()) {
    fit.skipped = true;
    fit.passed = true;
    return fit;
  }

  const double a = profile.domain().hole_radius();
  const double spacing = profile.sample_spacing();
  const double last = profile.is_closed_form() ? a * 4096.0 : profile.samples().back().x;
  auto psi = [&](double r) { return 1.0 - profile.value_at_radius(r); };
  // Closed forms are exact at any radius; sampled tables need a denser ladder.
  const double ratio = profile.is_closed_form() ? 2.0 : std::numbers::sqrt2;
  for (double r = 2.0 * a; ; r *= ratio) {
    const double eps = spacing > 0.0 ? spacing : r * 1e-3;
    if (r + eps > last) break;
    double q = 0.0;
    switch (order) {
      case 0:
        q = psi(r);
        break;
      case 1:
        q = (psi(r + eps) - psi(r - eps)) / (2.0 * eps);
        break;
      default:
        q = (psi(r + eps) - 2.0 * psi(r) + psi(r - eps)) / (eps * eps);
        break;
    }
    fit.radii.push_back(r);
    fit.magnitudes.push_back(std::abs(q));
  }
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < fit.radii.size(); ++i) {
    if (fit.magnitudes[i] > 0.0) {
      lx.push_back(std::log(fit.radii[i]));
      ly.push_back(std::log(fit.magnitudes[i]));
    }
  }
  if (lx.size() < 3) throw RangeError("profile_decay_check: fewer than 3 usable ladder radii");
  const LineFit line = fit_line(lx, ly);
  fit.exponent = line.slope;
  fit.intercept = line.intercept;
  fit.passed = fit.exponent <= fit.threshold;
  return fit;
}

}  // namespace heatext
