#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "heatext/domain.hpp"

namespace heatext {

// Phi(r) = 1 - c (a/r)^{N-2}.
struct ClosedFormRadial {
  double coefficient;
};

// Truncated problems phi_R on Omega cap B(0, R), phi_R = 1 on |x| = R.
struct EllipticLimit {
  std::vector<double> radii;
  std::vector<std::vector<double>> values;  // values[k][s]: radius k, sample s
  std::vector<double> extrapolated;         // empty when no limit is extrapolated (N = 2)
  std::vector<double> boundary_residuals;   // |B_theta(phi_R)| at the hole, per radius
  int monotonicity_violations = 0;          // samples where phi_R increased with R
};

using ProfileMethod = std::variant<ClosedFormRadial, EllipticLimit>;

enum class SampleLayout { kRadial, kPlanar };

// Radial samples store x = r, y = 0.
struct ProfileSample {
  double x;
  double y;
  double value;
};

class ProfileTable {
 public:
  ProfileTable(ExteriorDomain domain, ThetaBoundary theta, ProfileMethod method,
               SampleLayout layout, std::vector<ProfileSample> samples, double sample_spacing,
               bool all_mass_lost);

  const ExteriorDomain& domain() const noexcept { return domain_; }
  const ThetaBoundary& theta() const noexcept { return theta_; }
  const ProfileMethod& method() const noexcept { return method_; }
  SampleLayout layout() const noexcept { return layout_; }
  const std::vector<ProfileSample>& samples() const noexcept { return samples_; }
  // Spacing between radial samples; 0 for closed forms (exact everywhere).
  double sample_spacing() const noexcept { return sample_spacing_; }
  // N = 2 with theta != 1: Phi = 0, every solution loses all of its mass.
  bool all_mass_lost() const noexcept { return all_mass_lost_; }

  bool is_closed_form() const noexcept { return std::holds_alternative<ClosedFormRadial>(method_); }
  const EllipticLimit* elliptic() const noexcept { return std::get_if<EllipticLimit>(&method_); }

  // Phi at distance r from the origin. Closed forms are exact; elliptic radial
  // tables interpolate linearly and continue with the harmonic tail
  // 1 - C (a/r)^{N-2} matched at the last sample.
  double value_at_radius(double r) const;
  // Phi at a planar point; planar tables use the nearest stored cell.
  double value_at(double x, double y) const;

 private:
  ExteriorDomain domain_;
  ThetaBoundary theta_;
  ProfileMethod method_;
  SampleLayout layout_;
  std::vector<ProfileSample> samples_;
  double sample_spacing_;
  bool all_mass_lost_;
  double planar_h_ = 0.0;
  double tail_coefficient_ = 0.0;
};

// c = 1 (Dirichlet), a b / (a b + N - 2) (Robin), 0 (Neumann).
double closed_form_coefficient(int dim, double hole_radius, const ThetaBoundary& theta);

// Default samples: 257 radii spread geometrically over [a, 64 a].
ProfileTable profile_radial_closed_form(int dim, double hole_radius, const ThetaBoundary& theta,
                                        std::vector<double> sample_radii = {});

struct EllipticOptions {
  double radial_h = 1.0 / 128.0;        // node spacing of the radial solve
  double radial_sample_spacing = 0.125;  // spacing of stored samples
  double planar_h = 0.25;                // cell size of the planar solve
};

ProfileTable profile_elliptic(const ExteriorDomain& domain, const ThetaBoundary& theta,
                              const std::vector<double>& radii, const EllipticOptions& options = {});

// |B_theta(Phi)| at r = a with du/dn = -du/dr; closed forms only use the
// analytic derivative, elliptic tables report the largest solve's residual.
double profile_boundary_residual(const ProfileTable& profile);

// Psi = 1 - Phi^0 at distance r; needs a Dirichlet profile.
double psi_at_radius(const ProfileTable& dirichlet_profile, double r);

struct DecayFit {
  bool skipped = false;  // 1 - Phi vanishes identically (Neumann)
  int order = 0;
  double exponent = 0.0;
  double intercept = 0.0;  // log C
  double threshold = 0.0;  // -(N - 2 + order) + 0.1
  bool passed = false;
  std::vector<double> radii;
  std::vector<double> magnitudes;
};

// Fits log |D^order (1 - Phi)| against log r on a dyadic radius ladder.
DecayFit profile_decay_check(const ProfileTable& profile, int order);

}  // namespace heatext
