#include "heatext/constructions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "heatext/errors.hpp"
#include "heatext/gaussian.hpp"

namespace heatext {

using std::numbers::pi;

double explicit_solution(double r, double t) {
  if (!(r >= 1.0)) throw DomainError("explicit_solution: r must be >= 1");
  if (!(t >= 0.0)) throw DomainError("explicit_solution: t must be >= 0");
  const double s = r - 1.0;
  const double tau = t + 1.0;
  return std::exp(-s * s / (4.0 * tau)) * s / (4.0 * r * std::pow(tau, 1.5));
}

double explicit_solution_mass(double t) {
  return 2.0 * std::pow(pi, 1.5) + 2.0 * pi / std::sqrt(t + 1.0);
}

double explicit_asymptotic_mass() { return 2.0 * std::pow(pi, 1.5); }

double radial_z_coefficient(double gamma, int dim) { return gamma * (dim - 2 - gamma); }

RadialZ radial_z(double x_norm, double gamma, int dim) {
  if (!(x_norm > 0.0)) throw DomainError("radial_z: |x| must be positive");
  auto z = [&](double r) { return std::pow(r, -gamma); };
  const double eps = 2e-4 * x_norm;
  const double zr = (z(x_norm + eps) - z(x_norm - eps)) / (2.0 * eps);
  const double zrr = (z(x_norm + eps) - 2.0 * z(x_norm) + z(x_norm - eps)) / (eps * eps);
  const double minus_lap = -(zrr + (dim - 1) / x_norm * zr);
  const double value = z(x_norm);
  const double expected = radial_z_coefficient(gamma, dim) * value / (x_norm * x_norm);
  return {value, std::abs(minus_lap - expected)};
}

namespace {

struct ZModel {
  int dim;
  double a;
  double gamma;
  double kappa;
  const ProfileTable* profile;

  double psi(double r) const { return 1.0 - profile->value_at_radius(r); }
  double z(double r) const { return std::pow(r, -gamma); }
  double operator()(double r, double t) const {
    return std::pow(t, -(dim + gamma) / 2.0) * (z(r) + kappa * psi(r));
  }
};

// f_t - (f_rr + (N-1)/r f_r) by centred differences.
template <class F>
double heat_residual(const F& f, int dim, double r, double t, double eps_r) {
  const double eps_t = 1e-4 * t;
  const double ft = (f(r, t + eps_t) - f(r, t - eps_t)) / (2.0 * eps_t);
  const double fr = (f(r + eps_r, t) - f(r - eps_r, t)) / (2.0 * eps_r);
  const double frr = (f(r + eps_r, t) - 2.0 * f(r, t) + f(r - eps_r, t)) / (eps_r * eps_r);
  return ft - (frr + (dim - 1) / r * fr);
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

std::vector<double> geometric(double lo, double hi, int n) {
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = lo * std::pow(hi / lo, n == 1 ? 0.0 : i / double(n - 1));
  return out;
}

}  // namespace

double supersolution_Z(const SubSuperParams& params, const ProfileTable& dirichlet_profile,
                       double x_norm, double t) {
  if (!(t > 0.0)) throw DomainError("supersolution_Z: t must be positive");
  const ZModel model{dirichlet_profile.domain().dim(), dirichlet_profile.domain().hole_radius(),
                     params.gamma, params.kappa > 0.0 ? params.kappa : 1.0, &dirichlet_profile};
  return model(x_norm, t);
}

std::string ZReport::to_text() const {
  std::ostringstream os;
  os.precision(6);
  os << "supersolution Z report\n";
  os << "  gamma = " << gamma << "\n  kappa = " << kappa << " (threshold " << kappa_threshold
     << ")\n  C2 = " << c2 << "\n  m = " << m << "\n  delta = " << delta << "\n  c = " << c
     << "\n  sigma = " << sigma << "\n";
  for (const auto& item : items) {
    os << "  [" << (item.passed ? "PASS" : "FAIL") << "] " << item.name << ": " << item.detail
       << " (witness r = " << item.witness_r << ", t = " << item.witness_t << ")\n";
  }
  os << "  verdict: " << (all_passed ? "PASS" : "FAIL") << "\n";
  return os.str();
}

ZReport supersolution_Z_report(const SubSuperParams& params, const ProfileTable& profile,
                               const ZSampling& sampling) {
  const int dim = profile.domain().dim();
  if (dim < 3) throw PreconditionError("supersolution_Z_report: needs N >= 3");
  if (!profile.theta().is_dirichlet()) {
    throw PreconditionError("supersolution_Z_report: needs the Dirichlet profile (Psi = 1 - Phi^0)");
  }
  if (!(params.gamma > 0.0 && params.gamma < 1.0)) {
    throw PreconditionError("supersolution_Z_report: gamma must lie in (0, 1)");
  }
  const double a = profile.domain().hole_radius();
  const double gamma = params.gamma;
  const double spacing = profile.sample_spacing();
  auto eps_at = [&](double r) { return std::max(1e-4 * r, spacing); };

  ZReport report;
  report.gamma = gamma;
  ZModel model{dim, a, gamma, 1.0, &profile};

  const std::vector<double> radii = geometric(a * 1.01, sampling.r_max, sampling.radii);
  const std::vector<double> times = geometric(sampling.t_min, sampling.t_max, sampling.times);

  for (double r : radii) report.c2 = std::max(report.c2, model.psi(r) / model.z(r));
  report.c2 = std::max(report.c2, model.psi(a) / model.z(a));

  // Normal derivatives at r = a (n points into the hole, d/dn = -d/dr).
  const double eps_a = std::max(1e-5 * a, spacing);
  auto dn = [&](auto f) { return (3.0 * f(a) - 4.0 * f(a + eps_a) + f(a + 2.0 * eps_a)) / (2.0 * eps_a); };
  const double dpsi_dn = dn([&](double r) { return model.psi(r); });
  const double dz_dn = dn([&](double r) { return model.z(r); });
  report.kappa_threshold = dpsi_dn > 0.0 ? std::max(0.0, -dz_dn / dpsi_dn) : kInf;
  report.kappa = params.kappa > 0.0 ? params.kappa : report.kappa_threshold + 1.0;
  model.kappa = report.kappa;

  // (i) positivity
  {
    ZItem& item = report.items[0];
    item.name = "(i) Z > 0";
    item.passed = true;
    double worst = kInf;
    for (double t : times) {
      for (double r : radii) {
        const double v = model(r, t);
        if (v < worst) {
          worst = v;
          item.witness_r = r;
          item.witness_t = t;
        }
      }
    }
    item.passed = worst > 0.0;
    item.detail = "min Z = " + fmt(worst);
  }
  // (ii) t^{N/2} Z = t^{-gamma/2} (z + kappa Psi) decreases to 0
  {
    ZItem& item = report.items[1];
    item.name = "(ii) t^{N/2} Z -> 0 uniformly";
    std::vector<double> sup(times.size(), 0.0);
    for (std::size_t k = 0; k < times.size(); ++k) {
      const double t = times[k];
      sup[k] = std::pow(t, dim / 2.0) * model(a, t);
      for (double r : radii) sup[k] = std::max(sup[k], std::pow(t, dim / 2.0) * model(r, t));
    }
    item.passed = true;
    for (std::size_t k = 1; k < sup.size(); ++k) {
      if (!(sup[k] < sup[k - 1])) {
        item.passed = false;
        item.witness_t = times[k];
        break;
      }
    }
    item.passed = item.passed && sup.back() < sup.front();
    item.detail = "sup t^{N/2} Z: " + fmt(sup.front()) + " -> " + fmt(sup.back());
    if (item.passed) {
      item.witness_r = a;
      item.witness_t = times.back();
    }
  }
  // (iii) dZ/dn >= m / (1 + t^{N/2+1}) on the hole boundary
  {
    ZItem& item = report.items[2];
    item.name = "(iii) dZ/dn >= m / (1 + t^{N/2+1})";
    report.m = kInf;
    for (double t : times) {
      const double v = dn([&](double r) { return model(r, t); }) * (1.0 + std::pow(t, dim / 2.0 + 1.0));
      if (v < report.m) {
        report.m = v;
        item.witness_t = t;
      }
    }
    item.witness_r = a;
    item.passed = report.m > 0.0 && std::isfinite(report.m);
    item.detail = "fitted m = " + fmt(report.m);
  }
  // (iv) Z_t - Lap Z >= c t^{-(N+gamma)/2} z / |x|^2 on |x|^2 <= delta t
  const double coef = radial_z_coefficient(gamma, dim);
  const double d_coef = (dim + gamma) / 2.0;
  report.delta = params.delta > 0.0 ? params.delta
                                    : coef / (2.0 * d_coef * (1.0 + report.kappa * report.c2));
  {
    ZItem& item = report.items[3];
    item.name = "(iv) Z_t - Lap Z >= c t^{-(N+gamma)/2} z / |x|^2 near the hole";
    report.c = kInf;
    int samples = 0;
    for (double t : times) {
      for (double r : radii) {
        if (r * r > report.delta * t) continue;
        ++samples;
        const double lz = heat_residual(model, dim, r, t, eps_at(r));
        const double ratio = lz / (std::pow(t, -d_coef) * model.z(r) / (r * r));
        if (ratio < report.c) {
          report.c = ratio;
          item.witness_r = r;
          item.witness_t = t;
        }
      }
    }
    item.passed = samples > 0 && report.c > 0.0;
    item.detail = "fitted c = " + fmt(report.c) + " over " + std::to_string(samples) +
                  " samples (analytic C - delta D2 = " +
                  fmt(coef - report.delta * d_coef * (1.0 + report.kappa * report.c2)) + ")";
  }
  // Weight for the near-hole subsolution Phi G - sigma Z.
  {
    auto phi_g = [&](double r, double t) {
      return profile.value_at_radius(r) * gaussian_value(r, {dim, t});
    };
    double sigma = 0.0;
    for (double t : times) {
      if (t < 1.0) continue;
      for (double r : radii) {
        if (r * r > report.delta * t) continue;
        const double lz = heat_residual(model, dim, r, t, eps_at(r));
        const double lphig = heat_residual(phi_g, dim, r, t, eps_at(r));
        if (lz > 0.0) sigma = std::max(sigma, lphig / lz);
      }
    }
    report.sigma = params.sigma > 0.0 ? std::max(params.sigma, sigma) : sigma;
  }
  report.all_passed = std::all_of(report.items.begin(), report.items.end(),
                                  [](const ZItem& item) { return item.passed; }) &&
                      report.c2 > 0.0 && report.delta > 0.0 && report.sigma > 0.0 &&
                      std::isfinite(report.sigma);
  return report;
}

double unit_ball_eigenvalue_3d() { return pi * pi; }

double unit_ball_eigenfunction_3d(double r) {
  if (r < 0.0 || r > 1.0) return 0.0;
  if (r < 1e-8) return pi / 4.0;
  return std::sin(pi * r) / (4.0 * r);
}

DecreasingFunction DecreasingFunction::parse(const std::string& descriptor) {
  const auto colon = descriptor.find(':');
  const std::string kind = descriptor.substr(0, colon);
  double arg = 0.0;
  if (colon != std::string::npos) {
    try {
      arg = std::stod(descriptor.substr(colon + 1));
    } catch (const std::exception&) {
      throw InputError("decreasing function: bad parameter in '" + descriptor + "'");
    }
  }
  DecreasingFunction f{descriptor, {}};
  if (kind == "recip") {
    if (!(arg >= 1.0)) throw InputError("recip:c needs c >= 1 so that g <= 1");
    f.g = [arg](double t) { return 1.0 / (t + arg); };
  } else if (kind == "pow") {
    if (!(arg > 0.0)) throw InputError("pow:alpha needs alpha > 0");
    f.g = [arg](double t) { return std::pow(1.0 + t, -arg); };
  } else if (kind == "exp") {
    if (!(arg > 0.0)) throw InputError("exp:k needs k > 0");
    f.g = [arg](double t) { return std::exp(-arg * t); };
  } else if (kind == "log") {
    f.g = [](double t) { return 1.0 / std::log(std::numbers::e + t); };
  } else {
    throw InputError("unknown decreasing function '" + descriptor + "'");
  }
  return f;
}

std::string PlanConditions::first_failure() const {
  if (!eigen_decay) return "(i) eigen-decay";
  if (!disjoint_ball) return "(ii) ball inside Omega beyond R_n + 1";
  if (!gaussian_small) return "(iii) Gaussian smallness";
  return "";
}

namespace {

// log |B(0, R)|; R^N itself overflows for slowly decaying g.
double log_ball_volume(int dim, double radius) {
  return dim == 3 ? std::log(4.0 / 3.0 * pi) + 3.0 * std::log(radius) : std::log(pi) + 2.0 * std::log(radius);
}

// Condition (iii) in log form: -(x - R) / (4 t_{n+1}) <= log RHS.
bool gaussian_small(int dim, int n, double t_n, double t_next, double radius, double centre) {
  const double log_rhs = 0.5 * dim * std::log(4.0 * pi * t_n) - (n + 2) * std::log(2.0) -
                         log_ball_volume(dim, radius);
  return -(centre - radius) / (4.0 * t_next) <= log_rhs;
}

// Solves g(t) = target by bisection; returns +inf when t overflows.
double solve_level(const DecreasingFunction& g, double target) {
  if (g(0.0) < target) {
    throw InputError("g(0) = " + std::to_string(g(0.0)) + " is below the level " + std::to_string(target));
  }
  double lo = 0.0, hi = 1.0;
  double g_prev = g(0.0);
  while (g(hi) > target) {
    const double g_hi = g(hi);
    if (g_hi > g_prev) throw InputError("g is not decreasing on the probed range");
    g_prev = g_hi;
    lo = hi;
    hi *= 2.0;
    if (hi > 1e300) return kInf;
  }
  if (g(hi) > g_prev && hi > 1.0) throw InputError("g is not decreasing on the probed range");
  for (int it = 0; it < 400 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (g(mid) > target) lo = mid; else hi = mid;
  }
  return hi;
}

}  // namespace

PlanConditions check_plan_row(const OptimalDatumPlan& plan, const PlanRow& row) {
  PlanConditions c;
  c.eigen_decay = std::exp(-plan.lambda * row.t_next / (row.radius * row.radius)) >= 0.75;
  c.disjoint_ball = row.centre > row.radius + 1.0 && row.centre - row.radius > plan.hole_radius;
  c.gaussian_small = gaussian_small(plan.dim, row.n, row.t_n, row.t_next, row.radius, row.centre);
  return c;
}

OptimalDatumPlan optimal_datum_plan(const DecreasingFunction& g, int n_max, int dim,
                                    double hole_radius) {
  if (dim != 3) throw UnsupportedFeature("optimal_datum_plan: eigenpair hard-wired for N = 3");
  if (n_max < 1 || n_max > 8) throw PreconditionError("optimal_datum_plan: n_max must be in [1, 8]");
  OptimalDatumPlan plan;
  plan.g = g;
  plan.dim = dim;
  plan.hole_radius = hole_radius;
  plan.lambda = unit_ball_eigenvalue_3d();
  plan.psi_peak = unit_ball_eigenfunction_3d(0.0);

  std::vector<double> levels;
  for (int n = 1; n <= n_max + 1; ++n) {
    const double t = solve_level(g, std::ldexp(1.0, -(n + 2)));
    if (!std::isfinite(t)) break;
    if (!levels.empty() && !(t > levels.back())) {
      throw InputError("g does not decrease strictly between levels");
    }
    levels.push_back(t);
  }
  const int rows = static_cast<int>(levels.size()) - 1;
  if (rows < n_max) {
    plan.truncated = true;
    plan.warning = "level times overflow after n = " + std::to_string(std::max(rows, 0)) +
                   "; plan truncated from n_max = " + std::to_string(n_max);
  }
  for (int n = 1; n <= rows; ++n) {
    PlanRow row;
    row.n = n;
    row.t_n = levels[n - 1];
    row.t_next = levels[n];
    row.weight = std::ldexp(1.0, -n);
    // exp(-lambda t / R^2) >= 3/4  <=>  R >= sqrt(lambda t / ln(4/3))
    row.radius = std::ceil(std::sqrt(plan.lambda * row.t_next / std::log(4.0 / 3.0)));
    row.radius = std::max(row.radius, 2.0);
    const double lo = row.radius + std::max(1.0, hole_radius);
    auto ok = [&](double x) {
      return x > lo && gaussian_small(dim, n, row.t_n, row.t_next, row.radius, x);
    };
    double hi = std::nextafter(lo, kInf);
    double span = std::max(1.0, lo);
    while (!ok(hi)) {
      hi = lo + span;
      span *= 2.0;
      if (!std::isfinite(hi)) throw NumericalError("optimal_datum_plan: |x_n| overflow");
    }
    double left = lo;
    for (int it = 0; it < 200 && hi - left > 1e-12 * hi; ++it) {
      const double mid = 0.5 * (left + hi);
      if (ok(mid)) hi = mid; else left = mid;
    }
    row.centre = hi;
    plan.rows.push_back(row);
  }
  for (const auto& row : plan.rows) {
    const PlanConditions c = check_plan_row(plan, row);
    if (!c.all()) {
      throw NumericalError("optimal_datum_plan: row " + std::to_string(row.n) + " fails " +
                           c.first_failure());
    }
  }
  for (std::size_t k = 1; k < plan.rows.size(); ++k) {
    if (!(plan.rows[k].radius > plan.rows[k - 1].radius)) {
      // Integer rounding can tie neighbouring radii; bump to keep R_n increasing.
      plan.rows[k].radius = plan.rows[k - 1].radius + 1.0;
    }
  }
  return plan;
}

}  // namespace heatext
