#include <cstdio>
#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "heatext/errors.hpp"
#include "heatext_cli/commands.hpp"
#include "heatext_cli/config.hpp"

namespace {

enum ExitCode { kOk = 0, kVerdictFailed = 2, kConfigError = 3, kNumericalFailure = 4 };

std::string config_help() {
  std::string out = "Run config keys (file sections in brackets):\n";
  for (const auto& k : heatext::cli::config_keys()) {
    out += "  [" + std::string(k.section) + "] " + k.key + ": " + k.help + "\n";
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace heatext::cli;
  CLI::App app{"Heat equation on exterior domains: profiles, evolutions and asymptotic checks"};
  app.require_subcommand(1);
  app.fallthrough();
  app.footer(config_help());
  std::string out_flag;
  app.add_option("--out", out_flag, "output root (default $HEATEXT_OUT or ./heatext-out)");

  ProfileArgs profile;
  auto* p = app.add_subcommand("profile", "asymptotic profile tables");
  p->add_option("--dim", profile.dim);
  p->add_option("--hole", profile.hole, "ball:a or rect:WxH");
  p->add_option("--theta", profile.theta);
  p->add_option("--method", profile.method, "closed-form, elliptic or both");
  p->add_option("--R", profile.radii, "truncation radii for the elliptic limit")->delimiter(',');
  p->add_flag("--compare", profile.compare, "agreement report between closed form and elliptic limit");
  p->add_option("--planar-h", profile.planar_h, "cell size of planar elliptic solves");

  std::string config_file;
  std::map<std::string, std::string> overrides;
  auto* e = app.add_subcommand("evolve", "evolve a run config and check its study");
  e->set_help_flag("--help", "print this help message and exit");
  e->add_option("--config", config_file, "config file")->check(CLI::ExistingFile);
  for (const auto& k : config_keys()) {
    const std::string key = k.key;
    if (key == "audit") continue;
    e->add_option_function<std::string>("--" + key, [&overrides, key](const std::string& v) { overrides[key] = v; }, k.help);
  }
  e->add_flag_function("--audit", [&overrides](std::int64_t) { overrides["audit"] = "true"; },
                       "rerun at 2 r_out and flag verdicts that flip");

  HerraizArgs herraiz;
  std::string phi = "on";
  auto* h = app.add_subcommand("herraiz", "exact solution against both asymptotic predictions");
  h->add_option("--t", herraiz.t);
  h->add_option("--phi", phi, "on or off")->check(CLI::IsMember({"on", "off"}));
  h->add_option("--samples", herraiz.samples);

  OptimalArgs optimal;
  auto* o = app.add_subcommand("optimal", "optimality datum plan and its single-ball checks");
  o->add_option("--g", optimal.g, "recip:c, pow:alpha, exp:k or log");
  o->add_option("--n", optimal.n);
  o->add_option("--gamma", optimal.gamma);
  o->add_option("--ball-cells", optimal.ball_cells);

  KernelArgs kernel;
  auto* k = app.add_subcommand("kernel", "Dirichlet kernel column against the Gaussian");
  k->add_option("--y", kernel.y, "source point x,y,z on the z axis")->delimiter(',');
  k->add_option("--t", kernel.times, "times")->delimiter(',');
  k->add_option("--width", kernel.width, "mollifier width");
  k->add_option("--box", kernel.box, "half extent of the meridian box");
  k->add_option("--n-rho", kernel.n_rho);
  k->add_option("--n-z", kernel.n_z);
  k->add_option("--dt", kernel.dt);
  bool no_snapshots = false;
  k->add_flag("--no-snapshots", no_snapshots, "skip the probe snapshot CSV");

  SweepArgs sweep;
  std::string sweep_config;
  std::string values;
  auto* s = app.add_subcommand("sweep", "concurrent evolve runs over one config key");
  s->add_option("--config", sweep_config, "base config file")->check(CLI::ExistingFile);
  s->add_option("--param", sweep.param, "config key to vary")->required();
  s->add_option("--values", values, "comma separated values")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    const auto root = output_root(out_flag);
    std::vector<CommandResult> results;
    if (*p) {
      results.push_back(cmd_profile(profile, root));
    } else if (*e) {
      RunConfig config = config_file.empty() ? RunConfig{} : load_config_file(config_file);
      apply_overrides(config, overrides);
      results.push_back(cmd_evolve(config, root));
    } else if (*h) {
      herraiz.phi = phi == "on";
      results.push_back(cmd_herraiz(herraiz, root));
    } else if (*o) {
      results.push_back(cmd_optimal(optimal, root));
    } else if (*k) {
      kernel.snapshots = !no_snapshots;
      results.push_back(cmd_kernel(kernel, root));
    } else if (*s) {
      sweep.base = sweep_config.empty() ? RunConfig{} : load_config_file(sweep_config);
      std::string item;
      for (char c : values + ",") {
        if (c == ',') {
          if (!item.empty()) sweep.values.push_back(item);
          item.clear();
        } else {
          item += c;
        }
      }
      std::filesystem::path manifest;
      results = cmd_sweep(sweep, root, &manifest);
      std::cout << "manifest " << manifest.generic_string() << "\n";
    }
    for (const auto& r : results) std::cout << format_result(r);
    return verdict_exit_code(results) == 0 ? kOk : kVerdictFailed;
  } catch (const ConfigError& err) {
    std::cerr << "config error: " << err.what() << "\n";
    return kConfigError;
  } catch (const heatext::InputError& err) {
    std::cerr << "input error: " << err.what() << "\n";
    return kConfigError;
  } catch (const heatext::PreconditionError& err) {
    std::cerr << "config error: " << err.what() << "\n";
    return kConfigError;
  } catch (const heatext::NumericalError& err) {
    std::cerr << "numerical failure";
    if (err.step() >= 0) std::cerr << " at step " << err.step();
    std::cerr << ": " << err.what() << "\n";
    return kNumericalFailure;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kNumericalFailure;
  }
}
