#pragma once

#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include "heatext_cli/config.hpp"

namespace heatext::cli {

struct Verdict {
  std::string name;
  bool passed;
  std::string detail;
  // The checked quantity and its acceptance threshold, when the verdict has one.
  double value = std::numeric_limits<double>::quiet_NaN();
  double threshold = std::numeric_limits<double>::quiet_NaN();
};

struct CommandResult {
  std::string run_id;
  std::filesystem::path dir;
  std::string config_echo;
  std::vector<Verdict> verdicts;
  std::vector<std::filesystem::path> files;
  std::vector<std::string> warnings;

  bool all_passed() const;
};

// Writes result.json (run id, config echo, verdicts, files) into result.dir.
void write_result(const CommandResult& result);
std::string format_result(const CommandResult& result);

struct ProfileArgs {
  int dim = 3;
  std::string hole = "ball:1";
  double theta = 0.0;
  std::string method = "closed-form";  // closed-form, elliptic or both
  std::vector<double> radii = {8, 16, 32};
  bool compare = false;
  double planar_h = 0.25;
};

CommandResult cmd_profile(const ProfileArgs& args, const std::filesystem::path& root);

// Runs the solver for a run config, writes snapshots/ledger/rate CSVs and the
// error plot, then derives verdicts from the files it wrote. With audit set the
// run is repeated at 2 r_out and verdicts that flip are reported.
CommandResult cmd_evolve(const RunConfig& config, const std::filesystem::path& root);

// Verdicts of an evolve run recomputed from its CSV files.
std::vector<Verdict> evolve_verdicts(const ResolvedRun& run, const std::filesystem::path& dir);

struct HerraizArgs {
  double t = 100.0;
  bool phi = true;
  int samples = 4001;
};

CommandResult cmd_herraiz(const HerraizArgs& args, const std::filesystem::path& root);

struct OptimalArgs {
  std::string g = "recip:4";
  int n = 4;
  double gamma = 0.25;
  int ball_cells = 256;
  std::vector<double> linf_times = {1, 10, 100, 1000};
};

CommandResult cmd_optimal(const OptimalArgs& args, const std::filesystem::path& root);

struct KernelArgs {
  std::vector<double> y = {0, 0, 3};
  std::vector<double> times = {10};
  double width = 0.75;
  double box = 40.0;
  int n_rho = 256;
  int n_z = 512;
  double dt = 1.0 / 16.0;
  bool snapshots = true;
};

CommandResult cmd_kernel(const KernelArgs& args, const std::filesystem::path& root);

struct SweepArgs {
  RunConfig base;
  std::string param;
  std::vector<std::string> values;
};

// One evolve run per value, executed concurrently; the manifest lists every
// run once all of them finished.
std::vector<CommandResult> cmd_sweep(const SweepArgs& args, const std::filesystem::path& root,
                                     std::filesystem::path* manifest = nullptr);

// 0 when every verdict passed, 2 otherwise.
int verdict_exit_code(const std::vector<CommandResult>& results);

}  // namespace heatext::cli
