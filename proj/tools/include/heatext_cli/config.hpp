#pragma once

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "heatext/domain.hpp"

namespace heatext::cli {

// Invalid configuration; carries the offending field name.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& field, const std::string& message)
      : std::runtime_error(field + ": " + message), field_(field) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

// Every key, grouped by the section it lives in:
//
//   [domain]  dim, hole (ball:a | rect:WxH), theta, thetas
//   [grid]    geometry (auto | radial | planar), h, nx, r_out
//   [time]    dt, times
//   [run]     datum, study, check, delta, audit
//
// Lists are comma separated. Keys may also appear before any section header.
struct RunConfig {
  int dim = 3;
  std::string hole = "ball:1";
  double theta = 0.0;
  std::vector<double> thetas;
  std::string geometry = "auto";
  double h = 1.0 / 64.0;
  int nx = 0;
  double r_out = 0.0;  // 0: sizing rule for the largest snapshot time
  double dt = 1.0 / 128.0;
  std::vector<double> times;
  std::string datum = "explicit-remark";
  std::string study = "l1";
  std::string check;
  double delta = 1.0;
  bool audit = false;
};

struct KeyInfo {
  const char* section;
  const char* key;
  const char* help;
};

const std::vector<KeyInfo>& config_keys();

// Assigns one key; throws ConfigError for unknown keys or unparsable values.
void set_config_value(RunConfig& config, const std::string& key, const std::string& value);

RunConfig parse_config_text(const std::string& text);
RunConfig load_config_file(const std::filesystem::path& path);
void apply_overrides(RunConfig& config, const std::map<std::string, std::string>& overrides);

// Canonical "key = value" listing, one line per key in config_keys() order.
std::string config_echo(const RunConfig& config);

// 16 hex digits of the FNV-1a hash of the echo.
std::string run_id(const std::string& prefix, const std::string& echo);

std::vector<double> parse_list(const std::string& field, const std::string& text);
double parse_double(const std::string& field, const std::string& text);
HoleSpec parse_hole(const std::string& text);

enum class Geometry { kRadial, kPlanar, kUnitBall };

// Fully validated run description with every default resolved.
struct ResolvedRun {
  RunConfig config;
  Geometry geometry;
  HoleSpec hole;
  double hole_radius;
  double r_out;
  int cells;  // radial intervals or planar cells per side
  std::vector<double> times;
};

ResolvedRun resolve(const RunConfig& config);

// Same run with the truncation radius doubled and the spacing kept.
ResolvedRun with_doubled_far_radius(const ResolvedRun& run);

// Output root: explicit flag, then $HEATEXT_OUT, then ./heatext-out.
std::filesystem::path output_root(const std::string& flag_value);

}  // namespace heatext::cli
