#include "heatext_cli/config.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "heatext_cli/datum.hpp"

namespace heatext::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string join(const std::vector<double>& values) {
  std::string out;
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (k) out += ",";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", values[k]);
    out += buf;
  }
  return out;
}

std::string number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

int parse_int(const std::string& field, const std::string& text) {
  const double v = parse_double(field, text);
  if (v != std::floor(v) || std::abs(v) > 1e9) throw ConfigError(field, "expected an integer, got '" + text + "'");
  return static_cast<int>(v);
}

bool parse_bool(const std::string& field, const std::string& text) {
  if (text == "true" || text == "1" || text == "on" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "off" || text == "no") return false;
  throw ConfigError(field, "expected a boolean, got '" + text + "'");
}

bool is_step_multiple(double t, double dt) {
  const double steps = t / dt;
  return std::abs(steps - std::round(steps)) <= 1e-9 * std::max(1.0, steps);
}

std::vector<double> default_times(const std::string& study, Geometry geometry) {
  if (geometry == Geometry::kUnitBall) return {0.25, 0.5, 1.0};
  if (study == "l1" || study == "mass") return {1, 10, 20, 50, 100, 200};
  return {1, 10, 100};
}

}  // namespace

const std::vector<KeyInfo>& config_keys() {
  static const std::vector<KeyInfo> keys = {
      {"domain", "dim", "space dimension, 2 or 3"},
      {"domain", "hole", "ball:a or rect:WxH (half widths, planar only)"},
      {"domain", "theta", "boundary parameter in [0, 1]; 0 Dirichlet, 1 Neumann"},
      {"domain", "thetas", "theta list for check = monotone"},
      {"grid", "geometry", "auto, radial or planar"},
      {"grid", "h", "node spacing (radial) or cell size (planar)"},
      {"grid", "nx", "planar cells per side; 0 derives it from h"},
      {"grid", "r_out", "truncation radius or planar half extent; 0 applies the sizing rule"},
      {"time", "dt", "time step"},
      {"time", "times", "snapshot times, multiples of dt"},
      {"run", "datum", "explicit-remark, gaussian-bump(c,w), ball-eigen(n), indicator-shell(r1,r2)"},
      {"run", "study", "l1, linf, lp, mass or balance"},
      {"run", "check", "empty or monotone"},
      {"run", "delta", "near/far split |x|^2 = delta t"},
      {"run", "audit", "rerun at 2 r_out and flag verdicts that flip"},
  };
  return keys;
}

double parse_double(const std::string& field, const std::string& text) {
  const std::string t = trim(text);
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (t.empty() || end != t.c_str() + t.size() || !std::isfinite(v)) {
    throw ConfigError(field, "expected a number, got '" + text + "'");
  }
  return v;
}

std::vector<double> parse_list(const std::string& field, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (trim(item).empty()) continue;
    out.push_back(parse_double(field, item));
  }
  return out;
}

HoleSpec parse_hole(const std::string& text) {
  const std::string t = trim(text);
  const auto colon = t.find(':');
  if (colon == std::string::npos) throw ConfigError("hole", "expected ball:a or rect:WxH");
  const std::string kind = t.substr(0, colon);
  std::string rest = t.substr(colon + 1);
  if (kind == "ball") {
    const double a = parse_double("hole", rest);
    if (!(a > 0.0)) throw ConfigError("hole", "ball radius must be positive");
    return BallHole{a};
  }
  if (kind == "rect") {
    for (char& c : rest) {
      if (c == 'x' || c == 'X') c = ',';
    }
    const auto w = parse_list("hole", rest);
    if (w.size() != 2 || !(w[0] > 0.0) || !(w[1] > 0.0)) {
      throw ConfigError("hole", "rect needs two positive half widths, e.g. rect:1x1");
    }
    return RectHole{w[0], w[1]};
  }
  throw ConfigError("hole", "unknown hole kind '" + kind + "'");
}

void set_config_value(RunConfig& c, const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  if (key == "dim") c.dim = parse_int(key, v);
  else if (key == "hole") c.hole = v;
  else if (key == "theta") c.theta = parse_double(key, v);
  else if (key == "thetas") c.thetas = parse_list(key, v);
  else if (key == "geometry") c.geometry = v;
  else if (key == "h") c.h = parse_double(key, v);
  else if (key == "nx") c.nx = parse_int(key, v);
  else if (key == "r_out") c.r_out = parse_double(key, v);
  else if (key == "dt") c.dt = parse_double(key, v);
  else if (key == "times") c.times = parse_list(key, v);
  else if (key == "datum") c.datum = v;
  else if (key == "study") c.study = v;
  else if (key == "check") c.check = v;
  else if (key == "delta") c.delta = parse_double(key, v);
  else if (key == "audit") c.audit = parse_bool(key, v);
  else throw ConfigError(key, "unknown configuration key");
}

RunConfig parse_config_text(const std::string& text) {
  RunConfig config;
  std::stringstream ss(text);
  std::string line;
  std::string section;
  int line_no = 0;
  while (std::getline(ss, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("line " + std::to_string(line_no), "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      bool known = false;
      for (const auto& k : config_keys()) known = known || section == k.section;
      if (!known) throw ConfigError("[" + section + "]", "unknown section");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(line_no), "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    for (const auto& k : config_keys()) {
      if (key == k.key && !section.empty() && section != k.section) {
        throw ConfigError(key, "belongs in [" + std::string(k.section) + "], found in [" + section + "]");
      }
    }
    set_config_value(config, key, value);
  }
  return config;
}

RunConfig load_config_file(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("config", "cannot read " + path.string());
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config_text(ss.str());
}

void apply_overrides(RunConfig& config, const std::map<std::string, std::string>& overrides) {
  for (const auto& [key, value] : overrides) set_config_value(config, key, value);
}

std::string config_echo(const RunConfig& c) {
  std::ostringstream os;
  std::string section;
  auto line = [&](const char* sec, const char* key, const std::string& value) {
    if (section != sec) {
      section = sec;
      os << "[" << sec << "]\n";
    }
    os << key << " = " << value << "\n";
  };
  line("domain", "dim", std::to_string(c.dim));
  line("domain", "hole", c.hole);
  line("domain", "theta", number(c.theta));
  line("domain", "thetas", join(c.thetas));
  line("grid", "geometry", c.geometry);
  line("grid", "h", number(c.h));
  line("grid", "nx", std::to_string(c.nx));
  line("grid", "r_out", number(c.r_out));
  line("time", "dt", number(c.dt));
  line("time", "times", join(c.times));
  line("run", "datum", c.datum);
  line("run", "study", c.study);
  line("run", "check", c.check);
  line("run", "delta", number(c.delta));
  line("run", "audit", c.audit ? "true" : "false");
  return os.str();
}

std::string run_id(const std::string& prefix, const std::string& echo) {
  std::uint64_t hash = 14695981039346656037ull;
  for (unsigned char ch : prefix + "\n" + echo) {
    hash ^= ch;
    hash *= 1099511628211ull;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return prefix + "-" + buf;
}

ResolvedRun resolve(const RunConfig& config) {
  ResolvedRun run;
  run.config = config;
  const RunConfig& c = config;
  if (c.dim != 2 && c.dim != 3) throw ConfigError("dim", "must be 2 or 3");
  run.hole = parse_hole(c.hole);
  run.hole_radius = circumscribed_radius(run.hole);
  const bool ball = std::holds_alternative<BallHole>(run.hole);
  if (!ball && c.dim != 2) throw ConfigError("hole", "rect holes are planar only (dim = 2)");
  if (!(c.theta >= 0.0 && c.theta <= 1.0)) throw ConfigError("theta", "must lie in [0, 1]");
  if (!(c.h > 0.0)) throw ConfigError("h", "must be positive");
  if (!(c.dt > 0.0)) throw ConfigError("dt", "must be positive");
  if (!(c.delta > 0.0)) throw ConfigError("delta", "must be positive");
  if (c.study != "l1" && c.study != "linf" && c.study != "lp" && c.study != "mass" && c.study != "balance") {
    throw ConfigError("study", "expected l1, linf, lp, mass or balance, got '" + c.study + "'");
  }
  if (!c.check.empty() && c.check != "monotone") throw ConfigError("check", "expected monotone or nothing");

  const DatumSpec datum = parse_datum(c.datum);
  if (datum.name == "ball-eigen") {
    run.geometry = Geometry::kUnitBall;
  } else if (c.geometry == "radial" || (c.geometry == "auto" && ball)) {
    if (!ball) throw ConfigError("geometry", "radial runs need a ball hole");
    run.geometry = Geometry::kRadial;
  } else if (c.geometry == "planar" || c.geometry == "auto") {
    if (c.dim != 2) throw ConfigError("geometry", "planar runs need dim = 2");
    run.geometry = Geometry::kPlanar;
  } else {
    throw ConfigError("geometry", "expected auto, radial or planar, got '" + c.geometry + "'");
  }
  if (datum.name == "explicit-remark" &&
      (c.dim != 3 || !ball || run.hole_radius != 1.0 || run.geometry != Geometry::kRadial)) {
    throw ConfigError("datum", "explicit-remark needs dim = 3, hole = ball:1 and a radial grid");
  }
  if (c.check == "monotone") {
    if (run.geometry == Geometry::kUnitBall) throw ConfigError("check", "monotone needs an exterior domain");
    run.config.thetas = c.thetas.empty() ? std::vector<double>{0.0, 0.5, 1.0} : c.thetas;
    for (std::size_t k = 0; k < run.config.thetas.size(); ++k) {
      const double th = run.config.thetas[k];
      if (!(th >= 0.0 && th <= 1.0)) throw ConfigError("thetas", "every theta must lie in [0, 1]");
      if (k && !(th > run.config.thetas[k - 1])) throw ConfigError("thetas", "must be increasing");
    }
    if (run.config.thetas.size() < 2) throw ConfigError("thetas", "need at least two values");
  }

  run.times = c.times.empty() ? default_times(c.study, run.geometry) : c.times;
  for (std::size_t k = 0; k < run.times.size(); ++k) {
    if (!(run.times[k] > 0.0)) throw ConfigError("times", "must be positive");
    if (k && !(run.times[k] > run.times[k - 1])) throw ConfigError("times", "must be increasing");
    if (!is_step_multiple(run.times[k], c.dt)) throw ConfigError("times", "must be multiples of dt");
  }
  run.config.times = run.times;
  const double t_max = run.times.back();

  switch (run.geometry) {
    case Geometry::kUnitBall:
      run.r_out = 1.0;
      run.cells = static_cast<int>(std::ceil(1.0 / c.h - 1e-9));
      if (run.cells < 16) throw ConfigError("h", "unit-ball runs need h <= 1/16");
      break;
    case Geometry::kRadial: {
      const double wanted = c.r_out > 0.0 ? c.r_out : far_radius_for(run.hole_radius, t_max);
      run.cells = static_cast<int>(std::ceil((wanted - run.hole_radius) / c.h - 1e-9));
      run.r_out = run.hole_radius + run.cells * c.h;
      if (run.cells < 64) throw ConfigError("h", "radial runs need at least 64 cells");
      break;
    }
    case Geometry::kPlanar: {
      run.r_out = c.r_out > 0.0 ? c.r_out : far_radius_for(run.hole_radius, t_max);
      run.cells = c.nx > 0 ? c.nx : static_cast<int>(std::ceil(2.0 * run.r_out / c.h - 1e-9));
      run.cells += run.cells % 2;
      if (run.cells > 4096) throw ConfigError("nx", "planar grids are limited to 4096 cells per side");
      break;
    }
  }
  if (run.geometry != Geometry::kUnitBall) {
    try {
      ExteriorDomain(c.dim, run.hole, run.r_out);
    } catch (const std::exception& e) {
      throw ConfigError("r_out", e.what());
    }
  }
  const double spacing = run.geometry == Geometry::kPlanar ? 2.0 * run.r_out / run.cells : run.r_out / run.cells;
  const double h_eff = run.geometry == Geometry::kRadial ? c.h : spacing;
  if (c.dt > h_eff * (1.0 + 1e-12)) throw ConfigError("dt", "must not exceed the grid spacing");
  return run;
}

ResolvedRun with_doubled_far_radius(const ResolvedRun& run) {
  ResolvedRun out = run;
  switch (run.geometry) {
    case Geometry::kUnitBall:
      break;
    case Geometry::kRadial: {
      const double h = run.config.h;
      out.cells = static_cast<int>(std::ceil((2.0 * run.r_out - run.hole_radius) / h - 1e-9));
      out.r_out = run.hole_radius + out.cells * h;
      break;
    }
    case Geometry::kPlanar:
      out.r_out = 2.0 * run.r_out;
      out.cells = 2 * run.cells;
      break;
  }
  out.config.r_out = out.r_out;
  return out;
}

std::filesystem::path output_root(const std::string& flag_value) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv("HEATEXT_OUT"); env && *env) return env;
  return "heatext-out";
}

}  // namespace heatext::cli
