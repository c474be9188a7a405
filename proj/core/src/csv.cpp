#include "heatext/csv.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "heatext/errors.hpp"

namespace heatext {

std::string format_number(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12e", value);
  return buf;
}

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t k = 0; k < header.size(); ++k) {
    if (header[k] == name) return k;
  }
  throw InputError("csv: no column named '" + name + "'");
}

std::vector<double> CsvTable::values(const std::string& name) const {
  const std::size_t c = column(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& row : rows) out.push_back(row.at(c));
  return out;
}

std::string to_csv_string(const CsvTable& table) {
  std::string out;
  for (std::size_t k = 0; k < table.header.size(); ++k) {
    if (k) out += ',';
    out += table.header[k];
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (k) out += ',';
      out += format_number(row[k]);
    }
    out += '\n';
  }
  return out;
}

void write_csv(const std::filesystem::path& path, const CsvTable& table) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw InputError("csv: cannot open " + path.string() + " for writing");
  os << to_csv_string(table);
  if (!os) throw InputError("csv: write failed for " + path.string());
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw InputError("csv: cannot open " + path.string());
  CsvTable table;
  std::string line;
  if (!std::getline(is, line)) throw InputError("csv: " + path.string() + " is empty");
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) table.header.push_back(cell);
  }
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      char* end = nullptr;
      errno = 0;
      const double v = std::strtod(cell.c_str(), &end);
      // Underflow to a subnormal or zero is fine; overflow and junk are not.
      if (!cell.empty() && end == cell.c_str() + cell.size() && !(errno == ERANGE && std::isinf(v))) {
        row.push_back(v);
      } else {
        throw InputError("csv: bad number '" + cell + "' on line " + std::to_string(line_no) +
                         " of " + path.string());
      }
    }
    if (row.size() != table.header.size()) {
      throw InputError("csv: line " + std::to_string(line_no) + " of " + path.string() +
                       " has the wrong number of fields");
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

CsvTable profile_table(const ProfileTable& profile) {
  CsvTable table;
  if (profile.layout() == SampleLayout::kRadial) {
    table.header = {"r", "phi"};
    for (const auto& s : profile.samples()) table.rows.push_back({s.x, s.value});
  } else {
    table.header = {"x", "y", "phi"};
    for (const auto& s : profile.samples()) table.rows.push_back({s.x, s.y, s.value});
  }
  return table;
}

CsvTable elliptic_levels_table(const ProfileTable& profile) {
  const EllipticLimit* limit = profile.elliptic();
  if (!limit) throw PreconditionError("elliptic_levels_table: profile is not an elliptic limit");
  CsvTable table;
  const bool radial = profile.layout() == SampleLayout::kRadial;
  table.header = radial ? std::vector<std::string>{"r"} : std::vector<std::string>{"x", "y"};
  for (double R : limit->radii) {
    std::ostringstream os;
    os << "phi_R" << R;
    table.header.push_back(os.str());
  }
  const auto& samples = profile.samples();
  for (std::size_t s = 0; s < samples.size(); ++s) {
    std::vector<double> row;
    row.push_back(samples[s].x);
    if (!radial) row.push_back(samples[s].y);
    for (const auto& level : limit->values) row.push_back(s < level.size() ? level[s] : NAN);
    table.rows.push_back(std::move(row));
  }
  return table;
}

CsvTable snapshots_table(const std::vector<Field>& snapshots) {
  CsvTable table;
  if (snapshots.empty()) {
    table.header = {"t", "r", "u"};
    return table;
  }
  const Grid& g0 = *snapshots.front().grid;
  switch (g0.kind()) {
    case GridKind::kRadial: table.header = {"t", "r", "u"}; break;
    case GridKind::kPlanar: table.header = {"t", "x", "y", "u"}; break;
    case GridKind::kAxisymmetric: table.header = {"t", "rho", "z", "u"}; break;
  }
  for (const Field& f : snapshots) {
    const Grid& g = *f.grid;
    if (g.kind() != g0.kind()) throw ShapeError("snapshots_table: mixed grid kinds");
    for (std::size_t k = 0; k < g.size(); ++k) {
      if (!g.active(k)) continue;
      if (g.kind() == GridKind::kRadial) {
        table.rows.push_back({f.time, g.first(k), f.values[k]});
      } else {
        table.rows.push_back({f.time, g.first(k), g.second(k), f.values[k]});
      }
    }
  }
  return table;
}

CsvTable ledger_table(const MassLedger& ledger) {
  CsvTable table{{"t", "mass", "flux"}, {}};
  for (const auto& row : ledger.rows) table.rows.push_back({row.t, row.mass, row.flux});
  return table;
}

CsvTable rate_table(const RateSeries& series) {
  CsvTable table{{"t", "p", "raw_norm", "scaled_norm", "mass", "mass_gap"}, {}};
  for (const auto& row : series.rows) {
    table.rows.push_back({row.t, row.p, row.raw_norm, row.scaled_norm, row.mass, row.mass_gap});
  }
  return table;
}

CsvTable herraiz_table(const HerraizComparison& c) {
  CsvTable table{{"r", "exact", "theorem_pred", "herraiz_pred"}, {}};
  for (std::size_t k = 0; k < c.r.size(); ++k) {
    table.rows.push_back({c.r[k], c.exact[k], c.theorem[k], c.herraiz[k]});
  }
  return table;
}

CsvTable plan_table(const OptimalDatumPlan& plan) {
  CsvTable table{{"n", "t_n", "R_n", "x_n", "weight"}, {}};
  for (const auto& row : plan.rows) {
    table.rows.push_back({double(row.n), row.t_n, row.radius, row.centre, row.weight});
  }
  return table;
}

}  // namespace heatext
