#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "heatext/asymptotics.hpp"
#include "heatext/constructions.hpp"
#include "heatext/grid.hpp"
#include "heatext/profile.hpp"
#include "heatext/solver.hpp"

namespace heatext {

// %.12e
std::string format_number(double value);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  // Index of a named column; throws InputError when absent.
  std::size_t column(const std::string& name) const;
  std::vector<double> values(const std::string& name) const;
};

// Header row, comma separated, LF line endings, every value as %.12e.
void write_csv(const std::filesystem::path& path, const CsvTable& table);
std::string to_csv_string(const CsvTable& table);
CsvTable read_csv(const std::filesystem::path& path);

// r,phi or x,y,phi.
CsvTable profile_table(const ProfileTable& profile);
// r followed by one phi_R column per truncation radius (radial elliptic tables).
CsvTable elliptic_levels_table(const ProfileTable& profile);
// t,r,u / t,x,y,u / t,rho,z,u; inactive nodes are skipped.
CsvTable snapshots_table(const std::vector<Field>& snapshots);
// t,mass,flux
CsvTable ledger_table(const MassLedger& ledger);
// t,p,raw_norm,scaled_norm,mass,mass_gap; p = inf is written as inf.
CsvTable rate_table(const RateSeries& series);
// r,exact,theorem_pred,herraiz_pred
CsvTable herraiz_table(const HerraizComparison& comparison);
// n,t_n,R_n,x_n,weight
CsvTable plan_table(const OptimalDatumPlan& plan);

}  // namespace heatext
