#include "rflab/trajectory_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace rflab
{

  std::string format_g17(double v)
  {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
  }

  void write_trajectory_csv(const std::string& path, const FlowTrajectory& traj)
  {
    std::ofstream os(path, std::ios::binary);
    if (!os)
      throw input_error("cannot open '" + path + "' for writing");
    const int nc = traj.states.empty() ? 0 : static_cast<int>(traj.states[0].size());
    os << "t";
    for (int i = 0; i < nc; ++i)
      os << ",c" << i;
    os << ",scal,norm,min_eig_t,fiber_diameter,rho\n";
    for (int r = 0; r < traj.steps(); ++r) {
      os << format_g17(traj.times[r]);
      for (int i = 0; i < nc; ++i)
        os << ',' << format_g17(traj.states[r](i));
      const StepDiagnostics& d = traj.diagnostics[r];
      os << ',' << format_g17(d.scal) << ',' << format_g17(d.norm) << ','
         << format_g17(d.min_eig_t) << ',' << format_g17(d.fiber_diameter) << ','
         << format_g17(d.rho) << '\n';
    }
  }

  int CsvTable::column_index(const std::string& name) const
  {
    for (size_t i = 0; i < columns.size(); ++i)
      if (columns[i] == name) return static_cast<int>(i);
    return -1;
  }

  CsvTable read_csv(const std::string& path)
  {
    std::ifstream is(path);
    if (!is)
      throw input_error("cannot open '" + path + "'");
    CsvTable tab;
    std::string line;
    if (!std::getline(is, line))
      throw input_error("empty csv '" + path + "'");
    std::stringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ','))
      tab.columns.push_back(cell);
    while (std::getline(is, line)) {
      if (line.empty()) continue;
      std::vector<double> row;
      std::stringstream ls(line);
      while (std::getline(ls, cell, ','))
        row.push_back(std::stod(cell));
      tab.rows.push_back(std::move(row));
    }
    return tab;
  }

  std::string config_hash_hex(const nlohmann::json& config)
  {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a(config.dump())));
    return buf;
  }

  void write_manifest(const std::string& path, const RunManifest& m)
  {
    nlohmann::json j;
    j["command"] = m.command;
    j["catalog_id"] = m.catalog_id;
    j["config_hash"] = config_hash_hex(m.config);
    j["tool_version"] = m.tool_version;
    j["config"] = m.config;
    j["outputs"] = m.outputs;
    std::ofstream os(path, std::ios::binary);
    if (!os)
      throw input_error("cannot open '" + path + "' for writing");
    os << j.dump(2) << '\n';
  }

} // namespace rflab
