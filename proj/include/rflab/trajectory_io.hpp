#ifndef RFLAB_TRAJECTORY_IO_HPP
#define RFLAB_TRAJECTORY_IO_HPP

#include "rflab/flow.hpp"

#include <json.hpp>

#include <string>

namespace rflab
{

  /// 17-significant-digit decimal formatting; round-trip exact for doubles.
  std::string format_g17(double v);

  /// Column order is normative:
  /// t, state coefficients..., scal, norm, min_eig_t, fiber_diameter, rho.
  void write_trajectory_csv(const std::string& path, const FlowTrajectory& traj);

  /// Reads a trajectory CSV back; returns header names and rows.
  struct CsvTable
  {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    int column_index(const std::string& name) const;
  };
  CsvTable read_csv(const std::string& path);

  struct RunManifest
  {
    std::string command;
    std::string catalog_id;
    std::string tool_version = kVersion;
    nlohmann::json config;
    std::vector<std::string> outputs;
  };

  std::string config_hash_hex(const nlohmann::json& config);
  void write_manifest(const std::string& path, const RunManifest& manifest);

} // namespace rflab

#endif
