#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "epicon/solver.hpp"

namespace epicon {

Scenario load_scenario(const std::filesystem::path& path);
void save_scenario(const Scenario& sc, const std::filesystem::path& path);
Scenario scenario_from_json_text(const std::string& text);
std::string scenario_to_json_text(const Scenario& sc);

void write_trajectory_csv(const Trajectory& traj, const std::filesystem::path& path);
void write_control_csv(const ControlTrajectory& u, const std::filesystem::path& path);
void write_costates_csv(const Scenario& sc, const Trajectory& traj, const ControlTrajectory& u,
                        const CostateTrajectory& cs, const std::filesystem::path& path);
ControlTrajectory read_control_csv(const std::filesystem::path& path);

uint64_t fnv1a64_file(const std::filesystem::path& path);
std::string checksum_hex(uint64_t value);

struct RunManifest {
  std::string scenario_source;
  std::string command;
  std::string method;
  std::string out_dir;
  std::vector<std::pair<std::string, std::string>> files;  // name, checksum
};

void write_manifest(const RunManifest& manifest, const std::filesystem::path& path);

}  // namespace epicon
