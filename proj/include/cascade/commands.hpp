#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "cascade/config.hpp"

namespace cascade {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitUsage = 2;

struct CommandResult {
  int exit_code = kExitOk;
  nlohmann::json report;
  std::vector<std::string> files;     // written, relative to the output directory
  std::vector<std::string> failures;  // names of failed checks
  std::vector<std::string> warnings;
};

// Each command writes its outputs into `out` (created if missing). Inputs are
// assumed validated.
CommandResult cmd_coeffs(const RunConfig& cfg, const std::filesystem::path& out);
CommandResult cmd_ode(const RunConfig& cfg, const std::filesystem::path& out);
CommandResult cmd_growth(const RunConfig& cfg, const std::filesystem::path& out);
CommandResult cmd_solve(const RunConfig& cfg, const std::filesystem::path& out);
CommandResult cmd_compare(const RunConfig& cfg, const std::filesystem::path& out);
CommandResult cmd_verify(const RunConfig& cfg, const std::filesystem::path& out);

const std::vector<std::string>& command_names();

/// Validates cfg (ConfigError on bad input), runs the named command into
/// cfg.general.out_dir and writes manifest_<name>.json next to its outputs.
CommandResult run_command(const std::string& name, const RunConfig& cfg);

/// Library and build versions recorded in manifests.
nlohmann::json version_info();

}  // namespace cascade
