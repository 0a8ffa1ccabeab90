#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "scenario.hpp"

namespace rabi::cli {

inline constexpr const char* kToolVersion = "0.3.0";

struct RunOptions {
  std::filesystem::path out_dir = ".";
  bool svg = false;  ///< also honoured when the scenario asks for SVG
  std::optional<std::uint64_t> seed;
  std::size_t threads = 1;
};

/// Each command writes its files under out_dir and returns their paths.
std::vector<std::filesystem::path> cmd_simulate(const Scenario& s, const RunOptions& opt);
std::vector<std::filesystem::path> cmd_scan(const Scenario& s, const RunOptions& opt);
std::vector<std::filesystem::path> cmd_spectrum(const Scenario& s, const RunOptions& opt);
std::vector<std::filesystem::path> cmd_field_dist(const Scenario& s, const RunOptions& opt);

/// Dispatches on the command name.
std::vector<std::filesystem::path> run_command(const std::string& command, const Scenario& s, const RunOptions& opt);

/// Directory searched by `reproduce`: $RABI_PRESET_DIR, else the build-time default.
std::filesystem::path default_preset_dir();
std::filesystem::path preset_path(const std::string& preset, const std::filesystem::path& dir);

/// Entry point shared by the executable and the tests; returns the exit code.
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace rabi::cli
