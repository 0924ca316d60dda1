#pragma once

#include "qes/report_io.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace qes::cli {

enum ExitCode : int { Pass = 0, CheckFailure = 1, ConfigFailure = 2, Undecided = 3 };

struct CommandOptions {
  std::optional<double> tol;
  std::uint64_t seed = 1;
};

struct OutputFile {
  std::string name;
  std::string content;
};

struct CommandResult {
  int exit_code = Pass;
  nlohmann::ordered_json report;
  /// Extra files (boundary-plot CSVs), written next to the report.
  std::vector<OutputFile> files;
};

/// Reads and parses a JSON config; throws ConfigError.
nlohmann::json load_config(const std::string& path);

/// Each command validates the config against its own key set, and turns
/// configuration errors into exit code 2 with an {"error": ...} report.
CommandResult run_verify(const nlohmann::json& config, const CommandOptions& opts);
CommandResult run_spectrum(const nlohmann::json& config, const CommandOptions& opts);
CommandResult run_classify(const nlohmann::json& config, const CommandOptions& opts);
CommandResult run_boundary_plot(const nlohmann::json& config, const CommandOptions& opts);

/// Writes through a temporary file in the same directory and renames it.
void write_atomic(const std::string& path, const std::string& content);

/// Full command line entry point; returns the process exit code.
int main_entry(int argc, char** argv);

}  // namespace qes::cli
