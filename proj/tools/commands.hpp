#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

namespace srgeo::cli {

enum ExitCode : int { kOk = 0, kValidation = 2, kNumerical = 3 };

struct RunConfig {
  std::string command;
  nlohmann::json params = nlohmann::json::object();  ///< flat key/value parameters
  std::string out;                                   ///< empty writes to stdout
  std::string format = "csv";
  double tol = 0.0;  ///< 0 keeps the command default
  unsigned jobs = 1;
};

/// Names of the available commands.
const std::vector<std::string>& command_names();

/// Runs one command and returns the rendered output. `stage` names the module
/// operation in progress, for error messages.
std::string run_command(const RunConfig& cfg, std::string& stage);

/// Full command line entry point; returns the process exit code.
int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace srgeo::cli
