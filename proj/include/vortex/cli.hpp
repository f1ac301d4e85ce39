// Batch front end: key=value run specifications, result emission, sweeps.
#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vortex/solver.hpp"

namespace vortex::cli {

enum ExitCode : int { kOk = 0, kValidation = 2, kNotConverged = 3, kIo = 4 };

/// Flat key/value run description. Values stay strings until a command reads them.
struct RunSpec {
  std::string command;
  std::map<std::string, std::string> values;

  bool has(const std::string& key) const { return values.count(key) != 0; }
  std::string get(const std::string& key, const std::string& fallback) const;
  double number(const std::string& key, double fallback) const;
  long integer(const std::string& key, long fallback) const;
  bool flag(const std::string& key, bool fallback) const;
  std::vector<double> list(const std::string& key) const;
};

/// Reads `key = value` lines; '#' starts a comment.
std::map<std::string, std::string> read_spec_file(const std::string& path);

/// argv[0] is the command, the rest key=value pairs. `spec=FILE` loads a file
/// whose entries are overridden by the command line.
RunSpec parse_args(const std::vector<std::string>& args);

/// One solved (or failed) configuration in the result-document schema.
struct ResultRecord {
  std::string model;
  int n = 0;
  double omega = 0.0;
  double energy = 0.0;
  std::optional<double> power;
  double grad_norm = 0.0;
  double el_residual_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  std::optional<double> decay_rate;
  std::optional<double> bound_lower;
  std::optional<bool> bound_check;
  long seed = 0;
  std::string note;
};

std::string format_double(double x);
std::string result_document(const ResultRecord& rec);
std::string profile_table(const SolveReport& report, const VortexProblem<double>& problem);

/// Problem and solver configuration described by a spec for one of the
/// solve commands.
VortexProblem<double> problem_from_spec(const std::string& command, const RunSpec& spec);
SolverConfig config_from_spec(const std::string& command, const RunSpec& spec);

/// Runs a command; diagnostics go to `log`. Returns the process exit code.
int run(const RunSpec& spec, std::ostream& log);
int main(const std::vector<std::string>& args, std::ostream& log);

}  // namespace vortex::cli
