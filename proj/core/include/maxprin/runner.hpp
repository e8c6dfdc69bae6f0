#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "maxprin/config.hpp"
#include "maxprin/error.hpp"

namespace maxprin {

inline constexpr int kSchemaVersion = 1;

/// Process exit codes.
enum ExitCode : int {
  kExitAsHypothesized = 0,
  kExitIndeterminate = 3,
  kExitHypothesisViolated = 4,
  kExitConfigError = 10,
  kExitIoError = 11,
  kExitSolverError = 12,
  kExitInternalError = 13,
};

/// ParseError and ValidationError map to 10, solver failures to 12, the rest to 13.
int exit_code_for(ErrorKind kind);

struct CsvFile {
  std::string name;  // file name inside the output directory
  std::string content;
};

struct RunReport {
  Command command = Command::Spectrum;
  std::string expected;  // resolved hypothesis
  std::string verdict;
  int exit_code = kExitAsHypothesized;
  /// report.json without wall_time_s: deterministic for a given config.
  std::string payload_json;
  double wall_time_s = 0.0;
  std::vector<CsvFile> csv;

  /// The full report.json text (payload plus wall_time_s).
  std::string report_json() const;
};

using Logger = std::function<void(const std::string&)>;

/// Runs the experiment selected by config.experiment.command (required). Nothing is
/// written; errors propagate as maxprin::Error.
RunReport run(const ExperimentConfig& config, const Logger& log = {});

/// Writes report.json and the CSV files. Files are staged under temporary names and renamed
/// only once all of them are written, so a failure leaves no partial outputs.
void write_outputs(const RunReport& report, const std::filesystem::path& out_dir);

}  // namespace maxprin
