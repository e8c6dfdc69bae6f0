#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "maxprin/runner.hpp"

namespace {

constexpr const char* kCommands[] = {"spectrum", "barrier", "parabolic", "exhaust",
                                     "mp-check", "abp",     "symmetry"};

constexpr const char* kDescriptions[] = {
    "principal Dirichlet eigenvalue of the fiber patch",
    "classify the warp profile and certify a radial barrier",
    "cap potentials and the D-parabolicity verdict",
    "truncated eigenvalues and their extrapolated limit",
    "maximum principle trials or a counterexample",
    "explicit ABP constant and an empirical sup bound",
    "semilinear annulus solve, symmetry defect and stability",
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"maxprin: numerical checks of maximum principles on warped products"};
  app.require_subcommand(1);
  std::string config_path;
  std::string out_dir = ".";
  bool verbose = false;
  for (std::size_t i = 0; i < std::size(kCommands); ++i) {
    CLI::App* sub = app.add_subcommand(kCommands[i], kDescriptions[i]);
    sub->add_option("--config", config_path, "experiment config file")->required();
    sub->add_option("--out-dir", out_dir, "directory for report.json and CSV files");
    sub->add_flag("--verbose", verbose, "progress messages on stderr");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return maxprin::kExitConfigError;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  std::ifstream file(config_path, std::ios::binary);
  if (!file) {
    std::cerr << "maxprin: cannot read " << config_path << "\n";
    return maxprin::kExitIoError;
  }
  std::stringstream text;
  text << file.rdbuf();

  maxprin::RunReport report;
  try {
    maxprin::ExperimentConfig config = maxprin::parse_config(text.str());
    const maxprin::Command selected = maxprin::parse_command(command);
    if (config.experiment.command && *config.experiment.command != selected)
      throw maxprin::Error(maxprin::ErrorKind::ValidationError,
                           "experiment.command: config says " +
                               maxprin::to_string(*config.experiment.command) + ", invoked as " +
                               command);
    config.experiment.command = selected;
    maxprin::Logger log;
    if (verbose) log = [](const std::string& m) { std::cerr << "[maxprin] " << m << "\n"; };
    report = maxprin::run(config, log);
  } catch (const maxprin::Error& e) {
    std::cerr << "maxprin: " << e.what() << "\n";
    return maxprin::exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "maxprin: " << e.what() << "\n";
    return maxprin::kExitInternalError;
  }

  try {
    maxprin::write_outputs(report, out_dir);
  } catch (const std::exception& e) {
    std::cerr << "maxprin: writing outputs failed: " << e.what() << "\n";
    return maxprin::kExitIoError;
  }
  std::cout << command << ": verdict " << report.verdict << " (hypothesis " << report.expected
            << "), exit " << report.exit_code << "\n";
  if (verbose)
    std::cerr << "[maxprin] wrote " << (std::filesystem::path(out_dir) / "report.json").string()
              << " and " << report.csv.size() << " csv file(s)\n";
  return report.exit_code;
}
