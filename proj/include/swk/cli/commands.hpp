#pragma once

#include <iosfwd>

#include "swk/cli/config.hpp"

namespace swk::cli {

/// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitNumerical = 1;
inline constexpr int kExitConfig = 2;

int cmd_distance(const ExperimentConfig& e, std::ostream& log);
int cmd_pca(const ExperimentConfig& e, std::ostream& log);
int cmd_cluster(const ExperimentConfig& e, std::ostream& log);
int cmd_classify(const ExperimentConfig& e, std::ostream& log);
int cmd_certify(const ExperimentConfig& e, std::ostream& log);
int cmd_invert(const ExperimentConfig& e, std::ostream& log);
int cmd_ingest(const ExperimentConfig& e, std::ostream& log);

/// Parses the command line, runs the subcommand and maps failures to exit
/// codes (configuration errors 2, numerical failures 1).
int run(int argc, char** argv);

}  // namespace swk::cli
