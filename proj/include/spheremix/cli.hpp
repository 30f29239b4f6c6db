#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "spheremix/types.hpp"

namespace spheremix {

// exit codes shared by every subcommand
inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 2;
inline constexpr int kExitNonConverged = 3;  // model is still written
inline constexpr int kExitInternalError = 4;

struct CliOptions {
    std::string config_path;
    std::string data_dir;    // fit/evaluate input
    std::string model_dir;   // evaluate input
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    int replications = 1;
    double scale = 1.0;
    int threads = 1;
    int setting = 1;
    std::optional<CompositeWeights> weights;
    bool grid_search = false;
};

int cmd_simulate(const CliOptions& opts);
int cmd_fit(const CliOptions& opts);
int cmd_evaluate(const CliOptions& opts);
int cmd_benchmark(const CliOptions& opts);

}  // namespace spheremix
