#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "flocksim/config.hpp"

namespace flocksim {

inline constexpr int kExitOk = 0;
inline constexpr int kExitSchema = 2;
inline constexpr int kExitNumerical = 3;

// Task tags accepted on the command line and in the config's `task` key.
const std::vector<std::string>& task_names();

// Runs one task: validates the config (strictly; unknown keys are an error),
// writes every artifact plus config.snapshot and manifest.json under out_dir.
// Stochastic artifacts are bitwise-deterministic given the config.
// Throws ConfigError / NumericalError; the CLI maps those to exit codes.
void run_task(const std::string& task, Config& cfg,
              const std::filesystem::path& out_dir, int jobs);

}  // namespace flocksim
