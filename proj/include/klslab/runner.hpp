#pragma once

#include "klslab/config.hpp"
#include "klslab/report.hpp"

namespace klslab {

// Parallelism cap from KLSLAB_THREADS (>= 1); defaults to 1.
int max_threads();

// Density named by the config: gaussian N(0, I), box [-1,1]^d, unit ball,
// product exponential with unit rates.
Density density_from_config(const ExperimentConfig& config);

// Exit codes: 0 pass (possibly with flags), 1 hard-gate failure, 2 config error.
int run_simulate(const ExperimentConfig& config);
int run_verify(const ExperimentConfig& config, VerificationReport* out = nullptr);
int run_bounds(const ExperimentConfig& config);

// Dispatch on config.command; maps ConfigError to exit code 2.
int run_command(const ExperimentConfig& config);

}  // namespace klslab
