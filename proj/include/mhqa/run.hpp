#pragma once

#include <string>

#include "mhqa/config.hpp"
#include "mhqa/trainer.hpp"

namespace mhqa {

// Subcommand implementations shared by the CLI and the test suites. Each
// writes its outputs under cfg.out_dir only and returns a process exit code.
int run_synth(const RunConfig& cfg);
int run_train(const RunConfig& cfg);
int run_eval(const RunConfig& cfg);
int run_predict(const RunConfig& cfg);
int run_gradcheck(const RunConfig& cfg);
int run_shortcuts(const RunConfig& cfg);

int run_command(const std::string& command, const RunConfig& cfg);

// Wiring helpers, exposed for tests.
ModelConfig model_config_from(const RunConfig& cfg);
TrainConfig train_config_from(const RunConfig& cfg);

} // namespace mhqa
