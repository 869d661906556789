#pragma once

#include <CLI11.hpp>

namespace defence::cli {

void add_detect(CLI::App& app);
void add_train_svm(CLI::App& app);
void add_flow(CLI::App& app);
void add_shift(CLI::App& app);
void add_run(CLI::App& app);
void add_synth(CLI::App& app);
void add_metrics(CLI::App& app);
void add_mask_score(CLI::App& app);

}  // namespace defence::cli
