#pragma once

#include "run_config.hpp"

namespace gridwave::cli {

void cmd_simulate(const RunConfig& cfg);
void cmd_tdoa(const RunConfig& cfg);
void cmd_map(const RunConfig& cfg);
void cmd_pipeline(const RunConfig& cfg);

}  // namespace gridwave::cli
