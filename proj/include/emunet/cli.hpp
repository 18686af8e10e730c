#pragma once

#include <string>
#include <vector>

namespace emunet {

// Exit codes: 0 success, 2 config error, 3 missing artifact, 4 validation
// threshold failure, 1 anything else. Exposed as a function so tests can
// drive the pipeline in-process.
int run_cli(const std::vector<std::string>& args);

}  // namespace emunet
