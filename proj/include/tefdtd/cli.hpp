#pragma once

#include <string>
#include <vector>

namespace tefdtd {

/// Command line entry point (args exclude the program name). Returns the
/// process exit code: 0 success, 2 bad configuration or arguments, 3 run
/// aborted because a field diverged.
int cli_entry(const std::vector<std::string>& args);

} // namespace tefdtd
